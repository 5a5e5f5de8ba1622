use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::dataset::{ABSENT, INDOOR, MOVE_NONE, MOVE_RUN, MOVE_WALK, OCCURRED, OUTDOOR};
use super::{Attribute, BehaviorRecord, DataSet, SessionLog, CLASS_COLUMN};
use crate::{rng, Error, Result};

/// Records aggregated into one dataset row.
pub const DEFAULT_WINDOW: usize = 5;

/// Fraction of each class assigned to the training half.
pub const DEFAULT_SPLIT_RATIO: f64 = 0.5;

/// Aggregates each run of `window` consecutive records into one row.
///
/// A behavior column reads `occurred` when the behavior appears anywhere in
/// the window. `location` is the modal context location (ties go indoor) and
/// `movement` is the most frequent of walk/run/none, where a movement tick
/// walks indoors and runs outdoors; ties resolve walk, then run, then none.
/// Trailing partial windows are dropped.
pub fn to_dataset(logs: &[SessionLog], window: usize) -> Result<DataSet> {
    if window == 0 {
        return Err(Error::invalid("window must be at least 1"));
    }
    if logs.is_empty() {
        return Err(Error::invalid("no session logs"));
    }
    let mut ds = DataSet::behavior();
    for log in logs {
        for chunk in log.records.chunks_exact(window) {
            let mut row = window_row(chunk);
            row[CLASS_COLUMN] = log.player.class_index();
            ds.push_row(&row)?;
        }
    }
    Ok(ds)
}

fn window_row(chunk: &[BehaviorRecord]) -> [u8; 11] {
    let mut row = [ABSENT; 11];
    let (mut indoor, mut outdoor) = (0usize, 0usize);
    // walk, run, none
    let mut moves = [0usize; 3];
    for r in chunk {
        if r.context.location_indoor {
            indoor += 1;
        } else {
            outdoor += 1;
        }
        match r.behavior {
            Attribute::Movement if r.context.location_indoor => moves[0] += 1,
            Attribute::Movement => moves[1] += 1,
            _ => moves[2] += 1,
        }
        if !matches!(r.behavior, Attribute::Location | Attribute::Movement) {
            row[r.behavior.column()] = OCCURRED;
        }
    }
    row[Attribute::Location.column()] = if indoor >= outdoor { INDOOR } else { OUTDOOR };
    let mut best = 0;
    for k in 1..3 {
        if moves[k] > moves[best] {
            best = k;
        }
    }
    row[Attribute::Movement.column()] = [MOVE_WALK, MOVE_RUN, MOVE_NONE][best];
    row
}

/// Stratified, seeded split into `(train, test)`.
///
/// The class is the last column. Each class contributes `round(ratio * n_c)`
/// of its rows to the training half; both halves keep the original row order.
pub fn split(data: &DataSet, ratio: f64, seed: u64) -> Result<(DataSet, DataSet)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::invalid(format!("split ratio {ratio} not in (0, 1)")));
    }
    let class = data.n_vars() - 1;
    let mut by_class: Vec<Vec<usize>> = alloc::vec![Vec::new(); data.cardinality(class)];
    for (i, row) in data.rows().enumerate() {
        by_class[usize::from(row[class])].push(i);
    }
    if let Some((c, rows)) = by_class.iter().enumerate().find(|(_, r)| r.len() < 2) {
        return Err(Error::invalid(format!(
            "class {} has {} rows, need at least 2",
            data.variables()[class].states[c],
            rows.len()
        )));
    }
    let mut rng = rng::from_seed(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for mut rows in by_class {
        rows.shuffle(&mut rng);
        let k = libm::round(ratio * rows.len() as f64) as usize;
        train.extend_from_slice(&rows[..k]);
        test.extend_from_slice(&rows[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((data.select(&train), data.select(&test)))
}
