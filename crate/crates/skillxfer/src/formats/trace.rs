//! Transfer traces (CSV summary and full JSON) and curve tables.
//!
//! The trace CSV has one row per iteration:
//! `iteration,accuracy,divergence,targeted,nudged_keys,terminal_reason`,
//! where list cells are `;`-joined names and `terminal_reason` is filled
//! only on the last row. The curves CSV has one row per condition key
//! (`key,behavior,` then one column `<player>_it<n>` per player per
//! iteration).

use std::collections::BTreeSet;

use skillxfer_core::behavior::{Attribute, PlayerId};
use skillxfer_core::game::ConditionKey;
use skillxfer_core::transfer::{CurveSeries, CurveTable, TerminalReason, TransferTrace};

use crate::{CliError, Result};

const TRACE_HEADER: [&str; 6] = [
    "iteration",
    "accuracy",
    "divergence",
    "targeted",
    "nudged_keys",
    "terminal_reason",
];

/// One parsed row of the trace CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub accuracy: f64,
    pub divergence: f64,
    pub targeted: BTreeSet<Attribute>,
    pub nudged_keys: Vec<ConditionKey>,
    pub terminal_reason: Option<TerminalReason>,
}

impl TraceRow {
    pub fn from_trace(trace: &TransferTrace) -> Vec<TraceRow> {
        let last = trace.iterations.len();
        trace
            .iterations
            .iter()
            .map(|r| TraceRow {
                iteration: r.iteration,
                accuracy: r.accuracy,
                divergence: r.divergence,
                targeted: r.targeted.clone(),
                nudged_keys: r.nudged_keys.clone(),
                terminal_reason: (r.iteration == last).then_some(trace.terminal_reason),
            })
            .collect()
    }
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("CSV is UTF-8")
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn split_names<T: std::str::FromStr>(cell: &str, what: &str) -> Result<Vec<T>> {
    if cell.is_empty() {
        return Ok(Vec::new());
    }
    cell.split(';')
        .map(|s| s.parse().map_err(|_| CliError::data(format!("trace: unknown {what} {s:?}"))))
        .collect()
}

fn number(cell: &str, what: &str) -> Result<f64> {
    cell.parse()
        .map_err(|_| CliError::data(format!("{what}: {cell:?} is not a number")))
}

pub fn write_trace_csv(trace: &TransferTrace) -> String {
    let mut w = writer();
    w.write_record(TRACE_HEADER).expect("in-memory CSV");
    for r in TraceRow::from_trace(trace) {
        w.write_record([
            r.iteration.to_string(),
            r.accuracy.to_string(),
            r.divergence.to_string(),
            join(&r.targeted),
            join(&r.nudged_keys),
            r.terminal_reason.map(|t| t.name().to_string()).unwrap_or_default(),
        ])
        .expect("in-memory CSV");
    }
    finish(w)
}

pub fn read_trace_csv(text: &str) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| CliError::data(format!("trace: {e}")))?;
    if header.iter().ne(TRACE_HEADER) {
        return Err(CliError::data("trace: unexpected header"));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::data(format!("trace: {e}")))?;
        let terminal_reason = match &rec[5] {
            "" => None,
            "threshold_reached" => Some(TerminalReason::ThresholdReached),
            "max_iterations" => Some(TerminalReason::MaxIterations),
            other => return Err(CliError::data(format!("trace: unknown terminal reason {other:?}"))),
        };
        out.push(TraceRow {
            iteration: rec[0]
                .parse()
                .map_err(|_| CliError::data(format!("trace: bad iteration {:?}", &rec[0])))?,
            accuracy: number(&rec[1], "trace accuracy")?,
            divergence: number(&rec[2], "trace divergence")?,
            targeted: split_names::<Attribute>(&rec[3], "attribute")?.into_iter().collect(),
            nudged_keys: split_names(&rec[4], "condition key")?,
            terminal_reason,
        });
    }
    Ok(out)
}

pub fn write_trace_json(trace: &TransferTrace) -> String {
    super::to_json(trace)
}

pub fn read_trace_json(text: &str) -> Result<TransferTrace> {
    let t: TransferTrace =
        serde_json::from_str(text).map_err(|e| CliError::data(format!("trace: {e}")))?;
    if t.iterations.is_empty() {
        return Err(CliError::data("trace: no iterations"));
    }
    Ok(t)
}

pub fn write_curves_csv(table: &CurveTable) -> String {
    let mut w = writer();
    let mut header = vec!["key".to_string(), "behavior".to_string()];
    header.extend(table.series.iter().map(|s| format!("{}_it{}", s.player, s.iteration)));
    w.write_record(&header).expect("in-memory CSV");
    for (i, k) in table.keys().iter().enumerate() {
        let mut rec = vec![k.to_string(), table.behaviors[i].to_string()];
        rec.extend(table.series.iter().map(|s| s.values[i].to_string()));
        w.write_record(&rec).expect("in-memory CSV");
    }
    finish(w)
}

pub fn read_curves_csv(text: &str) -> Result<CurveTable> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r
        .headers()
        .map_err(|e| CliError::data(format!("curves: {e}")))?
        .clone();
    if header.len() < 2 || &header[0] != "key" || &header[1] != "behavior" {
        return Err(CliError::data("curves: unexpected header"));
    }
    let mut series = Vec::new();
    for col in header.iter().skip(2) {
        let (player, it) = col
            .split_once("_it")
            .ok_or_else(|| CliError::data(format!("curves: bad column {col:?}")))?;
        series.push(CurveSeries {
            player: player
                .parse::<PlayerId>()
                .map_err(|_| CliError::data(format!("curves: bad column {col:?}")))?,
            iteration: it
                .parse()
                .map_err(|_| CliError::data(format!("curves: bad column {col:?}")))?,
            values: [0.0; 9],
        });
    }
    let mut behaviors = [Attribute::Movement; 9];
    let mut n = 0;
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::data(format!("curves: {e}")))?;
        let key: ConditionKey = rec[0]
            .parse()
            .map_err(|_| CliError::data(format!("curves: unknown key {:?}", &rec[0])))?;
        let i = key.position();
        if i != n {
            return Err(CliError::data(format!("curves: key {key} out of order")));
        }
        behaviors[i] = rec[1]
            .parse()
            .map_err(|_| CliError::data(format!("curves: unknown behavior {:?}", &rec[1])))?;
        for (s, cell) in series.iter_mut().zip(rec.iter().skip(2)) {
            s.values[i] = number(cell, "curves")?;
        }
        n += 1;
    }
    if n != ConditionKey::ALL.len() {
        return Err(CliError::data(format!("curves: {n} key rows, expected 9")));
    }
    Ok(CurveTable { behaviors, series })
}
