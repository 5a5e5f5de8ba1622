use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{Dag, Move, ScoreCache};
use crate::behavior::DataSet;
use crate::rng::{self, purpose};
use crate::{Error, Result};

/// Smallest score gain a move must bring to be accepted.
const MIN_GAIN: f64 = 1e-9;

/// Probability of each forward edge in a random restart graph.
const RESTART_EDGE_PROB: f64 = 0.15;

/// Structure-search and fitting settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnConfig {
    pub max_parents: usize,
    /// Laplace pseudo-count added to every CPT cell.
    pub smoothing: f64,
    /// Random restarts after the initial climb from the empty graph.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            max_parents: 3,
            smoothing: 1.0,
            restarts: 5,
            seed: 0,
        }
    }
}

impl LearnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_parents == 0 {
            return Err(Error::invalid("max_parents must be at least 1"));
        }
        if !(self.smoothing > 0.0 && self.smoothing.is_finite()) {
            return Err(Error::invalid(format!("smoothing {} must be positive", self.smoothing)));
        }
        Ok(())
    }
}

/// One greedy ascent: accepted moves and the score after each.
#[derive(Debug, Clone, PartialEq)]
pub struct Climb {
    pub start: Dag,
    pub start_score: f64,
    pub moves: Vec<Move>,
    pub scores: Vec<f64>,
    pub end: Dag,
}

impl Climb {
    pub fn final_score(&self) -> f64 {
        self.scores.last().copied().unwrap_or(self.start_score)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub dag: Dag,
    pub score: f64,
    pub climbs: Vec<Climb>,
}

/// Best-improvement hill climbing from `start`. Ties between equally good
/// moves go to the first in lexicographic move order.
fn climb(cache: &mut ScoreCache<'_>, start: Dag, max_parents: usize) -> Result<Climb> {
    let start_score = cache.total(&start)?;
    let mut dag = start.clone();
    let mut moves = Vec::new();
    let mut scores = Vec::new();
    let mut score = start_score;
    loop {
        let mut best: Option<(Move, f64)> = None;
        for m in dag.legal_moves(max_parents) {
            let d = cache.delta(&dag, m);
            if d > MIN_GAIN && best.is_none_or(|(_, bd)| d > bd) {
                best = Some((m, d));
            }
        }
        let Some((m, d)) = best else { break };
        dag.apply(m)?;
        debug_assert!(dag.is_acyclic());
        score += d;
        moves.push(m);
        scores.push(score);
    }
    Ok(Climb {
        start,
        start_score,
        moves,
        scores,
        end: dag,
    })
}

/// A random DAG whose edges all point forward in a shuffled node order.
fn random_start(n: usize, max_parents: usize, seed: u64) -> Dag {
    let mut rng = rng::from_seed(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut dag = Dag::empty(n);
    for j in 1..n {
        for i in 0..j {
            let (u, v) = (order[i], order[j]);
            if dag.parents(v).len() < max_parents && rng.gen_bool(RESTART_EDGE_PROB) {
                dag.add_edge(u, v).expect("forward edges cannot form a cycle");
            }
        }
    }
    dag
}

fn better(a: (f64, &Dag), b: (f64, &Dag)) -> bool {
    match a.0.partial_cmp(&b.0) {
        Some(Ordering::Greater) => true,
        Some(Ordering::Equal) => a.1.edges() < b.1.edges(),
        _ => false,
    }
}

/// Learns a structure and keeps the full search record.
///
/// The class is the last column and needs at least two rows per value.
pub fn learn_structure_traced(data: &DataSet, config: &LearnConfig) -> Result<SearchOutcome> {
    config.validate()?;
    let class = data.n_vars() - 1;
    if let Some(c) = data.value_counts(class).iter().position(|&k| k < 2) {
        return Err(Error::invalid(format!(
            "class value {} has fewer than 2 rows",
            data.variables()[class].states[c]
        )));
    }
    let n = data.n_vars();
    let mut cache = ScoreCache::new(data)?;
    let mut climbs = Vec::with_capacity(config.restarts + 1);
    climbs.push(climb(&mut cache, Dag::empty(n), config.max_parents)?);
    for r in 1..=config.restarts {
        let seed = rng::derive_seed(config.seed, r as u64, purpose::LEARN);
        let start = random_start(n, config.max_parents, seed);
        climbs.push(climb(&mut cache, start, config.max_parents)?);
    }
    let mut best = 0;
    for (i, c) in climbs.iter().enumerate().skip(1) {
        if better((c.final_score(), &c.end), (climbs[best].final_score(), &climbs[best].end)) {
            best = i;
        }
    }
    Ok(SearchOutcome {
        dag: climbs[best].end.clone(),
        score: climbs[best].final_score(),
        climbs,
    })
}

/// Greedy BIC hill climbing with random restarts; deterministic in
/// `config.seed`.
pub fn learn_structure(data: &DataSet, config: &LearnConfig) -> Result<Dag> {
    learn_structure_traced(data, config).map(|o| o.dag)
}
