use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{Dag, Move};
use crate::behavior::DataSet;
use crate::{Error, Result};

/// Joint-configuration index of `parents` in `row` (mixed radix, first
/// parent most significant).
pub(crate) fn config_index(row: &[u8], parents: &[usize], cards: &[usize]) -> usize {
    parents
        .iter()
        .zip(cards)
        .fold(0, |acc, (&p, &c)| acc * c + usize::from(row[p]))
}

/// Counts of `child` values for each parent configuration, flattened as
/// `counts[config * r + value]`.
pub(crate) fn family_counts(data: &DataSet, child: usize, parents: &[usize]) -> Vec<u32> {
    let cards: Vec<usize> = parents.iter().map(|&p| data.cardinality(p)).collect();
    let q: usize = cards.iter().product();
    let r = data.cardinality(child);
    let mut counts = vec![0u32; q * r];
    for row in data.rows() {
        counts[config_index(row, parents, &cards) * r + usize::from(row[child])] += 1;
    }
    counts
}

/// BIC contribution of one node given its parents: the maximized
/// log-likelihood minus `½ ln N` per free parameter.
pub fn family_score(data: &DataSet, child: usize, parents: &[usize]) -> f64 {
    let r = data.cardinality(child);
    let counts = family_counts(data, child, parents);
    let q = counts.len() / r;
    let mut ll = 0.0;
    for row in counts.chunks_exact(r) {
        let total: u32 = row.iter().sum();
        if total == 0 {
            continue;
        }
        let lt = libm::log(f64::from(total));
        for &c in row {
            if c > 0 {
                ll += f64::from(c) * (libm::log(f64::from(c)) - lt);
            }
        }
    }
    let n = data.n_rows() as f64;
    ll - 0.5 * libm::log(n) * ((r - 1) * q) as f64
}

fn check(dag: &Dag, data: &DataSet) -> Result<()> {
    if data.is_empty() {
        return Err(Error::invalid("cannot score an empty dataset"));
    }
    if dag.n_nodes() != data.n_vars() {
        return Err(Error::invalid(format!(
            "graph has {} nodes but data has {} variables",
            dag.n_nodes(),
            data.n_vars()
        )));
    }
    Ok(())
}

/// Decomposable BIC score of `dag` on `data`; higher is better.
pub fn bic_score(dag: &Dag, data: &DataSet) -> Result<f64> {
    check(dag, data)?;
    Ok((0..dag.n_nodes())
        .map(|v| family_score(data, v, dag.parents(v)))
        .sum())
}

/// Memoized family scores over one dataset.
pub struct ScoreCache<'a> {
    data: &'a DataSet,
    cache: BTreeMap<(usize, Vec<usize>), f64>,
}

impl<'a> ScoreCache<'a> {
    pub fn new(data: &'a DataSet) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::invalid("cannot score an empty dataset"));
        }
        Ok(ScoreCache {
            data,
            cache: BTreeMap::new(),
        })
    }

    /// Family score for `child` with a sorted parent list.
    pub fn family(&mut self, child: usize, parents: &[usize]) -> f64 {
        debug_assert!(parents.windows(2).all(|w| w[0] < w[1]));
        let key = (child, parents.to_vec());
        if let Some(&s) = self.cache.get(&key) {
            return s;
        }
        let s = family_score(self.data, child, parents);
        self.cache.insert(key, s);
        s
    }

    pub fn total(&mut self, dag: &Dag) -> Result<f64> {
        check(dag, self.data)?;
        Ok((0..dag.n_nodes())
            .map(|v| self.family(v, dag.parents(v)))
            .sum())
    }

    fn with(&mut self, child: usize, parents: &[usize], extra: usize) -> f64 {
        let mut ps = parents.to_vec();
        let at = ps.binary_search(&extra).unwrap_err();
        ps.insert(at, extra);
        self.family(child, &ps)
    }

    fn without(&mut self, child: usize, parents: &[usize], gone: usize) -> f64 {
        let ps: Vec<usize> = parents.iter().copied().filter(|&p| p != gone).collect();
        self.family(child, &ps)
    }

    /// Score change of applying `m` to `dag`, from the affected families
    /// alone.
    pub fn delta(&mut self, dag: &Dag, m: Move) -> f64 {
        match m {
            Move::Add(u, v) => {
                let pv = dag.parents(v);
                self.with(v, pv, u) - self.family(v, pv)
            }
            Move::Delete(u, v) => {
                let pv = dag.parents(v);
                self.without(v, pv, u) - self.family(v, pv)
            }
            Move::Reverse(u, v) => {
                let pv = dag.parents(v);
                let pu = dag.parents(u);
                self.without(v, pv, u) - self.family(v, pv) + self.with(u, pu, v)
                    - self.family(u, pu)
            }
        }
    }
}
