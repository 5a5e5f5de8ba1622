use alloc::borrow::Cow;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::score::{config_index, family_counts};
use super::Dag;
use crate::behavior::{DataSet, Variable};
use crate::game::NORMALIZATION_TOLERANCE;
use crate::{Error, Result};

/// Conditional probability table of one node.
///
/// Row `j` is the node's distribution under the `j`-th joint parent
/// assignment, enumerated in mixed radix with the first parent most
/// significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    parents: Vec<usize>,
    parent_cards: Vec<usize>,
    card: usize,
    probs: Vec<f64>,
}

impl Cpt {
    pub fn new(
        parents: Vec<usize>,
        parent_cards: Vec<usize>,
        card: usize,
        probs: Vec<f64>,
    ) -> Result<Self> {
        if parents.len() != parent_cards.len() {
            return Err(Error::invalid("parent list and cardinalities differ in length"));
        }
        let q: usize = parent_cards.iter().product();
        if card == 0 || probs.len() != q * card {
            return Err(Error::invalid(format!(
                "table has {} entries, expected {} rows of {card}",
                probs.len(),
                q
            )));
        }
        let cpt = Cpt {
            parents,
            parent_cards,
            card,
            probs,
        };
        for (j, row) in cpt.rows().enumerate() {
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::invalid(format!("row {j} has an invalid probability")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(Error::invalid(format!("row {j} sums to {total}")));
            }
        }
        Ok(cpt)
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn parent_cards(&self) -> &[usize] {
        &self.parent_cards
    }

    pub fn cardinality(&self) -> usize {
        self.card
    }

    pub fn n_rows(&self) -> usize {
        self.probs.len() / self.card
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.probs[j * self.card..(j + 1) * self.card]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.probs.chunks_exact(self.card)
    }

    /// The parent assignment (state indices) of row `j`.
    pub fn row_assignment(&self, mut j: usize) -> Vec<u8> {
        let mut out = vec![0u8; self.parents.len()];
        for (slot, &c) in out.iter_mut().zip(&self.parent_cards).rev() {
            *slot = (j % c) as u8;
            j /= c;
        }
        out
    }

    fn prob_in(&self, node: usize, full_row: &[u8]) -> f64 {
        self.row(config_index(full_row, &self.parents, &self.parent_cards))[usize::from(full_row[node])]
    }
}

/// A discrete Bayesian network with a designated class node.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesNet {
    variables: Vec<Variable>,
    dag: Dag,
    cpts: Vec<Cpt>,
    class: usize,
}

impl BayesNet {
    /// Checks that every CPT matches the graph and the variable domains.
    pub fn new(variables: Vec<Variable>, dag: Dag, cpts: Vec<Cpt>, class: usize) -> Result<Self> {
        let n = variables.len();
        if dag.n_nodes() != n || cpts.len() != n {
            return Err(Error::invalid(format!(
                "{n} variables, {} graph nodes, {} tables",
                dag.n_nodes(),
                cpts.len()
            )));
        }
        if class >= n {
            return Err(Error::invalid(format!("class node {class} out of range")));
        }
        if !dag.is_acyclic() {
            return Err(Error::invalid("graph has a cycle"));
        }
        for (v, cpt) in cpts.iter().enumerate() {
            let name = &variables[v].name;
            if cpt.parents != dag.parents(v) {
                return Err(Error::invalid(format!("table of {name} disagrees with graph parents")));
            }
            if cpt.card != variables[v].cardinality() {
                return Err(Error::invalid(format!("table of {name} has wrong cardinality")));
            }
            if cpt
                .parents
                .iter()
                .zip(&cpt.parent_cards)
                .any(|(&p, &c)| variables[p].cardinality() != c)
            {
                return Err(Error::invalid(format!("table of {name} has wrong parent domains")));
            }
        }
        Ok(BayesNet {
            variables,
            dag,
            cpts,
            class,
        })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    pub fn cpt(&self, v: usize) -> &Cpt {
        &self.cpts[v]
    }

    pub fn class(&self) -> usize {
        self.class
    }

    /// Expands `row` to a full assignment with the class cell at 0. Accepts
    /// either every variable (class cell ignored) or every variable but the
    /// class.
    fn full_row<'r>(&self, row: &'r [u8]) -> Result<Cow<'r, [u8]>> {
        let n = self.variables.len();
        let full: Cow<'r, [u8]> = if row.len() == n {
            Cow::Borrowed(row)
        } else if row.len() + 1 == n {
            let mut v = Vec::with_capacity(n);
            v.extend_from_slice(&row[..self.class]);
            v.push(0);
            v.extend_from_slice(&row[self.class..]);
            Cow::Owned(v)
        } else {
            return Err(Error::invalid(format!(
                "row has {} values for {n} variables",
                row.len()
            )));
        };
        for (v, (&x, var)) in full.iter().zip(&self.variables).enumerate() {
            if v != self.class && usize::from(x) >= var.cardinality() {
                return Err(Error::invalid(format!(
                    "value index {x} outside domain of {}",
                    var.name
                )));
            }
        }
        Ok(full)
    }

    /// ln P(row) with every variable assigned.
    pub fn log_joint(&self, row: &[u8]) -> f64 {
        self.cpts
            .iter()
            .enumerate()
            .map(|(v, cpt)| libm::log(cpt.prob_in(v, row)))
            .sum()
    }

    /// P(class | evidence), exact: the factorized joint is evaluated once per
    /// class value and normalized in log space.
    pub fn class_posterior(&self, row: &[u8]) -> Result<Vec<f64>> {
        let mut full = self.full_row(row)?.into_owned();
        let k = self.variables[self.class].cardinality();
        let mut logs = Vec::with_capacity(k);
        for c in 0..k {
            full[self.class] = c as u8;
            logs.push(self.log_joint(&full));
        }
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(Error::invalid("evidence has probability zero under every class"));
        }
        let weights: Vec<f64> = logs.iter().map(|l| libm::exp(l - max)).collect();
        let z: f64 = weights.iter().sum();
        Ok(weights.into_iter().map(|w| w / z).collect())
    }

    /// Most probable class value; exact ties go to the lowest index.
    pub fn classify(&self, row: &[u8]) -> Result<u8> {
        let post = self.class_posterior(row)?;
        let mut best = 0;
        for (c, &p) in post.iter().enumerate() {
            if p > post[best] {
                best = c;
            }
        }
        Ok(best as u8)
    }

    /// Markov blanket of the class node.
    pub fn class_blanket(&self) -> Vec<usize> {
        self.dag
            .markov_blanket(self.class)
            .expect("class node is in graph")
            .into_iter()
            .collect()
    }
}

/// Fits Laplace-smoothed CPTs: each row is `(count + α) / (total + α·r)`.
/// The class is the last column.
pub fn fit_cpts(dag: &Dag, data: &DataSet, alpha: f64) -> Result<BayesNet> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("smoothing {alpha} must be positive")));
    }
    if dag.n_nodes() != data.n_vars() {
        return Err(Error::invalid(format!(
            "graph has {} nodes but data has {} variables",
            dag.n_nodes(),
            data.n_vars()
        )));
    }
    let mut cpts = Vec::with_capacity(dag.n_nodes());
    for v in 0..dag.n_nodes() {
        let parents = dag.parents(v).to_vec();
        let parent_cards: Vec<usize> = parents.iter().map(|&p| data.cardinality(p)).collect();
        let r = data.cardinality(v);
        let counts = family_counts(data, v, &parents);
        let mut probs = Vec::with_capacity(counts.len());
        for row in counts.chunks_exact(r) {
            let total = f64::from(row.iter().sum::<u32>());
            let denom = total + alpha * r as f64;
            probs.extend(row.iter().map(|&c| (f64::from(c) + alpha) / denom));
        }
        cpts.push(Cpt::new(parents, parent_cards, r, probs)?);
    }
    BayesNet::new(data.variables().to_vec(), dag.clone(), cpts, data.n_vars() - 1)
}

/// Fraction of rows whose predicted class equals the recorded one.
pub fn accuracy(bn: &BayesNet, test: &DataSet) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::invalid("empty test set"));
    }
    if test.n_vars() != bn.variables.len() {
        return Err(Error::invalid("test set schema does not match the network"));
    }
    let mut hits = 0usize;
    for row in test.rows() {
        if bn.classify(row)? == row[bn.class] {
            hits += 1;
        }
    }
    Ok(hits as f64 / test.n_rows() as f64)
}
