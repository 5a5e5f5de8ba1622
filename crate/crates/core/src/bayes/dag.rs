use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A single structure-search step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Move {
    Add(usize, usize),
    Delete(usize, usize),
    Reverse(usize, usize),
}

/// A directed acyclic graph over a fixed node set `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dag {
    parents: Vec<Vec<usize>>,
}

impl Dag {
    /// The graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Dag {
            parents: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from `(parent, child)` pairs, rejecting cycles,
    /// duplicates, self-loops and unknown nodes.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut dag = Dag::empty(n);
        for &(u, v) in edges {
            dag.add_edge(u, v)?;
        }
        Ok(dag)
    }

    pub fn n_nodes(&self) -> usize {
        self.parents.len()
    }

    /// Parents of `v`, ascending.
    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_nodes()).filter(move |&c| self.parents[c].binary_search(&v).is_ok())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.parents[v].binary_search(&u).is_ok()
    }

    /// All edges as `(parent, child)`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .parents
            .iter()
            .enumerate()
            .flat_map(|(v, ps)| ps.iter().map(move |&u| (u, v)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn n_edges(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v >= self.n_nodes() {
            return Err(Error::invalid(format!("node {v} not in graph of {} nodes", self.n_nodes())));
        }
        Ok(())
    }

    /// Whether a directed path `from ⇝ to` exists, optionally ignoring one
    /// edge.
    fn reachable(&self, from: usize, to: usize, skip: Option<(usize, usize)>) -> bool {
        let n = self.n_nodes();
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(x) = stack.pop() {
            if x == to {
                return true;
            }
            for c in self.children(x) {
                if !seen[c] && skip != Some((x, c)) {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        false
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::invalid(format!("self-loop on node {u}")));
        }
        if self.has_edge(u, v) {
            return Err(Error::invalid(format!("duplicate edge {u} -> {v}")));
        }
        if self.reachable(v, u, None) {
            return Err(Error::invalid(format!("edge {u} -> {v} closes a cycle")));
        }
        let ps = &mut self.parents[v];
        let at = ps.binary_search(&u).unwrap_err();
        ps.insert(at, u);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_node(u)?;
        self.check_node(v)?;
        match self.parents[v].binary_search(&u) {
            Ok(i) => {
                self.parents[v].remove(i);
                Ok(())
            }
            Err(_) => Err(Error::invalid(format!("no edge {u} -> {v}"))),
        }
    }

    /// Whether `m` keeps the graph acyclic and every node within
    /// `max_parents` parents.
    pub fn is_legal(&self, m: Move, max_parents: usize) -> bool {
        let n = self.n_nodes();
        match m {
            Move::Add(u, v) => {
                u < n
                    && v < n
                    && u != v
                    && !self.has_edge(u, v)
                    && !self.has_edge(v, u)
                    && self.parents[v].len() < max_parents
                    && !self.reachable(v, u, None)
            }
            Move::Delete(u, v) => u < n && v < n && self.has_edge(u, v),
            Move::Reverse(u, v) => {
                u < n
                    && v < n
                    && self.has_edge(u, v)
                    && self.parents[u].len() < max_parents
                    && !self.reachable(u, v, Some((u, v)))
            }
        }
    }

    /// Every legal move, in lexicographic order.
    pub fn legal_moves(&self, max_parents: usize) -> Vec<Move> {
        let n = self.n_nodes();
        let mut out = Vec::new();
        for kind in 0..3 {
            for u in 0..n {
                for v in 0..n {
                    let m = match kind {
                        0 => Move::Add(u, v),
                        1 => Move::Delete(u, v),
                        _ => Move::Reverse(u, v),
                    };
                    if self.is_legal(m, max_parents) {
                        out.push(m);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&mut self, m: Move) -> Result<()> {
        match m {
            Move::Add(u, v) => self.add_edge(u, v),
            Move::Delete(u, v) => self.remove_edge(u, v),
            Move::Reverse(u, v) => {
                self.remove_edge(u, v)?;
                if let Err(e) = self.add_edge(v, u) {
                    self.add_edge(u, v).expect("restoring removed edge");
                    return Err(e);
                }
                Ok(())
            }
        }
    }

    /// A topological order, or `None` if the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.n_nodes();
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: Vec<usize> = (0..n).rev().filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(x) = ready.pop() {
            order.push(x);
            for c in (0..n).rev() {
                if self.has_edge(x, c) {
                    indegree[c] -= 1;
                    if indegree[c] == 0 {
                        ready.push(c);
                    }
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Parents, children and the children's other parents of `node`.
    pub fn markov_blanket(&self, node: usize) -> Result<BTreeSet<usize>> {
        self.check_node(node)?;
        let mut mb: BTreeSet<usize> = self.parents[node].iter().copied().collect();
        for c in self.children(node) {
            mb.insert(c);
            mb.extend(self.parents[c].iter().copied());
        }
        mb.remove(&node);
        Ok(mb)
    }
}
