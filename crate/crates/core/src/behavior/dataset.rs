use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Attribute, PlayerId};
use crate::{Error, Result};

/// A categorical variable: a name and its ordered value set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub states: Vec<String>,
}

impl Variable {
    pub fn new(name: impl Into<String>, states: &[&str]) -> Self {
        Variable {
            name: name.into(),
            states: states.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn cardinality(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, state: &str) -> Option<u8> {
        self.states.iter().position(|s| s == state).map(|i| i as u8)
    }
}

/// Column index of the class variable `ID` in behavior datasets.
pub const CLASS_COLUMN: usize = 10;

pub(crate) const ABSENT: u8 = 0;
pub(crate) const OCCURRED: u8 = 1;
pub(crate) const INDOOR: u8 = 0;
pub(crate) const OUTDOOR: u8 = 1;
pub(crate) const MOVE_NONE: u8 = 0;
pub(crate) const MOVE_WALK: u8 = 1;
pub(crate) const MOVE_RUN: u8 = 2;

/// The behavior dataset schema: ten attribute columns in index order, then
/// the class column `ID`.
pub fn behavior_variables() -> Vec<Variable> {
    let mut vars: Vec<Variable> = Attribute::ALL
        .iter()
        .map(|a| match a {
            Attribute::Location => Variable::new(a.name(), &["indoor", "outdoor"]),
            Attribute::Movement => Variable::new(a.name(), &["none", "walk", "run"]),
            _ => Variable::new(a.name(), &["absent", "occurred"]),
        })
        .collect();
    vars.push(Variable::new("ID", &[PlayerId::Id1.name(), PlayerId::Id2.name()]));
    vars
}

/// A table of categorical rows. Cells hold state indices into each
/// variable's value set; every cell is checked against its domain on insert.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataSet {
    variables: Vec<Variable>,
    cells: Vec<u8>,
}

impl DataSet {
    pub fn new(variables: Vec<Variable>) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::invalid("dataset needs at least one variable"));
        }
        for (i, v) in variables.iter().enumerate() {
            if v.states.is_empty() || v.states.len() > usize::from(u8::MAX) {
                return Err(Error::invalid(format!(
                    "variable {} must have 1..=255 states",
                    v.name
                )));
            }
            if variables[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::invalid(format!("duplicate variable {}", v.name)));
            }
        }
        Ok(DataSet {
            variables,
            cells: Vec::new(),
        })
    }

    /// An empty table with the behavior schema.
    pub fn behavior() -> Self {
        DataSet::new(behavior_variables()).expect("behavior schema is valid")
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn n_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn n_rows(&self) -> usize {
        self.cells.len() / self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cardinality(&self, var: usize) -> usize {
        self.variables[var].cardinality()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn push_row(&mut self, row: &[u8]) -> Result<()> {
        self.check_row(row)?;
        self.cells.extend_from_slice(row);
        Ok(())
    }

    fn check_row(&self, row: &[u8]) -> Result<()> {
        if row.len() != self.variables.len() {
            return Err(Error::invalid(format!(
                "row has {} cells, expected {}",
                row.len(),
                self.variables.len()
            )));
        }
        for (v, &x) in self.variables.iter().zip(row) {
            if usize::from(x) >= v.cardinality() {
                return Err(Error::invalid(format!(
                    "value index {x} outside domain of {}",
                    v.name
                )));
            }
        }
        Ok(())
    }

    pub fn row(&self, i: usize) -> &[u8] {
        let n = self.variables.len();
        &self.cells[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[u8]> + '_ {
        self.cells.chunks_exact(self.variables.len())
    }

    /// A table with the same schema holding the rows at `indices`, in order.
    pub fn select(&self, indices: &[usize]) -> DataSet {
        let mut out = DataSet {
            variables: self.variables.clone(),
            cells: Vec::with_capacity(indices.len() * self.variables.len()),
        };
        for &i in indices {
            out.cells.extend_from_slice(self.row(i));
        }
        out
    }

    /// Number of rows per state of `var`.
    pub fn value_counts(&self, var: usize) -> Vec<usize> {
        let mut counts = alloc::vec![0; self.cardinality(var)];
        for row in self.rows() {
            counts[usize::from(row[var])] += 1;
        }
        counts
    }

    /// Appends all rows of `other`, which must share the schema.
    pub fn extend(&mut self, other: &DataSet) -> Result<()> {
        if other.variables != self.variables {
            return Err(Error::invalid("cannot merge datasets with different schemas"));
        }
        self.cells.extend_from_slice(&other.cells);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn behavior_schema_shape() {
        let vars = behavior_variables();
        assert_eq!(vars.len(), 11);
        assert_eq!(vars[CLASS_COLUMN].name, "ID");
        for a in Attribute::ALL {
            assert_eq!(vars[a.column()].name, a.name());
        }
        assert_eq!(vars[Attribute::Movement.column()].states, ["none", "walk", "run"]);
        assert_eq!(vars[Attribute::Location.column()].states, ["indoor", "outdoor"]);
    }

    #[test]
    fn out_of_domain_cells_are_rejected() {
        let mut ds = DataSet::behavior();
        let mut row = [0u8; 11];
        assert!(ds.push_row(&row).is_ok());
        row[Attribute::Movement.column()] = 3;
        assert!(ds.push_row(&row).is_err());
        assert!(ds.push_row(&[0u8; 10]).is_err());
        assert_eq!(ds.n_rows(), 1);
    }

    #[test]
    fn duplicate_names_rejected() {
        let v = Variable::new("a", &["x", "y"]);
        assert!(DataSet::new(alloc::vec![v.clone(), v]).is_err());
    }
}
