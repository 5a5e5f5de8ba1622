//! Learned networks as JSON: variable domains, the class variable, edges as
//! `[parent, child]` name pairs, and one CPT per variable whose rows are
//! keyed by the parent assignment (state names, in parent order).

use serde::{Deserialize, Serialize};

use skillxfer_core::bayes::{BayesNet, Cpt, Dag};
use skillxfer_core::behavior::Variable;

use crate::{CliError, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDoc {
    class: String,
    variables: Vec<Variable>,
    edges: Vec<[String; 2]>,
    cpts: Vec<CptDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CptDoc {
    variable: String,
    parents: Vec<String>,
    rows: Vec<RowDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RowDoc {
    given: Vec<String>,
    probs: Vec<f64>,
}

pub fn write_json(bn: &BayesNet) -> String {
    let vars = bn.variables();
    let name = |v: usize| vars[v].name.clone();
    let doc = NetworkDoc {
        class: name(bn.class()),
        variables: vars.to_vec(),
        edges: bn.dag().edges().into_iter().map(|(u, v)| [name(u), name(v)]).collect(),
        cpts: bn
            .cpts()
            .iter()
            .enumerate()
            .map(|(v, cpt)| CptDoc {
                variable: name(v),
                parents: cpt.parents().iter().map(|&p| name(p)).collect(),
                rows: (0..cpt.n_rows())
                    .map(|j| RowDoc {
                        given: cpt
                            .row_assignment(j)
                            .iter()
                            .zip(cpt.parents())
                            .map(|(&s, &p)| vars[p].states[usize::from(s)].clone())
                            .collect(),
                        probs: cpt.row(j).to_vec(),
                    })
                    .collect(),
            })
            .collect(),
    };
    super::to_json(&doc)
}

pub fn read_json(text: &str) -> Result<BayesNet> {
    let doc: NetworkDoc =
        serde_json::from_str(text).map_err(|e| CliError::data(format!("network: {e}")))?;
    let vars = &doc.variables;
    let index = |name: &str| {
        vars.iter()
            .position(|v| v.name == name)
            .ok_or_else(|| CliError::data(format!("network: unknown variable {name:?}")))
    };
    let class = index(&doc.class)?;
    let edges = doc
        .edges
        .iter()
        .map(|[u, v]| Ok((index(u)?, index(v)?)))
        .collect::<Result<Vec<_>>>()?;
    let dag = Dag::from_edges(vars.len(), &edges)?;
    if doc.cpts.len() != vars.len() {
        return Err(CliError::data(format!(
            "network: {} tables for {} variables",
            doc.cpts.len(),
            vars.len()
        )));
    }
    let mut cpts = Vec::with_capacity(vars.len());
    for (v, c) in doc.cpts.iter().enumerate() {
        if c.variable != vars[v].name {
            return Err(CliError::data(format!(
                "network: table {v} is for {:?}, expected {:?}",
                c.variable, vars[v].name
            )));
        }
        let parents = c.parents.iter().map(|p| index(p)).collect::<Result<Vec<_>>>()?;
        let cards: Vec<usize> = parents.iter().map(|&p| vars[p].cardinality()).collect();
        let card = vars[v].cardinality();
        let n_rows: usize = cards.iter().product();
        let mut probs = vec![f64::NAN; n_rows * card];
        let mut seen = vec![false; n_rows];
        for row in &c.rows {
            let j = row_index(&row.given, &parents, vars)
                .ok_or_else(|| CliError::data(format!("network: bad assignment {:?} in table of {}", row.given, c.variable)))?;
            if seen[j] || row.probs.len() != card {
                return Err(CliError::data(format!(
                    "network: malformed row {:?} in table of {}",
                    row.given, c.variable
                )));
            }
            seen[j] = true;
            probs[j * card..(j + 1) * card].copy_from_slice(&row.probs);
        }
        if seen.contains(&false) {
            return Err(CliError::data(format!("network: table of {} is missing rows", c.variable)));
        }
        cpts.push(Cpt::new(parents, cards, card, probs)?);
    }
    Ok(BayesNet::new(doc.variables, dag, cpts, class)?)
}

fn row_index(given: &[String], parents: &[usize], vars: &[Variable]) -> Option<usize> {
    if given.len() != parents.len() {
        return None;
    }
    let mut j = 0;
    for (s, &p) in given.iter().zip(parents) {
        j = j * vars[p].cardinality() + usize::from(vars[p].state_index(s)?);
    }
    Some(j)
}
