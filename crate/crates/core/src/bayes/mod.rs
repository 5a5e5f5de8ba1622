//! Discrete Bayesian networks: structure search under BIC, Laplace-smoothed
//! parameter fitting and exact class-posterior inference.

mod dag;
mod net;
mod score;
mod search;

pub use dag::{Dag, Move};
pub use net::{accuracy, fit_cpts, BayesNet, Cpt};
pub use score::{bic_score, family_score, ScoreCache};
pub use search::{learn_structure, learn_structure_traced, Climb, LearnConfig, SearchOutcome};
