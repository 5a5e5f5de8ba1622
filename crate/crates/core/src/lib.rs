//! Behavior simulation, discrete Bayesian-network classification and
//! closed-loop expert-to-learner behavior transfer.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command-line front end live in the `skillxfer` companion crate.
#![no_std]

extern crate alloc;

pub mod bayes;
pub mod behavior;
mod error;
pub mod game;
#[cfg(any(test, feature = "oracles"))]
pub mod oracle;
pub mod rng;
pub mod transfer;

pub use error::{Error, Result};
