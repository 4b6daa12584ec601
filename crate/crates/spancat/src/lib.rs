//! Exact computations with finite categories: fibrations over products,
//! adequate triples and span categories, dualization of fibrations,
//! straightening, and the calculus of mates.

pub mod error;
pub mod fibrations;
pub mod cli;
pub mod dualize;
pub mod fincat;
pub mod grothendieck;
pub mod mates;
pub mod monoidal;
pub mod selftest;
pub mod shapes;
pub mod triplespan;

pub use error::{Error, Result};

/// Outcome of a check, with a readable witness when it fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub passed: bool,
    pub witness: Option<String>,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict { passed: true, witness: None }
    }

    pub fn fail(witness: impl Into<String>) -> Self {
        Verdict { passed: false, witness: Some(witness.into()) }
    }
}
