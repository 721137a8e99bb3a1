//! Auctions whose designer only learns the prior through value queries
//! (`Pr[x >= v]`) or quantile queries (the value at a given tail
//! probability). Each prior is discretized from a fixed, non-adaptive set
//! of queries and a simple mechanism is run on the discretized prior.

pub mod adversary;
pub mod dist_core;
pub mod error;
pub mod harness;
pub mod myerson;
pub mod query_mechs;
pub mod query_schemes;
pub mod scalar;
pub mod simple_mechs;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
