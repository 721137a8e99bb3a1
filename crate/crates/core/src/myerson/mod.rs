//! Myerson's optimal single-item auction on discrete priors.

mod ironing;
mod mrs;
mod posted;

pub use ironing::{ironed_virtuals, VirtualValueTable};
pub use mrs::{optimal_revenue_single_item, Mrs, ENUMERATION_CAP};
pub use posted::optimal_posted_price;

use serde::Serialize;

use crate::dist_core::Profile;
use crate::scalar::Scalar;

/// Allocation `alloc[i][j]` and per-player payments.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome<S> {
    pub alloc: Vec<Vec<bool>>,
    pub payments: Vec<S>,
}

impl<S: Scalar> Outcome<S> {
    pub fn empty(n: usize, m: usize) -> Self {
        Outcome { alloc: vec![vec![false; m]; n], payments: vec![S::zero(); n] }
    }

    pub fn revenue(&self) -> S {
        self.payments.iter().fold(S::zero(), |a, p| a + p.clone())
    }

    /// Each item goes to at most one player.
    pub fn is_feasible(&self) -> bool {
        let m = self.alloc.first().map_or(0, |r| r.len());
        (0..m).all(|j| self.alloc.iter().filter(|row| row[j]).count() <= 1)
    }

    /// Value of player `i` for what they received, additively.
    pub fn value_of(&self, i: usize, values: &[S]) -> S {
        self.alloc[i]
            .iter()
            .zip(values)
            .filter(|(a, _)| **a)
            .fold(S::zero(), |acc, (_, v)| acc + v.clone())
    }
}

/// A deterministic direct mechanism.
pub trait Mechanism<S: Scalar>: Send + Sync {
    fn outcome(&self, bids: &Profile<S>) -> Outcome<S>;
}
