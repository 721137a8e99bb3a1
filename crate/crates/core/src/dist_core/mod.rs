//! Single-dimensional value distributions, the two query oracles over them,
//! and the auction instances built from them.

mod checks;
mod discrete;
mod instance;
pub mod io;
mod oracle;
mod piecewise;
mod regular;

pub use checks::{dominates, revenue_curve_regularity};
pub use discrete::DiscretePmf;
pub use instance::{AuctionInstance, Profile, ValuationClass};
pub use oracle::{Oracle, Query, QueryCounts, QueryOracle, StubOracle};
pub use piecewise::{CdfPiece, PiecewiseCdf, Segment};
pub use regular::NamedRegular;

use rand::Rng;

use crate::error::Result;
use crate::scalar::Scalar;

/// Answer to a quantile query; `q = 0` legitimately returns `PosInf`.
#[derive(Clone, Debug, PartialEq)]
pub enum Answer<S> {
    Finite(S),
    PosInf,
}

impl<S: Clone> Answer<S> {
    pub fn finite(&self) -> Option<S> {
        match self {
            Answer::Finite(v) => Some(v.clone()),
            Answer::PosInf => None,
        }
    }
}

/// Anything that answers `Pr[x >= v]` and the quantile query.
pub trait Marginal<S: Scalar>: Send + Sync {
    /// `Pr[x >= v]`.
    fn tail(&self, v: &S) -> S;

    /// Largest `z` with `Pr[x >= z] >= q`; `q` must lie in `[0, 1]`.
    fn quantile(&self, q: &S) -> Answer<S>;

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> S;

    fn mean(&self) -> S;

    /// Point mass at exactly `v`.
    fn mass_at(&self, v: &S) -> S;

    /// Points where the tail function changes shape; dominance and
    /// price search scan these.
    fn breakpoints(&self) -> Vec<S>;

    fn as_discrete(&self) -> Option<&DiscretePmf<S>>;
}

/// A float distribution of any supported shape.
#[derive(Clone, Debug, PartialEq)]
pub enum Distribution {
    Discrete(DiscretePmf<f64>),
    Piecewise(PiecewiseCdf),
    Regular(NamedRegular),
}

impl Distribution {
    pub fn discrete(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        Ok(Distribution::Discrete(DiscretePmf::new(values, probs)?))
    }
}

impl From<DiscretePmf<f64>> for Distribution {
    fn from(d: DiscretePmf<f64>) -> Self {
        Distribution::Discrete(d)
    }
}

impl Marginal<f64> for Distribution {
    fn tail(&self, v: &f64) -> f64 {
        match self {
            Distribution::Discrete(d) => d.tail(v),
            Distribution::Piecewise(d) => d.tail(v),
            Distribution::Regular(d) => d.tail(v),
        }
    }
    fn quantile(&self, q: &f64) -> Answer<f64> {
        match self {
            Distribution::Discrete(d) => d.quantile(q),
            Distribution::Piecewise(d) => d.quantile(q),
            Distribution::Regular(d) => d.quantile(q),
        }
    }
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Distribution::Discrete(d) => d.sample(rng),
            Distribution::Piecewise(d) => d.sample(rng),
            Distribution::Regular(d) => d.sample(rng),
        }
    }
    fn mean(&self) -> f64 {
        match self {
            Distribution::Discrete(d) => d.mean(),
            Distribution::Piecewise(d) => d.mean(),
            Distribution::Regular(d) => d.mean(),
        }
    }
    fn mass_at(&self, v: &f64) -> f64 {
        match self {
            Distribution::Discrete(d) => d.mass_at(v),
            Distribution::Piecewise(d) => d.mass_at(v),
            Distribution::Regular(d) => d.mass_at(v),
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Distribution::Discrete(d) => d.breakpoints(),
            Distribution::Piecewise(d) => d.breakpoints(),
            Distribution::Regular(d) => d.breakpoints(),
        }
    }
    fn as_discrete(&self) -> Option<&DiscretePmf<f64>> {
        match self {
            Distribution::Discrete(d) => Some(d),
            _ => None,
        }
    }
}

/// Inverse-transform sample through the quantile function.
pub(crate) fn sample_by_quantile<M: Marginal<f64> + ?Sized, R: Rng + ?Sized>(
    d: &M,
    rng: &mut R,
) -> f64 {
    // u in (0, 1]: Pr[v(u) >= z] = Pr[u <= tail(z)] = tail(z).
    let u = 1.0 - rng.gen::<f64>();
    match d.quantile(&u) {
        Answer::Finite(v) => v,
        Answer::PosInf => f64::INFINITY,
    }
}
