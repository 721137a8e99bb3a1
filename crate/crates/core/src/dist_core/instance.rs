use serde::{Deserialize, Serialize};

use super::{DiscretePmf, Marginal};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValuationClass {
    SingleItem,
    UnitDemand,
    Additive,
}

impl std::fmt::Display for ValuationClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ValuationClass::SingleItem => "single_item",
            ValuationClass::UnitDemand => "unit_demand",
            ValuationClass::Additive => "additive",
        };
        f.write_str(s)
    }
}

/// `bids[i][j]` is player i's value (or bid) for item j.
pub type Profile<S> = Vec<Vec<S>>;

/// n players, m items, independent marginals `prior[i][j]`.
#[derive(Clone, Debug)]
pub struct AuctionInstance<M> {
    pub n: usize,
    pub m: usize,
    pub class: ValuationClass,
    pub prior: Vec<Vec<M>>,
}

impl<M> AuctionInstance<M> {
    pub fn new(class: ValuationClass, prior: Vec<Vec<M>>) -> Result<Self> {
        let n = prior.len();
        if n == 0 {
            return Err(Error::InvalidParameter("instance needs at least one player".into()));
        }
        let m = prior[0].len();
        if m == 0 || prior.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidParameter("prior must be a non-empty n x m grid".into()));
        }
        if class == ValuationClass::SingleItem && m != 1 {
            return Err(Error::InvalidParameter(format!("single_item instance has m = {m}")));
        }
        Ok(AuctionInstance { n, m, class, prior })
    }

    pub fn marginal(&self, i: usize, j: usize) -> &M {
        &self.prior[i][j]
    }

    pub fn map<N>(&self, f: impl Fn(&M) -> N) -> AuctionInstance<N> {
        AuctionInstance {
            n: self.n,
            m: self.m,
            class: self.class,
            prior: self.prior.iter().map(|row| row.iter().map(&f).collect()).collect(),
        }
    }

    pub fn require_class(&self, expected: &[ValuationClass]) -> Result<()> {
        if expected.contains(&self.class) {
            Ok(())
        } else {
            Err(Error::WrongValuationClass {
                expected: expected.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("|"),
                got: self.class.to_string(),
            })
        }
    }
}

impl<M> AuctionInstance<M> {
    /// Discrete copy; fails if any marginal is continuous.
    pub fn discrete<S: Scalar>(&self) -> Result<AuctionInstance<DiscretePmf<S>>>
    where
        M: Marginal<S>,
    {
        let mut prior = Vec::with_capacity(self.n);
        for row in &self.prior {
            let mut r = Vec::with_capacity(self.m);
            for d in row {
                r.push(d.as_discrete().ok_or(Error::NotDiscrete)?.clone());
            }
            prior.push(r);
        }
        AuctionInstance::new(self.class, prior)
    }
}

impl<S: Scalar> AuctionInstance<DiscretePmf<S>> {
    /// Number of value profiles, saturating.
    pub fn profile_count(&self) -> u128 {
        self.prior
            .iter()
            .flatten()
            .fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128))
    }

    /// Calls `f(profile, probability)` for every value profile.
    pub fn for_each_profile(&self, cap: u128, mut f: impl FnMut(&Profile<S>, &S)) -> Result<()> {
        let total = self.profile_count();
        if total > cap {
            return Err(Error::TooLarge { profiles: total, cap });
        }
        let cells: Vec<&DiscretePmf<S>> = self.prior.iter().flatten().collect();
        let mut idx = vec![0usize; cells.len()];
        let mut profile: Profile<S> = self
            .prior
            .iter()
            .map(|row| row.iter().map(|d| d.values()[0].clone()).collect())
            .collect();
        loop {
            let mut p = S::one();
            for (c, &k) in cells.iter().zip(&idx) {
                p = p * c.probs()[k].clone();
            }
            f(&profile, &p);
            // Odometer step over the flattened cells.
            let mut pos = cells.len();
            loop {
                if pos == 0 {
                    return Ok(());
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < cells[pos].len() {
                    break;
                }
                idx[pos] = 0;
                profile[pos / self.m][pos % self.m] = cells[pos].values()[0].clone();
            }
            profile[pos / self.m][pos % self.m] = cells[pos].values()[idx[pos]].clone();
        }
    }
}
