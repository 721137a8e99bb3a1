use rand::seq::index::sample;
use rand::Rng;

use crate::dist_core::{AuctionInstance, DiscretePmf, ValuationClass};
use crate::error::Result;
use crate::scalar::{Rational, Scalar};

/// Distinct integer values in `[1, h]`, at most `max_support` of them, with
/// random rational masses.
pub fn random_discrete_pmf<R: Rng + ?Sized>(rng: &mut R, max_support: usize, h: u64) -> Result<DiscretePmf<Rational>> {
    let k = rng.gen_range(1..=max_support.min(h as usize).max(1));
    let mut values: Vec<u64> = sample(rng, h as usize, k).into_iter().map(|x| x as u64 + 1).collect();
    values.sort_unstable();
    let weights: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=8)).collect();
    let total: u64 = weights.iter().sum();
    DiscretePmf::new(
        values.into_iter().map(Rational::int).collect(),
        weights.into_iter().map(|w| Rational::from_ratio(w as i64, total as i64)).collect(),
    )
}

pub fn random_discrete_instance<R: Rng + ?Sized>(
    rng: &mut R,
    class: ValuationClass,
    n: usize,
    m: usize,
    max_support: usize,
    h: u64,
) -> Result<AuctionInstance<DiscretePmf<Rational>>> {
    let prior = (0..n)
        .map(|_| (0..m).map(|_| random_discrete_pmf(rng, max_support, h)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    AuctionInstance::new(class, prior)
}
