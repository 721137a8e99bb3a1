use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dist_core::{AuctionInstance, DiscretePmf, Marginal, Profile};
use crate::error::Result;
use crate::myerson::Mechanism;
use crate::scalar::Scalar;

/// Expected total payment under the prior, by full enumeration.
pub fn exact_revenue<S: Scalar, M: Mechanism<S> + ?Sized>(
    mech: &M,
    inst: &AuctionInstance<DiscretePmf<S>>,
    cap: u128,
) -> Result<S> {
    let mut total = S::zero();
    inst.for_each_profile(cap, |v, p| {
        total = total.clone() + mech.outcome(v).revenue() * p.clone();
    })?;
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

const CHUNKS: u64 = 64;

/// Monte Carlo revenue over i.i.d. value profiles. Trials are split into a
/// fixed number of chunks, each with its own stream of a ChaCha8 seeded by
/// `seed`, so the result does not depend on the thread count.
pub fn mc_revenue<M, D>(mech: &M, inst: &AuctionInstance<D>, trials: u64, seed: u64) -> McEstimate
where
    M: Mechanism<f64> + ?Sized,
    D: Marginal<f64>,
{
    let trials = trials.max(1);
    let sums: Vec<(f64, f64)> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let count = trials / CHUNKS + u64::from(c < trials % CHUNKS);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let mut s = 0.0;
            let mut s2 = 0.0;
            let mut bids: Profile<f64> = vec![vec![0.0; inst.m]; inst.n];
            for _ in 0..count {
                for (i, row) in inst.prior.iter().enumerate() {
                    for (j, d) in row.iter().enumerate() {
                        bids[i][j] = d.sample(&mut rng);
                    }
                }
                let r = mech.outcome(&bids).revenue();
                s += r;
                s2 += r * r;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let t = trials as f64;
    let mean = s / t;
    let var = if trials > 1 { ((s2 - t * mean * mean) / (t - 1.0)).max(0.0) } else { 0.0 };
    McEstimate { mean, stderr: (var / t).sqrt(), trials }
}
