use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{MechanismKind, MechanismSpec};
use crate::dist_core::{AuctionInstance, Marginal, Oracle, Query, QueryCounts, QueryOracle, ValuationClass};
use crate::error::{Error, Result};
use crate::query_schemes::{discretize, discretize_samples, DiscretizedPrior};
use crate::scalar::Scalar;

/// Discretizes every marginal through its own oracle. The grid depends only
/// on the spec and the instance shape, so all queries are fixed up front.
pub fn run_query_phase<S: Scalar, O: Oracle<S>>(
    spec: &MechanismSpec<S>,
    class: ValuationClass,
    oracles: &mut [Vec<O>],
) -> Result<DiscretizedPrior<S>> {
    if spec.kind == MechanismKind::Sm {
        return Err(Error::InvalidParameter("SM learns from samples; use run_sample_phase".into()));
    }
    let n = oracles.len();
    let m = oracles.first().map_or(0, |r| r.len());
    let derived = spec.derive(class, n, m)?;
    let mut counts = QueryCounts::default();
    let mut marginals = Vec::with_capacity(n);
    for row in oracles.iter_mut() {
        let mut out = Vec::with_capacity(m);
        for oracle in row.iter_mut() {
            let disc = discretize(oracle, &derived.grid)?;
            counts += disc.counts;
            out.push(disc.dist);
        }
        marginals.push(out);
    }
    Ok(DiscretizedPrior { scheme: derived.grid.scheme(), marginals, counts })
}

/// `run_query_phase` with a fresh counting oracle on each marginal.
pub fn query_phase_on<S: Scalar, M: Marginal<S>>(
    spec: &MechanismSpec<S>,
    inst: &AuctionInstance<M>,
) -> Result<DiscretizedPrior<S>> {
    let mut oracles: Vec<Vec<QueryOracle<'_, S, M>>> =
        inst.prior.iter().map(|row| row.iter().map(QueryOracle::new).collect()).collect();
    run_query_phase(spec, inst.class, &mut oracles)
}

/// The sample mechanism's phase: quantile grids answered by the empirical
/// oracle over `samples[i][j]`.
pub fn run_sample_phase<S: Scalar>(
    spec: &MechanismSpec<S>,
    class: ValuationClass,
    samples: &[Vec<Vec<S>>],
) -> Result<DiscretizedPrior<S>> {
    if spec.kind != MechanismKind::Sm {
        return Err(Error::InvalidParameter(format!("{} does not learn from samples", spec.kind)));
    }
    let n = samples.len();
    let m = samples.first().map_or(0, |r| r.len());
    let derived = spec.derive(class, n, m)?;
    discretize_samples(samples, &derived.grid)
}

/// `t` i.i.d. draws per marginal, reproducible from `seed`.
pub fn draw_samples<S: Scalar, M: Marginal<S>>(inst: &AuctionInstance<M>, t: usize, seed: u64) -> Vec<Vec<Vec<S>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    inst.prior
        .iter()
        .map(|row| row.iter().map(|d| (0..t).map(|_| d.sample(&mut rng)).collect()).collect())
        .collect()
}

/// The queries `spec` issues to each marginal of `inst`, in order.
pub fn query_trace<S: Scalar, M: Marginal<S>>(
    spec: &MechanismSpec<S>,
    inst: &AuctionInstance<M>,
) -> Result<Vec<Vec<Vec<Query<S>>>>> {
    let mut oracles: Vec<Vec<QueryOracle<'_, S, M>>> =
        inst.prior.iter().map(|row| row.iter().map(QueryOracle::new).collect()).collect();
    run_query_phase(spec, inst.class, &mut oracles)?;
    Ok(oracles.iter().map(|row| row.iter().map(|o| o.log().to_vec()).collect()).collect())
}
