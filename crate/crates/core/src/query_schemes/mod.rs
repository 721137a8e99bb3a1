//! Turning a fixed set of oracle answers into a discrete prior `D'`, and the
//! coupling between values drawn from `D` and from `D'`.

mod coupling;
mod empirical;
mod grids;

pub use coupling::{resample, resample_kernel, round_down, round_down_kernel, Kernel};
pub use empirical::EmpiricalOracle;
pub use grids::{quantile_grid, uniform_quantile_grid, value_grid};

use serde::Serialize;

use crate::dist_core::{
    Answer, AuctionInstance, DiscretePmf, Marginal, Oracle, QueryCounts, QueryOracle, ValuationClass,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Value,
    Quantile,
    QuantileUniform,
    Empirical,
}

/// Which grid to query and with what parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum GridSpec<S> {
    /// Values `1, (1+delta), ..., (1+delta)^(k-1), h`.
    Value { h: S, delta: S },
    /// Quantiles `1, eps1 (1+delta)^(k-1), ..., eps1`.
    Quantile { eps1: S, delta: S },
    /// Quantiles `1, k eps1, ..., 2 eps1, eps1` with `k = floor(1/eps1)`.
    QuantileUniform { eps1: S },
}

impl<S: Scalar> GridSpec<S> {
    pub fn points(&self) -> Result<Vec<S>> {
        match self {
            GridSpec::Value { h, delta } => value_grid(h, delta),
            GridSpec::Quantile { eps1, delta } => quantile_grid(eps1, delta),
            GridSpec::QuantileUniform { eps1 } => uniform_quantile_grid(eps1),
        }
    }

    pub fn scheme(&self) -> Scheme {
        match self {
            GridSpec::Value { .. } => Scheme::Value,
            GridSpec::Quantile { .. } => Scheme::Quantile,
            GridSpec::QuantileUniform { .. } => Scheme::QuantileUniform,
        }
    }
}

/// One discretized marginal and the queries that produced it.
#[derive(Clone, Debug)]
pub struct Discretization<S> {
    pub dist: DiscretePmf<S>,
    pub points: Vec<S>,
    pub counts: QueryCounts,
}

/// `D'` for every (player, item), plus the total query bill.
#[derive(Clone, Debug)]
pub struct DiscretizedPrior<S> {
    pub scheme: Scheme,
    pub marginals: Vec<Vec<DiscretePmf<S>>>,
    pub counts: QueryCounts,
}

impl<S: Scalar> DiscretizedPrior<S> {
    pub fn instance(&self, class: ValuationClass) -> Result<AuctionInstance<DiscretePmf<S>>> {
        AuctionInstance::new(class, self.marginals.clone())
    }
}

/// Issues every query of the grid up front, then builds `D'`.
pub fn discretize<S: Scalar, O: Oracle<S>>(oracle: &mut O, grid: &GridSpec<S>) -> Result<Discretization<S>> {
    let before = oracle.counts();
    let points = grid.points()?;
    let dist = match grid {
        GridSpec::Value { .. } => from_value_answers(oracle, &points)?,
        _ => from_quantile_answers(oracle, &points)?,
    };
    let mut counts = oracle.counts();
    counts.value -= before.value;
    counts.quantile -= before.quantile;
    Ok(Discretization { dist, points, counts })
}

/// `D'(v_l) = q(v_l) - q(v_{l+1})` with `q(v_{k+1}) = 0`.
fn from_value_answers<S: Scalar, O: Oracle<S>>(oracle: &mut O, values: &[S]) -> Result<DiscretePmf<S>> {
    let tails: Vec<S> = values.iter().map(|v| oracle.value_query(v)).collect();
    if !S::one().approx_le(&tails[0]) {
        return Err(Error::InvalidDistribution(format!(
            "Pr[x >= {}] = {} < 1: prior has mass below the bottom of the value grid",
            values[0], tails[0]
        )));
    }
    let mut probs = Vec::with_capacity(values.len());
    for l in 0..values.len() {
        let next = tails.get(l + 1).cloned().unwrap_or_else(S::zero);
        let upper = if l == 0 { S::one() } else { tails[l].clone() };
        probs.push(upper - next);
    }
    DiscretePmf::new(values.to_vec(), probs)
}

/// `D'(v(q_l)) = q_l - q_{l+1}` with `q_{k+1} = 0`; tied answers merge.
fn from_quantile_answers<S: Scalar, O: Oracle<S>>(oracle: &mut O, quantiles: &[S]) -> Result<DiscretePmf<S>> {
    let mut values = Vec::with_capacity(quantiles.len());
    for q in quantiles {
        match oracle.quantile_query(q)? {
            Answer::Finite(v) => values.push(v),
            Answer::PosInf => {
                return Err(Error::InvalidDistribution(format!("quantile {q} answered +inf")));
            }
        }
    }
    let probs = (0..quantiles.len())
        .map(|l| quantiles[l].clone() - quantiles.get(l + 1).cloned().unwrap_or_else(S::zero))
        .collect();
    DiscretePmf::new(values, probs)
}

/// Runs one fresh counting oracle per marginal.
pub fn discretize_instance<S: Scalar, M: Marginal<S>>(
    inst: &AuctionInstance<M>,
    grid: &GridSpec<S>,
) -> Result<DiscretizedPrior<S>> {
    let mut counts = QueryCounts::default();
    let mut marginals = Vec::with_capacity(inst.n);
    for row in &inst.prior {
        let mut out = Vec::with_capacity(inst.m);
        for d in row {
            let mut oracle = QueryOracle::new(d);
            let disc = discretize(&mut oracle, grid)?;
            counts += disc.counts;
            out.push(disc.dist);
        }
        marginals.push(out);
    }
    Ok(DiscretizedPrior { scheme: grid.scheme(), marginals, counts })
}

/// Same grids, answered from samples instead of the true prior.
pub fn discretize_samples<S: Scalar>(samples: &[Vec<Vec<S>>], grid: &GridSpec<S>) -> Result<DiscretizedPrior<S>> {
    let mut counts = QueryCounts::default();
    let mut marginals = Vec::with_capacity(samples.len());
    for row in samples {
        let mut out = Vec::with_capacity(row.len());
        for s in row {
            let mut oracle = EmpiricalOracle::new(s.clone())?;
            let disc = discretize(&mut oracle, grid)?;
            counts += disc.counts;
            out.push(disc.dist);
        }
        marginals.push(out);
    }
    Ok(DiscretizedPrior { scheme: Scheme::Empirical, marginals, counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist_core::{dominates, NamedRegular};
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn value_scheme_on_uniform_one_to_eight() {
        let d = DiscretePmf::uniform_on((1..=8).map(|v| r(v, 1)).collect()).unwrap();
        let mut o = QueryOracle::new(&d);
        let out = discretize(&mut o, &GridSpec::Value { h: r(8, 1), delta: r(1, 1) }).unwrap();
        assert_eq!(out.dist.values(), &[r(1, 1), r(2, 1), r(4, 1), r(8, 1)]);
        assert_eq!(out.dist.probs(), &[r(1, 8), r(1, 4), r(1, 2), r(1, 8)]);
        assert_eq!(out.counts, QueryCounts { value: 4, quantile: 0 });
        assert!(dominates(&d, &out.dist));
    }

    #[test]
    fn quantile_scheme_on_uniform_unit_interval() {
        let d = NamedRegular::Uniform { low: 0.0, high: 1.0 };
        let mut o = QueryOracle::new(&d);
        let out = discretize(&mut o, &GridSpec::Quantile { eps1: 0.25, delta: 1.0 }).unwrap();
        assert_eq!(out.dist.values(), &[0.0, 0.5, 0.75]);
        assert_eq!(out.dist.probs(), &[0.5, 0.25, 0.25]);
        assert_eq!(out.counts.quantile, 3);
    }

    #[test]
    fn uniform_quantile_scheme_on_uniform_unit_interval() {
        let d = NamedRegular::Uniform { low: 0.0, high: 1.0 };
        let mut o = QueryOracle::new(&d);
        let out = discretize(&mut o, &GridSpec::QuantileUniform { eps1: 0.25 }).unwrap();
        assert_eq!(out.dist.values(), &[0.0, 0.25, 0.5, 0.75]);
        assert_eq!(out.dist.probs(), &[0.25, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn value_scheme_rejects_mass_below_one() {
        let d = DiscretePmf::new(vec![0.5, 2.0], vec![0.5, 0.5]).unwrap();
        let mut o = QueryOracle::new(&d);
        assert!(discretize(&mut o, &GridSpec::Value { h: 4.0, delta: 1.0 }).is_err());
    }
}
