use serde::Serialize;

use super::lp::opt_single_buyer_lp;
use super::revenue::exact_revenue;
use crate::dist_core::{AuctionInstance, DiscretePmf, Distribution, ValuationClass};
use crate::error::{Error, Result};
use crate::myerson::{optimal_posted_price, optimal_revenue_single_item, ENUMERATION_CAP};
use crate::query_mechs::{MechanismKind, MechanismSpec};
use crate::scalar::Scalar;
use crate::simple_mechs::{build_copies, opt_copies, Bvcg, SeparateMyerson};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkName {
    /// Myerson's optimal revenue.
    Opt,
    /// Optimal revenue of the COPIES instance.
    OptCopies,
    /// Exact single-buyer optimum from the LP.
    Lp,
    /// `2 Rev(BVCG) + 6 Rev(IM)`, an upper bound on OPT.
    UpperBound,
    /// Best take-it-or-leave-it price, for one player and one item.
    PostedPrice,
}

impl BenchmarkName {
    pub fn as_str(&self) -> &'static str {
        match self {
            BenchmarkName::Opt => "opt",
            BenchmarkName::OptCopies => "opt_copies",
            BenchmarkName::Lp => "lp",
            BenchmarkName::UpperBound => "upper_bound",
            BenchmarkName::PostedPrice => "posted_price",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Benchmark<S> {
    pub name: BenchmarkName,
    pub value: S,
    /// Set when the benchmark only bounds OPT from above.
    pub annotation: Option<String>,
}

/// The class-appropriate benchmark on a discrete instance.
pub fn benchmark_for<S: Scalar>(inst: &AuctionInstance<DiscretePmf<S>>) -> Result<Benchmark<S>> {
    let m_one = inst.m == 1;
    match inst.class {
        _ if m_one && inst.class != ValuationClass::UnitDemand => Ok(Benchmark {
            name: BenchmarkName::Opt,
            value: optimal_revenue_single_item(inst)?,
            annotation: None,
        }),
        ValuationClass::SingleItem => unreachable!("single-item instances have one item"),
        ValuationClass::UnitDemand => Ok(Benchmark {
            name: BenchmarkName::OptCopies,
            value: opt_copies(&build_copies(inst)?)?,
            annotation: None,
        }),
        ValuationClass::Additive if inst.n == 1 => {
            let lp = opt_single_buyer_lp(inst)?;
            Ok(Benchmark { name: BenchmarkName::Lp, value: lp.revenue, annotation: None })
        }
        ValuationClass::Additive => {
            let bvcg = exact_revenue(&Bvcg { fee_priors: inst.prior.clone() }, inst, ENUMERATION_CAP)?;
            let im = exact_revenue(&SeparateMyerson::new(&inst.prior), inst, ENUMERATION_CAP)?;
            Ok(Benchmark {
                name: BenchmarkName::UpperBound,
                value: S::int(2) * bvcg + S::int(6) * im,
                annotation: Some("benchmark: upper-bound-only".into()),
            })
        }
    }
}

/// Benchmark for a single player and item with any marginal.
pub fn benchmark_posted(inst: &AuctionInstance<Distribution>) -> Result<Benchmark<f64>> {
    if inst.n != 1 || inst.m != 1 {
        return Err(Error::InvalidParameter(
            "continuous priors have a benchmark only for one player and one item".into(),
        ));
    }
    let (_, value) = optimal_posted_price(&inst.prior[0][0], &0.0);
    Ok(Benchmark { name: BenchmarkName::PostedPrice, value, annotation: None })
}

/// Guaranteed fraction of the benchmark, when the mechanism has one.
/// Unit-demand mechanisms are held to `1/(6(1+eps))` of `opt_copies`,
/// additive mixtures to `1/(8(1+eps))`.
pub fn threshold<S: Scalar>(spec: &MechanismSpec<S>, class: ValuationClass) -> Option<S> {
    use MechanismKind::*;
    let base = S::one() + spec.eps.clone();
    let factor = match (spec.kind, class) {
        (Evm | Eqm | Emr, _) => 1,
        (Sm, ValuationClass::SingleItem) => 1,
        (Evud | Equd | Sm, ValuationClass::UnitDemand) => 6,
        (Eva | Eqa | Sm, ValuationClass::Additive) => 8,
        _ => return None,
    };
    Some(S::one() / (S::int(factor) * base))
}
