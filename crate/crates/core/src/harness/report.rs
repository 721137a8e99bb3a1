use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use super::benchmark::{benchmark_for, benchmark_posted, threshold, BenchmarkName};
use super::revenue::{mc_revenue, McEstimate};
use crate::dist_core::{AuctionInstance, DiscretePmf, Distribution, Marginal, QueryCounts};
use crate::error::Result;
use crate::query_mechs::{
    draw_samples, exact_mechanism_revenue, learn_prior, query_phase_on, run_sample_phase, MechanismKind,
    MechanismSpec, QueryMechanism, TailFunction,
};
use crate::scalar::Scalar;

#[derive(Clone, Debug, Serialize)]
pub struct SpecEcho {
    pub kind: MechanismKind,
    pub eps: String,
    pub h: Option<String>,
    pub tail: Option<TailFunction>,
    pub sample_budget: Option<usize>,
    pub mix_seed: u64,
}

impl<S: Scalar> From<&MechanismSpec<S>> for SpecEcho {
    fn from(s: &MechanismSpec<S>) -> Self {
        SpecEcho {
            kind: s.kind,
            eps: s.eps.to_string(),
            h: s.h.as_ref().map(|h| h.to_string()),
            tail: s.tail.clone(),
            sample_budget: s.sample_budget,
            mix_seed: s.mix_seed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RevMethod {
    Exact,
    Mc,
}

#[derive(Clone, Debug, Serialize)]
pub struct RevenueEstimate {
    pub method: RevMethod,
    pub value: f64,
    /// The exact value as printed by the backend, for exact runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchmarkEcho {
    pub name: BenchmarkName,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annotation: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MechanismReport {
    pub instance_id: String,
    pub spec: SpecEcho,
    pub query_counts: QueryCounts,
    pub revenue: RevenueEstimate,
    pub benchmark: Option<BenchmarkEcho>,
    pub ratio: Option<f64>,
    pub threshold: Option<f64>,
    pub pass: Option<bool>,
    pub seed: u64,
    pub runtime_ms: f64,
}

/// How bids are evaluated: full enumeration up to `cap` profiles (beyond it
/// the run falls back to `trials` Monte Carlo draws), or Monte Carlo only.
#[derive(Clone, Copy, Debug)]
pub enum EvalMode {
    Enumerate { cap: u128, fallback_trials: u64 },
    Mc { trials: u64 },
}

fn mc_pass(rev: &McEstimate, bench: f64, thr: f64) -> bool {
    rev.mean >= thr * bench - 3.0 * rev.stderr
}

/// Exact evaluation on a discrete instance under backend `S`.
pub fn evaluate_discrete<S: Scalar>(
    instance_id: &str,
    spec: &MechanismSpec<S>,
    inst: &AuctionInstance<DiscretePmf<S>>,
    mode: EvalMode,
    seed: u64,
) -> Result<MechanismReport> {
    let trials = match mode {
        EvalMode::Enumerate { cap, .. } if inst.profile_count() <= cap => None,
        EvalMode::Enumerate { fallback_trials, .. } => Some(fallback_trials),
        EvalMode::Mc { trials } => Some(trials),
    };
    if let Some(trials) = trials {
        let f = inst.map(|d| Distribution::Discrete(d.to_f64()));
        let mut rep = evaluate_mc(instance_id, &spec.to_f64(), &f, trials, seed)?;
        rep.spec = spec.into();
        return Ok(rep);
    }
    let start = Instant::now();
    let prior = learn_prior(spec, inst)?;
    let counts = prior.counts;
    let qm = QueryMechanism::build(spec, inst.class, prior)?;
    let rev = exact_mechanism_revenue(&qm, inst, u128::MAX)?;
    let bench = benchmark_for(inst)?;
    let thr = threshold(spec, inst.class);
    let ratio = if bench.value.is_zero() { S::one() } else { rev.clone() / bench.value.clone() };
    let pass = thr.as_ref().map(|t| rev >= t.clone() * bench.value.clone());
    Ok(MechanismReport {
        instance_id: instance_id.to_string(),
        spec: spec.into(),
        query_counts: counts,
        revenue: RevenueEstimate {
            method: RevMethod::Exact,
            value: rev.to_f64_lossy(),
            exact: Some(rev.to_string()),
            stderr: None,
            trials: None,
        },
        benchmark: Some(BenchmarkEcho {
            name: bench.name,
            value: bench.value.to_f64_lossy(),
            annotation: bench.annotation,
        }),
        ratio: Some(ratio.to_f64_lossy()),
        threshold: thr.map(|t| t.to_f64_lossy()),
        pass,
        seed,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Monte Carlo evaluation on any float instance. Mixture branches are
/// estimated separately and combined with their weights.
pub fn evaluate_mc(
    instance_id: &str,
    spec: &MechanismSpec<f64>,
    inst: &AuctionInstance<Distribution>,
    trials: u64,
    seed: u64,
) -> Result<MechanismReport> {
    let start = Instant::now();
    let prior = if spec.kind == MechanismKind::Sm {
        let samples = draw_samples(inst, spec.sample_budget.unwrap_or(0), spec.mix_seed);
        run_sample_phase(spec, inst.class, &samples)?
    } else {
        query_phase_on(spec, inst)?
    };
    let counts = prior.counts;
    let qm = QueryMechanism::build(spec, inst.class, prior)?;
    let mut mean = 0.0;
    let mut var = 0.0;
    for (b, (w, mech)) in qm.branches().iter().enumerate() {
        let est = mc_revenue(mech.as_ref(), inst, trials, seed.wrapping_add(b as u64));
        mean += w * est.mean;
        var += w * w * est.stderr * est.stderr;
    }
    let rev = McEstimate { mean, stderr: var.sqrt(), trials };
    let bench = if inst.prior.iter().flatten().all(|d| d.as_discrete().is_some()) {
        let disc = inst.discrete::<f64>()?;
        if disc.profile_count() <= crate::myerson::ENUMERATION_CAP {
            Some(benchmark_for(&disc)?)
        } else {
            None
        }
    } else if inst.n == 1 && inst.m == 1 {
        Some(benchmark_posted(inst)?)
    } else {
        None
    };
    let thr = threshold(spec, inst.class);
    let ratio = bench.as_ref().map(|b| if b.value == 0.0 { 1.0 } else { rev.mean / b.value });
    let pass = match (&bench, thr) {
        (Some(b), Some(t)) => Some(mc_pass(&rev, b.value, t)),
        _ => None,
    };
    Ok(MechanismReport {
        instance_id: instance_id.to_string(),
        spec: spec.into(),
        query_counts: counts,
        revenue: RevenueEstimate {
            method: RevMethod::Mc,
            value: rev.mean,
            exact: None,
            stderr: Some(rev.stderr),
            trials: Some(trials),
        },
        benchmark: bench.map(|b| BenchmarkEcho { name: b.name, value: b.value, annotation: b.annotation }),
        ratio,
        threshold: thr,
        pass,
        seed,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// One CSV row; the column set is fixed.
#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    instance_id: &'a str,
    mech: &'static str,
    eps: &'a str,
    queries_v: u64,
    queries_q: u64,
    rev: f64,
    rev_method: RevMethod,
    benchmark_name: &'static str,
    benchmark: Option<f64>,
    ratio: Option<f64>,
    threshold: Option<f64>,
    pass: Option<bool>,
    seed: u64,
}

pub const CSV_COLUMNS: [&str; 13] = [
    "instance_id",
    "mech",
    "eps",
    "queries_v",
    "queries_q",
    "rev",
    "rev_method",
    "benchmark_name",
    "benchmark",
    "ratio",
    "threshold",
    "pass",
    "seed",
];

pub fn write_csv<W: Write>(out: W, reports: &[MechanismReport]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in reports {
        w.serialize(CsvRow {
            instance_id: &r.instance_id,
            mech: r.spec.kind.name(),
            eps: &r.spec.eps,
            queries_v: r.query_counts.value,
            queries_q: r.query_counts.quantile,
            rev: r.revenue.value,
            rev_method: r.revenue.method,
            benchmark_name: r.benchmark.as_ref().map_or("none", |b| b.name.as_str()),
            benchmark: r.benchmark.as_ref().map(|b| b.value),
            ratio: r.ratio,
            threshold: r.threshold,
            pass: r.pass,
            seed: r.seed,
        })?;
    }
    w.flush()?;
    Ok(())
}
