//! Benchmarks, revenue evaluation, reports and the experiment runner.

mod benchmark;
mod generators;
mod lp;
mod report;
mod revenue;
mod suite;

pub use benchmark::{benchmark_for, benchmark_posted, threshold, Benchmark, BenchmarkName};
pub use generators::{random_discrete_instance, random_discrete_pmf};
pub use lp::{opt_single_buyer_lp, simplex_max, LpSolution, SingleBuyerLp};
pub use report::{
    evaluate_discrete, evaluate_mc, write_csv, BenchmarkEcho, EvalMode, MechanismReport, RevMethod, RevenueEstimate,
    SpecEcho, CSV_COLUMNS,
};
pub use revenue::{exact_revenue, mc_revenue, McEstimate};
pub use suite::{run_suite, Evaluation, ExperimentConfig, InstanceSource, MechanismEntry};
