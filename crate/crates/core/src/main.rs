use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qauction::adversary::{
    answers_equal_outside, embed_multi_item, gen_regular_pair, query_budget_constant, pick_against, smallest_admissible_h,
    HardFamilyIrregular,
};
use qauction::dist_core::io::InstanceFile;
use qauction::dist_core::{revenue_curve_regularity, AuctionInstance, DiscretePmf, Marginal, ValuationClass};
use qauction::harness::{
    benchmark_for, evaluate_discrete, evaluate_mc, exact_revenue, run_suite, write_csv, EvalMode, ExperimentConfig,
};
use qauction::myerson::{optimal_posted_price, optimal_revenue_single_item, Mrs, ENUMERATION_CAP};
use qauction::query_mechs::{MechanismKind, MechanismSpec, TailFunction};
use qauction::query_schemes::{discretize_instance, GridSpec};
use qauction::scalar::parse_rational;
use qauction::simple_mechs::{build_copies, Bvcg, CopiesOrder, PostedPrices, SeparateMyerson, SequentialCopies, UnitDemandPosted};
use qauction::{Error, Rational, Result, Scalar};

#[derive(Parser)]
#[command(name = "qauction", about = "Query-based Bayesian auctions: discretize, run, evaluate, lower bounds")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Value,
    Quantile,
    Uniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalMech {
    Mrs,
    Ud,
    Im,
    Bvcg,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Grouped,
    GreedyAdversary,
}

#[derive(Clone, Copy, ValueEnum)]
enum LowerKind {
    Irregular,
    Regular,
    Embed,
}

#[derive(Subcommand)]
enum Cmd {
    /// Discretize every marginal of an instance and print the resulting prior.
    Discretize {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        #[arg(long = "H")]
        h: Option<String>,
        #[arg(long)]
        delta: Option<String>,
        #[arg(long)]
        eps1: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a query mechanism on an instance and report revenue against the benchmark.
    Run {
        #[arg(long)]
        mech: MechanismKind,
        #[arg(long)]
        eps: String,
        #[arg(long = "H")]
        h: Option<String>,
        /// `bounded`, `linear:<scale>` or `file:<path>` holding a tail function as JSON.
        #[arg(long, default_value = "bounded")]
        tail: String,
        #[arg(long)]
        instance: PathBuf,
        /// `enumerate` or `mc:<trials>`.
        #[arg(long, default_value = "enumerate")]
        bids: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample budget for SM.
        #[arg(long)]
        samples: Option<usize>,
        /// Use float arithmetic even for discrete instances.
        #[arg(long)]
        float: bool,
    },
    /// Exact revenue of a simple mechanism tuned to the instance's own prior.
    Eval {
        #[arg(long, value_enum)]
        mech: EvalMech,
        #[arg(long, value_enum, default_value = "grouped")]
        order: OrderArg,
        #[arg(long)]
        instance: PathBuf,
    },
    /// Generate and verify a lower-bound construction.
    Lowerbound {
        #[arg(long, value_enum)]
        kind: LowerKind,
        #[arg(long, default_value = "2")]
        c: String,
        /// Defaults to the smallest admissible value.
        #[arg(long = "H")]
        h: Option<String>,
        #[arg(long, default_value = "0.0078125")]
        eps: f64,
        #[arg(long = "R", default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 1)]
        t: usize,
        /// Run the value-query mechanism with this eps against the family.
        #[arg(long)]
        pick_eps: Option<String>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Member index z of the irregular family to embed.
        #[arg(long, default_value_t = 1)]
        z: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment config; exits nonzero if any checked cell fails.
    Suite {
        #[arg(long)]
        config: PathBuf,
    },
}

fn num(text: &str) -> Result<Rational> {
    parse_rational(text).ok_or_else(|| Error::InvalidParameter(format!("cannot parse number '{text}'")))
}

fn opt_num(text: &Option<String>) -> Result<Option<Rational>> {
    text.as_deref().map(num).transpose()
}

fn emit(value: &Value, out: &Option<PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn grid<S: Scalar>(scheme: SchemeArg, h: Option<S>, delta: Option<S>, eps1: Option<S>) -> Result<GridSpec<S>> {
    let need = |x: Option<S>, name: &str| x.ok_or_else(|| Error::InvalidParameter(format!("--{name} is required")));
    Ok(match scheme {
        SchemeArg::Value => GridSpec::Value { h: need(h, "H")?, delta: need(delta, "delta")? },
        SchemeArg::Quantile => GridSpec::Quantile { eps1: need(eps1, "eps1")?, delta: need(delta, "delta")? },
        SchemeArg::Uniform => GridSpec::QuantileUniform { eps1: need(eps1, "eps1")? },
    })
}

fn discretize_cmd(
    instance: &PathBuf,
    scheme: SchemeArg,
    h: &Option<String>,
    delta: &Option<String>,
    eps1: &Option<String>,
    out: &Option<PathBuf>,
) -> Result<()> {
    let file = InstanceFile::read(instance)?;
    let (h, delta, eps1) = (opt_num(h)?, opt_num(delta)?, opt_num(eps1)?);
    let (prior, counts, class) = if file.is_discrete() {
        let inst = file.to_discrete::<Rational>()?;
        let d = discretize_instance(&inst, &grid(scheme, h, delta, eps1)?)?;
        (InstanceFile::from_discrete(&d.instance(inst.class)?), d.counts, inst.class)
    } else {
        let inst = file.to_float()?;
        let f = |x: Option<Rational>| x.map(|r| r.to_f64_lossy());
        let d = discretize_instance(&inst, &grid(scheme, f(h), f(delta), f(eps1))?)?;
        (InstanceFile::from_discrete(&d.instance(inst.class)?), d.counts, inst.class)
    };
    emit(&json!({ "valuation_class": class, "query_counts": counts, "discretized": prior }), out)
}

fn tail_arg(text: &str) -> Result<Option<TailFunction>> {
    if text == "bounded" {
        return Ok(None);
    }
    if let Some(scale) = text.strip_prefix("linear:") {
        let scale = scale.parse().map_err(|_| Error::InvalidParameter(format!("bad scale in '{text}'")))?;
        return Ok(Some(TailFunction::Linear { scale }));
    }
    if let Some(path) = text.strip_prefix("file:") {
        return Ok(Some(serde_json::from_str(&std::fs::read_to_string(path)?)?));
    }
    Err(Error::InvalidParameter(format!("unknown tail '{text}'")))
}

#[allow(clippy::too_many_arguments)]
fn run_cmd(
    mech: MechanismKind,
    eps: &str,
    h: &Option<String>,
    tail: &str,
    instance: &PathBuf,
    bids: &str,
    seed: u64,
    samples: Option<usize>,
    float: bool,
) -> Result<()> {
    let mut spec = MechanismSpec::new(mech, num(eps)?).with_mix_seed(seed);
    if let Some(h) = opt_num(h)? {
        spec = spec.with_h(h);
    }
    if let Some(t) = tail_arg(tail)? {
        spec = spec.with_tail(t);
    }
    if let Some(t) = samples {
        spec = spec.with_samples(t);
    }
    let mode = match bids {
        "enumerate" => EvalMode::Enumerate { cap: ENUMERATION_CAP, fallback_trials: 1_000_000 },
        other => {
            let trials = other
                .strip_prefix("mc:")
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::InvalidParameter(format!("--bids must be enumerate or mc:<trials>, got '{other}'")))?;
            EvalMode::Mc { trials }
        }
    };
    let file = InstanceFile::read(instance)?;
    let id = instance.display().to_string();
    let report = match (file.is_discrete(), mode) {
        (true, _) if !float => evaluate_discrete(&id, &spec, &file.to_discrete::<Rational>()?, mode, seed)?,
        (true, _) => evaluate_discrete(&id, &spec.to_f64(), &file.to_discrete::<f64>()?, mode, seed)?,
        (false, EvalMode::Mc { trials }) => evaluate_mc(&id, &spec.to_f64(), &file.to_float()?, trials, seed)?,
        (false, _) => {
            return Err(Error::InvalidParameter("continuous instances need --bids mc:<trials>".into()));
        }
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn eval_cmd(mech: EvalMech, order: OrderArg, instance: &PathBuf) -> Result<()> {
    let inst = InstanceFile::read(instance)?.to_discrete::<Rational>()?;
    let prior = &inst.prior;
    let rev = match mech {
        EvalMech::Mrs => {
            inst.require_class(&[ValuationClass::SingleItem])?;
            exact_revenue(&Mrs::new(&prior.iter().map(|r| r[0].clone()).collect::<Vec<_>>()), &inst, ENUMERATION_CAP)?
        }
        EvalMech::Im => exact_revenue(&SeparateMyerson::new(prior), &inst, ENUMERATION_CAP)?,
        EvalMech::Bvcg => exact_revenue(&Bvcg { fee_priors: prior.clone() }, &inst, ENUMERATION_CAP)?,
        EvalMech::Ud => {
            let prices = PostedPrices::from_copies(&build_copies(&inst)?)?;
            let order = match order {
                OrderArg::Grouped => CopiesOrder::Grouped,
                OrderArg::GreedyAdversary => CopiesOrder::GreedyAdversary,
            };
            let menu = exact_revenue(&UnitDemandPosted { prices: prices.clone() }, &inst, ENUMERATION_CAP)?;
            let copies = exact_revenue(&SequentialCopies { prices, order }, &inst, ENUMERATION_CAP)?;
            let bench = benchmark_for(&inst)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "mech": "ud",
                    "revenue": copies.to_json(),
                    "menu_revenue": menu.to_json(),
                    "benchmark": { "name": bench.name, "value": bench.value.to_json() },
                }))?
            );
            return Ok(());
        }
    };
    let bench = benchmark_for(&inst)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "revenue": rev.to_json(),
            "benchmark": { "name": bench.name, "value": bench.value.to_json(), "annotation": bench.annotation },
        }))?
    );
    Ok(())
}

fn pmf_json<S: Scalar>(d: &DiscretePmf<S>) -> Value {
    json!({
        "support": d.values().iter().map(Scalar::to_json).collect::<Vec<_>>(),
        "probs": d.probs().iter().map(Scalar::to_json).collect::<Vec<_>>(),
    })
}

fn irregular_report(c: Rational, h: Rational, pick_eps: Option<Rational>) -> Result<Value> {
    let fam = HardFamilyIrregular::new(c.clone(), h.clone(), None)?;
    let mut members = Vec::new();
    for z in 1..=fam.z_count() {
        let inst = AuctionInstance::new(ValuationClass::SingleItem, vec![vec![fam.member(z).clone()]])?;
        let enumerated = optimal_revenue_single_item(&inst)?;
        let closed = fam.opt_closed_form(z);
        members.push(json!({
            "z": z,
            "distribution": pmf_json(fam.member(z)),
            "opt_closed_form": closed.to_json(),
            "opt_enumerated": enumerated.to_json(),
            "match": enumerated == closed,
        }));
    }
    let (v, q) = fam.legal_grid(1000);
    let agree = answers_equal_outside(&fam, &v, &q)?;
    let mut report = json!({
        "c": c.to_json(),
        "H": h.to_json(),
        "k": fam.k,
        "s": fam.s,
        "t": fam.t,
        "delta": fam.delta.to_json(),
        "u": fam.u.iter().map(Scalar::to_json).collect::<Vec<_>>(),
        "q": fam.q.iter().map(Scalar::to_json).collect::<Vec<_>>(),
        "query_constant": query_budget_constant(c.to_f64_lossy()),
        "members": members,
        "agreement": { "queries": v.len() + q.len(), "equal": agree.equal, "flagged": agree.flagged.len() },
    });
    if let Some(eps) = pick_eps {
        let spec = MechanismSpec::new(MechanismKind::Evm, eps).with_h(h.clone());
        let pick = pick_against(&spec, c, h)?;
        report["pick"] = json!({
            "s": pick.s,
            "t": pick.t,
            "budget_sufficient": pick.budget_sufficient,
            "z": pick.z,
            "revenue": pick.rev.to_json(),
            "opt": pick.opt.to_json(),
            "ratio": pick.ratio.to_json(),
        });
    }
    Ok(report)
}

fn regular_report(eps: f64, r: f64, t: usize) -> Result<Value> {
    let p = gen_regular_pair(eps, r, t)?;
    let (_, o1) = optimal_posted_price(&p.f1, &0.0);
    let (_, o2) = optimal_posted_price(&p.f2, &0.0);
    Ok(json!({
        "pair": p,
        "opt1": p.opt1(),
        "opt1_numeric": o1,
        "opt2": p.opt2(),
        "opt2_numeric": o2,
        "regular1": revenue_curve_regularity(&p.f1, 1000)?,
        "regular2": revenue_curve_regularity(&p.f2, 1000)?,
        "f2_at_v_star": p.f2.tail(&p.v_star),
        "max_disagreement_outside": p.max_disagreement_outside(1000),
    }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Discretize { instance, scheme, h, delta, eps1, out } => discretize_cmd(instance, *scheme, h, delta, eps1, out),
        Cmd::Run { mech, eps, h, tail, instance, bids, seed, samples, float } => {
            run_cmd(*mech, eps, h, tail, instance, bids, *seed, *samples, *float)
        }
        Cmd::Eval { mech, order, instance } => eval_cmd(*mech, *order, instance),
        Cmd::Lowerbound { kind, c, h, eps, r, t, pick_eps, n, m, z, out } => (|| {
            let c = num(c)?;
            let h = match opt_num(h)? {
                Some(h) => h,
                None => smallest_admissible_h(&c),
            };
            let value = match kind {
                LowerKind::Irregular => irregular_report(c, h, opt_num(pick_eps)?)?,
                LowerKind::Regular => regular_report(*eps, *r, *t)?,
                LowerKind::Embed => {
                    let fam = HardFamilyIrregular::new(c, h, None)?;
                    if *z == 0 || *z > fam.z_count() {
                        return Err(Error::InvalidParameter(format!("z must lie in 1..={}", fam.z_count())));
                    }
                    let inst = embed_multi_item(ValuationClass::Additive, *n, *m, 0, 0, Some(fam.member(*z)))?;
                    serde_json::to_value(InstanceFile::from_discrete(&inst))?
                }
            };
            emit(&value, out)
        })(),
        Cmd::Suite { config } => (|| {
            let cfg = ExperimentConfig::read(config)?;
            let reports = run_suite(&cfg)?;
            write_csv(std::io::stdout(), &reports)?;
            Ok(reports.iter().any(|r| r.pass == Some(false)))
        })()
        .map(|failed| {
            if failed {
                std::process::exit(1);
            }
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
