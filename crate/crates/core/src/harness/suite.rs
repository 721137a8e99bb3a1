use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generators::random_discrete_instance;
use super::report::{evaluate_discrete, evaluate_mc, write_csv, EvalMode, MechanismReport};
use crate::dist_core::io::{InstanceFile, NumLit};
use crate::dist_core::{AuctionInstance, DiscretePmf, Distribution, NamedRegular, ValuationClass};
use crate::error::{Error, Result};
use crate::myerson::ENUMERATION_CAP;
use crate::query_mechs::{MechanismKind, MechanismSpec, TailFunction};
use crate::scalar::Rational;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum InstanceSource {
    File { id: String, path: PathBuf },
    /// `count` random discrete instances with integer values in `[1, h]`.
    RandomDiscrete { id: String, count: usize, class: ValuationClass, n: usize, m: usize, max_support: usize, h: u64 },
    /// One player, one item, a named regular marginal.
    Regular { id: String, dist: NamedRegular },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MechanismEntry {
    pub kind: MechanismKind,
    pub eps: Vec<NumLit>,
    #[serde(default)]
    pub h: Option<NumLit>,
    #[serde(default)]
    pub tail: Option<TailFunction>,
    #[serde(default)]
    pub samples: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Evaluation {
    #[serde(default = "default_cap")]
    pub enumerate_cap: u128,
    #[serde(default = "default_trials")]
    pub mc_trials: u64,
    /// Evaluate discrete instances with exact rational arithmetic.
    #[serde(default = "yes")]
    pub exact: bool,
}

fn default_cap() -> u128 {
    ENUMERATION_CAP
}
fn default_trials() -> u64 {
    100_000
}
fn yes() -> bool {
    true
}

impl Default for Evaluation {
    fn default() -> Self {
        Evaluation { enumerate_cap: default_cap(), mc_trials: default_trials(), exact: true }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub instances: Vec<InstanceSource>,
    pub mechanisms: Vec<MechanismEntry>,
    #[serde(default)]
    pub evaluation: Evaluation,
    pub seed: u64,
    /// Written as `<output>.csv` and `<output>.json` when set.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

enum Loaded {
    Exact(AuctionInstance<DiscretePmf<Rational>>),
    Float(AuctionInstance<Distribution>),
}

fn load(source: &InstanceSource, seed: u64) -> Result<Vec<(String, Loaded)>> {
    Ok(match source {
        InstanceSource::File { id, path } => {
            let f = InstanceFile::read(path)?;
            let inst = if f.is_discrete() { Loaded::Exact(f.to_discrete()?) } else { Loaded::Float(f.to_float()?) };
            vec![(id.clone(), inst)]
        }
        InstanceSource::RandomDiscrete { id, count, class, n, m, max_support, h } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..*count)
                .map(|k| {
                    let inst = random_discrete_instance(&mut rng, *class, *n, *m, *max_support, *h)?;
                    Ok((format!("{id}-{k}"), Loaded::Exact(inst)))
                })
                .collect::<Result<_>>()?
        }
        InstanceSource::Regular { id, dist } => {
            let d = Distribution::Regular(dist.clone().validate()?);
            vec![(id.clone(), Loaded::Float(AuctionInstance::new(ValuationClass::SingleItem, vec![vec![d]])?))]
        }
    })
}

/// Seed for cell `index`, derived from the master seed.
fn cell_seed(master: u64, index: usize) -> u64 {
    master ^ (index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Runs every (instance, mechanism, eps) cell in parallel and returns the
/// reports in cell order. Cells whose mechanism does not fit the instance
/// are skipped.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<Vec<MechanismReport>> {
    let mut instances = Vec::new();
    for (k, src) in cfg.instances.iter().enumerate() {
        instances.extend(load(src, cell_seed(cfg.seed, usize::MAX - k))?);
    }
    let mut cells = Vec::new();
    for (id, inst) in &instances {
        for mech in &cfg.mechanisms {
            for eps in &mech.eps {
                cells.push((id, inst, mech, eps));
            }
        }
    }
    let results: Vec<Result<Option<MechanismReport>>> = cells
        .par_iter()
        .enumerate()
        .map(|(index, (id, inst, mech, eps))| {
            let seed = cell_seed(cfg.seed, index);
            let run = || -> Result<MechanismReport> {
                let mut spec = MechanismSpec::new(mech.kind, eps.to_rational()?).with_mix_seed(seed);
                if let Some(h) = &mech.h {
                    spec = spec.with_h(h.to_rational()?);
                }
                if let Some(t) = &mech.tail {
                    spec = spec.with_tail(t.clone());
                }
                if let Some(t) = mech.samples {
                    spec = spec.with_samples(t);
                }
                let ev = &cfg.evaluation;
                match inst {
                    Loaded::Exact(d) if ev.exact => {
                        let mode = EvalMode::Enumerate { cap: ev.enumerate_cap, fallback_trials: ev.mc_trials };
                        evaluate_discrete(id, &spec, d, mode, seed)
                    }
                    Loaded::Exact(d) => {
                        let f = d.map(|x| x.to_f64());
                        let mode = EvalMode::Enumerate { cap: ev.enumerate_cap, fallback_trials: ev.mc_trials };
                        evaluate_discrete(id, &spec.to_f64(), &f, mode, seed)
                    }
                    Loaded::Float(f) => evaluate_mc(id, &spec.to_f64(), f, ev.mc_trials, seed),
                }
            };
            match run() {
                Ok(r) => Ok(Some(r)),
                Err(Error::WrongValuationClass { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut reports = Vec::new();
    for r in results {
        if let Some(rep) = r? {
            reports.push(rep);
        }
    }
    if let Some(out) = &cfg.output {
        write_csv(std::fs::File::create(out.with_extension("csv"))?, &reports)?;
        std::fs::write(out.with_extension("json"), serde_json::to_string_pretty(&reports)?)?;
    }
    Ok(reports)
}
