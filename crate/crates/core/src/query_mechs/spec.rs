use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dist_core::ValuationClass;
use crate::error::{Error, Result};
use crate::query_schemes::GridSpec;
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MechanismKind {
    Evm,
    Evud,
    Evbvcg,
    Evim,
    Eva,
    Eqm,
    Equd,
    Eqbvcg,
    Eqim,
    Eqa,
    Emr,
    Sm,
}

impl MechanismKind {
    pub const ALL: [MechanismKind; 12] = [
        MechanismKind::Evm,
        MechanismKind::Evud,
        MechanismKind::Evbvcg,
        MechanismKind::Evim,
        MechanismKind::Eva,
        MechanismKind::Eqm,
        MechanismKind::Equd,
        MechanismKind::Eqbvcg,
        MechanismKind::Eqim,
        MechanismKind::Eqa,
        MechanismKind::Emr,
        MechanismKind::Sm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MechanismKind::Evm => "EVM",
            MechanismKind::Evud => "EVUD",
            MechanismKind::Evbvcg => "EVBVCG",
            MechanismKind::Evim => "EVIM",
            MechanismKind::Eva => "EVA",
            MechanismKind::Eqm => "EQM",
            MechanismKind::Equd => "EQUD",
            MechanismKind::Eqbvcg => "EQBVCG",
            MechanismKind::Eqim => "EQIM",
            MechanismKind::Eqa => "EQA",
            MechanismKind::Emr => "EMR",
            MechanismKind::Sm => "SM",
        }
    }
}

impl std::fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MechanismKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let up = s.to_ascii_uppercase();
        MechanismKind::ALL
            .into_iter()
            .find(|k| k.name() == up)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown mechanism '{s}'")))
    }
}

/// The small-tail function `h`: given `delta1`, how small a tail quantile
/// `eps1` may be ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailFunction {
    /// `h(delta1) = delta1 / (m^2 n H)`, valid for priors on `[1, H]`.
    Bounded { m: usize, n: usize, h: f64 },
    /// `h(delta1) = scale * delta1`
    Linear { scale: f64 },
    /// Step function: the `eps1` of the largest listed `delta1` not above the input.
    Table { points: Vec<(f64, f64)> },
}

impl TailFunction {
    pub fn eval<S: Scalar>(&self, delta1: &S) -> Result<S> {
        let out = match self {
            TailFunction::Bounded { m, n, h } => {
                delta1.clone() / (S::int((m * m * n) as u64) * S::from_f64_lossy(*h))
            }
            TailFunction::Linear { scale } => S::from_f64_lossy(*scale) * delta1.clone(),
            TailFunction::Table { points } => {
                let d = delta1.to_f64_lossy();
                let best = points
                    .iter()
                    .filter(|p| p.0 <= d)
                    .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
                    .ok_or_else(|| Error::InvalidParameter(format!("tail table has no entry at or below {d}")))?;
                S::from_f64_lossy(best.1)
            }
        };
        if out <= S::zero() || out >= S::one() {
            return Err(Error::InvalidParameter(format!("h({delta1}) = {out} is outside (0, 1)")));
        }
        Ok(out)
    }

    pub fn provenance(&self) -> &'static str {
        match self {
            TailFunction::Bounded { .. } => "bounded_closed_form",
            _ => "user_supplied",
        }
    }
}

#[derive(Clone, Debug)]
pub struct MechanismSpec<S> {
    pub kind: MechanismKind,
    pub eps: S,
    /// Upper end `H` of the value range, for value-query mechanisms and the
    /// bounded tail function.
    pub h: Option<S>,
    pub tail: Option<TailFunction>,
    pub sample_budget: Option<usize>,
    pub mix_seed: u64,
}

impl<S: Scalar> MechanismSpec<S> {
    pub fn new(kind: MechanismKind, eps: S) -> Self {
        MechanismSpec { kind, eps, h: None, tail: None, sample_budget: None, mix_seed: 0 }
    }

    pub fn with_h(mut self, h: S) -> Self {
        self.h = Some(h);
        self
    }

    pub fn with_tail(mut self, tail: TailFunction) -> Self {
        self.tail = Some(tail);
        self
    }

    pub fn with_samples(mut self, t: usize) -> Self {
        self.sample_budget = Some(t);
        self
    }

    pub fn with_mix_seed(mut self, seed: u64) -> Self {
        self.mix_seed = seed;
        self
    }

    pub fn to_f64(&self) -> MechanismSpec<f64> {
        MechanismSpec {
            kind: self.kind,
            eps: self.eps.to_f64_lossy(),
            h: self.h.as_ref().map(|h| h.to_f64_lossy()),
            tail: self.tail.clone(),
            sample_budget: self.sample_budget,
            mix_seed: self.mix_seed,
        }
    }
}

/// The simple mechanism run on `D'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inner {
    Myerson,
    UnitDemand,
    Bvcg,
    SeparateMyerson,
    /// Bvcg w.p. 1/4, separate Myerson w.p. 3/4.
    Mixture,
}

/// Parameters derived from `(kind, eps)` and the instance shape.
#[derive(Clone, Debug)]
pub struct Derived<S> {
    pub delta: Option<S>,
    pub delta1: Option<S>,
    pub eps1: Option<S>,
    pub grid: GridSpec<S>,
    pub inner: Inner,
}

/// `sqrt(x)`, exact when `x` is a square of a rational.
fn sqrt_of<S: Scalar>(x: &S) -> S {
    if S::EXACT {
        let r = x.to_rational();
        if r > Rational::from_integer(0.into()) {
            let (n, d) = (r.numer().sqrt(), r.denom().sqrt());
            if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
                return S::from_rational(&Rational::new(n, d));
            }
        }
    }
    x.powf_lossy(0.5)
}

fn require(class: ValuationClass, allowed: &[ValuationClass]) -> Result<()> {
    if allowed.contains(&class) {
        return Ok(());
    }
    Err(Error::WrongValuationClass {
        expected: allowed.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("|"),
        got: class.to_string(),
    })
}

fn require_one_item(m: usize) -> Result<()> {
    if m == 1 {
        return Ok(());
    }
    Err(Error::WrongValuationClass { expected: "one item".into(), got: format!("m = {m}") })
}

impl<S: Scalar> MechanismSpec<S> {
    fn tail_fn(&self, n: usize, m: usize) -> Result<TailFunction> {
        if let Some(t) = &self.tail {
            return Ok(t.clone());
        }
        match &self.h {
            Some(h) => Ok(TailFunction::Bounded { m, n, h: h.to_f64_lossy() }),
            None => Err(Error::InvalidParameter(format!(
                "{} needs a tail function h (or H for the bounded closed form)",
                self.kind
            ))),
        }
    }

    fn h_value(&self) -> Result<S> {
        self.h
            .clone()
            .ok_or_else(|| Error::InvalidParameter(format!("{} needs the value bound H", self.kind)))
    }

    /// Checks the instance shape and fixes `delta`, `eps1` and the grid.
    pub fn derive(&self, class: ValuationClass, n: usize, m: usize) -> Result<Derived<S>> {
        use MechanismKind::*;
        use ValuationClass::*;
        if self.eps <= S::zero() {
            return Err(Error::InvalidParameter(format!("eps = {} must be positive", self.eps)));
        }
        let eps = self.eps.clone();
        let one = S::one();
        let int = |x: u64| S::int(x);
        let value = |delta: S, inner: Inner| -> Result<Derived<S>> {
            let grid = GridSpec::Value { h: self.h_value()?, delta: delta.clone() };
            Ok(Derived { delta: Some(delta), delta1: None, eps1: None, grid, inner })
        };
        let quantile = |delta: S, delta1: S, inner: Inner| -> Result<Derived<S>> {
            let eps1 = self.tail_fn(n, m)?.eval(&delta1)?;
            let grid = GridSpec::Quantile { eps1: eps1.clone(), delta: delta.clone() };
            Ok(Derived { delta: Some(delta), delta1: Some(delta1), eps1: Some(eps1), grid, inner })
        };
        // 2 eps / (3 (1 + eps)) and eps / (10 (1 + eps))
        let d1_single = int(2) * eps.clone() / (int(3) * (one.clone() + eps.clone()));
        let d1_add = eps.clone() / (int(10) * (one.clone() + eps.clone()));
        let bvcg_delta_v = sqrt_of(&(eps.clone() + one.clone())) - one.clone();
        let bvcg_delta_q = {
            let base = one.clone() + eps.clone() / int(5);
            if m == 1 {
                base - one.clone()
            } else {
                base.powf_lossy(1.0 / m as f64) - one.clone()
            }
        };
        match self.kind {
            Evm => {
                require_one_item(m)?;
                value(eps, Inner::Myerson)
            }
            Evud => {
                require(class, &[UnitDemand])?;
                value(eps, Inner::UnitDemand)
            }
            Evbvcg | Evim | Eva => {
                require(class, &[Additive])?;
                let inner = match self.kind {
                    Evbvcg => Inner::Bvcg,
                    Evim => Inner::SeparateMyerson,
                    _ => Inner::Mixture,
                };
                value(bvcg_delta_v, inner)
            }
            Eqm => {
                require_one_item(m)?;
                quantile(eps / int(3), d1_single, Inner::Myerson)
            }
            Equd => {
                require(class, &[UnitDemand])?;
                quantile(eps / int(3), d1_single, Inner::UnitDemand)
            }
            Eqbvcg | Eqim | Eqa => {
                require(class, &[Additive])?;
                let inner = match self.kind {
                    Eqbvcg => Inner::Bvcg,
                    Eqim => Inner::SeparateMyerson,
                    _ => Inner::Mixture,
                };
                quantile(bvcg_delta_q, d1_add, inner)
            }
            Emr => {
                require_one_item(m)?;
                let delta = eps.clone() / int(4);
                let eps1 = eps.clone() * eps / (int(256) * int(n as u64));
                if eps1 >= one {
                    return Err(Error::InvalidParameter(format!("eps1 = {eps1} must be below 1")));
                }
                let grid = GridSpec::Quantile { eps1: eps1.clone(), delta: delta.clone() };
                Ok(Derived { delta: Some(delta), delta1: None, eps1: Some(eps1), grid, inner: Inner::Myerson })
            }
            Sm => {
                if self.sample_budget.unwrap_or(0) == 0 {
                    return Err(Error::InvalidParameter("SM needs a positive sample budget".into()));
                }
                match class {
                    SingleItem | UnitDemand => {
                        let inner = if class == SingleItem { Inner::Myerson } else { Inner::UnitDemand };
                        quantile(eps / int(6), d1_single, inner)
                    }
                    Additive => {
                        let eps1 = self.tail_fn(n, m)?.eval(&d1_add)?;
                        let grid = GridSpec::QuantileUniform { eps1: eps1.clone() };
                        Ok(Derived { delta: None, delta1: Some(d1_add), eps1: Some(eps1), grid, inner: Inner::Mixture })
                    }
                }
            }
        }
    }
}
