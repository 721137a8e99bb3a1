//! JSON instance files.
//!
//! ```json
//! {"n": 1, "m": 1, "valuation_class": "single_item",
//!  "marginals": [[{"kind": "discrete", "support": [1, 3], "probs": ["1/2", "0.5"]}]]}
//! ```
//! Numbers may be JSON numbers or strings holding decimals or fractions;
//! strings are read exactly on the rational backend.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AuctionInstance, DiscretePmf, Distribution, NamedRegular, PiecewiseCdf, Segment, ValuationClass};
use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumLit {
    Number(f64),
    Text(String),
}

impl NumLit {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            NumLit::Number(x) => Rational::from_float(*x)
                .ok_or_else(|| Error::InvalidParameter(format!("non-finite number {x}"))),
            NumLit::Text(t) => parse_rational(t).ok_or_else(|| Error::InvalidParameter(format!("cannot parse '{t}'"))),
        }
    }

    pub fn to_f64(&self) -> Result<f64> {
        match self {
            NumLit::Number(x) => Ok(*x),
            NumLit::Text(_) => Ok(self.to_rational()?.to_f64_lossy()),
        }
    }

    pub fn to_scalar<S: Scalar>(&self) -> Result<S> {
        Ok(S::from_rational(&self.to_rational()?))
    }

    pub fn exact<S: Scalar>(x: &S) -> NumLit {
        if S::EXACT {
            NumLit::Text(x.to_string())
        } else {
            NumLit::Number(x.to_f64_lossy())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MarginalSpec {
    Discrete { support: Vec<NumLit>, probs: Vec<NumLit> },
    Piecewise { segments: Vec<Segment>, #[serde(default)] atoms: Vec<(f64, f64)> },
    Regular(NamedRegular),
}

impl MarginalSpec {
    pub fn to_distribution(&self) -> Result<Distribution> {
        Ok(match self {
            MarginalSpec::Discrete { .. } => Distribution::Discrete(self.to_discrete()?),
            MarginalSpec::Piecewise { segments, atoms } => {
                Distribution::Piecewise(PiecewiseCdf::new(segments.clone(), atoms.clone())?)
            }
            MarginalSpec::Regular(r) => Distribution::Regular(r.clone().validate()?),
        })
    }

    pub fn to_discrete<S: Scalar>(&self) -> Result<DiscretePmf<S>> {
        match self {
            MarginalSpec::Discrete { support, probs } => {
                let vs = support.iter().map(NumLit::to_scalar).collect::<Result<Vec<S>>>()?;
                let ps = probs.iter().map(NumLit::to_scalar).collect::<Result<Vec<S>>>()?;
                DiscretePmf::new(vs, ps)
            }
            _ => Err(Error::NotDiscrete),
        }
    }

    pub fn from_discrete<S: Scalar>(d: &DiscretePmf<S>) -> Self {
        MarginalSpec::Discrete {
            support: d.values().iter().map(NumLit::exact).collect(),
            probs: d.probs().iter().map(NumLit::exact).collect(),
        }
    }

    pub fn from_distribution(d: &Distribution) -> Self {
        match d {
            Distribution::Discrete(p) => Self::from_discrete(p),
            Distribution::Piecewise(p) => MarginalSpec::Piecewise {
                segments: p.segments().to_vec(),
                atoms: p.atoms().to_vec(),
            },
            Distribution::Regular(r) => MarginalSpec::Regular(r.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub m: usize,
    pub valuation_class: ValuationClass,
    pub marginals: Vec<Vec<MarginalSpec>>,
}

impl InstanceFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    fn check_shape(&self) -> Result<()> {
        if self.marginals.len() != self.n || self.marginals.iter().any(|r| r.len() != self.m) {
            return Err(Error::InvalidParameter(format!(
                "marginals grid does not match n = {}, m = {}",
                self.n, self.m
            )));
        }
        Ok(())
    }

    pub fn to_float(&self) -> Result<AuctionInstance<Distribution>> {
        self.check_shape()?;
        let prior = self
            .marginals
            .iter()
            .map(|row| row.iter().map(MarginalSpec::to_distribution).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        AuctionInstance::new(self.valuation_class, prior)
    }

    /// Discrete instance on any backend; strings are parsed exactly.
    pub fn to_discrete<S: Scalar>(&self) -> Result<AuctionInstance<DiscretePmf<S>>> {
        self.check_shape()?;
        let prior = self
            .marginals
            .iter()
            .map(|row| row.iter().map(MarginalSpec::to_discrete).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        AuctionInstance::new(self.valuation_class, prior)
    }

    pub fn is_discrete(&self) -> bool {
        self.marginals.iter().flatten().all(|m| matches!(m, MarginalSpec::Discrete { .. }))
    }

    pub fn from_float(inst: &AuctionInstance<Distribution>) -> Self {
        InstanceFile {
            n: inst.n,
            m: inst.m,
            valuation_class: inst.class,
            marginals: inst.prior.iter().map(|r| r.iter().map(MarginalSpec::from_distribution).collect()).collect(),
        }
    }

    pub fn from_discrete<S: Scalar>(inst: &AuctionInstance<DiscretePmf<S>>) -> Self {
        InstanceFile {
            n: inst.n,
            m: inst.m,
            valuation_class: inst.class,
            marginals: inst.prior.iter().map(|r| r.iter().map(MarginalSpec::from_discrete).collect()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist_core::Marginal;

    #[test]
    fn parses_mixed_number_formats_exactly() {
        let text = r#"{"n": 1, "m": 2, "valuation_class": "additive",
            "marginals": [[
                {"kind": "discrete", "support": [1, "3"], "probs": ["1/3", "2/3"]},
                {"kind": "regular", "family": "uniform", "params": {"low": 0, "high": 1}}
            ]]}"#;
        let f: InstanceFile = serde_json::from_str(text).unwrap();
        assert!(!f.is_discrete());
        let inst = f.to_float().unwrap();
        assert!((inst.marginal(0, 0).tail(&2.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(inst.marginal(0, 1).tail(&0.25), 0.75);
        assert!(f.to_discrete::<Rational>().is_err());
    }

    #[test]
    fn round_trips_exact_discrete() {
        let d = DiscretePmf::new(
            vec![Rational::from_ratio(1, 1), Rational::from_ratio(5, 2)],
            vec![Rational::from_ratio(1, 3), Rational::from_ratio(2, 3)],
        )
        .unwrap();
        let inst = AuctionInstance::new(ValuationClass::SingleItem, vec![vec![d.clone()]]).unwrap();
        let f = InstanceFile::from_discrete(&inst);
        let text = serde_json::to_string(&f).unwrap();
        let back: InstanceFile = serde_json::from_str(&text).unwrap();
        let inst2 = back.to_discrete::<Rational>().unwrap();
        assert_eq!(inst2.marginal(0, 0), &d);
    }

    #[test]
    fn piecewise_round_trip() {
        let text = r#"{"n": 1, "m": 1, "valuation_class": "single_item",
            "marginals": [[{"kind": "piecewise",
                "segments": [{"lo": 0, "hi": 1, "piece": {"form": "linear", "slope": 0.5, "intercept": 0}}],
                "atoms": [[1, 0.5]]}]]}"#;
        let f: InstanceFile = serde_json::from_str(text).unwrap();
        let inst = f.to_float().unwrap();
        assert_eq!(inst.marginal(0, 0).tail(&1.0), 0.5);
        let again = InstanceFile::from_float(&inst);
        assert_eq!(again, f);
    }
}
