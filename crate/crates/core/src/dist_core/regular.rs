use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{sample_by_quantile, Answer, DiscretePmf, Marginal};
use crate::error::{Error, Result};

/// Named regular families with closed-form tails and quantiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum NamedRegular {
    Uniform { low: f64, high: f64 },
    Exponential { rate: f64 },
    /// Exponential with all mass above the `tail_quantile` point moved onto
    /// that point, i.e. `min(X, cap)` with `Pr[X >= cap] = tail_quantile`.
    TruncatedExponential { rate: f64, tail_quantile: f64 },
}

impl NamedRegular {
    pub fn validate(self) -> Result<Self> {
        let ok = match self {
            NamedRegular::Uniform { low, high } => low.is_finite() && high.is_finite() && low < high,
            NamedRegular::Exponential { rate } => rate > 0.0 && rate.is_finite(),
            NamedRegular::TruncatedExponential { rate, tail_quantile } => {
                rate > 0.0 && rate.is_finite() && tail_quantile > 0.0 && tail_quantile < 1.0
            }
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidDistribution(format!("bad parameters for {self:?}")))
        }
    }

    /// Largest value in the support, if bounded.
    pub fn cap(&self) -> Option<f64> {
        match *self {
            NamedRegular::Uniform { high, .. } => Some(high),
            NamedRegular::Exponential { .. } => None,
            NamedRegular::TruncatedExponential { rate, tail_quantile } => Some(-tail_quantile.ln() / rate),
        }
    }
}

impl Marginal<f64> for NamedRegular {
    fn tail(&self, v: &f64) -> f64 {
        let v = *v;
        match *self {
            NamedRegular::Uniform { low, high } => ((high - v) / (high - low)).clamp(0.0, 1.0),
            NamedRegular::Exponential { rate } => {
                if v <= 0.0 {
                    1.0
                } else {
                    (-rate * v).exp()
                }
            }
            NamedRegular::TruncatedExponential { rate, .. } => {
                if v <= 0.0 {
                    1.0
                } else if v > self.cap().unwrap() {
                    0.0
                } else {
                    (-rate * v).exp()
                }
            }
        }
    }

    fn quantile(&self, q: &f64) -> Answer<f64> {
        let q = *q;
        if q <= 0.0 {
            return Answer::PosInf;
        }
        let v = match *self {
            NamedRegular::Uniform { low, high } => high - q.min(1.0) * (high - low),
            NamedRegular::Exponential { rate } => -q.min(1.0).ln() / rate,
            NamedRegular::TruncatedExponential { rate, .. } => {
                (-q.min(1.0).ln() / rate).min(self.cap().unwrap())
            }
        };
        Answer::Finite(v)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_by_quantile(self, rng)
    }

    fn mean(&self) -> f64 {
        match *self {
            NamedRegular::Uniform { low, high } => (low + high) / 2.0,
            NamedRegular::Exponential { rate } => 1.0 / rate,
            NamedRegular::TruncatedExponential { rate, tail_quantile } => (1.0 - tail_quantile) / rate,
        }
    }

    fn mass_at(&self, v: &f64) -> f64 {
        match *self {
            NamedRegular::TruncatedExponential { tail_quantile, .. } if Some(*v) == self.cap() => tail_quantile,
            _ => 0.0,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let (lo, hi) = match *self {
            NamedRegular::Uniform { low, high } => (low, high),
            NamedRegular::Exponential { rate } => (0.0, -(1e-12f64).ln() / rate),
            NamedRegular::TruncatedExponential { .. } => (0.0, self.cap().unwrap()),
        };
        (0..=256).map(|i| lo + (hi - lo) * i as f64 / 256.0).collect()
    }

    fn as_discrete(&self) -> Option<&DiscretePmf<f64>> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_exponential_keeps_the_tail_as_an_atom() {
        let d = NamedRegular::TruncatedExponential { rate: 1.0, tail_quantile: 1e-6 }.validate().unwrap();
        let cap = d.cap().unwrap();
        assert!((d.tail(&cap) - 1e-6).abs() < 1e-18);
        assert_eq!(d.tail(&(cap + 1e-9)), 0.0);
        assert_eq!(d.quantile(&1e-7), Answer::Finite(cap));
        assert!((d.quantile(&0.5).finite().unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((d.mean() - (1.0 - 1e-6)).abs() < 1e-15);
    }

    #[test]
    fn uniform_closed_forms() {
        let d = NamedRegular::Uniform { low: 0.0, high: 1.0 };
        assert_eq!(d.tail(&0.3), 0.7);
        assert_eq!(d.quantile(&0.3), Answer::Finite(0.7));
        assert_eq!(d.quantile(&0.0), Answer::PosInf);
        assert!(NamedRegular::Uniform { low: 1.0, high: 1.0 }.validate().is_err());
    }
}
