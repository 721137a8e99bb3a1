use serde::Serialize;

use crate::dist_core::{Answer, CdfPiece, Marginal, PiecewiseCdf, Segment};
use crate::error::{Error, Result};

/// Two regular single-item priors on `[0, R/q_t]` whose quantile answers
/// agree outside `(q_t, q_{t+1})`, with `q_t = t * delta * eps`. `F1` has a
/// point mass `q_t / (1 - delta eps)` at `R/q_t`; `F2` has mass `q_t` there
/// and a second hyperbolic piece above `v*`.
#[derive(Clone, Debug, Serialize)]
pub struct HardPairRegular {
    pub eps: f64,
    pub delta: f64,
    pub r: f64,
    pub t: usize,
    pub q_t: f64,
    pub q_t1: f64,
    pub v_star: f64,
    pub q_star: f64,
    #[serde(skip)]
    pub f1: PiecewiseCdf,
    #[serde(skip)]
    pub f2: PiecewiseCdf,
}

pub const PAIR_DELTA: f64 = 32.0;

pub fn gen_regular_pair(eps: f64, r: f64, t: usize) -> Result<HardPairRegular> {
    let delta = PAIR_DELTA;
    let de = delta * eps;
    if !(eps > 0.0) || !(r > 0.0) {
        return Err(Error::InvalidParameter("eps and R must be positive".into()));
    }
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1 so the top value R/q_t is finite".into()));
    }
    let q_t = t as f64 * de;
    let q_t1 = q_t + de;
    if q_t1 > 1.0 - 2.0 * de + 1e-15 {
        return Err(Error::InvalidParameter(format!(
            "q_(t+1) = {q_t1} exceeds 1 - 2 delta eps = {}",
            1.0 - 2.0 * de
        )));
    }
    let top = r / q_t;
    let low = CdfPiece::Hyperbolic { a: r, b: 1.0 - q_t1, c: r };
    let f1 = PiecewiseCdf::new(vec![Segment { lo: 0.0, hi: top, piece: low.clone() }], vec![(top, q_t / (1.0 - de))])?;
    let v_star = r * (2.0 - de) / (2.0 * (1.0 - de) - (2.0 - de) * (1.0 - q_t1));
    let q_star = 1.0 - (2.0 - de) / (2.0 * (1.0 - de)) * (1.0 - q_t1);
    let high = CdfPiece::Hyperbolic { a: r * (1.0 - de), b: 1.0 + q_t - de, c: -r };
    let f2 = PiecewiseCdf::new(
        vec![Segment { lo: 0.0, hi: v_star, piece: low }, Segment { lo: v_star, hi: top, piece: high }],
        vec![(top, q_t)],
    )?;
    Ok(HardPairRegular { eps, delta, r, t, q_t, q_t1, v_star, q_star, f1, f2 })
}

impl HardPairRegular {
    fn de(&self) -> f64 {
        self.delta * self.eps
    }

    /// `R1(q) = q v1(q)`.
    pub fn r1(&self, q: f64) -> f64 {
        let atom = self.q_t / (1.0 - self.de());
        if q <= atom {
            q * self.r / self.q_t
        } else {
            self.r / (1.0 - self.q_t1) * (1.0 - q)
        }
    }

    /// `R2(q) = q v2(q)`.
    pub fn r2(&self, q: f64) -> f64 {
        if q <= self.q_t {
            q * self.r / self.q_t
        } else if q < self.q_star {
            self.r / (1.0 + self.q_t - self.de()) * (1.0 + q - self.de())
        } else {
            self.r / (1.0 - self.q_t1) * (1.0 - q)
        }
    }

    pub fn opt1(&self) -> f64 {
        self.r / (1.0 - self.de())
    }

    pub fn opt2(&self) -> f64 {
        self.r * (2.0 - self.de()) / (2.0 * (1.0 - self.de()))
    }

    /// Largest gap between the two members' quantile answers over `count`
    /// points in each of `[0, q_t]` and `[q_{t+1}, 1]`, and between their
    /// CDFs at values whose quantile lies there, relative to the value.
    pub fn max_disagreement_outside(&self, count: usize) -> f64 {
        let mut worst: f64 = 0.0;
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1.0);
        let n = count.max(1) as f64;
        for i in 0..=count {
            let f = i as f64 / n;
            for q in [self.q_t * f, self.q_t1 + (1.0 - self.q_t1) * f] {
                match (self.f1.quantile(&q), self.f2.quantile(&q)) {
                    (Answer::Finite(a), Answer::Finite(b)) => worst = worst.max(rel(a, b)),
                    (Answer::PosInf, Answer::PosInf) => {}
                    _ => return f64::INFINITY,
                }
            }
        }
        let v_hi = match self.f1.quantile(&self.q_t1) {
            Answer::Finite(v) => v,
            Answer::PosInf => 0.0,
        };
        let top = self.r / self.q_t;
        for i in 0..=count {
            let f = i as f64 / n;
            for v in [v_hi * f, top * (1.0 + f)] {
                worst = worst.max((self.f1.cdf(v) - self.f2.cdf(v)).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist_core::revenue_curve_regularity;
    use crate::myerson::optimal_posted_price;

    #[test]
    fn closed_forms() {
        let p = gen_regular_pair(1.0 / 128.0, 1.0, 1).unwrap();
        assert!((p.f2.cdf(p.v_star) - (1.0 - p.q_star)).abs() < 1e-9);
        let (_, o1) = optimal_posted_price(&p.f1, &0.0);
        let (_, o2) = optimal_posted_price(&p.f2, &0.0);
        assert!((o1 - p.opt1()).abs() <= 1e-9 * p.opt1());
        assert!((o2 - p.opt2()).abs() <= 1e-9 * p.opt2());
        assert!(revenue_curve_regularity(&p.f1, 1000).unwrap());
        assert!(revenue_curve_regularity(&p.f2, 1000).unwrap());
        assert!(p.max_disagreement_outside(1000) < 1e-12);
    }

    #[test]
    fn rejects_interval_too_high() {
        assert!(gen_regular_pair(1.0 / 128.0, 1.0, 2).is_err());
        assert!(gen_regular_pair(1.0 / 128.0, 1.0, 0).is_err());
    }
}
