use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{sample_by_quantile, Answer, DiscretePmf, Marginal};
use crate::error::{Error, Result};

/// Closed-form CDF expression used on one segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum CdfPiece {
    /// `F(v) = slope * v + intercept`
    Linear { slope: f64, intercept: f64 },
    /// `F(v) = 1 - scale * exp(-rate * v)`
    Exponential { scale: f64, rate: f64 },
    /// `F(v) = 1 - a / (b * v + c)`
    Hyperbolic { a: f64, b: f64, c: f64 },
}

impl CdfPiece {
    pub fn eval(&self, v: f64) -> f64 {
        match *self {
            CdfPiece::Linear { slope, intercept } => slope * v + intercept,
            CdfPiece::Exponential { scale, rate } => 1.0 - scale * (-rate * v).exp(),
            CdfPiece::Hyperbolic { a, b, c } => 1.0 - a / (b * v + c),
        }
    }

    /// Solves `eval(v) = y` on a strictly increasing piece.
    pub fn inverse(&self, y: f64) -> f64 {
        match *self {
            CdfPiece::Linear { slope, intercept } => (y - intercept) / slope,
            CdfPiece::Exponential { scale, rate } => -((1.0 - y) / scale).ln() / rate,
            CdfPiece::Hyperbolic { a, b, c } => (a / (1.0 - y) - c) / b,
        }
    }

    fn is_flat(&self) -> bool {
        match *self {
            CdfPiece::Linear { slope, .. } => slope == 0.0,
            CdfPiece::Exponential { scale, rate } => scale == 0.0 || rate == 0.0,
            CdfPiece::Hyperbolic { a, b, .. } => a == 0.0 || b == 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub piece: CdfPiece,
}

/// Distribution whose continuous part is given segment by segment, plus
/// point masses. The pieces give the accumulated continuous mass, so
/// `F(v) = piece(v) + sum of atoms at or below v`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseCdf {
    segments: Vec<Segment>,
    atoms: Vec<(f64, f64)>,
}

const JOIN_TOL: f64 = 1e-12;

enum Event<'a> {
    Atom(f64, f64),
    Seg(&'a Segment),
}

impl PiecewiseCdf {
    pub fn new(mut segments: Vec<Segment>, mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidDistribution(m));
        segments.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap_or(std::cmp::Ordering::Equal));
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (v, m) in atoms {
            if !(m >= 0.0) || !v.is_finite() {
                return bad(format!("atom ({v}, {m}) is invalid"));
            }
            if m == 0.0 {
                continue;
            }
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += m,
                _ => merged.push((v, m)),
            }
        }
        let mut level = 0.0;
        for (idx, s) in segments.iter().enumerate() {
            if !(s.lo < s.hi) || !s.lo.is_finite() || !s.hi.is_finite() {
                return bad(format!("segment [{}, {}] is empty or unbounded", s.lo, s.hi));
            }
            if idx > 0 && segments[idx - 1].hi > s.lo {
                return bad("segments overlap".into());
            }
            let start = s.piece.eval(s.lo);
            if (start - level).abs() > JOIN_TOL * level.max(1.0) {
                return bad(format!("continuous mass jumps at {}: {} vs {}", s.lo, level, start));
            }
            let mut prev = start;
            for step in 1..=64 {
                let v = s.lo + (s.hi - s.lo) * step as f64 / 64.0;
                let f = s.piece.eval(v);
                if !(f >= prev - JOIN_TOL) {
                    return bad(format!("CDF decreases inside [{}, {}]", s.lo, s.hi));
                }
                prev = f;
            }
            level = s.piece.eval(s.hi);
        }
        let total = level + merged.iter().map(|a| a.1).sum::<f64>();
        if (total - 1.0).abs() > JOIN_TOL * 10.0 {
            return bad(format!("total mass is {total}, not 1"));
        }
        Ok(PiecewiseCdf { segments, atoms: merged })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Continuous mass at or below `v`.
    fn continuous_cdf(&self, v: f64) -> f64 {
        let mut level = 0.0;
        for s in &self.segments {
            if v < s.lo {
                return level;
            }
            if v <= s.hi {
                return s.piece.eval(v);
            }
            level = s.piece.eval(s.hi);
        }
        level
    }

    /// `Pr[x <= v]`.
    pub fn cdf(&self, v: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().take_while(|a| a.0 <= v).map(|a| a.1).sum();
        (self.continuous_cdf(v) + atoms).min(1.0)
    }

    fn events(&self) -> Vec<Event<'_>> {
        let mut ev: Vec<(f64, u8, Event<'_>)> = Vec::new();
        for &(v, m) in &self.atoms {
            ev.push((v, 0, Event::Atom(v, m)));
        }
        for s in &self.segments {
            ev.push((s.lo, 1, Event::Seg(s)));
        }
        ev.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        ev.into_iter().map(|e| e.2).collect()
    }
}

impl Marginal<f64> for PiecewiseCdf {
    fn tail(&self, v: &f64) -> f64 {
        let below: f64 = self.atoms.iter().take_while(|a| a.0 < *v).map(|a| a.1).sum();
        (1.0 - self.continuous_cdf(*v) - below).clamp(0.0, 1.0)
    }

    fn quantile(&self, q: &f64) -> Answer<f64> {
        if *q <= 0.0 {
            return Answer::PosInf;
        }
        // Largest z with Pr[x < z] <= 1 - q.
        let target = 1.0 - q;
        let mut cum = 0.0;
        for ev in self.events() {
            match ev {
                Event::Atom(v, m) => {
                    if target < cum + m {
                        return Answer::Finite(v);
                    }
                    cum += m;
                }
                Event::Seg(s) => {
                    let base = s.piece.eval(s.lo);
                    let mass = s.piece.eval(s.hi) - base;
                    if target < cum + mass && !s.piece.is_flat() {
                        let v = s.piece.inverse(base + (target - cum).max(0.0));
                        return Answer::Finite(v.clamp(s.lo, s.hi));
                    }
                    cum += mass;
                }
            }
        }
        // Only reachable through rounding with q just above 0.
        let top = self
            .segments
            .iter()
            .map(|s| s.hi)
            .chain(self.atoms.iter().map(|a| a.0))
            .fold(f64::NEG_INFINITY, f64::max);
        Answer::Finite(top)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_by_quantile(self, rng)
    }

    fn mean(&self) -> f64 {
        // E[x] for x >= 0 is the integral of the tail; Simpson per segment.
        let mut total = 0.0;
        let mut prev = 0.0;
        for p in self.breakpoints() {
            if p > prev {
                total += simpson(|v| self.tail(&v), prev, p, 2000);
                prev = p;
            }
        }
        total
    }

    fn mass_at(&self, v: &f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 == *v).map(|a| a.1).sum()
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = Vec::new();
        for s in &self.segments {
            for step in 0..=32 {
                pts.push(s.lo + (s.hi - s.lo) * step as f64 / 32.0);
            }
        }
        pts.extend(self.atoms.iter().map(|a| a.0));
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    fn as_discrete(&self) -> Option<&DiscretePmf<f64>> {
        None
    }
}

/// Composite Simpson rule; the tail is smooth between breakpoints.
pub(crate) fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    // Evaluate just inside the ends so left-continuous jumps don't leak in.
    let eps = h * 1e-9;
    let mut s = f(a + eps) + f(b - eps);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform01() -> PiecewiseCdf {
        PiecewiseCdf::new(
            vec![Segment { lo: 0.0, hi: 1.0, piece: CdfPiece::Linear { slope: 1.0, intercept: 0.0 } }],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn uniform_queries() {
        let d = uniform01();
        assert!((d.tail(&0.25) - 0.75).abs() < 1e-15);
        assert_eq!(d.quantile(&0.25), Answer::Finite(0.75));
        assert_eq!(d.quantile(&1.0), Answer::Finite(0.0));
        assert_eq!(d.quantile(&0.0), Answer::PosInf);
        assert!((d.mean() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn atom_at_the_top() {
        // Half uniform on [0, 1], half a point mass at 1.
        let d = PiecewiseCdf::new(
            vec![Segment { lo: 0.0, hi: 1.0, piece: CdfPiece::Linear { slope: 0.5, intercept: 0.0 } }],
            vec![(1.0, 0.5)],
        )
        .unwrap();
        assert_eq!(d.tail(&1.0), 0.5);
        assert_eq!(d.quantile(&0.5), Answer::Finite(1.0));
        assert_eq!(d.quantile(&0.3), Answer::Finite(1.0));
        assert!((d.quantile(&0.75).finite().unwrap() - 0.5).abs() < 1e-12);
        assert!((d.mean() - 0.75).abs() < 1e-6);
    }

    #[test]
    fn gap_answers_the_next_support_point() {
        let d = PiecewiseCdf::new(
            vec![
                Segment { lo: 0.0, hi: 1.0, piece: CdfPiece::Linear { slope: 0.5, intercept: 0.0 } },
                Segment { lo: 2.0, hi: 3.0, piece: CdfPiece::Linear { slope: 0.5, intercept: -0.5 } },
            ],
            vec![],
        )
        .unwrap();
        assert_eq!(d.quantile(&0.5), Answer::Finite(2.0));
        assert_eq!(d.tail(&1.5), 0.5);
    }

    #[test]
    fn rejects_jumps_and_bad_totals() {
        let jump = PiecewiseCdf::new(
            vec![
                Segment { lo: 0.0, hi: 1.0, piece: CdfPiece::Linear { slope: 0.5, intercept: 0.0 } },
                Segment { lo: 1.0, hi: 2.0, piece: CdfPiece::Linear { slope: 0.25, intercept: 0.5 } },
            ],
            vec![],
        );
        assert!(jump.is_err());
        let short = PiecewiseCdf::new(
            vec![Segment { lo: 0.0, hi: 1.0, piece: CdfPiece::Linear { slope: 0.5, intercept: 0.0 } }],
            vec![],
        );
        assert!(short.is_err());
    }

    #[test]
    fn hyperbolic_inverse_round_trips() {
        let p = CdfPiece::Hyperbolic { a: 2.0, b: 0.5, c: 2.0 };
        for v in [0.0, 0.3, 1.7, 10.0] {
            assert!((p.inverse(p.eval(v)) - v).abs() < 1e-9);
        }
    }
}
