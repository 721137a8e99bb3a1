use rand::Rng;

use crate::dist_core::{DiscretePmf, Marginal};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `rows[a]` lists `(b, Pr[a -> b])`.
pub type Kernel<S> = Vec<Vec<(usize, S)>>;

struct Step<S> {
    index: usize,
    // Probability of moving one support point down instead of staying.
    down: S,
}

/// Where `v` goes under the rounding map: the largest `D'` point `w <= v`
/// (the bottom point if none), except that `v = w_l` may drop to `w_{l-1}`
/// so that the pushforward of `source` is exactly `target`.
fn round_down_step<S: Scalar, M: Marginal<S> + ?Sized>(v: &S, source: &M, target: &DiscretePmf<S>) -> Step<S> {
    let l = match target.floor_index(v) {
        Some(l) => l,
        None => return Step { index: 0, down: S::zero() },
    };
    if l == 0 || target.values()[l] != *v {
        return Step { index: l, down: S::zero() };
    }
    let w = &target.values()[l];
    let atom = source.mass_at(w);
    if atom <= S::zero() {
        return Step { index: l, down: S::zero() };
    }
    let excess = source.tail(w) - target.tails()[l].clone();
    let down = (excess / atom).max_of(&S::zero()).min_of(&S::one());
    Step { index: l, down }
}

pub fn round_down<S: Scalar, M: Marginal<S> + ?Sized, R: Rng + ?Sized>(
    v: &S,
    source: &M,
    target: &DiscretePmf<S>,
    rng: &mut R,
) -> S {
    let step = round_down_step(v, source, target);
    let idx = if !step.down.is_zero() && rng.gen::<f64>() < step.down.to_f64_lossy() {
        step.index - 1
    } else {
        step.index
    };
    target.values()[idx].clone()
}

/// Branch probabilities for resampling from `v' = w_l`:
/// up to `w_{l+1}`, into the open gap `(w_l, w_{l+1})`, or stay at `w_l`.
fn resample_branches<S: Scalar, M: Marginal<S> + ?Sized>(l: usize, source: &M, target: &DiscretePmf<S>) -> [S; 3] {
    let w = &target.values()[l];
    let mass = target.probs()[l].clone();
    let (up, above) = match target.values().get(l + 1) {
        Some(next) => {
            let up = source.tail(next) - target.tails()[l + 1].clone();
            (up, source.tail(next))
        }
        None => (S::zero(), S::zero()),
    };
    let gap = source.tail(w) - source.mass_at(w) - above;
    let up = up / mass.clone();
    let gap = gap / mass;
    let stay = S::one() - up.clone() - gap.clone();
    [up, gap, stay]
}

/// Draws `v ~ D` conditioned on rounding down to `v'`; the joint law of
/// `(v, round_down(v))` matches that of `(resample(v'), v')`.
pub fn resample<S: Scalar, M: Marginal<S> + ?Sized, R: Rng + ?Sized>(
    v_prime: &S,
    source: &M,
    target: &DiscretePmf<S>,
    rng: &mut R,
) -> Result<S> {
    let l = target
        .index_of(v_prime)
        .ok_or_else(|| Error::InvalidParameter(format!("{v_prime} is not in the support of D'")))?;
    let [up, gap, _] = resample_branches(l, source, target);
    let u = rng.gen::<f64>();
    let (up, gap) = (up.to_f64_lossy(), gap.to_f64_lossy());
    let w = &target.values()[l];
    if u < up {
        return Ok(target.values()[l + 1].clone());
    }
    if u >= up + gap {
        return Ok(w.clone());
    }
    let next = target.values().get(l + 1);
    if let Some(d) = source.as_discrete() {
        let inside: Vec<usize> = (0..d.len())
            .filter(|&a| d.values()[a] > *w && next.map_or(true, |n| d.values()[a] < *n))
            .collect();
        let total: f64 = inside.iter().map(|&a| d.probs()[a].to_f64_lossy()).sum();
        let mut x = rng.gen::<f64>() * total;
        for &a in &inside {
            x -= d.probs()[a].to_f64_lossy();
            if x < 0.0 {
                return Ok(d.values()[a].clone());
            }
        }
        return Ok(d.values()[*inside.last().unwrap()].clone());
    }
    // Continuous source: invert the tail on the open gap.
    let hi = (source.tail(w) - source.mass_at(w)).to_f64_lossy();
    let lo = next.map_or(0.0, |n| source.tail(n).to_f64_lossy());
    let q = lo + (hi - lo) * (1.0 - rng.gen::<f64>());
    let mut x = source.quantile(&S::from_f64_lossy(q)).finite().unwrap_or_else(|| w.clone());
    if x <= *w {
        x = w.clone();
    }
    Ok(x)
}

/// Exact round-down kernel from each source atom to `D'` atoms.
pub fn round_down_kernel<S: Scalar>(source: &DiscretePmf<S>, target: &DiscretePmf<S>) -> Kernel<S> {
    source
        .values()
        .iter()
        .map(|v| {
            let step = round_down_step(v, source, target);
            if step.down.is_zero() {
                vec![(step.index, S::one())]
            } else if step.down == S::one() {
                vec![(step.index - 1, S::one())]
            } else {
                vec![(step.index - 1, step.down.clone()), (step.index, S::one() - step.down)]
            }
        })
        .collect()
}

/// Exact resampling kernel from each `D'` atom back to source atoms.
pub fn resample_kernel<S: Scalar>(source: &DiscretePmf<S>, target: &DiscretePmf<S>) -> Result<Kernel<S>> {
    let mut rows = Vec::with_capacity(target.len());
    for l in 0..target.len() {
        let [up, gap, stay] = resample_branches(l, source, target);
        let w = &target.values()[l];
        let next = target.values().get(l + 1);
        let mut row = Vec::new();
        if !stay.is_zero() {
            let a = source
                .index_of(w)
                .ok_or_else(|| Error::InvalidParameter(format!("{w} carries stay mass but is not a source atom")))?;
            row.push((a, stay));
        }
        if !gap.is_zero() {
            let gap_mass = gap.clone() * target.probs()[l].clone();
            for a in 0..source.len() {
                let x = &source.values()[a];
                if x > w && next.map_or(true, |n| x < n) {
                    row.push((a, gap.clone() * source.probs()[a].clone() / gap_mass.clone()));
                }
            }
        }
        if !up.is_zero() {
            let n = next.unwrap();
            let a = source
                .index_of(n)
                .ok_or_else(|| Error::InvalidParameter(format!("{n} carries up mass but is not a source atom")))?;
            row.push((a, up));
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist_core::QueryOracle;
    use crate::query_schemes::{discretize, GridSpec};
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn push<S: Scalar>(weights: &[S], kernel: &Kernel<S>, width: usize) -> Vec<S> {
        let mut out = vec![S::zero(); width];
        for (a, row) in kernel.iter().enumerate() {
            for (b, p) in row {
                out[*b] = out[*b].clone() + weights[a].clone() * p.clone();
            }
        }
        out
    }

    #[test]
    fn exact_pushforwards_on_a_quantile_discretization() {
        let d = DiscretePmf::new(
            vec![r(1, 1), r(2, 1), r(3, 1), r(5, 1)],
            vec![r(1, 10), r(3, 10), r(2, 5), r(1, 5)],
        )
        .unwrap();
        let mut o = QueryOracle::new(&d);
        let dp = discretize(&mut o, &GridSpec::Quantile { eps1: r(1, 4), delta: r(1, 1) }).unwrap().dist;
        let down = round_down_kernel(&d, &dp);
        assert_eq!(push(d.probs(), &down, dp.len()), dp.probs());
        let up = resample_kernel(&d, &dp).unwrap();
        assert_eq!(push(dp.probs(), &up, d.len()), d.probs());
        for row in down.iter().chain(up.iter()) {
            assert_eq!(row.iter().fold(r(0, 1), |s, (_, p)| s + p.clone()), r(1, 1));
        }
    }

    #[test]
    fn below_the_grid_rounds_to_the_bottom() {
        let dp = DiscretePmf::new(vec![2.0, 4.0], vec![0.5, 0.5]).unwrap();
        let src = DiscretePmf::new(vec![1.0, 4.0], vec![0.5, 0.5]).unwrap();
        let mut rng = rand::thread_rng();
        assert_eq!(round_down(&1.0, &src, &dp, &mut rng), 2.0);
        assert_eq!(round_down(&3.9, &src, &dp, &mut rng), 2.0);
    }
}
