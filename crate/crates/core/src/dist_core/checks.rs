use super::{Answer, Marginal};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// First-order stochastic dominance of `a` over `b`: `Pr_b[x >= v] <= Pr_a[x >= v]`
/// at every breakpoint of either distribution.
pub fn dominates<S: Scalar, A: Marginal<S> + ?Sized, B: Marginal<S> + ?Sized>(a: &A, b: &B) -> bool {
    let mut pts = a.breakpoints();
    pts.extend(b.breakpoints());
    pts.iter().all(|v| b.tail(v).approx_le(&a.tail(v)))
}

/// Concavity of `R(q) = q * v(q)` on the uniform grid `q = i / grid_size`,
/// using second differences.
pub fn revenue_curve_regularity<S: Scalar, M: Marginal<S> + ?Sized>(d: &M, grid_size: usize) -> Result<bool> {
    if grid_size < 2 {
        return Err(Error::InvalidParameter("grid needs at least two steps".into()));
    }
    let n = S::int(grid_size as u64);
    let mut curve = Vec::with_capacity(grid_size + 1);
    curve.push(S::zero());
    for i in 1..=grid_size {
        let q = S::int(i as u64) / n.clone();
        match d.quantile(&q) {
            Answer::Finite(v) => curve.push(q * v),
            Answer::PosInf => return Err(Error::NotEvaluable(q.to_f64_lossy())),
        }
    }
    let scale = curve.iter().fold(S::one(), |m, r| m.max_of(&r.abs()));
    let slack = S::tolerance() * scale;
    Ok(curve.windows(3).all(|w| {
        let second = w[0].clone() - w[1].clone() - w[1].clone() + w[2].clone();
        second <= slack
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist_core::{DiscretePmf, NamedRegular};

    #[test]
    fn two_far_atoms_are_irregular() {
        let d = DiscretePmf::new(vec![1.0, 100.0], vec![0.5, 0.5]).unwrap();
        assert!(!revenue_curve_regularity(&d, 4).unwrap());
        assert!(!revenue_curve_regularity(&d, 1000).unwrap());
    }

    #[test]
    fn uniform_and_exponential_are_regular() {
        assert!(revenue_curve_regularity(&NamedRegular::Uniform { low: 0.0, high: 1.0 }, 1000).unwrap());
        let e = NamedRegular::TruncatedExponential { rate: 1.0, tail_quantile: 1e-6 };
        assert!(revenue_curve_regularity(&e, 1000).unwrap());
    }

    #[test]
    fn dominance_on_shifted_atoms() {
        let lo = DiscretePmf::new(vec![1.0, 2.0], vec![0.5, 0.5]).unwrap();
        let hi = DiscretePmf::new(vec![1.0, 3.0], vec![0.5, 0.5]).unwrap();
        assert!(dominates(&hi, &lo));
        assert!(!dominates(&lo, &hi));
        assert!(dominates(&lo, &lo));
    }
}
