use crate::error::{Error, Result};
use crate::scalar::{ceil_log, Scalar};

/// `(1, (1+delta), ..., (1+delta)^(k-1), h)` with `k = ceil(log_{1+delta} h)`.
pub fn value_grid<S: Scalar>(h: &S, delta: &S) -> Result<Vec<S>> {
    if *h <= S::one() {
        return Err(Error::InvalidParameter(format!("H = {h} must exceed 1")));
    }
    if *delta <= S::zero() {
        return Err(Error::InvalidParameter(format!("delta = {delta} must be positive")));
    }
    let base = S::one() + delta.clone();
    let k = ceil_log(&base, h);
    let mut grid = Vec::with_capacity(k as usize + 1);
    let mut p = S::one();
    for _ in 0..k {
        grid.push(p.clone());
        p = p * base.clone();
    }
    // base^(k-1) < h always holds, so h never duplicates a grid point.
    grid.push(h.clone());
    Ok(grid)
}

/// `(1, eps1 (1+delta)^(k-1), ..., eps1 (1+delta), eps1)` with
/// `k = ceil(log_{1+delta} (1/eps1))`.
pub fn quantile_grid<S: Scalar>(eps1: &S, delta: &S) -> Result<Vec<S>> {
    check_eps1(eps1)?;
    if *delta <= S::zero() {
        return Err(Error::InvalidParameter(format!("delta = {delta} must be positive")));
    }
    let base = S::one() + delta.clone();
    let k = ceil_log(&base, &(S::one() / eps1.clone()));
    let mut low = Vec::with_capacity(k as usize);
    let mut p = eps1.clone();
    for _ in 0..k {
        low.push(p.clone());
        p = p * base.clone();
    }
    let mut grid = vec![S::one()];
    grid.extend(low.into_iter().rev().filter(|q| *q < S::one()));
    Ok(grid)
}

/// `(1, k eps1, ..., 2 eps1, eps1)` with `k = floor(1/eps1)`; a leading
/// `k eps1 = 1` merges with the first entry.
pub fn uniform_quantile_grid<S: Scalar>(eps1: &S) -> Result<Vec<S>> {
    check_eps1(eps1)?;
    let mut k = (S::one() / eps1.clone()).floor_u64();
    while S::int(k + 1) * eps1.clone() <= S::one() + S::tolerance() {
        k += 1;
    }
    let mut grid = vec![S::one()];
    for l in (1..=k).rev() {
        let q = S::int(l) * eps1.clone();
        if !q.approx_eq(&S::one()) && q < S::one() {
            grid.push(q);
        }
    }
    Ok(grid)
}

fn check_eps1<S: Scalar>(eps1: &S) -> Result<()> {
    if *eps1 <= S::zero() || *eps1 > S::one() {
        return Err(Error::InvalidParameter(format!("eps1 = {eps1} must lie in (0, 1]")));
    }
    Ok(())
}
