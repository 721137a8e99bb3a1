//! Dense tableau simplex for `max c x` s.t. `A x <= b`, `x >= 0`, `b >= 0`,
//! with Bland's rule so degenerate pivots cannot cycle.

use serde::Serialize;

use crate::dist_core::{AuctionInstance, DiscretePmf, Profile, ValuationClass};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct LpSolution<S> {
    pub x: Vec<S>,
    pub objective: S,
    /// Dual prices, one per constraint row.
    pub dual: Vec<S>,
    pub dual_objective: S,
}

impl<S: Scalar> LpSolution<S> {
    pub fn duality_gap(&self) -> S {
        (self.objective.clone() - self.dual_objective.clone()).abs()
    }
}

fn positive<S: Scalar>(x: &S) -> bool {
    if S::EXACT {
        *x > S::zero()
    } else {
        x.to_f64_lossy() > 1e-12
    }
}

pub fn simplex_max<S: Scalar>(c: &[S], a: &[Vec<S>], b: &[S]) -> Result<LpSolution<S>> {
    let rows = a.len();
    let nv = c.len();
    if b.len() != rows || a.iter().any(|r| r.len() != nv) {
        return Err(Error::Lp("dimension mismatch".into()));
    }
    if b.iter().any(|x| *x < S::zero()) {
        return Err(Error::Lp("right-hand side must be nonnegative".into()));
    }
    let width = nv + rows;
    // t[r] = [A | I | b]; reduced costs in `z`, objective value in `zval`.
    let mut t: Vec<Vec<S>> = (0..rows)
        .map(|r| {
            let mut row = a[r].clone();
            row.extend((0..rows).map(|k| if k == r { S::one() } else { S::zero() }));
            row.push(b[r].clone());
            row
        })
        .collect();
    let mut z: Vec<S> = c.to_vec();
    z.extend((0..rows).map(|_| S::zero()));
    let mut zval = S::zero();
    let mut basis: Vec<usize> = (nv..width).collect();

    for _ in 0..1_000_000 {
        let Some(enter) = (0..width).find(|&j| positive(&z[j])) else {
            let mut x = vec![S::zero(); nv];
            for (r, &bv) in basis.iter().enumerate() {
                if bv < nv {
                    x[bv] = t[r][width].clone();
                }
            }
            let dual: Vec<S> = (0..rows).map(|r| -z[nv + r].clone()).collect();
            let dual_objective = dual.iter().zip(b).fold(S::zero(), |s, (y, bb)| s + y.clone() * bb.clone());
            return Ok(LpSolution { x, objective: zval, dual, dual_objective });
        };
        let mut leave: Option<(usize, S)> = None;
        for r in 0..rows {
            if positive(&t[r][enter]) {
                let ratio = t[r][width].clone() / t[r][enter].clone();
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            return Err(Error::Lp("unbounded".into()));
        };
        let piv = t[pr][enter].clone();
        for v in t[pr].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        let pivot_row = t[pr].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r == pr || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v = v.clone() - f.clone() * p.clone();
                }
            }
        }
        let f = z[enter].clone();
        for (v, p) in z.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *v = v.clone() - f.clone() * p.clone();
            }
        }
        zval = zval + f * pivot_row[width].clone();
        basis[pr] = enter;
    }
    Err(Error::Lp("iteration limit".into()))
}

/// Optimal DSIC/IR revenue for one buyer with a discrete type space, as an
/// LP over allocation probabilities and payments per type.
#[derive(Clone, Debug, Serialize)]
pub struct SingleBuyerLp<S> {
    pub revenue: S,
    pub duality_gap: S,
    pub types: usize,
}

pub fn opt_single_buyer_lp<S: Scalar>(inst: &AuctionInstance<DiscretePmf<S>>) -> Result<SingleBuyerLp<S>> {
    if inst.n != 1 {
        return Err(Error::InvalidParameter("the single-buyer LP needs n = 1".into()));
    }
    let m = inst.m;
    let mut types: Vec<(Profile<S>, S)> = Vec::new();
    inst.for_each_profile(100_000, |v, p| types.push((v.clone(), p.clone())))?;
    let nt = types.len();
    // Per type: m allocation variables, then payment split into p+ and p-.
    let per = m + 2;
    let nv = nt * per;
    let xi = |t: usize, j: usize| t * per + j;
    let pp = |t: usize| t * per + m;
    let pm = |t: usize| t * per + m + 1;
    let mut c = vec![S::zero(); nv];
    for (t, (_, p)) in types.iter().enumerate() {
        c[pp(t)] = p.clone();
        c[pm(t)] = -p.clone();
    }
    let mut a: Vec<Vec<S>> = Vec::new();
    let mut b: Vec<S> = Vec::new();
    let utility_row = |row: &mut Vec<S>, t: usize, report: usize, sign: S| {
        let v = &types[t].0[0];
        for j in 0..m {
            row[xi(report, j)] = row[xi(report, j)].clone() + sign.clone() * v[j].clone();
        }
        row[pp(report)] = row[pp(report)].clone() - sign.clone();
        row[pm(report)] = row[pm(report)].clone() + sign;
    };
    for t in 0..nt {
        // IR: -u(t, t) <= 0
        let mut row = vec![S::zero(); nv];
        utility_row(&mut row, t, t, -S::one());
        a.push(row);
        b.push(S::zero());
        // IC: u(t, t') - u(t, t) <= 0
        for t2 in 0..nt {
            if t2 == t {
                continue;
            }
            let mut row = vec![S::zero(); nv];
            utility_row(&mut row, t, t, -S::one());
            utility_row(&mut row, t, t2, S::one());
            a.push(row);
            b.push(S::zero());
        }
        if inst.class == ValuationClass::UnitDemand {
            let mut row = vec![S::zero(); nv];
            for j in 0..m {
                row[xi(t, j)] = S::one();
            }
            a.push(row);
            b.push(S::one());
        } else {
            for j in 0..m {
                let mut row = vec![S::zero(); nv];
                row[xi(t, j)] = S::one();
                a.push(row);
                b.push(S::one());
            }
        }
    }
    let sol = simplex_max(&c, &a, &b)?;
    Ok(SingleBuyerLp { duality_gap: sol.duality_gap(), revenue: sol.objective, types: nt })
}
