use serde::Serialize;

use crate::dist_core::{DiscretePmf, Profile};
use crate::myerson::{optimal_posted_price, Mechanism, Outcome};
use crate::scalar::Scalar;

/// VCG for additive buyers with a per-player entry fee. Player i faces item
/// prices `beta_ij = max_{i' != i} b_i'j`, wins the items where they are
/// highest (ties to the lower index) and keeps them, paying the fee plus
/// those prices, iff the surplus over the prices reaches the fee. The fee is
/// optimal for `fee_priors[i]` given the other bids.
#[derive(Clone, Debug)]
pub struct Bvcg<S> {
    pub fee_priors: Vec<Vec<DiscretePmf<S>>>,
}

fn wins<S: Scalar>(i: usize, j: usize, v: &S, bids: &Profile<S>) -> bool {
    bids.iter().enumerate().all(|(k, row)| {
        if k < i {
            *v > row[j]
        } else if k > i {
            *v >= row[j]
        } else {
            true
        }
    })
}

fn beta<S: Scalar>(i: usize, j: usize, bids: &Profile<S>) -> S {
    bids.iter()
        .enumerate()
        .filter(|(k, _)| *k != i)
        .fold(S::zero(), |m, (_, row)| m.max_of(&row[j]))
}

/// Surplus over VCG prices and the VCG price bill, for own values `v`.
fn surplus_and_bill<S: Scalar>(i: usize, v: &[S], bids: &Profile<S>) -> (S, S, Vec<bool>) {
    let mut surplus = S::zero();
    let mut bill = S::zero();
    let mut won = vec![false; v.len()];
    for j in 0..v.len() {
        if wins(i, j, &v[j], bids) {
            let b = beta(i, j, bids);
            surplus = surplus + v[j].clone() - b.clone();
            bill = bill + b;
            won[j] = true;
        }
    }
    (surplus, bill, won)
}

/// Calls `f(values, probability)` for every value vector of one player.
fn for_each_own<S: Scalar>(prior: &[DiscretePmf<S>], mut f: impl FnMut(&[S], &S)) {
    let m = prior.len();
    let mut idx = vec![0usize; m];
    loop {
        let v: Vec<S> = (0..m).map(|j| prior[j].values()[idx[j]].clone()).collect();
        let p = (0..m).fold(S::one(), |a, j| a * prior[j].probs()[idx[j]].clone());
        f(&v, &p);
        let mut pos = m;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < prior[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Fee maximizing player i's expected payment `E[(e + bill) 1{surplus >= e}]`
/// over `prior`. Revenue is piecewise linear in `e` with breakpoints at
/// achievable surpluses, so those (and 0) are the only candidates.
pub fn optimal_entry_fee<S: Scalar>(i: usize, prior: &[DiscretePmf<S>], bids: &Profile<S>) -> S {
    let mut rows: Vec<(S, S, S)> = Vec::new();
    for_each_own(prior, |v, p| {
        let (s, bill, _) = surplus_and_bill(i, v, bids);
        rows.push((s, bill, p.clone()));
    });
    let mut cands: Vec<S> = rows.iter().map(|r| r.0.max_of(&S::zero())).collect();
    cands.push(S::zero());
    cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cands.dedup();
    let mut best = (S::zero(), S::zero() - S::one());
    for e in cands {
        let rev = rows
            .iter()
            .filter(|r| r.0 >= e)
            .fold(S::zero(), |acc, r| acc + (e.clone() + r.1.clone()) * r.2.clone());
        if rev > best.1 {
            best = (e, rev);
        }
    }
    best.0
}

impl<S: Scalar> Mechanism<S> for Bvcg<S> {
    fn outcome(&self, bids: &Profile<S>) -> Outcome<S> {
        let n = bids.len();
        let m = bids.first().map_or(0, |r| r.len());
        let mut out = Outcome::empty(n, m);
        for i in 0..n {
            let (surplus, bill, won) = surplus_and_bill(i, &bids[i], bids);
            let fee = optimal_entry_fee(i, &self.fee_priors[i], bids);
            if surplus >= fee {
                out.alloc[i] = won;
                out.payments[i] = fee + bill;
            }
        }
        out
    }
}

/// The explicit fee used to lower-bound the optimal one.
#[derive(Clone, Debug, Serialize)]
pub struct CoreFee<S> {
    /// `r_ij = max_{x >= beta_ij} x Pr[v_ij >= x]`
    pub r: Vec<S>,
    pub r_total: S,
    /// `max(0, sum_j E[c_ij] - 2 r_i)`
    pub e: S,
    /// `e / (1 + delta)`
    pub e_prime: S,
}

/// With `b_ij = (v_ij - (1+delta) beta_ij)^+` and `c_ij = b_ij 1{b_ij <= r_i}`,
/// the fee `e` is accepted under `D_i` with probability at least 1/2.
pub fn entry_fee_core<S: Scalar>(d_i: &[DiscretePmf<S>], beta: &[S], delta: &S) -> CoreFee<S> {
    let r: Vec<S> = d_i.iter().zip(beta).map(|(d, b)| optimal_posted_price(d, b).1).collect();
    let r_total = r.iter().fold(S::zero(), |a, x| a + x.clone());
    let scale = S::one() + delta.clone();
    let mut ec = S::zero();
    for (d, b) in d_i.iter().zip(beta) {
        let shifted = scale.clone() * b.clone();
        for (v, p) in d.values().iter().zip(d.probs()) {
            let bij = (v.clone() - shifted.clone()).max_of(&S::zero());
            if bij <= r_total {
                ec = ec + bij * p.clone();
            }
        }
    }
    let two = S::int(2);
    let e = (ec - two * r_total.clone()).max_of(&S::zero());
    let e_prime = e.clone() / scale;
    CoreFee { r, r_total, e, e_prime }
}

/// `Pr[sum_j (v_j - scale beta_j)^+ >= threshold]` under independent marginals.
pub fn surplus_tail<S: Scalar>(d_i: &[DiscretePmf<S>], beta: &[S], scale: &S, threshold: &S) -> S {
    let mut total = S::zero();
    for_each_own(d_i, |v, p| {
        let s = v
            .iter()
            .zip(beta)
            .fold(S::zero(), |a, (x, b)| a + (x.clone() - scale.clone() * b.clone()).max_of(&S::zero()));
        if s >= *threshold {
            total = total.clone() + p.clone();
        }
    });
    total
}
