use serde::Serialize;

use super::copies::{weights, CopiesInstance};
use super::max_weight_matching;
use crate::dist_core::{Marginal, Profile};
use crate::error::Result;
use crate::myerson::{Mechanism, Outcome, ENUMERATION_CAP};
use crate::scalar::Scalar;

/// Static per-copy prices. Copy (i, j) gets threshold
/// `tau_ij = E[w_ij] / 2`, where `w_ij` is its weight when it sits in the
/// max-weight matching (0 otherwise), and is priced at the smallest support
/// value whose ironed virtual value reaches `tau_ij`. Copies that never
/// matter (`tau_ij = 0`) are not offered.
#[derive(Clone, Debug, Serialize)]
pub struct PostedPrices<S> {
    pub prices: Vec<Vec<Option<S>>>,
    /// `Pr_{D'}[v >= p]` for each offered copy.
    pub accept: Vec<Vec<S>>,
}

impl<S: Scalar> PostedPrices<S> {
    pub fn from_copies(cp: &CopiesInstance<S>) -> Result<Self> {
        let mut contrib = vec![vec![S::zero(); cp.m]; cp.n];
        cp.priors.for_each_profile(ENUMERATION_CAP, |v, p| {
            let w = weights(cp, v);
            let (_, assign) = max_weight_matching(&w);
            for (i, a) in assign.iter().enumerate() {
                if let Some(j) = *a {
                    contrib[i][j] = contrib[i][j].clone() + w[i][j].clone() * p.clone();
                }
            }
        })?;
        let half = S::from_ratio(1, 2);
        let mut prices = vec![vec![None; cp.m]; cp.n];
        let mut accept = vec![vec![S::zero(); cp.m]; cp.n];
        for i in 0..cp.n {
            for j in 0..cp.m {
                let tau = contrib[i][j].clone() * half.clone();
                if tau <= S::zero() {
                    continue;
                }
                let t = &cp.tables[i][j];
                if let Some(l) = t.ironed.iter().position(|phi| *phi >= tau) {
                    let p = t.values[l].clone();
                    accept[i][j] = cp.priors.marginal(i, j).tail(&p);
                    prices[i][j] = Some(p);
                }
            }
        }
        Ok(PostedPrices { prices, accept })
    }

    fn n(&self) -> usize {
        self.prices.len()
    }

    fn m(&self) -> usize {
        self.prices.first().map_or(0, |r| r.len())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CopiesOrder {
    /// All of player 0's copies, then player 1's, and so on.
    Grouped,
    /// An adaptive adversary that, seeing which copies sold so far, picks the
    /// next copy minimizing a one-step lookahead estimate of the remaining
    /// revenue.
    GreedyAdversary,
}

struct State {
    player_sold: Vec<bool>,
    item_sold: Vec<bool>,
    done: Vec<Vec<bool>>,
}

impl State {
    fn open(&self, i: usize, j: usize) -> bool {
        !self.done[i][j] && !self.player_sold[i] && !self.item_sold[j]
    }
}

/// Sum of `p q` over copies still open, optionally with (i, j) sold.
fn residual<S: Scalar>(pp: &PostedPrices<S>, st: &State, skip: (usize, usize), sold: bool) -> S {
    let mut total = S::zero();
    for i in 0..pp.n() {
        for j in 0..pp.m() {
            if (i, j) == skip || !st.open(i, j) || (sold && (i == skip.0 || j == skip.1)) {
                continue;
            }
            if let Some(p) = &pp.prices[i][j] {
                total = total + p.clone() * pp.accept[i][j].clone();
            }
        }
    }
    total
}

fn next_copy<S: Scalar>(pp: &PostedPrices<S>, st: &State, order: CopiesOrder) -> Option<(usize, usize)> {
    let open = (0..pp.n())
        .flat_map(|i| (0..pp.m()).map(move |j| (i, j)))
        .filter(|&(i, j)| st.open(i, j) && pp.prices[i][j].is_some());
    match order {
        CopiesOrder::Grouped => open.into_iter().next(),
        CopiesOrder::GreedyAdversary => {
            let mut best: Option<((usize, usize), S)> = None;
            for e in open {
                let p = pp.prices[e.0][e.1].clone().unwrap();
                let q = pp.accept[e.0][e.1].clone();
                let value = q.clone() * (p + residual(pp, st, e, true)) + (S::one() - q) * residual(pp, st, e, false);
                if best.as_ref().map_or(true, |(_, b)| value < *b) {
                    best = Some((e, value));
                }
            }
            best.map(|b| b.0)
        }
    }
}

/// Offers each still-feasible copy its price in the given order; a copy
/// accepts iff its bid reaches the price.
pub fn sequential_posted_price_copies<S: Scalar>(pp: &PostedPrices<S>, bids: &Profile<S>, order: CopiesOrder) -> Outcome<S> {
    let (n, m) = (pp.n(), pp.m());
    let mut st = State { player_sold: vec![false; n], item_sold: vec![false; m], done: vec![vec![false; m]; n] };
    let mut out = Outcome::empty(n, m);
    while let Some((i, j)) = next_copy(pp, &st, order) {
        st.done[i][j] = true;
        let p = pp.prices[i][j].clone().unwrap();
        if bids[i][j] >= p {
            st.player_sold[i] = true;
            st.item_sold[j] = true;
            out.alloc[i][j] = true;
            out.payments[i] = p;
        }
    }
    out
}

/// COPIES-side sequential posted pricing as a mechanism.
#[derive(Clone, Debug)]
pub struct SequentialCopies<S> {
    pub prices: PostedPrices<S>,
    pub order: CopiesOrder,
}

impl<S: Scalar> Mechanism<S> for SequentialCopies<S> {
    fn outcome(&self, bids: &Profile<S>) -> Outcome<S> {
        sequential_posted_price_copies(&self.prices, bids, self.order)
    }
}

/// Unit-demand posted pricing: players arrive in index order and each takes
/// a utility-maximizing unsold item among those priced at or below their
/// bid (ties to the lower item index).
#[derive(Clone, Debug)]
pub struct UnitDemandPosted<S> {
    pub prices: PostedPrices<S>,
}

impl<S: Scalar> Mechanism<S> for UnitDemandPosted<S> {
    fn outcome(&self, bids: &Profile<S>) -> Outcome<S> {
        let (n, m) = (self.prices.n(), self.prices.m());
        let mut out = Outcome::empty(n, m);
        let mut item_sold = vec![false; m];
        for i in 0..n {
            let mut best: Option<(usize, S)> = None;
            for j in 0..m {
                let Some(p) = &self.prices.prices[i][j] else { continue };
                if item_sold[j] || bids[i][j] < *p {
                    continue;
                }
                let u = bids[i][j].clone() - p.clone();
                if best.as_ref().map_or(true, |(_, b)| u > *b) {
                    best = Some((j, u));
                }
            }
            if let Some((j, _)) = best {
                item_sold[j] = true;
                out.alloc[i][j] = true;
                out.payments[i] = self.prices.prices[i][j].clone().unwrap();
            }
        }
        out
    }
}
