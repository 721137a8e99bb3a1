use crate::dist_core::{AuctionInstance, DiscretePmf, ValuationClass};
use crate::error::Result;
use crate::myerson::{ironed_virtuals, VirtualValueTable, ENUMERATION_CAP};
use crate::scalar::Scalar;

/// One single-parameter agent per (player, item); feasible sets are the
/// matchings between players and items.
#[derive(Clone, Debug)]
pub struct CopiesInstance<S> {
    pub n: usize,
    pub m: usize,
    pub priors: AuctionInstance<DiscretePmf<S>>,
    pub tables: Vec<Vec<VirtualValueTable<S>>>,
}

impl<S: Scalar> CopiesInstance<S> {
    /// `max(phi_ij(v), 0)` for a bid on copy (i, j); zero below the support.
    pub fn weight(&self, i: usize, j: usize, v: &S) -> S {
        self.tables[i][j].ironed_at(v).map_or_else(S::zero, |phi| phi.max_of(&S::zero()))
    }
}

pub fn build_copies<S: Scalar>(inst: &AuctionInstance<DiscretePmf<S>>) -> Result<CopiesInstance<S>> {
    inst.require_class(&[ValuationClass::UnitDemand])?;
    let tables = inst.prior.iter().map(|row| row.iter().map(ironed_virtuals).collect()).collect();
    Ok(CopiesInstance { n: inst.n, m: inst.m, priors: inst.clone(), tables })
}

/// Maximum-weight matching by dynamic programming over sets of used items.
/// Returns the weight and each player's item. Zero weights stay unmatched
/// and ties keep the earliest choice.
pub fn max_weight_matching<S: Scalar>(w: &[Vec<S>]) -> (S, Vec<Option<usize>>) {
    let n = w.len();
    let m = w.first().map_or(0, |r| r.len());
    assert!(m < 20, "matching DP is exponential in the number of items");
    let full = 1usize << m;
    // best[i][mask]: best weight from players i.. with items in mask used.
    let mut best = vec![vec![S::zero(); full]; n + 1];
    let mut choice = vec![vec![None; full]; n];
    for i in (0..n).rev() {
        for mask in 0..full {
            let mut b = best[i + 1][mask].clone();
            let mut c = None;
            for j in 0..m {
                if mask & (1 << j) != 0 || w[i][j] <= S::zero() {
                    continue;
                }
                let cand = w[i][j].clone() + best[i + 1][mask | (1 << j)].clone();
                if cand > b {
                    b = cand;
                    c = Some(j);
                }
            }
            best[i][mask] = b;
            choice[i][mask] = c;
        }
    }
    let mut assign = vec![None; n];
    let mut mask = 0;
    for i in 0..n {
        assign[i] = choice[i][mask];
        if let Some(j) = assign[i] {
            mask |= 1 << j;
        }
    }
    (best[0][0].clone(), assign)
}

/// Expected max-weight matching of nonnegative ironed virtual values, the
/// optimal revenue of the COPIES setting.
pub fn opt_copies<S: Scalar>(cp: &CopiesInstance<S>) -> Result<S> {
    let mut total = S::zero();
    cp.priors.for_each_profile(ENUMERATION_CAP, |v, p| {
        let w = weights(cp, v);
        total = total.clone() + max_weight_matching(&w).0 * p.clone();
    })?;
    Ok(total)
}

pub(crate) fn weights<S: Scalar>(cp: &CopiesInstance<S>, v: &[Vec<S>]) -> Vec<Vec<S>> {
    (0..cp.n).map(|i| (0..cp.m).map(|j| cp.weight(i, j, &v[i][j])).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist_core::ValuationClass;
    use crate::myerson::optimal_revenue_single_item;
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn matching_brute_force_agrees() {
        let w = vec![vec![3.0, 2.0, 0.0], vec![3.0, 0.0, 1.0], vec![0.0, 4.0, 4.0]];
        let (best, assign) = max_weight_matching(&w);
        assert_eq!(best, 9.0);
        let mut used = [false; 3];
        let mut total = 0.0;
        for (i, a) in assign.iter().enumerate() {
            if let Some(j) = a {
                assert!(!used[*j]);
                used[*j] = true;
                total += w[i][*j];
            }
        }
        assert_eq!(total, best);
    }

    #[test]
    fn one_item_copies_match_myerson() {
        let d = DiscretePmf::new(vec![r(1, 1), r(3, 1)], vec![r(1, 2), r(1, 2)]).unwrap();
        let ud = AuctionInstance::new(ValuationClass::UnitDemand, vec![vec![d.clone()], vec![d.clone()]]).unwrap();
        let si = AuctionInstance::new(ValuationClass::SingleItem, vec![vec![d.clone()], vec![d]]).unwrap();
        let cp = build_copies(&ud).unwrap();
        assert_eq!(opt_copies(&cp).unwrap(), optimal_revenue_single_item(&si).unwrap());
        assert_eq!(opt_copies(&cp).unwrap(), r(9, 4));
    }

    #[test]
    fn rejects_other_classes() {
        let d = DiscretePmf::point_mass(1.0);
        let add = AuctionInstance::new(ValuationClass::Additive, vec![vec![d.clone(), d]]).unwrap();
        assert!(build_copies(&add).is_err());
    }
}
