use super::{ironed_virtuals, Mechanism, Outcome, VirtualValueTable};
use crate::dist_core::{AuctionInstance, DiscretePmf, Profile};
use crate::error::Result;
use crate::scalar::Scalar;

/// Most profiles any exact enumeration will visit.
pub const ENUMERATION_CAP: u128 = 10_000_000;

/// Myerson's auction for one item, tuned to per-player discrete priors.
/// The highest nonnegative ironed virtual value wins, ties to the lowest
/// index, and the winner pays the smallest support value that still wins.
#[derive(Clone, Debug)]
pub struct Mrs<S> {
    tables: Vec<VirtualValueTable<S>>,
}

impl<S: Scalar> Mrs<S> {
    pub fn new(priors: &[DiscretePmf<S>]) -> Self {
        Mrs { tables: priors.iter().map(ironed_virtuals).collect() }
    }

    pub fn tables(&self) -> &[VirtualValueTable<S>] {
        &self.tables
    }

    /// Winner and payment for one item given one bid per player.
    pub fn run(&self, bids: &[S]) -> Option<(usize, S)> {
        let phis: Vec<Option<&S>> = self.tables.iter().zip(bids).map(|(t, b)| t.ironed_at(b)).collect();
        let mut winner: Option<usize> = None;
        for (i, phi) in phis.iter().enumerate() {
            let Some(phi) = phi else { continue };
            if **phi < S::zero() {
                continue;
            }
            match winner {
                Some(w) if phis[w].unwrap() >= *phi => {}
                _ => winner = Some(i),
            }
        }
        let w = winner?;
        let beats_others = |phi: &S| {
            *phi >= S::zero()
                && phis.iter().enumerate().all(|(j, other)| match other {
                    Some(o) if j < w => phi > o,
                    Some(o) if j > w => phi >= o,
                    _ => true,
                })
        };
        let t = &self.tables[w];
        let idx = t.ironed.iter().position(beats_others).expect("winner's own bid wins");
        Some((w, t.values[idx].clone()))
    }
}

impl<S: Scalar> Mechanism<S> for Mrs<S> {
    fn outcome(&self, bids: &Profile<S>) -> Outcome<S> {
        let n = bids.len();
        let column: Vec<S> = bids.iter().map(|row| row[0].clone()).collect();
        let mut out = Outcome::empty(n, 1);
        if let Some((w, p)) = self.run(&column) {
            out.alloc[w][0] = true;
            out.payments[w] = p;
        }
        out
    }
}

/// Exact optimal revenue for one item, by enumerating every value profile.
pub fn optimal_revenue_single_item<S: Scalar>(inst: &AuctionInstance<DiscretePmf<S>>) -> Result<S> {
    let priors: Vec<DiscretePmf<S>> = inst.prior.iter().map(|row| row[0].clone()).collect();
    let mech = Mrs::new(&priors);
    let single = AuctionInstance::new(crate::dist_core::ValuationClass::SingleItem, priors.into_iter().map(|d| vec![d]).collect())?;
    let mut total = S::zero();
    single.for_each_profile(ENUMERATION_CAP, |profile, p| {
        total = total.clone() + mech.outcome(profile).revenue() * p.clone();
    })?;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist_core::ValuationClass;
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn inst(ds: Vec<DiscretePmf<Rational>>) -> AuctionInstance<DiscretePmf<Rational>> {
        AuctionInstance::new(ValuationClass::SingleItem, ds.into_iter().map(|d| vec![d]).collect()).unwrap()
    }

    #[test]
    fn one_player_two_atoms() {
        let d = DiscretePmf::new(vec![r(1, 1), r(3, 1)], vec![r(1, 2), r(1, 2)]).unwrap();
        let m = Mrs::new(std::slice::from_ref(&d));
        assert_eq!(m.run(&[r(3, 1)]), Some((0, r(3, 1))));
        assert_eq!(m.run(&[r(1, 1)]), None);
        assert_eq!(optimal_revenue_single_item(&inst(vec![d])).unwrap(), r(3, 2));
    }

    #[test]
    fn ties_go_to_the_lower_index_at_the_tied_threshold() {
        let d = DiscretePmf::new(vec![r(1, 1), r(3, 1)], vec![r(1, 2), r(1, 2)]).unwrap();
        let m = Mrs::new(&[d.clone(), d]);
        assert_eq!(m.run(&[r(3, 1), r(3, 1)]), Some((0, r(3, 1))));
        assert_eq!(m.run(&[r(1, 1), r(3, 1)]), Some((1, r(3, 1))));
    }

    #[test]
    fn revenue_equals_expected_max_ironed_virtual_value() {
        // Independent check: E[max_i phi_i^+] by direct enumeration.
        let a = DiscretePmf::new(vec![r(1, 1), r(2, 1), r(10, 1)], vec![r(1, 2), r(1, 4), r(1, 4)]).unwrap();
        let b = DiscretePmf::new(vec![r(2, 1), r(5, 1)], vec![r(2, 3), r(1, 3)]).unwrap();
        let ta = ironed_virtuals(&a);
        let tb = ironed_virtuals(&b);
        let mut expect = r(0, 1);
        for x in 0..a.len() {
            for y in 0..b.len() {
                let best = ta.ironed[x].clone().max(tb.ironed[y].clone()).max(r(0, 1));
                expect += best * a.probs()[x].clone() * b.probs()[y].clone();
            }
        }
        assert_eq!(optimal_revenue_single_item(&inst(vec![a, b])).unwrap(), expect);
    }

    #[test]
    fn off_support_bids_pay_a_support_threshold() {
        let d = DiscretePmf::new(vec![r(1, 1), r(3, 1)], vec![r(1, 2), r(1, 2)]).unwrap();
        let m = Mrs::new(std::slice::from_ref(&d));
        assert_eq!(m.run(&[r(7, 2)]), Some((0, r(3, 1))));
        assert_eq!(m.run(&[r(1, 2)]), None);
    }
}
