use super::irregular::HardFamilyIrregular;
use crate::dist_core::{AuctionInstance, Query, ValuationClass};
use crate::error::Result;
use crate::query_mechs::{mechanism_revenue_bound_check, query_trace, MechanismSpec};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct PickReport<S> {
    pub s: usize,
    pub t: usize,
    /// Queries that landed in the chosen hidden intervals.
    pub queries_in_pair: usize,
    /// Every interval pair was queried, so the pigeonhole step fails.
    pub budget_sufficient: bool,
    pub z: u32,
    pub rev: S,
    pub opt: S,
    pub ratio: S,
    /// `Rev / OPT` for each member, in `z` order.
    pub ratios: Vec<S>,
}

/// Chooses the least-queried pair `(s, t)` of value and quantile intervals,
/// then the member the mechanism does worst on. `revenue(family, z)` is the
/// mechanism's exact revenue on member `z`.
pub fn adversarial_pick<S: Scalar, F>(c: S, h: S, queries: &[Query<S>], mut revenue: F) -> Result<PickReport<S>>
where
    F: FnMut(&HardFamilyIrregular<S>, u32) -> Result<S>,
{
    let probe = HardFamilyIrregular::new(c.clone(), h.clone(), None)?;
    let k = probe.k;
    let mut cv = vec![0usize; k];
    let mut cq = vec![0usize; k];
    for query in queries {
        match query {
            Query::Value(v) => {
                if let Some(s) = (0..k).find(|&s| *v > probe.u[s] && *v < probe.u[s + 1]) {
                    cv[s] += 1;
                }
            }
            Query::Quantile(q) => {
                if let Some(t) = (0..k).find(|&t| *q > probe.q[t] && *q < probe.q[t + 1]) {
                    cq[t] += 1;
                }
            }
        }
    }
    let (s, t) = (0..k)
        .flat_map(|s| (0..k).map(move |t| (s, t)))
        .min_by_key(|&(s, t)| cv[s] + cq[t])
        .expect("k >= 1");
    let family = HardFamilyIrregular::new(c, h, Some((s, t)))?;
    let mut ratios = Vec::with_capacity(family.members.len());
    let mut worst: Option<(u32, S, S, S)> = None;
    for z in 1..=family.z_count() {
        let rev = revenue(&family, z)?;
        let opt = family.opt_closed_form(z);
        let ratio = rev.clone() / opt.clone();
        ratios.push(ratio.clone());
        if worst.as_ref().map_or(true, |w| ratio < w.3) {
            worst = Some((z, rev, opt, ratio));
        }
    }
    let (z, rev, opt, ratio) = worst.expect("family is non-empty");
    let queries_in_pair = cv[s] + cq[t];
    Ok(PickReport { s, t, queries_in_pair, budget_sufficient: queries_in_pair > 0, z, rev, opt, ratio, ratios })
}

/// `adversarial_pick` against a single-item query mechanism, using its own
/// (non-adaptive) query list and exact revenue.
pub fn pick_against<S: Scalar>(spec: &MechanismSpec<S>, c: S, h: S) -> Result<PickReport<S>> {
    let probe = HardFamilyIrregular::new(c.clone(), h.clone(), None)?;
    let single = |d: &crate::dist_core::DiscretePmf<S>| AuctionInstance::new(ValuationClass::SingleItem, vec![vec![d.clone()]]);
    let trace = query_trace(spec, &single(probe.member(1))?)?;
    let queries: Vec<Query<S>> = trace.into_iter().flatten().flatten().collect();
    adversarial_pick(c, h, &queries, |f, z| Ok(mechanism_revenue_bound_check(spec, &single(f.member(z))?)?.rev))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::smallest_admissible_h;
    use crate::query_mechs::MechanismKind;
    use crate::scalar::Rational;

    #[test]
    fn fixed_price_without_queries_loses() {
        let c = Rational::int(2);
        let h = smallest_admissible_h(&c);
        // Best response to the common posterior: post (4c)^2 u_s.
        let rep = adversarial_pick(c.clone(), h, &[], |f, z| {
            let p = Rational::int(64) * f.u[f.s].clone();
            let d = f.member(z);
            Ok(p.clone() * crate::dist_core::Marginal::tail(d, &p))
        })
        .unwrap();
        assert!(!rep.budget_sufficient);
        assert!(rep.ratio < Rational::from_ratio(1, 2));
    }

    #[test]
    fn starved_evm_loses() {
        let c = Rational::int(2);
        let h = smallest_admissible_h(&c);
        let spec = MechanismSpec::new(MechanismKind::Evm, Rational::int(2).powi(65) - Rational::int(1)).with_h(h.clone());
        let rep = pick_against(&spec, c, h).unwrap();
        assert!(!rep.budget_sufficient);
        assert!(rep.ratio < Rational::from_ratio(1, 2));
    }
}
