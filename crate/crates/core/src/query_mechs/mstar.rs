use crate::dist_core::{AuctionInstance, DiscretePmf};
use crate::error::{Error, Result};
use crate::myerson::{Mrs, ENUMERATION_CAP};
use crate::query_schemes::resample_kernel;
use crate::scalar::Scalar;

/// Exact revenue on `I'` of the mechanism that resamples each `v_i ~ D_i`
/// from the reported `v'_i`, runs Myerson's auction for `D` on `v`, and
/// charges the winner's threshold only if it does not exceed `v'_i`.
/// It is DSIC for `I'`, so its revenue lower-bounds `OPT(I')`.
pub fn m_star_revenue<S: Scalar>(
    source: &AuctionInstance<DiscretePmf<S>>,
    target: &AuctionInstance<DiscretePmf<S>>,
) -> Result<S> {
    if source.m != 1 || target.m != 1 || source.n != target.n {
        return Err(Error::InvalidParameter("M* needs matching single-item instances".into()));
    }
    let d: Vec<DiscretePmf<S>> = source.prior.iter().map(|r| r[0].clone()).collect();
    let dp: Vec<DiscretePmf<S>> = target.prior.iter().map(|r| r[0].clone()).collect();
    let mrs = Mrs::new(&d);
    // Joint law of (v', v) per player.
    let mut joints: Vec<Vec<(S, S, S)>> = Vec::with_capacity(d.len());
    for (src, tgt) in d.iter().zip(&dp) {
        let kernel = resample_kernel(src, tgt)?;
        let mut pairs = Vec::new();
        for (l, row) in kernel.iter().enumerate() {
            for (a, p) in row {
                pairs.push((tgt.values()[l].clone(), src.values()[*a].clone(), tgt.probs()[l].clone() * p.clone()));
            }
        }
        joints.push(pairs);
    }
    let total: u128 = joints.iter().fold(1u128, |a, j| a.saturating_mul(j.len() as u128));
    if total > ENUMERATION_CAP {
        return Err(Error::TooLarge { profiles: total, cap: ENUMERATION_CAP });
    }
    let n = joints.len();
    let mut idx = vec![0usize; n];
    let mut revenue = S::zero();
    loop {
        let v: Vec<S> = (0..n).map(|i| joints[i][idx[i]].1.clone()).collect();
        if let Some((w, price)) = mrs.run(&v) {
            if price <= joints[w][idx[w]].0 {
                let p = (0..n).fold(S::one(), |a, i| a * joints[i][idx[i]].2.clone());
                revenue = revenue + p * price;
            }
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(revenue);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < joints[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist_core::ValuationClass;
    use crate::myerson::optimal_revenue_single_item;
    use crate::query_schemes::{discretize_instance, GridSpec};
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn point_masses_give_opt() {
        let d = DiscretePmf::point_mass(r(3, 1));
        let inst = AuctionInstance::new(ValuationClass::SingleItem, vec![vec![d.clone()], vec![d]]).unwrap();
        assert_eq!(m_star_revenue(&inst, &inst).unwrap(), optimal_revenue_single_item(&inst).unwrap());
    }

    #[test]
    fn bounded_by_myerson_on_the_discretized_prior() {
        let d = DiscretePmf::new(vec![r(1, 1), r(2, 1), r(5, 1), r(9, 1)], vec![r(2, 5), r(1, 5), r(1, 5), r(1, 5)]).unwrap();
        let inst = AuctionInstance::new(ValuationClass::SingleItem, vec![vec![d]]).unwrap();
        let disc = discretize_instance(&inst, &GridSpec::Quantile { eps1: r(1, 8), delta: r(1, 2) }).unwrap();
        let ip = disc.instance(ValuationClass::SingleItem).unwrap();
        let star = m_star_revenue(&inst, &ip).unwrap();
        assert!(star <= optimal_revenue_single_item(&ip).unwrap());
        assert!(star > r(0, 1));
    }
}
