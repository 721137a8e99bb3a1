use serde::Serialize;

use crate::dist_core::DiscretePmf;
use crate::scalar::Scalar;

/// Per support point: value, `Pr[x >= v]`, raw and ironed virtual values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VirtualValueTable<S> {
    pub values: Vec<S>,
    pub tails: Vec<S>,
    pub raw: Vec<S>,
    pub ironed: Vec<S>,
}

impl<S: Scalar> VirtualValueTable<S> {
    /// Ironed virtual value of a bid projected down onto the support;
    /// `None` for bids below the support.
    pub fn ironed_at(&self, bid: &S) -> Option<&S> {
        let idx = self.values.partition_point(|x| x <= bid);
        idx.checked_sub(1).map(|l| &self.ironed[l])
    }
}

/// Raw discrete virtual values are slopes of the revenue curve
/// `R(Q_l) = v_l Q_l` between neighbouring support points; ironed ones are
/// slopes of its least concave majorant.
pub fn ironed_virtuals<S: Scalar>(d: &DiscretePmf<S>) -> VirtualValueTable<S> {
    let k = d.len();
    // Points by increasing quantile: origin, then values from the top down.
    let mut pts: Vec<(S, S)> = vec![(S::zero(), S::zero())];
    for l in (0..k).rev() {
        let q = d.tails()[l].clone();
        pts.push((q.clone(), d.values()[l].clone() * q));
    }
    let slope = |a: &(S, S), b: &(S, S)| (b.1.clone() - a.1.clone()) / (b.0.clone() - a.0.clone());

    let mut raw = vec![S::zero(); k];
    for l in 0..k {
        // Atom l spans pts[k - l - 1] .. pts[k - l].
        raw[l] = slope(&pts[k - l - 1], &pts[k - l]);
    }

    let mut hull: Vec<usize> = Vec::with_capacity(pts.len());
    for idx in 0..pts.len() {
        while hull.len() >= 2 {
            let a = &pts[hull[hull.len() - 2]];
            let b = &pts[hull[hull.len() - 1]];
            let c = &pts[idx];
            // Drop b when it lies on or below the chord a-c.
            let cross = (b.0.clone() - a.0.clone()) * (c.1.clone() - a.1.clone())
                - (b.1.clone() - a.1.clone()) * (c.0.clone() - a.0.clone());
            if cross >= S::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(idx);
    }

    let mut ironed = vec![S::zero(); k];
    for w in hull.windows(2) {
        let s = slope(&pts[w[0]], &pts[w[1]]);
        for p in w[0] + 1..=w[1] {
            ironed[k - p] = s.clone();
        }
    }
    VirtualValueTable { values: d.values().to_vec(), tails: d.tails().to_vec(), raw, ironed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn two_atoms_one_to_three() {
        let d = DiscretePmf::new(vec![r(1, 1), r(3, 1)], vec![r(1, 2), r(1, 2)]).unwrap();
        let t = ironed_virtuals(&d);
        assert_eq!(t.raw, vec![r(-1, 1), r(3, 1)]);
        assert_eq!(t.ironed, t.raw);
    }

    #[test]
    fn irons_a_dip() {
        // Values 1, 2, 10 with masses .5, .25, .25: phi = (0, -6, 10) raw.
        let d = DiscretePmf::new(vec![r(1, 1), r(2, 1), r(10, 1)], vec![r(1, 2), r(1, 4), r(1, 4)]).unwrap();
        let t = ironed_virtuals(&d);
        assert_eq!(t.raw, vec![r(0, 1), r(-6, 1), r(10, 1)]);
        // Hull from (1/4, 5/2) to (1, 1) has slope -2 over both lower atoms.
        assert_eq!(t.ironed, vec![r(-2, 1), r(-2, 1), r(10, 1)]);
        // Mass-weighted ironed values still average to the mean of raw ones.
        let raw_mean = t.raw.iter().zip(d.probs()).fold(r(0, 1), |a, (x, p)| a + x * p);
        let ironed_mean = t.ironed.iter().zip(d.probs()).fold(r(0, 1), |a, (x, p)| a + x * p);
        assert_eq!(raw_mean, ironed_mean);
    }

    #[test]
    fn bids_project_down() {
        let d = DiscretePmf::new(vec![1.0, 3.0], vec![0.5, 0.5]).unwrap();
        let t = ironed_virtuals(&d);
        assert_eq!(t.ironed_at(&2.9), Some(&-1.0));
        assert_eq!(t.ironed_at(&0.5), None);
    }
}
