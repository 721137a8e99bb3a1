use rand::Rng;

use super::{Answer, Marginal};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Finite-support distribution, values sorted ascending with ties merged.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscretePmf<S> {
    values: Vec<S>,
    probs: Vec<S>,
    // tails[l] = Pr[x >= values[l]]
    tails: Vec<S>,
    cumulative_f64: Vec<f64>,
}

impl<S: Scalar> DiscretePmf<S> {
    /// Sorts, merges tied values and drops zero-mass points.
    pub fn new(values: Vec<S>, probs: Vec<S>) -> Result<Self> {
        if values.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} values but {} probabilities",
                values.len(),
                probs.len()
            )));
        }
        let mut total = S::zero();
        for p in &probs {
            if *p < S::zero() {
                return Err(Error::InvalidDistribution(format!("negative probability {p}")));
            }
            total = total + p.clone();
        }
        let slack = if S::EXACT { S::zero() } else { S::from_f64_lossy(1e-12) * S::int(probs.len().max(1) as u64) };
        if (total.clone() - S::one()).abs() > slack {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}, not 1")));
        }
        let mut pairs: Vec<(S, S)> = values.into_iter().zip(probs).collect();
        if pairs.iter().any(|(v, _)| v.partial_cmp(v).is_none()) {
            return Err(Error::InvalidDistribution("NaN support value".into()));
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut vs: Vec<S> = Vec::with_capacity(pairs.len());
        let mut ps: Vec<S> = Vec::with_capacity(pairs.len());
        for (v, p) in pairs {
            if p.is_zero() {
                continue;
            }
            if vs.last() == Some(&v) {
                let last = ps.pop().unwrap();
                ps.push(last + p);
            } else {
                vs.push(v);
                ps.push(p);
            }
        }
        if vs.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        Ok(Self::from_sorted(vs, ps))
    }

    fn from_sorted(values: Vec<S>, probs: Vec<S>) -> Self {
        let mut tails = vec![S::zero(); values.len()];
        let mut acc = S::zero();
        for l in (0..values.len()).rev() {
            acc = acc + probs[l].clone();
            tails[l] = acc.clone();
        }
        let mut cumulative_f64 = Vec::with_capacity(values.len());
        let mut c = 0.0;
        for p in &probs {
            c += p.to_f64_lossy();
            cumulative_f64.push(c);
        }
        DiscretePmf { values, probs, tails, cumulative_f64 }
    }

    pub fn point_mass(v: S) -> Self {
        Self::from_sorted(vec![v], vec![S::one()])
    }

    /// Equal mass on each listed value.
    pub fn uniform_on(values: Vec<S>) -> Result<Self> {
        let n = S::int(values.len() as u64);
        let probs = values.iter().map(|_| S::one() / n.clone()).collect();
        Self::new(values, probs)
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    /// `Pr[x >= values[l]]` for every support index.
    pub fn tails(&self) -> &[S] {
        &self.tails
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min_value(&self) -> &S {
        &self.values[0]
    }

    pub fn max_value(&self) -> &S {
        self.values.last().unwrap()
    }

    pub fn prob_of(&self, v: &S) -> S {
        match self.index_of(v) {
            Some(l) => self.probs[l].clone(),
            None => S::zero(),
        }
    }

    pub fn index_of(&self, v: &S) -> Option<usize> {
        let idx = self.first_at_least(v);
        (idx < self.values.len() && self.values[idx] == *v).then_some(idx)
    }

    /// Index of the largest support value `<= v`, if any.
    pub fn floor_index(&self, v: &S) -> Option<usize> {
        let idx = self.values.partition_point(|x| x <= v);
        idx.checked_sub(1)
    }

    fn first_at_least(&self, v: &S) -> usize {
        self.values.partition_point(|x| x < v)
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative_f64.last().unwrap();
        let u = rng.gen::<f64>() * total;
        self.cumulative_f64.partition_point(|c| *c <= u).min(self.values.len() - 1)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> DiscretePmf<T> {
        DiscretePmf::from_sorted(
            self.values.iter().map(&f).collect(),
            self.probs.iter().map(&f).collect(),
        )
    }

    pub fn to_f64(&self) -> DiscretePmf<f64> {
        self.map(|x| x.to_f64_lossy())
    }
}

impl<S: Scalar> Marginal<S> for DiscretePmf<S> {
    fn tail(&self, v: &S) -> S {
        let idx = self.first_at_least(v);
        if idx < self.tails.len() {
            self.tails[idx].clone()
        } else {
            S::zero()
        }
    }

    fn quantile(&self, q: &S) -> Answer<S> {
        if *q <= S::zero() {
            return Answer::PosInf;
        }
        let count = self.tails.partition_point(|t| q.approx_le(t));
        let l = count.saturating_sub(1);
        Answer::Finite(self.values[l].clone())
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> S {
        self.values[self.sample_index(rng)].clone()
    }

    fn mean(&self) -> S {
        self.values
            .iter()
            .zip(&self.probs)
            .fold(S::zero(), |acc, (v, p)| acc + v.clone() * p.clone())
    }

    fn mass_at(&self, v: &S) -> S {
        self.prob_of(v)
    }

    fn breakpoints(&self) -> Vec<S> {
        self.values.clone()
    }

    fn as_discrete(&self) -> Option<&DiscretePmf<S>> {
        Some(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn value_and_quantile_queries_on_two_atoms() {
        let d = DiscretePmf::new(vec![r(1, 1), r(3, 1)], vec![r(1, 2), r(1, 2)]).unwrap();
        assert_eq!(d.tail(&r(2, 1)), r(1, 2));
        assert_eq!(d.tail(&r(1, 1)), r(1, 1));
        assert_eq!(d.tail(&r(4, 1)), r(0, 1));
        assert_eq!(d.quantile(&r(1, 2)), Answer::Finite(r(3, 1)));
        assert_eq!(d.quantile(&r(3, 5)), Answer::Finite(r(1, 1)));
        assert_eq!(d.quantile(&r(1, 1)), Answer::Finite(r(1, 1)));
        assert_eq!(d.quantile(&r(0, 1)), Answer::PosInf);
    }

    #[test]
    fn ties_merge_and_zero_mass_drops() {
        let d = DiscretePmf::new(
            vec![r(2, 1), r(1, 1), r(2, 1), r(5, 1)],
            vec![r(1, 4), r(1, 4), r(1, 2), r(0, 1)],
        )
        .unwrap();
        assert_eq!(d.values(), &[r(1, 1), r(2, 1)]);
        assert_eq!(d.probs(), &[r(1, 4), r(3, 4)]);
    }

    #[test]
    fn rejects_bad_mass() {
        assert!(DiscretePmf::new(vec![1.0, 2.0], vec![0.5, 0.6]).is_err());
        assert!(DiscretePmf::new(vec![1.0], vec![-1.0]).is_err());
        assert!(DiscretePmf::<f64>::new(vec![], vec![]).is_err());
    }

    #[test]
    fn sampling_matches_masses() {
        use rand::SeedableRng;
        let d = DiscretePmf::new(vec![1.0, 2.0, 3.0], vec![0.2, 0.5, 0.3]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut counts = [0usize; 3];
        for _ in 0..100_000 {
            counts[d.sample_index(&mut rng)] += 1;
        }
        for (c, p) in counts.iter().zip([0.2, 0.5, 0.3]) {
            assert!((*c as f64 / 1e5 - p).abs() < 0.01);
        }
    }
}
