use crate::dist_core::{Answer, Oracle, Query, QueryCounts};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Answers queries from `t` samples: the quantile query at `q > 0` returns
/// the `ceil(t q)`-th largest sample.
pub struct EmpiricalOracle<S> {
    descending: Vec<S>,
    counts: QueryCounts,
    log: Vec<Query<S>>,
}

impl<S: Scalar> EmpiricalOracle<S> {
    pub fn new(mut samples: Vec<S>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("empirical oracle needs at least one sample".into()));
        }
        if samples.iter().any(|x| x.partial_cmp(x).is_none()) {
            return Err(Error::InvalidParameter("NaN sample".into()));
        }
        samples.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(EmpiricalOracle { descending: samples, counts: QueryCounts::default(), log: Vec::new() })
    }

    pub fn sample_count(&self) -> usize {
        self.descending.len()
    }
}

impl<S: Scalar> Oracle<S> for EmpiricalOracle<S> {
    fn value_query(&mut self, v: &S) -> S {
        self.counts.value += 1;
        self.log.push(Query::Value(v.clone()));
        let at_least = self.descending.partition_point(|x| x >= v);
        S::int(at_least as u64) / S::int(self.descending.len() as u64)
    }

    fn quantile_query(&mut self, q: &S) -> Result<Answer<S>> {
        if *q < S::zero() || *q > S::one() {
            return Err(Error::InvalidQuery(format!("quantile {q} outside [0, 1]")));
        }
        self.counts.quantile += 1;
        self.log.push(Query::Quantile(q.clone()));
        if q.is_zero() {
            return Ok(Answer::PosInf);
        }
        let t = self.descending.len() as u64;
        let rank = (q.clone() * S::int(t)).ceil_u64().clamp(1, t);
        Ok(Answer::Finite(self.descending[(rank - 1) as usize].clone()))
    }

    fn counts(&self) -> QueryCounts {
        self.counts
    }

    fn log(&self) -> &[Query<S>] {
        &self.log
    }
}
