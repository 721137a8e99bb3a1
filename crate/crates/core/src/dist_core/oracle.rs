use serde::Serialize;

use super::{Answer, Marginal};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct QueryCounts {
    pub value: u64,
    pub quantile: u64,
}

impl std::ops::AddAssign for QueryCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.value += rhs.value;
        self.quantile += rhs.quantile;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Query<S> {
    Value(S),
    Quantile(S),
}

/// The two query types a mechanism may ask about one marginal.
pub trait Oracle<S: Scalar> {
    fn value_query(&mut self, v: &S) -> S;
    fn quantile_query(&mut self, q: &S) -> Result<Answer<S>>;
    fn counts(&self) -> QueryCounts;
    /// Queries issued so far, in order.
    fn log(&self) -> &[Query<S>];
}

fn check_quantile<S: Scalar>(q: &S) -> Result<()> {
    if *q < S::zero() || *q > S::one() {
        return Err(Error::InvalidQuery(format!("quantile {q} outside [0, 1]")));
    }
    Ok(())
}

/// Counts and logs every query against a wrapped distribution.
pub struct QueryOracle<'a, S: Scalar, M: Marginal<S> + ?Sized> {
    target: &'a M,
    counts: QueryCounts,
    log: Vec<Query<S>>,
}

impl<'a, S: Scalar, M: Marginal<S> + ?Sized> QueryOracle<'a, S, M> {
    pub fn new(target: &'a M) -> Self {
        QueryOracle { target, counts: QueryCounts::default(), log: Vec::new() }
    }
}

impl<S: Scalar, M: Marginal<S> + ?Sized> Oracle<S> for QueryOracle<'_, S, M> {
    fn value_query(&mut self, v: &S) -> S {
        self.counts.value += 1;
        self.log.push(Query::Value(v.clone()));
        self.target.tail(v)
    }

    fn quantile_query(&mut self, q: &S) -> Result<Answer<S>> {
        check_quantile(q)?;
        self.counts.quantile += 1;
        self.log.push(Query::Quantile(q.clone()));
        Ok(self.target.quantile(q))
    }

    fn counts(&self) -> QueryCounts {
        self.counts
    }

    fn log(&self) -> &[Query<S>] {
        &self.log
    }
}

/// Answers with constants and records what was asked. Comparing its log
/// with a real oracle's log shows whether queries depend on answers.
pub struct StubOracle<S> {
    value_answer: S,
    quantile_answer: S,
    counts: QueryCounts,
    log: Vec<Query<S>>,
}

impl<S: Scalar> StubOracle<S> {
    pub fn new(value_answer: S, quantile_answer: S) -> Self {
        StubOracle { value_answer, quantile_answer, counts: QueryCounts::default(), log: Vec::new() }
    }
}

impl<S: Scalar> Oracle<S> for StubOracle<S> {
    fn value_query(&mut self, v: &S) -> S {
        self.counts.value += 1;
        self.log.push(Query::Value(v.clone()));
        self.value_answer.clone()
    }

    fn quantile_query(&mut self, q: &S) -> Result<Answer<S>> {
        check_quantile(q)?;
        self.counts.quantile += 1;
        self.log.push(Query::Quantile(q.clone()));
        Ok(Answer::Finite(self.quantile_answer.clone()))
    }

    fn counts(&self) -> QueryCounts {
        self.counts
    }

    fn log(&self) -> &[Query<S>] {
        &self.log
    }
}
