use crate::dist_core::{Answer, DiscretePmf, Marginal, Query};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `base^e` for a real exponent; exact when `e` is a nonnegative integer.
fn pow_real<S: Scalar>(base: &S, e: &S) -> S {
    if e.floor_u64() as f64 == e.to_f64_lossy() && *e >= S::zero() {
        base.powi(e.floor_u64() as u32)
    } else {
        base.powf_lossy(e.to_f64_lossy())
    }
}

/// `ceil(4c)` single-player single-item priors that agree outside the value
/// interval `(u_s, u_{s+1})` and the quantile interval `(q_t, q_{t+1})`.
/// Member `z` (1-based) has atoms `1, u_s, (4c)^z u_s, u_{s+1}` with masses
/// `1 - q_{t+1}, delta, q_{t+1} - q_t - 2 delta, q_t + delta` and
/// `delta = 1/H`.
#[derive(Clone, Debug)]
pub struct HardFamilyIrregular<S> {
    pub c: S,
    pub h: S,
    pub k: usize,
    /// `u_0..=u_k`, with `u_k = H`.
    pub u: Vec<S>,
    /// `q_0..=q_k`, with `q_k = 1`.
    pub q: Vec<S>,
    pub s: usize,
    pub t: usize,
    pub delta: S,
    pub members: Vec<DiscretePmf<S>>,
}

/// `(8c)^(4c+2)`, the ratio between consecutive quantile endpoints.
fn quantile_step<S: Scalar>(c: &S) -> S {
    pow_real(&(S::int(8) * c.clone()), &(S::int(4) * c.clone() + S::int(2)))
}

/// `(4c)^(4c+2)`, the ratio between consecutive value endpoints.
fn value_step<S: Scalar>(c: &S) -> S {
    pow_real(&(S::int(4) * c.clone()), &(S::int(4) * c.clone() + S::int(2)))
}

/// Smallest `H` with `k >= 1`.
pub fn smallest_admissible_h<S: Scalar>(c: &S) -> S {
    quantile_step(c).powi(4)
}

/// The query-count constant `1 / (16 c (4c+2) log_c(8c))`.
pub fn query_budget_constant(c: f64) -> f64 {
    1.0 / (16.0 * c * (4.0 * c + 2.0) * (8.0 * c).ln() / c.ln())
}

impl<S: Scalar> HardFamilyIrregular<S> {
    /// Hidden pair `(s, t)`, or the midpoint pair when `None`.
    pub fn new(c: S, h: S, hidden: Option<(usize, usize)>) -> Result<Self> {
        if c <= S::one() {
            return Err(Error::InvalidParameter(format!("c = {c} must exceed 1")));
        }
        let qs = quantile_step(&c);
        // k = floor(log_{qs} H / 4), counted exactly.
        let mut k = 0usize;
        let mut reach = qs.powi(4);
        while reach <= h {
            k += 1;
            reach = reach * qs.powi(4);
        }
        if k == 0 {
            return Err(Error::InvalidParameter(format!(
                "H = {h} gives k = 0; need H >= {}",
                smallest_admissible_h(&c)
            )));
        }
        let vs = value_step(&c);
        let mut u = vec![h.clone(); k + 1];
        let mut q = vec![S::one(); k + 1];
        for i in (0..k).rev() {
            u[i] = u[i + 1].clone() / vs.clone();
            q[i] = q[i + 1].clone() / qs.clone();
        }
        let (s, t) = hidden.unwrap_or(((k - 1) / 2, (k - 1) / 2));
        if s >= k || t >= k {
            return Err(Error::InvalidParameter(format!("hidden pair ({s}, {t}) needs indices below k = {k}")));
        }
        let delta = S::one() / h.clone();
        let four_c = S::int(4) * c.clone();
        let z_max = four_c.ceil_u64() as u32;
        let masses = [
            S::one() - q[t + 1].clone(),
            delta.clone(),
            q[t + 1].clone() - q[t].clone() - S::int(2) * delta.clone(),
            q[t].clone() + delta.clone(),
        ];
        if masses.iter().any(|m| *m < S::zero()) {
            return Err(Error::InvalidParameter("H too small for the hidden quantile interval".into()));
        }
        let members = (1..=z_max)
            .map(|z| {
                let mid = four_c.powi(z) * u[s].clone();
                DiscretePmf::new(
                    vec![S::one(), u[s].clone(), mid, u[s + 1].clone()],
                    masses.to_vec(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HardFamilyIrregular { c, h, k, u, q, s, t, delta, members })
    }

    /// `z` runs over `1..=ceil(4c)`.
    pub fn member(&self, z: u32) -> &DiscretePmf<S> {
        &self.members[z as usize - 1]
    }

    pub fn z_count(&self) -> u32 {
        self.members.len() as u32
    }

    /// `(4c)^z u_s (q_{t+1} - delta)`.
    pub fn opt_closed_form(&self, z: u32) -> S {
        (S::int(4) * self.c.clone()).powi(z) * self.u[self.s].clone() * (self.q[self.t + 1].clone() - self.delta.clone())
    }

    /// Value strictly inside `(u_s, u_{s+1})`.
    pub fn value_hidden(&self, v: &S) -> bool {
        *v > self.u[self.s] && *v < self.u[self.s + 1]
    }

    /// Quantile strictly inside `(q_t, q_{t+1})`.
    pub fn quantile_hidden(&self, q: &S) -> bool {
        *q > self.q[self.t] && *q < self.q[self.t + 1]
    }

    /// Legal queries for the agreement check: `count` value and `count`
    /// quantile points spread over the legal ranges, plus the endpoints.
    pub fn legal_grid(&self, count: usize) -> (Vec<S>, Vec<S>) {
        let (us, us1, h) = (&self.u[self.s], &self.u[self.s + 1], &self.h);
        let half = count / 2;
        let mut values = vec![S::one(), us.clone(), us1.clone(), h.clone()];
        // Log-spaced through [1, u_s] and [u_{s+1}, H], clamped after rounding.
        for (lo, hi) in [(S::one(), us.clone()), (us1.clone(), h.clone())] {
            let (a, b) = (lo.to_f64_lossy().ln(), hi.to_f64_lossy().ln());
            for i in 0..half {
                let x = (a + (b - a) * i as f64 / half as f64).exp();
                values.push(S::from_f64_lossy(x).max_of(&lo).min_of(&hi));
            }
        }
        let (qt, qt1) = (&self.q[self.t], &self.q[self.t + 1]);
        let mut quantiles = vec![S::zero(), qt.clone(), qt1.clone(), S::one()];
        let n = S::int(half as u64);
        for i in 0..half {
            let f = S::int(i as u64) / n.clone();
            quantiles.push(qt.clone() * f.clone());
            quantiles.push(qt1.clone() + (S::one() - qt1.clone()) * f);
        }
        (values, quantiles)
    }
}

#[derive(Clone, Debug)]
pub struct AgreementReport<S> {
    /// Every query got the same answer from every member.
    pub equal: bool,
    /// Queries inside the hidden intervals.
    pub flagged: Vec<Query<S>>,
    /// Queries on which some members answered differently.
    pub differing: Vec<Query<S>>,
}

/// Evaluates every query on every member and compares the answers.
pub fn answers_equal_outside<S: Scalar>(
    family: &HardFamilyIrregular<S>,
    values: &[S],
    quantiles: &[S],
) -> Result<AgreementReport<S>> {
    let mut flagged = Vec::new();
    let mut differing = Vec::new();
    for v in values {
        if family.value_hidden(v) {
            flagged.push(Query::Value(v.clone()));
        }
        let first = family.members[0].tail(v);
        if family.members.iter().any(|d| d.tail(v) != first) {
            differing.push(Query::Value(v.clone()));
        }
    }
    for q in quantiles {
        if *q < S::zero() || *q > S::one() {
            return Err(Error::InvalidQuery(format!("quantile {q} outside [0, 1]")));
        }
        if family.quantile_hidden(q) {
            flagged.push(Query::Quantile(q.clone()));
        }
        let first: Answer<S> = family.members[0].quantile(q);
        if family.members.iter().any(|d| d.quantile(q) != first) {
            differing.push(Query::Quantile(q.clone()));
        }
    }
    Ok(AgreementReport { equal: differing.is_empty(), flagged, differing })
}
