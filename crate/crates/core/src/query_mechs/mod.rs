//! End-to-end query mechanisms: a counted, non-adaptive query phase that
//! builds `D'`, then a simple mechanism tuned to `D'` run on true bids.

mod auction;
mod bound;
mod mstar;
mod phase;
mod spec;

pub use auction::{Branch, QueryMechanism};
pub use bound::{exact_mechanism_revenue, learn_prior, mechanism_revenue_bound_check, BoundReport};
pub use mstar::m_star_revenue;
pub use phase::{draw_samples, query_phase_on, query_trace, run_query_phase, run_sample_phase};
pub use spec::{Derived, Inner, MechanismKind, MechanismSpec, TailFunction};
