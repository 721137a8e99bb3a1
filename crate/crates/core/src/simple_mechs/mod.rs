//! Simple mechanisms run on a (discretized) prior: posted prices through the
//! COPIES reduction for unit-demand buyers, and VCG with entry fees or
//! separate Myerson auctions for additive buyers.

mod bvcg;
mod copies;
mod posted;
mod separate;

pub use bvcg::{entry_fee_core, optimal_entry_fee, surplus_tail, Bvcg, CoreFee};
pub use copies::{build_copies, max_weight_matching, opt_copies, CopiesInstance};
pub use posted::{sequential_posted_price_copies, CopiesOrder, PostedPrices, SequentialCopies, UnitDemandPosted};
pub use separate::SeparateMyerson;
