//! Hard instances for query mechanisms: families that agree on every query
//! outside a hidden interval yet have very different optimal revenue.

mod embed;
mod irregular;
mod pick;
mod regular_pair;

pub use embed::embed_multi_item;
pub use irregular::{answers_equal_outside, query_budget_constant, smallest_admissible_h, AgreementReport, HardFamilyIrregular};
pub use pick::{adversarial_pick, pick_against, PickReport};
pub use regular_pair::{gen_regular_pair, HardPairRegular, PAIR_DELTA};
