use crate::dist_core::{AuctionInstance, DiscretePmf, ValuationClass};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `n x m` prior that is the point mass at 1 everywhere except cell
/// `(i_star, j_star)` (0-based), which gets `d` when given.
pub fn embed_multi_item<S: Scalar>(
    class: ValuationClass,
    n: usize,
    m: usize,
    i_star: usize,
    j_star: usize,
    d: Option<&DiscretePmf<S>>,
) -> Result<AuctionInstance<DiscretePmf<S>>> {
    if i_star >= n || j_star >= m {
        return Err(Error::InvalidParameter(format!("cell ({i_star}, {j_star}) outside {n} x {m}")));
    }
    let one = DiscretePmf::point_mass(S::one());
    let prior = (0..n)
        .map(|i| {
            (0..m)
                .map(|j| match d {
                    Some(d) if i == i_star && j == j_star => d.clone(),
                    _ => one.clone(),
                })
                .collect()
        })
        .collect();
    AuctionInstance::new(class, prior)
}
