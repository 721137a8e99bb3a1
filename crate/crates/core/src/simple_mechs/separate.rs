use crate::dist_core::{DiscretePmf, Profile};
use crate::myerson::{Mechanism, Mrs, Outcome};
use crate::scalar::Scalar;

/// An independent Myerson auction per item.
#[derive(Clone, Debug)]
pub struct SeparateMyerson<S> {
    per_item: Vec<Mrs<S>>,
}

impl<S: Scalar> SeparateMyerson<S> {
    /// `priors[i][j]` as in an instance.
    pub fn new(priors: &[Vec<DiscretePmf<S>>]) -> Self {
        let m = priors.first().map_or(0, |r| r.len());
        let per_item = (0..m)
            .map(|j| Mrs::new(&priors.iter().map(|row| row[j].clone()).collect::<Vec<_>>()))
            .collect();
        SeparateMyerson { per_item }
    }
}

impl<S: Scalar> Mechanism<S> for SeparateMyerson<S> {
    fn outcome(&self, bids: &Profile<S>) -> Outcome<S> {
        let n = bids.len();
        let mut out: Outcome<S> = Outcome::empty(n, self.per_item.len());
        for (j, mrs) in self.per_item.iter().enumerate() {
            let column: Vec<S> = bids.iter().map(|row| row[j].clone()).collect();
            if let Some((w, p)) = mrs.run(&column) {
                out.alloc[w][j] = true;
                out.payments[w] = out.payments[w].clone() + p;
            }
        }
        out
    }
}
