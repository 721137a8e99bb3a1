use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Inner, MechanismSpec};
use crate::dist_core::{Profile, ValuationClass};
use crate::error::Result;
use crate::myerson::{Mechanism, Mrs, Outcome};
use crate::query_schemes::DiscretizedPrior;
use crate::scalar::Scalar;
use crate::simple_mechs::{build_copies, Bvcg, CopiesOrder, PostedPrices, SeparateMyerson, SequentialCopies};

pub type Branch<S> = (S, Box<dyn Mechanism<S>>);

/// A query mechanism after its query phase: the simple mechanism tuned to
/// `D'`, run on the players' reported values.
pub struct QueryMechanism<S: Scalar> {
    pub spec: MechanismSpec<S>,
    pub prior: DiscretizedPrior<S>,
    pub inner: Inner,
    branches: Vec<Branch<S>>,
    chosen: usize,
}

fn single<S: Scalar>(inner: Inner, class: ValuationClass, prior: &DiscretizedPrior<S>) -> Result<Box<dyn Mechanism<S>>> {
    let d = &prior.marginals;
    Ok(match inner {
        Inner::Myerson => Box::new(Mrs::new(&d.iter().map(|row| row[0].clone()).collect::<Vec<_>>())),
        Inner::UnitDemand => {
            let cp = build_copies(&prior.instance(class)?)?;
            Box::new(SequentialCopies { prices: PostedPrices::from_copies(&cp)?, order: CopiesOrder::Grouped })
        }
        Inner::Bvcg => Box::new(Bvcg { fee_priors: d.clone() }),
        Inner::SeparateMyerson => Box::new(SeparateMyerson::new(d)),
        Inner::Mixture => unreachable!("mixtures are split into branches"),
    })
}

impl<S: Scalar> QueryMechanism<S> {
    pub fn build(spec: &MechanismSpec<S>, class: ValuationClass, prior: DiscretizedPrior<S>) -> Result<Self> {
        let n = prior.marginals.len();
        let m = prior.marginals.first().map_or(0, |r| r.len());
        let inner = spec.derive(class, n, m)?.inner;
        let branches = match inner {
            Inner::Mixture => vec![
                (S::from_ratio(1, 4), single(Inner::Bvcg, class, &prior)?),
                (S::from_ratio(3, 4), single(Inner::SeparateMyerson, class, &prior)?),
            ],
            other => vec![(S::one(), single(other, class, &prior)?)],
        };
        // The mixture coin is drawn once from the spec's seed.
        let chosen = if branches.len() > 1 {
            let u: f64 = ChaCha8Rng::seed_from_u64(spec.mix_seed).gen();
            usize::from(u >= 0.25)
        } else {
            0
        };
        Ok(QueryMechanism { spec: spec.clone(), prior, inner, branches, chosen })
    }

    /// Weighted pure mechanisms; revenue is their weighted sum.
    pub fn branches(&self) -> &[Branch<S>] {
        &self.branches
    }

    pub fn chosen_branch(&self) -> usize {
        self.chosen
    }

    pub fn run_auction(&self, bids: &Profile<S>) -> Outcome<S> {
        self.branches[self.chosen].1.outcome(bids)
    }
}

impl<S: Scalar> Mechanism<S> for QueryMechanism<S> {
    fn outcome(&self, bids: &Profile<S>) -> Outcome<S> {
        self.run_auction(bids)
    }
}
