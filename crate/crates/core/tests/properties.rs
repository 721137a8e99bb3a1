use std::collections::BTreeMap;

use proptest::prelude::*;

use qauction::dist_core::{dominates, AuctionInstance, DiscretePmf, Marginal, ValuationClass};
use qauction::harness::exact_revenue;
use qauction::myerson::{optimal_revenue_single_item, Mechanism, ENUMERATION_CAP};
use qauction::query_mechs::{learn_prior, MechanismKind, MechanismSpec, QueryMechanism};
use qauction::query_schemes::{discretize_instance, resample_kernel, round_down_kernel, GridSpec, Kernel};
use qauction::simple_mechs::{build_copies, opt_copies};
use qauction::{Rational, Scalar};

fn r(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// Integer support in `[1, 40]` with small integer weights.
fn pmf() -> impl Strategy<Value = DiscretePmf<Rational>> {
    prop::collection::vec((1i64..=40, 1i64..=8), 1..=5).prop_map(|atoms| {
        let merged: BTreeMap<i64, i64> = atoms.into_iter().fold(BTreeMap::new(), |mut m, (v, w)| {
            *m.entry(v).or_insert(0) += w;
            m
        });
        let total: i64 = merged.values().sum();
        let (values, probs) = merged.into_iter().map(|(v, w)| (r(v, 1), r(w, total))).unzip();
        DiscretePmf::new(values, probs).unwrap()
    })
}

fn single(d: DiscretePmf<Rational>) -> AuctionInstance<DiscretePmf<Rational>> {
    AuctionInstance::new(ValuationClass::SingleItem, vec![vec![d]]).unwrap()
}

fn pushforward(source: &DiscretePmf<Rational>, kernel: &Kernel<Rational>, len: usize) -> Vec<Rational> {
    let mut out = vec![r(0, 1); len];
    for (a, row) in kernel.iter().enumerate() {
        for (b, p) in row {
            out[*b] = out[*b].clone() + source.probs()[a].clone() * p.clone();
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn value_grid_rounds_down(d in pmf(), den in 1i64..=8) {
        let grid = GridSpec::Value { h: r(40, 1), delta: r(1, den) };
        let out = discretize_instance(&single(d.clone()), &grid).unwrap();
        let dp = &out.marginals[0][0];
        prop_assert!(dominates(&d, dp));
        let points = grid.points().unwrap();
        prop_assert!(dp.values().iter().all(|v| points.contains(v)));
        // Tails agree exactly on the grid.
        for v in &points {
            prop_assert_eq!(dp.tail(v), d.tail(v));
        }
    }

    #[test]
    fn quantile_grid_rounds_down(d in pmf(), den in 2i64..=6, e in 2i64..=64) {
        let grid = GridSpec::Quantile { eps1: r(1, e), delta: r(1, den) };
        let out = discretize_instance(&single(d.clone()), &grid).unwrap();
        prop_assert!(dominates(&d, &out.marginals[0][0]));
        let uniform = GridSpec::QuantileUniform { eps1: r(1, e) };
        let out = discretize_instance(&single(d.clone()), &uniform).unwrap();
        prop_assert!(dominates(&d, &out.marginals[0][0]));
    }

    #[test]
    fn couplings_push_forward_exactly(d in pmf(), den in 1i64..=4) {
        let grid = GridSpec::Value { h: r(40, 1), delta: r(1, den) };
        let dp = discretize_instance(&single(d.clone()), &grid).unwrap().marginals[0][0].clone();
        let down = round_down_kernel(&d, &dp);
        prop_assert_eq!(pushforward(&d, &down, dp.len()), dp.probs().to_vec());
        // Each source atom only moves down.
        for (a, row) in down.iter().enumerate() {
            for (b, _) in row {
                prop_assert!(dp.values()[*b] <= d.values()[a]);
            }
        }
        let up = resample_kernel(&d, &dp).unwrap();
        prop_assert_eq!(pushforward(&dp, &up, d.len()), d.probs().to_vec());
    }

    #[test]
    fn optimal_auction_beats_any_common_price(a in pmf(), b in pmf()) {
        let inst = AuctionInstance::new(ValuationClass::SingleItem, vec![vec![a.clone()], vec![b.clone()]]).unwrap();
        let opt = optimal_revenue_single_item(&inst).unwrap();
        for p in a.values().iter().chain(b.values()) {
            let sold = r(1, 1) - (r(1, 1) - a.tail(p)) * (r(1, 1) - b.tail(p));
            prop_assert!(opt >= p.clone() * sold);
        }
        prop_assert!(opt <= a.mean() + b.mean());
    }

    #[test]
    fn copies_with_one_buyer_and_item_is_myerson(d in pmf()) {
        let ud = AuctionInstance::new(ValuationClass::UnitDemand, vec![vec![d.clone()]]).unwrap();
        let opt = opt_copies(&build_copies(&ud).unwrap()).unwrap();
        prop_assert_eq!(opt, optimal_revenue_single_item(&single(d)).unwrap());
    }

    #[test]
    fn mechanism_outcomes_are_feasible_and_within_bids(
        a in pmf(), b in pmf(), c in pmf(),
        kind in prop::sample::select(vec![
            MechanismKind::Evud, MechanismKind::Equd, MechanismKind::Evbvcg, MechanismKind::Eqa, MechanismKind::Evim,
        ]),
    ) {
        let class = if matches!(kind, MechanismKind::Evud | MechanismKind::Equd) {
            ValuationClass::UnitDemand
        } else {
            ValuationClass::Additive
        };
        let inst = AuctionInstance::new(class, vec![vec![a, b], vec![c.clone(), c]]).unwrap();
        let spec = MechanismSpec::new(kind, r(1, 2)).with_h(r(40, 1));
        let qm = QueryMechanism::build(&spec, class, learn_prior(&spec, &inst).unwrap()).unwrap();
        inst.for_each_profile(ENUMERATION_CAP, |v, _| {
            let out = qm.outcome(v);
            assert!(out.is_feasible());
            for i in 0..inst.n {
                let got: Vec<&Rational> = (0..inst.m).filter(|j| out.alloc[i][*j]).map(|j| &v[i][j]).collect();
                let value = match class {
                    ValuationClass::UnitDemand => got.iter().map(|x| (*x).clone()).max().unwrap_or_else(|| r(0, 1)),
                    _ => got.iter().fold(r(0, 1), |s, x| s + (*x).clone()),
                };
                assert!(out.payments[i] <= value, "{kind}: pays more than value");
            }
        })
        .unwrap();
        let rev = exact_revenue(&qm, &inst, ENUMERATION_CAP).unwrap();
        prop_assert!(rev >= r(0, 1));
        prop_assert!(rev.to_f64_lossy().is_finite());
    }
}
