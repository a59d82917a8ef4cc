mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use qbafx::attribution::{coalition_value_arguments, removal_aae, removal_rae};
use qbafx::{explain_all, solve_qe, Kind, Method, Qbaf, SolverConfig};

fn framework(max_args: usize, max_edges: usize) -> impl Strategy<Value = Qbaf> {
    (any::<u64>(), 1..=max_args)
        .prop_map(move |(seed, n)| random_qbaf(&mut rng(seed), n, max_edges))
}

fn convergent(max_args: usize, max_edges: usize) -> impl Strategy<Value = Qbaf> {
    (any::<u64>(), 1..=max_args)
        .prop_map(move |(seed, n)| random_convergent(&mut rng(seed), n, max_edges))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip(q in framework(10, 40)) {
        let back = Qbaf::from_json(&q.to_json()).unwrap();
        prop_assert_eq!(back, q);
    }

    #[test]
    fn restriction_keeps_only_internal_edges(q in framework(8, 30), mask in any::<u16>()) {
        let keep: BTreeSet<_> = q
            .arguments()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, a)| a.clone())
            .collect();
        let sub = q.restrict_arguments(&keep).unwrap();
        prop_assert_eq!(sub.num_arguments(), keep.len());
        for a in sub.arguments() {
            prop_assert_eq!(sub.base_score(a), q.base_score(a));
        }
        let expected: BTreeSet<_> = q
            .edges()
            .iter()
            .filter(|e| keep.contains(&e.source) && keep.contains(&e.target))
            .cloned()
            .collect();
        prop_assert_eq!(sub.edges(), &expected);
        sub.validate().unwrap();
    }

    #[test]
    fn edge_restriction_keeps_all_arguments(q in framework(8, 30), mask in any::<u32>()) {
        let keep: BTreeSet<_> = q
            .edges()
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << (i % 32)) != 0)
            .map(|(_, e)| e.clone())
            .collect();
        let sub = q.restrict_edges(&keep).unwrap();
        prop_assert_eq!(sub.base_scores(), q.base_scores());
        prop_assert_eq!(sub.edges(), &keep);
    }

    #[test]
    fn removal_matches_restriction(q in convergent(7, 14)) {
        let cfg = SolverConfig::default();
        let topic = q.arguments().next().unwrap().clone();
        let full: BTreeSet<_> = q.arguments().filter(|a| **a != topic).cloned().collect();
        let whole = coalition_value_arguments(&q, &cfg, &topic, &full).unwrap();
        let sigma = solve_qe(&q, &cfg).unwrap().strengths.get(&topic).unwrap();
        prop_assert!((whole - sigma).abs() < 1e-9);
        for beta in &full {
            let mut rest = full.clone();
            rest.remove(beta);
            let without = coalition_value_arguments(&q, &cfg, &topic, &rest).unwrap();
            let r = removal_aae(&q, &cfg, &topic, beta).unwrap();
            prop_assert!((r - (whole - without)).abs() < 1e-12);
        }
        for e in q.edges() {
            let r = removal_rae(&q, &cfg, &topic, e).unwrap();
            prop_assert!(r.is_finite());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_shapley_matches_permutation_oracle(q in convergent(7, 6)) {
        let cfg = SolverConfig::default();
        let topic = id("a0");
        for kind in [Kind::Arguments, Kind::Relations] {
            let players = match kind {
                Kind::Arguments => argument_targets(&q, &topic),
                Kind::Relations => edge_targets(&q),
            };
            let report = explain_all(&q, &cfg, &topic, kind, Method::ShapleyExact).unwrap();
            let oracle = permutation_oracle(&q, &cfg, &topic, &players);
            for (p, o) in players.iter().zip(&oracle) {
                prop_assert!((report.get(p).unwrap() - o).abs() < 1e-12, "{} {}", p, o);
            }
        }
    }

    #[test]
    fn exact_shapley_is_efficient(q in convergent(8, 12)) {
        let cfg = SolverConfig::default();
        let topic = id("a0");
        let gain = solve_qe(&q, &cfg).unwrap().strengths.get(&topic).unwrap()
            - q.base_score(&topic).unwrap();
        for kind in [Kind::Arguments, Kind::Relations] {
            let report = explain_all(&q, &cfg, &topic, kind, Method::ShapleyExact).unwrap();
            let total: f64 = report.entries.iter().map(|e| e.value).sum();
            prop_assert!((total - gain).abs() < 1e-9);
        }
    }
}
