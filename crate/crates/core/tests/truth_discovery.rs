mod common;

use std::collections::BTreeSet;

use common::*;
use qbafx::fixtures::{case_study, case_study_induced, CASE_STUDY_REPORTS_CSV};
use qbafx::truth::{parse_reports, ClaimLabels};
use qbafx::{solve_qe, Edge, SolverConfig};

fn rename(id: &str) -> String {
    case_study_claim_ids()
        .get(id)
        .cloned()
        .unwrap_or_else(|| id.to_owned())
}

#[test]
fn induced_matches_bundled_case_study() {
    let induced = case_study_induced();
    let bundled = case_study();
    let args: BTreeSet<String> = induced.arguments().map(|a| rename(a.as_str())).collect();
    let want: BTreeSet<String> = bundled.arguments().map(|a| a.to_string()).collect();
    assert_eq!(args, want);
    let edges: BTreeSet<Edge> = induced
        .edges()
        .iter()
        .map(|e| {
            Edge::new(
                id(&rename(e.source.as_str())),
                id(&rename(e.target.as_str())),
                e.polarity,
            )
        })
        .collect();
    assert_eq!(&edges, bundled.edges());
    for a in induced.arguments() {
        assert_eq!(
            induced.base_score(a),
            bundled.base_score(&id(&rename(a.as_str())))
        );
    }
}

#[test]
fn induced_strengths_agree_with_bundled() {
    let cfg = SolverConfig::default();
    let a = solve_qe(&case_study_induced(), &cfg).unwrap().strengths;
    let b = solve_qe(&case_study(), &cfg).unwrap().strengths;
    for (arg, v) in a.iter() {
        let w = b.get(&id(&rename(arg.as_str()))).unwrap();
        assert!((v - w).abs() < 1e-12, "{arg}: {v} vs {w}");
    }
}

#[test]
fn claim_labels_cover_every_claim() {
    let tdn = parse_reports(CASE_STUDY_REPORTS_CSV).unwrap();
    let labels = ClaimLabels::for_tdn(&tdn);
    assert_eq!(labels.claims.len(), 6);
    let json = labels.to_json();
    for claim in case_study_claim_ids().keys() {
        assert!(json.contains(claim.as_str()), "{claim}");
    }
}

#[test]
fn contradictory_claims_attack_both_ways() {
    let q = case_study_induced();
    for e in q.attacks() {
        let (so, _) = e.source.as_str().split_once('=').unwrap();
        let (to, _) = e.target.as_str().split_once('=').unwrap();
        assert_eq!(so, to);
        assert!(q.contains_edge(&Edge::attack(e.target.clone(), e.source.clone())));
    }
}
