#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use qbafx::attribution::{coalition_value_arguments, coalition_value_edges};
use qbafx::{solve_qe, ArgumentId, AttributionTarget, Edge, Polarity, Qbaf, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn id(s: &str) -> ArgumentId {
    ArgumentId::new(s).unwrap()
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

/// Case-study claim ids `c0..c5` keyed by their induced `object=value` ids.
pub fn case_study_claim_ids() -> BTreeMap<String, String> {
    let text = std::fs::read_to_string(fixture("case_study_claims.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["claims"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            let object = c["object"].as_str().unwrap();
            let value = c["value"].as_str().unwrap();
            (
                format!("{object}={value}"),
                c["id"].as_str().unwrap().to_owned(),
            )
        })
        .collect()
}

/// Random framework on `n` arguments `a0..` with at most `max_edges` edges,
/// no self loops and at most one edge per ordered pair.
pub fn random_qbaf(rng: &mut ChaCha8Rng, n: usize, max_edges: usize) -> Qbaf {
    let names: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
    let mut scores = BTreeMap::new();
    for name in &names {
        scores.insert(id(name), rng.gen_range(0.0..=1.0));
    }
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let density: f64 = rng.gen_range(0.15..0.6);
    pairs.retain(|_| rng.gen_bool(density));
    while pairs.len() > max_edges {
        let k = rng.gen_range(0..pairs.len());
        pairs.swap_remove(k);
    }
    let mut attacks = Vec::new();
    let mut supports = Vec::new();
    for (i, j) in pairs {
        let pair = (id(&names[i]), id(&names[j]));
        if rng.gen_bool(0.5) {
            attacks.push(pair);
        } else {
            supports.push(pair);
        }
    }
    Qbaf::build(scores.keys().cloned(), attacks, supports, &scores).unwrap()
}

/// Random framework whose full solve converges.
pub fn random_convergent(rng: &mut ChaCha8Rng, n: usize, max_edges: usize) -> Qbaf {
    loop {
        let q = random_qbaf(rng, n, max_edges);
        if solve_qe(&q, &SolverConfig::default()).is_ok() {
            return q;
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every argument other than the topic, as attribution targets.
pub fn argument_targets(q: &Qbaf, topic: &ArgumentId) -> Vec<AttributionTarget> {
    q.arguments()
        .filter(|a| *a != topic)
        .map(|a| AttributionTarget::Argument(a.clone()))
        .collect()
}

pub fn edge_targets(q: &Qbaf) -> Vec<AttributionTarget> {
    q.edges()
        .iter()
        .cloned()
        .map(AttributionTarget::Edge)
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

/// Shapley values by averaging marginal contributions over all n! orders,
/// evaluating every coalition through framework restriction.
pub fn permutation_oracle(
    q: &Qbaf,
    cfg: &SolverConfig,
    topic: &ArgumentId,
    players: &[AttributionTarget],
) -> Vec<f64> {
    let value = |members: &[usize]| -> f64 {
        match players.first() {
            None => coalition_value_arguments(q, cfg, topic, &BTreeSet::new()).unwrap(),
            Some(AttributionTarget::Argument(_)) => {
                let set = members
                    .iter()
                    .map(|&i| match &players[i] {
                        AttributionTarget::Argument(a) => a.clone(),
                        _ => unreachable!(),
                    })
                    .collect();
                coalition_value_arguments(q, cfg, topic, &set).unwrap()
            }
            Some(AttributionTarget::Edge(_)) => {
                let set: BTreeSet<Edge> = members
                    .iter()
                    .map(|&i| match &players[i] {
                        AttributionTarget::Edge(e) => e.clone(),
                        _ => unreachable!(),
                    })
                    .collect();
                coalition_value_edges(q, cfg, topic, &set).unwrap()
            }
        }
    };
    let n = players.len();
    let orders = permutations(n);
    let mut totals = vec![0.0; n];
    for order in &orders {
        let mut members = Vec::new();
        let mut before = value(&members);
        for &p in order {
            members.push(p);
            let after = value(&members);
            totals[p] += after - before;
            before = after;
        }
    }
    totals.iter().map(|t| t / orders.len() as f64).collect()
}

pub fn is_support(e: &Edge) -> bool {
    e.polarity == Polarity::Support
}
