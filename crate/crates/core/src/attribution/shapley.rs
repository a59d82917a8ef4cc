use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::AttributionError;
use crate::qbaf::{ArgumentId, Edge, Qbaf};
use crate::semantics::{Network, SolverConfig};

use super::game::{topic_strength, Coalition, Game};
use super::AttributionTarget;

/// Largest player set for which exact Shapley values are enumerated.
pub const EXACT_PLAYER_CAP: usize = 20;

/// Topic strength in the framework restricted to `coalition` plus the topic.
pub fn coalition_value_arguments(
    q: &Qbaf,
    cfg: &SolverConfig,
    topic: &ArgumentId,
    coalition: &BTreeSet<ArgumentId>,
) -> Result<f64, AttributionError> {
    if !q.contains(topic) {
        return Err(AttributionError::UnknownArgument(topic.clone()));
    }
    if coalition.contains(topic) {
        return Err(AttributionError::TopicEqualsTarget(topic.clone()));
    }
    let mut keep = coalition.clone();
    keep.insert(topic.clone());
    let sub = q.restrict_arguments(&keep).map_err(|e| match e {
        crate::error::QbafError::UnknownArgument(a) => AttributionError::UnknownArgument(a),
        other => unreachable!("restriction only fails on unknown arguments: {other}"),
    })?;
    strength_of(&sub, cfg, topic, || {
        let names: Vec<_> = coalition.iter().map(|a| a.to_string()).collect();
        format!("coalition {{{}}}", names.join(","))
    })
}

/// Topic strength in the framework keeping only the edges in `coalition`.
pub fn coalition_value_edges(
    q: &Qbaf,
    cfg: &SolverConfig,
    topic: &ArgumentId,
    coalition: &BTreeSet<Edge>,
) -> Result<f64, AttributionError> {
    if !q.contains(topic) {
        return Err(AttributionError::UnknownArgument(topic.clone()));
    }
    let sub = q
        .restrict_edges(coalition)
        .map_err(|e| AttributionError::UnknownEdge(e.to_string()))?;
    strength_of(&sub, cfg, topic, || {
        let names: Vec<_> = coalition.iter().map(|e| e.to_string()).collect();
        format!("coalition {{{}}}", names.join(","))
    })
}

fn strength_of(
    q: &Qbaf,
    cfg: &SolverConfig,
    topic: &ArgumentId,
    context: impl FnOnce() -> String,
) -> Result<f64, AttributionError> {
    let net = Network::compile(q);
    let t = net.index_of(topic).expect("topic retained");
    topic_strength(
        &net,
        &vec![true; net.len()],
        &vec![true; net.edge_count()],
        t,
        cfg,
    )
    .map_err(|source| AttributionError::NonConvergence {
        context: context(),
        source,
    })
}

/// Exact Shapley attribution of `target` to the topic's strength.
pub fn shapley_exact(
    q: &Qbaf,
    cfg: &SolverConfig,
    topic: &ArgumentId,
    target: &AttributionTarget,
) -> Result<f64, AttributionError> {
    let game = Game::new(q, cfg, topic, target.kind())?;
    let p = game.position(target)?;
    let table = value_table(&game)?;
    Ok(exact_from_table(&table, game.num_players(), p))
}

/// Permutation-sampling estimate of the Shapley attribution of `target`.
pub fn shapley_sampled(
    q: &Qbaf,
    cfg: &SolverConfig,
    topic: &ArgumentId,
    target: &AttributionTarget,
    samples: usize,
    seed: u64,
) -> Result<f64, AttributionError> {
    let game = Game::new(q, cfg, topic, target.kind())?;
    let p = game.position(target)?;
    sampled(&game, p, samples, seed)
}

/// Values of all 2^n coalitions, indexed by bitmask.
pub(crate) fn value_table(game: &Game) -> Result<Vec<f64>, AttributionError> {
    let n = game.num_players();
    if n > EXACT_PLAYER_CAP {
        return Err(AttributionError::TooLargeForExact {
            players: n,
            cap: EXACT_PLAYER_CAP,
        });
    }
    (0..1u64 << n)
        .into_par_iter()
        .map(|mask| game.evaluate(&Coalition::from_mask(n, mask)))
        .collect()
}

/// Weighted sum of marginals of `player` over every coalition without it.
pub(crate) fn exact_from_table(table: &[f64], n: usize, player: usize) -> f64 {
    let weights = shapley_weights(n);
    let bit = 1usize << player;
    let mut total = 0.0;
    for mask in (0..table.len()).filter(|m| m & bit == 0) {
        let size = mask.count_ones() as usize;
        total += weights[size] * (table[mask | bit] - table[mask]);
    }
    total
}

/// `k! (n-k-1)! / n!` for k in 0..n.
fn shapley_weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            // C(n-1, k), exact in f64 for the player counts allowed here.
            let mut binom = 1.0f64;
            for i in 0..k {
                binom = binom * (n - 1 - i) as f64 / (i + 1) as f64;
            }
            1.0 / (n as f64 * binom.round())
        })
        .collect()
}

pub(crate) fn sampled(
    game: &Game,
    player: usize,
    samples: usize,
    seed: u64,
) -> Result<f64, AttributionError> {
    if samples == 0 {
        return Err(AttributionError::NoSamples);
    }
    let n = game.num_players();
    let key = stream_key(seed, &game.target(player).to_string());
    let marginals = (0..samples)
        .into_par_iter()
        .map(|draw| {
            let mut rng = ChaCha8Rng::seed_from_u64(key);
            rng.set_stream(draw as u64);
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let mut before = Coalition::empty(n);
            for &x in order.iter().take_while(|&&x| x != player) {
                before.insert(x);
            }
            let without = game.value(&before)?;
            before.insert(player);
            let with = game.value(&before)?;
            Ok(with - without)
        })
        .collect::<Result<Vec<f64>, AttributionError>>()?;
    // Sequential sum in draw order keeps the estimate independent of threading.
    Ok(marginals.iter().sum::<f64>() / samples as f64)
}

/// Mixes the user seed with a stable hash of the target label.
fn stream_key(seed: u64, target: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in target.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(seed ^ h)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
