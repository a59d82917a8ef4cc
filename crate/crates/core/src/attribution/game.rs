//! The coalitional game behind attribution scores: players are either the
//! non-topic arguments or the edges, and a coalition's value is the topic's
//! strength in the sub-framework the coalition spans.

use std::collections::VecDeque;

use dashmap::DashMap;

use crate::error::AttributionError;
use crate::qbaf::{ArgumentId, Edge, Qbaf};
use crate::semantics::{Network, SolverConfig};

use super::{AttributionTarget, Kind};

/// Bitset over player positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Coalition(Box<[u64]>);

impl Coalition {
    pub(crate) fn empty(players: usize) -> Self {
        Coalition(vec![0; players.div_ceil(64)].into_boxed_slice())
    }

    pub(crate) fn full(players: usize) -> Self {
        let mut c = Coalition::empty(players);
        (0..players).for_each(|p| c.insert(p));
        c
    }

    pub(crate) fn from_mask(players: usize, mask: u64) -> Self {
        let mut c = Coalition::empty(players);
        if players > 0 {
            c.0[0] = mask;
        }
        c
    }

    pub(crate) fn insert(&mut self, p: usize) {
        self.0[p / 64] |= 1 << (p % 64);
    }

    pub(crate) fn remove(&mut self, p: usize) {
        self.0[p / 64] &= !(1 << (p % 64));
    }

    fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64)
                .filter(move |b| bits & (1 << b) != 0)
                .map(move |b| w * 64 + b)
        })
    }
}

pub(crate) struct Game {
    net: Network,
    cfg: SolverConfig,
    topic: usize,
    kind: Kind,
    /// Argument indices (argument game) or edge indices (edge game).
    players: Vec<usize>,
    cache: DashMap<Coalition, f64>,
}

impl Game {
    pub(crate) fn new(
        q: &Qbaf,
        cfg: &SolverConfig,
        topic: &ArgumentId,
        kind: Kind,
    ) -> Result<Game, AttributionError> {
        let net = Network::compile(q);
        let topic = net
            .index_of(topic)
            .ok_or_else(|| AttributionError::UnknownArgument(topic.clone()))?;
        let players = match kind {
            Kind::Arguments => (0..net.len()).filter(|&i| i != topic).collect(),
            Kind::Relations => (0..net.edge_count()).collect(),
        };
        Ok(Game {
            net,
            cfg: *cfg,
            topic,
            kind,
            players,
            cache: DashMap::new(),
        })
    }

    pub(crate) fn num_players(&self) -> usize {
        self.players.len()
    }

    pub(crate) fn kind(&self) -> Kind {
        self.kind
    }

    pub(crate) fn topic_id(&self) -> &ArgumentId {
        &self.net.ids()[self.topic]
    }

    /// The public description of player `p`.
    pub(crate) fn target(&self, p: usize) -> AttributionTarget {
        match self.kind {
            Kind::Arguments => AttributionTarget::Argument(self.net.ids()[self.players[p]].clone()),
            Kind::Relations => AttributionTarget::Edge(self.edge(self.players[p])),
        }
    }

    fn edge(&self, k: usize) -> Edge {
        let (s, t, p) = self.net.edge(k);
        Edge::new(self.net.ids()[s].clone(), self.net.ids()[t].clone(), p)
    }

    /// Player position of an eligible target.
    pub(crate) fn position(&self, target: &AttributionTarget) -> Result<usize, AttributionError> {
        match (self.kind, target) {
            (Kind::Arguments, AttributionTarget::Argument(a)) => {
                let i = self
                    .net
                    .index_of(a)
                    .ok_or_else(|| AttributionError::UnknownArgument(a.clone()))?;
                if i == self.topic {
                    return Err(AttributionError::TopicEqualsTarget(a.clone()));
                }
                Ok(self
                    .players
                    .iter()
                    .position(|&x| x == i)
                    .expect("non-topic argument"))
            }
            (Kind::Relations, AttributionTarget::Edge(e)) => (0..self.net.edge_count())
                .find(|&k| self.edge(k) == *e)
                .ok_or_else(|| AttributionError::UnknownEdge(e.to_string())),
            (_, t) => Err(match t {
                AttributionTarget::Argument(a) => AttributionError::UnknownArgument(a.clone()),
                AttributionTarget::Edge(e) => AttributionError::UnknownEdge(e.to_string()),
            }),
        }
    }

    /// Topic strength in the sub-framework spanned by `coalition`, memoized.
    pub(crate) fn value(&self, coalition: &Coalition) -> Result<f64, AttributionError> {
        if let Some(v) = self.cache.get(coalition) {
            return Ok(*v);
        }
        let v = self.evaluate(coalition)?;
        self.cache.insert(coalition.clone(), v);
        Ok(v)
    }

    /// Same as [`Game::value`] without touching the cache.
    pub(crate) fn evaluate(&self, coalition: &Coalition) -> Result<f64, AttributionError> {
        let (args, edges) = self.masks(coalition);
        topic_strength(&self.net, &args, &edges, self.topic, &self.cfg).map_err(|e| {
            AttributionError::NonConvergence {
                context: format!("coalition {}", self.describe(coalition)),
                source: e,
            }
        })
    }

    fn masks(&self, coalition: &Coalition) -> (Vec<bool>, Vec<bool>) {
        match self.kind {
            Kind::Arguments => {
                let mut args = vec![false; self.net.len()];
                args[self.topic] = true;
                for p in coalition.members() {
                    args[self.players[p]] = true;
                }
                (args, vec![true; self.net.edge_count()])
            }
            Kind::Relations => {
                let mut edges = vec![false; self.net.edge_count()];
                for p in coalition.members() {
                    edges[self.players[p]] = true;
                }
                (vec![true; self.net.len()], edges)
            }
        }
    }

    fn describe(&self, coalition: &Coalition) -> String {
        let names: Vec<String> = coalition
            .members()
            .map(|p| self.target(p).to_string())
            .collect();
        format!("{{{}}}", names.join(","))
    }
}

/// Strength of `topic` in the masked sub-framework.
///
/// Only arguments with a directed path to the topic can influence it, so the
/// solve runs on that ancestor set alone. Two sub-frameworks that agree on
/// the topic's ancestors therefore yield bit-identical topic strengths.
pub(crate) fn topic_strength(
    net: &Network,
    active_args: &[bool],
    active_edges: &[bool],
    topic: usize,
    cfg: &SolverConfig,
) -> Result<f64, crate::error::SolveError> {
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); net.len()];
    for k in (0..net.edge_count()).filter(|&k| active_edges[k]) {
        let (s, t, _) = net.edge(k);
        if active_args[s] && active_args[t] {
            parents[t].push(s);
        }
    }
    let mut relevant = vec![false; net.len()];
    relevant[topic] = true;
    let mut queue = VecDeque::from([topic]);
    while let Some(a) = queue.pop_front() {
        for &p in &parents[a] {
            if !relevant[p] {
                relevant[p] = true;
                queue.push_back(p);
            }
        }
    }
    let (values, _, _) = net.solve_masked(&relevant, active_edges, cfg)?;
    Ok(values[topic])
}
