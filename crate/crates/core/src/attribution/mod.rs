//! Attribution of a topic argument's strength to arguments or edges.
//!
//! Two families of scores are provided. Removal scores compare the topic's
//! strength with and without one target. Shapley scores average the
//! target's marginal contribution over coalitions of the other players,
//! either exactly (subset enumeration, up to [`EXACT_PLAYER_CAP`] players)
//! or by seeded permutation sampling.
//!
//! A coalition of arguments is evaluated on the framework restricted to the
//! coalition plus the topic; a coalition of edges keeps every argument and
//! only the coalition's edges.

mod game;
mod removal;
mod shapley;

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;

use crate::error::{AttributionError, ReportParseError};
use crate::qbaf::{ArgumentId, Edge, Qbaf};
use crate::semantics::SolverConfig;

use game::Game;
pub use removal::{removal_aae, removal_rae};
pub use shapley::{
    coalition_value_arguments, coalition_value_edges, shapley_exact, shapley_sampled,
    EXACT_PLAYER_CAP,
};

pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_SEED: u64 = 42;

/// Whether players are arguments or edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Arguments,
    Relations,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Arguments => "arguments",
            Kind::Relations => "relations",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Removal,
    ShapleyExact,
    ShapleySampled { samples: usize, seed: u64 },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Removal => "removal",
            Method::ShapleyExact => "shapley_exact",
            Method::ShapleySampled { .. } => "shapley_sampled",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AttributionTarget {
    Argument(ArgumentId),
    Edge(Edge),
}

impl AttributionTarget {
    pub fn kind(&self) -> Kind {
        match self {
            AttributionTarget::Argument(_) => Kind::Arguments,
            AttributionTarget::Edge(_) => Kind::Relations,
        }
    }
}

impl fmt::Display for AttributionTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttributionTarget::Argument(a) => write!(f, "{a}"),
            AttributionTarget::Edge(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Attribution {
    pub target: AttributionTarget,
    pub value: f64,
}

/// Attribution scores of every eligible target, highest first.
#[derive(Clone, Debug, PartialEq)]
pub struct AttributionReport {
    pub topic: ArgumentId,
    pub kind: Kind,
    pub method: Method,
    pub entries: Vec<Attribution>,
}

impl AttributionReport {
    /// Builds a report, ordering entries by value descending and then by
    /// target ascending.
    pub fn new(
        topic: ArgumentId,
        kind: Kind,
        method: Method,
        mut entries: Vec<Attribution>,
    ) -> Self {
        entries.sort_by(|a, b| match b.value.total_cmp(&a.value) {
            Ordering::Equal => a.target.cmp(&b.target),
            o => o,
        });
        AttributionReport {
            topic,
            kind,
            method,
            entries,
        }
    }

    pub fn sample_size(&self) -> Option<usize> {
        match self.method {
            Method::ShapleySampled { samples, .. } => Some(samples),
            _ => None,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self.method {
            Method::ShapleySampled { seed, .. } => Some(seed),
            _ => None,
        }
    }

    pub fn get(&self, target: &AttributionTarget) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| &e.target == target)
            .map(|e| e.value)
    }

    /// `target,value,method,topic,samples,seed` CSV with nine decimals.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let samples = self
            .sample_size()
            .map(|s| s.to_string())
            .unwrap_or_default();
        let seed = self.seed().map(|s| s.to_string()).unwrap_or_default();
        w.write_record(["target", "value", "method", "topic", "samples", "seed"])
            .expect("in-memory write");
        for e in &self.entries {
            w.write_record([
                e.target.to_string(),
                format!("{:.9}", e.value),
                self.method.name().to_owned(),
                self.topic.to_string(),
                samples.clone(),
                seed.clone(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }

    /// Reads a table written by [`AttributionReport::to_csv`], resolving
    /// edge targets against `q` to recover their polarity.
    pub fn from_csv(text: &str, q: &Qbaf) -> Result<AttributionReport, ReportParseError> {
        let err = |line: usize, message: String| ReportParseError::Parse { line, message };
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| err(1, e.to_string()))?;
        if headers != vec!["target", "value", "method", "topic", "samples", "seed"] {
            return Err(err(1, format!("unexpected header {headers:?}")));
        }
        let mut entries = Vec::new();
        let mut meta: Option<(String, String, String, String)> = None;
        let mut kind = None;
        for record in reader.records() {
            let record = record
                .map_err(|e| err(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let target = parse_target(&record[0], q).map_err(|m| err(line, m))?;
            let value: f64 = record[1]
                .parse()
                .map_err(|e| err(line, format!("bad value {:?}: {e}", &record[1])))?;
            let row_meta = (
                record[2].to_owned(),
                record[3].to_owned(),
                record[4].to_owned(),
                record[5].to_owned(),
            );
            match &meta {
                None => meta = Some(row_meta),
                Some(m) if *m != row_meta => {
                    return Err(err(
                        line,
                        "method/topic/samples/seed differ between rows".into(),
                    ))
                }
                Some(_) => {}
            }
            match kind {
                None => kind = Some(target.kind()),
                Some(k) if k != target.kind() => {
                    return Err(err(line, "mixed argument and edge targets".into()))
                }
                Some(_) => {}
            }
            entries.push(Attribution { target, value });
        }
        let (method, topic, samples, seed) =
            meta.ok_or_else(|| err(1, "explanation table has no rows".into()))?;
        let method = match method.as_str() {
            "removal" => Method::Removal,
            "shapley_exact" => Method::ShapleyExact,
            "shapley_sampled" => Method::ShapleySampled {
                samples: samples
                    .parse()
                    .map_err(|_| err(2, format!("bad sample count {samples:?}")))?,
                seed: seed
                    .parse()
                    .map_err(|_| err(2, format!("bad seed {seed:?}")))?,
            },
            other => return Err(err(2, format!("unknown method {other:?}"))),
        };
        let topic = ArgumentId::new(topic).map_err(|e| err(2, e.to_string()))?;
        Ok(AttributionReport::new(
            topic,
            kind.expect("at least one row"),
            method,
            entries,
        ))
    }
}

fn parse_target(text: &str, q: &Qbaf) -> Result<AttributionTarget, String> {
    if let Some(inner) = text.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
        let (s, t) = inner
            .split_once(',')
            .ok_or_else(|| format!("bad edge target {text:?}"))?;
        let s = ArgumentId::new(s).map_err(|e| e.to_string())?;
        let t = ArgumentId::new(t).map_err(|e| e.to_string())?;
        let edge = q
            .edge_between(&s, &t)
            .ok_or_else(|| format!("edge {text} is not in the framework"))?;
        Ok(AttributionTarget::Edge(edge.clone()))
    } else {
        Ok(AttributionTarget::Argument(
            ArgumentId::new(text).map_err(|e| e.to_string())?,
        ))
    }
}

/// Scores every eligible target of `kind` with `method`.
///
/// Coalition values are shared between targets within one call.
pub fn explain_all(
    q: &Qbaf,
    cfg: &SolverConfig,
    topic: &ArgumentId,
    kind: Kind,
    method: Method,
) -> Result<AttributionReport, AttributionError> {
    let game = Game::new(q, cfg, topic, kind)?;
    let n = game.num_players();
    let wrap = |p: usize| {
        let target = game.target(p).to_string();
        move |e: AttributionError| AttributionError::Target {
            target,
            source: Box::new(e),
        }
    };
    let values: Vec<f64> = match method {
        Method::Removal => (0..n)
            .into_par_iter()
            .map(|p| removal::removal(&game, p).map_err(wrap(p)))
            .collect::<Result<_, _>>()?,
        Method::ShapleyExact => {
            let table = shapley::value_table(&game)?;
            (0..n)
                .into_par_iter()
                .map(|p| shapley::exact_from_table(&table, n, p))
                .collect()
        }
        Method::ShapleySampled { samples, seed } => {
            if samples == 0 {
                return Err(AttributionError::NoSamples);
            }
            (0..n)
                .map(|p| shapley::sampled(&game, p, samples, seed).map_err(wrap(p)))
                .collect::<Result<_, _>>()?
        }
    };
    let entries = values
        .into_iter()
        .enumerate()
        .map(|(p, value)| Attribution {
            target: game.target(p),
            value,
        })
        .collect();
    Ok(AttributionReport::new(
        game.topic_id().clone(),
        game.kind(),
        method,
        entries,
    ))
}
