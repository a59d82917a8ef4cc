//! Quantitative bipolar argumentation frameworks: arguments with base scores
//! plus disjoint attack and support relations.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::QbafError;

/// Identifier of an argument. Non-empty, without whitespace or commas.
///
/// Identifiers order "naturally": runs of ASCII digits compare by numeric
/// value, so `s8 < s9 < s10`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ArgumentId(String);

impl ArgumentId {
    pub fn new(id: impl Into<String>) -> Result<Self, QbafError> {
        let id = id.into();
        if id.is_empty() || id.chars().any(|c| c.is_whitespace() || c == ',') {
            return Err(QbafError::InvalidArgumentId(id));
        }
        Ok(ArgumentId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ArgumentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for ArgumentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for ArgumentId {
    type Err = QbafError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ArgumentId::new(s)
    }
}

impl Ord for ArgumentId {
    fn cmp(&self, other: &Self) -> Ordering {
        natural_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for ArgumentId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Compares strings treating maximal ASCII digit runs as numbers. Falls back
/// to plain byte order so the result is a total order consistent with `Eq`.
fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (ab, bb) = (a.as_bytes(), b.as_bytes());
    let (mut i, mut j) = (0, 0);
    while i < ab.len() && j < bb.len() {
        if ab[i].is_ascii_digit() && bb[j].is_ascii_digit() {
            let si = i;
            while i < ab.len() && ab[i].is_ascii_digit() {
                i += 1;
            }
            let sj = j;
            while j < bb.len() && bb[j].is_ascii_digit() {
                j += 1;
            }
            let da = trim_zeros(&ab[si..i]);
            let db = trim_zeros(&bb[sj..j]);
            let ord = da.len().cmp(&db.len()).then_with(|| da.cmp(db));
            if ord != Ordering::Equal {
                return ord;
            }
        } else {
            let ord = ab[i].cmp(&bb[j]);
            if ord != Ordering::Equal {
                return ord;
            }
            i += 1;
            j += 1;
        }
    }
    (ab.len() - i).cmp(&(bb.len() - j)).then_with(|| ab.cmp(bb))
}

fn trim_zeros(digits: &[u8]) -> &[u8] {
    let nz = digits
        .iter()
        .position(|&d| d != b'0')
        .unwrap_or(digits.len());
    &digits[nz..]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Attack,
    Support,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarity::Attack => f.write_str("attack"),
            Polarity::Support => f.write_str("support"),
        }
    }
}

/// A directed attack or support relation between two arguments.
///
/// Edges order by `(source, target)`; a framework never holds two edges
/// with the same endpoints, so polarity only breaks ties between edges of
/// different frameworks.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub source: ArgumentId,
    pub target: ArgumentId,
    pub polarity: Polarity,
}

impl Edge {
    pub fn new(source: ArgumentId, target: ArgumentId, polarity: Polarity) -> Self {
        Edge {
            source,
            target,
            polarity,
        }
    }

    pub fn attack(source: ArgumentId, target: ArgumentId) -> Self {
        Edge::new(source, target, Polarity::Attack)
    }

    pub fn support(source: ArgumentId, target: ArgumentId) -> Self {
        Edge::new(source, target, Polarity::Support)
    }

    /// `(source,target)`, the notation used in attribution tables.
    pub fn pair_label(&self) -> String {
        format!("({},{})", self.source, self.target)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pair_label())
    }
}

/// A validated, immutable QBAF.
#[derive(Clone, Debug, PartialEq)]
pub struct Qbaf {
    base_scores: BTreeMap<ArgumentId, f64>,
    edges: BTreeSet<Edge>,
}

impl Qbaf {
    /// Validates and assembles a framework. Duplicate edges collapse into one.
    pub fn build<A, R, S>(
        arguments: A,
        attacks: R,
        supports: S,
        base_scores: &BTreeMap<ArgumentId, f64>,
    ) -> Result<Qbaf, QbafError>
    where
        A: IntoIterator<Item = ArgumentId>,
        R: IntoIterator<Item = (ArgumentId, ArgumentId)>,
        S: IntoIterator<Item = (ArgumentId, ArgumentId)>,
    {
        let mut scores = BTreeMap::new();
        for id in arguments {
            if scores.contains_key(&id) {
                return Err(QbafError::DuplicateArgumentId(id));
            }
            let score = match base_scores.get(&id) {
                Some(&s) => check_score(&id, s)?,
                None => {
                    return Err(QbafError::BadBaseScore {
                        argument: id,
                        value: None,
                    })
                }
            };
            scores.insert(id, score);
        }
        if let Some(extra) = base_scores.keys().find(|k| !scores.contains_key(*k)) {
            return Err(QbafError::UnknownArgument(extra.clone()));
        }

        let mut pairs: BTreeMap<(ArgumentId, ArgumentId), Polarity> = BTreeMap::new();
        let tagged = attacks
            .into_iter()
            .map(|p| (p, Polarity::Attack))
            .chain(supports.into_iter().map(|p| (p, Polarity::Support)));
        for ((source, target), polarity) in tagged {
            if !scores.contains_key(&source) || !scores.contains_key(&target) {
                return Err(QbafError::UnknownEndpoint {
                    from: source,
                    to: target,
                });
            }
            if source == target {
                return Err(QbafError::SelfLoop(source));
            }
            match pairs.get(&(source.clone(), target.clone())) {
                Some(&p) if p != polarity => {
                    return Err(QbafError::PolarityConflict {
                        from: source,
                        to: target,
                    })
                }
                Some(_) => {}
                None => {
                    pairs.insert((source, target), polarity);
                }
            }
        }
        let edges = pairs
            .into_iter()
            .map(|((s, t), p)| Edge::new(s, t, p))
            .collect();
        Ok(Qbaf {
            base_scores: scores,
            edges,
        })
    }

    pub fn builder() -> QbafBuilder {
        QbafBuilder::default()
    }

    pub fn empty() -> Qbaf {
        Qbaf {
            base_scores: BTreeMap::new(),
            edges: BTreeSet::new(),
        }
    }

    /// Arguments in natural id order.
    pub fn arguments(&self) -> impl ExactSizeIterator<Item = &ArgumentId> + '_ {
        self.base_scores.keys()
    }

    pub fn num_arguments(&self) -> usize {
        self.base_scores.len()
    }

    pub fn contains(&self, id: &ArgumentId) -> bool {
        self.base_scores.contains_key(id)
    }

    pub fn base_score(&self, id: &ArgumentId) -> Option<f64> {
        self.base_scores.get(id).copied()
    }

    pub fn base_scores(&self) -> &BTreeMap<ArgumentId, f64> {
        &self.base_scores
    }

    /// All edges, ordered by `(source, target)`.
    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn contains_edge(&self, edge: &Edge) -> bool {
        self.edges.contains(edge)
    }

    /// Finds the edge between two arguments, whatever its polarity.
    pub fn edge_between(&self, source: &ArgumentId, target: &ArgumentId) -> Option<&Edge> {
        [Polarity::Attack, Polarity::Support]
            .into_iter()
            .map(|p| Edge::new(source.clone(), target.clone(), p))
            .find_map(|e| self.edges.get(&e))
    }

    pub fn attacks(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(|e| e.polarity == Polarity::Attack)
    }

    pub fn supports(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges
            .iter()
            .filter(|e| e.polarity == Polarity::Support)
    }

    /// Sub-framework induced by `keep`: retained arguments and the edges
    /// whose endpoints are both retained.
    pub fn restrict_arguments(&self, keep: &BTreeSet<ArgumentId>) -> Result<Qbaf, QbafError> {
        if let Some(missing) = keep.iter().find(|id| !self.contains(id)) {
            return Err(QbafError::UnknownArgument(missing.clone()));
        }
        let base_scores = self
            .base_scores
            .iter()
            .filter(|(id, _)| keep.contains(*id))
            .map(|(id, s)| (id.clone(), *s))
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| keep.contains(&e.source) && keep.contains(&e.target))
            .cloned()
            .collect();
        Ok(Qbaf { base_scores, edges })
    }

    /// Same arguments and base scores, edge set replaced by `keep`.
    pub fn restrict_edges(&self, keep: &BTreeSet<Edge>) -> Result<Qbaf, QbafError> {
        if let Some(missing) = keep.iter().find(|e| !self.edges.contains(*e)) {
            return Err(QbafError::UnknownEdge(missing.to_string()));
        }
        Ok(Qbaf {
            base_scores: self.base_scores.clone(),
            edges: keep.clone(),
        })
    }

    /// Same graph with a new base score function, which must be defined on
    /// exactly the current arguments.
    pub fn with_base_scores(&self, scores: &BTreeMap<ArgumentId, f64>) -> Result<Qbaf, QbafError> {
        let missing: Vec<_> = self
            .base_scores
            .keys()
            .filter(|id| !scores.contains_key(*id))
            .cloned()
            .collect();
        let extra: Vec<_> = scores
            .keys()
            .filter(|id| !self.base_scores.contains_key(*id))
            .cloned()
            .collect();
        if !missing.is_empty() || !extra.is_empty() {
            return Err(QbafError::DomainMismatch { missing, extra });
        }
        for (id, &s) in scores {
            check_score(id, s)?;
        }
        Ok(Qbaf {
            base_scores: scores.clone(),
            edges: self.edges.clone(),
        })
    }

    /// Re-checks every structural invariant.
    pub fn validate(&self) -> Result<(), QbafError> {
        for (id, &s) in &self.base_scores {
            ArgumentId::new(id.as_str())?;
            check_score(id, s)?;
        }
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            if !self.contains(&e.source) || !self.contains(&e.target) {
                return Err(QbafError::UnknownEndpoint {
                    from: e.source.clone(),
                    to: e.target.clone(),
                });
            }
            if e.source == e.target {
                return Err(QbafError::SelfLoop(e.source.clone()));
            }
            if !seen.insert((&e.source, &e.target)) {
                return Err(QbafError::PolarityConflict {
                    from: e.source.clone(),
                    to: e.target.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Qbaf, QbafError> {
        let doc: QbafDocument = serde_json::from_str(text).map_err(|e| QbafError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        doc.into_qbaf()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&QbafDocument::from(self))
            .expect("QBAF documents always serialize");
        s.push('\n');
        s
    }
}

fn check_score(id: &ArgumentId, s: f64) -> Result<f64, QbafError> {
    if (0.0..=1.0).contains(&s) {
        Ok(s)
    } else {
        Err(QbafError::BadBaseScore {
            argument: id.clone(),
            value: Some(s),
        })
    }
}

/// Incremental construction from string ids, mostly for tests and bindings.
#[derive(Debug, Default, Clone)]
pub struct QbafBuilder {
    ids: Vec<String>,
    scores: Vec<(String, f64)>,
    attacks: Vec<(String, String)>,
    supports: Vec<(String, String)>,
}

impl QbafBuilder {
    pub fn argument(mut self, id: &str, base_score: f64) -> Self {
        self.ids.push(id.to_owned());
        self.scores.push((id.to_owned(), base_score));
        self
    }

    pub fn attack(mut self, source: &str, target: &str) -> Self {
        self.attacks.push((source.to_owned(), target.to_owned()));
        self
    }

    pub fn support(mut self, source: &str, target: &str) -> Self {
        self.supports.push((source.to_owned(), target.to_owned()));
        self
    }

    pub fn build(self) -> Result<Qbaf, QbafError> {
        let ids = self
            .ids
            .into_iter()
            .map(ArgumentId::new)
            .collect::<Result<Vec<_>, _>>()?;
        let mut scores = BTreeMap::new();
        for (id, s) in self.scores {
            scores.insert(ArgumentId::new(id)?, s);
        }
        let pairs = |v: Vec<(String, String)>| -> Result<Vec<_>, QbafError> {
            v.into_iter()
                .map(|(s, t)| Ok((ArgumentId::new(s)?, ArgumentId::new(t)?)))
                .collect()
        };
        let attacks = pairs(self.attacks)?;
        let supports = pairs(self.supports)?;
        Qbaf::build(ids, attacks, supports, &scores)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QbafDocument {
    arguments: Vec<ArgumentEntry>,
    #[serde(default)]
    attacks: Vec<(String, String)>,
    #[serde(default)]
    supports: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArgumentEntry {
    id: String,
    base_score: f64,
}

impl QbafDocument {
    fn into_qbaf(self) -> Result<Qbaf, QbafError> {
        let mut ids = Vec::with_capacity(self.arguments.len());
        let mut scores = BTreeMap::new();
        for entry in self.arguments {
            let id = ArgumentId::new(entry.id)?;
            if scores.insert(id.clone(), entry.base_score).is_some() {
                return Err(QbafError::DuplicateArgumentId(id));
            }
            ids.push(id);
        }
        let convert = |pairs: Vec<(String, String)>| -> Result<Vec<_>, QbafError> {
            pairs
                .into_iter()
                .map(|(s, t)| Ok((ArgumentId::new(s)?, ArgumentId::new(t)?)))
                .collect()
        };
        Qbaf::build(
            ids,
            convert(self.attacks)?,
            convert(self.supports)?,
            &scores,
        )
    }
}

impl From<&Qbaf> for QbafDocument {
    fn from(q: &Qbaf) -> Self {
        let pairs = |it: &mut dyn Iterator<Item = &Edge>| {
            it.map(|e| (e.source.to_string(), e.target.to_string()))
                .collect()
        };
        QbafDocument {
            arguments: q
                .base_scores
                .iter()
                .map(|(id, &s)| ArgumentEntry {
                    id: id.to_string(),
                    base_score: s,
                })
                .collect(),
            attacks: pairs(&mut q.attacks()),
            supports: pairs(&mut q.supports()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::quartet;

    fn id(s: &str) -> ArgumentId {
        ArgumentId::new(s).unwrap()
    }

    fn ids(v: &[&str]) -> BTreeSet<ArgumentId> {
        v.iter().map(|s| id(s)).collect()
    }

    #[test]
    fn quartet_builds() {
        let q = quartet();
        assert_eq!(q.num_arguments(), 4);
        assert_eq!(q.edges().len(), 5);
        assert_eq!(q.attacks().count(), 2);
        assert_eq!(q.base_score(&id("alpha")), Some(0.8));
    }

    #[test]
    fn empty_is_valid() {
        let q = Qbaf::build(vec![], vec![], vec![], &BTreeMap::new()).unwrap();
        assert_eq!(q, Qbaf::empty());
        q.validate().unwrap();
    }

    #[test]
    fn construction_errors() {
        let err = Qbaf::builder()
            .argument("a", 0.5)
            .argument("b", 0.5)
            .attack("a", "b")
            .support("a", "b")
            .build()
            .unwrap_err();
        assert!(matches!(err, QbafError::PolarityConflict { .. }));

        let err = Qbaf::builder().argument("a", 0.5).attack("a", "z").build();
        assert!(matches!(err, Err(QbafError::UnknownEndpoint { .. })));

        let err = Qbaf::builder().argument("a", 1.5).build();
        assert!(matches!(err, Err(QbafError::BadBaseScore { value: Some(v), .. }) if v == 1.5));

        let err = Qbaf::builder().argument("a", f64::NAN).build();
        assert!(matches!(err, Err(QbafError::BadBaseScore { .. })));

        let err = Qbaf::builder().argument("a", 0.5).support("a", "a").build();
        assert!(matches!(err, Err(QbafError::SelfLoop(_))));

        let err = Qbaf::builder()
            .argument("a", 0.5)
            .argument("a", 0.2)
            .build();
        assert!(matches!(err, Err(QbafError::DuplicateArgumentId(_))));

        let err = Qbaf::build(vec![id("a")], vec![], vec![], &BTreeMap::new());
        assert!(matches!(
            err,
            Err(QbafError::BadBaseScore { value: None, .. })
        ));

        assert!(ArgumentId::new("a b").is_err());
        assert!(ArgumentId::new("a,b").is_err());
        assert!(ArgumentId::new("").is_err());
    }

    #[test]
    fn duplicate_edges_collapse() {
        let q = Qbaf::builder()
            .argument("a", 0.5)
            .argument("b", 0.5)
            .support("a", "b")
            .support("a", "b")
            .build()
            .unwrap();
        assert_eq!(q.edges().len(), 1);
    }

    #[test]
    fn natural_order() {
        let mut v = [id("s10"), id("s9"), id("c1"), id("s8"), id("s0"), id("s01")];
        v.sort();
        let names: Vec<_> = v.iter().map(|a| a.as_str()).collect();
        assert_eq!(names, ["c1", "s0", "s01", "s8", "s9", "s10"]);
    }

    #[test]
    fn restrict_arguments_induces_subgraph() {
        let q = quartet();
        let r = q
            .restrict_arguments(&ids(&["alpha", "beta", "gamma"]))
            .unwrap();
        assert_eq!(r.num_arguments(), 3);
        let edges: Vec<_> = r.edges().iter().cloned().collect();
        assert_eq!(
            edges,
            vec![
                Edge::attack(id("beta"), id("alpha")),
                Edge::support(id("gamma"), id("alpha")),
            ]
        );
        let all: BTreeSet<_> = q.arguments().cloned().collect();
        assert_eq!(q.restrict_arguments(&all).unwrap(), q);
        assert_eq!(
            q.restrict_arguments(&BTreeSet::new()).unwrap(),
            Qbaf::empty()
        );
        assert!(matches!(
            q.restrict_arguments(&ids(&["omega"])),
            Err(QbafError::UnknownArgument(_))
        ));
    }

    #[test]
    fn restrict_edges_keeps_arguments() {
        let q = quartet();
        let none = q.restrict_edges(&BTreeSet::new()).unwrap();
        assert_eq!(none.num_arguments(), 4);
        assert!(none.edges().is_empty());
        assert_eq!(q.restrict_edges(q.edges()).unwrap(), q);

        let dropped = Edge::support(id("delta"), id("alpha"));
        let keep: BTreeSet<_> = q
            .edges()
            .iter()
            .filter(|e| **e != dropped)
            .cloned()
            .collect();
        let r = q.restrict_edges(&keep).unwrap();
        assert_eq!(r.edges().len(), 4);
        assert!(!r.contains_edge(&dropped));
        assert_eq!(r.base_scores(), q.base_scores());

        let bogus: BTreeSet<_> = [Edge::attack(id("alpha"), id("beta"))].into();
        assert!(matches!(
            q.restrict_edges(&bogus),
            Err(QbafError::UnknownEdge(_))
        ));
    }

    #[test]
    fn base_score_override() {
        let q = quartet();
        assert_eq!(q.with_base_scores(q.base_scores()).unwrap(), q);

        let mut tau = q.base_scores().clone();
        tau.insert(id("beta"), 0.0);
        let r = q.with_base_scores(&tau).unwrap();
        assert_eq!(r.base_score(&id("beta")), Some(0.0));
        assert_eq!(r.edges(), q.edges());

        tau.remove(&id("delta"));
        assert!(matches!(
            q.with_base_scores(&tau),
            Err(QbafError::DomainMismatch { .. })
        ));

        let mut bad = q.base_scores().clone();
        bad.insert(id("beta"), -0.1);
        assert!(matches!(
            q.with_base_scores(&bad),
            Err(QbafError::BadBaseScore { .. })
        ));
    }

    #[test]
    fn json_round_trip_and_errors() {
        let q = quartet();
        assert_eq!(Qbaf::from_json(&q.to_json()).unwrap(), q);

        let bad = r#"{"arguments":[{"id":"a","base_score":1.5}],"attacks":[],"supports":[]}"#;
        assert!(matches!(
            Qbaf::from_json(bad),
            Err(QbafError::BadBaseScore { .. })
        ));

        let broken = "{\n  \"arguments\": [\n    {\"id\": \"a\" \"base_score\": 0.5}\n  ]\n}";
        match Qbaf::from_json(broken) {
            Err(QbafError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }

        let doc = r#"{"arguments":[{"id":"s0","base_score":0.5},{"id":"c0","base_score":0}],
                      "attacks":[],"supports":[["s0","c0"],["c0","s0"]]}"#;
        let q = Qbaf::from_json(doc).unwrap();
        assert_eq!(q.supports().count(), 2);
    }
}
