//! Truth-discovery networks and the QBAFs they induce.
//!
//! Sources and claims become arguments. Every report links its source and
//! claim by a pair of supports; claims giving different values for the same
//! object attack each other. Sources start at 0.5, claims at 0.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::TdnError;
use crate::qbaf::{ArgumentId, Qbaf};

pub const SOURCE_BASE_SCORE: f64 = 0.5;
pub const CLAIM_BASE_SCORE: f64 = 0.0;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Report {
    pub source: String,
    pub object: String,
    pub value: String,
}

/// A value asserted for an object.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Claim {
    pub object: String,
    pub value: String,
}

impl Claim {
    /// Canonical argument id, `object=value`.
    pub fn id(&self) -> Result<ArgumentId, TdnError> {
        Ok(ArgumentId::new(format!("{}={}", self.object, self.value))?)
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Tdn {
    sources: BTreeSet<String>,
    objects: BTreeSet<String>,
    domains: BTreeMap<String, BTreeSet<String>>,
    reports: BTreeSet<Report>,
}

impl Tdn {
    /// Builds a network whose domains are the observed values per object.
    pub fn from_reports<I>(reports: I) -> Result<Tdn, TdnError>
    where
        I: IntoIterator<Item = Report>,
    {
        Self::with_domains(reports, BTreeMap::new())
    }

    /// Builds a network with declared domains. A report on a declared object
    /// must use a declared value; undeclared objects get inferred domains.
    /// Declared objects without reports are kept.
    pub fn with_domains<I>(
        reports: I,
        declared: BTreeMap<String, BTreeSet<String>>,
    ) -> Result<Tdn, TdnError>
    where
        I: IntoIterator<Item = Report>,
    {
        let mut tdn = Tdn {
            objects: declared.keys().cloned().collect(),
            domains: declared.clone(),
            ..Tdn::default()
        };
        let mut said: BTreeMap<(String, String), String> = BTreeMap::new();
        for r in reports {
            if r.source.is_empty() || r.object.is_empty() || r.value.is_empty() {
                return Err(TdnError::Parse {
                    line: 0,
                    message: format!("report {r:?} has an empty field"),
                });
            }
            if let Some(d) = declared.get(&r.object) {
                if !d.contains(&r.value) {
                    return Err(TdnError::ValueOutsideDomain {
                        object: r.object,
                        value: r.value,
                    });
                }
            }
            match said.get(&(r.source.clone(), r.object.clone())) {
                Some(v) if *v != r.value => {
                    return Err(TdnError::InconsistentSource {
                        source_id: r.source,
                        object: r.object,
                        first: v.clone(),
                        second: r.value,
                    })
                }
                Some(_) => continue,
                None => {
                    said.insert((r.source.clone(), r.object.clone()), r.value.clone());
                }
            }
            tdn.sources.insert(r.source.clone());
            tdn.objects.insert(r.object.clone());
            tdn.domains
                .entry(r.object.clone())
                .or_default()
                .insert(r.value.clone());
            tdn.reports.insert(r);
        }
        tdn.check()?;
        Ok(tdn)
    }

    fn check(&self) -> Result<(), TdnError> {
        for r in &self.reports {
            let ok = self
                .domains
                .get(&r.object)
                .is_some_and(|d| d.contains(&r.value));
            if !ok {
                return Err(TdnError::ValueOutsideDomain {
                    object: r.object.clone(),
                    value: r.value.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn sources(&self) -> &BTreeSet<String> {
        &self.sources
    }

    pub fn objects(&self) -> &BTreeSet<String> {
        &self.objects
    }

    pub fn domains(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.domains
    }

    pub fn reports(&self) -> &BTreeSet<Report> {
        &self.reports
    }

    /// Claims that at least one source reported.
    pub fn claims(&self) -> BTreeSet<Claim> {
        self.reports
            .iter()
            .map(|r| Claim {
                object: r.object.clone(),
                value: r.value.clone(),
            })
            .collect()
    }
}

/// Parses `source,object,value` CSV (with that header) into a network.
pub fn parse_reports(text: &str) -> Result<Tdn, TdnError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| TdnError::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if headers != vec!["source", "object", "value"] {
        return Err(TdnError::Parse {
            line: 1,
            message: format!("expected header source,object,value, got {headers:?}"),
        });
    }
    let mut reports = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| TdnError::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| -> Result<String, TdnError> {
            match record.get(i) {
                Some(f) if !f.is_empty() => Ok(f.to_owned()),
                _ => Err(TdnError::Parse {
                    line,
                    message: "empty field".into(),
                }),
            }
        };
        reports.push(Report {
            source: field(0)?,
            object: field(1)?,
            value: field(2)?,
        });
    }
    Tdn::from_reports(reports)
}

/// The TD-QBAF of a network.
pub fn induce_qbaf(tdn: &Tdn) -> Result<Qbaf, TdnError> {
    let mut arguments = Vec::new();
    let mut scores = BTreeMap::new();
    for s in &tdn.sources {
        let id = ArgumentId::new(s.as_str())?;
        scores.insert(id.clone(), SOURCE_BASE_SCORE);
        arguments.push(id);
    }
    let claims: Vec<(Claim, ArgumentId)> = tdn
        .claims()
        .into_iter()
        .map(|c| {
            let id = c.id()?;
            Ok((c, id))
        })
        .collect::<Result<_, TdnError>>()?;
    for (_, id) in &claims {
        if scores.insert(id.clone(), CLAIM_BASE_SCORE).is_some() {
            return Err(TdnError::IdCollision(id.to_string()));
        }
        arguments.push(id.clone());
    }

    let mut supports = Vec::with_capacity(2 * tdn.reports.len());
    for r in &tdn.reports {
        let s = ArgumentId::new(r.source.as_str())?;
        let c = Claim {
            object: r.object.clone(),
            value: r.value.clone(),
        }
        .id()?;
        supports.push((s.clone(), c.clone()));
        supports.push((c, s));
    }

    let mut attacks = Vec::new();
    for (a, a_id) in &claims {
        for (b, b_id) in &claims {
            if a.object == b.object && a.value != b.value {
                attacks.push((a_id.clone(), b_id.clone()));
            }
        }
    }
    Ok(Qbaf::build(arguments, attacks, supports, &scores)?)
}

/// Sidecar mapping claim argument ids back to (object, value).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimLabels {
    pub claims: Vec<ClaimLabel>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimLabel {
    pub id: String,
    pub object: String,
    pub value: String,
}

impl ClaimLabels {
    pub fn for_tdn(tdn: &Tdn) -> ClaimLabels {
        ClaimLabels {
            claims: tdn
                .claims()
                .into_iter()
                .map(|c| ClaimLabel {
                    id: format!("{}={}", c.object, c.value),
                    object: c.object,
                    value: c.value,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("labels always serialize");
        s.push('\n');
        s
    }
}
