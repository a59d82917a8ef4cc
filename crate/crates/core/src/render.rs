//! Graphviz rendering of attribution reports.
//!
//! Attacks are drawn solid and supports dashed. Positive scores use a blue
//! ramp, negative scores a red ramp, and scores below the negligible
//! threshold grey. Ramp step (and, for edge reports, pen width) grows
//! linearly with |value| divided by the largest displayed |value| of the
//! report. The topic argument gets a double border.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::attribution::{AttributionReport, AttributionTarget, Kind};
use crate::error::RenderError;
use crate::qbaf::{Edge, Polarity, Qbaf};

const BLUES: [&str; 5] = ["#c6dbef", "#9ecae1", "#6baed6", "#3182bd", "#08519c"];
const REDS: [&str; 5] = ["#fcbba1", "#fc9272", "#fb6a4a", "#de2d26", "#a50f15"];
const GREY: &str = "#bdbdbd";
const BLANK: &str = "#ffffff";
const INK: &str = "#000000";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderSpec {
    pub negligible_threshold: f64,
}

impl RenderSpec {
    pub const DEFAULT_NEGLIGIBLE: f64 = 1e-3;

    pub fn new(negligible_threshold: f64) -> Result<Self, RenderError> {
        if negligible_threshold.is_finite() && negligible_threshold >= 0.0 {
            Ok(RenderSpec {
                negligible_threshold,
            })
        } else {
            Err(RenderError::BadThreshold)
        }
    }
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            negligible_threshold: Self::DEFAULT_NEGLIGIBLE,
        }
    }
}

/// How one element is painted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shade {
    Positive { step: usize, magnitude: f64 },
    Negative { step: usize, magnitude: f64 },
    Negligible,
}

impl Shade {
    fn color(&self) -> &'static str {
        match *self {
            Shade::Positive { step, .. } => BLUES[step],
            Shade::Negative { step, .. } => REDS[step],
            Shade::Negligible => GREY,
        }
    }

    fn magnitude(&self) -> f64 {
        match *self {
            Shade::Positive { magnitude, .. } | Shade::Negative { magnitude, .. } => magnitude,
            Shade::Negligible => 0.0,
        }
    }

    fn is_dark(&self) -> bool {
        matches!(*self, Shade::Positive { step, .. } | Shade::Negative { step, .. } if step >= 3)
    }
}

/// Shades for every report entry, in report order.
pub fn shades(report: &AttributionReport, spec: &RenderSpec) -> Vec<Shade> {
    let displayed = |v: f64| v.abs() >= spec.negligible_threshold && v != 0.0;
    let max = report
        .entries
        .iter()
        .map(|e| e.value)
        .filter(|&v| displayed(v))
        .fold(0.0f64, |m, v| m.max(v.abs()));
    report
        .entries
        .iter()
        .map(|e| {
            if max == 0.0 || !displayed(e.value) {
                return Shade::Negligible;
            }
            let magnitude = e.value.abs() / max;
            let step = ((magnitude * BLUES.len() as f64).ceil() as usize).clamp(1, BLUES.len()) - 1;
            if e.value > 0.0 {
                Shade::Positive { step, magnitude }
            } else {
                Shade::Negative { step, magnitude }
            }
        })
        .collect()
}

pub fn render_dot(
    q: &Qbaf,
    report: &AttributionReport,
    spec: &RenderSpec,
) -> Result<String, RenderError> {
    if !q.contains(&report.topic) {
        return Err(RenderError::TargetMismatch(report.topic.to_string()));
    }
    for e in &report.entries {
        let ok = match &e.target {
            AttributionTarget::Argument(a) => q.contains(a) && *a != report.topic,
            AttributionTarget::Edge(edge) => q.contains_edge(edge),
        };
        if !ok {
            return Err(RenderError::TargetMismatch(e.target.to_string()));
        }
    }
    let shades = shades(report, spec);
    let mut node_paint = BTreeMap::new();
    let mut edge_paint: BTreeMap<&Edge, (Shade, f64)> = BTreeMap::new();
    for (e, shade) in report.entries.iter().zip(&shades) {
        match &e.target {
            AttributionTarget::Argument(a) => {
                node_paint.insert(a, (*shade, e.value));
            }
            AttributionTarget::Edge(edge) => {
                edge_paint.insert(edge, (*shade, e.value));
            }
        }
    }

    let mut out = String::new();
    let kind = match report.kind {
        Kind::Arguments => "argument",
        Kind::Relations => "relation",
    };
    writeln!(out, "digraph qbaf {{").unwrap();
    writeln!(
        out,
        "  // {kind} attributions for topic {} ({})",
        report.topic,
        report.method.name()
    )
    .unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(
        out,
        "  node [shape=ellipse, style=filled, fillcolor=\"{BLANK}\", fontname=\"Helvetica\"];"
    )
    .unwrap();
    writeln!(out, "  edge [color=\"{INK}\", penwidth=1];").unwrap();

    for a in q.arguments() {
        let mut attrs = Vec::new();
        match node_paint.get(a) {
            Some((shade, value)) => {
                attrs.push(format!("label={}", quote(&format!("{a}\n{value:.6}"))));
                attrs.push(format!("fillcolor=\"{}\"", shade.color()));
                if shade.is_dark() {
                    attrs.push("fontcolor=\"#ffffff\"".into());
                }
            }
            None => attrs.push(format!("label={}", quote(a.as_str()))),
        }
        if *a == report.topic {
            attrs.push("peripheries=2".into());
        }
        writeln!(out, "  {} [{}];", quote(a.as_str()), attrs.join(", ")).unwrap();
    }

    for edge in q.edges() {
        let mut attrs = vec![match edge.polarity {
            Polarity::Attack => "style=solid".to_owned(),
            Polarity::Support => "style=dashed".to_owned(),
        }];
        if let Some((shade, value)) = edge_paint.get(edge) {
            attrs.push(format!("color=\"{}\"", shade.color()));
            attrs.push(format!("penwidth={:.2}", 1.0 + 4.0 * shade.magnitude()));
            attrs.push(format!("label={}", quote(&format!("{value:.6}"))));
        }
        writeln!(
            out,
            "  {} -> {} [{}];",
            quote(edge.source.as_str()),
            quote(edge.target.as_str()),
            attrs.join(", ")
        )
        .unwrap();
    }
    out.push_str("}\n");
    Ok(out)
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}
