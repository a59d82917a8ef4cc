//! Strengths and attribution explanations for quantitative bipolar
//! argumentation frameworks under the Quadratic Energy gradual semantics.
//!
//! * [`qbaf`]: the framework data model, restrictions and JSON format.
//! * [`semantics`]: the QE fixed-point solver.
//! * [`truth`]: truth-discovery report data and the frameworks it induces.
//! * [`attribution`]: removal and Shapley attribution to arguments and edges.
//! * [`render`]: Graphviz output of attribution reports.
//! * [`cli`]: the `qbafx` command-line front end.

pub mod attribution;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod qbaf;
pub mod render;
pub mod semantics;
pub mod truth;

pub use attribution::{explain_all, AttributionReport, AttributionTarget, Kind, Method};
pub use error::{AttributionError, QbafError, RenderError, SolveError, TdnError};
pub use qbaf::{ArgumentId, Edge, Polarity, Qbaf};
pub use render::{render_dot, RenderSpec};
pub use semantics::{solve_qe, SolveOutcome, SolverConfig, StrengthMap};
pub use truth::{induce_qbaf, parse_reports, Tdn};
