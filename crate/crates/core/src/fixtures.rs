//! Small frameworks shipped with the crate.

use crate::qbaf::Qbaf;
use crate::truth::{induce_qbaf, parse_reports};

pub const QUARTET_JSON: &str = include_str!("../fixtures/quartet.json");
pub const CASE_STUDY_JSON: &str = include_str!("../fixtures/case_study.json");
pub const CASE_STUDY_REPORTS_CSV: &str = include_str!("../fixtures/case_study_reports.csv");

/// Four arguments: beta attacks delta and alpha, gamma supports both,
/// delta supports alpha.
pub fn quartet() -> Qbaf {
    Qbaf::from_json(QUARTET_JSON).expect("bundled fixture is valid")
}

/// Truth-discovery case study with sources `s0..s10` and claims `c0..c5`.
pub fn case_study() -> Qbaf {
    Qbaf::from_json(CASE_STUDY_JSON).expect("bundled fixture is valid")
}

/// The case study induced from its report data, with `object=value` claim ids.
pub fn case_study_induced() -> Qbaf {
    let tdn = parse_reports(CASE_STUDY_REPORTS_CSV).expect("bundled fixture is valid");
    induce_qbaf(&tdn).expect("bundled fixture is valid")
}
