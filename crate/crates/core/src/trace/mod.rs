//! Cross-reference validation and traceability from hazard scenarios to
//! tests: HCA matrices, scenario chains, test skeletons and coverage.

mod chain;
mod coverage;
mod skeleton;
mod table;
mod validate;

use thiserror::Error;

pub use chain::{scenario_trace, write_trace_csv, TraceChain, TRACE_CSV_HEADER};
pub use coverage::{coverage_report, Coverage};
pub use skeleton::{gen_test_skeleton, SkeletonDraft};
pub use table::{hca_table, level_label, CellEntry, HcaTable};
pub use validate::{error_count, validate, warning_count, Finding, Rule, Severity};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("unknown control action `{0}`")]
    UnknownAction(String),
    #[error("unknown hazard scenario `{0}`")]
    UnknownScenario(String),
}
