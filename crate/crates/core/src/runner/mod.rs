//! Experiment execution: sweep expansion, simulation runs, hazard and loss
//! verdicts, CSV and report output.

mod criteria;
mod emit;
mod execute;
mod sweep;

use std::path::PathBuf;

use thiserror::Error;

use crate::dsl::DslError;

pub use criteria::{
    evaluate_criteria, losses_for, sort_ids, CriterionId, CriterionOutcome, Evaluation, STABLE_STEP_TOLERANCE,
};
pub use emit::{emit_csv, emit_report, RESULT_CSV_HEADER};
pub use execute::{
    attacked_set, execute, execute_with_feeder, load_step_for, resolve_point, ResolvedPoint, ResultSet, RunResult,
    Verdict,
};
pub use sweep::{expand_sweep, RunPoint};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunnerError {
    #[error("controllable parameter `{0}` is not bound by the experiment")]
    UnboundParameter(String),
    #[error("parameter `{0}` is bound to an empty list")]
    EmptyBinding(String),
    #[error("unsupported sweep parameter `{0}` (expected d, d_<link>, target, v_i or n)")]
    UnsupportedParameter(String),
    #[error("invalid value {value} for `{name}`: {reason}")]
    InvalidBinding { name: String, value: String, reason: String },
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("unknown test specification `{0}`")]
    UnknownTestSpec(String),
    #[error("unknown droop curve `{0}`")]
    UnknownCurve(String),
    #[error("feeder has no bems")]
    NoBems,
    #[error("cannot read feeder {}: {reason}", path.display())]
    FeederIo { path: PathBuf, reason: String },
    #[error("{source}")]
    Feeder { path: PathBuf, source: DslError },
    #[error("{0}")]
    InvalidSetup(String),
}
