//! Hazard-driven test derivation for BEMS-controlled low-voltage feeders.
//!
//! The crate covers the path from an STPA-SafeSec hazard analysis to
//! executed experiments:
//!
//! - [`model`]: analysis and test-description data types.
//! - [`dsl`]: parsers and serializers for the text formats.
//! - [`trace`]: validation, HCA tables, scenario traces and test skeletons.
//! - [`gridsim`]: power flow, delayed droop control and oscillation detection.
//! - [`runner`]: parameter sweeps, pass/fail criteria and reports.

pub mod dsl;
pub mod gridsim;
pub mod model;
pub mod runner;
pub mod trace;
