//! Radial LV feeder simulator: power flow, Q(V) droop controllers with
//! delayed measurements, channel attacks and oscillation detection.

mod detect;
mod droop;
mod export;
mod feeder;
mod powerflow;
mod sim;

pub use crate::model::{AttackKind, AttackSpec};
pub use detect::{
    band_violations, count_reversals, detect_oscillation, max_step_change, BandKind, BandViolation,
    DetectError, OscillationMetrics, OscillationThresholds, Window, MIN_WINDOW_STEPS,
};
pub use droop::{
    check_breakpoints, droop_level, droop_q, ControlLevel, CurveDef, DroopCurve, InvalidBreakpoints,
    InvalidQMax, DEFAULT_BREAKPOINTS, DEFAULT_CURVE_NAME,
};
pub use export::write_trace_csv;
pub use feeder::{Bems, Bus, FeederModel, Line, SlackBus, TopologyError};
pub use powerflow::{solve_power_flow, PowerFlowError, PowerFlowOptions, PowerFlowSolution};
pub use sim::{run, DelayMode, LoadStep, SimConfig, SimError, SimulationTrace, Simulator};
