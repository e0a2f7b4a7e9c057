//! Holistic Test Description levels: test specifications and the experiment
//! specifications that realize them.

use std::fmt;
use std::path::PathBuf;

use super::id::Id;

/// Unit suffixes accepted after numeric values. Units are checked, never converted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Seconds,
    Volts,
    Watts,
    Vars,
    Ohms,
}

impl Unit {
    pub const ALL: [Unit; 5] = [Unit::Seconds, Unit::Volts, Unit::Watts, Unit::Vars, Unit::Ohms];

    pub fn symbol(self) -> &'static str {
        match self {
            Unit::Seconds => "s",
            Unit::Volts => "V",
            Unit::Watts => "W",
            Unit::Vars => "var",
            Unit::Ohms => "ohm",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Unit::ALL.into_iter().find(|u| u.symbol() == s)
    }
}

/// A parameter value: either a number or a symbolic name such as a bus id.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Name(String),
}

impl Value {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(v) => Some(*v),
            Value::Name(_) => None,
        }
    }

    pub fn as_name(&self) -> Option<&str> {
        match self {
            Value::Name(s) => Some(s),
            Value::Number(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(v) => f.write_str(&crate::dsl::format_number(*v)),
            Value::Name(s) => f.write_str(s),
        }
    }
}

/// A named parameter with its list of values, e.g. `d [0.1, 1.0] s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    pub name: String,
    pub values: Vec<Value>,
    pub unit: Option<Unit>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    /// Volts.
    pub nominal_voltage: f64,
    /// Fraction of nominal, strictly between 0 and 1.
    pub tolerance: f64,
    /// Seconds.
    pub initial_delay: f64,
}

impl InitialState {
    pub fn is_valid(&self) -> bool {
        self.nominal_voltage > 0.0
            && self.tolerance > 0.0
            && self.tolerance < 1.0
            && self.initial_delay >= 0.0
    }
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState {
            nominal_voltage: 230.0,
            tolerance: 0.10,
            initial_delay: 0.0,
        }
    }
}

/// Test-case scoping attributes carried as free text on a test specification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseAttribute {
    /// System under Test.
    Sut,
    /// Object under Investigation.
    Oui,
    /// Domain under Investigation.
    Dui,
    /// Function under Test.
    Fut,
    /// Function under Investigation.
    Fui,
    /// Purpose of Investigation.
    Poi,
}

impl CaseAttribute {
    pub const ALL: [CaseAttribute; 6] = [
        CaseAttribute::Sut,
        CaseAttribute::Oui,
        CaseAttribute::Dui,
        CaseAttribute::Fut,
        CaseAttribute::Fui,
        CaseAttribute::Poi,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            CaseAttribute::Sut => "sut",
            CaseAttribute::Oui => "oui",
            CaseAttribute::Dui => "dui",
            CaseAttribute::Fut => "fut",
            CaseAttribute::Fui => "fui",
            CaseAttribute::Poi => "poi",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        CaseAttribute::ALL.into_iter().find(|a| a.keyword() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestSpecification {
    pub id: Id,
    pub from_scenario: Id,
    pub title: String,
    pub rationale: String,
    pub target_measures: Vec<String>,
    pub controllable: Vec<Parameter>,
    pub uncontrollable: Vec<String>,
    pub measured: Vec<String>,
    pub initial_state: InitialState,
    pub uncertainty_sources: Vec<String>,
    pub case_attributes: Vec<(CaseAttribute, String)>,
}

impl TestSpecification {
    pub fn controllable(&self, name: &str) -> Option<&Parameter> {
        self.controllable.iter().find(|p| p.name == name)
    }
}

/// Droop law used by an experiment: a curve name known to the feeder (or the
/// built-in `default`), or inline per-unit breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub enum DroopSpec {
    Named(String),
    Inline([f64; 4]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackKind {
    /// Adds `magnitude` seconds to the measurement age while active.
    ExtraDelay,
    /// Freezes the reading at its last pre-attack value while active.
    Drop,
}

impl AttackKind {
    pub fn keyword(self) -> &'static str {
        match self {
            AttackKind::ExtraDelay => "extra_delay",
            AttackKind::Drop => "drop",
        }
    }
}

/// An availability attack on the measurement channel of one BEMS.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackSpec {
    pub kind: AttackKind,
    /// BEMS bus id.
    pub target: String,
    /// Seconds.
    pub start: f64,
    /// Seconds.
    pub end: f64,
    /// Extra delay in seconds; `None` for drops.
    pub magnitude: Option<f64>,
}

impl AttackSpec {
    pub fn is_active(&self, t: f64) -> bool {
        t >= self.start && t < self.end
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpecification {
    pub id: Id,
    pub from_test: Id,
    /// As written; relative paths resolve against the declaring file.
    pub feeder_path: PathBuf,
    pub dt: f64,
    pub duration: f64,
    pub droop: DroopSpec,
    /// Sweep bindings in declaration order.
    pub sweep: Vec<Parameter>,
    pub attacks: Vec<AttackSpec>,
}

impl ExperimentSpecification {
    pub fn binding(&self, name: &str) -> Option<&Parameter> {
        self.sweep.iter().find(|p| p.name == name)
    }
}
