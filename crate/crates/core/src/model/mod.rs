//! Domain types for STPA-SafeSec analyses and HTD test hierarchies.
//!
//! Everything here is plain data plus the [`ModelBundle`] registry. Cross
//! references are stored as identifiers and only resolved by
//! [`crate::trace::validate`], so files may be loaded in any order.

mod bundle;
mod htd;
mod id;
mod stpa;

pub use bundle::{Item, ItemKind, ItemRef, ModelBundle, ModelError};
pub use htd::{
    AttackKind, AttackSpec, CaseAttribute, DroopSpec, ExperimentSpecification, InitialState,
    Parameter, TestSpecification, Unit, Value,
};
pub use id::{is_identifier, Id, IdPattern, SourcePos};
pub use stpa::{
    builtin_threats, constraint_from_hazard, CausalFactor, Component, ComponentKind, Constraint,
    ControlAction, ControlLoop, FactorClass, Guideword, Hazard, HazardScenario,
    HazardousControlAction, Link, LinkKind, Loss, Node, NodeRole, SecurityConstraint,
    ThreatClass, ThreatTemplate,
};
