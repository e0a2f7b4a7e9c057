//! STPA-SafeSec analysis artifacts: losses through hazard scenarios.

use super::id::Id;

#[derive(Debug, Clone, PartialEq)]
pub struct Loss {
    pub id: Id,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hazard {
    pub id: Id,
    pub description: String,
    /// Losses this hazard can lead to, in declaration order.
    pub leads_to: Vec<Id>,
}

/// A safety constraint obtained by negating a hazard.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub id: Id,
    pub negates: Id,
    pub text: String,
}

/// Builds the template constraint for a hazard: `C<n>` for `H<n>`.
pub fn constraint_from_hazard(hazard: &Hazard) -> Constraint {
    let digits = hazard.id.digit_suffix().unwrap_or("0");
    Constraint {
        id: Id::new(format!("C{digits}")),
        negates: hazard.id.clone(),
        text: format!("The system shall not enter state: {}", hazard.description),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    Controller,
    Actuator,
    Sensor,
    Process,
}

impl NodeRole {
    pub const ALL: [NodeRole; 4] = [
        NodeRole::Controller,
        NodeRole::Actuator,
        NodeRole::Sensor,
        NodeRole::Process,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            NodeRole::Controller => "controller",
            NodeRole::Actuator => "actuator",
            NodeRole::Sensor => "sensor",
            NodeRole::Process => "process",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub role: NodeRole,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlAction {
    pub name: String,
    /// Ordered control levels, e.g. `max_injection .. max_consume`.
    pub levels: Vec<String>,
}

impl ControlAction {
    pub fn has_level(&self, level: &str) -> bool {
        self.levels.iter().any(|l| l == level)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    Command,
    Feedback,
}

impl LinkKind {
    pub fn keyword(self) -> &'static str {
        match self {
            LinkKind::Command => "command",
            LinkKind::Feedback => "feedback",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub id: Id,
    pub from: String,
    pub to: String,
    pub kind: LinkKind,
}

/// One control loop of the generic control structure.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlLoop {
    pub id: Id,
    pub nodes: Vec<Node>,
    pub actions: Vec<ControlAction>,
    pub links: Vec<Link>,
}

impl ControlLoop {
    pub fn has_node(&self, name: &str) -> bool {
        self.nodes.iter().any(|n| n.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&ControlAction> {
        self.actions.iter().find(|a| a.name == name)
    }
}

/// The four guidewords of the hazardous control action matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Guideword {
    AnyTime,
    TooEarly,
    TooLate,
    NotApplied,
}

impl Guideword {
    pub const ALL: [Guideword; 4] = [
        Guideword::AnyTime,
        Guideword::TooEarly,
        Guideword::TooLate,
        Guideword::NotApplied,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Guideword::AnyTime => "any_time",
            Guideword::TooEarly => "too_early",
            Guideword::TooLate => "too_late",
            Guideword::NotApplied => "not_applied",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Guideword::AnyTime => "Any time",
            Guideword::TooEarly => "Too early",
            Guideword::TooLate => "Too late",
            Guideword::NotApplied => "Not applied",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Guideword::ALL.into_iter().find(|g| g.keyword() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HazardousControlAction {
    pub id: Id,
    pub action: String,
    pub level: String,
    pub guideword: Guideword,
    pub causes: Id,
    /// Rendered parenthesized in the HCA matrix. Carried without semantics.
    pub qualified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorClass {
    Delay,
    InadequateOperation,
    Other,
}

impl FactorClass {
    pub fn keyword(self) -> &'static str {
        match self {
            FactorClass::Delay => "delay",
            FactorClass::InadequateOperation => "inadequate_operation",
            FactorClass::Other => "other",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        [
            FactorClass::Delay,
            FactorClass::InadequateOperation,
            FactorClass::Other,
        ]
        .into_iter()
        .find(|c| c.keyword() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalFactor {
    pub id: Id,
    pub class: FactorClass,
    pub description: String,
    /// A link id or a control-loop node name.
    pub at: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentKind {
    Device,
    Network,
}

impl ComponentKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ComponentKind::Device => "device",
            ComponentKind::Network => "network",
        }
    }
}

/// A component-layer element realizing links or nodes of the control layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub id: Id,
    pub kind: ComponentKind,
    pub realizes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThreatClass {
    Availability,
    Integrity,
    Confidentiality,
}

impl ThreatClass {
    pub fn keyword(self) -> &'static str {
        match self {
            ThreatClass::Availability => "availability",
            ThreatClass::Integrity => "integrity",
            ThreatClass::Confidentiality => "confidentiality",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        [
            ThreatClass::Availability,
            ThreatClass::Integrity,
            ThreatClass::Confidentiality,
        ]
        .into_iter()
        .find(|c| c.keyword() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecurityConstraint {
    pub id: Id,
    pub description: String,
    pub class: ThreatClass,
    pub applies_to: Vec<Id>,
}

/// Entry of the built-in generic threat catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThreatTemplate {
    pub id: &'static str,
    pub description: &'static str,
    pub class: ThreatClass,
}

/// The representative generic threats shipped with the tool.
pub fn builtin_threats() -> &'static [ThreatTemplate] {
    const CATALOG: [ThreatTemplate; 3] = [
        ThreatTemplate {
            id: "CSTR-A-1",
            description: "Communication delay",
            class: ThreatClass::Availability,
        },
        ThreatTemplate {
            id: "CSTR-A-2",
            description: "Communication drop",
            class: ThreatClass::Availability,
        },
        ThreatTemplate {
            id: "CSTR-I-1",
            description: "Message modification",
            class: ThreatClass::Integrity,
        },
    ];
    &CATALOG
}

#[derive(Debug, Clone, PartialEq)]
pub struct HazardScenario {
    pub id: Id,
    pub title: String,
    pub hazards: Vec<Id>,
    pub losses: Vec<Id>,
    pub hcas: Vec<Id>,
    pub factors: Vec<Id>,
    pub components: Vec<Id>,
    pub threats: Vec<Id>,
    pub safety_constraint: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hazard(id: &str, description: &str) -> Hazard {
        Hazard {
            id: id.into(),
            description: description.into(),
            leads_to: vec!["L1".into()],
        }
    }

    #[test]
    fn negation_template() {
        let c = constraint_from_hazard(&hazard("H3", "Voltage Oscillations"));
        assert_eq!(c.id, "C3");
        assert_eq!(c.negates, "H3");
        assert_eq!(c.text, "The system shall not enter state: Voltage Oscillations");
    }

    #[test]
    fn negation_keeps_hazard_reference() {
        let h = hazard("H1", "Inability to allocate in-feed power (over voltage)");
        let c = constraint_from_hazard(&h);
        assert_eq!(c.id, "C1");
        assert_eq!(c.negates, "H1");
        assert_eq!(c, constraint_from_hazard(&h));
    }

    #[test]
    fn guideword_keywords_round_trip() {
        for g in Guideword::ALL {
            assert_eq!(Guideword::from_keyword(g.keyword()), Some(g));
        }
        assert_eq!(Guideword::from_keyword("sometimes"), None);
    }
}
