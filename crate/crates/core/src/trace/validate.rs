use std::collections::HashSet;
use std::fmt;

use crate::model::{Id, ItemKind, ModelBundle, SourcePos};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    /// Hazards lead to declared losses; constraints negate declared hazards.
    R1,
    /// HCAs cause declared hazards and use a declared action level.
    R2,
    /// Causal factors sit on a declared link or node.
    R3,
    /// Components realize declared links or nodes.
    R4,
    /// Threats apply to declared components.
    R5,
    /// Scenario references resolve; hazards and HCAs are non-empty.
    R6,
    /// Every hazard is covered by a scenario (warning).
    R7,
    /// Every scenario has a test specification (warning).
    R8,
    /// Test and experiment specifications reference declared parents.
    R9,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub rule: Rule,
    pub severity: Severity,
    pub subject: Id,
    pub message: String,
    /// Declaration site of the subject; `None` for items built in code.
    pub pos: Option<SourcePos>,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(pos) = &self.pos {
            write!(f, "{pos}: ")?;
        }
        write!(f, "{}[{}] {}: {}", self.severity, self.rule, self.subject, self.message)
    }
}

pub fn error_count(findings: &[Finding]) -> usize {
    findings.iter().filter(|f| f.severity == Severity::Error).count()
}

pub fn warning_count(findings: &[Finding]) -> usize {
    findings.iter().filter(|f| f.severity == Severity::Warning).count()
}

struct Sink<'a> {
    bundle: &'a ModelBundle,
    out: Vec<Finding>,
}

impl Sink<'_> {
    fn push(&mut self, rule: Rule, severity: Severity, kind: ItemKind, subject: &Id, message: String) {
        self.out.push(Finding {
            rule,
            severity,
            subject: subject.clone(),
            message,
            pos: self.bundle.position(kind, subject.as_str()).cloned(),
        });
    }

    fn error(&mut self, rule: Rule, kind: ItemKind, subject: &Id, message: String) {
        self.push(rule, Severity::Error, kind, subject, message);
    }

    fn missing(&mut self, rule: Rule, kind: ItemKind, subject: &Id, what: ItemKind, ids: &[Id]) {
        for id in ids {
            if !self.bundle.contains(what, id.as_str()) {
                self.error(rule, kind, subject, format!("unknown {what} `{id}`"));
            }
        }
    }
}

fn control_element_exists(bundle: &ModelBundle, name: &str) -> bool {
    bundle.link(name).is_some() || bundle.has_node(name)
}

/// Checks cross references and completeness. An empty result means the
/// bundle is valid. Findings are ordered by rule, then by registration order.
pub fn validate(bundle: &ModelBundle) -> Vec<Finding> {
    let mut s = Sink {
        bundle,
        out: Vec::new(),
    };

    for h in bundle.hazards() {
        s.missing(Rule::R1, ItemKind::Hazard, &h.id, ItemKind::Loss, &h.leads_to);
    }
    for c in bundle.constraints() {
        s.missing(Rule::R1, ItemKind::Constraint, &c.id, ItemKind::Hazard, std::slice::from_ref(&c.negates));
    }

    for h in bundle.hcas() {
        s.missing(Rule::R2, ItemKind::Hca, &h.id, ItemKind::Hazard, std::slice::from_ref(&h.causes));
        match bundle.action(&h.action) {
            None => s.error(Rule::R2, ItemKind::Hca, &h.id, format!("unknown control action `{}`", h.action)),
            Some(a) if !a.has_level(&h.level) => s.error(
                Rule::R2,
                ItemKind::Hca,
                &h.id,
                format!("`{}` is not a level of action `{}`", h.level, h.action),
            ),
            Some(_) => {}
        }
    }

    for f in bundle.factors() {
        if !control_element_exists(bundle, &f.at) {
            s.error(Rule::R3, ItemKind::Factor, &f.id, format!("unknown link or node `{}`", f.at));
        }
    }

    for c in bundle.components() {
        for r in &c.realizes {
            if !control_element_exists(bundle, r) {
                s.error(Rule::R4, ItemKind::Component, &c.id, format!("realizes unknown link or node `{r}`"));
            }
        }
    }

    for t in bundle.threats() {
        s.missing(Rule::R5, ItemKind::Threat, &t.id, ItemKind::Component, &t.applies_to);
    }

    for sc in bundle.scenarios() {
        let k = ItemKind::Scenario;
        if sc.hazards.is_empty() {
            s.error(Rule::R6, k, &sc.id, "lists no hazards".into());
        }
        if sc.hcas.is_empty() {
            s.error(Rule::R6, k, &sc.id, "lists no hazardous control actions".into());
        }
        s.missing(Rule::R6, k, &sc.id, ItemKind::Hazard, &sc.hazards);
        s.missing(Rule::R6, k, &sc.id, ItemKind::Loss, &sc.losses);
        s.missing(Rule::R6, k, &sc.id, ItemKind::Hca, &sc.hcas);
        s.missing(Rule::R6, k, &sc.id, ItemKind::Factor, &sc.factors);
        s.missing(Rule::R6, k, &sc.id, ItemKind::Component, &sc.components);
        s.missing(Rule::R6, k, &sc.id, ItemKind::Threat, &sc.threats);
    }

    let covered: HashSet<&Id> = bundle.scenarios().iter().flat_map(|sc| &sc.hazards).collect();
    for h in bundle.hazards() {
        if !covered.contains(&h.id) {
            s.push(
                Rule::R7,
                Severity::Warning,
                ItemKind::Hazard,
                &h.id,
                "not covered by any hazard scenario".into(),
            );
        }
    }

    let tested: HashSet<&Id> = bundle.test_specs().iter().map(|t| &t.from_scenario).collect();
    for sc in bundle.scenarios() {
        if !tested.contains(&sc.id) {
            s.push(
                Rule::R8,
                Severity::Warning,
                ItemKind::Scenario,
                &sc.id,
                "has no test specification".into(),
            );
        }
    }

    for t in bundle.test_specs() {
        s.missing(
            Rule::R9,
            ItemKind::TestSpec,
            &t.id,
            ItemKind::Scenario,
            std::slice::from_ref(&t.from_scenario),
        );
    }
    for e in bundle.experiments() {
        s.missing(
            Rule::R9,
            ItemKind::Experiment,
            &e.id,
            ItemKind::TestSpec,
            std::slice::from_ref(&e.from_test),
        );
        if let Some(ts) = bundle.test_spec(e.from_test.as_str()) {
            for p in &ts.controllable {
                if e.binding(&p.name).is_none() {
                    s.error(
                        Rule::R9,
                        ItemKind::Experiment,
                        &e.id,
                        format!("does not bind controllable parameter `{}` of {}", p.name, ts.id),
                    );
                }
            }
        }
    }

    s.out
}
