use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::htd::{ExperimentSpecification, TestSpecification};
use super::id::{Id, SourcePos};
use super::stpa::*;

/// The kind of a registered item. Ids are unique per kind; link ids are
/// unique across the whole bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ItemKind {
    Loss,
    Hazard,
    Constraint,
    ControlLoop,
    Link,
    Hca,
    Factor,
    Component,
    Threat,
    Scenario,
    TestSpec,
    Experiment,
}

impl ItemKind {
    pub const ALL: [ItemKind; 12] = [
        ItemKind::Loss,
        ItemKind::Hazard,
        ItemKind::Constraint,
        ItemKind::ControlLoop,
        ItemKind::Link,
        ItemKind::Hca,
        ItemKind::Factor,
        ItemKind::Component,
        ItemKind::Threat,
        ItemKind::Scenario,
        ItemKind::TestSpec,
        ItemKind::Experiment,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ItemKind::Loss => "loss",
            ItemKind::Hazard => "hazard",
            ItemKind::Constraint => "constraint",
            ItemKind::ControlLoop => "control loop",
            ItemKind::Link => "link",
            ItemKind::Hca => "hazardous control action",
            ItemKind::Factor => "causal factor",
            ItemKind::Component => "component",
            ItemKind::Threat => "security constraint",
            ItemKind::Scenario => "hazard scenario",
            ItemKind::TestSpec => "test specification",
            ItemKind::Experiment => "experiment specification",
        }
    }
}

impl fmt::Display for ItemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { id: Id, kind: ItemKind },
}

/// An owned domain value ready for registration.
#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Loss(Loss),
    Hazard(Hazard),
    Constraint(Constraint),
    ControlLoop(ControlLoop),
    Hca(HazardousControlAction),
    Factor(CausalFactor),
    Component(Component),
    Threat(SecurityConstraint),
    Scenario(HazardScenario),
    TestSpec(TestSpecification),
    Experiment(ExperimentSpecification),
}

impl Item {
    pub fn kind(&self) -> ItemKind {
        match self {
            Item::Loss(_) => ItemKind::Loss,
            Item::Hazard(_) => ItemKind::Hazard,
            Item::Constraint(_) => ItemKind::Constraint,
            Item::ControlLoop(_) => ItemKind::ControlLoop,
            Item::Hca(_) => ItemKind::Hca,
            Item::Factor(_) => ItemKind::Factor,
            Item::Component(_) => ItemKind::Component,
            Item::Threat(_) => ItemKind::Threat,
            Item::Scenario(_) => ItemKind::Scenario,
            Item::TestSpec(_) => ItemKind::TestSpec,
            Item::Experiment(_) => ItemKind::Experiment,
        }
    }

    pub fn id(&self) -> &Id {
        match self {
            Item::Loss(x) => &x.id,
            Item::Hazard(x) => &x.id,
            Item::Constraint(x) => &x.id,
            Item::ControlLoop(x) => &x.id,
            Item::Hca(x) => &x.id,
            Item::Factor(x) => &x.id,
            Item::Component(x) => &x.id,
            Item::Threat(x) => &x.id,
            Item::Scenario(x) => &x.id,
            Item::TestSpec(x) => &x.id,
            Item::Experiment(x) => &x.id,
        }
    }
}

/// A borrowed view of a registered value, as returned by [`ModelBundle::lookup`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ItemRef<'a> {
    Loss(&'a Loss),
    Hazard(&'a Hazard),
    Constraint(&'a Constraint),
    ControlLoop(&'a ControlLoop),
    Link(&'a ControlLoop, &'a Link),
    Hca(&'a HazardousControlAction),
    Factor(&'a CausalFactor),
    Component(&'a Component),
    Threat(&'a SecurityConstraint),
    Scenario(&'a HazardScenario),
    TestSpec(&'a TestSpecification),
    Experiment(&'a ExperimentSpecification),
}

impl ItemRef<'_> {
    pub fn kind(&self) -> ItemKind {
        match self {
            ItemRef::Loss(_) => ItemKind::Loss,
            ItemRef::Hazard(_) => ItemKind::Hazard,
            ItemRef::Constraint(_) => ItemKind::Constraint,
            ItemRef::ControlLoop(_) => ItemKind::ControlLoop,
            ItemRef::Link(..) => ItemKind::Link,
            ItemRef::Hca(_) => ItemKind::Hca,
            ItemRef::Factor(_) => ItemKind::Factor,
            ItemRef::Component(_) => ItemKind::Component,
            ItemRef::Threat(_) => ItemKind::Threat,
            ItemRef::Scenario(_) => ItemKind::Scenario,
            ItemRef::TestSpec(_) => ItemKind::TestSpec,
            ItemRef::Experiment(_) => ItemKind::Experiment,
        }
    }
}

/// Registry of every parsed analysis and test artifact.
///
/// Equality compares the registered values only; source positions and the
/// cross-kind registration order are bookkeeping.
#[derive(Debug, Clone, Default)]
pub struct ModelBundle {
    losses: Vec<Loss>,
    hazards: Vec<Hazard>,
    constraints: Vec<Constraint>,
    loops: Vec<ControlLoop>,
    hcas: Vec<HazardousControlAction>,
    factors: Vec<CausalFactor>,
    components: Vec<Component>,
    threats: Vec<SecurityConstraint>,
    scenarios: Vec<HazardScenario>,
    tests: Vec<TestSpecification>,
    experiments: Vec<ExperimentSpecification>,
    index: HashMap<(ItemKind, Id), usize>,
    links: HashMap<Id, (usize, usize)>,
    positions: HashMap<(ItemKind, Id), SourcePos>,
    order: Vec<(ItemKind, usize)>,
}

impl PartialEq for ModelBundle {
    fn eq(&self, other: &Self) -> bool {
        self.losses == other.losses
            && self.hazards == other.hazards
            && self.constraints == other.constraints
            && self.loops == other.loops
            && self.hcas == other.hcas
            && self.factors == other.factors
            && self.components == other.components
            && self.threats == other.threats
            && self.scenarios == other.scenarios
            && self.tests == other.tests
            && self.experiments == other.experiments
    }
}

impl ModelBundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Registers `item`. References inside it are not checked here.
    pub fn register(&mut self, item: Item, pos: Option<SourcePos>) -> Result<(), ModelError> {
        let kind = item.kind();
        let id = item.id().clone();
        if self.index.contains_key(&(kind, id.clone())) {
            return Err(ModelError::DuplicateId { id, kind });
        }
        if let Item::ControlLoop(ref lp) = item {
            let mut seen = std::collections::HashSet::new();
            for link in &lp.links {
                if self.links.contains_key(&link.id) || !seen.insert(&link.id) {
                    return Err(ModelError::DuplicateId {
                        id: link.id.clone(),
                        kind: ItemKind::Link,
                    });
                }
            }
        }

        let slot = match item {
            Item::Loss(x) => push(&mut self.losses, x),
            Item::Hazard(x) => push(&mut self.hazards, x),
            Item::Constraint(x) => push(&mut self.constraints, x),
            Item::ControlLoop(x) => {
                let slot = self.loops.len();
                for (i, link) in x.links.iter().enumerate() {
                    self.links.insert(link.id.clone(), (slot, i));
                    if let Some(p) = &pos {
                        self.positions.insert((ItemKind::Link, link.id.clone()), p.clone());
                    }
                }
                push(&mut self.loops, x)
            }
            Item::Hca(x) => push(&mut self.hcas, x),
            Item::Factor(x) => push(&mut self.factors, x),
            Item::Component(x) => push(&mut self.components, x),
            Item::Threat(x) => push(&mut self.threats, x),
            Item::Scenario(x) => push(&mut self.scenarios, x),
            Item::TestSpec(x) => push(&mut self.tests, x),
            Item::Experiment(x) => push(&mut self.experiments, x),
        };
        self.index.insert((kind, id.clone()), slot);
        if let Some(p) = pos {
            self.positions.insert((kind, id), p);
        }
        self.order.push((kind, slot));
        Ok(())
    }

    /// Registers every item of `other`, in its registration order.
    pub fn merge(&mut self, other: ModelBundle) -> Result<(), ModelError> {
        for (item, pos) in other.into_items() {
            self.register(item, pos)?;
        }
        Ok(())
    }

    /// Consumes the bundle, yielding items in registration order.
    pub fn into_items(mut self) -> Vec<(Item, Option<SourcePos>)> {
        let order = std::mem::take(&mut self.order);
        let mut out = Vec::with_capacity(order.len());
        for (kind, slot) in order {
            let item = match kind {
                ItemKind::Loss => Item::Loss(self.losses[slot].clone()),
                ItemKind::Hazard => Item::Hazard(self.hazards[slot].clone()),
                ItemKind::Constraint => Item::Constraint(self.constraints[slot].clone()),
                ItemKind::ControlLoop => Item::ControlLoop(self.loops[slot].clone()),
                ItemKind::Hca => Item::Hca(self.hcas[slot].clone()),
                ItemKind::Factor => Item::Factor(self.factors[slot].clone()),
                ItemKind::Component => Item::Component(self.components[slot].clone()),
                ItemKind::Threat => Item::Threat(self.threats[slot].clone()),
                ItemKind::Scenario => Item::Scenario(self.scenarios[slot].clone()),
                ItemKind::TestSpec => Item::TestSpec(self.tests[slot].clone()),
                ItemKind::Experiment => Item::Experiment(self.experiments[slot].clone()),
                ItemKind::Link => unreachable!("links are registered with their loop"),
            };
            let pos = self.positions.remove(&(kind, item.id().clone()));
            out.push((item, pos));
        }
        out
    }

    /// Items in registration order, borrowed.
    pub fn items(&self) -> impl Iterator<Item = ItemRef<'_>> + '_ {
        self.order.iter().map(move |&(kind, slot)| match kind {
            ItemKind::Loss => ItemRef::Loss(&self.losses[slot]),
            ItemKind::Hazard => ItemRef::Hazard(&self.hazards[slot]),
            ItemKind::Constraint => ItemRef::Constraint(&self.constraints[slot]),
            ItemKind::ControlLoop => ItemRef::ControlLoop(&self.loops[slot]),
            ItemKind::Hca => ItemRef::Hca(&self.hcas[slot]),
            ItemKind::Factor => ItemRef::Factor(&self.factors[slot]),
            ItemKind::Component => ItemRef::Component(&self.components[slot]),
            ItemKind::Threat => ItemRef::Threat(&self.threats[slot]),
            ItemKind::Scenario => ItemRef::Scenario(&self.scenarios[slot]),
            ItemKind::TestSpec => ItemRef::TestSpec(&self.tests[slot]),
            ItemKind::Experiment => ItemRef::Experiment(&self.experiments[slot]),
            ItemKind::Link => unreachable!("links are registered with their loop"),
        })
    }

    /// Finds any registered value by id. Kinds are searched in
    /// [`ItemKind::ALL`] order; an empty or unknown id yields `None`.
    pub fn lookup(&self, id: &str) -> Option<ItemRef<'_>> {
        ItemKind::ALL
            .into_iter()
            .find_map(|kind| self.lookup_kind(kind, id))
    }

    pub fn lookup_kind(&self, kind: ItemKind, id: &str) -> Option<ItemRef<'_>> {
        if kind == ItemKind::Link {
            return self.link(id).map(|(lp, l)| ItemRef::Link(lp, l));
        }
        let slot = *self.index.get(&(kind, Id::from(id)))?;
        Some(match kind {
            ItemKind::Loss => ItemRef::Loss(&self.losses[slot]),
            ItemKind::Hazard => ItemRef::Hazard(&self.hazards[slot]),
            ItemKind::Constraint => ItemRef::Constraint(&self.constraints[slot]),
            ItemKind::ControlLoop => ItemRef::ControlLoop(&self.loops[slot]),
            ItemKind::Hca => ItemRef::Hca(&self.hcas[slot]),
            ItemKind::Factor => ItemRef::Factor(&self.factors[slot]),
            ItemKind::Component => ItemRef::Component(&self.components[slot]),
            ItemKind::Threat => ItemRef::Threat(&self.threats[slot]),
            ItemKind::Scenario => ItemRef::Scenario(&self.scenarios[slot]),
            ItemKind::TestSpec => ItemRef::TestSpec(&self.tests[slot]),
            ItemKind::Experiment => ItemRef::Experiment(&self.experiments[slot]),
            ItemKind::Link => unreachable!(),
        })
    }

    pub fn contains(&self, kind: ItemKind, id: &str) -> bool {
        self.lookup_kind(kind, id).is_some()
    }

    /// Registration slot of an item within its kind, used for ordering.
    pub fn slot(&self, kind: ItemKind, id: &str) -> Option<usize> {
        self.index.get(&(kind, Id::from(id))).copied()
    }

    pub fn position(&self, kind: ItemKind, id: &str) -> Option<&SourcePos> {
        self.positions.get(&(kind, Id::from(id)))
    }

    pub fn losses(&self) -> &[Loss] {
        &self.losses
    }
    pub fn hazards(&self) -> &[Hazard] {
        &self.hazards
    }
    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }
    pub fn control_loops(&self) -> &[ControlLoop] {
        &self.loops
    }
    pub fn hcas(&self) -> &[HazardousControlAction] {
        &self.hcas
    }
    pub fn factors(&self) -> &[CausalFactor] {
        &self.factors
    }
    pub fn components(&self) -> &[Component] {
        &self.components
    }
    pub fn threats(&self) -> &[SecurityConstraint] {
        &self.threats
    }
    pub fn scenarios(&self) -> &[HazardScenario] {
        &self.scenarios
    }
    pub fn test_specs(&self) -> &[TestSpecification] {
        &self.tests
    }
    pub fn experiments(&self) -> &[ExperimentSpecification] {
        &self.experiments
    }

    pub fn loss(&self, id: &str) -> Option<&Loss> {
        self.get(ItemKind::Loss, id).map(|i| &self.losses[i])
    }
    pub fn hazard(&self, id: &str) -> Option<&Hazard> {
        self.get(ItemKind::Hazard, id).map(|i| &self.hazards[i])
    }
    pub fn hca(&self, id: &str) -> Option<&HazardousControlAction> {
        self.get(ItemKind::Hca, id).map(|i| &self.hcas[i])
    }
    pub fn factor(&self, id: &str) -> Option<&CausalFactor> {
        self.get(ItemKind::Factor, id).map(|i| &self.factors[i])
    }
    pub fn component(&self, id: &str) -> Option<&Component> {
        self.get(ItemKind::Component, id).map(|i| &self.components[i])
    }
    pub fn threat(&self, id: &str) -> Option<&SecurityConstraint> {
        self.get(ItemKind::Threat, id).map(|i| &self.threats[i])
    }
    pub fn scenario(&self, id: &str) -> Option<&HazardScenario> {
        self.get(ItemKind::Scenario, id).map(|i| &self.scenarios[i])
    }
    pub fn test_spec(&self, id: &str) -> Option<&TestSpecification> {
        self.get(ItemKind::TestSpec, id).map(|i| &self.tests[i])
    }
    pub fn experiment(&self, id: &str) -> Option<&ExperimentSpecification> {
        self.get(ItemKind::Experiment, id).map(|i| &self.experiments[i])
    }

    pub fn link(&self, id: &str) -> Option<(&ControlLoop, &Link)> {
        let &(lp, i) = self.links.get(id)?;
        let lp = &self.loops[lp];
        Some((lp, &lp.links[i]))
    }

    /// True if some control loop declares a node with this name.
    pub fn has_node(&self, name: &str) -> bool {
        self.loops.iter().any(|lp| lp.has_node(name))
    }

    /// The control action with this name in any loop.
    pub fn action(&self, name: &str) -> Option<&ControlAction> {
        self.loops.iter().find_map(|lp| lp.action(name))
    }

    fn get(&self, kind: ItemKind, id: &str) -> Option<usize> {
        self.index.get(&(kind, Id::from(id))).copied()
    }
}

fn push<T>(v: &mut Vec<T>, x: T) -> usize {
    v.push(x);
    v.len() - 1
}
