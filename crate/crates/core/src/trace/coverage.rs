use std::collections::HashSet;
use std::fmt;

use crate::model::{Id, ModelBundle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Coverage {
    pub hazards: usize,
    pub covered_hazards: usize,
    pub scenarios: usize,
    pub tested_scenarios: usize,
    pub hcas: usize,
    pub referenced_hcas: usize,
}

pub fn coverage_report(bundle: &ModelBundle) -> Coverage {
    let in_scenarios: HashSet<&Id> = bundle.scenarios().iter().flat_map(|s| &s.hazards).collect();
    let tested: HashSet<&Id> = bundle.test_specs().iter().map(|t| &t.from_scenario).collect();
    let hcas: HashSet<&Id> = bundle.scenarios().iter().flat_map(|s| &s.hcas).collect();
    Coverage {
        hazards: bundle.hazards().len(),
        covered_hazards: bundle.hazards().iter().filter(|h| in_scenarios.contains(&h.id)).count(),
        scenarios: bundle.scenarios().len(),
        tested_scenarios: bundle.scenarios().iter().filter(|s| tested.contains(&s.id)).count(),
        hcas: bundle.hcas().len(),
        referenced_hcas: bundle.hcas().iter().filter(|h| hcas.contains(&h.id)).count(),
    }
}

impl fmt::Display for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "hazards covered by scenarios: {}/{}", self.covered_hazards, self.hazards)?;
        writeln!(f, "scenarios with tests:         {}/{}", self.tested_scenarios, self.scenarios)?;
        writeln!(f, "hcas referenced by scenarios: {}/{}", self.referenced_hcas, self.hcas)
    }
}
