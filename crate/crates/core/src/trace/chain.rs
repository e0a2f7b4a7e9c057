use std::io;

use super::TraceError;
use crate::model::{Id, ItemKind, ModelBundle};

/// Everything collated by one hazard scenario, from losses down to the
/// experiments realizing its tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceChain {
    pub scenario: Id,
    pub title: String,
    pub losses: Vec<Id>,
    pub hazards: Vec<Id>,
    pub hcas: Vec<Id>,
    pub factors: Vec<Id>,
    pub components: Vec<Id>,
    pub threats: Vec<Id>,
    pub test_specs: Vec<Id>,
    pub experiments: Vec<Id>,
}

pub const TRACE_CSV_HEADER: [&str; 9] = [
    "scenario",
    "loss",
    "hazard",
    "hca",
    "factor",
    "component",
    "threat",
    "testspec",
    "experiment",
];

/// Deduplicates and sorts ids by registration slot; unknown ids go last
/// in listed order.
fn by_registration(bundle: &ModelBundle, kind: ItemKind, ids: impl IntoIterator<Item = Id>) -> Vec<Id> {
    let mut out: Vec<Id> = Vec::new();
    for id in ids {
        if !out.contains(&id) {
            out.push(id);
        }
    }
    out.sort_by_key(|id| bundle.slot(kind, id.as_str()).unwrap_or(usize::MAX));
    out
}

pub fn scenario_trace(bundle: &ModelBundle, scenario: &str) -> Result<TraceChain, TraceError> {
    let sc = bundle
        .scenario(scenario)
        .ok_or_else(|| TraceError::UnknownScenario(scenario.to_owned()))?;
    // an explicit loss list narrows the hazards' full loss set
    let losses = if sc.losses.is_empty() {
        sc.hazards
            .iter()
            .filter_map(|h| bundle.hazard(h.as_str()))
            .flat_map(|h| h.leads_to.iter().cloned())
            .collect()
    } else {
        sc.losses.clone()
    };
    let test_specs: Vec<Id> = bundle
        .test_specs()
        .iter()
        .filter(|t| t.from_scenario == sc.id)
        .map(|t| t.id.clone())
        .collect();
    let experiments = bundle
        .experiments()
        .iter()
        .filter(|e| test_specs.contains(&e.from_test))
        .map(|e| e.id.clone())
        .collect();
    Ok(TraceChain {
        scenario: sc.id.clone(),
        title: sc.title.clone(),
        losses: by_registration(bundle, ItemKind::Loss, losses),
        hazards: by_registration(bundle, ItemKind::Hazard, sc.hazards.clone()),
        hcas: by_registration(bundle, ItemKind::Hca, sc.hcas.clone()),
        factors: by_registration(bundle, ItemKind::Factor, sc.factors.clone()),
        components: by_registration(bundle, ItemKind::Component, sc.components.clone()),
        threats: by_registration(bundle, ItemKind::Threat, sc.threats.clone()),
        test_specs,
        experiments,
    })
}

impl TraceChain {
    fn layers(&self) -> [(&'static str, &[Id]); 8] {
        [
            ("losses", &self.losses),
            ("hazards", &self.hazards),
            ("hcas", &self.hcas),
            ("factors", &self.factors),
            ("components", &self.components),
            ("threats", &self.threats),
            ("testspecs", &self.test_specs),
            ("experiments", &self.experiments),
        ]
    }

    pub fn render(&self) -> String {
        let mut out = format!("{}: {}\n", self.scenario, self.title);
        for (name, ids) in self.layers() {
            let list: Vec<&str> = ids.iter().map(Id::as_str).collect();
            let line = format!("  {name:<12}{}", list.join(", "));
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }

    fn csv_row(&self) -> Vec<String> {
        let mut row = vec![self.scenario.to_string()];
        for (_, ids) in self.layers() {
            row.push(ids.iter().map(Id::as_str).collect::<Vec<_>>().join(";"));
        }
        row
    }
}

/// Traceability matrix, one row per chain.
pub fn write_trace_csv<W: io::Write>(chains: &[TraceChain], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_CSV_HEADER)?;
    for c in chains {
        w.write_record(c.csv_row())?;
    }
    w.flush()?;
    Ok(())
}
