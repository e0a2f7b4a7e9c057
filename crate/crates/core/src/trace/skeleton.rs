use super::TraceError;
use crate::dsl::serialize_test_spec;
use crate::model::*;

/// A generated test specification plus notes for the analyst. Not
/// registered anywhere; the caller edits and stores it.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonDraft {
    pub spec: TestSpecification,
    pub annotations: Vec<String>,
}

impl SkeletonDraft {
    /// `.htd` text with the annotations as leading comments.
    pub fn render(&self) -> String {
        let mut out: String = self.annotations.iter().map(|a| format!("# {a}\n")).collect();
        out.push_str(&serialize_test_spec(&self.spec));
        out
    }
}

fn next_test_id(bundle: &ModelBundle) -> Id {
    let max = bundle
        .test_specs()
        .iter()
        .filter_map(|t| t.id.digit_suffix()?.parse::<u64>().ok())
        .max()
        .unwrap_or(0);
    Id::new(format!("TS-{}", max + 1))
}

pub fn gen_test_skeleton(bundle: &ModelBundle, scenario: &str) -> Result<SkeletonDraft, TraceError> {
    let chain = super::scenario_trace(bundle, scenario)?;
    let sc = bundle.scenario(scenario).expect("resolved by scenario_trace");
    let losses: Vec<&str> = chain.losses.iter().map(Id::as_str).collect();

    let target_measures = chain
        .hazards
        .iter()
        .filter_map(|h| bundle.hazard(h.as_str()))
        .map(|h| h.description.clone())
        .filter(|d| !d.is_empty())
        .collect();

    let mut controllable: Vec<Parameter> = Vec::new();
    for f in chain.factors.iter().filter_map(|f| bundle.factor(f.as_str())) {
        let name = format!("d_{}", f.at);
        if f.class == FactorClass::Delay && controllable.iter().all(|p| p.name != name) {
            controllable.push(Parameter {
                name,
                values: vec![Value::Number(0.0)],
                unit: Some(Unit::Seconds),
            });
        }
    }

    let mut annotations = vec![format!("draft generated from {}; review before registering", sc.id)];
    if chain.factors.is_empty() {
        annotations.push(format!(
            "warning: {} lists no causal factors, so no controllable parameters were derived",
            sc.id
        ));
    } else if controllable.is_empty() {
        annotations.push(format!(
            "warning: {} has no delay factors, so no controllable parameters were derived",
            sc.id
        ));
    }
    annotations.push("TODO: describe the test design steps".to_owned());

    let spec = TestSpecification {
        id: next_test_id(bundle),
        from_scenario: sc.id.clone(),
        title: format!("Assessment of losses {{{}}} due to scenario {}", losses.join(", "), sc.id),
        rationale: format!("TODO: examine the severity of losses related to {} ({})", sc.id, sc.title),
        target_measures,
        uncertainty_sources: controllable.iter().map(|p| p.name.clone()).collect(),
        controllable,
        uncontrollable: Vec::new(),
        measured: vec!["voltage at loads".to_owned()],
        initial_state: InitialState::default(),
        case_attributes: Vec::new(),
    };
    Ok(SkeletonDraft { spec, annotations })
}
