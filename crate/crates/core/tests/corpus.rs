mod support;

use hazbench::model::{Guideword, Id};
use hazbench::trace::{
    coverage_report, error_count, gen_test_skeleton, hca_table, scenario_trace, validate, warning_count, Rule,
};
use support::*;

fn strs(ids: &[Id]) -> Vec<&str> {
    ids.iter().map(Id::as_str).collect()
}

#[test]
fn losses_and_hazards() {
    let bundle = load_corpus();
    assert_eq!(bundle.losses().len(), 5);
    assert_eq!(bundle.hazards().len(), 5);
    let mapping: Vec<(&str, Vec<&str>)> = bundle
        .hazards()
        .iter()
        .map(|h| (h.id.as_str(), strs(&h.leads_to)))
        .collect();
    assert_eq!(
        mapping,
        [
            ("H1", vec!["L1", "L5"]),
            ("H2", vec!["L2", "L3"]),
            ("H3", vec!["L1", "L5"]),
            ("H4", vec!["L4"]),
            ("H5", vec!["L1", "L2", "L3"]),
        ]
    );
    assert_eq!(bundle.hazard("H3").unwrap().description, "Voltage Oscillations");
}

#[test]
fn validation_has_only_coverage_warnings() {
    let bundle = load_corpus();
    let findings = validate(&bundle);
    assert_eq!(error_count(&findings), 0, "{findings:#?}");
    assert_eq!(warning_count(&findings), 4);
    let uncovered: Vec<&str> = findings
        .iter()
        .filter(|f| f.rule == Rule::R7)
        .map(|f| f.subject.as_str())
        .collect();
    assert_eq!(uncovered, ["H1", "H2", "H4", "H5"]);
    let cov = coverage_report(&bundle);
    assert_eq!((cov.covered_hazards, cov.hazards), (1, 5));
    assert_eq!((cov.tested_scenarios, cov.scenarios), (1, 1));
}

#[test]
fn setq_table_matches_golden() {
    let bundle = load_corpus();
    let table = hca_table(&bundle, "SetQ").unwrap();
    assert_eq!(table.population(), 7);
    assert_eq!(table.render(), read_corpus("golden/table_setq.txt"));

    let cell = |level, gw| table.cell(level, gw).unwrap().iter().map(ToString::to_string).collect::<Vec<_>>();
    assert_eq!(cell("max_injection", Guideword::AnyTime), ["(H1)"]);
    assert_eq!(cell("injection", Guideword::AnyTime), ["(H1)"]);
    assert_eq!(cell("injection", Guideword::TooLate), ["H3"]);
    assert_eq!(cell("neutral", Guideword::TooLate), ["H3"]);
    assert_eq!(cell("consume", Guideword::TooLate), ["H3"]);
    assert_eq!(cell("consume", Guideword::NotApplied), ["(H1)"]);
    assert_eq!(cell("max_consume", Guideword::NotApplied), ["(H1)"]);
    assert!(cell("neutral", Guideword::TooEarly).is_empty());
}

#[test]
fn scenario_layers() {
    let bundle = load_corpus();
    let chain = scenario_trace(&bundle, "HS-1").unwrap();
    assert_eq!(chain.title, "Reactive Power Control is Inhibited Due to Feedback (Measurement) Delay");
    assert_eq!(strs(&chain.losses), ["L5"]);
    assert_eq!(strs(&chain.hazards), ["H3"]);
    assert_eq!(strs(&chain.hcas), ["HC-2", "HC-3", "HC-4"]);
    assert_eq!(strs(&chain.factors), ["CF1", "CF2"]);
    assert_eq!(strs(&chain.components), ["HAN-Wireless"]);
    assert_eq!(strs(&chain.threats), ["CSTR-A-1"]);
    assert_eq!(strs(&chain.test_specs), ["TS-1"]);
    assert_eq!(strs(&chain.experiments), ["ES-1", "ES-2", "ES-3"]);
    let factors: Vec<&str> = chain.factors.iter().map(|f| bundle.factor(f.as_str()).unwrap().at.as_str()).collect();
    assert_eq!(factors, ["MSMT-1", "FDBK-1"]);
    assert_eq!(bundle.threat("CSTR-A-1").unwrap().description, "Communication delay");
}

#[test]
fn skeleton_for_hs1() {
    let bundle = load_corpus();
    let draft = gen_test_skeleton(&bundle, "HS-1").unwrap();
    let ts = &draft.spec;
    assert_eq!(ts.from_scenario.as_str(), "HS-1");
    assert_eq!(ts.controllable[0].name, "d_MSMT-1");
    assert!(ts.controllable.iter().all(|p| p.name.starts_with("d_")));
    assert_eq!(ts.measured, ["voltage at loads"]);
    let s = &ts.initial_state;
    assert_eq!((s.nominal_voltage, s.tolerance, s.initial_delay), (230.0, 0.10, 0.0));
    let text = draft.render();
    assert!(text.contains("vary d_MSMT-1 [0] s"), "{text}");
    assert!(text.contains("initial nominal 230 V tolerance 0.1 delay 0 s"), "{text}");
}

#[test]
fn case_study_test_spec() {
    let bundle = load_corpus();
    let ts = bundle.test_spec("TS-1").unwrap();
    let names: Vec<&str> = ts.controllable.iter().map(|p| p.name.as_str()).collect();
    assert_eq!(names, ["d", "target", "n"]);
    assert_eq!(ts.initial_state.nominal_voltage, 230.0);
    assert_eq!(ts.initial_state.tolerance, 0.1);
    assert_eq!(bundle.experiments().len(), 3);
}

#[test]
fn unknown_lookups_are_errors() {
    let bundle = load_corpus();
    assert!(hca_table(&bundle, "SetP").is_err());
    assert!(scenario_trace(&bundle, "HS-9").is_err());
    assert!(gen_test_skeleton(&bundle, "HS-9").is_err());
}
