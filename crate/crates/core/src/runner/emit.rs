use std::fmt::Write as _;
use std::io;

use super::criteria::CriterionId;
use super::execute::ResultSet;
use crate::dsl::format_number;
use crate::gridsim::BandKind;
use crate::model::{Id, ModelBundle};
use crate::trace::{level_label, scenario_trace};

pub const RESULT_CSV_HEADER: [&str; 11] = [
    "run",
    "d",
    "target",
    "n",
    "osc_any",
    "max_p2p_V",
    "over_cnt",
    "under_cnt",
    "hazards",
    "losses",
    "converged",
];

fn joined(ids: &[Id]) -> String {
    ids.iter().map(Id::as_str).collect::<Vec<_>>().join(";")
}

/// One row per run, in run order. Metric cells are empty for failed runs.
pub fn emit_csv<W: io::Write>(results: &ResultSet, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULT_CSV_HEADER)?;
    for r in &results.runs {
        let p = &r.point;
        let mut row = vec![
            p.point.index.to_string(),
            format_number(p.delay),
            p.target.clone(),
            p.n.to_string(),
        ];
        match &r.verdict.evaluation {
            Some(e) => row.extend([
                (!e.outcome(CriterionId::Osc).passed).to_string(),
                format!("{:.6}", e.max_peak_to_peak()),
                e.count(BandKind::Over).to_string(),
                e.count(BandKind::Under).to_string(),
            ]),
            None => row.extend([String::new(), String::new(), String::new(), String::new()]),
        }
        row.push(joined(&r.verdict.hazards));
        row.push(joined(&r.verdict.losses));
        row.push(r.verdict.converged().to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Plain-text report: the test specification, the scenario it derives
/// from, and each run's verdict. Contains no timing, so it is reproducible.
pub fn emit_report(bundle: &ModelBundle, results: &ResultSet) -> String {
    let mut out = String::new();
    let _ = write_report(&mut out, bundle, results);
    out
}

fn write_report(out: &mut String, bundle: &ModelBundle, results: &ResultSet) -> std::fmt::Result {
    writeln!(out, "Experiment {} realizing test {}", results.experiment, results.test)?;
    writeln!(out)?;
    if let Some(ts) = bundle.test_spec(results.test.as_str()) {
        writeln!(out, "Test specification {}", ts.id)?;
        writeln!(out, "  Title:     {}", ts.title)?;
        if !ts.rationale.is_empty() {
            writeln!(out, "  Rationale: {}", ts.rationale)?;
        }
        for m in &ts.target_measures {
            writeln!(out, "  Measure:   {m}")?;
        }
        for p in &ts.controllable {
            let values: Vec<String> = p.values.iter().map(ToString::to_string).collect();
            let unit = p.unit.map(|u| format!(" {}", u.symbol())).unwrap_or_default();
            writeln!(out, "  Varied:    {} = {}{unit}", p.name, values.join(", "))?;
        }
        for u in &ts.uncontrollable {
            writeln!(out, "  Fixed:     {u}")?;
        }
        for m in &ts.measured {
            writeln!(out, "  Measured:  {m}")?;
        }
        let s = &ts.initial_state;
        writeln!(
            out,
            "  Initial:   {} V +/- {}%, delay {} s",
            format_number(s.nominal_voltage),
            format_number(s.tolerance * 100.0),
            format_number(s.initial_delay)
        )?;
        writeln!(out)?;

        if let Ok(chain) = scenario_trace(bundle, ts.from_scenario.as_str()) {
            writeln!(out, "Hazard scenario {}: {}", chain.scenario, chain.title)?;
            let layer = |ids: &[Id]| ids.iter().map(Id::as_str).collect::<Vec<_>>().join(", ");
            writeln!(out, "  Losses:      {}", layer(&chain.losses))?;
            writeln!(out, "  Hazards:     {}", layer(&chain.hazards))?;
            let hcas: Vec<String> = chain
                .hcas
                .iter()
                .map(|id| match bundle.hca(id.as_str()) {
                    Some(h) => format!("{id} ({} {}, {})", h.action, level_label(&h.level), h.guideword.label()),
                    None => id.to_string(),
                })
                .collect();
            writeln!(out, "  HCAs:        {}", hcas.join("; "))?;
            writeln!(out, "  Factors:     {}", layer(&chain.factors))?;
            writeln!(out, "  Components:  {}", layer(&chain.components))?;
            writeln!(out, "  Threats:     {}", layer(&chain.threats))?;
            if let Some(sc) = bundle.scenario(chain.scenario.as_str()) {
                if !sc.safety_constraint.is_empty() {
                    writeln!(out, "  Constraint:  {}", sc.safety_constraint)?;
                }
            }
            writeln!(out)?;
        }
    }

    writeln!(out, "Runs")?;
    for r in &results.runs {
        let p = &r.point;
        writeln!(
            out,
            "  run {}: d = {} s, target {}, n = {} (attacked {})",
            p.point.index,
            format_number(p.delay),
            p.target,
            p.n,
            p.attacked.join(", ")
        )?;
        if let Some(step) = &r.load_step {
            writeln!(
                out,
                "    load step {:+.1} W at {} from t = {} s",
                step.dp,
                step.bus,
                format_number(step.time)
            )?;
        }
        match (&r.verdict.evaluation, &r.verdict.failure) {
            (_, Some(why)) => writeln!(out, "    FAILED: {why}")?,
            (Some(e), None) => {
                for o in &e.outcomes {
                    let mark = if o.passed { "pass" } else { "FAIL" };
                    writeln!(out, "    {:<7}{mark}  {}", o.id.name(), o.evidence)?;
                }
            }
            (None, None) => {}
        }
        let none = || "none".to_owned();
        let hazards = if r.verdict.hazards.is_empty() { none() } else { joined(&r.verdict.hazards) };
        let losses = if r.verdict.losses.is_empty() { none() } else { joined(&r.verdict.losses) };
        writeln!(out, "    hazards: {hazards}; losses: {losses}")?;
    }
    writeln!(
        out,
        "\n{} runs, {} failed",
        results.runs.len(),
        results.failed_runs()
    )
}
