//! Canonical text output. Reparsing the output yields an equal value.

use std::fmt::Write as _;

use super::number::format_number;
use crate::gridsim::{FeederModel, DEFAULT_CURVE_NAME};
use crate::model::*;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn parameter(p: &Parameter) -> String {
    let values: Vec<String> = p.values.iter().map(ToString::to_string).collect();
    let mut s = format!("{} [{}]", p.name, values.join(", "));
    if let Some(u) = p.unit {
        s.push(' ');
        s.push_str(u.symbol());
    }
    s
}

/// Renders every item of `bundle` in registration order.
pub fn serialize_bundle(bundle: &ModelBundle) -> String {
    let mut out = String::new();
    let mut last: Option<ItemKind> = None;
    for item in bundle.items() {
        let block = matches!(
            item,
            ItemRef::ControlLoop(_) | ItemRef::Scenario(_) | ItemRef::TestSpec(_) | ItemRef::Experiment(_)
        );
        if last.is_some_and(|k| k != item.kind() || block) {
            out.push('\n');
        }
        last = Some(item.kind());
        match item {
            ItemRef::Loss(l) => writeln!(out, "loss {} {}", l.id, quote(&l.description)),
            ItemRef::Hazard(h) => {
                out.push_str(&format!("hazard {}", h.id));
                if !h.description.is_empty() {
                    out.push(' ');
                    out.push_str(&quote(&h.description));
                }
                writeln!(out, " -> {}", join(&h.leads_to))
            }
            ItemRef::Constraint(c) => writeln!(out, "constraint {} negates {} {}", c.id, c.negates, quote(&c.text)),
            ItemRef::ControlLoop(lp) => write_loop(&mut out, lp),
            ItemRef::Link(..) => Ok(()),
            ItemRef::Hca(h) => writeln!(
                out,
                "hca {} action {}.{} when {} causes {}{}",
                h.id,
                h.action,
                h.level,
                h.guideword.keyword(),
                h.causes,
                if h.qualified { " qualified" } else { "" }
            ),
            ItemRef::Factor(f) => writeln!(
                out,
                "factor {} {} {} at {}",
                f.id,
                f.class.keyword(),
                quote(&f.description),
                f.at
            ),
            ItemRef::Component(c) => {
                writeln!(out, "component {} {} realizes {}", c.id, c.kind.keyword(), c.realizes.join(" "))
            }
            ItemRef::Threat(t) => writeln!(
                out,
                "threat {} {} {} applies {}",
                t.id,
                t.class.keyword(),
                quote(&t.description),
                join(&t.applies_to)
            ),
            ItemRef::Scenario(s) => write_scenario(&mut out, s),
            ItemRef::TestSpec(ts) => {
                out.push_str(&serialize_test_spec(ts));
                Ok(())
            }
            ItemRef::Experiment(es) => write_experiment(&mut out, es),
        }
        .expect("writing to a String cannot fail");
    }
    out
}

fn write_loop(out: &mut String, lp: &ControlLoop) -> std::fmt::Result {
    writeln!(out, "controlloop {} {{", lp.id)?;
    for n in &lp.nodes {
        writeln!(out, "  {} {}", n.role.keyword(), n.name)?;
    }
    for a in &lp.actions {
        writeln!(out, "  action {} levels {}", a.name, a.levels.join(" "))?;
    }
    for l in &lp.links {
        writeln!(out, "  link {} {} -> {} {}", l.id, l.from, l.to, l.kind.keyword())?;
    }
    writeln!(out, "}}")
}

fn write_scenario(out: &mut String, s: &HazardScenario) -> std::fmt::Result {
    writeln!(out, "scenario {} {{", s.id)?;
    writeln!(out, "  title {}", quote(&s.title))?;
    let lists = [
        ("hazards", &s.hazards),
        ("losses", &s.losses),
        ("hcas", &s.hcas),
        ("factors", &s.factors),
        ("components", &s.components),
        ("threats", &s.threats),
    ];
    for (name, ids) in lists {
        if !ids.is_empty() {
            writeln!(out, "  {name} {}", join(ids))?;
        }
    }
    if !s.safety_constraint.is_empty() {
        writeln!(out, "  safety_constraint {}", quote(&s.safety_constraint))?;
    }
    writeln!(out, "}}")
}

/// Renders one test specification block.
pub fn serialize_test_spec(ts: &TestSpecification) -> String {
    let mut out = String::new();
    let _ = (|| -> std::fmt::Result {
        writeln!(out, "testspec {} {{", ts.id)?;
        writeln!(out, "  from_scenario {}", ts.from_scenario)?;
        writeln!(out, "  title {}", quote(&ts.title))?;
        if !ts.rationale.is_empty() {
            writeln!(out, "  rationale {}", quote(&ts.rationale))?;
        }
        for m in &ts.target_measures {
            writeln!(out, "  measure {}", quote(m))?;
        }
        for p in &ts.controllable {
            writeln!(out, "  vary {}", parameter(p))?;
        }
        for u in &ts.uncontrollable {
            writeln!(out, "  fixed {}", quote(u))?;
        }
        for m in &ts.measured {
            writeln!(out, "  measured {}", quote(m))?;
        }
        let s = &ts.initial_state;
        writeln!(
            out,
            "  initial nominal {} V tolerance {} delay {} s",
            format_number(s.nominal_voltage),
            format_number(s.tolerance),
            format_number(s.initial_delay)
        )?;
        if !ts.uncertainty_sources.is_empty() {
            writeln!(out, "  uncertainty {}", ts.uncertainty_sources.join(" "))?;
        }
        for (attr, text) in &ts.case_attributes {
            writeln!(out, "  {} {}", attr.keyword(), quote(text))?;
        }
        writeln!(out, "}}")
    })();
    out
}

fn write_experiment(out: &mut String, es: &ExperimentSpecification) -> std::fmt::Result {
    writeln!(out, "experiment {} {{", es.id)?;
    writeln!(out, "  from_test {}", es.from_test)?;
    writeln!(out, "  feeder {}", quote(&es.feeder_path.to_string_lossy()))?;
    writeln!(out, "  dt {} s", format_number(es.dt))?;
    writeln!(out, "  duration {} s", format_number(es.duration))?;
    match &es.droop {
        DroopSpec::Named(name) => writeln!(out, "  droop {name}")?,
        DroopSpec::Inline(p) => writeln!(out, "  droop {}", p.map(format_number).join(" "))?,
    }
    for p in &es.sweep {
        writeln!(out, "  sweep {}", parameter(p))?;
    }
    for a in &es.attacks {
        write!(
            out,
            "  attack {} {} from {} s to {} s",
            a.kind.keyword(),
            a.target,
            format_number(a.start),
            format_number(a.end)
        )?;
        if let Some(m) = a.magnitude {
            write!(out, " magnitude {} s", format_number(m))?;
        }
        out.push('\n');
    }
    writeln!(out, "}}")
}

/// Renders a feeder: curves, slack, buses, lines, then BEMS units.
pub fn serialize_feeder(feeder: &FeederModel) -> String {
    let mut out = String::new();
    for c in feeder.curves() {
        out.push_str(&format!("curve {} {}\n", c.name, c.breakpoints.map(format_number).join(" ")));
    }
    let s = feeder.slack();
    out.push_str(&format!("slack {} {}\n", s.id, format_number(s.voltage)));
    for b in feeder.buses() {
        out.push_str(&format!(
            "bus {} load {} {}\n",
            b.id,
            format_number(b.p_load),
            format_number(b.q_load)
        ));
    }
    for l in feeder.lines() {
        out.push_str(&format!(
            "line {} {} r {} x {}\n",
            l.from,
            l.to,
            format_number(l.r),
            format_number(l.x)
        ));
    }
    for b in feeder.bems() {
        out.push_str(&format!("bems {} qmax {}", b.bus, format_number(b.q_max)));
        if b.curve != DEFAULT_CURVE_NAME {
            out.push_str(&format!(" curve {}", b.curve));
        }
        if b.pv != 0.0 {
            out.push_str(&format!(" pv {}", format_number(b.pv)));
        }
        out.push('\n');
    }
    out
}
