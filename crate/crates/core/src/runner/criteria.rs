use std::fmt;

use crate::gridsim::{
    band_violations, detect_oscillation, max_step_change, BandKind, BandViolation, DetectError, OscillationMetrics,
    OscillationThresholds, SimulationTrace, Window,
};
use crate::model::{Id, ModelBundle, TestSpecification};

/// Per-step voltage change below which a trace counts as settled, volts.
pub const STABLE_STEP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriterionId {
    /// No bus oscillates.
    Osc,
    /// No sample above the band.
    Over,
    /// No sample below the band.
    Under,
    /// The post-transient trace is settled.
    Stable,
}

impl CriterionId {
    pub const ALL: [CriterionId; 4] = [CriterionId::Osc, CriterionId::Over, CriterionId::Under, CriterionId::Stable];

    pub fn name(self) -> &'static str {
        match self {
            CriterionId::Osc => "OSC",
            CriterionId::Over => "OVER",
            CriterionId::Under => "UNDER",
            CriterionId::Stable => "STABLE",
        }
    }

    /// Hazard raised when the criterion fails.
    pub fn hazard(self) -> Option<&'static str> {
        match self {
            CriterionId::Osc => Some("H3"),
            CriterionId::Over => Some("H1"),
            CriterionId::Under => Some("H2"),
            CriterionId::Stable => None,
        }
    }
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: CriterionId,
    pub passed: bool,
    pub evidence: String,
}

/// Criteria outcomes and the measurements behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub outcomes: Vec<CriterionOutcome>,
    /// Non-slack buses only.
    pub oscillation: Vec<OscillationMetrics>,
    pub violations: Vec<BandViolation>,
    pub max_step_change: f64,
    /// Sorted by id.
    pub hazards: Vec<Id>,
}

impl Evaluation {
    pub fn outcome(&self, id: CriterionId) -> &CriterionOutcome {
        self.outcomes.iter().find(|o| o.id == id).expect("every criterion is evaluated")
    }

    pub fn max_peak_to_peak(&self) -> f64 {
        self.oscillation.iter().map(|m| m.peak_to_peak).fold(0.0, f64::max)
    }

    pub fn count(&self, kind: BandKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

/// Orders ids such as `H2` before `H10`.
pub fn sort_ids(ids: &mut Vec<Id>) {
    fn key(id: &Id) -> (String, u64, String) {
        let s = id.as_str();
        let digits = id.digit_suffix().unwrap_or("");
        let prefix = &s[..s.len() - digits.len()];
        (prefix.to_owned(), digits.parse().unwrap_or(0), s.to_owned())
    }
    ids.sort_by_key(key);
    ids.dedup();
}

/// Runs the built-in criteria on a trace over the post-transient window.
pub fn evaluate_criteria(ts: &TestSpecification, trace: &SimulationTrace) -> Result<Evaluation, DetectError> {
    let nominal = ts.initial_state.nominal_voltage;
    let window = Window::post_transient(trace);
    let thresholds = OscillationThresholds::for_nominal(nominal);
    let oscillation = (1..trace.bus_ids.len())
        .map(|bus| detect_oscillation(trace, bus, window, thresholds))
        .collect::<Result<Vec<_>, _>>()?;
    let violations = band_violations(trace, nominal, ts.initial_state.tolerance)?;
    let max_dv = max_step_change(trace, window)?;

    let oscillating: Vec<&str> = oscillation
        .iter()
        .filter(|m| m.oscillating)
        .map(|m| m.bus.as_str())
        .collect();
    let band = |kind: BandKind| {
        let hits: Vec<&BandViolation> = violations.iter().filter(|v| v.kind == kind).collect();
        let evidence = match hits.first() {
            None => format!("no samples {kind} the band"),
            Some(v) => format!(
                "{} samples {kind} the band, first at {} step {} ({:.3} V)",
                hits.len(),
                v.bus,
                v.step,
                v.voltage
            ),
        };
        (hits.is_empty(), evidence)
    };
    let (over_ok, over_ev) = band(BandKind::Over);
    let (under_ok, under_ev) = band(BandKind::Under);
    let osc_ev = if oscillating.is_empty() {
        format!(
            "no oscillating bus (max peak-to-peak {:.3} V)",
            oscillation.iter().map(|m| m.peak_to_peak).fold(0.0, f64::max)
        )
    } else {
        format!("oscillating at {}", oscillating.join(", "))
    };
    let outcomes = vec![
        CriterionOutcome {
            id: CriterionId::Osc,
            passed: oscillating.is_empty(),
            evidence: osc_ev,
        },
        CriterionOutcome {
            id: CriterionId::Over,
            passed: over_ok,
            evidence: over_ev,
        },
        CriterionOutcome {
            id: CriterionId::Under,
            passed: under_ok,
            evidence: under_ev,
        },
        CriterionOutcome {
            id: CriterionId::Stable,
            passed: max_dv < STABLE_STEP_TOLERANCE,
            evidence: format!("max post-transient step change {max_dv:.3e} V"),
        },
    ];
    let mut hazards: Vec<Id> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .filter_map(|o| o.id.hazard())
        .map(Id::from)
        .collect();
    sort_ids(&mut hazards);
    Ok(Evaluation {
        outcomes,
        oscillation,
        violations,
        max_step_change: max_dv,
        hazards,
    })
}

/// Union of `leads_to` over the given hazards, sorted by id.
pub fn losses_for(bundle: &ModelBundle, hazards: &[Id]) -> Vec<Id> {
    let mut out: Vec<Id> = hazards
        .iter()
        .filter_map(|h| bundle.hazard(h.as_str()))
        .flat_map(|h| h.leads_to.iter().cloned())
        .collect();
    sort_ids(&mut out);
    out
}
