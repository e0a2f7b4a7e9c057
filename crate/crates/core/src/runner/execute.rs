use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::criteria::{evaluate_criteria, losses_for, Evaluation};
use super::sweep::{expand_sweep, RunPoint};
use super::RunnerError;
use crate::dsl::parse_feeder;
use crate::gridsim::{
    run, solve_power_flow, CurveDef, DroopCurve, FeederModel, LoadStep, PowerFlowOptions, SimConfig,
    SimulationTrace,
};
use crate::model::{DroopSpec, ExperimentSpecification, Id, ItemKind, ModelBundle, TestSpecification, Value};

/// Fraction of the estimated breakpoint distance applied as the load step.
const STEP_MARGIN: f64 = 1.5;

/// A run point resolved against the feeder.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedPoint {
    pub point: RunPoint,
    /// Measurement delay of the attacked BEMS, seconds.
    pub delay: f64,
    pub target: String,
    /// Number of attacked BEMS.
    pub n: usize,
    /// Attacked BEMS buses, target first.
    pub attacked: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub run: usize,
    pub evaluation: Option<Evaluation>,
    /// Sorted by id.
    pub hazards: Vec<Id>,
    /// Union of `leads_to` over `hazards`, sorted by id.
    pub losses: Vec<Id>,
    /// Why the run could not complete.
    pub failure: Option<String>,
}

impl Verdict {
    pub fn converged(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub point: ResolvedPoint,
    /// `None` if the initial operating point could not be solved.
    pub load_step: Option<LoadStep>,
    pub verdict: Verdict,
    pub trace: Option<SimulationTrace>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultSet {
    pub experiment: Id,
    pub test: Id,
    pub runs: Vec<RunResult>,
    /// Not part of any emitted artifact.
    pub wall_time: Duration,
}

impl ResultSet {
    pub fn failed_runs(&self) -> usize {
        self.runs.iter().filter(|r| !r.verdict.converged()).count()
    }
}

/// Directory the experiment's feeder path is relative to.
fn base_dir(bundle: &ModelBundle, es: &ExperimentSpecification) -> PathBuf {
    bundle
        .position(ItemKind::Experiment, es.id.as_str())
        .and_then(|p| p.file.parent())
        .map(Path::to_path_buf)
        .unwrap_or_default()
}

/// Loads the experiment's feeder and executes the sweep.
pub fn execute(bundle: &ModelBundle, experiment: &str) -> Result<ResultSet, RunnerError> {
    let es = bundle
        .experiment(experiment)
        .ok_or_else(|| RunnerError::UnknownExperiment(experiment.to_owned()))?;
    let path = base_dir(bundle, es).join(&es.feeder_path);
    let text = std::fs::read_to_string(&path).map_err(|e| RunnerError::FeederIo {
        path: path.clone(),
        reason: e.to_string(),
    })?;
    let feeder = parse_feeder(&text, &path).map_err(|source| RunnerError::Feeder { path, source })?;
    execute_with_feeder(bundle, experiment, &feeder)
}

pub fn execute_with_feeder(
    bundle: &ModelBundle,
    experiment: &str,
    feeder: &FeederModel,
) -> Result<ResultSet, RunnerError> {
    let started = Instant::now();
    let es = bundle
        .experiment(experiment)
        .ok_or_else(|| RunnerError::UnknownExperiment(experiment.to_owned()))?;
    let ts = bundle
        .test_spec(es.from_test.as_str())
        .ok_or_else(|| RunnerError::UnknownTestSpec(es.from_test.to_string()))?;
    if feeder.bems().is_empty() {
        return Err(RunnerError::NoBems);
    }
    let shape = match &es.droop {
        DroopSpec::Named(name) => feeder
            .curve(name)
            .ok_or_else(|| RunnerError::UnknownCurve(name.clone()))?,
        DroopSpec::Inline(points) => CurveDef::new("inline", *points).map_err(|e| RunnerError::InvalidSetup(e.to_string()))?,
    };
    let curves: Vec<DroopCurve> = feeder
        .bems()
        .iter()
        .map(|b| shape.rated(b.q_max))
        .collect::<Result<_, _>>()
        .map_err(|e| RunnerError::InvalidSetup(e.to_string()))?;

    let points = expand_sweep(es, ts)?
        .into_iter()
        .map(|p| resolve_point(p, ts, feeder))
        .collect::<Result<Vec<_>, _>>()?;

    let runs = points
        .into_par_iter()
        .map(|point| run_point(bundle, es, ts, feeder, &curves, &shape, point))
        .collect();

    Ok(ResultSet {
        experiment: es.id.clone(),
        test: ts.id.clone(),
        runs,
        wall_time: started.elapsed(),
    })
}

fn is_delay_param(name: &str) -> bool {
    name == "d" || name.starts_with("d_")
}

/// Interprets the bindings: `d` and `d_*` are delays in seconds (summed),
/// `target` or `v_i` names the target BEMS bus, `n` the number of attacked
/// BEMS.
pub fn resolve_point(point: RunPoint, ts: &TestSpecification, feeder: &FeederModel) -> Result<ResolvedPoint, RunnerError> {
    let invalid = |name: &str, value: &Value, reason: &str| RunnerError::InvalidBinding {
        name: name.to_owned(),
        value: value.to_string(),
        reason: reason.to_owned(),
    };
    let mut delay = None;
    let mut target = None;
    let mut n = None;
    for (name, value) in &point.bindings {
        if is_delay_param(name) {
            let d = value
                .as_number()
                .filter(|d| *d >= 0.0)
                .ok_or_else(|| invalid(name, value, "delay must be a non-negative number of seconds"))?;
            delay = Some(delay.unwrap_or(0.0) + d);
        } else if name == "target" || name == "v_i" {
            let bus = value
                .as_name()
                .filter(|b| feeder.bems_index(b).is_some())
                .ok_or_else(|| invalid(name, value, "target must be a bus with a bems"))?;
            target = Some(bus.to_owned());
        } else if name == "n" {
            let count = value
                .as_number()
                .filter(|v| v.fract() == 0.0 && *v >= 1.0 && *v <= feeder.bems().len() as f64)
                .ok_or_else(|| invalid(name, value, "n must be a whole number between 1 and the bems count"))?;
            n = Some(count as usize);
        } else {
            return Err(RunnerError::UnsupportedParameter(name.clone()));
        }
    }
    let target = target.unwrap_or_else(|| feeder.bems()[0].bus.clone());
    let n = n.unwrap_or(1);
    Ok(ResolvedPoint {
        attacked: attacked_set(feeder, &target, n),
        delay: delay.unwrap_or(ts.initial_state.initial_delay),
        target,
        n,
        point,
    })
}

/// The target plus its `n - 1` electrically nearest BEMS, ties broken by bus id.
pub fn attacked_set(feeder: &FeederModel, target: &str, n: usize) -> Vec<String> {
    let t = feeder.bus_index(target).expect("target resolved to a feeder bus");
    let mut others: Vec<(f64, &str)> = feeder
        .bems()
        .iter()
        .filter(|b| b.bus != target)
        .map(|b| {
            let i = feeder.bus_index(&b.bus).expect("bems bus exists");
            (feeder.electrical_distance(t, i), b.bus.as_str())
        })
        .collect();
    others.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    std::iter::once(target.to_owned())
        .chain(others.into_iter().take(n.saturating_sub(1)).map(|(_, b)| b.to_owned()))
        .collect()
}

/// Load step at the target bus sized to push its voltage across the nearest
/// droop breakpoint below the initial operating point (or above, with a
/// negative step, if none lies below).
pub fn load_step_for(
    feeder: &FeederModel,
    shape: &CurveDef,
    nominal: f64,
    target: &str,
    time: f64,
) -> Result<LoadStep, RunnerError> {
    let t = feeder.bus_index(target).expect("target resolved to a feeder bus");
    let sol = solve_power_flow(feeder, &feeder.base_net_load(), &PowerFlowOptions::default())
        .map_err(|e| RunnerError::InvalidSetup(format!("initial operating point: {e}")))?;
    let v = sol.voltages[t].norm();
    let pu = v / nominal;
    let below = shape.breakpoints.iter().copied().filter(|b| *b < pu).fold(None, |acc: Option<f64>, b| {
        Some(acc.map_or(b, |a| a.max(b)))
    });
    let above = shape.breakpoints.iter().copied().filter(|b| *b >= pu).fold(None, |acc: Option<f64>, b| {
        Some(acc.map_or(b, |a| a.min(b)))
    });
    let bp = below.or(above).expect("four breakpoints");
    let z = feeder.path_impedance(t);
    let r = if z.re > 0.0 { z.re } else { z.norm() };
    let dp = STEP_MARGIN * (v - bp * nominal) * v / r;
    Ok(LoadStep {
        bus: target.to_owned(),
        time,
        dp,
        dq: 0.0,
    })
}

fn run_point(
    bundle: &ModelBundle,
    es: &ExperimentSpecification,
    ts: &TestSpecification,
    feeder: &FeederModel,
    curves: &[DroopCurve],
    shape: &CurveDef,
    point: ResolvedPoint,
) -> RunResult {
    let nominal = ts.initial_state.nominal_voltage;
    let index = point.point.index;
    let load_step = match load_step_for(feeder, shape, nominal, &point.target, es.duration / 4.0) {
        Ok(step) => step,
        Err(e) => {
            return RunResult {
                point,
                load_step: None,
                verdict: failed(index, e.to_string()),
                trace: None,
            }
        }
    };
    let mut config = SimConfig::new(feeder.clone(), es.dt, es.duration);
    config.curves = curves.to_vec();
    config.nominal_voltage = nominal;
    config.attacks = es.attacks.clone();
    config.load_steps = vec![load_step.clone()];
    config.delays = feeder
        .bems()
        .iter()
        .map(|b| {
            if point.attacked.contains(&b.bus) {
                point.delay
            } else {
                ts.initial_state.initial_delay
            }
        })
        .collect();
    let (verdict, trace) = match run(config) {
        Ok(trace) => match evaluate_criteria(ts, &trace) {
            Ok(eval) => {
                let hazards = eval.hazards.clone();
                let losses = losses_for(bundle, &hazards);
                let v = Verdict {
                    run: index,
                    evaluation: Some(eval),
                    hazards,
                    losses,
                    failure: None,
                };
                (v, Some(trace))
            }
            Err(e) => (failed(index, e.to_string()), Some(trace)),
        },
        Err(e) => (failed(index, e.to_string()), None),
    };
    RunResult {
        point,
        load_step: Some(load_step),
        verdict,
        trace,
    }
}

fn failed(run: usize, why: String) -> Verdict {
    Verdict {
        run,
        evaluation: None,
        hazards: Vec::new(),
        losses: Vec::new(),
        failure: Some(why),
    }
}
