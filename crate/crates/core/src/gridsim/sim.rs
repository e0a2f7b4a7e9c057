//! Discrete-time simulation of BEMS droop controllers acting on delayed
//! voltage measurements.

use std::collections::VecDeque;

use num_complex::Complex64;
use thiserror::Error;

use super::droop::{droop_q, DroopCurve};
use super::feeder::FeederModel;
use super::powerflow::{solve_power_flow, PowerFlowError, PowerFlowOptions};
use crate::model::{AttackKind, AttackSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("non-convergence at step {step}: {source}")]
    NonConvergence {
        step: usize,
        #[source]
        source: PowerFlowError,
    },
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

/// How BEMS readings are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DelayMode {
    /// Readings go through per-BEMS delay lines.
    #[default]
    Buffered,
    /// Readings are taken from the latest solved voltages; delays are ignored.
    Bypass,
}

/// A step change of load at one bus from `time` onwards.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadStep {
    pub bus: String,
    /// Seconds.
    pub time: f64,
    /// Watts.
    pub dp: f64,
    /// Vars.
    pub dq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub feeder: FeederModel,
    /// Seconds.
    pub dt: f64,
    /// Seconds.
    pub duration: f64,
    /// Base measurement delay per BEMS in seconds, aligned with `feeder.bems()`.
    pub delays: Vec<f64>,
    /// Droop curve per BEMS, aligned with `feeder.bems()`.
    pub curves: Vec<DroopCurve>,
    pub attacks: Vec<AttackSpec>,
    pub load_steps: Vec<LoadStep>,
    /// Volts; readings are divided by this before the droop law.
    pub nominal_voltage: f64,
    pub power_flow: PowerFlowOptions,
    pub delay_mode: DelayMode,
    /// Reserved for a first-order controller filter; must be `None`.
    pub filter_time_constant: Option<f64>,
}

impl SimConfig {
    /// Config with the feeder's own curves, zero delays and no attacks.
    pub fn new(feeder: FeederModel, dt: f64, duration: f64) -> Self {
        let n = feeder.bems().len();
        SimConfig {
            curves: feeder.bems_curves(),
            delays: vec![0.0; n],
            nominal_voltage: feeder.slack().voltage,
            feeder,
            dt,
            duration,
            attacks: Vec::new(),
            load_steps: Vec::new(),
            power_flow: PowerFlowOptions::default(),
            delay_mode: DelayMode::Buffered,
            filter_time_constant: None,
        }
    }

    /// Number of simulated steps after the initial solve.
    pub fn step_count(&self) -> usize {
        (self.duration / self.dt + 1e-9).floor() as usize
    }

    /// Delay quantized to whole steps.
    pub fn quantize(&self, seconds: f64) -> usize {
        (seconds / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidConfig(m));
        let n = self.feeder.bems().len();
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            return bad(format!("duration must be non-negative, got {}", self.duration));
        }
        if self.delays.len() != n || self.curves.len() != n {
            return bad(format!("expected {n} delays and curves"));
        }
        if let Some(d) = self.delays.iter().find(|d| !(**d >= 0.0 && d.is_finite())) {
            return bad(format!("delays must be non-negative, got {d}"));
        }
        if !(self.nominal_voltage > 0.0 && self.nominal_voltage.is_finite()) {
            return bad("nominal voltage must be positive".into());
        }
        if self.filter_time_constant.is_some() {
            return bad("controller filter time constant is not supported".into());
        }
        for a in &self.attacks {
            if self.feeder.bems_index(&a.target).is_none() {
                return bad(format!("attack target {} has no bems", a.target));
            }
            if !(a.start < a.end && a.end <= self.duration + 1e-9) {
                return bad(format!(
                    "attack window [{}, {}) must satisfy start < end <= duration",
                    a.start, a.end
                ));
            }
            if a.kind == AttackKind::ExtraDelay && !a.magnitude.is_some_and(|m| m >= 0.0) {
                return bad("extra_delay attack needs a non-negative magnitude".into());
            }
        }
        for s in &self.load_steps {
            if self.feeder.bus_index(&s.bus).is_none() {
                return bad(format!("load step at unknown bus {}", s.bus));
            }
        }
        Ok(())
    }
}

/// Per-step record of a run. Step 0 is the initial solve with Q = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub dt: f64,
    pub bus_ids: Vec<String>,
    /// BEMS bus ids, aligned with the setpoint and age columns.
    pub bems_ids: Vec<String>,
    pub times: Vec<f64>,
    /// `voltages[k][bus]`, magnitudes in volts.
    pub voltages: Vec<Vec<f64>>,
    /// `setpoints[k][bems]`, vars; positive is injection.
    pub setpoints: Vec<Vec<f64>>,
    /// `ages[k][bems]`, measurement age in steps.
    pub ages: Vec<Vec<usize>>,
}

impl SimulationTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn bus_index(&self, id: &str) -> Option<usize> {
        self.bus_ids.iter().position(|b| b == id)
    }

    /// Voltage magnitude series of one bus.
    pub fn series(&self, bus: usize) -> Vec<f64> {
        self.voltages.iter().map(|row| row[bus]).collect()
    }
}

/// Fixed-length history of one BEMS's bus voltage; index 0 is the newest.
#[derive(Debug, Clone)]
struct DelayLine {
    samples: VecDeque<f64>,
}

impl DelayLine {
    fn prefilled(value: f64, depth: usize) -> Self {
        DelayLine {
            samples: std::iter::repeat_n(value, depth + 1).collect(),
        }
    }

    fn push(&mut self, value: f64) {
        self.samples.pop_back();
        self.samples.push_front(value);
    }

    fn aged(&self, age: usize) -> f64 {
        self.samples[age.min(self.samples.len() - 1)]
    }
}

/// Simulation state between steps.
pub struct Simulator {
    config: SimConfig,
    base_delay: Vec<usize>,
    lines: Vec<DelayLine>,
    latest: Vec<f64>,
    readings: Vec<f64>,
    reading_age: Vec<usize>,
    trace: SimulationTrace,
    step: usize,
}

impl Simulator {
    /// Validates the config, solves the initial state with every BEMS at
    /// Q = 0 and fills the delay lines with that solution.
    pub fn new(config: SimConfig) -> Result<Self, SimError> {
        config.validate()?;
        let feeder = &config.feeder;
        let nb = feeder.bems().len();
        let load = net_load(&config, 0.0, &vec![0.0; nb]);
        let sol = solve_power_flow(feeder, &load, &config.power_flow)
            .map_err(|source| SimError::NonConvergence { step: 0, source })?;
        let mags = sol.magnitudes();

        let base_delay: Vec<usize> = config.delays.iter().map(|&d| config.quantize(d)).collect();
        let lines = feeder
            .bems()
            .iter()
            .enumerate()
            .map(|(i, unit)| {
                let extra = config
                    .attacks
                    .iter()
                    .filter(|a| a.target == unit.bus && a.kind == AttackKind::ExtraDelay)
                    .map(|a| config.quantize(a.magnitude.unwrap_or(0.0)))
                    .sum::<usize>();
                DelayLine::prefilled(mags[feeder.bems_buses()[i]], base_delay[i] + extra)
            })
            .collect();
        let readings: Vec<f64> = feeder.bems_buses().iter().map(|&b| mags[b]).collect();

        let trace = SimulationTrace {
            dt: config.dt,
            bus_ids: feeder.bus_ids().into_iter().map(str::to_owned).collect(),
            bems_ids: feeder.bems().iter().map(|b| b.bus.clone()).collect(),
            times: vec![0.0],
            voltages: vec![mags.clone()],
            setpoints: vec![vec![0.0; nb]],
            ages: vec![vec![0; nb]],
        };
        Ok(Simulator {
            base_delay,
            lines,
            latest: mags,
            readings,
            reading_age: vec![0; nb],
            trace,
            step: 0,
            config,
        })
    }

    pub fn current_step(&self) -> usize {
        self.step
    }

    pub fn is_finished(&self) -> bool {
        self.step >= self.config.step_count()
    }

    pub fn trace(&self) -> &SimulationTrace {
        &self.trace
    }

    pub fn into_trace(self) -> SimulationTrace {
        self.trace
    }

    /// Advances from step k to k + 1: read (possibly delayed or frozen)
    /// measurements, apply the droop law, solve the network and record.
    pub fn step(&mut self) -> Result<(), SimError> {
        let cfg = &self.config;
        let k = self.step;
        let t = k as f64 * cfg.dt;
        let nb = cfg.feeder.bems().len();
        let mut setpoints = Vec::with_capacity(nb);

        for i in 0..nb {
            let bus_id = &cfg.feeder.bems()[i].bus;
            let mut dropped = false;
            let mut extra = 0;
            for a in cfg.attacks.iter().filter(|a| &a.target == bus_id && a.is_active(t)) {
                match a.kind {
                    AttackKind::Drop => dropped = true,
                    AttackKind::ExtraDelay => extra += cfg.quantize(a.magnitude.unwrap_or(0.0)),
                }
            }
            if dropped {
                self.reading_age[i] += 1;
            } else {
                match cfg.delay_mode {
                    DelayMode::Buffered => {
                        let age = self.base_delay[i] + extra;
                        self.readings[i] = self.lines[i].aged(age);
                        self.reading_age[i] = age;
                    }
                    DelayMode::Bypass => {
                        self.readings[i] = self.latest[cfg.feeder.bems_buses()[i]];
                        self.reading_age[i] = 0;
                    }
                }
            }
            setpoints.push(droop_q(&cfg.curves[i], self.readings[i] / cfg.nominal_voltage));
        }

        let t_next = (k + 1) as f64 * cfg.dt;
        let load = net_load(cfg, t_next, &setpoints);
        let sol = solve_power_flow(&cfg.feeder, &load, &cfg.power_flow)
            .map_err(|source| SimError::NonConvergence { step: k + 1, source })?;
        let mags = sol.magnitudes();
        for (line, &b) in self.lines.iter_mut().zip(cfg.feeder.bems_buses()) {
            line.push(mags[b]);
        }

        self.trace.times.push(t_next);
        self.trace.voltages.push(mags.clone());
        self.trace.setpoints.push(setpoints);
        self.trace.ages.push(self.reading_age.clone());
        self.latest = mags;
        self.step += 1;
        Ok(())
    }
}

fn net_load(cfg: &SimConfig, t: f64, setpoints: &[f64]) -> Vec<Complex64> {
    let feeder = &cfg.feeder;
    let mut s = feeder.base_net_load();
    for (q, &b) in setpoints.iter().zip(feeder.bems_buses()) {
        s[b].im -= q;
    }
    for step in cfg.load_steps.iter().filter(|l| t + 1e-9 >= l.time) {
        if let Some(b) = feeder.bus_index(&step.bus) {
            s[b] += Complex64::new(step.dp, step.dq);
        }
    }
    s
}

/// Runs a complete simulation: initial solve plus `floor(duration / dt)` steps.
pub fn run(config: SimConfig) -> Result<SimulationTrace, SimError> {
    let mut sim = Simulator::new(config)?;
    while !sim.is_finished() {
        sim.step()?;
    }
    Ok(sim.into_trace())
}
