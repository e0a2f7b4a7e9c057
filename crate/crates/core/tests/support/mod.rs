//! Shared fixtures and independent oracles for the integration tests.
//!
//! Nothing here calls the library's solver or simulator. The oracles work
//! from raw feeder data with different numerics: bisection on the two-bus
//! receiving-end equation, and a bus-impedance fixed point for trees.
#![allow(dead_code)]

use std::collections::VecDeque;
use std::path::{Path, PathBuf};

use hazbench::dsl::{parse_model, parse_testspec};
use hazbench::gridsim::{Bems, Bus, DroopCurve, FeederModel, Line, LoadStep, SimConfig, SimulationTrace, SlackBus};
use hazbench::model::ModelBundle;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus_path(name: &str) -> PathBuf {
    corpus_dir().join(name)
}

pub fn read_corpus(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// The case-study analysis and test hierarchy merged into one bundle.
pub fn load_corpus() -> ModelBundle {
    let haz = corpus_path("casestudy.haz");
    let htd = corpus_path("casestudy.htd");
    let mut bundle = parse_model(&read_corpus("casestudy.haz"), &haz).expect("casestudy.haz parses");
    let tests = parse_testspec(&read_corpus("casestudy.htd"), &htd).expect("casestudy.htd parses");
    bundle.merge(tests).expect("no duplicate ids");
    bundle
}

/// Receiving-end voltage magnitude of a slack, one line and one load.
///
/// Solves |V|^4 + (2(RP + XQ) - V0^2)|V|^2 + |Z|^2|S|^2 = 0 for the high
/// root in u = |V|^2 by bisection. `None` if no real solution exists.
pub fn two_bus_voltage(v0: f64, z: Complex64, s: Complex64) -> Option<f64> {
    let b = 2.0 * (z.re * s.re + z.im * s.im) - v0 * v0;
    let c = z.norm_sqr() * s.norm_sqr();
    let f = |u: f64| u * u + b * u + c;
    let mut lo = (-b / 2.0).max(0.0);
    if f(lo) > 0.0 {
        return None;
    }
    let mut hi = lo + 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((0.5 * (lo + hi)).sqrt())
}

/// Radial tree rebuilt from the raw line list: bus 0 is the slack, the
/// others follow declaration order.
pub struct Tree {
    pub ids: Vec<String>,
    /// Per bus, the line impedances along the path to the slack, keyed by
    /// the child bus of each line.
    pub paths: Vec<Vec<(usize, Complex64)>>,
}

impl Tree {
    pub fn from_feeder(feeder: &FeederModel) -> Tree {
        let mut ids = vec![feeder.slack().id.clone()];
        ids.extend(feeder.buses().iter().map(|b| b.id.clone()));
        let n = ids.len();
        let idx = |s: &str| ids.iter().position(|i| i == s).expect("line endpoint");
        let mut adj: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); n];
        for l in feeder.lines() {
            let (a, b) = (idx(&l.from), idx(&l.to));
            let z = Complex64::new(l.r, l.x);
            adj[a].push((b, z));
            adj[b].push((a, z));
        }
        let mut parent: Vec<Option<(usize, Complex64)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            for &(v, z) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some((u, z));
                    queue.push_back(v);
                }
            }
        }
        let paths = (0..n)
            .map(|mut b| {
                let mut path = Vec::new();
                while let Some((p, z)) = parent[b] {
                    path.push((b, z));
                    b = p;
                }
                path
            })
            .collect();
        Tree { ids, paths }
    }

    /// Impedance of the path shared by two buses towards the slack.
    pub fn shared(&self, i: usize, j: usize) -> Complex64 {
        self.paths[i]
            .iter()
            .filter(|(child, _)| self.paths[j].iter().any(|(c, _)| c == child))
            .map(|(_, z)| *z)
            .sum()
    }

    pub fn path_impedance(&self, i: usize) -> Complex64 {
        self.paths[i].iter().map(|(_, z)| *z).sum()
    }
}

/// Net complex load per bus (load minus PV), slack first.
pub fn net_loads(feeder: &FeederModel) -> Vec<Complex64> {
    let mut s = vec![Complex64::new(0.0, 0.0)];
    for b in feeder.buses() {
        let pv: f64 = feeder.bems().iter().filter(|u| u.bus == b.id).map(|u| u.pv).sum();
        s.push(Complex64::new(b.p_load - pv, b.q_load));
    }
    s
}

/// Bus voltage magnitudes from the fixed point V = V0 - Zbus * conj(S / V),
/// iterated until the largest update is below 1e-12 V. `None` if it does not
/// settle within 10 000 iterations.
pub fn zbus_power_flow(feeder: &FeederModel, loads: &[Complex64]) -> Option<Vec<f64>> {
    let tree = Tree::from_feeder(feeder);
    let n = tree.ids.len();
    let zbus: Vec<Vec<Complex64>> = (0..n).map(|i| (0..n).map(|j| tree.shared(i, j)).collect()).collect();
    let v0 = Complex64::new(feeder.slack().voltage, 0.0);
    let mut v = vec![v0; n];
    for _ in 0..10_000 {
        let current: Vec<Complex64> = (0..n).map(|j| (loads[j] / v[j]).conj()).collect();
        let next: Vec<Complex64> = (0..n)
            .map(|i| v0 - (0..n).map(|j| zbus[i][j] * current[j]).sum::<Complex64>())
            .collect();
        let delta = next.iter().zip(&v).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        v = next;
        if !delta.is_finite() {
            return None;
        }
        if delta < 1e-12 {
            return Some(v.iter().map(|x| x.norm()).collect());
        }
    }
    None
}

/// Random radial feeder with 2 to 4 buses (slack included) that the
/// oracle can solve with every voltage within 15% of the slack.
pub fn random_feasible_tree(rng: &mut ChaCha8Rng) -> (FeederModel, Vec<f64>) {
    loop {
        let n = rng.gen_range(2..=4);
        let v0 = rng.gen_range(200.0..260.0);
        let slack = SlackBus { id: "S".into(), voltage: v0 };
        let buses: Vec<Bus> = (1..n)
            .map(|i| Bus {
                id: format!("N{i}"),
                p_load: rng.gen_range(-6000.0..6000.0),
                q_load: rng.gen_range(-2000.0..2000.0),
            })
            .collect();
        let lines: Vec<Line> = (1..n)
            .map(|i| {
                let parent = rng.gen_range(0..i);
                Line {
                    from: if parent == 0 { "S".into() } else { format!("N{parent}") },
                    to: format!("N{i}"),
                    r: rng.gen_range(0.01..0.6),
                    x: rng.gen_range(0.0..0.4),
                }
            })
            .collect();
        let feeder = FeederModel::new(slack, buses, lines, Vec::new(), Vec::new()).expect("valid tree");
        let Some(v) = zbus_power_flow(&feeder, &net_loads(&feeder)) else { continue };
        if v.iter().all(|x| (x / v0 - 1.0).abs() < 0.15) {
            return (feeder, v);
        }
    }
}

/// Two-bus equivalent of one bus: the path impedance from the slack and an
/// active load chosen so the initial voltage matches the full feeder.
#[derive(Debug, Clone, Copy)]
pub struct Reduction {
    pub v0: f64,
    pub z: Complex64,
    pub p: f64,
    pub q: f64,
}

impl Reduction {
    pub fn of(feeder: &FeederModel, target: &str) -> Reduction {
        let tree = Tree::from_feeder(feeder);
        let t = tree.ids.iter().position(|i| i == target).expect("target bus");
        let v_full = zbus_power_flow(feeder, &net_loads(feeder)).expect("feeder solves")[t];
        let z = tree.path_impedance(t);
        let q = net_loads(feeder)[t].im;
        let v0 = feeder.slack().voltage;
        // Voltage falls as P rises; bracket generously and bisect.
        let (mut lo, mut hi) = (-1e5, 1e5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            match two_bus_voltage(v0, z, Complex64::new(mid, q)) {
                Some(v) if v > v_full => lo = mid,
                _ => hi = mid,
            }
        }
        Reduction { v0, z, p: 0.5 * (lo + hi), q }
    }

    pub fn voltage(&self, dp: f64, q_injected: f64) -> f64 {
        two_bus_voltage(self.v0, self.z, Complex64::new(self.p + dp, self.q - q_injected)).expect("feasible")
    }
}

/// Piecewise-linear droop written out directly: per-unit breakpoints, vars.
pub fn droop(bp: [f64; 4], q_max: f64, v_pu: f64) -> f64 {
    let [v1, v2, v3, v4] = bp;
    if v_pu <= v1 {
        q_max
    } else if v_pu < v2 {
        q_max * (v2 - v_pu) / (v2 - v1)
    } else if v_pu <= v3 {
        0.0
    } else if v_pu < v4 {
        -q_max * (v_pu - v3) / (v4 - v3)
    } else {
        -q_max
    }
}

/// Iterates v_{k+1} = g(v_{k-m}) where g solves the reduction with the
/// droop setpoint computed from the delayed reading. The load step `dp`
/// applies from step `step_at` onwards. Returns `steps + 1` samples.
#[allow(clippy::too_many_arguments)]
pub fn delayed_map(
    red: &Reduction,
    bp: [f64; 4],
    q_max: f64,
    nominal: f64,
    m: usize,
    steps: usize,
    step_at: usize,
    dp: f64,
) -> Vec<f64> {
    let mut v = vec![red.voltage(0.0, 0.0)];
    for k in 0..steps {
        let reading = v[k.saturating_sub(m)];
        let q = droop(bp, q_max, reading / nominal);
        let load = if k + 1 >= step_at { dp } else { 0.0 };
        v.push(red.voltage(load, q));
    }
    v
}

/// Peak-to-peak amplitude and direction reversals over the second half.
pub fn swing(series: &[f64]) -> (f64, usize) {
    let tail = &series[series.len() / 2..];
    let hi = tail.iter().cloned().fold(f64::MIN, f64::max);
    let lo = tail.iter().cloned().fold(f64::MAX, f64::min);
    let mut dirs = tail.windows(2).map(|w| w[1] - w[0]).filter(|d| *d != 0.0).map(|d| d > 0.0);
    let mut reversals = 0;
    if let Some(mut last) = dirs.next() {
        for d in dirs {
            if d != last {
                reversals += 1;
            }
            last = d;
        }
    }
    (hi - lo, reversals)
}

/// Sustained oscillation: amplitude above 0.5% of nominal and at least six
/// reversals in the second half.
pub fn oscillates(series: &[f64], nominal: f64) -> bool {
    let (p2p, reversals) = swing(series);
    p2p > 0.005 * nominal && reversals >= 6
}

/// Fixed point of v = g(v) for the reduction under droop, by bisection.
pub fn droop_fixed_point(red: &Reduction, bp: [f64; 4], q_max: f64, nominal: f64, dp: f64) -> f64 {
    let h = |v: f64| v - red.voltage(dp, droop(bp, q_max, v / nominal));
    let (mut lo, mut hi) = (0.5 * nominal, 1.5 * nominal);
    assert!(h(lo) < 0.0 && h(hi) > 0.0, "fixed point bracketed");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Random feeder with BEMS, random shared droop curve and one load step;
/// all delays zero.
pub fn random_sim_config(rng: &mut ChaCha8Rng) -> SimConfig {
    let (base, _) = random_feasible_tree(rng);
    let mut bems = Vec::new();
    for b in base.buses() {
        if rng.gen_bool(0.7) {
            bems.push(Bems {
                bus: b.id.clone(),
                q_max: rng.gen_range(500.0..4000.0),
                curve: "default".into(),
                pv: rng.gen_range(0.0..3000.0),
            });
        }
    }
    let feeder = FeederModel::new(
        base.slack().clone(),
        base.buses().to_vec(),
        base.lines().to_vec(),
        bems,
        Vec::new(),
    )
    .unwrap();
    let mut c = SimConfig::new(feeder.clone(), 0.1, rng.gen_range(1.0..6.0));
    let v1 = rng.gen_range(0.85..0.97);
    let v2 = v1 + rng.gen_range(0.005..0.05);
    let v3 = v2 + rng.gen_range(0.0..0.06);
    let v4 = v3 + rng.gen_range(0.005..0.05);
    c.curves = feeder
        .bems()
        .iter()
        .map(|b| DroopCurve::new("r", [v1, v2, v3, v4], b.q_max).unwrap())
        .collect();
    c.nominal_voltage = feeder.slack().voltage;
    let bus = &feeder.buses()[rng.gen_range(0..feeder.buses().len())].id;
    c.load_steps = vec![LoadStep {
        bus: bus.clone(),
        time: rng.gen_range(0.0..1.0),
        dp: rng.gen_range(-1000.0..1000.0),
        dq: rng.gen_range(-300.0..300.0),
    }];
    c
}

pub fn trace_bits(trace: &SimulationTrace) -> Vec<u64> {
    trace
        .voltages
        .iter()
        .chain(&trace.setpoints)
        .flatten()
        .map(|v| v.to_bits())
        .collect()
}
