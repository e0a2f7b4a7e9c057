//! Radial low-voltage feeder model and its tree topology.

use std::collections::{HashMap, VecDeque};

use num_complex::Complex64;
use thiserror::Error;

use super::droop::{CurveDef, DroopCurve, DEFAULT_CURVE_NAME};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    #[error("not a tree: line {0}-{1} closes a loop")]
    NotATree(String, String),
    #[error("disconnected bus {0}")]
    DisconnectedBus(String),
    #[error("duplicate slack {0}")]
    DuplicateSlack(String),
    #[error("missing slack declaration")]
    MissingSlack,
    #[error("duplicate bus {0}")]
    DuplicateBus(String),
    #[error("duplicate bems at bus {0}")]
    DuplicateBems(String),
    #[error("bems cannot be attached to slack bus {0}")]
    BemsAtSlack(String),
    #[error("unknown droop curve {0}")]
    UnknownCurve(String),
    #[error("duplicate droop curve {0}")]
    DuplicateCurve(String),
    #[error("invalid line {0}-{1}: r and x must be non-negative and not both zero")]
    InvalidLine(String, String),
    #[error("invalid bems at {0}: q_max must be positive")]
    InvalidBems(String),
}

impl TopologyError {
    /// Short category used in diagnostics.
    pub fn category(&self) -> &'static str {
        match self {
            TopologyError::NotATree(..) => "not a tree",
            TopologyError::DisconnectedBus(_) => "disconnected bus",
            TopologyError::DuplicateSlack(_) => "duplicate slack",
            TopologyError::MissingSlack => "missing slack",
            TopologyError::DuplicateBus(_) => "duplicate bus",
            TopologyError::DuplicateBems(_) => "duplicate bems",
            TopologyError::BemsAtSlack(_) => "bems at slack",
            TopologyError::UnknownCurve(_) => "unknown curve",
            TopologyError::DuplicateCurve(_) => "duplicate curve",
            TopologyError::InvalidLine(..) => "invalid line",
            TopologyError::InvalidBems(_) => "invalid bems",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlackBus {
    pub id: String,
    /// Voltage magnitude in volts; the slack angle is zero.
    pub voltage: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bus {
    pub id: String,
    /// Active load in watts.
    pub p_load: f64,
    /// Reactive load in vars.
    pub q_load: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub from: String,
    pub to: String,
    /// Ohms.
    pub r: f64,
    /// Ohms.
    pub x: f64,
}

impl Line {
    pub fn impedance(&self) -> Complex64 {
        Complex64::new(self.r, self.x)
    }
}

/// A BEMS-controlled PV inverter attached to a bus.
#[derive(Debug, Clone, PartialEq)]
pub struct Bems {
    pub bus: String,
    /// Reactive power rating in vars.
    pub q_max: f64,
    pub curve: String,
    /// Active power generation in watts, held constant.
    pub pv: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Topology {
    /// Parent index per bus; `None` only for the slack (index 0).
    parent: Vec<Option<usize>>,
    /// Impedance of the line towards the parent.
    z_up: Vec<Complex64>,
    /// Breadth-first order from the slack.
    order: Vec<usize>,
    bems_bus: Vec<usize>,
}

/// A validated radial feeder. Bus index 0 is the slack; other buses follow
/// in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeederModel {
    slack: SlackBus,
    buses: Vec<Bus>,
    lines: Vec<Line>,
    bems: Vec<Bems>,
    curves: Vec<CurveDef>,
    topo: Topology,
}

impl FeederModel {
    pub fn new(
        slack: SlackBus,
        buses: Vec<Bus>,
        lines: Vec<Line>,
        bems: Vec<Bems>,
        curves: Vec<CurveDef>,
    ) -> Result<Self, TopologyError> {
        let mut index: HashMap<&str, usize> = HashMap::new();
        index.insert(&slack.id, 0);
        for (i, b) in buses.iter().enumerate() {
            if index.insert(&b.id, i + 1).is_some() {
                return Err(TopologyError::DuplicateBus(b.id.clone()));
            }
        }
        let n = buses.len() + 1;

        let mut adj: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); n];
        let mut dsu: Vec<usize> = (0..n).collect();
        fn find(d: &mut [usize], mut i: usize) -> usize {
            while d[i] != i {
                d[i] = d[d[i]];
                i = d[i];
            }
            i
        }
        for line in &lines {
            let ok = line.r >= 0.0 && line.x >= 0.0 && line.r.is_finite() && line.x.is_finite();
            if !ok || (line.r == 0.0 && line.x == 0.0) {
                return Err(TopologyError::InvalidLine(line.from.clone(), line.to.clone()));
            }
            let a = *index
                .get(line.from.as_str())
                .ok_or_else(|| TopologyError::DisconnectedBus(line.from.clone()))?;
            let b = *index
                .get(line.to.as_str())
                .ok_or_else(|| TopologyError::DisconnectedBus(line.to.clone()))?;
            let (ra, rb) = (find(&mut dsu, a), find(&mut dsu, b));
            if ra == rb {
                return Err(TopologyError::NotATree(line.from.clone(), line.to.clone()));
            }
            dsu[ra] = rb;
            adj[a].push((b, line.impedance()));
            adj[b].push((a, line.impedance()));
        }

        let mut parent = vec![None; n];
        let mut z_up = vec![Complex64::new(0.0, 0.0); n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            order.push(i);
            for &(j, z) in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    parent[j] = Some(i);
                    z_up[j] = z;
                    queue.push_back(j);
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(TopologyError::DisconnectedBus(buses[i - 1].id.clone()));
        }

        let mut curve_names: Vec<&str> = vec![DEFAULT_CURVE_NAME];
        for c in &curves {
            if curve_names.contains(&c.name.as_str()) {
                return Err(TopologyError::DuplicateCurve(c.name.clone()));
            }
            curve_names.push(&c.name);
        }
        let mut bems_bus = Vec::with_capacity(bems.len());
        for unit in &bems {
            let i = *index
                .get(unit.bus.as_str())
                .ok_or_else(|| TopologyError::DisconnectedBus(unit.bus.clone()))?;
            if i == 0 {
                return Err(TopologyError::BemsAtSlack(unit.bus.clone()));
            }
            if bems_bus.contains(&i) {
                return Err(TopologyError::DuplicateBems(unit.bus.clone()));
            }
            if !(unit.q_max > 0.0 && unit.q_max.is_finite()) || !unit.pv.is_finite() {
                return Err(TopologyError::InvalidBems(unit.bus.clone()));
            }
            if !curve_names.contains(&unit.curve.as_str()) {
                return Err(TopologyError::UnknownCurve(unit.curve.clone()));
            }
            bems_bus.push(i);
        }

        Ok(FeederModel {
            slack,
            buses,
            lines,
            bems,
            curves,
            topo: Topology {
                parent,
                z_up,
                order,
                bems_bus,
            },
        })
    }

    pub fn slack(&self) -> &SlackBus {
        &self.slack
    }
    pub fn buses(&self) -> &[Bus] {
        &self.buses
    }
    pub fn lines(&self) -> &[Line] {
        &self.lines
    }
    pub fn bems(&self) -> &[Bems] {
        &self.bems
    }
    /// Curves declared in the feeder file (the built-in `default` excluded).
    pub fn curves(&self) -> &[CurveDef] {
        &self.curves
    }

    /// Number of buses including the slack.
    pub fn bus_count(&self) -> usize {
        self.buses.len() + 1
    }

    /// Bus ids in index order, slack first.
    pub fn bus_ids(&self) -> Vec<&str> {
        std::iter::once(self.slack.id.as_str())
            .chain(self.buses.iter().map(|b| b.id.as_str()))
            .collect()
    }

    pub fn bus_index(&self, id: &str) -> Option<usize> {
        if id == self.slack.id {
            return Some(0);
        }
        self.buses.iter().position(|b| b.id == id).map(|i| i + 1)
    }

    pub fn parent(&self, bus: usize) -> Option<usize> {
        self.topo.parent[bus]
    }

    /// Impedance of the line connecting `bus` to its parent.
    pub fn upstream_impedance(&self, bus: usize) -> Complex64 {
        self.topo.z_up[bus]
    }

    /// Buses in breadth-first order from the slack.
    pub fn bfs_order(&self) -> &[usize] {
        &self.topo.order
    }

    /// Bus index of each BEMS, aligned with [`FeederModel::bems`].
    pub fn bems_buses(&self) -> &[usize] {
        &self.topo.bems_bus
    }

    pub fn bems_index(&self, bus_id: &str) -> Option<usize> {
        self.bems.iter().position(|b| b.bus == bus_id)
    }

    /// Looks up a curve shape by name, including the built-in `default`.
    pub fn curve(&self, name: &str) -> Option<CurveDef> {
        if let Some(c) = self.curves.iter().find(|c| c.name == name) {
            return Some(c.clone());
        }
        (name == DEFAULT_CURVE_NAME).then(CurveDef::builtin_default)
    }

    /// The rated droop curve each BEMS is configured with.
    pub fn bems_curves(&self) -> Vec<DroopCurve> {
        self.bems
            .iter()
            .map(|b| {
                self.curve(&b.curve)
                    .and_then(|c| c.rated(b.q_max).ok())
                    .expect("curve and rating validated at construction")
            })
            .collect()
    }

    /// Net complex power drawn at each bus (load minus PV), before any
    /// reactive support. The slack entry is zero.
    pub fn base_net_load(&self) -> Vec<Complex64> {
        let mut s = vec![Complex64::new(0.0, 0.0); self.bus_count()];
        for (i, b) in self.buses.iter().enumerate() {
            s[i + 1] = Complex64::new(b.p_load, b.q_load);
        }
        for (unit, &i) in self.bems.iter().zip(&self.topo.bems_bus) {
            s[i].re -= unit.pv;
        }
        s
    }

    /// Buses from `bus` up to and including the slack.
    pub fn path_to_slack(&self, mut bus: usize) -> Vec<usize> {
        let mut path = vec![bus];
        while let Some(p) = self.topo.parent[bus] {
            path.push(p);
            bus = p;
        }
        path
    }

    /// Series impedance between `bus` and the slack.
    pub fn path_impedance(&self, bus: usize) -> Complex64 {
        self.path_to_slack(bus)
            .iter()
            .map(|&i| self.topo.z_up[i])
            .sum()
    }

    /// Sum of line impedance magnitudes along the tree path between two buses.
    pub fn electrical_distance(&self, a: usize, b: usize) -> f64 {
        let pa = self.path_to_slack(a);
        let pb = self.path_to_slack(b);
        let common = pa
            .iter()
            .find(|i| pb.contains(i))
            .copied()
            .expect("every bus reaches the slack");
        let climb = |path: &[usize]| -> f64 {
            path.iter()
                .take_while(|&&i| i != common)
                .map(|&i| self.topo.z_up[i].norm())
                .sum()
        };
        climb(&pa) + climb(&pb)
    }
}
