//! Backward/forward sweep power flow for radial feeders with constant-power
//! buses.

use num_complex::Complex64;
use thiserror::Error;

use super::feeder::FeederModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFlowOptions {
    /// Convergence threshold on the per-bus voltage magnitude change, volts.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PowerFlowOptions {
    fn default() -> Self {
        PowerFlowOptions {
            tolerance: 1e-8,
            max_iterations: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PowerFlowError {
    #[error("power flow did not converge after {iterations} iterations (last change {last_change:.3e} V)")]
    NonConvergence { iterations: usize, last_change: f64 },
    #[error("expected {expected} bus powers, got {got}")]
    SizeMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerFlowSolution {
    /// Complex bus voltages in volts, slack first.
    pub voltages: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
}

impl PowerFlowSolution {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.voltages.iter().map(|v| v.norm()).collect()
    }
}

/// Solves the feeder for the given net complex power drawn at each bus
/// (index-aligned with [`FeederModel::bus_ids`]; positive = consumption, the
/// slack entry is ignored).
pub fn solve_power_flow(
    feeder: &FeederModel,
    net_load: &[Complex64],
    opts: &PowerFlowOptions,
) -> Result<PowerFlowSolution, PowerFlowError> {
    let n = feeder.bus_count();
    if net_load.len() != n {
        return Err(PowerFlowError::SizeMismatch {
            expected: n,
            got: net_load.len(),
        });
    }
    let v0 = Complex64::new(feeder.slack().voltage, 0.0);
    let order = feeder.bfs_order();
    let mut v = vec![v0; n];
    let mut branch = vec![Complex64::new(0.0, 0.0); n];
    let mut last_change = f64::INFINITY;

    for it in 1..=opts.max_iterations {
        // backward: bus currents accumulated towards the slack
        for &i in order.iter().skip(1) {
            branch[i] = (net_load[i] / v[i]).conj();
        }
        for &i in order.iter().rev() {
            if let Some(p) = feeder.parent(i) {
                if p != 0 {
                    let c = branch[i];
                    branch[p] += c;
                }
            }
        }
        // forward: voltage drops away from the slack
        let mut change: f64 = 0.0;
        for &i in order.iter().skip(1) {
            let p = feeder.parent(i).expect("non-slack bus has a parent");
            let next = v[p] - feeder.upstream_impedance(i) * branch[i];
            change = change.max((next.norm() - v[i].norm()).abs());
            v[i] = next;
        }
        if !change.is_finite() || v.iter().any(|x| !x.is_finite()) {
            return Err(PowerFlowError::NonConvergence {
                iterations: it,
                last_change: change,
            });
        }
        last_change = change;
        if change < opts.tolerance {
            return Ok(PowerFlowSolution {
                voltages: v,
                iterations: it,
                converged: true,
            });
        }
    }
    Err(PowerFlowError::NonConvergence {
        iterations: opts.max_iterations,
        last_change,
    })
}
