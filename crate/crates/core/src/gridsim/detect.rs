//! Oscillation and voltage-band checks over simulation traces.

use std::fmt;

use thiserror::Error;

use super::sim::SimulationTrace;

/// Minimum number of steps an analysis window must span.
pub const MIN_WINDOW_STEPS: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectError {
    #[error("window [{start}, {end}] s must lie inside the trace and span at least {MIN_WINDOW_STEPS} steps")]
    BadWindow { start: f64, end: f64 },
    #[error("unknown bus index {0}")]
    UnknownBus(usize),
    #[error("tolerance must lie in (0, 1), got {0}")]
    BadTolerance(f64),
}

/// Oscillation detector thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationThresholds {
    /// Volts, peak to peak.
    pub amplitude: f64,
    /// Sign changes of the first difference.
    pub reversals: usize,
}

impl OscillationThresholds {
    /// 0.5 % of nominal and 6 reversals.
    pub fn for_nominal(nominal_voltage: f64) -> Self {
        OscillationThresholds {
            amplitude: 0.005 * nominal_voltage,
            reversals: 6,
        }
    }
}

/// Time window in seconds, both ends inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub start: f64,
    pub end: f64,
}

impl Window {
    /// The last half of the trace, widened to [`MIN_WINDOW_STEPS`] if the
    /// trace is short.
    pub fn post_transient(trace: &SimulationTrace) -> Window {
        let last = trace.len().saturating_sub(1);
        let span = (last - last / 2).max(MIN_WINDOW_STEPS).min(last);
        Window {
            start: (last - span) as f64 * trace.dt,
            end: last as f64 * trace.dt,
        }
    }

    fn indices(&self, trace: &SimulationTrace) -> Result<(usize, usize), DetectError> {
        let bad = DetectError::BadWindow {
            start: self.start,
            end: self.end,
        };
        if !(self.start >= 0.0 && self.end >= self.start) {
            return Err(bad);
        }
        let a = (self.start / trace.dt).round() as usize;
        let b = (self.end / trace.dt).round() as usize;
        if b >= trace.len() || b - a < MIN_WINDOW_STEPS {
            return Err(bad);
        }
        Ok((a, b))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillationMetrics {
    pub bus: String,
    pub window: Window,
    /// Volts.
    pub peak_to_peak: f64,
    pub reversal_count: usize,
    pub oscillating: bool,
}

/// Peak-to-peak amplitude and direction reversals of one bus voltage.
pub fn detect_oscillation(
    trace: &SimulationTrace,
    bus: usize,
    window: Window,
    thresholds: OscillationThresholds,
) -> Result<OscillationMetrics, DetectError> {
    if bus >= trace.bus_ids.len() {
        return Err(DetectError::UnknownBus(bus));
    }
    let (a, b) = window.indices(trace)?;
    let series: Vec<f64> = trace.voltages[a..=b].iter().map(|row| row[bus]).collect();
    let (lo, hi) = series
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let peak_to_peak = hi - lo;
    let reversal_count = count_reversals(&series);
    Ok(OscillationMetrics {
        bus: trace.bus_ids[bus].clone(),
        window,
        peak_to_peak,
        reversal_count,
        oscillating: peak_to_peak > thresholds.amplitude && reversal_count >= thresholds.reversals,
    })
}

/// Sign changes of the first difference, skipping zero differences.
pub fn count_reversals(series: &[f64]) -> usize {
    let mut last_sign: Option<bool> = None;
    let mut count = 0;
    for w in series.windows(2) {
        let d = w[1] - w[0];
        if d == 0.0 {
            continue;
        }
        let up = d > 0.0;
        if last_sign.is_some_and(|s| s != up) {
            count += 1;
        }
        last_sign = Some(up);
    }
    count
}

/// Largest per-step voltage change over all buses inside the window.
pub fn max_step_change(trace: &SimulationTrace, window: Window) -> Result<f64, DetectError> {
    let (a, b) = window.indices(trace)?;
    let mut worst: f64 = 0.0;
    for k in a + 1..=b {
        for (x, y) in trace.voltages[k - 1].iter().zip(&trace.voltages[k]) {
            worst = worst.max((y - x).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandKind {
    Over,
    Under,
}

impl fmt::Display for BandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BandKind::Over => "over",
            BandKind::Under => "under",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandViolation {
    pub bus: String,
    pub step: usize,
    /// Volts.
    pub voltage: f64,
    pub kind: BandKind,
}

/// Samples strictly outside `nominal * (1 ± tolerance)`. The band is closed;
/// the limits carry a 1e-9 relative slack so that products such as
/// 230 * 0.9 do not misclassify a sample sitting exactly on the boundary.
pub fn band_violations(
    trace: &SimulationTrace,
    nominal: f64,
    tolerance: f64,
) -> Result<Vec<BandViolation>, DetectError> {
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(DetectError::BadTolerance(tolerance));
    }
    let slack = 1e-9 * nominal;
    let hi = nominal * (1.0 + tolerance) + slack;
    let lo = nominal * (1.0 - tolerance) - slack;
    let mut out = Vec::new();
    for (step, row) in trace.voltages.iter().enumerate() {
        for (bus, &v) in row.iter().enumerate() {
            let kind = if v > hi {
                BandKind::Over
            } else if v < lo {
                BandKind::Under
            } else {
                continue;
            };
            out.push(BandViolation {
                bus: trace.bus_ids[bus].clone(),
                step,
                voltage: v,
                kind,
            });
        }
    }
    Ok(out)
}
