//! Piecewise-linear Q(V) droop law with a deadband.
//!
//! ```text
//!  +q_max ----\
//!              \
//!               \_______
//!                       \
//!                        \---- -q_max
//!        v1    v2     v3  v4          (per unit)
//! ```

use std::fmt;

use thiserror::Error;

/// Breakpoints of the built-in `default` curve, in per unit.
pub const DEFAULT_BREAKPOINTS: [f64; 4] = [0.92, 0.98, 1.02, 1.08];
pub const DEFAULT_CURVE_NAME: &str = "default";

#[derive(Debug, Clone, PartialEq, Error)]
#[error("droop breakpoints must satisfy 0 < v1 <= v2 <= v3 <= v4, got {0:?}")]
pub struct InvalidBreakpoints(pub [f64; 4]);

#[derive(Debug, Clone, PartialEq, Error)]
#[error("droop q_max must be positive, got {0}")]
pub struct InvalidQMax(pub f64);

pub fn check_breakpoints(points: [f64; 4]) -> Result<(), InvalidBreakpoints> {
    let finite = points.iter().all(|v| v.is_finite());
    if finite && points[0] > 0.0 && points.windows(2).all(|w| w[0] <= w[1]) {
        Ok(())
    } else {
        Err(InvalidBreakpoints(points))
    }
}

/// A named curve shape as declared in a feeder file, without a rating.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveDef {
    pub name: String,
    pub breakpoints: [f64; 4],
}

impl CurveDef {
    pub fn new(name: impl Into<String>, breakpoints: [f64; 4]) -> Result<Self, InvalidBreakpoints> {
        check_breakpoints(breakpoints)?;
        Ok(CurveDef {
            name: name.into(),
            breakpoints,
        })
    }

    pub fn builtin_default() -> Self {
        CurveDef {
            name: DEFAULT_CURVE_NAME.to_owned(),
            breakpoints: DEFAULT_BREAKPOINTS,
        }
    }

    pub fn rated(&self, q_max: f64) -> Result<DroopCurve, InvalidQMax> {
        DroopCurve::new(self.name.clone(), self.breakpoints, q_max)
    }
}

/// Droop curve with its reactive-power rating. Positive Q is injection.
#[derive(Debug, Clone, PartialEq)]
pub struct DroopCurve {
    pub name: String,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
    pub v4: f64,
    pub q_max: f64,
}

impl DroopCurve {
    /// `breakpoints` must already satisfy [`check_breakpoints`].
    pub fn new(name: impl Into<String>, breakpoints: [f64; 4], q_max: f64) -> Result<Self, InvalidQMax> {
        debug_assert!(check_breakpoints(breakpoints).is_ok());
        if !(q_max > 0.0 && q_max.is_finite()) {
            return Err(InvalidQMax(q_max));
        }
        let [v1, v2, v3, v4] = breakpoints;
        Ok(DroopCurve {
            name: name.into(),
            v1,
            v2,
            v3,
            v4,
            q_max,
        })
    }

    pub fn breakpoints(&self) -> [f64; 4] {
        [self.v1, self.v2, self.v3, self.v4]
    }

    /// Slope magnitude of the sloped regions in vars per per-unit volt.
    pub fn max_slope(&self) -> f64 {
        let spans = [self.v2 - self.v1, self.v4 - self.v3];
        spans
            .iter()
            .filter(|s| **s > 0.0)
            .map(|s| self.q_max / s)
            .fold(0.0, f64::max)
    }
}

/// The five control levels of the Q(V) action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ControlLevel {
    MaxInjection,
    Injection,
    Neutral,
    Consume,
    MaxConsume,
}

impl ControlLevel {
    pub const ALL: [ControlLevel; 5] = [
        ControlLevel::MaxInjection,
        ControlLevel::Injection,
        ControlLevel::Neutral,
        ControlLevel::Consume,
        ControlLevel::MaxConsume,
    ];

    /// Level name as used in hazard models (`max_injection`, ...).
    pub fn name(self) -> &'static str {
        match self {
            ControlLevel::MaxInjection => "max_injection",
            ControlLevel::Injection => "injection",
            ControlLevel::Neutral => "neutral",
            ControlLevel::Consume => "consume",
            ControlLevel::MaxConsume => "max_consume",
        }
    }
}

impl fmt::Display for ControlLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Reactive power setpoint in vars for a per-unit voltage reading.
pub fn droop_q(curve: &DroopCurve, v: f64) -> f64 {
    let q = curve.q_max;
    if v <= curve.v1 {
        q
    } else if v < curve.v2 {
        q * (curve.v2 - v) / (curve.v2 - curve.v1)
    } else if v <= curve.v3 {
        0.0
    } else if v < curve.v4 {
        -q * (v - curve.v3) / (curve.v4 - curve.v3)
    } else {
        -q
    }
}

/// Control level for a per-unit reading. Boundaries belong to the saturated
/// side at v1/v4 and to the deadband at v2/v3.
pub fn droop_level(curve: &DroopCurve, v: f64) -> ControlLevel {
    if v <= curve.v1 {
        ControlLevel::MaxInjection
    } else if v < curve.v2 {
        ControlLevel::Injection
    } else if v <= curve.v3 {
        ControlLevel::Neutral
    } else if v < curve.v4 {
        ControlLevel::Consume
    } else {
        ControlLevel::MaxConsume
    }
}
