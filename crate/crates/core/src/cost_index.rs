//! Cost index as the output of a first-order filter.
//!
//! The airline sets the initial value `ci0`; air traffic control drives the
//! filter input `ci_in`. Between inputs the cost index relaxes
//! exponentially with time constant `tau`. An infinite time constant freezes
//! the cost index at its current value.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::segment::Waypoint;

/// Filter time constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeConstant {
    /// Seconds, strictly positive and finite.
    Finite(f64),
    /// The cost index never moves away from its starting value.
    Infinite,
}

impl TimeConstant {
    pub fn seconds(tau: f64) -> Result<Self> {
        if tau.is_infinite() && tau > 0.0 {
            return Ok(Self::Infinite);
        }
        if tau > 0.0 && tau.is_finite() {
            Ok(Self::Finite(tau))
        } else {
            Err(Error::InvalidParameter {
                name: "time constant",
                value: tau,
            })
        }
    }

    /// `tau` in seconds, `f64::INFINITY` for the infinite case.
    pub fn as_secs(&self) -> f64 {
        match *self {
            Self::Finite(tau) => tau,
            Self::Infinite => f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Finite(tau) => Self::seconds(tau).map(|_| ()),
            Self::Infinite => Ok(()),
        }
    }
}

/// How the filter time constant is chosen for a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeConstantSetting {
    /// Multiple of the climb time planned at initialization.
    FractionOfInitialClimb(f64),
    Seconds(f64),
    Infinite,
}

impl TimeConstantSetting {
    /// The time constant used when nothing else is configured.
    pub const DEFAULT: Self = Self::FractionOfInitialClimb(0.01);

    pub fn resolve(&self, initial_climb_time: f64) -> Result<TimeConstant> {
        match *self {
            Self::FractionOfInitialClimb(f) => TimeConstant::seconds(f * initial_climb_time),
            Self::Seconds(tau) => TimeConstant::seconds(tau),
            Self::Infinite => Ok(TimeConstant::Infinite),
        }
    }
}

impl Default for TimeConstantSetting {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Cost index `t` seconds after the filter input switched to `ci_in` while
/// the output was `ci_start`.
pub fn ci_at(t: f64, ci_start: f64, ci_in: f64, tau: TimeConstant) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    tau.validate()?;
    Ok(match tau {
        TimeConstant::Infinite => ci_start,
        TimeConstant::Finite(tau) => libm::exp(-t / tau) * (ci_start - ci_in) + ci_in,
    })
}

/// Integrates `tau * dCI/dt = -CI + ci_in` with classical fourth-order
/// Runge-Kutta at step `tau / 100` and returns the largest deviation from
/// [`ci_at`] seen at the step nodes over `[0, horizon]`.
pub fn ci_ode_check(ci_start: f64, ci_in: f64, tau: TimeConstant, horizon: f64) -> Result<f64> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "horizon",
            value: horizon,
        });
    }
    tau.validate()?;
    let tau = match tau {
        // dCI/dt = 0: the integrator reproduces the constant exactly.
        TimeConstant::Infinite => return Ok(0.0),
        TimeConstant::Finite(tau) => tau,
    };
    let rhs = |ci: f64| (ci_in - ci) / tau;
    let step = tau / 100.0;
    let steps = libm::ceil(horizon / step) as usize;
    let mut ci = ci_start;
    let mut t = 0.0;
    let mut worst: f64 = 0.0;
    for k in 0..steps {
        let h = (horizon - t).min(step);
        let k1 = rhs(ci);
        let k2 = rhs(ci + 0.5 * h * k1);
        let k3 = rhs(ci + 0.5 * h * k2);
        let k4 = rhs(ci + h * k3);
        ci += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = if k + 1 == steps {
            horizon
        } else {
            (k + 1) as f64 * step
        };
        let exact = ci_at(t, ci_start, ci_in, TimeConstant::Finite(tau))?;
        worst = worst.max((ci - exact).abs());
    }
    Ok(worst)
}

/// Power-equivalent of a cost index held in C/s, in kJ/s.
pub fn ci_to_kilowatts(ci: f64, voltage: f64) -> f64 {
    ci * voltage / 1000.0
}

/// When an ATC input takes effect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventTrigger {
    /// Seconds since the start of the climb.
    Time(f64),
    /// When the aircraft reaches this point of the climb path.
    Waypoint(Waypoint),
}

/// ATC cost-index input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiEvent {
    pub trigger: EventTrigger,
    /// New filter input, C/s.
    pub ci_in: f64,
}

/// Fully resolved cost-index plan of a climb.
#[derive(Debug, Clone, PartialEq)]
pub struct CostIndexSchedule {
    /// C/s
    pub ci0: f64,
    pub tau: TimeConstant,
    /// Envelope ceiling, C/s.
    pub ci_max: f64,
    pub events: Vec<CiEvent>,
}

impl CostIndexSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.ci_max > 0.0 && self.ci_max.is_finite()) {
            return Err(Error::EnvelopeInconsistency {
                ci_max: self.ci_max,
            });
        }
        self.tau.validate()?;
        let in_envelope = |ci: f64| (0.0..=self.ci_max).contains(&ci);
        if !in_envelope(self.ci0) {
            return Err(Error::InvalidParameter {
                name: "initial cost index",
                value: self.ci0,
            });
        }
        for (index, ev) in self.events.iter().enumerate() {
            if !in_envelope(ev.ci_in) {
                return Err(Error::InvalidEvent {
                    index,
                    reason: "cost index input outside [0, ci_max]",
                });
            }
        }
        for (index, pair) in self.events.windows(2).enumerate() {
            let ordered = match (pair[0].trigger, pair[1].trigger) {
                (EventTrigger::Time(a), EventTrigger::Time(b)) => a < b,
                (EventTrigger::Waypoint(a), EventTrigger::Waypoint(b)) => a.x < b.x,
                // Mixed kinds are ordered on the timeline once speeds are known.
                _ => true,
            };
            if !ordered {
                return Err(Error::InvalidEvent {
                    index: index + 1,
                    reason: "events must be strictly ordered by trigger",
                });
            }
        }
        Ok(())
    }
}
