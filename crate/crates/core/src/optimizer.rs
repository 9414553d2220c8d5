//! Minimum-cost constant climb airspeed.
//!
//! For a climb segment of slant length `d` flown at constant airspeed `v`
//! the cost is the time-weighted cost index plus the charge drawn from the
//! battery:
//!
//! ```text
//! J(v) = tau (ci0 - ci_in) (1 - exp(-d / (tau v))) + ci_in d / v + Q0 - Qf(v)
//! ```
//!
//! where the cost index relaxes from `ci0` towards `ci_in` during the climb
//! and `Qf` is the closed-form end-of-climb charge. With an infinite time
//! constant the first two terms collapse to `ci0 d / v`. The optimal speed
//! is the root of `dJ/dv` on `(v_lo, v_max]`, accepted only where
//! `d2J/dv2 > 0`.

use alloc::vec::Vec;

use crate::cost_index::TimeConstant;
use crate::error::{require_speed, Error, Result};
use crate::root::{brent, log_grid};
use crate::segment::ClimbSegment;
use crate::vehicle::{final_charge, final_charge_sensitivity, AircraftParams};

/// Cost-index trajectory seen by one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostIndexInput {
    /// Cost index when the segment starts, C/s.
    pub start: f64,
    /// Filter input during the segment, C/s.
    pub input: f64,
    pub tau: TimeConstant,
}

impl CostIndexInput {
    pub fn constant(ci: f64) -> Self {
        Self {
            start: ci,
            input: ci,
            tau: TimeConstant::Infinite,
        }
    }

    pub fn filtered(start: f64, input: f64, tau: TimeConstant) -> Self {
        Self { start, input, tau }
    }

    fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("segment start cost index", self.start),
            ("cost index input", self.input),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        self.tau.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Lower end of the airspeed search interval, m/s.
    pub v_lo: f64,
    /// Relative tolerance on the airspeed.
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Log-spaced points used to locate sign changes of the gradient.
    pub scan_points: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            v_lo: 5.0,
            rel_tol: 1e-10,
            max_iter: 200,
            scan_points: 50,
        }
    }
}

/// Optimal constant-airspeed plan for one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClimbPlan {
    /// m/s
    pub speed: f64,
    /// s
    pub climb_time: f64,
    /// Minimum cost, C.
    pub cost: f64,
    /// Predicted charge at the end of the segment, C.
    pub final_charge: f64,
    pub depleted: bool,
    /// `d2J/dv2` at `speed`.
    pub curvature: f64,
    /// Second-order condition holds (or, at the speed limit, the gradient
    /// still points towards higher speeds).
    pub sufficient_ok: bool,
    /// The unconstrained optimum lies above `v_max` and was clipped.
    pub at_speed_limit: bool,
    /// Root-polishing iterations.
    pub iterations: usize,
}

/// One segment's optimization problem.
#[derive(Debug, Clone, Copy)]
pub struct ClimbProblem<'a> {
    pub segment: &'a ClimbSegment,
    pub aircraft: &'a AircraftParams,
    pub cost_index: CostIndexInput,
    /// Charge at the start of the segment, C.
    pub initial_charge: f64,
}

impl<'a> ClimbProblem<'a> {
    pub fn new(
        segment: &'a ClimbSegment,
        aircraft: &'a AircraftParams,
        cost_index: CostIndexInput,
        initial_charge: f64,
    ) -> Self {
        Self {
            segment,
            aircraft,
            cost_index,
            initial_charge,
        }
    }

    /// Time-related part of the cost: the integral of CI(t) over the climb.
    fn time_cost(&self, v: f64) -> f64 {
        let d = self.segment.distance;
        let ci = &self.cost_index;
        match ci.tau {
            TimeConstant::Infinite => ci.start * d / v,
            TimeConstant::Finite(tau) => {
                tau * (ci.start - ci.input) * -libm::expm1(-d / (tau * v)) + ci.input * d / v
            }
        }
    }

    /// Total cost `J(v)` in coulombs.
    pub fn total_cost(&self, v: f64) -> Result<f64> {
        require_speed(v)?;
        let qf = final_charge(self.initial_charge, v, self.segment, self.aircraft)?;
        Ok(self.time_cost(v) + self.initial_charge - qf.charge)
    }

    /// `dJ/dv`.
    pub fn cost_gradient(&self, v: f64) -> Result<f64> {
        require_speed(v)?;
        let d = self.segment.distance;
        let ci = &self.cost_index;
        let time_part = match ci.tau {
            TimeConstant::Infinite => -ci.start * d / (v * v),
            TimeConstant::Finite(tau) => {
                -(ci.start - ci.input) * d * libm::exp(-d / (tau * v)) / (v * v)
                    - ci.input * d / (v * v)
            }
        };
        Ok(time_part - final_charge_sensitivity(v, self.segment, self.aircraft)?)
    }

    /// `d2J/dv2`.
    pub fn cost_curvature(&self, v: f64) -> Result<f64> {
        require_speed(v)?;
        let d = self.segment.distance;
        let ci = &self.cost_index;
        let (v3, v4) = (v * v * v, v * v * v * v);
        let time_part = match ci.tau {
            TimeConstant::Infinite => 2.0 * ci.start * d / v3,
            TimeConstant::Finite(tau) => {
                (ci.start - ci.input) * d * libm::exp(-d / (tau * v)) * (2.0 * v - d / tau) / v4
                    + 2.0 * ci.input * d / v3
            }
        };
        let p = self.aircraft;
        let avg = &self.segment.densities;
        let w = p.weight();
        // Second derivative of the charge drawn over the segment.
        let energy_part = d / (p.efficiency * p.voltage)
            * (2.0 * w * self.segment.climb_rate / v3
                + avg.mean * p.wing_area * p.cd0
                + 12.0 * p.cd2 * w * w * avg.mean_inverse / (p.wing_area * v4));
        Ok(time_part + energy_part)
    }

    /// Minimizes `J` over `(opts.v_lo, v_max]`.
    ///
    /// The gradient is sampled on a log-spaced grid; every minus-to-plus sign
    /// change is polished with Brent's method and the candidate with the
    /// lowest cost wins. When the gradient is still negative at `v_max` the
    /// speed limit itself is a candidate.
    pub fn solve(&self, opts: &SolverOptions) -> Result<ClimbPlan> {
        self.aircraft.validate()?;
        self.cost_index.validate()?;
        let v_max = self.aircraft.v_max;
        if !(opts.v_lo > 0.0 && opts.v_lo < v_max) {
            return Err(Error::InvalidParameter {
                name: "lower speed bound",
                value: opts.v_lo,
            });
        }

        let speeds: Vec<f64> = log_grid(opts.v_lo, v_max, opts.scan_points.max(2)).collect();
        let grads = speeds
            .iter()
            .map(|&v| self.cost_gradient(v))
            .collect::<Result<Vec<f64>>>()?;

        let mut best: Option<(f64, f64, usize, bool)> = None;
        let mut consider = |v: f64, iterations: usize, at_limit: bool| -> Result<()> {
            let j = self.total_cost(v)?;
            if best.is_none_or(|(_, jb, _, _)| j < jb) {
                best = Some((v, j, iterations, at_limit));
            }
            Ok(())
        };
        for i in 0..speeds.len() - 1 {
            let (g0, g1) = (grads[i], grads[i + 1]);
            if g0 < 0.0 && g1 >= 0.0 {
                let root = brent(
                    |v| self.cost_gradient(v),
                    speeds[i],
                    speeds[i + 1],
                    opts.rel_tol,
                    opts.max_iter,
                )?;
                consider(root.x, root.iterations, false)?;
            }
        }
        let g_last = grads[grads.len() - 1];
        if g_last < 0.0 {
            consider(v_max, 0, true)?;
        }

        let (speed, cost, iterations, at_speed_limit) = best.ok_or(Error::NoInteriorOptimum {
            gradient_low: grads[0],
            gradient_high: g_last,
        })?;
        let curvature = self.cost_curvature(speed)?;
        if !at_speed_limit && !(curvature > 0.0) {
            return Err(Error::SufficientConditionViolated { speed, curvature });
        }
        let qf = final_charge(self.initial_charge, speed, self.segment, self.aircraft)?;
        Ok(ClimbPlan {
            speed,
            climb_time: self.segment.distance / speed,
            cost,
            final_charge: qf.charge,
            depleted: qf.depleted,
            curvature,
            sufficient_ok: true,
            at_speed_limit,
            iterations,
        })
    }
}

/// Optimal speed for a constant cost index `ci0`, as used to initialize the
/// flight management system before any ATC input.
pub fn fms_initial_speed(
    segment: &ClimbSegment,
    aircraft: &AircraftParams,
    ci0: f64,
    initial_charge: f64,
    opts: &SolverOptions,
) -> Result<ClimbPlan> {
    ClimbProblem::new(
        segment,
        aircraft,
        CostIndexInput::constant(ci0),
        initial_charge,
    )
    .solve(opts)
}

/// Time to fly the segment at constant airspeed `v`.
pub fn climbing_time(v: f64, segment: &ClimbSegment) -> Result<f64> {
    require_speed(v)?;
    Ok(segment.distance / v)
}

/// Constant cost index for which `v` is the optimal climb speed, found by
/// inverting the constant-CI optimality condition:
/// `ci = v^2 / d * (-dQf/dv)`.
pub fn ci_for_speed(aircraft: &AircraftParams, segment: &ClimbSegment, v: f64) -> Result<f64> {
    let ci = v * v / segment.distance * -final_charge_sensitivity(v, segment, aircraft)?;
    if ci > 0.0 && ci.is_finite() {
        Ok(ci)
    } else {
        Err(Error::EnvelopeInconsistency { ci_max: ci })
    }
}

/// CI ceiling that puts the constant-CI optimum exactly at `v_max`.
pub fn calibrate_ci_max(aircraft: &AircraftParams, segment: &ClimbSegment) -> Result<f64> {
    ci_for_speed(aircraft, segment, aircraft.v_max)
}

/// How the cost-index ceiling is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CiMaxSetting {
    /// The constant-CI optimum at `ci_max` is the maximum airspeed.
    MaxSpeed,
    /// The constant-CI optimum at `ci0_fraction * ci_max` equals `speed` (m/s).
    Anchored { speed: f64, ci0_fraction: f64 },
    /// Fixed value, C/s.
    Explicit(f64),
}

impl CiMaxSetting {
    pub fn resolve(&self, aircraft: &AircraftParams, segment: &ClimbSegment) -> Result<f64> {
        let ci_max = match *self {
            Self::MaxSpeed => calibrate_ci_max(aircraft, segment)?,
            Self::Anchored {
                speed,
                ci0_fraction,
            } => {
                if !(ci0_fraction > 0.0 && ci0_fraction <= 1.0) {
                    return Err(Error::InvalidParameter {
                        name: "anchor cost index fraction",
                        value: ci0_fraction,
                    });
                }
                if !(speed > 0.0 && speed <= aircraft.v_max) {
                    return Err(Error::InvalidParameter {
                        name: "anchor speed",
                        value: speed,
                    });
                }
                ci_for_speed(aircraft, segment, speed)? / ci0_fraction
            }
            Self::Explicit(value) => value,
        };
        if ci_max > 0.0 && ci_max.is_finite() {
            Ok(ci_max)
        } else {
            Err(Error::EnvelopeInconsistency { ci_max })
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::MaxSpeed => "vmax",
            Self::Anchored { .. } => "calibrated",
            Self::Explicit(_) => "explicit",
        }
    }
}
