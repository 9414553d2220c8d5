//! Force balance and battery charge model of the aircraft.

use crate::error::{require_positive, require_speed, Error, Result};
use crate::segment::ClimbSegment;
use crate::KMH;

/// Standard gravity, m/s^2.
pub const STANDARD_GRAVITY: f64 = 9.80665;

/// Airframe and powertrain constants. Mass is constant for a battery
/// powered aircraft, so the weight is fixed for the whole flight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AircraftParams {
    /// Wing reference area, m^2.
    pub wing_area: f64,
    /// kg
    pub mass: f64,
    /// Zero-lift (parasitic) drag coefficient.
    pub cd0: f64,
    /// Lift-induced drag coefficient.
    pub cd2: f64,
    /// Maximum airspeed, m/s.
    pub v_max: f64,
    /// Battery output voltage, V.
    pub voltage: f64,
    /// Electrical-to-mechanical conversion efficiency.
    pub efficiency: f64,
    /// m/s^2
    pub gravity: f64,
}

impl AircraftParams {
    /// Two-seat Yuneec E430 trainer.
    pub fn e430() -> Self {
        Self {
            wing_area: 11.37,
            mass: 472.0,
            cd0: 0.035,
            cd2: 0.009,
            v_max: 161.0 * KMH,
            voltage: 133.2,
            efficiency: 0.7,
            gravity: STANDARD_GRAVITY,
        }
    }

    /// Weight in newtons.
    pub fn weight(&self) -> f64 {
        self.mass * self.gravity
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("wing area", self.wing_area)?;
        require_positive("mass", self.mass)?;
        require_positive("cd0", self.cd0)?;
        require_positive("cd2", self.cd2)?;
        require_positive("maximum airspeed", self.v_max)?;
        require_positive("battery voltage", self.voltage)?;
        require_positive("gravity", self.gravity)?;
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "efficiency",
                value: self.efficiency,
            });
        }
        Ok(())
    }

    /// `eta * U`: converts mechanical power (W) into discharge current (A).
    fn electrical_scale(&self) -> f64 {
        self.efficiency * self.voltage
    }

    /// `2 * cd2 * W^2 / S`, the numerator shared by every induced-drag term.
    fn induced_factor(&self) -> f64 {
        let w = self.weight();
        2.0 * self.cd2 * w * w / self.wing_area
    }
}

impl Default for AircraftParams {
    fn default() -> Self {
        Self::e430()
    }
}

/// Charge held by an ideal constant-voltage battery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryState {
    /// C
    pub charge: f64,
    /// V
    pub voltage: f64,
}

impl BatteryState {
    /// Stored energy in joules.
    pub fn energy(&self) -> f64 {
        self.charge * self.voltage
    }
}

fn require_density(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveDensity(rho))
    }
}

/// Drag polar: parasitic plus lift-induced drag in level-equivalent flight.
pub fn drag(v: f64, rho: f64, params: &AircraftParams) -> Result<f64> {
    require_speed(v)?;
    require_density(rho)?;
    let v2 = v * v;
    Ok(0.5 * rho * params.wing_area * params.cd0 * v2 + params.induced_factor() / (rho * v2))
}

/// Thrust needed to hold airspeed `v` while climbing at `h_dot`.
pub fn thrust_for_climb(v: f64, h_dot: f64, rho: f64, params: &AircraftParams) -> Result<f64> {
    Ok(params.weight() * h_dot / v + drag(v, rho, params)?)
}

/// Battery charge rate in C/s; negative while the battery discharges.
pub fn charge_rate(v: f64, h_dot: f64, rho: f64, params: &AircraftParams) -> Result<f64> {
    require_speed(v)?;
    require_density(rho)?;
    let power = params.weight() * h_dot
        + 0.5 * rho * params.wing_area * params.cd0 * v * v * v
        + params.induced_factor() / (rho * v);
    Ok(-power / params.electrical_scale())
}

/// End-of-segment charge together with a depletion flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinalCharge {
    /// C
    pub charge: f64,
    /// Set when the battery would be exhausted before the segment ends.
    pub depleted: bool,
}

/// Charge drawn over a whole segment flown at `v`, using the segment's mean
/// climb rate and mean density quantities in place of the time integrals.
pub fn segment_consumption(v: f64, seg: &ClimbSegment, params: &AircraftParams) -> Result<f64> {
    require_speed(v)?;
    let avg = &seg.densities;
    let bracket = params.weight() * seg.climb_rate / v
        + 0.5 * avg.mean * params.wing_area * params.cd0 * v * v
        + params.induced_factor() * avg.mean_inverse / (v * v);
    Ok(seg.distance / params.electrical_scale() * bracket)
}

/// Closed-form charge left at the end of `seg` when starting from `q0`.
pub fn final_charge(
    q0: f64,
    v: f64,
    seg: &ClimbSegment,
    params: &AircraftParams,
) -> Result<FinalCharge> {
    let charge = q0 - segment_consumption(v, seg, params)?;
    Ok(FinalCharge {
        charge,
        depleted: charge < 0.0,
    })
}

/// Derivative of [`final_charge`] with respect to airspeed, C·s/m.
pub fn final_charge_sensitivity(
    v: f64,
    seg: &ClimbSegment,
    params: &AircraftParams,
) -> Result<f64> {
    require_speed(v)?;
    let avg = &seg.densities;
    let bracket = -params.weight() * seg.climb_rate / (v * v)
        + avg.mean * params.wing_area * params.cd0 * v
        - 2.0 * params.induced_factor() * avg.mean_inverse / (v * v * v);
    Ok(-seg.distance / params.electrical_scale() * bracket)
}
