//! Minimum direct-operating-cost climb planning for all-electric aircraft.
//!
//! The crate computes the constant climb airspeed that minimizes the time
//! plus energy cost of a climb when the cost index (CI) is driven by a
//! first-order filter whose input is commanded by air traffic control.
//!
//! Everything here is pure computation over plain values. It builds with
//! `no_std` and only needs `alloc` for the scenario replay and cost sweeps.
//!
//! Units are SI throughout: metres, seconds, kilograms, newtons, coulombs,
//! volts. The cost index is carried in coulombs per second so that it adds
//! directly to the battery charge rate in the cost functional; see
//! [`cost_index::ci_to_kilowatts`] for the power-equivalent value.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod atmosphere;
pub mod cost_index;
pub mod error;
pub mod optimizer;
pub mod root;
pub mod segment;
pub mod sim;
pub mod vehicle;

pub use atmosphere::{ConstantDensity, DensityAverages, DensityModel, Troposphere};
pub use cost_index::{
    ci_at, ci_ode_check, CiEvent, CostIndexSchedule, EventTrigger, TimeConstant,
    TimeConstantSetting,
};
pub use error::{Error, Result};
pub use optimizer::{
    calibrate_ci_max, ci_for_speed, climbing_time, fms_initial_speed, CiMaxSetting, ClimbPlan,
    ClimbProblem, CostIndexInput, SolverOptions,
};
pub use segment::{ClimbSegment, Waypoint};
pub use sim::{
    mvt_crosscheck, run_scenario, sweep_cost, CiValue, CostIndexSettings, CurveKind,
    DensityReference, EventSetting, ProfileSample, Scenario, ScenarioRun, SegmentPlan, Summary,
    SweepCurve, SweepTable,
};
pub use vehicle::{AircraftParams, BatteryState, FinalCharge};

/// km/h to m/s.
pub const KMH: f64 = 1.0 / 3.6;
