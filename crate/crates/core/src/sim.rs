//! Deterministic replay of a climb with ATC cost-index inputs.
//!
//! The climb starts with the speed planned at FMS initialization for the
//! constant airline cost index. Each ATC input re-plans the remaining climb
//! from the point where it is received, with the filter state carried over.
//! The battery charge is integrated on a fixed time grid using the local
//! density along the path.

use alloc::vec;
use alloc::vec::Vec;

use crate::atmosphere::{DensityAverages, DensityModel, Troposphere};
use crate::cost_index::{
    ci_at, CiEvent, CostIndexSchedule, EventTrigger, TimeConstant, TimeConstantSetting,
};
use crate::error::{require_positive, require_speed, Error, Result};
use crate::optimizer::{
    fms_initial_speed, CiMaxSetting, ClimbPlan, ClimbProblem, CostIndexInput, SolverOptions,
};
use crate::segment::{ClimbSegment, Waypoint};
use crate::vehicle::{charge_rate, segment_consumption, AircraftParams};

/// A cost index given either absolutely or relative to the ceiling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CiValue {
    /// Fraction of `ci_max`, in `[0, 1]`.
    Fraction(f64),
    /// C/s
    Value(f64),
}

impl CiValue {
    pub fn resolve(&self, ci_max: f64) -> Result<f64> {
        match *self {
            Self::Fraction(f) if (0.0..=1.0).contains(&f) => Ok(f * ci_max),
            Self::Fraction(f) => Err(Error::InvalidParameter {
                name: "cost index fraction",
                value: f,
            }),
            Self::Value(v) => Ok(v),
        }
    }
}

/// ATC input before the ceiling is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventSetting {
    pub trigger: EventTrigger,
    pub ci_in: CiValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostIndexSettings {
    pub ci0: CiValue,
    pub ci_max: CiMaxSetting,
    pub tau: TimeConstantSetting,
    pub events: Vec<EventSetting>,
}

/// Altitude band used for the density averages of a re-planned segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DensityReference {
    /// Averages over the whole climb, origin to cruise altitude.
    #[default]
    WholeClimb,
    /// Averages over the remaining altitude band only.
    Segment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub origin: Waypoint,
    /// Waypoint where cruise begins; its altitude is the assigned flight level.
    pub cruise: Waypoint,
    pub aircraft: AircraftParams,
    pub atmosphere: Troposphere,
    pub cost_index: CostIndexSettings,
    /// Battery charge at the origin, C.
    pub initial_charge: f64,
    /// Mean climb rate, m/s.
    pub climb_rate: f64,
    /// Integration and sampling step, s.
    pub sim_step: f64,
    /// Altitude grid step for density averages, m.
    pub atmosphere_step: f64,
    pub density_reference: DensityReference,
    /// Also report the constant-CI optimal speed for the instantaneous CI.
    pub tracking: bool,
    pub solver: SolverOptions,
}

impl Scenario {
    /// Scenario with default numerical settings.
    pub fn new(
        origin: Waypoint,
        cruise: Waypoint,
        aircraft: AircraftParams,
        cost_index: CostIndexSettings,
        initial_charge: f64,
        climb_rate: f64,
    ) -> Self {
        Self {
            origin,
            cruise,
            aircraft,
            atmosphere: Troposphere::standard(),
            cost_index,
            initial_charge,
            climb_rate,
            sim_step: 0.1,
            atmosphere_step: 1.0,
            density_reference: DensityReference::WholeClimb,
            tracking: true,
            solver: SolverOptions::default(),
        }
    }

    /// Same scenario with every ATC input removed.
    pub fn without_events(&self) -> Self {
        let mut scn = self.clone();
        scn.cost_index.events.clear();
        scn
    }

    pub fn validate(&self) -> Result<()> {
        self.aircraft.validate()?;
        if !(self.cruise.x > self.origin.x) {
            return Err(Error::InvalidParameter {
                name: "cruise waypoint x",
                value: self.cruise.x,
            });
        }
        if !(self.cruise.h >= self.origin.h) {
            return Err(Error::InvalidParameter {
                name: "cruise waypoint altitude",
                value: self.cruise.h,
            });
        }
        self.atmosphere.density(self.origin.h)?;
        self.atmosphere.density(self.cruise.h)?;
        if !(self.initial_charge >= 0.0 && self.initial_charge.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "initial charge",
                value: self.initial_charge,
            });
        }
        require_positive("simulation step", self.sim_step)?;
        require_positive("atmosphere step", self.atmosphere_step)?;
        Ok(())
    }

    fn climb_segment(&self, start: Waypoint, densities: DensityAverages) -> Result<ClimbSegment> {
        ClimbSegment::new(start, self.cruise, self.climb_rate, densities)
    }
}

/// One simulated time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    /// s since the start of the climb
    pub t: f64,
    /// m
    pub x: f64,
    /// m
    pub h: f64,
    /// Planned airspeed of the active segment, m/s.
    pub speed: f64,
    /// Cost index, C/s.
    pub ci: f64,
    /// Battery charge, C.
    pub charge: f64,
    /// Battery energy, J.
    pub energy: f64,
    /// Constant-CI optimal speed for the current cost index, m/s.
    pub tracking_speed: Option<f64>,
}

/// A planned segment and the part of the timeline it was flown for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentPlan {
    pub segment: ClimbSegment,
    pub cost_index: CostIndexInput,
    pub plan: ClimbPlan,
    /// s
    pub start_time: f64,
    /// When the segment was left: next event or end of climb, s.
    pub end_time: f64,
}

impl SegmentPlan {
    fn position(&self, t: f64) -> Waypoint {
        self.segment
            .point_at(self.plan.speed * (t - self.start_time))
    }

    fn ci(&self, t: f64) -> Result<f64> {
        let ci = &self.cost_index;
        ci_at((t - self.start_time).max(0.0), ci.start, ci.input, ci.tau)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub ci_max: f64,
    pub ci_max_mode: &'static str,
    pub ci0: f64,
    pub tau: TimeConstant,
    /// Speed and climb time planned at initialization.
    pub initial_speed: f64,
    pub initial_climb_time: f64,
    /// When each ATC input was received, s.
    pub event_times: Vec<f64>,
    pub final_speed: f64,
    pub total_time: f64,
    /// Climb time had no ATC input been received, s.
    pub baseline_time: f64,
    /// `total_time - baseline_time`; negative when the climb got shorter.
    pub time_delta: f64,
    pub final_charge: f64,
    pub final_energy: f64,
    pub energy_used: f64,
    pub baseline_final_energy: f64,
    pub baseline_energy_used: f64,
    /// The battery ran out before the end of the climb.
    pub depleted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub schedule: CostIndexSchedule,
    pub segments: Vec<SegmentPlan>,
    pub samples: Vec<ProfileSample>,
    pub summary: Summary,
}

impl ScenarioRun {
    /// Planned segments that received an ATC input; empty without events.
    pub fn replanned(&self) -> &[SegmentPlan] {
        &self.segments[1..]
    }
}

/// Plans and replays the climb.
pub fn run_scenario(scn: &Scenario) -> Result<ScenarioRun> {
    scn.validate()?;
    let aircraft = &scn.aircraft;
    let atm = &scn.atmosphere;
    let climb_densities = if scn.cruise.h > scn.origin.h {
        DensityAverages::over(atm, scn.origin.h, scn.cruise.h, scn.atmosphere_step)?
    } else {
        DensityAverages::at_altitude(atm, scn.origin.h)?
    };
    let full = scn.climb_segment(scn.origin, climb_densities)?;

    let settings = &scn.cost_index;
    let ci_max = settings.ci_max.resolve(aircraft, &full)?;
    let ci0 = settings.ci0.resolve(ci_max)?;
    let initial = fms_initial_speed(&full, aircraft, ci0, scn.initial_charge, &scn.solver)
        .map_err(|e| e.in_segment(0))?;
    let tau = settings.tau.resolve(initial.climb_time)?;
    let schedule = CostIndexSchedule {
        ci0,
        tau,
        ci_max,
        events: settings
            .events
            .iter()
            .map(|ev| {
                Ok(CiEvent {
                    trigger: ev.trigger,
                    ci_in: ev.ci_in.resolve(ci_max)?,
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    schedule.validate()?;

    let mut segments = vec![SegmentPlan {
        segment: full,
        cost_index: CostIndexInput::constant(ci0),
        plan: initial,
        start_time: 0.0,
        end_time: initial.climb_time,
    }];
    let mut event_times = Vec::with_capacity(schedule.events.len());

    for (index, event) in schedule.events.iter().enumerate() {
        let current = *segments.last().expect("at least one segment");
        let (t_event, point) = match event.trigger {
            EventTrigger::Time(t) => (t, current.position(t)),
            EventTrigger::Waypoint(w) => {
                let s = along_path(&current.segment, w).ok_or(Error::InvalidEvent {
                    index,
                    reason: "waypoint is not on the remaining climb path",
                })?;
                (current.start_time + s / current.plan.speed, w)
            }
        };
        if !(t_event > current.start_time && t_event < current.end_time) {
            return Err(Error::InvalidEvent {
                index,
                reason: "trigger falls outside the remaining climb",
            });
        }
        let ci_now = current.ci(t_event)?;
        segments.last_mut().expect("at least one segment").end_time = t_event;
        let charge_now =
            scn.initial_charge + integrate_charge(scn, &segments, 0.0, t_event, scn.sim_step)?;

        let densities = match scn.density_reference {
            DensityReference::WholeClimb => climb_densities,
            DensityReference::Segment if scn.cruise.h > point.h => {
                DensityAverages::over(atm, point.h, scn.cruise.h, scn.atmosphere_step)?
            }
            DensityReference::Segment => DensityAverages::at_altitude(atm, point.h)?,
        };
        let seg_index = index + 1;
        let segment = scn
            .climb_segment(point, densities)
            .map_err(|e| e.in_segment(seg_index))?;
        let cost_index = CostIndexInput::filtered(ci_now, event.ci_in, tau);
        let plan = ClimbProblem::new(&segment, aircraft, cost_index, charge_now)
            .solve(&scn.solver)
            .map_err(|e| e.in_segment(seg_index))?;
        event_times.push(t_event);
        segments.push(SegmentPlan {
            segment,
            cost_index,
            plan,
            start_time: t_event,
            end_time: t_event + plan.climb_time,
        });
    }

    let samples = sample_profile(scn, &segments)?;
    let baseline = [segments[0].clone_with_end(initial.climb_time)];
    let baseline_used = -integrate_charge(scn, &baseline, 0.0, initial.climb_time, scn.sim_step)?;

    let last = samples.last().expect("profile has at least two samples");
    let total_time = last.t;
    let voltage = aircraft.voltage;
    let depleted = samples.iter().any(|s| s.charge < 0.0);
    let summary = Summary {
        ci_max,
        ci_max_mode: settings.ci_max.name(),
        ci0,
        tau,
        initial_speed: initial.speed,
        initial_climb_time: initial.climb_time,
        event_times,
        final_speed: segments.last().expect("at least one segment").plan.speed,
        total_time,
        baseline_time: initial.climb_time,
        time_delta: total_time - initial.climb_time,
        final_charge: last.charge,
        final_energy: last.energy,
        energy_used: (scn.initial_charge - last.charge) * voltage,
        baseline_final_energy: (scn.initial_charge - baseline_used) * voltage,
        baseline_energy_used: baseline_used * voltage,
        depleted,
    };
    Ok(ScenarioRun {
        schedule,
        segments,
        samples,
        summary,
    })
}

impl SegmentPlan {
    fn clone_with_end(&self, end_time: f64) -> Self {
        Self { end_time, ..*self }
    }
}

/// Arc length of `w` along the straight path of `seg`, if `w` lies on it
/// strictly between the end points (within a metre).
fn along_path(seg: &ClimbSegment, w: Waypoint) -> Option<f64> {
    let (ux, uh) = (
        (seg.end.x - seg.start.x) / seg.distance,
        (seg.end.h - seg.start.h) / seg.distance,
    );
    let (dx, dh) = (w.x - seg.start.x, w.h - seg.start.h);
    let s = dx * ux + dh * uh;
    let off = (dx * uh - dh * ux).abs();
    (off <= 1.0 + 1e-9 * seg.distance && s > 0.0 && s < seg.distance).then_some(s)
}

/// Index of the segment being flown at `t`.
fn active(segments: &[SegmentPlan], t: f64) -> usize {
    segments
        .iter()
        .position(|s| t < s.end_time)
        .unwrap_or(segments.len() - 1)
}

fn rate_at(scn: &Scenario, seg: &SegmentPlan, t: f64) -> Result<f64> {
    let h = seg.position(t).h;
    charge_rate(
        seg.plan.speed,
        scn.climb_rate,
        scn.atmosphere.density(h)?,
        &scn.aircraft,
    )
}

/// Charge change over `[a, b]` using Simpson's rule on sub-intervals no
/// longer than `dt`, split at segment boundaries.
fn integrate_charge(
    scn: &Scenario,
    segments: &[SegmentPlan],
    a: f64,
    b: f64,
    dt: f64,
) -> Result<f64> {
    let pieces = libm::ceil((b - a) / dt).max(1.0) as usize;
    let mut total = 0.0;
    for k in 0..pieces {
        let lo = a + k as f64 * dt;
        let hi = if k + 1 == pieces { b } else { (lo + dt).min(b) };
        for seg in segments {
            let (p, q) = (lo.max(seg.start_time), hi.min(seg.end_time));
            if q > p {
                let mid = 0.5 * (p + q);
                total += (q - p) / 6.0
                    * (rate_at(scn, seg, p)?
                        + 4.0 * rate_at(scn, seg, mid)?
                        + rate_at(scn, seg, q)?);
            }
        }
    }
    Ok(total)
}

fn sample_profile(scn: &Scenario, segments: &[SegmentPlan]) -> Result<Vec<ProfileSample>> {
    let total = segments.last().expect("at least one segment").end_time;
    let dt = scn.sim_step;
    let n = libm::ceil(total / dt) as usize;
    let voltage = scn.aircraft.voltage;
    let mut samples = Vec::with_capacity(n + 1);
    let mut charge = scn.initial_charge;
    let mut prev_t = 0.0;
    let mut tracker = Tracker::default();
    for k in 0..=n {
        let t = if k == n {
            total
        } else {
            (k as f64 * dt).min(total)
        };
        if k > 0 {
            charge += integrate_charge(scn, segments, prev_t, t, dt)?;
        }
        let i = active(segments, t);
        let seg = &segments[i];
        let pos = seg.position(t);
        let ci = seg.ci(t)?;
        let tracking_speed = if scn.tracking {
            Some(tracker.speed(scn, i, seg, ci)?)
        } else {
            None
        };
        samples.push(ProfileSample {
            t,
            x: pos.x,
            h: pos.h,
            speed: seg.plan.speed,
            ci,
            charge,
            energy: charge * voltage,
            tracking_speed,
        });
        prev_t = t;
    }
    Ok(samples)
}

/// Memoized constant-CI optimum; the cost index stops changing a few time
/// constants after each input, so most samples hit the cache.
#[derive(Default)]
struct Tracker {
    key: Option<(usize, u64)>,
    speed: f64,
}

impl Tracker {
    fn speed(&mut self, scn: &Scenario, index: usize, seg: &SegmentPlan, ci: f64) -> Result<f64> {
        let key = (index, ci.to_bits());
        if self.key != Some(key) {
            self.speed = fms_initial_speed(&seg.segment, &scn.aircraft, ci, 0.0, &scn.solver)
                .map_err(|e| e.in_segment(index))?
                .speed;
            self.key = Some(key);
        }
        Ok(self.speed)
    }
}

/// Which cost curve a sweep row belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveKind {
    /// Filter from the segment's start CI to its input with this time constant.
    Filtered(TimeConstant),
    /// CI held at the segment's start value throughout.
    ConstantBaseline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    pub kind: CurveKind,
    pub costs: Vec<f64>,
    /// Index into the speed grid of the lowest cost.
    pub argmin: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub speeds: Vec<f64>,
    pub curves: Vec<SweepCurve>,
}

/// Evaluates the total cost on `speeds` for every time constant in `taus`
/// plus the constant-CI baseline.
pub fn sweep_cost(
    segment: &ClimbSegment,
    aircraft: &AircraftParams,
    ci_start: f64,
    ci_in: f64,
    initial_charge: f64,
    speeds: &[f64],
    taus: &[TimeConstant],
) -> Result<SweepTable> {
    if speeds.is_empty() {
        return Err(Error::InvalidParameter {
            name: "speed grid length",
            value: 0.0,
        });
    }
    for &v in speeds {
        require_speed(v)?;
        if v > aircraft.v_max * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter {
                name: "sweep speed above v_max",
                value: v,
            });
        }
    }
    let kinds = taus
        .iter()
        .map(|&tau| tau.validate().map(|_| CurveKind::Filtered(tau)))
        .chain(core::iter::once(Ok(CurveKind::ConstantBaseline)));
    let mut curves = Vec::with_capacity(taus.len() + 1);
    for kind in kinds {
        let kind = kind?;
        let ci = match kind {
            CurveKind::Filtered(tau) => CostIndexInput::filtered(ci_start, ci_in, tau),
            CurveKind::ConstantBaseline => CostIndexInput::constant(ci_start),
        };
        let problem = ClimbProblem::new(segment, aircraft, ci, initial_charge);
        let costs = speeds
            .iter()
            .map(|&v| problem.total_cost(v))
            .collect::<Result<Vec<f64>>>()?;
        let argmin = (0..costs.len())
            .min_by(|&a, &b| costs[a].total_cmp(&costs[b]))
            .expect("non-empty grid");
        curves.push(SweepCurve {
            kind,
            costs,
            argmin,
        });
    }
    Ok(SweepTable {
        speeds: speeds.to_vec(),
        curves,
    })
}

/// Relative gap between the closed-form charge drawn over a climb and a
/// direct time integration of the instantaneous charge rate with the local
/// density, altitude varying linearly in time.
#[allow(clippy::too_many_arguments)]
pub fn mvt_crosscheck<M: DensityModel + ?Sized>(
    model: &M,
    start: Waypoint,
    end: Waypoint,
    climb_rate: f64,
    altitude_step: f64,
    v: f64,
    aircraft: &AircraftParams,
    dt: f64,
) -> Result<f64> {
    require_speed(v)?;
    require_positive("integration step", dt)?;
    let seg = ClimbSegment::from_model(model, start, end, climb_rate, altitude_step)?;
    let closed = segment_consumption(v, &seg, aircraft)?;
    let t_c = seg.distance / v;
    let rate = |t: f64| -> Result<f64> {
        let h = seg.point_at(v * t).h;
        charge_rate(v, climb_rate, model.density(h)?, aircraft)
    };
    let pieces = libm::ceil(t_c / dt).max(1.0) as usize;
    let mut numeric = 0.0;
    for k in 0..pieces {
        let a = k as f64 * dt;
        let b = if k + 1 == pieces { t_c } else { a + dt };
        numeric -= (b - a) / 6.0 * (rate(a)? + 4.0 * rate(0.5 * (a + b))? + rate(b)?);
    }
    Ok((closed - numeric).abs() / numeric.abs())
}
