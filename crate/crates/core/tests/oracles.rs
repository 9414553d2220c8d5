//! Checks against independent re-implementations.

use eclimb_core::{
    calibrate_ci_max, ci_for_speed, fms_initial_speed, AircraftParams, CiMaxSetting, ClimbProblem,
    ClimbSegment, CostIndexInput, SolverOptions, TimeConstant, Troposphere, Waypoint, KMH,
};
use proptest::prelude::*;

fn reference_climb() -> ClimbSegment {
    ClimbSegment::from_model(
        &Troposphere::standard(),
        Waypoint::from_km(0.0, 0.0),
        Waypoint::from_km(30.0, 1.0),
        1.65,
        1.0,
    )
    .unwrap()
}

/// Cost written out from scratch, without the crate's helpers.
fn cost(v: f64, seg: &ClimbSegment, ac: &AircraftParams, ci0: f64, ci_in: f64, tau: f64) -> f64 {
    let d = seg.distance;
    let w = ac.mass * ac.gravity;
    let time = if tau.is_infinite() {
        ci0 * d / v
    } else {
        tau * (ci0 - ci_in) * (1.0 - (-d / (tau * v)).exp()) + ci_in * d / v
    };
    let power = w * seg.climb_rate / v
        + 0.5 * seg.densities.mean * ac.wing_area * ac.cd0 * v * v
        + 2.0 * ac.cd2 * w * w * seg.densities.mean_inverse / (ac.wing_area * v * v);
    time + d / (ac.efficiency * ac.voltage) * power
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-9 {
        let (c, d) = (b - r * (b - a), a + r * (b - a));
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

fn oracle_speed(seg: &ClimbSegment, ac: &AircraftParams, ci: f64) -> f64 {
    golden_section(|v| cost(v, seg, ac, ci, ci, f64::INFINITY), 5.0, ac.v_max)
}

/// Outer bisection on the cost index until the constant-CI optimum hits `target`.
fn nested_calibration(seg: &ClimbSegment, ac: &AircraftParams, target: f64, fraction: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 10_000.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if oracle_speed(seg, ac, fraction * mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn closed_form_calibration_matches_nested_bisection() {
    let seg = reference_climb();
    let ac = AircraftParams::e430();
    let opts = SolverOptions::default();

    // Clamped at v_max, so approach from just below.
    let target = ac.v_max * (1.0 - 1e-9);
    let nested = nested_calibration(&seg, &ac, target, 1.0);
    let closed = calibrate_ci_max(&ac, &seg).unwrap();
    assert!(
        (nested - closed).abs() / closed < 1e-5,
        "{nested} vs {closed}"
    );
    let v = fms_initial_speed(&seg, &ac, closed, 0.0, &opts)
        .unwrap()
        .speed;
    assert!((v - ac.v_max).abs() / KMH < 0.01);

    let anchored = CiMaxSetting::Anchored {
        speed: 140.19 * KMH,
        ci0_fraction: 0.6,
    };
    let closed = anchored.resolve(&ac, &seg).unwrap();
    let nested = nested_calibration(&seg, &ac, 140.19 * KMH, 0.6);
    let v_closed = fms_initial_speed(&seg, &ac, 0.6 * closed, 0.0, &opts)
        .unwrap()
        .speed;
    let v_nested = oracle_speed(&seg, &ac, 0.6 * nested);
    assert!((v_closed - v_nested).abs() / KMH < 0.01);
    assert!((v_closed / KMH - 140.19).abs() < 1e-6);
}

#[test]
fn solver_matches_independent_cost_on_reference_climb() {
    let seg = reference_climb();
    let ac = AircraftParams::e430();
    let ci_max = calibrate_ci_max(&ac, &seg).unwrap();
    for (f0, f_in, tau) in [
        (0.6, 0.9, 7.7),
        (0.6, 0.9, 770.0),
        (0.9, 0.2, 77.0),
        (0.3, 0.3, 10.0),
        (0.5, 1.0, f64::INFINITY),
    ] {
        let (ci0, ci_in) = (f0 * ci_max, f_in * ci_max);
        let tc = TimeConstant::seconds(tau).unwrap();
        let p = ClimbProblem::new(&seg, &ac, CostIndexInput::filtered(ci0, ci_in, tc), 4.0e5);
        let v = p.solve(&SolverOptions::default()).unwrap().speed;
        let oracle = golden_section(|v| cost(v, &seg, &ac, ci0, ci_in, tau), 5.0, ac.v_max);
        assert!((v - oracle).abs() < 1e-5, "{v} vs {oracle}");
        // Same cost up to the constant q0 - q0.
        assert!((p.total_cost(v).unwrap() - cost(v, &seg, &ac, ci0, ci_in, tau)).abs() < 1e-6);
    }
}

#[test]
fn slant_distance_and_inverse_calibration() {
    let seg = reference_climb();
    assert!((seg.distance - 30_016.662_039_607_27).abs() < 1e-9);
    let ac = AircraftParams::e430();
    for kmh in [100.0, 120.0, 140.19, 161.0] {
        let ci = ci_for_speed(&ac, &seg, kmh * KMH).unwrap();
        let v = fms_initial_speed(&seg, &ac, ci, 0.0, &SolverOptions::default())
            .unwrap()
            .speed;
        assert!((v / KMH - kmh).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constant_ci_speed_grows_with_ci(h0 in 0.0..3000.0f64, dh in 50.0..2000.0f64,
                                       dx in 5_000.0..50_000.0f64, rate in 0.5..4.0f64,
                                       a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let seg = ClimbSegment::from_model(
            &Troposphere::standard(), Waypoint::new(0.0, h0), Waypoint::new(dx, h0 + dh), rate, 1.0,
        ).unwrap();
        let ac = AircraftParams::e430();
        let opts = SolverOptions::default();
        if let Ok(ci_max) = calibrate_ci_max(&ac, &seg) {
            let (lo, hi) = (a.min(b) * ci_max, a.max(b) * ci_max);
            let v_lo = fms_initial_speed(&seg, &ac, lo, 0.0, &opts).unwrap();
            let v_hi = fms_initial_speed(&seg, &ac, hi, 0.0, &opts).unwrap();
            prop_assert!(v_lo.speed <= v_hi.speed + 1e-9);
            prop_assert!(v_hi.speed <= ac.v_max * (1.0 + 1e-12));
            prop_assert!(v_lo.curvature > 0.0);
        }
    }

    #[test]
    fn optimum_is_stationary(ci0 in 0.0..350.0f64, ci_in in 0.0..350.0f64, tau in 0.5..5000.0f64) {
        let seg = reference_climb();
        let ac = AircraftParams::e430();
        let p = ClimbProblem::new(&seg, &ac, CostIndexInput::filtered(ci0, ci_in, TimeConstant::Finite(tau)), 4.0e5);
        let plan = p.solve(&SolverOptions::default()).unwrap();
        if !plan.at_speed_limit {
            let g = p.cost_gradient(plan.speed).unwrap();
            let scale = ci0.max(ci_in).max(1.0) * seg.distance / (plan.speed * plan.speed);
            prop_assert!(g.abs() <= 1e-6 * scale);
            prop_assert!(plan.sufficient_ok);
        }
        let j = plan.cost;
        for v in [plan.speed * 0.99, (plan.speed * 1.01).min(ac.v_max)] {
            prop_assert!(p.total_cost(v).unwrap() >= j - 1e-9 * j.abs());
        }
    }
}
