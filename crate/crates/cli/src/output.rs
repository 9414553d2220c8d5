//! CSV, JSON and text renderings of scenario results.

use std::fmt::Write as _;
use std::io::{self, Write};

use eclimb_core::{CurveKind, ScenarioRun, SweepTable, TimeConstant, KMH};
use serde_json::{json, Value};

use crate::format::{mm_ss, round6, sig6};

pub const PROFILE_HEADER: &str = "t_s,x_m,h_m,v_ms,ci_Cs,q_C,e_J";

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(round6(x))
    } else {
        Value::Null
    }
}

fn kmh(v: f64) -> f64 {
    v / KMH
}

fn tau_secs(tau: TimeConstant) -> Value {
    match tau {
        TimeConstant::Finite(t) => num(t),
        TimeConstant::Infinite => Value::Null,
    }
}

/// Time profile, one row per sample. `track` adds the constant-CI speed.
pub fn write_profile_csv<W: Write>(run: &ScenarioRun, track: bool, out: &mut W) -> io::Result<()> {
    let mut line = String::from(PROFILE_HEADER);
    if track {
        line.push_str(",v_track_ms");
    }
    writeln!(out, "{line}")?;
    for s in &run.samples {
        line.clear();
        for x in [s.t, s.x, s.h, s.speed, s.ci, s.charge, s.energy] {
            if !line.is_empty() {
                line.push(',');
            }
            line.push_str(&sig6(x));
        }
        if track {
            line.push(',');
            line.push_str(&s.tracking_speed.map(sig6).unwrap_or_default());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Machine-readable summary of a run.
pub fn summary_json(run: &ScenarioRun) -> Value {
    let s = &run.summary;
    let events: Vec<Value> = run
        .replanned()
        .iter()
        .map(|seg| {
            json!({
                "t_s": num(seg.start_time),
                "x_m": num(seg.segment.start.x),
                "h_m": num(seg.segment.start.h),
                "ci_Cs": num(seg.cost_index.start),
                "ci_in_Cs": num(seg.cost_index.input),
            })
        })
        .collect();
    let segments: Vec<Value> = run
        .segments
        .iter()
        .enumerate()
        .map(|(i, seg)| {
            let p = &seg.plan;
            json!({
                "index": i,
                "start_time_s": num(seg.start_time),
                "end_time_s": num(seg.end_time),
                "start_km": [num(seg.segment.start.x / 1000.0), num(seg.segment.start.h / 1000.0)],
                "v_kmh": num(kmh(p.speed)),
                "v_ms": num(p.speed),
                "climb_time_s": num(p.climb_time),
                "cost_C": num(p.cost),
                "final_charge_C": num(p.final_charge),
                "curvature": num(p.curvature),
                "at_speed_limit": p.at_speed_limit,
                "depleted": p.depleted,
            })
        })
        .collect();
    json!({
        "ci_max_Cs": num(s.ci_max),
        "ci_max_mode": s.ci_max_mode,
        "ci0_Cs": num(s.ci0),
        "tau_s": tau_secs(s.tau),
        "v0_kmh": num(kmh(s.initial_speed)),
        "tc0_s": num(s.initial_climb_time),
        "events": events,
        "segments": segments,
        "final_v_kmh": num(kmh(s.final_speed)),
        "total_time_s": num(s.total_time),
        "baseline_time_s": num(s.baseline_time),
        "time_delta_s": num(s.time_delta),
        "final_charge_C": num(s.final_charge),
        "final_energy_J": num(s.final_energy),
        "energy_used_J": num(s.energy_used),
        "baseline_final_energy_J": num(s.baseline_final_energy),
        "baseline_energy_used_J": num(s.baseline_energy_used),
        "depleted": s.depleted,
        "samples": run.samples.len(),
    })
}

pub fn plan_text(run: &ScenarioRun) -> String {
    let s = &run.summary;
    let mut out = String::new();
    let tau = match s.tau {
        TimeConstant::Finite(t) => format!("{} s", sig6(t)),
        TimeConstant::Infinite => "infinite".into(),
    };
    let _ = writeln!(out, "ci_max     {} C/s ({})", sig6(s.ci_max), s.ci_max_mode);
    let _ = writeln!(out, "ci0        {} C/s, tau {tau}", sig6(s.ci0));
    for (i, seg) in run.segments.iter().enumerate() {
        let p = &seg.plan;
        let label = if i == 0 {
            "initial".to_string()
        } else {
            format!("event {i}")
        };
        let _ = writeln!(
            out,
            "{label:<10} t {} at ({:.3}, {:.3}) km: v* {:.2} km/h, climb {} ({} s), ci {} -> {} C/s{}",
            mm_ss(seg.start_time),
            seg.segment.start.x / 1000.0,
            seg.segment.start.h / 1000.0,
            kmh(p.speed),
            mm_ss(p.climb_time),
            sig6(p.climb_time),
            sig6(seg.cost_index.start),
            sig6(seg.cost_index.input),
            if p.at_speed_limit { " [at v_max]" } else { "" },
        );
    }
    let _ = writeln!(
        out,
        "climb      {} ({} s), without ATC input {} ({} s), delta {:+.0} s",
        mm_ss(s.total_time),
        sig6(s.total_time),
        mm_ss(s.baseline_time),
        sig6(s.baseline_time),
        s.time_delta,
    );
    let _ = writeln!(
        out,
        "energy     used {} MJ, left {} MJ (without ATC input: used {} MJ)",
        sig6(s.energy_used / 1e6),
        sig6(s.final_energy / 1e6),
        sig6(s.baseline_energy_used / 1e6),
    );
    if s.depleted {
        let _ = writeln!(
            out,
            "warning: battery charge falls below zero during the climb"
        );
    }
    out
}

pub fn write_sweep_csv<W: Write>(table: &SweepTable, out: &mut W) -> io::Result<()> {
    writeln!(out, "curve,tau_s,v_kmh,v_ms,cost_C,argmin")?;
    for curve in &table.curves {
        let (name, tau) = match curve.kind {
            CurveKind::Filtered(TimeConstant::Finite(t)) => ("filtered", sig6(t)),
            CurveKind::Filtered(TimeConstant::Infinite) => ("filtered", "inf".to_string()),
            CurveKind::ConstantBaseline => ("constant", "inf".to_string()),
        };
        for (i, (&v, &j)) in table.speeds.iter().zip(&curve.costs).enumerate() {
            writeln!(
                out,
                "{name},{tau},{},{},{},{}",
                sig6(kmh(v)),
                sig6(v),
                sig6(j),
                u8::from(i == curve.argmin)
            )?;
        }
    }
    Ok(())
}
