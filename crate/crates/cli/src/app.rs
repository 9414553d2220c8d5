use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use eclimb_core::{
    fms_initial_speed, run_scenario, sweep_cost, CiMaxSetting, CiValue, ClimbSegment,
    DensityAverages, DensityModel, Scenario, ScenarioRun, TimeConstant, KMH,
};
use serde_json::json;

use crate::config::{CiMaxConfig, ScenarioConfig};
use crate::error::CliError;
use crate::format::{round6, sig6};
use crate::output;

#[derive(Debug, Parser)]
#[command(
    name = "eclimb",
    version,
    about = "Minimum-cost constant-airspeed climbs for electric aircraft"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario file (TOML).
    #[arg(long, short, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    /// Ignore ATC cost-index inputs.
    #[arg(long, global = true)]
    pub no_event: bool,
    /// Integration and sampling step, s.
    #[arg(long, global = true)]
    pub sim_step: Option<f64>,
    /// Altitude grid step for density averages, m.
    #[arg(long, global = true)]
    pub atmo_step: Option<f64>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan the climb and print speeds, times and energy.
    Plan,
    /// Simulate the climb and write the time profile as CSV plus a JSON summary.
    Profile {
        /// Leave out the constant-CI tracking speed column.
        #[arg(long)]
        no_track: bool,
    },
    /// Tabulate total cost against airspeed for several filter time constants.
    Sweep(SweepArgs),
    /// Report the CI ceiling under each calibration mode.
    Calibrate {
        /// Anchor speed for the calibrated mode; defaults to the config value.
        #[arg(long)]
        target_kmh: Option<f64>,
    },
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 60.0)]
    pub v_min_kmh: f64,
    /// Defaults to the aircraft maximum airspeed.
    #[arg(long)]
    pub v_max_kmh: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub v_step_kmh: f64,
    /// Time constants: seconds, `<k>tc0` for a multiple of the initial
    /// climb time, or `inf`.
    #[arg(long, value_delimiter = ',', default_values_t = ["0.001tc0".to_string(), "0.01tc0".to_string(), "0.1tc0".to_string(), "1tc0".to_string()])]
    pub tau: Vec<String>,
}

fn load(
    common: &Common,
    env: impl IntoIterator<Item = (String, String)>,
) -> Result<ScenarioConfig, CliError> {
    let path = common
        .config
        .as_deref()
        .ok_or_else(|| CliError::Usage("--config <FILE> is required".into()))?;
    let mut cfg = ScenarioConfig::load(path, env)?;
    if let Some(dt) = common.sim_step {
        cfg.scenario.sim_step_s = dt;
    }
    if let Some(dh) = common.atmo_step {
        cfg.scenario.atmosphere_step_m = dh;
    }
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        })
}

fn emit(common: &Common, stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match &common.out {
        Some(path) => {
            let mut f = create(path)?;
            f.write_all(text.as_bytes())
                .and_then(|_| f.flush())
                .map_err(|source| CliError::Write {
                    path: path.clone(),
                    source,
                })
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Write {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn json_text(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json serializes");
    s.push('\n');
    s
}

/// `profile.csv` -> `profile.summary.json`
pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.json")
}

pub fn run(
    cli: &Cli,
    env: impl IntoIterator<Item = (String, String)>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let common = &cli.common;
    let cfg = load(common, env)?;
    let mut scn = cfg.to_scenario(!common.no_event)?;
    match &cli.command {
        Command::Plan => {
            scn.tracking = false;
            let run = run_scenario(&scn)?;
            let text = if common.json {
                json_text(&output::summary_json(&run))
            } else {
                output::plan_text(&run)
            };
            emit(common, stdout, &text)
        }
        Command::Profile { no_track } => {
            scn.tracking = !no_track;
            let run = run_scenario(&scn)?;
            profile(common, &run, !no_track, stdout)
        }
        Command::Sweep(args) => sweep(common, &scn, args, stdout),
        Command::Calibrate { target_kmh } => calibrate(common, &cfg, &scn, *target_kmh, stdout),
    }
}

fn profile(
    common: &Common,
    run: &ScenarioRun,
    track: bool,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let mut csv = Vec::new();
    output::write_profile_csv(run, track, &mut csv).expect("writing to memory");
    let csv = String::from_utf8(csv).expect("ascii output");
    emit(common, stdout, &csv)?;
    if let Some(out) = &common.out {
        let path = summary_path(out);
        let text = json_text(&output::summary_json(run));
        std::fs::write(&path, text).map_err(|source| CliError::Write { path, source })?;
    }
    Ok(())
}

fn parse_tau(raw: &str, tc0: f64) -> Result<TimeConstant, CliError> {
    let raw = raw.trim();
    let bad = || CliError::Usage(format!("invalid time constant `{raw}`"));
    if raw.eq_ignore_ascii_case("inf") || raw.eq_ignore_ascii_case("infinite") {
        return Ok(TimeConstant::Infinite);
    }
    let secs = match raw.strip_suffix("tc0") {
        Some(k) => k.trim_end_matches('*').parse::<f64>().map_err(|_| bad())? * tc0,
        None => raw.parse::<f64>().map_err(|_| bad())?,
    };
    TimeConstant::seconds(secs).map_err(|_| bad())
}

fn speed_grid(args: &SweepArgs, v_max_kmh: f64) -> Result<Vec<f64>, CliError> {
    let hi = args.v_max_kmh.unwrap_or(v_max_kmh);
    let (lo, step) = (args.v_min_kmh, args.v_step_kmh);
    if !(lo > 0.0 && step > 0.0 && hi >= lo && hi <= v_max_kmh + 1e-9) {
        return Err(CliError::Usage(format!(
            "empty or invalid speed grid: {lo}..{hi} km/h step {step} (v_max {v_max_kmh} km/h)"
        )));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| (lo + i as f64 * step).min(v_max_kmh) * KMH)
        .collect())
}

fn sweep(
    common: &Common,
    scn: &Scenario,
    args: &SweepArgs,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let mut scn = scn.clone();
    scn.tracking = false;
    let run = run_scenario(&scn)?;
    let tc0 = run.summary.initial_climb_time;
    let taus = args
        .tau
        .iter()
        .map(|t| parse_tau(t, tc0))
        .collect::<Result<Vec<_>, _>>()?;
    let speeds = speed_grid(args, scn.aircraft.v_max / KMH)?;
    // The first segment that received an ATC input, or the whole climb.
    let seg = run.segments.get(1).unwrap_or(&run.segments[0]);
    let table = sweep_cost(
        &seg.segment,
        &scn.aircraft,
        seg.cost_index.start,
        seg.cost_index.input,
        scn.initial_charge,
        &speeds,
        &taus,
    )?;
    let mut csv = Vec::new();
    output::write_sweep_csv(&table, &mut csv).expect("writing to memory");
    emit(
        common,
        stdout,
        &String::from_utf8(csv).expect("ascii output"),
    )
}

fn calibrate(
    common: &Common,
    cfg: &ScenarioConfig,
    scn: &Scenario,
    target_kmh: Option<f64>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let atm = &scn.atmosphere;
    let densities = if scn.cruise.h > scn.origin.h {
        DensityAverages::over(atm, scn.origin.h, scn.cruise.h, scn.atmosphere_step)?
    } else {
        atm.density(scn.origin.h)?;
        DensityAverages::at_altitude(atm, scn.origin.h)?
    };
    let full = ClimbSegment::new(scn.origin, scn.cruise, scn.climb_rate, densities)?;
    let target = target_kmh.or(match &cfg.cost_index.ci_max {
        CiMaxConfig::Calibrated { target_v0_kmh, .. } => Some(*target_v0_kmh),
        _ => None,
    });
    let mut modes = vec![CiMaxSetting::MaxSpeed];
    match (target, cfg.ci0_fraction()) {
        (Some(speed), Some(f)) => modes.push(CiMaxSetting::Anchored {
            speed: speed * KMH,
            ci0_fraction: f,
        }),
        (Some(_), None) => {
            return Err(CliError::Usage(
                "calibrated mode needs `cost_index.ci0_fraction`".into(),
            ))
        }
        (None, _) => {}
    }
    if let CiMaxConfig::Explicit { value } = cfg.cost_index.ci_max {
        modes.push(CiMaxSetting::Explicit(value));
    }
    let selected = scn.cost_index.ci_max.name();
    let mut rows = Vec::new();
    for mode in modes {
        let ci_max = mode.resolve(&scn.aircraft, &full)?;
        let ci0 = scn.cost_index.ci0.resolve(ci_max)?;
        let plan = fms_initial_speed(&full, &scn.aircraft, ci0, scn.initial_charge, &scn.solver)?;
        rows.push((mode.name(), ci_max, ci0, plan));
    }
    let text = if common.json {
        let modes: Vec<_> = rows
            .iter()
            .map(|(name, ci_max, ci0, plan)| {
                json!({
                    "mode": name,
                    "selected": *name == selected,
                    "ci_max_Cs": round6(*ci_max),
                    "ci0_Cs": round6(*ci0),
                    "v0_kmh": round6(plan.speed / KMH),
                    "tc0_s": round6(plan.climb_time),
                })
            })
            .collect();
        json_text(&json!({ "modes": modes }))
    } else {
        let ci0_label = match scn.cost_index.ci0 {
            CiValue::Fraction(f) => format!("{} ci_max", sig6(f)),
            CiValue::Value(v) => format!("{} C/s", sig6(v)),
        };
        let mut s = format!("ci0 = {ci0_label}\n");
        for (name, ci_max, ci0, plan) in &rows {
            s.push_str(&format!(
                "{}{name:<11} ci_max {} C/s, ci0 {} C/s, v0* {:.2} km/h, climb {} s\n",
                if *name == selected { "* " } else { "  " },
                sig6(*ci_max),
                sig6(*ci0),
                plan.speed / KMH,
                sig6(plan.climb_time),
            ));
        }
        s
    };
    emit(common, stdout, &text)
}
