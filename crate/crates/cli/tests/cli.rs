use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const VOLTAGE: f64 = 133.2;

fn config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/e430_climb.toml")
}

fn eclimb(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_eclimb"));
    for (k, _) in std::env::vars() {
        if k.starts_with("ECLIMB_") {
            cmd.env_remove(k);
        }
    }
    cmd.args(args).envs(env.iter().copied()).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn with_config(extra: &[&str]) -> Vec<String> {
    let mut args: Vec<String> = extra.iter().map(|s| s.to_string()).collect();
    args.push("--config".into());
    args.push(config().to_str().unwrap().into());
    args
}

fn run(extra: &[&str]) -> Output {
    let args = with_config(extra);
    eclimb(&args.iter().map(String::as_str).collect::<Vec<_>>(), &[])
}

fn summary(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn plan_reports_speeds_times_and_delta() {
    let text = stdout(&run(&["plan"]));
    assert!(text.contains("v* 140.19 km/h, climb 12:51"), "{text}");
    assert!(
        text.contains("t 6:25 at (15.000, 0.500) km: v* 154.13 km/h"),
        "{text}"
    );
    assert!(text.contains("climb      12:16"), "{text}");
    assert!(text.contains("delta -35 s"), "{text}");
}

#[test]
fn plan_json_is_parseable() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&run(&["plan", "--json"]))).unwrap();
    assert_eq!(v["ci_max_mode"], "calibrated");
    assert_eq!(v["segments"].as_array().unwrap().len(), 2);
    assert_eq!(v["events"][0]["x_m"], 15000.0);
}

#[test]
fn profile_rows_columns_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    stdout(&run(&[
        "profile",
        "--sim-step",
        "0.5",
        "--out",
        csv.to_str().unwrap(),
    ]));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t_s,x_m,h_m,v_ms,ci_Cs,q_C,e_J,v_track_ms"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    let s = summary(&dir.path().join("p.summary.json"));
    let total = s["total_time_s"].as_f64().unwrap();
    assert_eq!(rows.len(), (total / 0.5).ceil() as usize + 1);
    assert_eq!(s["samples"].as_u64().unwrap() as usize, rows.len());
    assert_eq!(rows[0][0], 0.0);
    assert!((rows.last().unwrap()[0] - total).abs() < 1e-3);
    assert!((rows.last().unwrap()[2] - 1000.0).abs() < 1e-3);
    for r in &rows {
        assert_eq!(r.len(), 8);
        assert!((r[6] - r[5] * VOLTAGE).abs() <= 1e-5 * r[6]);
    }
}

#[test]
fn no_track_drops_the_column() {
    let text = stdout(&run(&["profile", "--no-track", "--sim-step", "5"]));
    assert_eq!(
        text.lines().next().unwrap(),
        "t_s,x_m,h_m,v_ms,ci_Cs,q_C,e_J"
    );
    assert!(text.lines().skip(1).all(|l| l.split(',').count() == 7));
}

#[test]
fn event_costs_energy() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    stdout(&run(&[
        "profile",
        "--sim-step",
        "1",
        "--out",
        a.to_str().unwrap(),
    ]));
    stdout(&run(&[
        "profile",
        "--sim-step",
        "1",
        "--no-event",
        "--out",
        b.to_str().unwrap(),
    ]));
    let (with, without) = (
        summary(&dir.path().join("a.summary.json")),
        summary(&dir.path().join("b.summary.json")),
    );
    assert!(with["final_energy_J"].as_f64().unwrap() < without["final_energy_J"].as_f64().unwrap());
    assert!(with["total_time_s"].as_f64().unwrap() < without["total_time_s"].as_f64().unwrap());
    assert_eq!(without["events"].as_array().unwrap().len(), 0);
    assert_eq!(without["time_delta_s"], 0.0);
}

#[test]
fn sweep_marks_one_minimum_per_curve() {
    let text = stdout(&run(&[
        "sweep",
        "--v-min-kmh",
        "120",
        "--v-step-kmh",
        "1",
        "--tau",
        "0.01tc0,inf,30",
    ]));
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "curve,tau_s,v_kmh,v_ms,cost_C,argmin"
    );
    let rows: Vec<&str> = lines.collect();
    // 120..=161 km/h, three filtered curves plus the constant baseline.
    assert_eq!(rows.len(), 42 * 4);
    assert_eq!(rows.iter().filter(|r| r.ends_with(",1")).count(), 4);
    let best = rows
        .iter()
        .find(|r| r.starts_with("filtered,7.70811,") && r.ends_with(",1"))
        .unwrap();
    assert!(best.contains(",154.000,"), "{best}");
}

#[test]
fn calibrate_lists_both_modes() {
    let text = stdout(&run(&["calibrate"]));
    assert!(text.contains("vmax        ci_max 350.540 C/s"), "{text}");
    assert!(text.contains("v0* 142.27 km/h"), "{text}");
    assert!(text.contains("* calibrated  ci_max 327.989 C/s"), "{text}");
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&run(&["calibrate", "--json"]))).unwrap();
    assert_eq!(v["modes"].as_array().unwrap().len(), 2);
}

#[test]
fn environment_overrides_config() {
    let args = with_config(&["plan", "--json"]);
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = eclimb(
        &args,
        &[
            ("ECLIMB_COST_INDEX__CI_MAX__MODE", "vmax"),
            ("ECLIMB_COST_INDEX__CI_MAX__TARGET_V0_KMH", ""),
        ],
    );
    // `target_v0_kmh` is not a field of the vmax mode.
    assert_eq!(out.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    let text = std::fs::read_to_string(config()).unwrap();
    std::fs::write(
        &cfg,
        text.replace(
            "ci_max = { mode = \"calibrated\", target_v0_kmh = 140.19 }",
            "ci_max = { mode = \"vmax\" }",
        ),
    )
    .unwrap();
    let out = eclimb(
        &["plan", "--json", "--config", cfg.to_str().unwrap()],
        &[
            ("ECLIMB_COST_INDEX__CI_MAX__MODE", "explicit"),
            ("ECLIMB_COST_INDEX__CI_MAX__VALUE", "300.0"),
        ],
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["ci_max_Cs"], 300.0);
    assert_eq!(v["ci_max_mode"], "explicit");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: String| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };
    let base = std::fs::read_to_string(config()).unwrap();
    let code = |args: &[&str]| eclimb(args, &[]).status.code();

    let missing = dir.path().join("missing.toml");
    assert_eq!(
        code(&["plan", "--config", missing.to_str().unwrap()]),
        Some(4)
    );

    let unknown = write(
        "unknown.toml",
        base.replace("cd0 = 0.035", "cd0 = 0.035\nspan_m = 13.8"),
    );
    let out = eclimb(&["plan", "--config", unknown.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("span_m") && err.contains("line"), "{err}");

    let fraction = write(
        "fraction.toml",
        base.replace("ci_in_fraction = 0.9", "ci_in_fraction = 1.9"),
    );
    assert_eq!(
        code(&["plan", "--config", fraction.to_str().unwrap()]),
        Some(2)
    );

    let off_path = write(
        "off.toml",
        base.replace("waypoint_km = [15.0, 0.5]", "waypoint_km = [15.0, 0.7]"),
    );
    let out = eclimb(&["plan", "--config", off_path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("event 0"));

    let high = write(
        "high.toml",
        base.replace("cruise_km = [30.0, 1.0]", "cruise_km = [30.0, 12.0]"),
    );
    assert_eq!(code(&["plan", "--config", high.to_str().unwrap()]), Some(2));

    let neg = write(
        "neg.toml",
        base.replace(
            "ci_max = { mode = \"calibrated\", target_v0_kmh = 140.19 }",
            "ci_max = { mode = \"explicit\", value = -5.0 }",
        ),
    );
    assert_eq!(code(&["plan", "--config", neg.to_str().unwrap()]), Some(3));

    let cfg = config();
    let cfg = cfg.to_str().unwrap();
    assert_eq!(
        code(&[
            "sweep",
            "--config",
            cfg,
            "--v-min-kmh",
            "150",
            "--v-max-kmh",
            "140"
        ]),
        Some(2)
    );
    assert_eq!(code(&["sweep", "--config", cfg, "--tau", "soon"]), Some(2));
    assert_eq!(code(&["plan", "--config", cfg, "--sim-step", "0"]), Some(2));
    assert_eq!(code(&["plan"]), Some(2));
    let unwritable = dir.path().join("no/such/dir/p.csv");
    assert_eq!(
        code(&[
            "profile",
            "--config",
            cfg,
            "--out",
            unwritable.to_str().unwrap()
        ]),
        Some(4)
    );
}
