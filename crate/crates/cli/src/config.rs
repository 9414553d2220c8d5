//! Scenario configuration file.
//!
//! TOML with three tables (`aircraft`, `scenario`, `cost_index`). Every
//! dimensional key carries its unit in the name and unknown keys are
//! rejected. Any key can be overridden from the environment with
//! `ECLIMB_<TABLE>__<KEY>[__<SUBKEY>]`, e.g.
//! `ECLIMB_SCENARIO__Q0_COULOMBS=350000` or
//! `ECLIMB_COST_INDEX__TAU__MODE=infinite`.

use std::path::Path;

use eclimb_core::cost_index::{EventTrigger, TimeConstantSetting};
use eclimb_core::sim::EventSetting;
use eclimb_core::{
    AircraftParams, CiMaxSetting, CiValue, CostIndexSettings, DensityReference, Scenario, Waypoint,
    KMH,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const ENV_PREFIX: &str = "ECLIMB_";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub aircraft: AircraftConfig,
    pub scenario: ScenarioBlock,
    pub cost_index: CostIndexConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AircraftConfig {
    pub wing_area_m2: f64,
    pub mass_kg: f64,
    pub cd0: f64,
    pub cd2: f64,
    pub vmax_kmh: f64,
    pub voltage_v: f64,
    pub efficiency: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gravity_ms2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityReferenceConfig {
    #[default]
    Climb,
    Segment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioBlock {
    /// `[x, h]`
    pub origin_km: [f64; 2],
    pub cruise_km: [f64; 2],
    pub q0_coulombs: f64,
    pub h_dot_bar_ms: f64,
    #[serde(default = "default_sim_step")]
    pub sim_step_s: f64,
    #[serde(default = "default_atmosphere_step")]
    pub atmosphere_step_m: f64,
    #[serde(default)]
    pub density_reference: DensityReferenceConfig,
}

fn default_sim_step() -> f64 {
    0.1
}

fn default_atmosphere_step() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum CiMaxConfig {
    /// The constant-CI optimum at `ci_max` is `v_max`.
    Vmax {},
    /// The constant-CI optimum at `ci0_fraction * ci_max` is `target_v0_kmh`.
    Calibrated {
        target_v0_kmh: f64,
        /// Defaults to the block's `ci0_fraction`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ci0_fraction: Option<f64>,
    },
    Explicit {
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum TauConfig {
    FractionOfTc0 { factor: f64 },
    Seconds { value: f64 },
    Infinite {},
}

impl Default for TauConfig {
    fn default() -> Self {
        TauConfig::FractionOfTc0 { factor: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waypoint_km: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci_in_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci_in_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostIndexConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci0_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci0_value: Option<f64>,
    pub ci_max: CiMaxConfig,
    #[serde(default)]
    pub tau: TauConfig,
    #[serde(default)]
    pub events: Vec<EventConfig>,
}

fn invalid(key: &str, message: impl Into<String>) -> CliError {
    CliError::Invalid {
        key: key.to_string(),
        message: message.into(),
    }
}

fn fraction(key: &str, f: f64) -> Result<f64, CliError> {
    if (0.0..=1.0).contains(&f) {
        Ok(f)
    } else {
        Err(invalid(key, format!("fraction {f} outside [0, 1]")))
    }
}

fn one_of<T>(
    key_a: &str,
    a: Option<T>,
    key_b: &str,
    b: Option<T>,
) -> Result<Result<T, T>, CliError> {
    match (a, b) {
        (Some(a), None) => Ok(Ok(a)),
        (None, Some(b)) => Ok(Err(b)),
        _ => Err(invalid(
            key_a,
            format!("exactly one of `{key_a}` and `{key_b}` is required"),
        )),
    }
}

impl ScenarioConfig {
    /// Parses TOML text, reporting line/column and key for errors.
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    /// Reads `path` and applies `ECLIMB_*` overrides from `env`.
    pub fn load<I>(path: &Path, env: I) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
            path: path.to_path_buf(),
            source,
        })?;
        let overrides: Vec<(String, String)> = env
            .into_iter()
            .filter(|(k, _)| k.starts_with(ENV_PREFIX))
            .collect();
        if overrides.is_empty() {
            return Self::from_toml_str(&text);
        }
        let mut table: toml::Table =
            toml::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
        for (var, value) in &overrides {
            apply_override(&mut table, var, value)?;
        }
        table.try_into().map_err(|e: toml::de::Error| {
            CliError::Parse(format!("after environment overrides: {e}"))
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn aircraft_params(&self) -> Result<AircraftParams, CliError> {
        let a = &self.aircraft;
        let params = AircraftParams {
            wing_area: a.wing_area_m2,
            mass: a.mass_kg,
            cd0: a.cd0,
            cd2: a.cd2,
            v_max: a.vmax_kmh * KMH,
            voltage: a.voltage_v,
            efficiency: fraction("aircraft.efficiency", a.efficiency)?,
            gravity: a
                .gravity_ms2
                .unwrap_or(eclimb_core::vehicle::STANDARD_GRAVITY),
        };
        params
            .validate()
            .map_err(|e| invalid("aircraft", e.to_string()))?;
        Ok(params)
    }

    pub fn ci0_fraction(&self) -> Option<f64> {
        self.cost_index.ci0_fraction
    }

    pub fn ci_max_setting(&self) -> Result<CiMaxSetting, CliError> {
        Ok(match &self.cost_index.ci_max {
            CiMaxConfig::Vmax {} => CiMaxSetting::MaxSpeed,
            CiMaxConfig::Calibrated {
                target_v0_kmh,
                ci0_fraction,
            } => {
                let f = ci0_fraction
                    .or(self.cost_index.ci0_fraction)
                    .ok_or_else(|| {
                        invalid(
                            "cost_index.ci_max.ci0_fraction",
                            "calibrated mode needs a CI fraction to anchor",
                        )
                    })?;
                CiMaxSetting::Anchored {
                    speed: target_v0_kmh * KMH,
                    ci0_fraction: fraction("cost_index.ci_max.ci0_fraction", f)?,
                }
            }
            CiMaxConfig::Explicit { value } => CiMaxSetting::Explicit(*value),
        })
    }

    /// Converts to the library scenario, optionally dropping ATC events.
    pub fn to_scenario(&self, include_events: bool) -> Result<Scenario, CliError> {
        let ci = &self.cost_index;
        let ci0 = match one_of(
            "cost_index.ci0_fraction",
            ci.ci0_fraction,
            "cost_index.ci0_value",
            ci.ci0_value,
        )? {
            Ok(f) => CiValue::Fraction(fraction("cost_index.ci0_fraction", f)?),
            Err(v) => CiValue::Value(v),
        };
        let tau = match ci.tau {
            TauConfig::FractionOfTc0 { factor } => {
                TimeConstantSetting::FractionOfInitialClimb(factor)
            }
            TauConfig::Seconds { value } => TimeConstantSetting::Seconds(value),
            TauConfig::Infinite {} => TimeConstantSetting::Infinite,
        };
        let mut events = Vec::new();
        if include_events {
            for (i, ev) in ci.events.iter().enumerate() {
                let key = format!("cost_index.events[{i}]");
                let trigger = match (ev.waypoint_km, ev.time_s) {
                    (Some([x, h]), None) => EventTrigger::Waypoint(Waypoint::from_km(x, h)),
                    (None, Some(t)) => EventTrigger::Time(t),
                    _ => {
                        return Err(invalid(
                            &key,
                            "exactly one of `waypoint_km` and `time_s` is required",
                        ))
                    }
                };
                let ci_in =
                    match one_of(&key, ev.ci_in_fraction, &key, ev.ci_in_value).map_err(|_| {
                        invalid(
                            &key,
                            "exactly one of `ci_in_fraction` and `ci_in_value` is required",
                        )
                    })? {
                        Ok(f) => CiValue::Fraction(fraction(&key, f)?),
                        Err(v) => CiValue::Value(v),
                    };
                events.push(EventSetting { trigger, ci_in });
            }
        }
        let s = &self.scenario;
        let mut scn = Scenario::new(
            Waypoint::from_km(s.origin_km[0], s.origin_km[1]),
            Waypoint::from_km(s.cruise_km[0], s.cruise_km[1]),
            self.aircraft_params()?,
            CostIndexSettings {
                ci0,
                ci_max: self.ci_max_setting()?,
                tau,
                events,
            },
            s.q0_coulombs,
            s.h_dot_bar_ms,
        );
        scn.sim_step = s.sim_step_s;
        scn.atmosphere_step = s.atmosphere_step_m;
        scn.density_reference = match s.density_reference {
            DensityReferenceConfig::Climb => DensityReference::WholeClimb,
            DensityReferenceConfig::Segment => DensityReference::Segment,
        };
        scn.validate()
            .map_err(|e| invalid("scenario", e.to_string()))?;
        Ok(scn)
    }
}

fn apply_override(table: &mut toml::Table, var: &str, raw: &str) -> Result<(), CliError> {
    let path: Vec<String> = var[ENV_PREFIX.len()..]
        .split("__")
        .map(|p| p.to_ascii_lowercase())
        .collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Env {
            var: var.to_string(),
            message: "empty key segment".into(),
        });
    }
    let value = parse_env_value(raw);
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut cursor = table;
    for key in parents {
        let entry = cursor
            .entry(key.clone())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cursor = entry.as_table_mut().ok_or_else(|| CliError::Env {
            var: var.to_string(),
            message: format!("`{key}` is not a table"),
        })?;
    }
    cursor.insert(last.clone(), value);
    Ok(())
}

/// Interprets an environment value as a TOML value, falling back to a
/// plain string (so `infinite` needs no quoting).
fn parse_env_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = include_str!("../configs/e430_climb.toml");

    #[test]
    fn bundled_config_parses() {
        let cfg = ScenarioConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.scenario.cruise_km, [30.0, 1.0]);
        assert_eq!(cfg.cost_index.events.len(), 1);
        let scn = cfg.to_scenario(true).unwrap();
        assert_eq!(scn.cost_index.events.len(), 1);
        assert!(cfg.to_scenario(false).unwrap().cost_index.events.is_empty());
    }

    #[test]
    fn round_trip_is_idempotent() {
        let cfg = ScenarioConfig::from_toml_str(SAMPLE).unwrap();
        let once = cfg.to_toml_string();
        let reparsed = ScenarioConfig::from_toml_str(&once).unwrap();
        assert_eq!(reparsed, cfg);
        assert_eq!(reparsed.to_toml_string(), once);
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let text = SAMPLE.replace("cd2 = 0.009", "cd2 = 0.009\nwingspan_m = 13.8");
        let err = ScenarioConfig::from_toml_str(&text)
            .unwrap_err()
            .to_string();
        assert!(err.contains("wingspan_m"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn fractions_are_checked() {
        let text = SAMPLE.replace("ci0_fraction = 0.6", "ci0_fraction = 1.6");
        let cfg = ScenarioConfig::from_toml_str(&text).unwrap();
        assert!(matches!(
            cfg.to_scenario(true),
            Err(CliError::Invalid { .. })
        ));
    }

    #[test]
    fn ci0_needs_exactly_one_form() {
        let text = SAMPLE.replace(
            "ci0_fraction = 0.6",
            "ci0_fraction = 0.6\nci0_value = 100.0",
        );
        let cfg = ScenarioConfig::from_toml_str(&text).unwrap();
        assert!(cfg.to_scenario(true).is_err());
    }

    #[test]
    fn env_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, SAMPLE).unwrap();
        let env = vec![
            (
                "ECLIMB_SCENARIO__Q0_COULOMBS".to_string(),
                "123456.0".to_string(),
            ),
            (
                "ECLIMB_COST_INDEX__TAU__MODE".to_string(),
                "infinite".to_string(),
            ),
            ("ECLIMB_COST_INDEX__TAU__FACTOR".to_string(), "".to_string()),
            ("HOME".to_string(), "/root".to_string()),
        ];
        // An empty value for a field the new mode does not accept is an error.
        assert!(ScenarioConfig::load(&path, env.clone()).is_err());
        let env: Vec<_> = env
            .into_iter()
            .filter(|(k, _)| !k.ends_with("FACTOR"))
            .collect();
        let err = ScenarioConfig::load(&path, env.clone()).unwrap_err();
        // `factor` is still present from the file and not valid for `infinite`.
        assert!(err.to_string().contains("factor"), "{err}");

        let text = SAMPLE.replace("tau = { mode = \"fraction_of_tc0\", factor = 0.01 }", "");
        std::fs::write(&path, text).unwrap();
        let cfg = ScenarioConfig::load(&path, env).unwrap();
        assert_eq!(cfg.scenario.q0_coulombs, 123456.0);
        assert_eq!(cfg.cost_index.tau, TauConfig::Infinite {});
    }

    #[test]
    fn env_value_parsing() {
        assert_eq!(parse_env_value("1.5"), toml::Value::Float(1.5));
        assert_eq!(parse_env_value("vmax"), toml::Value::String("vmax".into()));
        assert_eq!(
            parse_env_value("[15.0, 0.5]"),
            toml::Value::Array(vec![toml::Value::Float(15.0), toml::Value::Float(0.5)])
        );
    }
}
