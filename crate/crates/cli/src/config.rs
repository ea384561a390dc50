//! JSON model configuration.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "N": 2, "T": 2, "L": 2,
//!   "grid_size": 256,
//!   "doppler": { "kind": "exponential", "f_d": 1.0 },
//!   "profile": { "kind": "uniform" },
//!   "los": { "kind": "steering", "xi": 1.0 },
//!   "snr": { "rho_db": 10.0, "K": 1.0 }
//! }
//! ```
//!
//! Optional `sweep` and `montecarlo` sections configure those subcommands.

use std::fmt;
use std::path::Path;

use deqmi::channel::{
    ChannelModel, DopplerModel, FrequencyGrid, LosTaps, PowerProfile, DEFAULT_GRID_SIZE,
    RICEAN_K_INFINITE,
};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub schema: u32,
    #[serde(rename = "N")]
    pub n_rx: usize,
    #[serde(rename = "T")]
    pub n_tx: usize,
    #[serde(rename = "L")]
    pub lag_span: usize,
    #[serde(default = "default_grid_size")]
    pub grid_size: usize,
    pub doppler: DopplerConfig,
    #[serde(default)]
    pub profile: ProfileConfig,
    pub los: LosConfig,
    pub snr: SnrConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub montecarlo: Option<MonteCarloConfig>,
}

fn default_grid_size() -> usize {
    DEFAULT_GRID_SIZE
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DopplerConfig {
    Delta,
    Exponential {
        f_d: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        horizon: Option<usize>,
    },
    Jakes {
        f_d: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reg: Option<f64>,
    },
}

/// Shape of the multipath profile; its total power is set by `snr`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    #[default]
    Uniform,
    Exponential { decay: f64 },
    Taps { taps: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LosConfig {
    None,
    Steering { xi: f64 },
}

/// Exactly one of `rho` (linear) and `rho_db` is given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnrConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_db: Option<f64>,
    #[serde(rename = "K")]
    pub k: RiceanK,
}

/// Ricean factor; `"inf"` in JSON for a purely deterministic channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiceanK(pub f64);

impl Serialize for RiceanK {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for RiceanK {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(RiceanK(v)),
            Raw::Text(t) if t == "inf" => Ok(RiceanK(RICEAN_K_INFINITE)),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", found \"{t}\""
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SweepVariable {
    RhoDb,
    #[serde(rename = "K")]
    #[value(name = "K")]
    K,
    Xi,
    #[serde(rename = "f_d")]
    #[value(name = "f_d")]
    FD,
    #[serde(rename = "M")]
    #[value(name = "M")]
    M,
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVariable::RhoDb => "rho_db",
            SweepVariable::K => "K",
            SweepVariable::Xi => "xi",
            SweepVariable::FD => "f_d",
            SweepVariable::M => "M",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    /// Window size, odd.
    #[serde(rename = "M")]
    pub window: usize,
    pub trials: usize,
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ModelConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let inner = e.inner();
            CliError::Config(format!(
                "at key `{}` (line {}, column {}): {}",
                e.path(),
                inner.line(),
                inner.column(),
                inner
            ))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Structural checks that do not need a model build.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: &str| Err(CliError::Config(msg.to_string()));
        if self.schema != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        if self.n_rx == 0 || self.n_tx == 0 {
            return bad("N and T must be positive");
        }
        match (self.snr.rho, self.snr.rho_db) {
            (Some(_), Some(_)) => return bad("snr: give either rho or rho_db, not both"),
            (None, None) => return bad("snr: one of rho or rho_db is required"),
            _ => {}
        }
        if !(self.rho() > 0.0) || !self.rho().is_finite() {
            return bad("snr: rho must be positive and finite");
        }
        if !(self.snr.k.0 >= 0.0) {
            return bad("snr: K must be nonnegative");
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return bad("sweep: values must not be empty");
            }
        }
        if let Some(mc) = &self.montecarlo {
            check_window(mc.window)?;
            if mc.trials == 0 {
                return bad("montecarlo: trials must be positive");
            }
        }
        Ok(())
    }

    /// Linear SNR.
    pub fn rho(&self) -> f64 {
        match (self.snr.rho, self.snr.rho_db) {
            (Some(r), _) => r,
            (None, Some(db)) => 10f64.powf(db / 10.0),
            (None, None) => f64::NAN,
        }
    }

    pub fn rho_db(&self) -> f64 {
        10.0 * self.rho().log10()
    }

    pub fn build(&self) -> Result<ChannelModel, CliError> {
        let cfg_err = |what: &str, e: deqmi::Error| CliError::Config(format!("{what}: {e}"));
        let grid = FrequencyGrid::new(self.grid_size).map_err(|e| cfg_err("grid_size", e))?;
        let doppler = match self.doppler {
            DopplerConfig::Delta => DopplerModel::delta(&grid),
            DopplerConfig::Exponential { f_d, horizon } => {
                DopplerModel::exponential(f_d, &grid, horizon).map_err(|e| cfg_err("doppler", e))?
            }
            DopplerConfig::Jakes { f_d, reg } => {
                DopplerModel::jakes(f_d, reg, &grid).map_err(|e| cfg_err("doppler", e))?
            }
        };
        let l = self.lag_span;
        let profile = match &self.profile {
            ProfileConfig::Uniform => PowerProfile::uniform(l, 1.0),
            ProfileConfig::Exponential { decay } => PowerProfile::exponential(l, *decay, 1.0),
            ProfileConfig::Taps { taps } => PowerProfile::from_taps(taps.clone()),
        }
        .map_err(|e| cfg_err("profile", e))?;
        let los = match self.los {
            LosConfig::None => LosTaps::zero(self.n_rx, self.n_tx, l),
            LosConfig::Steering { xi } => LosTaps::steering(self.n_rx, self.n_tx, l, xi),
        }
        .map_err(|e| cfg_err("los", e))?;
        ChannelModel::new(doppler, profile, los, grid)
            .map_err(|e| cfg_err("model", e))?
            .normalize_for_snr(self.rho(), self.snr.k.0)
            .map_err(|e| cfg_err("snr", e))
    }

    /// Copy with the sweep variable set to `value`. `M` leaves the model
    /// unchanged.
    pub fn with_value(&self, variable: SweepVariable, value: f64) -> Result<Self, CliError> {
        let mut cfg = self.clone();
        match variable {
            SweepVariable::RhoDb => {
                cfg.snr.rho = None;
                cfg.snr.rho_db = Some(value);
            }
            SweepVariable::K => cfg.snr.k = RiceanK(value),
            SweepVariable::Xi => match &mut cfg.los {
                LosConfig::Steering { xi } => *xi = value,
                LosConfig::None => {
                    return Err(CliError::Config("xi sweep needs a steering LOS".into()))
                }
            },
            SweepVariable::FD => match &mut cfg.doppler {
                DopplerConfig::Exponential { f_d, horizon } => {
                    *f_d = value;
                    // a fixed horizon is tied to the old f_d
                    *horizon = None;
                }
                DopplerConfig::Jakes { f_d, .. } => *f_d = value,
                DopplerConfig::Delta => {
                    return Err(CliError::Config("f_d sweep needs a correlated Doppler model".into()))
                }
            },
            SweepVariable::M => {
                check_window(value_to_window(value)?)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn doppler_name(&self) -> &'static str {
        match self.doppler {
            DopplerConfig::Delta => "delta",
            DopplerConfig::Exponential { .. } => "exponential",
            DopplerConfig::Jakes { .. } => "jakes",
        }
    }

    pub fn f_d(&self) -> Option<f64> {
        match self.doppler {
            DopplerConfig::Delta => None,
            DopplerConfig::Exponential { f_d, .. } | DopplerConfig::Jakes { f_d, .. } => Some(f_d),
        }
    }

    pub fn reg(&self) -> Option<f64> {
        match self.doppler {
            DopplerConfig::Jakes { f_d, reg } => Some(reg.unwrap_or(f_d / 100.0)),
            _ => None,
        }
    }

    pub fn profile_name(&self) -> &'static str {
        match self.profile {
            ProfileConfig::Uniform => "uniform",
            ProfileConfig::Exponential { .. } => "exponential",
            ProfileConfig::Taps { .. } => "taps",
        }
    }

    pub fn xi(&self) -> Option<f64> {
        match self.los {
            LosConfig::None => None,
            LosConfig::Steering { xi } => Some(xi),
        }
    }
}

/// Windows are `M = 2n + 1` blocks.
pub fn check_window(window: usize) -> Result<(), CliError> {
    if window % 2 == 1 {
        Ok(())
    } else {
        Err(CliError::Config(format!("window M = {window} must be odd")))
    }
}

pub fn value_to_window(value: f64) -> Result<usize, CliError> {
    if value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
        Ok(value as usize)
    } else {
        Err(CliError::Config(format!("window M = {value} is not a positive integer")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FIG3: &str = r#"{
        "schema": 1, "N": 2, "T": 2, "L": 2,
        "doppler": { "kind": "exponential", "f_d": 1.0 },
        "los": { "kind": "steering", "xi": 1.0 },
        "snr": { "rho_db": 10.0, "K": 1 }
    }"#;

    #[test]
    fn parses_and_builds() {
        let cfg = ModelConfig::from_json(FIG3).unwrap();
        assert_eq!(cfg.grid_size, DEFAULT_GRID_SIZE);
        assert_eq!(cfg.profile, ProfileConfig::Uniform);
        assert!((cfg.rho() - 10.0).abs() < 1e-12);
        let m = cfg.build().unwrap();
        assert!((m.snr() - 10.0).abs() < 1e-9);
        assert!((m.sigma_sq() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn infinite_k() {
        let text = FIG3.replace("\"K\": 1", "\"K\": \"inf\"");
        let cfg = ModelConfig::from_json(&text).unwrap();
        assert!(cfg.snr.k.0.is_infinite());
        assert_eq!(cfg.build().unwrap().sigma_sq(), 0.0);
        assert!(cfg.to_json().contains("\"inf\""));
    }

    #[test]
    fn errors_carry_key_context() {
        let text = FIG3.replace("\"f_d\": 1.0", "\"f_d\": \"fast\"");
        let CliError::Config(msg) = ModelConfig::from_json(&text).unwrap_err() else {
            panic!("expected a config error");
        };
        assert!(msg.contains("doppler"), "{msg}");
        assert!(msg.contains("line"), "{msg}");

        let text = FIG3.replace("\"L\": 2", "\"L\": 2, \"typo\": 3");
        assert!(ModelConfig::from_json(&text).is_err());
    }

    #[test]
    fn rejects_inconsistent_snr() {
        let both = FIG3.replace("\"rho_db\": 10.0", "\"rho_db\": 10.0, \"rho\": 10.0");
        assert!(ModelConfig::from_json(&both).is_err());
        let none = FIG3.replace("\"rho_db\": 10.0,", "");
        assert!(ModelConfig::from_json(&none).is_err());
        let schema = FIG3.replace("\"schema\": 1", "\"schema\": 2");
        assert!(ModelConfig::from_json(&schema).is_err());
    }

    #[test]
    fn unsatisfiable_k_is_a_config_error() {
        let text = FIG3.replace(r#"{ "kind": "steering", "xi": 1.0 }"#, r#"{ "kind": "none" }"#);
        let cfg = ModelConfig::from_json(&text).unwrap();
        assert!(matches!(cfg.build(), Err(CliError::Config(_))));
    }

    #[test]
    fn sweep_values_apply() {
        let cfg = ModelConfig::from_json(FIG3).unwrap();
        let k = cfg.with_value(SweepVariable::K, 3.0).unwrap();
        assert_eq!(k.snr.k.0, 3.0);
        let r = cfg.with_value(SweepVariable::RhoDb, 0.0).unwrap();
        assert!((r.rho() - 1.0).abs() < 1e-12);
        assert!(cfg.with_value(SweepVariable::M, 4.0).is_err());
        assert!(cfg.with_value(SweepVariable::M, 41.0).is_ok());
        let delta = ModelConfig {
            doppler: DopplerConfig::Delta,
            ..cfg
        };
        assert!(delta.with_value(SweepVariable::FD, 0.5).is_err());
    }

    fn arb_config() -> impl Strategy<Value = ModelConfig> {
        let doppler = prop_oneof![
            Just(DopplerConfig::Delta),
            (0.01f64..5.0, proptest::option::of(2000usize..4000))
                .prop_map(|(f_d, horizon)| DopplerConfig::Exponential { f_d, horizon }),
            (0.01f64..0.49, proptest::option::of(1e-4f64..1e-2))
                .prop_map(|(f_d, reg)| DopplerConfig::Jakes { f_d, reg }),
        ];
        let profile = prop_oneof![
            Just(ProfileConfig::Uniform),
            (0.1f64..4.0).prop_map(|decay| ProfileConfig::Exponential { decay }),
            proptest::collection::vec(0.0f64..2.0, 1..4)
                .prop_map(|taps| ProfileConfig::Taps { taps }),
        ];
        let los = prop_oneof![
            Just(LosConfig::None),
            (0.0f64..4.0).prop_map(|xi| LosConfig::Steering { xi }),
        ];
        let snr = (
            prop_oneof![
                (0.01f64..100.0).prop_map(|r| (Some(r), None)),
                (-20.0f64..30.0).prop_map(|d| (None, Some(d))),
            ],
            prop_oneof![Just(RICEAN_K_INFINITE), 0.0f64..100.0],
        )
            .prop_map(|((rho, rho_db), k)| SnrConfig {
                rho,
                rho_db,
                k: RiceanK(k),
            });
        let sweep = proptest::option::of(
            (
                prop_oneof![
                    Just(SweepVariable::RhoDb),
                    Just(SweepVariable::K),
                    Just(SweepVariable::Xi),
                    Just(SweepVariable::FD),
                    Just(SweepVariable::M),
                ],
                proptest::collection::vec(-10.0f64..10.0, 1..5),
            )
                .prop_map(|(variable, values)| SweepConfig { variable, values }),
        );
        let mc = proptest::option::of(
            (0usize..50, 1usize..5000).prop_map(|(n, trials)| MonteCarloConfig {
                window: 2 * n + 1,
                trials,
            }),
        );
        (1usize..8, 1usize..8, 0usize..4, 8usize..512, doppler, profile, los, snr, sweep, mc)
            .prop_map(|(n_rx, n_tx, lag_span, grid_size, doppler, profile, los, snr, sweep, montecarlo)| {
                ModelConfig {
                    schema: SCHEMA_VERSION,
                    n_rx,
                    n_tx,
                    lag_span,
                    grid_size,
                    doppler,
                    profile,
                    los,
                    snr,
                    sweep,
                    montecarlo,
                }
            })
    }

    proptest! {
        #[test]
        fn round_trip_is_idempotent(cfg in arb_config()) {
            let once = cfg.to_json();
            let parsed = ModelConfig::from_json(&once).unwrap();
            prop_assert_eq!(&parsed, &cfg);
            prop_assert_eq!(parsed.to_json(), once);
        }
    }
}
