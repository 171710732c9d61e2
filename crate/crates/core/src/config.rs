//! Flat `key = value [unit]` configuration files.
//!
//! Values are stored exactly as read, in the unit named by the key suffix,
//! and only converted to internal (SI, angular) form by [`Config::params`].
//! Serializing with [`Config::to_cfg_string`] and parsing back reproduces
//! every value bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::nv::spin_splitting;
use crate::params::{DeviceParams, DriveConfig, HyperfineOffsets, ParamError, SpinParams};
use crate::units::{ghz, khz, mhz, UnitFamily, TESLA_PER_GAUSS};

/// The bundled default configuration.
pub const DEFAULT_CONFIG: &str = include_str!("../data/default_device.cfg");

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: syntax error: {message}")]
    Syntax { origin: Origin, message: String },
    #[error("{origin}: unknown key: {key}")]
    UnknownKey { origin: Origin, key: String },
    #[error("{origin}: duplicate key: {key}")]
    DuplicateKey { origin: Origin, key: &'static str },
    #[error("{origin}: unparseable value for {key}: {text:?}")]
    BadNumber {
        origin: Origin,
        key: &'static str,
        text: String,
    },
    #[error("{origin}: unparseable unit suffix for {key}: {suffix:?}")]
    BadUnit {
        origin: Origin,
        key: &'static str,
        suffix: String,
    },
    #[error("missing key: {0}")]
    MissingKey(&'static str),
    #[error("{origin}: non-positive value: {key}")]
    NonPositive { origin: Origin, key: &'static str },
    #[error("{origin}: value out of range: {key} (expected {expected})")]
    OutOfRange {
        origin: Origin,
        key: &'static str,
        expected: &'static str,
    },
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// Where a configuration value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Override,
}

impl std::fmt::Display for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Override => f.write_str("override"),
        }
    }
}

#[derive(Clone, Copy)]
enum Domain {
    Positive,
    NonNegative,
    UnitInterval,
    Any,
}

struct KeySpec {
    name: &'static str,
    family: UnitFamily,
    /// Suffix of the unit the key is expressed in.
    unit: &'static str,
    domain: Domain,
    required: bool,
}

const fn key(
    name: &'static str,
    family: UnitFamily,
    unit: &'static str,
    domain: Domain,
) -> KeySpec {
    KeySpec {
        name,
        family,
        unit,
        domain,
        required: true,
    }
}

const fn optional(
    name: &'static str,
    family: UnitFamily,
    unit: &'static str,
    domain: Domain,
) -> KeySpec {
    KeySpec {
        name,
        family,
        unit,
        domain,
        required: false,
    }
}

use Domain::*;
use UnitFamily as U;

const KEYS: &[KeySpec] = &[
    key("lambda_o_nm", U::Length, "nm", Positive),
    key("q_optical", U::Dimensionless, "", Positive),
    key("omega_m_ghz", U::Frequency, "GHz", Positive),
    key("q_mech", U::Dimensionless, "", Positive),
    key("g_om_khz", U::Frequency, "kHz", Positive),
    key("x_max_pm", U::Length, "pm", Positive),
    key("p_max_mpa", U::Pressure, "MPa", Positive),
    key("p_single_phonon_kpa", U::Pressure, "kPa", Positive),
    key("p_threshold_mw", U::Power, "mW", Positive),
    key("gamma_e_mhz_per_g", U::FrequencyPerField, "MHz/G", Positive),
    key("b_field_g", U::MagneticField, "G", NonNegative),
    key(
        "g_str_hz_per_kpa",
        U::FrequencyPerPressure,
        "Hz/kPa",
        Positive,
    ),
    key("eta", U::Dimensionless, "", UnitInterval),
    key("t2_star_us", U::Time, "us", Positive),
    key("hyperfine_offset_mhz", U::Frequency, "MHz", NonNegative),
    key("gamma_tune_khz", U::Frequency, "kHz", Positive),
    optional("injection_detuning_khz", U::Frequency, "kHz", Any),
    optional("drive_power_mw", U::Power, "mW", NonNegative),
];

fn spec_for(name: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.name == name)
}

/// Raw configuration values, each in the unit named by its key.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    pub lambda_o_nm: f64,
    pub q_optical: f64,
    pub omega_m_ghz: f64,
    pub q_mech: f64,
    pub g_om_khz: f64,
    pub x_max_pm: f64,
    pub p_max_mpa: f64,
    pub p_single_phonon_kpa: f64,
    pub p_threshold_mw: f64,
    pub gamma_e_mhz_per_g: f64,
    pub b_field_g: f64,
    pub g_str_hz_per_kpa: f64,
    pub eta: f64,
    pub t2_star_us: f64,
    pub hyperfine_offset_mhz: f64,
    pub gamma_tune_khz: f64,
    /// δ_m,i of the injection tone; 0 locks on the free-running frequency.
    pub injection_detuning_khz: f64,
    /// Fiber-input drive power; defaults to four times the threshold.
    pub drive_power_mw: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config::parse(DEFAULT_CONFIG).expect("bundled default config is valid")
    }
}

fn parse_value(spec: &'static KeySpec, text: &str, origin: Origin) -> Result<f64, ConfigError> {
    let mut parts = text.split_whitespace();
    let number = parts.next().ok_or_else(|| ConfigError::BadNumber {
        origin,
        key: spec.name,
        text: text.to_owned(),
    })?;
    let mut value: f64 = number.parse().map_err(|_| ConfigError::BadNumber {
        origin,
        key: spec.name,
        text: number.to_owned(),
    })?;
    if !value.is_finite() {
        return Err(ConfigError::BadNumber {
            origin,
            key: spec.name,
            text: number.to_owned(),
        });
    }
    if let Some(suffix) = parts.next() {
        let bad = || ConfigError::BadUnit {
            origin,
            key: spec.name,
            suffix: suffix.to_owned(),
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        let given = spec.family.scale(suffix).ok_or_else(bad)?;
        let native = spec.family.scale(spec.unit).ok_or_else(bad)?;
        if given != native {
            value = value * given / native;
        }
    }
    let ok = match spec.domain {
        Positive => value > 0.0,
        NonNegative => value >= 0.0,
        UnitInterval => (0.0..=1.0).contains(&value),
        Any => true,
    };
    if !ok {
        return Err(match spec.domain {
            Positive => ConfigError::NonPositive {
                origin,
                key: spec.name,
            },
            NonNegative => ConfigError::OutOfRange {
                origin,
                key: spec.name,
                expected: ">= 0",
            },
            _ => ConfigError::OutOfRange {
                origin,
                key: spec.name,
                expected: "[0, 1]",
            },
        });
    }
    Ok(value)
}

fn split_assignment(line: &str) -> Option<(&str, &str)> {
    let (k, v) = line.split_once('=')?;
    Some((k.trim(), v.trim()))
}

impl Config {
    /// Parse configuration text.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::parse_with_overrides(text, &[] as &[&str])
    }

    /// Parse configuration text, then apply `key=value` overrides on top.
    pub fn parse_with_overrides<S: AsRef<str>>(
        text: &str,
        overrides: &[S],
    ) -> Result<Self, ConfigError> {
        let mut values: BTreeMap<&'static str, f64> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let origin = Origin::Line(idx + 1);
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = split_assignment(line).ok_or_else(|| ConfigError::Syntax {
                origin,
                message: format!("expected `key = value`, got {line:?}"),
            })?;
            let spec = spec_for(k).ok_or_else(|| ConfigError::UnknownKey {
                origin,
                key: k.to_owned(),
            })?;
            let value = parse_value(spec, v, origin)?;
            if values.insert(spec.name, value).is_some() {
                return Err(ConfigError::DuplicateKey {
                    origin,
                    key: spec.name,
                });
            }
        }
        for o in overrides {
            let o = o.as_ref();
            let origin = Origin::Override;
            let (k, v) = split_assignment(o).ok_or_else(|| ConfigError::Syntax {
                origin,
                message: format!("expected `key=value`, got {o:?}"),
            })?;
            let spec = spec_for(k).ok_or_else(|| ConfigError::UnknownKey {
                origin,
                key: k.to_owned(),
            })?;
            values.insert(spec.name, parse_value(spec, v, origin)?);
        }
        for spec in KEYS.iter().filter(|k| k.required) {
            if !values.contains_key(spec.name) {
                return Err(ConfigError::MissingKey(spec.name));
            }
        }
        let get = |k: &str| values[k];
        let p_threshold_mw = get("p_threshold_mw");
        let config = Config {
            lambda_o_nm: get("lambda_o_nm"),
            q_optical: get("q_optical"),
            omega_m_ghz: get("omega_m_ghz"),
            q_mech: get("q_mech"),
            g_om_khz: get("g_om_khz"),
            x_max_pm: get("x_max_pm"),
            p_max_mpa: get("p_max_mpa"),
            p_single_phonon_kpa: get("p_single_phonon_kpa"),
            p_threshold_mw,
            gamma_e_mhz_per_g: get("gamma_e_mhz_per_g"),
            b_field_g: get("b_field_g"),
            g_str_hz_per_kpa: get("g_str_hz_per_kpa"),
            eta: get("eta"),
            t2_star_us: get("t2_star_us"),
            hyperfine_offset_mhz: get("hyperfine_offset_mhz"),
            gamma_tune_khz: get("gamma_tune_khz"),
            injection_detuning_khz: values.get("injection_detuning_khz").copied().unwrap_or(0.0),
            drive_power_mw: values
                .get("drive_power_mw")
                .copied()
                .unwrap_or(4.0 * p_threshold_mw),
        };
        // Catch anything the per-key domains cannot see (e.g. derived rates).
        config.params()?;
        Ok(config)
    }

    /// Read a configuration file and apply overrides.
    pub fn load<S: AsRef<str>>(path: &Path, overrides: &[S]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse_with_overrides(&text, overrides)
    }

    /// Convert to validated internal parameter sets.
    pub fn params(&self) -> Result<(DeviceParams, SpinParams, DriveConfig), ParamError> {
        let device = DeviceParams {
            lambda_o: self.lambda_o_nm * 1e-9,
            q_optical: self.q_optical,
            omega_m: ghz(self.omega_m_ghz),
            q_mech: self.q_mech,
            g_om: khz(self.g_om_khz),
            x_max: self.x_max_pm * 1e-12,
            p_max: self.p_max_mpa * 1e6,
            p_single_phonon: self.p_single_phonon_kpa * 1e3,
            p_threshold_in: self.p_threshold_mw * 1e-3,
        };
        device.validate()?;
        let spin = SpinParams {
            gamma_e: self.gamma_e_mhz_per_g * 1e6 / TESLA_PER_GAUSS,
            b_field: self.b_field_g * TESLA_PER_GAUSS,
            g_str: self.g_str_hz_per_kpa / 1e3,
            eta: self.eta,
            t2_star: self.t2_star_us * 1e-6,
            hyperfine: HyperfineOffsets {
                splitting: mhz(self.hyperfine_offset_mhz),
            },
        };
        spin.validate()?;
        let omega_s = spin_splitting(&spin, 0).expect("m_I = 0 is valid");
        let drive = DriveConfig {
            omega_inj: device.omega_m - khz(self.injection_detuning_khz),
            omega_m_intrinsic: device.omega_m,
            gamma_tune: khz(self.gamma_tune_khz),
            omega_s,
            drive_power_in: self.drive_power_mw * 1e-3,
        };
        drive.validate()?;
        Ok((device, spin, drive))
    }

    /// Serialize in the documented file format.
    pub fn to_cfg_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// `(key, value)` pairs in schema order.
    pub fn entries(&self) -> [(&'static str, f64); 18] {
        [
            ("lambda_o_nm", self.lambda_o_nm),
            ("q_optical", self.q_optical),
            ("omega_m_ghz", self.omega_m_ghz),
            ("q_mech", self.q_mech),
            ("g_om_khz", self.g_om_khz),
            ("x_max_pm", self.x_max_pm),
            ("p_max_mpa", self.p_max_mpa),
            ("p_single_phonon_kpa", self.p_single_phonon_kpa),
            ("p_threshold_mw", self.p_threshold_mw),
            ("gamma_e_mhz_per_g", self.gamma_e_mhz_per_g),
            ("b_field_g", self.b_field_g),
            ("g_str_hz_per_kpa", self.g_str_hz_per_kpa),
            ("eta", self.eta),
            ("t2_star_us", self.t2_star_us),
            ("hyperfine_offset_mhz", self.hyperfine_offset_mhz),
            ("gamma_tune_khz", self.gamma_tune_khz),
            ("injection_detuning_khz", self.injection_detuning_khz),
            ("drive_power_mw", self.drive_power_mw),
        ]
    }
}

/// Load and validate a configuration file.
pub fn load_config(path: &Path) -> Result<(DeviceParams, SpinParams, DriveConfig), ConfigError> {
    Ok(Config::load(path, &[] as &[&str])?.params()?)
}
