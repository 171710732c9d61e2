//! Spin-mechanical and optomechanical cooperativities for a set of device
//! and qubit presets.

use serde::Serialize;

use crate::optomech::threshold_photons;
use crate::params::DeviceParams;
use crate::units::{ghz, hz_to_angular, khz, mhz};

/// One device/qubit combination. Rates are angular (rad/s).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoadmapEntry {
    pub label: String,
    pub g_sm: f64,
    pub gamma_spin: f64,
    pub gamma_m: f64,
    pub g_om: f64,
    pub kappa: f64,
    pub n_photons: f64,
    /// Multiply C_sm by 4.
    pub convention_factor4: bool,
    /// Inputs taken from other devices rather than measured here.
    pub assumptions: Vec<String>,
}

/// `g_sm²/(γ_m·γ_spin)`, times 4 under the factor-4 convention.
pub fn cooperativity_sm(e: &RoadmapEntry) -> f64 {
    let c = e.g_sm * e.g_sm / (e.gamma_m * e.gamma_spin);
    if e.convention_factor4 {
        4.0 * c
    } else {
        c
    }
}

/// `4·N·g_om²/(κ·γ_m)`.
pub fn cooperativity_om_entry(e: &RoadmapEntry) -> f64 {
    4.0 * e.n_photons * e.g_om * e.g_om / (e.kappa * e.gamma_m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoadmapRow {
    pub entry: RoadmapEntry,
    pub c_sm: f64,
    pub c_om: f64,
}

/// Bundled presets, in roadmap order.
pub fn presets(factor4: bool) -> Vec<RoadmapEntry> {
    let device = DeviceParams::default();
    let rates = device.derived_rates();
    // single-phonon NV coupling: 1 kPa × 19 Hz/kPa
    let g_nv = hz_to_angular(device.p_single_phonon * 19.0e-3);
    let nv_linewidth = hz_to_angular(1.0 / (std::f64::consts::PI * 0.8e-6));
    let omc_kappa = ghz(1.0);
    let s = |v: &str| v.to_string();
    vec![
        RoadmapEntry {
            label: s("NV microdisk (this device)"),
            g_sm: g_nv,
            gamma_spin: nv_linewidth,
            gamma_m: rates.gamma_m,
            g_om: device.g_om,
            kappa: rates.kappa,
            n_photons: threshold_photons(&device),
            convention_factor4: factor4,
            assumptions: vec![s("N at self-oscillation threshold"), s("γ_spin = 1/(πT2*)")],
        },
        RoadmapEntry {
            label: s("SiV microdisk"),
            g_sm: mhz(0.1),
            gamma_spin: mhz(1.0),
            gamma_m: khz(200.0),
            g_om: device.g_om,
            kappa: rates.kappa,
            n_photons: 1.0,
            convention_factor4: factor4,
            assumptions: vec![s("γ_m from nominally identical microdisks")],
        },
        RoadmapEntry {
            label: s("SiV optomechanical crystal"),
            g_sm: mhz(2.5),
            gamma_spin: mhz(1.0),
            gamma_m: khz(200.0),
            g_om: khz(200.0),
            kappa: omc_kappa,
            n_photons: 1.0,
            convention_factor4: factor4,
            assumptions: vec![
                s("assumed κ/2π = 1 GHz"),
                s("g_sm/2π = 2.5 MHz, middle of 2-3 MHz"),
            ],
        },
        RoadmapEntry {
            label: s("SiV phononic-shielded crystal"),
            g_sm: mhz(2.5),
            gamma_spin: mhz(1.0),
            gamma_m: ghz(5.0) / 1e9,
            g_om: khz(200.0),
            kappa: omc_kappa,
            n_photons: 1.0,
            convention_factor4: factor4,
            assumptions: vec![
                s("assumed κ/2π = 1 GHz"),
                s("assumed ω_m/2π = 5 GHz with Q_m = 1e9"),
            ],
        },
    ]
}

pub fn evaluate(entries: &[RoadmapEntry]) -> Vec<RoadmapRow> {
    entries
        .iter()
        .map(|e| RoadmapRow {
            entry: e.clone(),
            c_sm: cooperativity_sm(e),
            c_om: cooperativity_om_entry(e),
        })
        .collect()
}
