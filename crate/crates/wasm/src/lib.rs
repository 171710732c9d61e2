//! Browser bindings for the simulator. Every export takes ν units (kHz, µs)
//! and returns a JSON string, so the same functions are testable natively.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::Serialize;
use spinmech::dynamics::{sweep_injection_detuning, PulseSequence};
use spinmech::injection::LockProfile;
use spinmech::optomech::OscillatorState;
use spinmech::params::DeviceParams;
use spinmech::roadmap::{evaluate, presets};
use spinmech::units::{khz, to_khz};
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Curve {
    x_khz: Vec<f64>,
    y: Vec<f64>,
    fwhm_khz: Option<f64>,
    peak_change: Option<f64>,
}

fn grid(min_khz: f64, max_khz: f64, steps: usize) -> Result<Vec<f64>, String> {
    if steps < 2 || !(max_khz > min_khz) || !min_khz.is_finite() || !max_khz.is_finite() {
        return Err(format!("bad grid {min_khz}..{max_khz} with {steps} points"));
    }
    let step = (max_khz - min_khz) / (steps - 1) as f64;
    Ok((0..steps).map(|i| khz(min_khz + step * i as f64)).collect())
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

/// Normalized locked PSD against mechanics–injection detuning.
#[wasm_bindgen]
pub fn lock_profile(
    gamma_tune_khz: f64,
    min_khz: f64,
    max_khz: f64,
    steps: usize,
) -> Result<String, String> {
    if !(gamma_tune_khz > 0.0) {
        return Err(format!(
            "locking range must be positive, got {gamma_tune_khz}"
        ));
    }
    let lp = LockProfile::new(khz(gamma_tune_khz));
    let x = grid(min_khz, max_khz, steps)?;
    Ok(json(&Curve {
        y: x.iter().map(|&d| lp.psd_norm(d)).collect(),
        x_khz: x.into_iter().map(to_khz).collect(),
        fwhm_khz: Some(gamma_tune_khz),
        peak_change: None,
    }))
}

/// p_{−1} after the drive pulse against spin–injection detuning.
#[wasm_bindgen]
pub fn detuning_sweep(
    delta_sm_khz: f64,
    omega_khz: f64,
    t2_star_us: f64,
    drive_us: f64,
    min_khz: f64,
    max_khz: f64,
    steps: usize,
) -> Result<String, String> {
    let seq = PulseSequence {
        t2_star: t2_star_us * 1e-6,
        drive_duration: drive_us * 1e-6,
        ..PulseSequence::default()
    };
    let s = sweep_injection_detuning(
        khz(delta_sm_khz),
        khz(omega_khz),
        &LockProfile::default(),
        &seq,
        &grid(min_khz, max_khz, steps)?,
        &OscillatorState::clamped_max(&DeviceParams::default()),
    )
    .map_err(|e| e.to_string())?;
    Ok(json(&Curve {
        x_khz: s.delta_si.iter().copied().map(to_khz).collect(),
        fwhm_khz: s.fwhm.map(to_khz),
        peak_change: Some(s.peak_change()),
        y: s.p_minus1,
    }))
}

#[derive(Serialize)]
struct Row {
    label: String,
    c_sm: f64,
    c_om: f64,
    assumptions: Vec<String>,
}

/// Cooperativity table for the bundled presets.
#[wasm_bindgen]
pub fn roadmap(factor4: bool) -> String {
    let rows: Vec<Row> = evaluate(&presets(factor4))
        .into_iter()
        .map(|r| Row {
            label: r.entry.label,
            c_sm: r.c_sm,
            c_om: r.c_om,
            assumptions: r.entry.assumptions,
        })
        .collect();
    json(&rows)
}
