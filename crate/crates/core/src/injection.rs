//! Injection-locked self-oscillation amplitude versus mechanical–injection
//! detuning.
//!
//! The PSD peak of the locked oscillation follows a Lorentzian in δ_m,i.
//! The mechanical amplitude, and hence stress, scales as the square root of
//! that normalized PSD.

use serde::{Deserialize, Serialize};

use crate::optomech::OscillatorState;
use crate::params::DriveConfig;
use crate::units::{khz, mhz};

/// Half-width of the demonstrated tuning range.
pub const DEFAULT_TUNING_RANGE: f64 = 5.0e6 * std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LockProfile {
    /// PSD FWHM Γ_tune (rad/s).
    pub gamma_tune: f64,
    /// Maximum demonstrated tuning offset (rad/s).
    pub delta_range: f64,
}

impl Default for LockProfile {
    fn default() -> Self {
        Self {
            gamma_tune: khz(380.0),
            delta_range: mhz(5.0),
        }
    }
}

impl From<&DriveConfig> for LockProfile {
    fn from(d: &DriveConfig) -> Self {
        Self {
            gamma_tune: d.gamma_tune,
            delta_range: DEFAULT_TUNING_RANGE,
        }
    }
}

/// A profile value together with a flag for detunings outside the
/// demonstrated tuning range. The value is still defined there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checked<T> {
    pub value: T,
    pub out_of_range: bool,
}

impl<T> Checked<T> {
    pub fn warning(&self) -> Option<&'static str> {
        self.out_of_range
            .then_some("outside demonstrated ±5 MHz tuning range")
    }
}

impl LockProfile {
    pub fn new(gamma_tune: f64) -> Self {
        Self {
            gamma_tune,
            ..Default::default()
        }
    }

    /// Normalized PSD peak `1/(1 + (2δ/Γ_tune)²)`.
    #[inline]
    pub fn psd_norm(&self, delta_mi: f64) -> f64 {
        let x = 2.0 * delta_mi / self.gamma_tune;
        1.0 / (1.0 + x * x)
    }

    /// Normalized amplitude `√psd`.
    #[inline]
    pub fn amplitude_norm(&self, delta_mi: f64) -> f64 {
        self.psd_norm(delta_mi).sqrt()
    }

    pub fn in_range(&self, delta_mi: f64) -> bool {
        delta_mi.abs() <= self.delta_range
    }
}

pub fn psd_vs_detuning(delta_mi: f64, lp: &LockProfile) -> Checked<f64> {
    Checked {
        value: lp.psd_norm(delta_mi),
        out_of_range: !lp.in_range(delta_mi),
    }
}

/// Stress amplitude of the locked oscillation at detuning `delta_mi`.
pub fn stress_vs_detuning(delta_mi: f64, lp: &LockProfile, osc: &OscillatorState) -> Checked<f64> {
    Checked {
        value: osc.stress_amp * lp.amplitude_norm(delta_mi),
        out_of_range: !lp.in_range(delta_mi),
    }
}
