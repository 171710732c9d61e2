//! Device, spin and drive parameter sets.
//!
//! All rates and frequencies are angular (rad/s); everything else is SI. The
//! `Default` impls describe the measured microdisk device at its operating
//! point.

use serde::{Deserialize, Serialize};

use crate::units::{ghz, hz_to_angular, khz, mhz, HBAR, SPEED_OF_LIGHT, TESLA_PER_GAUSS};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("non-positive value: {0}")]
    NonPositive(&'static str),
    #[error("value out of range: {name} = {value} (expected {expected})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
}

fn positive(name: &'static str, v: f64) -> Result<(), ParamError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ParamError::NonPositive(name))
    }
}

/// Optical and mechanical mode parameters of the optomechanical resonator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    /// Optical wavelength (m).
    pub lambda_o: f64,
    pub q_optical: f64,
    /// Mechanical angular frequency (rad/s).
    pub omega_m: f64,
    pub q_mech: f64,
    /// Single-photon optomechanical coupling (rad/s).
    pub g_om: f64,
    /// Clamped self-oscillation displacement (m).
    pub x_max: f64,
    /// Stress at `x_max` (Pa).
    pub p_max: f64,
    /// Stress per single-phonon amplitude (Pa).
    pub p_single_phonon: f64,
    /// Self-oscillation threshold, fiber-input power (W).
    pub p_threshold_in: f64,
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self {
            lambda_o: 1564e-9,
            q_optical: 1.1e5,
            omega_m: ghz(2.09),
            q_mech: 4300.0,
            g_om: khz(25.0),
            x_max: 9e-12,
            p_max: 20.8e6,
            p_single_phonon: 1e3,
            p_threshold_in: 10.2e-3,
        }
    }
}

/// Loss rates derived from a [`DeviceParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedRates {
    /// Optical energy decay rate κ (rad/s).
    pub kappa: f64,
    /// Mechanical energy decay rate γ_m (rad/s).
    pub gamma_m: f64,
    pub sideband_resolved: bool,
}

impl DeviceParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        positive("lambda_o", self.lambda_o)?;
        positive("q_optical", self.q_optical)?;
        positive("omega_m", self.omega_m)?;
        positive("q_mech", self.q_mech)?;
        positive("g_om", self.g_om)?;
        positive("x_max", self.x_max)?;
        positive("p_max", self.p_max)?;
        positive("p_single_phonon", self.p_single_phonon)?;
        positive("p_threshold_in", self.p_threshold_in)?;
        let rates = self.derived_rates();
        positive("kappa", rates.kappa)?;
        positive("gamma_m", rates.gamma_m)?;
        Ok(())
    }

    /// Optical angular frequency ω_o = 2πc/λ_o.
    pub fn omega_o(&self) -> f64 {
        hz_to_angular(SPEED_OF_LIGHT / self.lambda_o)
    }

    /// Energy of one optical photon (J).
    pub fn photon_energy(&self) -> f64 {
        HBAR * self.omega_o()
    }

    /// κ = ω_o/Q_o, γ_m = ω_m/Q_m and the sideband-resolution flag ω_m > κ.
    pub fn derived_rates(&self) -> DerivedRates {
        let kappa = self.omega_o() / self.q_optical;
        let gamma_m = self.omega_m / self.q_mech;
        DerivedRates {
            kappa,
            gamma_m,
            sideband_resolved: self.omega_m > kappa,
        }
    }
}

/// Transition-frequency offsets of the hyperfine-resolved |+1⟩↔|−1⟩ lines,
/// one per ¹⁴N nuclear spin projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperfineOffsets {
    /// Magnitude of the offset of the m_I = ±1 lines from the m_I = 0 line (rad/s).
    pub splitting: f64,
}

impl HyperfineOffsets {
    /// Offset for nuclear projection `m_i`. The m_I = +1 line sits below the
    /// m_I = 0 line and m_I = −1 above it.
    pub fn offset(&self, m_i: i8) -> Option<f64> {
        match m_i {
            -1 => Some(self.splitting),
            0 => Some(0.0),
            1 => Some(-self.splitting),
            _ => None,
        }
    }

    /// The full offset set `{0, +Δ_hf, −Δ_hf}`.
    pub fn all(&self) -> [f64; 3] {
        [0.0, self.splitting, -self.splitting]
    }
}

/// NV ground-state spin parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinParams {
    /// Electron gyromagnetic ratio (Hz/T).
    pub gamma_e: f64,
    /// Field along the NV axis (T).
    pub b_field: f64,
    /// Stress susceptibility (Hz/Pa).
    pub g_str: f64,
    /// Combined stress-tensor projection and position factor in [0, 1].
    pub eta: f64,
    /// Inhomogeneous dephasing time (s).
    pub t2_star: f64,
    pub hyperfine: HyperfineOffsets,
}

/// Projection of the disk-centre stress onto the measured NV orientation.
pub const DEFAULT_PROJECTION: f64 = 0.36;
/// Per-phonon stress at the measurement spot relative to the disk centre.
pub const DEFAULT_SPOT_STRESS_RATIO: f64 = 0.70;

impl Default for SpinParams {
    fn default() -> Self {
        Self {
            gamma_e: 2.8025e6 / TESLA_PER_GAUSS,
            b_field: 375.0 * TESLA_PER_GAUSS,
            g_str: 19.0 / 1e3,
            eta: DEFAULT_PROJECTION * DEFAULT_SPOT_STRESS_RATIO,
            t2_star: 0.8e-6,
            hyperfine: HyperfineOffsets {
                splitting: mhz(4.0),
            },
        }
    }
}

impl SpinParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        positive("gamma_e", self.gamma_e)?;
        if !(self.b_field >= 0.0 && self.b_field.is_finite()) {
            return Err(ParamError::OutOfRange {
                name: "b_field",
                value: self.b_field,
                expected: ">= 0",
            });
        }
        positive("g_str", self.g_str)?;
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(ParamError::OutOfRange {
                name: "eta",
                value: self.eta,
                expected: "[0, 1]",
            });
        }
        positive("t2_star", self.t2_star)?;
        if !(self.hyperfine.splitting >= 0.0 && self.hyperfine.splitting.is_finite()) {
            return Err(ParamError::OutOfRange {
                name: "hyperfine_offset",
                value: self.hyperfine.splitting,
                expected: ">= 0",
            });
        }
        Ok(())
    }
}

/// Injection-locking drive configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    /// Injection tone (rad/s).
    pub omega_inj: f64,
    /// Free-running mechanical frequency (rad/s).
    pub omega_m_intrinsic: f64,
    /// Injection-locking PSD FWHM Γ_tune (rad/s).
    pub gamma_tune: f64,
    /// Spin transition frequency (rad/s).
    pub omega_s: f64,
    /// Fiber-input optical power (W).
    pub drive_power_in: f64,
}

impl DriveConfig {
    /// δ_m,i = ω_m − ω_inj.
    pub fn delta_mi(&self) -> f64 {
        self.omega_m_intrinsic - self.omega_inj
    }

    /// δ_s,m = ω_s − ω_m.
    pub fn delta_sm(&self) -> f64 {
        self.omega_s - self.omega_m_intrinsic
    }

    /// δ_s,i, defined as δ_s,m − δ_m,i so the detuning identity is exact.
    pub fn delta_si(&self) -> f64 {
        self.delta_sm() - self.delta_mi()
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        positive("omega_inj", self.omega_inj)?;
        positive("omega_m_intrinsic", self.omega_m_intrinsic)?;
        positive("gamma_tune", self.gamma_tune)?;
        positive("omega_s", self.omega_s)?;
        if !(self.drive_power_in >= 0.0 && self.drive_power_in.is_finite()) {
            return Err(ParamError::OutOfRange {
                name: "drive_power_in",
                value: self.drive_power_in,
                expected: ">= 0",
            });
        }
        Ok(())
    }
}
