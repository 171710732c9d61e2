//! Optomechanical cooperativity, phonon-lasing threshold and the clamped
//! self-oscillation amplitude.

use serde::Serialize;

use crate::params::DeviceParams;

/// Mechanical self-oscillation amplitude expressed as displacement, stress
/// and equivalent phonon number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatorState {
    /// Displacement amplitude (m).
    pub displacement_amp: f64,
    /// Stress amplitude at the disk centre (Pa).
    pub stress_amp: f64,
    /// `(stress_amp / p_single_phonon)²`.
    pub phonon_number_equivalent: f64,
}

impl OscillatorState {
    pub fn from_displacement(x: f64, d: &DeviceParams) -> Self {
        let stress = stress_from_displacement(x, d);
        Self {
            displacement_amp: x,
            stress_amp: stress,
            phonon_number_equivalent: (stress / d.p_single_phonon).powi(2),
        }
    }

    /// The fully saturated state at `x_max`.
    pub fn clamped_max(d: &DeviceParams) -> Self {
        Self::from_displacement(d.x_max, d)
    }
}

/// C_om = 4·N·g_om²/(κ·γ_m).
pub fn cooperativity_om(n_photons: f64, d: &DeviceParams) -> f64 {
    let rates = d.derived_rates();
    4.0 * n_photons * d.g_om * d.g_om / (rates.kappa * rates.gamma_m)
}

/// Intracavity photon number at which C_om = 1.
pub fn threshold_photons(d: &DeviceParams) -> f64 {
    let rates = d.derived_rates();
    rates.kappa * rates.gamma_m / (4.0 * d.g_om * d.g_om)
}

/// Power dissipated by the cavity while holding the threshold occupancy,
/// `N_th·ħω_o·κ` (W).
pub fn threshold_dropped_power(d: &DeviceParams) -> f64 {
    threshold_photons(d) * d.photon_energy() * d.derived_rates().kappa
}

/// Self-oscillation amplitude versus fiber-input power `p_in` (W).
///
/// Zero up to threshold, then `x_max·√(1 − P_th/P)`: a phenomenological
/// square-root saturation pinned to the threshold power and the clamped
/// amplitude.
pub fn clamped_amplitude(p_in: f64, d: &DeviceParams) -> OscillatorState {
    let x = if p_in > d.p_threshold_in {
        d.x_max * (1.0 - d.p_threshold_in / p_in).sqrt()
    } else {
        0.0
    };
    OscillatorState::from_displacement(x, d)
}

/// Linear displacement-to-stress calibration `p = p_max·x/x_max`.
pub fn stress_from_displacement(x: f64, d: &DeviceParams) -> f64 {
    d.p_max * (x / d.x_max)
}
