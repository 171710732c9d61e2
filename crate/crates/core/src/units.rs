//! Physical constants and conversions between conventional `ν` units used in
//! files and on the command line and the angular (rad/s) form used internally.

use std::f64::consts::TAU;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;

pub const TESLA_PER_GAUSS: f64 = 1e-4;

/// Convert an ordinary frequency in Hz to angular frequency in rad/s.
#[inline]
pub fn hz_to_angular(hz: f64) -> f64 {
    TAU * hz
}

/// Convert an angular frequency in rad/s to ordinary frequency in Hz.
#[inline]
pub fn angular_to_hz(omega: f64) -> f64 {
    omega / TAU
}

#[inline]
pub fn khz(value: f64) -> f64 {
    hz_to_angular(value * 1e3)
}

#[inline]
pub fn mhz(value: f64) -> f64 {
    hz_to_angular(value * 1e6)
}

#[inline]
pub fn ghz(value: f64) -> f64 {
    hz_to_angular(value * 1e9)
}

#[inline]
pub fn to_khz(omega: f64) -> f64 {
    angular_to_hz(omega) / 1e3
}

#[inline]
pub fn to_mhz(omega: f64) -> f64 {
    angular_to_hz(omega) / 1e6
}

#[inline]
pub fn to_ghz(omega: f64) -> f64 {
    angular_to_hz(omega) / 1e9
}

/// Unit families understood by the configuration reader. A value may carry
/// any suffix from the family of its key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitFamily {
    Dimensionless,
    Frequency,
    Length,
    Pressure,
    Power,
    Time,
    MagneticField,
    /// Gyromagnetic ratio, only `MHz/G` is accepted.
    FrequencyPerField,
    /// Stress susceptibility, only `Hz/kPa` is accepted.
    FrequencyPerPressure,
}

impl UnitFamily {
    /// Scale of `suffix` in SI base units of this family, or `None` when the
    /// suffix does not belong to the family.
    pub fn scale(self, suffix: &str) -> Option<f64> {
        use UnitFamily::*;
        let s = match (self, suffix) {
            (Frequency, "Hz") => 1.0,
            (Frequency, "kHz") => 1e3,
            (Frequency, "MHz") => 1e6,
            (Frequency, "GHz") => 1e9,
            (Length, "m") => 1.0,
            (Length, "um") => 1e-6,
            (Length, "nm") => 1e-9,
            (Length, "pm") => 1e-12,
            (Pressure, "Pa") => 1.0,
            (Pressure, "kPa") => 1e3,
            (Pressure, "MPa") => 1e6,
            (Power, "W") => 1.0,
            (Power, "mW") => 1e-3,
            (Time, "s") => 1.0,
            (Time, "us") => 1e-6,
            (Time, "ns") => 1e-9,
            (MagneticField, "G") => 1.0,
            (MagneticField, "T") => 1e4,
            (FrequencyPerField, "MHz/G") => 1.0,
            (FrequencyPerPressure, "Hz/kPa") => 1.0,
            _ => return None,
        };
        Some(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angular_round_trip() {
        let w = ghz(2.09);
        assert!((to_ghz(w) - 2.09).abs() < 1e-15);
        assert_eq!(khz(0.0), 0.0);
    }

    #[test]
    fn suffix_families_are_disjoint() {
        assert_eq!(UnitFamily::Frequency.scale("kHz"), Some(1e3));
        assert_eq!(UnitFamily::Frequency.scale("kPa"), None);
        assert_eq!(UnitFamily::Pressure.scale("MPa"), Some(1e6));
        assert_eq!(UnitFamily::Dimensionless.scale("Hz"), None);
    }
}
