//! NV ground-state level structure and stress-to-Rabi conversion.

use std::f64::consts::TAU;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::params::SpinParams;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SpinError {
    #[error("invalid nuclear spin projection: {0} (expected -1, 0 or +1)")]
    InvalidProjection(i8),
    #[error("radius {radius:e} m outside stress map domain [{min:e}, {max:e}] m")]
    OutsideMap { radius: f64, min: f64, max: f64 },
    #[error("invalid stress map: {0}")]
    InvalidMap(String),
}

/// One hyperfine-resolved |+1⟩↔|−1⟩ transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinTransition {
    /// Angular transition frequency (rad/s).
    pub omega_s: f64,
    pub nuclear_projection: i8,
    /// Angular Rabi rate at the reference stress (rad/s).
    pub rabi_max: f64,
}

/// |+1⟩↔|−1⟩ splitting `2π·2γ_e·B` plus the hyperfine offset of
/// `nuclear_projection`.
pub fn spin_splitting(sp: &SpinParams, nuclear_projection: i8) -> Result<f64, SpinError> {
    let offset = sp
        .hyperfine
        .offset(nuclear_projection)
        .ok_or(SpinError::InvalidProjection(nuclear_projection))?;
    Ok(TAU * 2.0 * sp.gamma_e * sp.b_field + offset)
}

/// All three hyperfine transitions, ordered m_I = −1, 0, +1.
pub fn transitions(sp: &SpinParams, reference_stress: f64) -> [SpinTransition; 3] {
    let rabi_max = rabi_from_stress(reference_stress, sp);
    [-1i8, 0, 1].map(|m| SpinTransition {
        omega_s: spin_splitting(sp, m).expect("projection in range"),
        nuclear_projection: m,
        rabi_max,
    })
}

/// Ω_m = 2π·η·g_str·p.
pub fn rabi_from_stress(p: f64, sp: &SpinParams) -> f64 {
    TAU * sp.eta * sp.g_str * p
}

/// Per-phonon stress magnitude tabulated against distance from the disk
/// centre. Interpolated linearly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressMap {
    /// Radii (m), strictly increasing.
    radius: Vec<f64>,
    /// Stress per single-phonon amplitude (Pa).
    stress: Vec<f64>,
}

impl Default for StressMap {
    /// Two-point profile: 1 kPa at the centre, 0.7 kPa at 0.7 µm.
    fn default() -> Self {
        Self::new(vec![0.0, 0.7e-6], vec![1e3, 0.7e3]).expect("valid default map")
    }
}

impl StressMap {
    pub fn new(radius: Vec<f64>, stress: Vec<f64>) -> Result<Self, SpinError> {
        if radius.len() != stress.len() {
            return Err(SpinError::InvalidMap("column lengths differ".into()));
        }
        if radius.is_empty() {
            return Err(SpinError::InvalidMap("empty table".into()));
        }
        if radius.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SpinError::InvalidMap(
                "radii must be strictly increasing".into(),
            ));
        }
        if radius.iter().chain(&stress).any(|v| !v.is_finite()) || stress.iter().any(|&s| s < 0.0) {
            return Err(SpinError::InvalidMap(
                "values must be finite and stress nonnegative".into(),
            ));
        }
        Ok(Self { radius, stress })
    }

    /// Read the `radius_um, stress_kpa_per_phonon_amp` CSV schema.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, SpinError> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| SpinError::InvalidMap(e.to_string()))?
            .clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| SpinError::InvalidMap(format!("missing column {name}")))
        };
        let (ir, is) = (col("radius_um")?, col("stress_kpa_per_phonon_amp")?);
        let mut radius = Vec::new();
        let mut stress = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| SpinError::InvalidMap(e.to_string()))?;
            let num = |i: usize| -> Result<f64, SpinError> {
                rec.get(i)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| SpinError::InvalidMap(format!("bad number in row {rec:?}")))
            };
            radius.push(num(ir)? * 1e-6);
            stress.push(num(is)? * 1e3);
        }
        Self::new(radius, stress)
    }

    /// Per-phonon stress at `radius` (m).
    pub fn lookup(&self, radius: f64) -> Result<f64, SpinError> {
        let (min, max) = (self.radius[0], *self.radius.last().unwrap());
        if !(radius >= min && radius <= max) {
            return Err(SpinError::OutsideMap { radius, min, max });
        }
        let i = self.radius.partition_point(|&r| r <= radius);
        if i == 0 {
            return Ok(self.stress[0]);
        }
        if i == self.radius.len() {
            return Ok(*self.stress.last().unwrap());
        }
        let (r0, r1) = (self.radius[i - 1], self.radius[i]);
        let (s0, s1) = (self.stress[i - 1], self.stress[i]);
        Ok(s0 + (s1 - s0) * (radius - r0) / (r1 - r0))
    }

    /// Stress at `radius` relative to the first table entry.
    pub fn relative(&self, radius: f64) -> Result<f64, SpinError> {
        Ok(self.lookup(radius)? / self.stress[0])
    }
}

pub fn stress_map_lookup(radius: f64, map: &StressMap) -> Result<f64, SpinError> {
    map.lookup(radius)
}

/// Combined η for an NV at `radius`: tensor projection times the relative
/// per-phonon stress there.
pub fn eta_at(projection: f64, radius: f64, map: &StressMap) -> Result<f64, SpinError> {
    Ok(projection * map.relative(radius)?)
}
