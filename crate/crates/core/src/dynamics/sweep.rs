use serde::Serialize;

use super::{run_sequence, DynamicsError, PulseSequence};
use crate::analysis::{fwhm_of_curve, Baseline, Extremum};
use crate::injection::LockProfile;
use crate::nv::rabi_from_stress;
use crate::optomech::OscillatorState;
use crate::params::SpinParams;

/// Populations recorded over a one-dimensional sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    /// Spin–injection detuning δ_s,i per point (rad/s).
    pub delta_si: Vec<f64>,
    /// Disk-centre stress amplitude per point (Pa).
    pub stress: Vec<f64>,
    pub p_plus1: Vec<f64>,
    pub p_minus1: Vec<f64>,
    /// FWHM of the p_{−1} peak (rad/s), when one could be extracted.
    pub fwhm: Option<f64>,
    pub metadata: SweepMetadata,
}

/// Parameters a sweep was generated with (angular/SI units).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMetadata {
    pub kind: &'static str,
    pub delta_sm: Option<f64>,
    pub omega_peak: Option<f64>,
    pub gamma_tune: Option<f64>,
    pub sequence: PulseSequence,
}

impl SweepResult {
    pub fn len(&self) -> usize {
        self.delta_si.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta_si.is_empty()
    }

    /// Largest p_{−1} above the off-resonant plateau.
    pub fn peak_change(&self) -> f64 {
        let base = Baseline::default().estimate(&self.p_minus1);
        self.p_minus1
            .iter()
            .fold(f64::NEG_INFINITY, |m, &p| m.max(p))
            - base
    }
}

#[cfg(feature = "parallel")]
fn map_points<T, R, F>(items: &[T], f: F) -> Result<Vec<R>, DynamicsError>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R, DynamicsError> + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_points<T, R, F>(items: &[T], f: F) -> Result<Vec<R>, DynamicsError>
where
    F: Fn(&T) -> Result<R, DynamicsError>,
{
    items.iter().map(f).collect()
}

/// Injection-detuning sweep: the injection tone moves, so both the spin
/// detuning δ_s,i and the locked amplitude (through δ_m,i = δ_s,m − δ_s,i)
/// change together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningSweep {
    /// Spin–mechanics detuning δ_s,m (rad/s).
    pub delta_sm: f64,
    /// Rabi rate at δ_m,i = 0 (rad/s).
    pub omega_peak: f64,
    pub lock: LockProfile,
    /// Stress at δ_m,i = 0, recorded alongside the populations (Pa).
    pub peak_stress: f64,
    pub template: PulseSequence,
}

impl DetuningSweep {
    /// `(stress, p_{+1}, p_{−1})` at one detuning.
    pub fn point(&self, delta_si: f64) -> Result<(f64, f64, f64), DynamicsError> {
        let delta_mi = self.delta_sm - delta_si;
        let amp = self.lock.amplitude_norm(delta_mi);
        let seq = self.template.with_drive(self.omega_peak * amp, delta_si);
        let (p1, m1) = run_sequence(&seq)?;
        Ok((self.peak_stress * amp, p1, m1))
    }

    /// Populations only, for callers that do not need a full result.
    pub fn p_minus1(&self, grid: &[f64]) -> Result<Vec<f64>, DynamicsError> {
        check_grid(grid)?;
        map_points(grid, |&d| self.point(d).map(|(_, _, m)| m))
    }

    pub fn run(&self, grid: &[f64]) -> Result<SweepResult, DynamicsError> {
        check_grid(grid)?;
        let points = map_points(grid, |&d| self.point(d))?;
        let mut out = SweepResult {
            delta_si: grid.to_vec(),
            stress: points.iter().map(|p| p.0).collect(),
            p_plus1: points.iter().map(|p| p.1).collect(),
            p_minus1: points.iter().map(|p| p.2).collect(),
            fwhm: None,
            metadata: SweepMetadata {
                kind: "injection_detuning",
                delta_sm: Some(self.delta_sm),
                omega_peak: Some(self.omega_peak),
                gamma_tune: Some(self.lock.gamma_tune),
                sequence: self.template,
            },
        };
        out.fwhm = fwhm_of_curve(
            &out.delta_si,
            &out.p_minus1,
            Baseline::default(),
            Extremum::Peak,
        )
        .ok();
        Ok(out)
    }
}

fn check_grid(grid: &[f64]) -> Result<(), DynamicsError> {
    if grid.is_empty() {
        return Err(DynamicsError::EmptyGrid);
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(DynamicsError::UnsortedGrid);
    }
    Ok(())
}

/// Sweep δ_s,i over `grid` with the drive amplitude following the
/// injection-lock profile. `osc` sets the stress recorded per point.
pub fn sweep_injection_detuning(
    delta_sm: f64,
    omega_peak: f64,
    lp: &LockProfile,
    template: &PulseSequence,
    grid: &[f64],
    osc: &OscillatorState,
) -> Result<SweepResult, DynamicsError> {
    DetuningSweep {
        delta_sm,
        omega_peak,
        lock: *lp,
        peak_stress: osc.stress_amp,
        template: *template,
    }
    .run(grid)
}

/// Sweep the stress amplitude at fixed δ_s,i, converting stress to Rabi rate
/// with `sp`.
pub fn sweep_stress(
    stress_values: &[f64],
    delta_si: f64,
    sp: &SpinParams,
    template: &PulseSequence,
) -> Result<SweepResult, DynamicsError> {
    if let Some(&bad) = stress_values
        .iter()
        .find(|&&p| !(p >= 0.0 && p.is_finite()))
    {
        return Err(DynamicsError::InvalidParameter {
            name: "stress",
            value: bad,
        });
    }
    let points = map_points(stress_values, |&p| {
        run_sequence(&template.with_drive(rabi_from_stress(p, sp), delta_si))
    })?;
    Ok(SweepResult {
        delta_si: vec![delta_si; stress_values.len()],
        stress: stress_values.to_vec(),
        p_plus1: points.iter().map(|p| p.0).collect(),
        p_minus1: points.iter().map(|p| p.1).collect(),
        fwhm: None,
        metadata: SweepMetadata {
            kind: "stress",
            delta_sm: None,
            omega_peak: None,
            gamma_tune: None,
            sequence: template.with_drive(0.0, delta_si),
        },
    })
}
