//! Width and contrast of the simulated injection-detuning sweep as functions
//! of the peak Rabi rate, and their inversion.

use serde::Serialize;

use super::{fwhm_of_curve, AnalysisError, Baseline, Extremum};
use crate::dynamics::{DetuningSweep, PulseSequence};
use crate::injection::LockProfile;
use crate::units::khz;

/// Dephasing times bracketing the measured T2* (s).
pub const DEFAULT_T2_BRACKET: [f64; 2] = [0.5e-6, 0.8e-6];

/// Relative bracket width at which live bisection stops.
const BISECTION_TOLERANCE: f64 = 1e-5;

/// Peak Rabi rates Ω/2π = 5, 10, …, 175 kHz. The population change stays
/// monotone up to this limit for both bracket dephasing times.
pub fn default_omega_grid() -> Vec<f64> {
    (1..=35).map(|i| khz(5.0 * i as f64)).collect()
}

/// δ_s,i/2π from −1500 to 1500 kHz in 10 kHz steps.
pub fn default_detuning_grid() -> Vec<f64> {
    (-150..=150).map(|i| khz(10.0 * i as f64)).collect()
}

/// Fixed model parameters under which a map is generated.
#[derive(Debug, Clone, PartialEq)]
pub struct MapContext {
    pub t2_star: f64,
    pub delta_sm: f64,
    pub lock: LockProfile,
    /// Drive duration, extra dephasing and π-pulse fidelity; the drive rate
    /// and detuning fields are overwritten per point.
    pub template: PulseSequence,
    pub detuning_grid: Vec<f64>,
}

impl MapContext {
    pub fn new(t2_star: f64, delta_sm: f64, lock: LockProfile) -> Self {
        Self {
            t2_star,
            delta_sm,
            lock,
            template: PulseSequence {
                t2_star,
                ..Default::default()
            },
            detuning_grid: default_detuning_grid(),
        }
    }

    pub fn with_t2_star(&self, t2_star: f64) -> Self {
        Self {
            t2_star,
            template: PulseSequence {
                t2_star,
                ..self.template
            },
            ..self.clone()
        }
    }

    pub fn sweep(&self, omega_peak: f64) -> DetuningSweep {
        DetuningSweep {
            delta_sm: self.delta_sm,
            omega_peak,
            lock: self.lock,
            peak_stress: 0.0,
            template: PulseSequence {
                t2_star: self.t2_star,
                ..self.template
            },
        }
    }

    /// Width and contrast of the p_{−1} peak at one Rabi rate.
    pub fn row(&self, omega: f64) -> Result<MapRow, AnalysisError> {
        let p = self.sweep(omega).p_minus1(&self.detuning_grid)?;
        let base = Baseline::default();
        let fwhm = fwhm_of_curve(&self.detuning_grid, &p, base, Extremum::Peak)?;
        let top = p.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        Ok(MapRow {
            omega,
            fwhm,
            delta_p: top - base.estimate(&p),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapRow {
    /// Peak Rabi rate (rad/s).
    pub omega: f64,
    /// FWHM Δ of the p_{−1} peak (rad/s).
    pub fwhm: f64,
    /// Height of the p_{−1} peak above the off-resonant plateau.
    pub delta_p: f64,
}

/// Tabulated (Ω, Δ, Δp_{−1}) for one model context.
#[derive(Debug, Clone, PartialEq)]
pub struct FwhmMap {
    pub context: MapContext,
    pub rows: Vec<MapRow>,
}

impl FwhmMap {
    pub fn build(context: MapContext, omega_grid: &[f64]) -> Result<Self, AnalysisError> {
        if omega_grid.is_empty() {
            return Err(AnalysisError::InvalidGrid("empty".into()));
        }
        if omega_grid.iter().any(|&w| !(w > 0.0 && w.is_finite()))
            || omega_grid.windows(2).any(|w| !(w[1] > w[0]))
        {
            return Err(AnalysisError::InvalidGrid(
                "Ω values must be positive and strictly increasing".into(),
            ));
        }
        let rows = omega_grid
            .iter()
            .map(|&w| context.row(w))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { context, rows })
    }

    pub fn width_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].fwhm > w[0].fwhm)
    }

    pub fn contrast_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].delta_p >= w[0].delta_p)
    }

    /// Ω giving FWHM `target`: bracket in the table, then bisect on the
    /// live model.
    pub fn invert_width(&self, target: f64) -> Result<f64, AnalysisError> {
        if !self.width_monotone() {
            return Err(AnalysisError::NotMonotone("width"));
        }
        let (first, last) = (self.rows[0], *self.rows.last().unwrap());
        if !(target >= first.fwhm && target <= last.fwhm) {
            return Err(AnalysisError::UnreachableWidth {
                target_khz: crate::units::to_khz(target),
                min_khz: crate::units::to_khz(first.fwhm),
                max_khz: crate::units::to_khz(last.fwhm),
            });
        }
        let i = self.rows.partition_point(|r| r.fwhm < target);
        if self.rows[i].fwhm == target {
            return Ok(self.rows[i].omega);
        }
        let (lo, hi) = (self.rows[i - 1].omega, self.rows[i].omega);
        self.bisect(lo, hi, |row| row.fwhm - target)
    }

    /// Ω giving peak population change `target`.
    pub fn invert_contrast(&self, target: f64) -> Result<f64, AnalysisError> {
        if !(target > 0.0) {
            return Err(AnalysisError::NonPositiveChange(target));
        }
        if !self.contrast_monotone() {
            return Err(AnalysisError::NotMonotone("population change"));
        }
        let last = *self.rows.last().unwrap();
        if target > last.delta_p {
            return Err(AnalysisError::ExceedsSaturation {
                target,
                max: last.delta_p,
            });
        }
        let i = self.rows.partition_point(|r| r.delta_p < target);
        if self.rows[i].delta_p == target {
            return Ok(self.rows[i].omega);
        }
        // Δp(0) = 0 closes the bracket below the first grid point
        let lo = if i == 0 { 0.0 } else { self.rows[i - 1].omega };
        self.bisect(lo, self.rows[i].omega, |row| row.delta_p - target)
    }

    fn bisect<F>(&self, mut lo: f64, mut hi: f64, g: F) -> Result<f64, AnalysisError>
    where
        F: Fn(&MapRow) -> f64,
    {
        while hi - lo > BISECTION_TOLERANCE * hi {
            let mid = 0.5 * (lo + hi);
            if g(&self.context.row(mid)?) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Map over `omega_grid` for one dephasing time, using the default drive
/// sequence and detuning grid.
pub fn fwhm_vs_omega_map(
    omega_grid: &[f64],
    t2_star: f64,
    delta_sm: f64,
    lp: &LockProfile,
) -> Result<FwhmMap, AnalysisError> {
    FwhmMap::build(MapContext::new(t2_star, delta_sm, *lp), omega_grid)
}

/// Ω estimate from one or more maps: the midpoint of the per-map values with
/// their half-spread as uncertainty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inversion {
    pub omega: f64,
    pub uncertainty: f64,
    /// `(t2_star, Ω)` for each map.
    pub per_map: Vec<(f64, f64)>,
}

impl Inversion {
    fn from_values(per_map: Vec<(f64, f64)>) -> Self {
        let lo = per_map.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        let hi = per_map
            .iter()
            .map(|v| v.1)
            .fold(f64::NEG_INFINITY, f64::max);
        Self {
            omega: 0.5 * (lo + hi),
            uncertainty: 0.5 * (hi - lo),
            per_map,
        }
    }
}

fn invert_each<F>(maps: &[FwhmMap], f: F) -> Result<Inversion, AnalysisError>
where
    F: Fn(&FwhmMap) -> Result<f64, AnalysisError>,
{
    if maps.is_empty() {
        return Err(AnalysisError::InvalidGrid("no maps given".into()));
    }
    let per_map = maps
        .iter()
        .map(|m| f(m).map(|w| (m.context.t2_star, w)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Inversion::from_values(per_map))
}

/// Infer Ω from an observed FWHM, one map per bracketing T2*.
pub fn invert_fwhm(delta_target: f64, maps: &[FwhmMap]) -> Result<Inversion, AnalysisError> {
    invert_each(maps, |m| m.invert_width(delta_target))
}

/// Lower bound on Ω from an uncorrected (r = 0) peak population change.
pub fn contrast_lower_bound(
    observed_change: f64,
    maps: &[FwhmMap],
) -> Result<Inversion, AnalysisError> {
    invert_each(maps, |m| m.invert_contrast(observed_change))
}
