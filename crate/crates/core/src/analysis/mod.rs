//! Curve metrology, width/contrast inversion, background correction and
//! least-squares fitting of measured sweeps.

mod fit;
mod map;
mod simplex;

pub use fit::{fit_sweep, FitData, FitOptions, FitProblem, FitReport};
pub use map::{
    contrast_lower_bound, default_detuning_grid, default_omega_grid, fwhm_vs_omega_map,
    invert_fwhm, FwhmMap, Inversion, MapContext, MapRow, DEFAULT_T2_BRACKET,
};
pub use simplex::{minimize, SimplexOutcome, SimplexSettings};

use crate::dynamics::DynamicsError;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("curve needs at least 3 points, got {0}")]
    TooShort(usize),
    #[error("x and y lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("x values must be strictly increasing")]
    Unsorted,
    #[error("no extremum: curve is flat relative to its baseline")]
    NoExtremum,
    #[error("non-unique extremum at indices {0} and {1}")]
    NonUniqueExtremum(usize, usize),
    #[error("no half-maximum crossing on the {0} side")]
    NoCrossing(&'static str),
    #[error(
        "unreachable width: {target_khz:.1} kHz outside map range [{min_khz:.1}, {max_khz:.1}] kHz"
    )]
    UnreachableWidth {
        target_khz: f64,
        min_khz: f64,
        max_khz: f64,
    },
    #[error("population change {target} exceeds the saturation value {max}")]
    ExceedsSaturation { target: f64, max: f64 },
    #[error("population change must be positive, got {0}")]
    NonPositiveChange(f64),
    #[error("{0} map is not monotone on the Ω grid")]
    NotMonotone(&'static str),
    #[error("pedestal fraction r must lie in [0, 1), got {0}")]
    InvalidPedestal(f64),
    #[error("population must be nonnegative, got {0}")]
    NegativePopulation(f64),
    #[error("fit did not converge within {0} evaluations")]
    NonConvergence(usize),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("invalid map grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Whether the feature of interest is a maximum or a minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Peak,
    Dip,
}

/// Reference level the half-maximum is measured from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Baseline {
    /// Mean of the outermost `fraction` of points, half taken from each end.
    OuterFraction(f64),
    Value(f64),
}

impl Default for Baseline {
    fn default() -> Self {
        Baseline::OuterFraction(0.2)
    }
}

impl Baseline {
    pub fn estimate(&self, y: &[f64]) -> f64 {
        match *self {
            Baseline::Value(v) => v,
            Baseline::OuterFraction(f) => {
                let n = y.len();
                if n == 0 {
                    return f64::NAN;
                }
                let k = (((n as f64) * f / 2.0).round() as usize).clamp(1, n.div_ceil(2));
                let sum: f64 = y[..k].iter().chain(&y[n - k..]).sum();
                sum / (2 * k) as f64
            }
        }
    }
}

/// Full width at half extremum of a sampled curve.
///
/// The half level is `baseline + (extremum − baseline)/2`; each side's
/// crossing is linearly interpolated between the bracketing samples.
pub fn fwhm_of_curve(
    x: &[f64],
    y: &[f64],
    baseline: Baseline,
    extremum: Extremum,
) -> Result<f64, AnalysisError> {
    if x.len() != y.len() {
        return Err(AnalysisError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(AnalysisError::TooShort(x.len()));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(AnalysisError::Unsorted);
    }
    let sign = match extremum {
        Extremum::Peak => 1.0,
        Extremum::Dip => -1.0,
    };
    // work on a peak-shaped copy
    let base = sign * baseline.estimate(y);
    let v: Vec<f64> = y.iter().map(|&t| sign * t).collect();

    let mut top = 0;
    for (i, &t) in v.iter().enumerate() {
        if t > v[top] {
            top = i;
        }
    }
    let height = v[top] - base;
    let scale = v
        .iter()
        .fold(0.0f64, |m, t| m.max(t.abs()))
        .max(f64::MIN_POSITIVE);
    if !(height > 1e-12 * scale) {
        return Err(AnalysisError::NoExtremum);
    }
    if let Some(j) = (0..v.len()).find(|&j| j != top && v[j] == v[top]) {
        let (a, b) = (top.min(j), top.max(j));
        // a flat top one sample wide is still a single extremum
        if b - a > 1 || v[a..=b].iter().any(|&t| t != v[top]) {
            return Err(AnalysisError::NonUniqueExtremum(a, b));
        }
    }
    let half = base + 0.5 * height;

    let left = (1..=top)
        .rev()
        .find(|&i| v[i - 1] <= half)
        .ok_or(AnalysisError::NoCrossing("left"))?;
    let xl = interp_crossing(x[left - 1], v[left - 1], x[left], v[left], half);
    let right = (top..v.len() - 1)
        .find(|&i| v[i + 1] <= half)
        .ok_or(AnalysisError::NoCrossing("right"))?;
    let xr = interp_crossing(x[right], v[right], x[right + 1], v[right + 1], half);
    Ok(xr - xl)
}

fn interp_crossing(x0: f64, y0: f64, x1: f64, y1: f64, level: f64) -> f64 {
    if y1 == y0 {
        return 0.5 * (x0 + x1);
    }
    x0 + (level - y0) * (x1 - x0) / (y1 - y0)
}

/// Undo contrast dilution by a fraction `r` of uncoupled emitters:
/// `p_{−1}/(1 − r)`.
pub fn correct_population(p: f64, r: f64) -> Result<f64, AnalysisError> {
    if !(0.0..1.0).contains(&r) {
        return Err(AnalysisError::InvalidPedestal(r));
    }
    if !(p >= 0.0) {
        return Err(AnalysisError::NegativePopulation(p));
    }
    Ok(p / (1.0 - r))
}

/// Corrected `(p_{+1}, p_{−1})` pair, with p_{+1} = 1 − p_{−1}^corr.
pub fn correct_populations(p_minus1: f64, r: f64) -> Result<(f64, f64), AnalysisError> {
    let m = correct_population(p_minus1, r)?;
    Ok((1.0 - m, m))
}
