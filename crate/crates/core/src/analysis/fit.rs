//! Least-squares fit of (Ω_m, r) to a measured injection-detuning sweep.
//!
//! Pedestal emitters (fraction r) are uncoupled to the mechanics and stay in
//! |+1⟩, so the measured populations are
//! `p_{−1} = (1 − r)·p_{−1}^sim` and `p_{+1} = r + (1 − r)·p_{+1}^sim`.

use serde::Serialize;

use super::map::{default_omega_grid, FwhmMap, MapContext};
use super::simplex::{minimize, SimplexSettings};
use super::{fwhm_of_curve, AnalysisError, Baseline, Extremum};
use crate::dynamics::SweepResult;
use crate::units::khz;

/// Largest pedestal fraction the fit will report.
const R_MAX: f64 = 0.999;

/// Measured populations over an injection-detuning sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitData {
    /// δ_s,i per point (rad/s), strictly increasing.
    pub delta_si: Vec<f64>,
    pub p_plus1: Vec<f64>,
    pub p_minus1: Vec<f64>,
}

impl From<&SweepResult> for FitData {
    fn from(s: &SweepResult) -> Self {
        Self {
            delta_si: s.delta_si.clone(),
            p_plus1: s.p_plus1.clone(),
            p_minus1: s.p_minus1.clone(),
        }
    }
}

impl FitData {
    fn validate(&self) -> Result<(), AnalysisError> {
        let n = self.delta_si.len();
        if self.p_plus1.len() != n || self.p_minus1.len() != n {
            return Err(AnalysisError::LengthMismatch(n, self.p_minus1.len()));
        }
        if n < 5 {
            return Err(AnalysisError::Degenerate(format!(
                "need at least 5 detuning points, got {n}"
            )));
        }
        if self.delta_si.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(AnalysisError::Unsorted);
        }
        let all = self.p_plus1.iter().chain(&self.p_minus1);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(AnalysisError::Degenerate("non-finite population".into()));
        }
        let flat = |v: &[f64]| v.iter().all(|&x| x == v[0]);
        if flat(&self.p_minus1) && flat(&self.p_plus1) {
            return Err(AnalysisError::Degenerate(
                "no dip: populations are constant".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub simplex: SimplexSettings,
    /// Ω grid of the map used to turn the data width into a starting Ω.
    pub omega_guess_grid: Vec<f64>,
    /// Fits whose signal-to-residual ratio falls below this are flagged.
    pub min_snr: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            simplex: SimplexSettings::default(),
            omega_guess_grid: default_omega_grid(),
            min_snr: 3.0,
        }
    }
}

/// Model and data for the (Ω, r) objective.
#[derive(Debug, Clone)]
pub struct FitProblem<'a> {
    pub data: &'a FitData,
    /// Fixed parameters; its detuning grid is replaced by the data grid.
    pub context: MapContext,
}

impl<'a> FitProblem<'a> {
    pub fn new(data: &'a FitData, mut context: MapContext) -> Self {
        context.detuning_grid = data.delta_si.clone();
        Self { data, context }
    }

    /// Simulated `(p_{+1}, p_{−1})` curves at peak Rabi rate `omega`, r = 0.
    pub fn model_curves(&self, omega: f64) -> Result<(Vec<f64>, Vec<f64>), AnalysisError> {
        let s = self.context.sweep(omega.abs()).run(&self.data.delta_si)?;
        Ok((s.p_plus1, s.p_minus1))
    }

    pub fn residuals(&self, omega: f64, r: f64) -> Result<Vec<f64>, AnalysisError> {
        let r = r.clamp(0.0, R_MAX);
        let (p1, m1) = self.model_curves(omega)?;
        let d = self.data;
        let plus = d
            .p_plus1
            .iter()
            .zip(&p1)
            .map(|(y, s)| y - (r + (1.0 - r) * s));
        let minus = d.p_minus1.iter().zip(&m1).map(|(y, s)| y - (1.0 - r) * s);
        Ok(plus.chain(minus).collect())
    }

    /// Sum of squared residuals.
    pub fn ssr(&self, omega: f64, r: f64) -> Result<f64, AnalysisError> {
        Ok(self.residuals(omega, r)?.iter().map(|e| e * e).sum())
    }
}

/// Fitted parameters. Rates are angular (rad/s).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub omega_m: f64,
    pub omega_m_uncertainty: f64,
    pub r: f64,
    pub r_uncertainty: f64,
    /// √(sum of squared residuals) over both populations.
    pub residual_norm: f64,
    /// FWHM of the fitted p_{−1} curve.
    pub fwhm: Option<f64>,
    /// FWHM of the measured p_{−1} curve.
    pub data_fwhm: Option<f64>,
    /// Fitted signal amplitude over RMS residual.
    pub snr: f64,
    pub low_confidence: bool,
    pub initial_omega: f64,
    pub initial_r: f64,
    pub evaluations: usize,
    pub t2_star: f64,
    pub delta_sm: f64,
    pub gamma_tune: f64,
    pub drive_duration: f64,
}

fn curve_height(y: &[f64]) -> f64 {
    y.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) - Baseline::default().estimate(y)
}

/// Fit Ω_m and r to `data`, holding every other model parameter at the
/// values in `context`.
///
/// The search starts from Ω inferred from the data width and r from the
/// ratio of measured to simulated contrast at that Ω.
pub fn fit_sweep(
    data: &FitData,
    context: &MapContext,
    options: &FitOptions,
) -> Result<FitReport, AnalysisError> {
    data.validate()?;
    let problem = FitProblem::new(data, context.clone());

    let data_fwhm = fwhm_of_curve(
        &data.delta_si,
        &data.p_minus1,
        Baseline::default(),
        Extremum::Peak,
    )
    .ok();
    let guess_map = FwhmMap::build(problem.context.clone(), &options.omega_guess_grid).ok();
    let omega0 = match (&guess_map, data_fwhm) {
        (Some(m), Some(w)) => m.invert_width(w).ok(),
        _ => None,
    }
    .unwrap_or(khz(100.0));
    let r0 = problem
        .context
        .row(omega0)
        .ok()
        .map(|row| 1.0 - curve_height(&data.p_minus1) / row.delta_p)
        .filter(|r| r.is_finite())
        .unwrap_or(0.5)
        .clamp(0.0, 0.95);

    let scale = khz(100.0);
    let objective = |x: &[f64]| {
        problem
            .ssr(x[0] * scale, x[1])
            .unwrap_or(f64::INFINITY)
            // keep the simplex from drifting through the clamped region
            + 1e3 * (x[1].min(0.0).powi(2) + (x[1] - R_MAX).max(0.0).powi(2))
    };
    let out = minimize(
        objective,
        &[omega0 / scale, r0],
        &[1.0, 1.0],
        &options.simplex,
    );
    if !out.converged {
        return Err(AnalysisError::NonConvergence(out.evaluations));
    }
    let omega = (out.x[0] * scale).abs();
    let r = out.x[1].clamp(0.0, R_MAX);

    let res = problem.residuals(omega, r)?;
    let m = res.len();
    let ssr: f64 = res.iter().map(|e| e * e).sum();
    let (sigma_omega, sigma_r) = covariance_diag(&problem, omega, r, &res, ssr)?;

    let (_, m1) = problem.model_curves(omega)?;
    let fitted: Vec<f64> = m1.iter().map(|v| (1.0 - r) * v).collect();
    let signal = fitted.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - fitted.iter().cloned().fold(f64::INFINITY, f64::min);
    let rms = (ssr / m as f64).sqrt();
    let snr = if rms > 0.0 {
        signal / rms
    } else {
        f64::INFINITY
    };

    Ok(FitReport {
        omega_m: omega,
        omega_m_uncertainty: sigma_omega,
        r,
        r_uncertainty: sigma_r,
        residual_norm: ssr.sqrt(),
        fwhm: fwhm_of_curve(&data.delta_si, &m1, Baseline::default(), Extremum::Peak).ok(),
        data_fwhm,
        snr,
        low_confidence: !(snr >= options.min_snr),
        initial_omega: omega0,
        initial_r: r0,
        evaluations: out.evaluations,
        t2_star: context.t2_star,
        delta_sm: context.delta_sm,
        gamma_tune: context.lock.gamma_tune,
        drive_duration: context.template.drive_duration,
    })
}

/// Standard deviations of (Ω, r) from `s²·(JᵀJ)⁻¹`, with the Jacobian taken
/// by finite differences (one-sided at the r bounds).
fn covariance_diag(
    problem: &FitProblem<'_>,
    omega: f64,
    r: f64,
    res: &[f64],
    ssr: f64,
) -> Result<(f64, f64), AnalysisError> {
    let m = res.len();
    let h_omega = 1e-4 * omega.max(khz(1.0));
    let h_r = 1e-4;
    let col = |f_plus: Vec<f64>, f_minus: Vec<f64>, span: f64| -> Vec<f64> {
        // residual = data − model, so the model Jacobian is −∂res
        f_plus
            .iter()
            .zip(&f_minus)
            .map(|(a, b)| -(a - b) / span)
            .collect()
    };
    let j_omega = col(
        problem.residuals(omega + h_omega, r)?,
        problem.residuals((omega - h_omega).max(0.0), r)?,
        omega + h_omega - (omega - h_omega).max(0.0),
    );
    let (r_hi, r_lo) = ((r + h_r).min(R_MAX), (r - h_r).max(0.0));
    let j_r = col(
        problem.residuals(omega, r_hi)?,
        problem.residuals(omega, r_lo)?,
        r_hi - r_lo,
    );
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let (a, b, d) = (
        dot(&j_omega, &j_omega),
        dot(&j_omega, &j_r),
        dot(&j_r, &j_r),
    );
    let det = a * d - b * b;
    let s2 = if m > 2 { ssr / (m - 2) as f64 } else { 0.0 };
    if !(det > 0.0) {
        return Ok((f64::INFINITY, f64::INFINITY));
    }
    Ok(((s2 * d / det).sqrt(), (s2 * a / det).sqrt()))
}
