//! Subcommand implementations. Each returns an [`Output`] in `ν` units; the
//! caller decides how to render and where to write it.

use std::path::Path;

use serde_json::{json, Map, Value};
use spinmech::analysis::{contrast_lower_bound, fit_sweep, FitOptions, FwhmMap, MapContext};
use spinmech::config::Config;
use spinmech::dynamics::{sweep_injection_detuning, sweep_stress, PulseSequence, SweepResult};
use spinmech::injection::{psd_vs_detuning, stress_vs_detuning, LockProfile};
use spinmech::nv::{rabi_from_stress, transitions};
use spinmech::optomech::{
    clamped_amplitude, cooperativity_om, threshold_dropped_power, threshold_photons,
    OscillatorState,
};
use spinmech::params::{DeviceParams, DriveConfig, SpinParams};
use spinmech::roadmap::{evaluate, presets};
use spinmech::units::{khz, to_ghz, to_khz};

use crate::grid::{parse_list, parse_range};
use crate::CliError;

pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }

    pub fn to_csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_num(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Shortest round-trip decimal, in exponent form for very small or large
/// magnitudes.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn numeric(columns: Vec<&'static str>, rows: impl Iterator<Item = Vec<f64>>) -> Self {
        Self {
            columns,
            rows: rows
                .map(|r| r.into_iter().map(Cell::Num).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "columns": self.columns,
            "rows": self
                .rows
                .iter()
                .map(|r| r.iter().map(Cell::to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

#[derive(Default)]
pub struct Output {
    /// `key: value` lines placed after the manifest line of a CSV.
    pub comments: Vec<String>,
    pub table: Option<Table>,
    /// JSON body for commands whose natural output is a report.
    pub report: Option<Value>,
    /// Scalars copied into the manifest.
    pub results: Map<String, Value>,
    pub warnings: Vec<String>,
}

impl Output {
    fn result(&mut self, key: &str, value: Value) {
        self.results.insert(key.into(), value);
    }
}

/// Resolved parameter sets for one run.
pub struct Params {
    /// Raw values, in the units named by their keys.
    pub config: Config,
    pub device: DeviceParams,
    pub spin: SpinParams,
    pub drive: DriveConfig,
}

impl Params {
    /// Oscillation at the configured drive power.
    fn oscillator(&self) -> OscillatorState {
        clamped_amplitude(self.drive.drive_power_in, &self.device)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("--{name} must be positive, got {v}")))
    }
}

fn template(t2star_us: f64, drive_us: f64, pi_fidelity: f64) -> Result<PulseSequence, CliError> {
    if !(0.0..=1.0).contains(&pi_fidelity) {
        return Err(usage(format!(
            "--pi-fidelity must lie in [0, 1], got {pi_fidelity}"
        )));
    }
    if !(drive_us >= 0.0 && drive_us.is_finite()) {
        return Err(usage(format!(
            "--drive-us must be nonnegative, got {drive_us}"
        )));
    }
    Ok(PulseSequence {
        drive_duration: drive_us * 1e-6,
        t2_star: positive("t2star-us", t2star_us)? * 1e-6,
        pi_pulse_fidelity: pi_fidelity,
        ..Default::default()
    })
}

fn khz_grid(text: &str) -> Result<Vec<f64>, CliError> {
    Ok(parse_range(text)
        .map_err(usage)?
        .into_iter()
        .map(khz)
        .collect())
}

pub fn device_report(p: &Params) -> Output {
    let d = &p.device;
    let rates = d.derived_rates();
    let n_th = threshold_photons(d);
    let ratios = [0.5, 1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0];
    let table = Table::numeric(
        vec![
            "power_mw",
            "power_ratio",
            "displacement_pm",
            "stress_mpa",
            "phonon_number_equivalent",
        ],
        ratios.iter().map(|&k| {
            let power = k * d.p_threshold_in;
            let s = clamped_amplitude(power, d);
            vec![
                power * 1e3,
                k,
                s.displacement_amp * 1e12,
                s.stress_amp / 1e6,
                s.phonon_number_equivalent,
            ]
        }),
    );
    let report = json!({
        "kappa_ghz": to_ghz(rates.kappa),
        "gamma_m_khz": to_khz(rates.gamma_m),
        "omega_m_ghz": p.config.omega_m_ghz,
        "sideband_resolved": rates.sideband_resolved,
        "threshold_photons": n_th,
        "cooperativity_at_threshold": cooperativity_om(n_th, d),
        "threshold_dropped_power_mw": threshold_dropped_power(d) * 1e3,
        "threshold_input_power_mw": d.p_threshold_in * 1e3,
        "clamped_amplitude": table.to_json(),
    });
    let mut out = Output {
        table: Some(table),
        report: Some(report),
        ..Default::default()
    };
    out.result("kappa_ghz", json!(to_ghz(rates.kappa)));
    out.result("gamma_m_khz", json!(to_khz(rates.gamma_m)));
    out.result("sideband_resolved", json!(rates.sideband_resolved));
    out.result(
        "threshold_dropped_power_mw",
        json!(threshold_dropped_power(d) * 1e3),
    );
    out
}

pub fn lock_profile(
    p: &Params,
    min_khz: f64,
    max_khz: f64,
    steps: usize,
) -> Result<Output, CliError> {
    if steps < 2 {
        return Err(usage("--steps must be at least 2"));
    }
    if !(max_khz > min_khz) || !min_khz.is_finite() || !max_khz.is_finite() {
        return Err(usage("--delta-max-khz must exceed --delta-min-khz"));
    }
    let lp = LockProfile::from(&p.drive);
    let osc = p.oscillator();
    let mut outside = 0;
    let table = Table::numeric(
        vec!["delta_mi_khz", "psd_norm", "stress_mpa"],
        (0..steps)
            .map(|i| min_khz + (max_khz - min_khz) * i as f64 / (steps - 1) as f64)
            .map(|d| {
                let psd = psd_vs_detuning(khz(d), &lp);
                outside += psd.out_of_range as usize;
                vec![
                    d,
                    psd.value,
                    stress_vs_detuning(khz(d), &lp, &osc).value / 1e6,
                ]
            })
            .collect::<Vec<_>>()
            .into_iter(),
    );
    let mut out = Output {
        table: Some(table),
        ..Default::default()
    };
    out.comments.push(format!(
        "gamma_tune_khz: {}",
        fmt_num(to_khz(lp.gamma_tune))
    ));
    out.comments.push(format!(
        "peak_stress_mpa: {}",
        fmt_num(osc.stress_amp / 1e6)
    ));
    if outside > 0 {
        out.warnings.push(format!(
            "{outside} points outside demonstrated ±5 MHz tuning range"
        ));
    }
    out.result("gamma_tune_khz", json!(to_khz(lp.gamma_tune)));
    Ok(out)
}

pub fn spin_report(p: &Params) -> Output {
    let reference = p.device.p_max;
    let rows: Vec<_> = transitions(&p.spin, reference)
        .iter()
        .map(|t| {
            vec![
                t.nuclear_projection as f64,
                to_ghz(t.omega_s),
                to_khz(t.omega_s - p.device.omega_m),
                to_khz(t.rabi_max),
            ]
        })
        .collect();
    let table = Table::numeric(
        vec!["m_i", "omega_s_ghz", "delta_sm_khz", "rabi_khz"],
        rows.into_iter(),
    );
    let report = json!({
        "b_field_g": p.config.b_field_g,
        "omega_m_ghz": p.config.omega_m_ghz,
        "reference_stress_mpa": reference / 1e6,
        "eta": p.spin.eta,
        "transitions": table.to_json(),
    });
    Output {
        table: Some(table),
        report: Some(report),
        ..Default::default()
    }
}

fn sweep_table(s: &SweepResult) -> Table {
    Table::numeric(
        vec!["delta_si_khz", "stress_mpa", "p_plus1", "p_minus1"],
        (0..s.len()).map(|i| {
            vec![
                to_khz(s.delta_si[i]),
                s.stress[i] / 1e6,
                s.p_plus1[i],
                s.p_minus1[i],
            ]
        }),
    )
}

pub struct SweepArgs<'a> {
    pub delta_sm_khz: f64,
    pub omega_khz: Option<f64>,
    pub t2star_us: f64,
    pub drive_us: f64,
    pub pi_fidelity: f64,
    pub grid_khz: &'a str,
}

pub fn sweep(p: &Params, a: &SweepArgs<'_>) -> Result<Output, CliError> {
    let osc = p.oscillator();
    let omega = match a.omega_khz {
        Some(w) => khz(positive("omega-khz", w)?),
        None => rabi_from_stress(osc.stress_amp, &p.spin),
    };
    let grid = khz_grid(a.grid_khz)?;
    let lp = LockProfile::from(&p.drive);
    let seq = template(a.t2star_us, a.drive_us, a.pi_fidelity)?;
    let s = sweep_injection_detuning(khz(a.delta_sm_khz), omega, &lp, &seq, &grid, &osc)
        .map_err(numerical)?;
    let fwhm = s.fwhm.map(to_khz);
    let mut out = Output {
        table: Some(sweep_table(&s)),
        ..Default::default()
    };
    out.comments.push(match fwhm {
        Some(w) => format!("fwhm_khz: {}", fmt_num(w)),
        None => "fwhm_khz: none".into(),
    });
    out.comments
        .push(format!("peak_change: {}", fmt_num(s.peak_change())));
    out.comments
        .push(format!("omega_khz: {}", fmt_num(to_khz(omega))));
    out.result("fwhm_khz", json!(fwhm));
    out.result("peak_change", json!(s.peak_change()));
    out.result("omega_khz", json!(to_khz(omega)));
    out.result("delta_sm_khz", json!(a.delta_sm_khz));
    out.result("suppression", json!(lp.amplitude_norm(khz(a.delta_sm_khz))));
    if grid.iter().any(|&d| !lp.in_range(khz(a.delta_sm_khz) - d)) {
        out.warnings
            .push("grid reaches outside demonstrated ±5 MHz tuning range".into());
    }
    Ok(out)
}

pub struct StressSweepArgs {
    pub stress_max_mpa: Option<f64>,
    pub steps: usize,
    pub delta_si_khz: f64,
    pub t2star_us: f64,
    pub drive_us: f64,
    pub pi_fidelity: f64,
}

pub fn stress_sweep(p: &Params, a: &StressSweepArgs) -> Result<Output, CliError> {
    if a.steps < 2 {
        return Err(usage("--steps must be at least 2"));
    }
    let max = match a.stress_max_mpa {
        Some(v) => positive("stress-max-mpa", v)? * 1e6,
        None => p.device.p_max,
    };
    let stresses: Vec<f64> = (0..a.steps)
        .map(|i| max * i as f64 / (a.steps - 1) as f64)
        .collect();
    let seq = template(a.t2star_us, a.drive_us, a.pi_fidelity)?;
    let s = sweep_stress(&stresses, khz(a.delta_si_khz), &p.spin, &seq).map_err(numerical)?;
    let top = rabi_from_stress(max, &p.spin);
    let mut out = Output {
        table: Some(sweep_table(&s)),
        ..Default::default()
    };
    out.comments
        .push(format!("rabi_at_max_khz: {}", fmt_num(to_khz(top))));
    out.result("rabi_at_max_khz", json!(to_khz(top)));
    out.result("p_minus1_at_max", json!(s.p_minus1.last()));
    Ok(out)
}

pub struct MapArgs<'a> {
    pub t2star_us: &'a str,
    pub delta_sm_khz: f64,
    pub omega_grid_khz: &'a str,
    pub grid_khz: &'a str,
    pub drive_us: f64,
    pub invert_width_khz: Option<f64>,
    pub invert_contrast: Option<f64>,
}

pub fn fwhm_map(p: &Params, a: &MapArgs<'_>) -> Result<Output, CliError> {
    let t2s = parse_list(a.t2star_us).map_err(usage)?;
    let omegas = khz_grid(a.omega_grid_khz)?;
    let grid = khz_grid(a.grid_khz)?;
    let lp = LockProfile::from(&p.drive);
    let mut maps = Vec::new();
    for &t2 in &t2s {
        let seq = template(t2, a.drive_us, 1.0)?;
        let ctx = MapContext {
            template: seq,
            detuning_grid: grid.clone(),
            ..MapContext::new(seq.t2_star, khz(a.delta_sm_khz), lp)
        };
        maps.push(FwhmMap::build(ctx, &omegas).map_err(numerical)?);
    }
    let rows = maps.iter().flat_map(|m| {
        m.rows.iter().map(move |r| {
            vec![
                m.context.t2_star * 1e6,
                to_khz(r.omega),
                to_khz(r.fwhm),
                r.delta_p,
            ]
        })
    });
    let mut out = Output {
        table: Some(Table::numeric(
            vec!["t2_star_us", "omega_khz", "fwhm_khz", "delta_p_minus1"],
            rows.collect::<Vec<_>>().into_iter(),
        )),
        ..Default::default()
    };
    for m in &maps {
        if !m.width_monotone() || !m.contrast_monotone() {
            out.warnings.push(format!(
                "map at T2* = {} us is not monotone",
                m.context.t2_star * 1e6
            ));
        }
    }
    if let Some(w) = a.invert_width_khz {
        let inv = spinmech::analysis::invert_fwhm(khz(w), &maps).map_err(numerical)?;
        out.comments.push(format!(
            "omega_from_width_khz: {} +- {}",
            fmt_num(to_khz(inv.omega)),
            fmt_num(to_khz(inv.uncertainty))
        ));
        out.result("omega_from_width_khz", json!(to_khz(inv.omega)));
        out.result(
            "omega_from_width_uncertainty_khz",
            json!(to_khz(inv.uncertainty)),
        );
    }
    if let Some(c) = a.invert_contrast {
        let inv = contrast_lower_bound(c, &maps).map_err(numerical)?;
        out.comments.push(format!(
            "omega_min_from_contrast_khz: {} +- {}",
            fmt_num(to_khz(inv.omega)),
            fmt_num(to_khz(inv.uncertainty))
        ));
        out.result("omega_min_from_contrast_khz", json!(to_khz(inv.omega)));
        out.result(
            "omega_min_from_contrast_uncertainty_khz",
            json!(to_khz(inv.uncertainty)),
        );
    }
    Ok(out)
}

pub struct FitArgs<'a> {
    pub data: &'a Path,
    pub delta_sm_khz: f64,
    pub t2star_us: f64,
    pub drive_us: f64,
}

pub fn fit(p: &Params, a: &FitArgs<'_>) -> Result<Output, CliError> {
    let file =
        std::fs::File::open(a.data).map_err(|e| usage(format!("{}: {e}", a.data.display())))?;
    let data = spinmech::io::read_sweep_csv(file)
        .map_err(|e| usage(format!("{}: {e}", a.data.display())))?;
    let seq = template(a.t2star_us, a.drive_us, 1.0)?;
    let ctx = MapContext {
        template: seq,
        ..MapContext::new(
            seq.t2_star,
            khz(a.delta_sm_khz),
            LockProfile::from(&p.drive),
        )
    };
    let rep = fit_sweep(&data, &ctx, &FitOptions::default()).map_err(numerical)?;
    let report = json!({
        "omega_m_khz": to_khz(rep.omega_m),
        "omega_m_uncertainty_khz": to_khz(rep.omega_m_uncertainty),
        "r": rep.r,
        "r_uncertainty": rep.r_uncertainty,
        "residual_norm": rep.residual_norm,
        "fwhm_khz": rep.fwhm.map(to_khz),
        "data_fwhm_khz": rep.data_fwhm.map(to_khz),
        "snr": rep.snr,
        "low_confidence": rep.low_confidence,
        "initial_omega_khz": to_khz(rep.initial_omega),
        "initial_r": rep.initial_r,
        "evaluations": rep.evaluations,
        "model": {
            "t2_star_us": rep.t2_star * 1e6,
            "delta_sm_khz": to_khz(rep.delta_sm),
            "gamma_tune_khz": to_khz(rep.gamma_tune),
            "drive_us": rep.drive_duration * 1e6,
        },
    });
    let mut out = Output {
        report: Some(report),
        ..Default::default()
    };
    out.result("omega_m_khz", json!(to_khz(rep.omega_m)));
    out.result("r", json!(rep.r));
    out.result("low_confidence", json!(rep.low_confidence));
    if rep.low_confidence {
        out.warnings.push(format!(
            "low-confidence fit: signal/residual = {:.2}",
            rep.snr
        ));
    }
    Ok(out)
}

pub fn roadmap(factor4: bool) -> Output {
    let rows = evaluate(&presets(factor4));
    let table = Table {
        columns: vec![
            "label",
            "g_sm_khz",
            "gamma_spin_khz",
            "gamma_m_khz",
            "g_om_khz",
            "kappa_ghz",
            "n_photons",
            "c_sm",
            "c_om",
            "assumptions",
        ],
        rows: rows
            .iter()
            .map(|r| {
                let e = &r.entry;
                vec![
                    Cell::Text(e.label.clone()),
                    Cell::Num(to_khz(e.g_sm)),
                    Cell::Num(to_khz(e.gamma_spin)),
                    Cell::Num(to_khz(e.gamma_m)),
                    Cell::Num(to_khz(e.g_om)),
                    Cell::Num(to_ghz(e.kappa)),
                    Cell::Num(e.n_photons),
                    Cell::Num(r.c_sm),
                    Cell::Num(r.c_om),
                    Cell::Text(e.assumptions.join("; ")),
                ]
            })
            .collect(),
    };
    let mut out = Output {
        table: Some(table),
        ..Default::default()
    };
    out.comments.push(format!("factor4_convention: {factor4}"));
    for r in &rows {
        out.result(&format!("c_sm[{}]", r.entry.label), json!(r.c_sm));
    }
    out
}
