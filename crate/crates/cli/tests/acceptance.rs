//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

use std::f64::consts::{PI, TAU};
use std::process::Command;

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinmech::analysis::{
    contrast_lower_bound, correct_population, default_omega_grid, fit_sweep, fwhm_vs_omega_map,
    invert_fwhm, FitData, FitOptions, FwhmMap, MapContext, DEFAULT_T2_BRACKET,
};
use spinmech::dynamics::{evolve_two_level, sweep_injection_detuning, PulseSequence, SpinState};
use spinmech::injection::{psd_vs_detuning, LockProfile};
use spinmech::nv::{rabi_from_stress, spin_splitting};
use spinmech::optomech::{
    cooperativity_om, threshold_dropped_power, threshold_photons, OscillatorState,
};
use spinmech::params::{DeviceParams, SpinParams};
use spinmech::roadmap::{cooperativity_om_entry, cooperativity_sm, presets};
use spinmech::units::{khz, to_khz};

type Check = Result<String, String>;

fn within(name: &str, got: f64, want: f64, rel: f64) -> Check {
    let err = (got / want - 1.0).abs();
    if err <= rel {
        Ok(format!(
            "{name} = {got:.6} (target {want}, ±{:.1}%)",
            100.0 * rel
        ))
    } else {
        Err(format!(
            "{name} = {got:.6}, off target {want} by {:.2}% (allowed {:.1}%)",
            100.0 * err,
            100.0 * rel
        ))
    }
}

fn all(checks: Vec<Check>) -> Check {
    let mut ok = Vec::new();
    for c in checks {
        ok.push(c?);
    }
    Ok(ok.join("; "))
}

fn ensure(cond: bool, ok: impl Into<String>, err: impl Into<String>) -> Check {
    if cond {
        Ok(ok.into())
    } else {
        Err(err.into())
    }
}

fn ulps(a: f64, b: f64) -> u64 {
    (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs()
}

fn maps() -> Vec<FwhmMap> {
    DEFAULT_T2_BRACKET
        .iter()
        .map(|&t2| {
            fwhm_vs_omega_map(
                &default_omega_grid(),
                t2,
                khz(182.0),
                &LockProfile::default(),
            )
            .expect("map")
        })
        .collect()
}

fn threshold() -> Check {
    let p = threshold_dropped_power(&DeviceParams::default()) * 1e3;
    all(vec![
        within("P_drop [mW]", p, 0.5, 0.10),
        within("P_drop [mW]", p, 0.47, 0.01),
    ])
}

fn derived_rates() -> Check {
    let r = DeviceParams::default().derived_rates();
    all(vec![
        within("γ_m/2π [kHz]", to_khz(r.gamma_m), 490.0, 0.02),
        within("γ_m/2π [kHz]", to_khz(r.gamma_m), 486.0, 0.001),
        within("κ/2π [GHz]", to_khz(r.kappa) / 1e6, 1.743, 0.001),
        ensure(
            r.sideband_resolved,
            "sideband resolved",
            "sideband_resolved is false",
        ),
    ])
}

fn lock_profile() -> Check {
    let lp = LockProfile::default();
    let lo = psd_vs_detuning(-khz(190.0), &lp).value;
    let hi = psd_vs_detuning(khz(190.0), &lp).value;
    ensure(
        ulps(lo, 0.5) <= 2 && ulps(hi, 0.5) <= 2,
        format!("psd(±190 kHz) = {lo}, {hi}"),
        format!("psd(±190 kHz) = {lo}, {hi}, not 0.5 to machine precision"),
    )
}

fn spin_resonance() -> Check {
    let sp = SpinParams::default();
    let w0 = spin_splitting(&sp, 0).unwrap();
    let oracle = 2.0 * 2.8025e6 * 375.0;
    let step = 2.0 * 4e6 * TAU;
    let hf_up = spin_splitting(&sp, -1).unwrap() - w0;
    let hf_down = w0 - spin_splitting(&sp, 1).unwrap();
    all(vec![
        within("ω_s/2π [Hz] vs 2γ_eB", w0 / TAU, oracle, 0.001),
        within("ω_s/2π [GHz]", w0 / TAU / 1e9, 2.102, 0.001),
        ensure(
            (hf_up + hf_down - step).abs() <= 4.0 * f64::EPSILON * w0
                && (hf_up - hf_down).abs() <= 4.0 * f64::EPSILON * w0,
            format!("hyperfine offsets ±{} MHz", hf_up / TAU / 1e6),
            format!("hyperfine offsets {hf_up}, {hf_down} rad/s"),
        ),
    ])
}

fn rabi_anchors() -> Check {
    let unit = SpinParams {
        eta: 1.0,
        ..SpinParams::default()
    };
    all(vec![
        within(
            "Ω/2π(20.8 MPa, η=1) [kHz]",
            to_khz(rabi_from_stress(20.8e6, &unit)),
            395.0,
            0.01,
        ),
        within(
            "Ω/2π(spot preset) [kHz]",
            to_khz(rabi_from_stress(20.8e6, &SpinParams::default())),
            100.0,
            0.05,
        ),
    ])
}

fn fig4a() -> Check {
    let grid: Vec<f64> = (-150..=150).map(|i| khz(10.0 * i as f64)).collect();
    let s = sweep_injection_detuning(
        khz(182.0),
        khz(168.0),
        &LockProfile::default(),
        &PulseSequence::default(),
        &grid,
        &OscillatorState::clamped_max(&DeviceParams::default()),
    )
    .map_err(|e| e.to_string())?;
    let fwhm = s.fwhm.ok_or("no FWHM")?;
    let dp = s.peak_change();
    all(vec![
        within("Δ/2π [kHz]", to_khz(fwhm), 540.0, 0.20),
        ensure(
            (dp - 0.45).abs() <= 0.10,
            format!("Δp_-1 = {dp:.4} (0.45 ± 0.10)"),
            format!("Δp_-1 = {dp:.4}, outside 0.45 ± 0.10"),
        ),
    ])
}

fn inversions(maps: &[FwhmMap]) -> Check {
    let w = invert_fwhm(khz(540.0), maps).map_err(|e| e.to_string())?;
    let c = contrast_lower_bound(0.10, maps).map_err(|e| e.to_string())?;
    let p = correct_population(0.09, 0.8).map_err(|e| e.to_string())?;
    all(vec![
        within("Ω_m/2π from width [kHz]", to_khz(w.omega), 168.0, 0.20),
        within("Ω_min/2π from contrast [kHz]", to_khz(c.omega), 50.0, 0.20),
        ensure(
            ulps(p, 0.45) <= 2,
            format!("p_corr = {p}"),
            format!("p_corr = {p}, not 0.45"),
        ),
    ])
}

fn roadmap() -> Check {
    let e = presets(true);
    let find = |label: &str| e.iter().find(|x| x.label == label).expect("preset");
    let siv = cooperativity_sm(find("SiV microdisk"));
    let omc = cooperativity_sm(find("SiV optomechanical crystal"));
    let d = DeviceParams::default();
    let c_th = cooperativity_om(threshold_photons(&d), &d);
    let c_entry = cooperativity_om_entry(find("NV microdisk (this device)"));
    all(vec![
        ensure(
            ulps(siv, 0.2) <= 2,
            format!("C_sm(SiV disk) = {siv}"),
            format!("C_sm(SiV disk) = {siv}"),
        ),
        ensure(
            omc > 100.0,
            format!("C_sm(OMC) = {omc:.3}"),
            format!("C_sm(OMC) = {omc}"),
        ),
        within("C_sm(OMC)", omc, 125.0, 1e-9),
        ensure(
            (c_th - 1.0).abs() <= 1e-12 && (c_entry - 1.0).abs() <= 1e-12,
            "C_om(N_th) = 1",
            format!("C_om(N_th) = {c_th}, {c_entry}"),
        ),
    ])
}

fn torrey(omega: f64, gamma: f64, t: f64) -> f64 {
    let mu = (omega * omega - 0.25 * gamma * gamma).sqrt();
    let z = (-0.5 * gamma * t).exp() * ((mu * t).cos() + 0.5 * gamma / mu * (mu * t).sin());
    0.5 * (1.0 - z)
}

fn random_state(rng: &mut ChaCha8Rng) -> SpinState {
    let r: f64 = rng.random_range(0.0..=1.0);
    let theta = rng.random_range(0.0..PI);
    let phi = rng.random_range(0.0..TAU);
    let (x, y, z) = (
        r * theta.sin() * phi.cos(),
        r * theta.sin() * phi.sin(),
        r * theta.cos(),
    );
    SpinState::from_matrix([
        [C::new(0.5 * (1.0 + z), 0.0), C::new(0.5 * x, -0.5 * y)],
        [C::new(0.5 * x, 0.5 * y), C::new(0.5 * (1.0 - z), 0.0)],
    ])
    .unwrap()
}

fn property_suite(maps: &[FwhmMap]) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut symmetric = 0.0f64;
    for _ in 0..1000 {
        let start = random_state(&mut rng);
        let omega = khz(rng.random_range(0.0..2000.0));
        let delta = khz(rng.random_range(-3000.0..3000.0));
        let t2 = rng.random_range(0.05e-6..50e-6);
        let t = rng.random_range(0.0..5e-6);
        let dt = 0.05 / omega.max(delta.abs()).max(1.0 / t2);
        let s = evolve_two_level(&start, omega, delta, t2, t, dt).map_err(|e| e.to_string())?;
        s.check()
            .map_err(|e| format!("randomized evolution: {e}"))?;
        let from_plus = |d: f64| evolve_two_level(&SpinState::plus_one(), omega, d, t2, t, dt);
        let (a, b) = (from_plus(delta).unwrap(), from_plus(-delta).unwrap());
        symmetric = symmetric.max((a.p_minus1() - b.p_minus1()).abs());
    }
    let sym = ensure(
        symmetric < 1e-12,
        "10³ random evolutions physical, δ→−δ symmetric",
        format!("δ→−δ asymmetry {symmetric:e}"),
    );

    let (omega, t2) = (khz(168.0), 0.8e-6);
    let mut worst = 0.0f64;
    for k in 1..=14 {
        let t = 0.5e-6 * k as f64;
        let s = evolve_two_level(&SpinState::plus_one(), omega, 0.0, t2, t, 1e-9).unwrap();
        worst = worst.max((s.p_minus1() - torrey(omega, 1.0 / t2, t)).abs());
    }
    let err = |dt: f64| {
        let s = evolve_two_level(&SpinState::plus_one(), khz(500.0), 0.0, t2, 3e-6, dt).unwrap();
        (s.p_minus1() - torrey(khz(500.0), 1.0 / t2, 3e-6)).abs()
    };
    let order = (err(25e-9) / err(12.5e-9)).log2();
    let rk4 = ensure(
        worst < 1e-6 && (3.7..4.3).contains(&order),
        format!("RK4 error {worst:.1e} at 1 ns, order {order:.2}"),
        format!("RK4 error {worst:e} at 1 ns, order {order}"),
    );

    let plus_x = SpinState::from_matrix([
        [C::new(0.5, 0.0), C::new(0.5, 0.0)],
        [C::new(0.5, 0.0), C::new(0.5, 0.0)],
    ])
    .unwrap();
    let mut decay = 0.0f64;
    for k in 1..=8 {
        let t = 0.25e-6 * k as f64;
        let s = evolve_two_level(&plus_x, 0.0, 0.0, t2, t, 1e-9).unwrap();
        decay = decay.max((s.coherence().norm() - 0.5 * (-t / t2).exp()).abs());
    }
    let linewidth = 1.0 / (PI * t2);
    let coh = ensure(
        decay < 1e-6 && (linewidth / 400e3 - 1.0).abs() < 0.01,
        format!(
            "coherence decay error {decay:.1e}, 1/(πT2*) = {:.1} kHz",
            linewidth / 1e3
        ),
        format!("coherence decay error {decay:e}"),
    );

    let ctx = MapContext::new(0.8e-6, khz(182.0), LockProfile::default());
    let (w_true, r_true) = (khz(168.0), 0.8);
    let s = ctx.sweep(w_true).run(&ctx.detuning_grid).unwrap();
    let data = FitData {
        delta_si: s.delta_si.clone(),
        p_plus1: s
            .p_plus1
            .iter()
            .map(|p| r_true + (1.0 - r_true) * p)
            .collect(),
        p_minus1: s.p_minus1.iter().map(|p| (1.0 - r_true) * p).collect(),
    };
    let rep = fit_sweep(&data, &ctx, &FitOptions::default()).map_err(|e| e.to_string())?;
    let fit = all(vec![
        within("fit Ω/2π [kHz]", to_khz(rep.omega_m), 168.0, 0.01),
        within("fit r", rep.r, 0.8, 0.01),
    ]);

    let mono = ensure(
        maps.iter()
            .all(|m| m.width_monotone() && m.contrast_monotone()),
        "Δ(Ω), Δp(Ω) monotone",
        "map not monotone",
    );
    all(vec![sym, rk4, coh, fit, mono])
}

fn determinism() -> Check {
    let dir = std::env::temp_dir().join(format!("spinmech-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let run = |args: &[&str], name: &str| -> Result<(Vec<u8>, Vec<u8>), String> {
        let out = dir.join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_spinmech"))
            .args(args)
            .arg("--out")
            .arg(&out)
            .env_remove("SOURCE_DATE_EPOCH")
            .output()
            .map_err(|e| e.to_string())?;
        if !o.status.success() {
            return Err(String::from_utf8_lossy(&o.stderr).into_owned());
        }
        let side = dir.join(format!("{name}.manifest.json"));
        Ok((
            std::fs::read(&out).map_err(|e| e.to_string())?,
            std::fs::read(&side).map_err(|e| e.to_string())?,
        ))
    };
    let cases: [&[&str]; 3] = [
        &["sweep", "--delta-sm-khz", "182", "--omega-khz", "168"],
        &["device-report"],
        &["roadmap"],
    ];
    let mut n = 0;
    for args in cases {
        if run(args, "out")? != run(args, "out")? {
            return Err(format!("{} output differs between runs", args[0]));
        }
        n += 1;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{n} commands byte-identical across runs"))
}

fn main() {
    let maps = maps();
    let results: Vec<(&str, Check)> = vec![
        ("threshold consistency", threshold()),
        ("derived rates", derived_rates()),
        ("lock profile", lock_profile()),
        ("spin resonance", spin_resonance()),
        ("Rabi anchors", rabi_anchors()),
        ("operating-point sweep", fig4a()),
        ("inversion anchors", inversions(&maps)),
        ("roadmap", roadmap()),
        ("property suite", property_suite(&maps)),
        ("determinism", determinism()),
    ];
    let mut failed = 0;
    for (i, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} acceptance criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
