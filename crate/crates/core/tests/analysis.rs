mod common;

use common::khz;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use spinmech::analysis::{
    contrast_lower_bound, correct_population, correct_populations, default_omega_grid, fit_sweep,
    fwhm_vs_omega_map, invert_fwhm, AnalysisError, FitData, FitOptions, FitProblem, FwhmMap,
    MapContext, DEFAULT_T2_BRACKET,
};
use spinmech::injection::LockProfile;
use std::sync::OnceLock;

fn maps() -> &'static [FwhmMap] {
    static MAPS: OnceLock<Vec<FwhmMap>> = OnceLock::new();
    MAPS.get_or_init(|| {
        DEFAULT_T2_BRACKET
            .iter()
            .map(|&t2| {
                fwhm_vs_omega_map(
                    &default_omega_grid(),
                    t2,
                    khz(182.0),
                    &LockProfile::default(),
                )
                .unwrap()
            })
            .collect()
    })
}

fn context(delta_sm: f64) -> MapContext {
    MapContext::new(0.8e-6, delta_sm, LockProfile::default())
}

/// Populations as measured with a fraction `r` of uncoupled emitters.
fn synthetic(omega: f64, r: f64, delta_sm: f64) -> FitData {
    let ctx = context(delta_sm);
    let s = ctx.sweep(omega).run(&ctx.detuning_grid).unwrap();
    FitData {
        delta_si: s.delta_si,
        p_plus1: s.p_plus1.iter().map(|p| r + (1.0 - r) * p).collect(),
        p_minus1: s.p_minus1.iter().map(|p| (1.0 - r) * p).collect(),
    }
}

#[test]
fn maps_are_monotone() {
    for m in maps() {
        assert!(m.width_monotone(), "width, T2* = {}", m.context.t2_star);
        assert!(
            m.contrast_monotone(),
            "contrast, T2* = {}",
            m.context.t2_star
        );
    }
    // contrast vanishes with the drive
    let row = context(khz(182.0)).row(khz(0.5)).unwrap();
    assert!(row.delta_p < 1e-3);
}

#[test]
fn operating_row() {
    let row = context(khz(182.0)).row(khz(168.0)).unwrap();
    assert!((row.fwhm / khz(540.0) - 1.0).abs() < 0.2);
    assert!((row.delta_p - 0.45).abs() < 0.10);
}

#[test]
fn width_inversion() {
    let inv = invert_fwhm(khz(540.0), maps()).unwrap();
    assert!(
        (inv.omega / khz(168.0) - 1.0).abs() < 0.2,
        "{}",
        inv.omega / khz(1.0)
    );
    assert!(inv.uncertainty > 0.0 && inv.uncertainty < 0.1 * inv.omega);
    assert_eq!(inv.per_map.len(), 2);
    let err = invert_fwhm(khz(100.0), maps()).unwrap_err();
    assert!(matches!(err, AnalysisError::UnreachableWidth { .. }));
    assert!(err.to_string().starts_with("unreachable width"));
}

#[test]
fn width_round_trip_off_grid() {
    let m = &maps()[1];
    for omega in [khz(23.7), khz(61.3), khz(118.9), khz(152.2)] {
        let w = m.context.row(omega).unwrap().fwhm;
        let back = m.invert_width(w).unwrap();
        assert!((back / omega - 1.0).abs() < 0.005, "{} vs {}", back, omega);
    }
}

#[test]
fn contrast_bound() {
    let inv = contrast_lower_bound(0.10, maps()).unwrap();
    assert!(
        (inv.omega / khz(50.0) - 1.0).abs() < 0.2,
        "{}",
        inv.omega / khz(1.0)
    );
    let tiny = contrast_lower_bound(1e-4, maps()).unwrap();
    assert!(tiny.omega < khz(5.0));
    // the contrast branch agrees with the width branch at the operating point
    for m in maps() {
        let dp = m.context.row(khz(168.0)).unwrap().delta_p;
        assert!((dp - 0.45).abs() < 0.10, "{dp}");
        let back = m.invert_contrast(dp).unwrap();
        assert!((back / khz(168.0) - 1.0).abs() < 0.005);
    }
    assert!(matches!(
        contrast_lower_bound(0.9, maps()).unwrap_err(),
        AnalysisError::ExceedsSaturation { .. }
    ));
}

#[test]
fn pedestal_correction() {
    assert_eq!(correct_population(0.09, 0.8).unwrap(), 0.09 / (1.0 - 0.8));
    assert!((correct_population(0.09, 0.8).unwrap() - 0.45).abs() < 1e-12);
    assert_eq!(correct_population(0.3, 0.0).unwrap(), 0.3);
    assert_eq!(correct_population(0.0, 0.6).unwrap(), 0.0);
    let (p1, m1) = correct_populations(0.09, 0.8).unwrap();
    assert_eq!(p1 + m1, 1.0);
    assert!(correct_population(0.1, 1.0).is_err());
}

#[test]
fn fit_recovers_generating_parameters() {
    let (omega, r) = (khz(168.0), 0.8);
    let data = synthetic(omega, r, khz(182.0));
    let rep = fit_sweep(&data, &context(khz(182.0)), &FitOptions::default()).unwrap();
    assert!(
        (rep.omega_m / omega - 1.0).abs() < 0.01,
        "{}",
        rep.omega_m / khz(1.0)
    );
    assert!((rep.r / r - 1.0).abs() < 0.01, "{}", rep.r);
    assert!(!rep.low_confidence);
    assert!(rep.omega_m_uncertainty >= 0.0 && rep.r_uncertainty >= 0.0);
}

#[test]
fn fit_pins_zero_pedestal() {
    let data = synthetic(khz(120.0), 0.0, khz(182.0));
    let rep = fit_sweep(&data, &context(khz(182.0)), &FitOptions::default()).unwrap();
    assert!(rep.r < 1e-4, "{}", rep.r);
    assert!(rep.r_uncertainty < 1e-3, "{}", rep.r_uncertainty);
    assert!((rep.omega_m / khz(120.0) - 1.0).abs() < 0.01);
}

#[test]
fn truth_is_a_local_minimum() {
    let (omega, r) = (khz(168.0), 0.8);
    let data = synthetic(omega, r, khz(182.0));
    let p = FitProblem::new(&data, context(khz(182.0)));
    let at_truth = p.ssr(omega, r).unwrap();
    assert!(at_truth < 1e-20);
    for (dw, dr) in [
        (1.01, 0.0),
        (0.99, 0.0),
        (1.0, 0.01),
        (1.0, -0.01),
        (1.02, -0.02),
    ] {
        assert!(p.ssr(omega * dw, r + dr).unwrap() > at_truth);
    }
}

#[test]
fn noisy_far_detuned_control_is_low_confidence() {
    let clean = synthetic(khz(168.0), 0.8, khz(-769.0));
    let mut rng = ChaCha8Rng::seed_from_u64(0x769);
    let noise = Normal::new(0.0, 0.02).unwrap();
    let data = FitData {
        p_plus1: clean
            .p_plus1
            .iter()
            .map(|p| p + noise.sample(&mut rng))
            .collect(),
        p_minus1: clean
            .p_minus1
            .iter()
            .map(|p| p + noise.sample(&mut rng))
            .collect(),
        ..clean
    };
    let rep = fit_sweep(&data, &context(khz(-769.0)), &FitOptions::default()).unwrap();
    assert!(rep.low_confidence, "snr {}", rep.snr);
}

#[test]
fn flat_data_is_degenerate() {
    let data = FitData {
        delta_si: (0..10).map(|i| khz(i as f64)).collect(),
        p_plus1: vec![1.0; 10],
        p_minus1: vec![0.0; 10],
    };
    let err = fit_sweep(&data, &context(khz(182.0)), &FitOptions::default()).unwrap_err();
    assert!(matches!(err, AnalysisError::Degenerate(_)));
}
