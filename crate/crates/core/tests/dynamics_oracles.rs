mod common;

use common::{bloch, bloch_p_minus1, khz, torrey_p_minus1};
use num_complex::Complex64 as C;
use proptest::prelude::*;
use spinmech::dynamics::{
    evolve_two_level, run_sequence, DynamicsError, PulseSequence, SpinState, TwoLevel,
};

fn state_from_bloch(v: [f64; 3]) -> SpinState {
    let [x, y, z] = v;
    SpinState::from_matrix([
        [C::new(0.5 * (1.0 + z), 0.0), C::new(0.5 * x, -0.5 * y)],
        [C::new(0.5 * x, 0.5 * y), C::new(0.5 * (1.0 - z), 0.0)],
    ])
    .unwrap()
}

fn bloch_of(s: &SpinState) -> [f64; 3] {
    let c = s.coherence();
    [2.0 * c.re, -2.0 * c.im, s.p_plus1() - s.p_minus1()]
}

#[test]
fn resonant_damped_rabi_matches_torrey() {
    let (omega, t2) = (khz(168.0), 0.8e-6);
    let mut worst = 0.0f64;
    for k in 1..=14 {
        let t = 0.5e-6 * k as f64;
        let s = evolve_two_level(&SpinState::plus_one(), omega, 0.0, t2, t, 1e-9).unwrap();
        worst = worst.max((s.p_minus1() - torrey_p_minus1(omega, 1.0 / t2, t)).abs());
    }
    assert!(worst < 1e-6, "max error {worst:e}");
}

#[test]
fn operating_point_near_incoherent_limit() {
    let seq = PulseSequence::default().with_drive(khz(168.0), 0.0);
    let (p1, m1) = run_sequence(&seq).unwrap();
    let expected = torrey_p_minus1(khz(168.0), 1.0 / 0.8e-6, 7e-6);
    assert!((m1 - expected).abs() < 1e-7, "{m1} vs {expected}");
    assert!((p1 + m1 - 1.0).abs() < 1e-9);
    assert!((m1 - 0.5).abs() < 0.02);
}

#[test]
fn rk4_global_error_is_fourth_order() {
    let (omega, gamma, t) = (khz(500.0), 1.0 / 0.8e-6, 3e-6);
    let exact = torrey_p_minus1(omega, gamma, t);
    let err = |dt: f64| {
        let s = evolve_two_level(&SpinState::plus_one(), omega, 0.0, 1.0 / gamma, t, dt).unwrap();
        (s.p_minus1() - exact).abs()
    };
    let steps = [3e-6 / 120.0, 3e-6 / 240.0, 3e-6 / 480.0];
    let e: Vec<f64> = steps.iter().map(|&dt| err(dt)).collect();
    for w in e.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(
            (3.7..4.3).contains(&order),
            "observed order {order}, errors {e:?}"
        );
    }
}

#[test]
fn detuned_evolution_matches_bloch_oracle() {
    for &(omega, delta, t2, t) in &[
        (khz(168.0), khz(182.0), 0.8e-6, 7e-6),
        (khz(100.0), khz(263.0), 0.8e-6, 7e-6),
        (khz(300.0), khz(-900.0), 0.5e-6, 2e-6),
        (khz(40.0), khz(10.0), 5e-6, 10e-6),
    ] {
        let s = evolve_two_level(&SpinState::plus_one(), omega, delta, t2, t, 1e-9).unwrap();
        let v = bloch(omega, delta, 1.0 / t2, t, [0.0, 0.0, 1.0]);
        let got = bloch_of(&s);
        for i in 0..3 {
            assert!(
                (got[i] - v[i]).abs() < 1e-7,
                "component {i}: {got:?} vs {v:?}"
            );
        }
        assert!((s.p_minus1() - bloch_p_minus1(omega, delta, t2, t)).abs() < 1e-7);
    }
}

#[test]
fn halving_the_default_step_changes_little() {
    for &(omega, delta) in &[
        (khz(168.0), 0.0),
        (khz(168.0), khz(700.0)),
        (khz(40.0), khz(-1500.0)),
    ] {
        let seq = PulseSequence::default().with_drive(omega, delta);
        let dt = seq.system().default_dt(seq.drive_duration);
        let (_, a) = run_sequence(&seq).unwrap();
        let (_, b) = run_sequence(&PulseSequence {
            dt: Some(0.5 * dt),
            ..seq
        })
        .unwrap();
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn coherence_decays_at_inverse_t2() {
    let t2 = 0.8e-6;
    let start = state_from_bloch([0.6, 0.8, 0.0]);
    for k in 1..=8 {
        let t = 0.25e-6 * k as f64;
        let s = evolve_two_level(&start, 0.0, 0.0, t2, t, 1e-9).unwrap();
        let expected = 0.5 * (-t / t2).exp();
        assert!((s.coherence().norm() - expected).abs() < 1e-6);
        assert!((s.p_plus1() - 0.5).abs() < 1e-12);
    }
    // a decay rate of 1/T2* is a Lorentzian of FWHM 1/(πT2*) ≈ 400 kHz
    let s = evolve_two_level(&start, 0.0, 0.0, t2, 1e-6, 1e-9).unwrap();
    let rate = -(2.0 * s.coherence().norm()).ln() / 1e-6;
    let fwhm_hz = rate / std::f64::consts::PI;
    assert!((fwhm_hz / 400e3 - 1.0).abs() < 0.01, "{fwhm_hz}");
}

#[test]
fn powered_step_map_equals_stepping() {
    let start = state_from_bloch([0.3, -0.4, 0.5]);
    for &(omega, delta, t2, t, dt) in &[
        (khz(168.0), khz(182.0), 0.8e-6, 7e-6, 5e-9),
        (khz(900.0), khz(-1200.0), 0.3e-6, 1.3e-6, 7e-9),
        (0.0, khz(50.0), 2e-6, 0.37e-6, 1e-9),
    ] {
        let sys = TwoLevel::new(omega, delta, t2);
        let a = sys.evolve(&start, t, dt).unwrap();
        let b = sys.evolve_stepwise(&start, t, dt).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((a.matrix()[i][j] - b.matrix()[i][j]).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn coarse_step_is_rejected() {
    let err = evolve_two_level(
        &SpinState::plus_one(),
        khz(168.0),
        khz(1500.0),
        0.8e-6,
        1e-6,
        20e-9,
    )
    .unwrap_err();
    assert!(matches!(err, DynamicsError::StepTooLarge(_)));
}

fn arb_state() -> impl Strategy<Value = SpinState> {
    // a point in the Bloch ball
    (
        0.0..=1.0f64,
        0.0..std::f64::consts::PI,
        0.0..std::f64::consts::TAU,
    )
        .prop_map(|(r, theta, phi)| {
            state_from_bloch([
                r * theta.sin() * phi.cos(),
                r * theta.sin() * phi.sin(),
                r * theta.cos(),
            ])
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn random_evolutions_stay_physical(
        start in arb_state(),
        omega_khz in 0.0..2000.0f64,
        delta_khz in -3000.0..3000.0f64,
        t2_us in 0.05..50.0f64,
        t_us in 0.0..5.0f64,
    ) {
        let (omega, delta, t2) = (khz(omega_khz), khz(delta_khz), t2_us * 1e-6);
        let rate = omega.max(delta.abs()).max(1.0 / t2);
        let s = evolve_two_level(&start, omega, delta, t2, t_us * 1e-6, 0.05 / rate).unwrap();
        prop_assert!(s.check().is_ok(), "{:?}", s.check());
        let r = s.matrix();
        prop_assert!((r[0][0].re + r[1][1].re - 1.0).abs() < 1e-9);
        prop_assert!((r[0][1] - r[1][0].conj()).norm() < 1e-12);
        prop_assert!((r[0][0] * r[1][1] - r[0][1] * r[1][0]).re > -1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn detuning_sign_does_not_change_populations(
        omega_khz in 1.0..500.0f64,
        delta_khz in 0.0..1500.0f64,
        t2_us in 0.2..5.0f64,
        t_us in 0.1..7.0f64,
    ) {
        let run = |d: f64| {
            evolve_two_level(&SpinState::plus_one(), khz(omega_khz), khz(d), t2_us * 1e-6, t_us * 1e-6, 2e-9)
                .unwrap()
        };
        let (a, b) = (run(delta_khz), run(-delta_khz));
        prop_assert!((a.p_minus1() - b.p_minus1()).abs() < 1e-12);
        prop_assert!((a.p_plus1() - b.p_plus1()).abs() < 1e-12);
    }

    #[test]
    fn long_drive_saturates_at_one_half(
        omega_khz in 1.0..1000.0f64,
        delta_khz in -1500.0..1500.0f64,
        t2_us in 0.2..1.0f64,
    ) {
        let t2 = t2_us * 1e-6;
        let s = evolve_two_level(&SpinState::plus_one(), khz(omega_khz), khz(delta_khz), t2, 25.0 * t2, 2e-9)
            .unwrap();
        prop_assert!(s.p_minus1() <= 0.5 + 1e-3, "{}", s.p_minus1());
    }
}
