//! Reference solutions shared by the integration tests. None of this calls
//! into the integrator under test.
#![allow(dead_code)]

use std::f64::consts::TAU;

pub fn khz(v: f64) -> f64 {
    TAU * 1e3 * v
}

type M3 = [[f64; 3]; 3];

fn mat_mul(a: &M3, b: &M3) -> M3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// exp(A) by scaling and squaring with a 24-term Taylor series.
fn expm(a: &M3) -> M3 {
    let norm = a
        .iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scale = 0.5f64.powi(s);
    let a: M3 = a.map(|r| r.map(|v| v * scale));
    let mut result = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut term = result;
    for k in 1..=24 {
        term = mat_mul(&term, &a).map(|r| r.map(|v| v / k as f64));
        for i in 0..3 {
            for j in 0..3 {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        result = mat_mul(&result, &result);
    }
    result
}

/// Bloch vector (x, y, z) after time `t` for drive `omega` about x, detuning
/// `delta` about z, and transverse decay rate `gamma`.
pub fn bloch(omega: f64, delta: f64, gamma: f64, t: f64, start: [f64; 3]) -> [f64; 3] {
    let m: M3 = [
        [-gamma, -delta, 0.0],
        [delta, -gamma, -omega],
        [0.0, omega, 0.0],
    ];
    let e = expm(&m.map(|r| r.map(|v| v * t)));
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = (0..3).map(|k| e[i][k] * start[k]).sum();
    }
    out
}

/// p_{−1} after driving from |+1⟩, via the Bloch oracle.
pub fn bloch_p_minus1(omega: f64, delta: f64, t2_star: f64, t: f64) -> f64 {
    let z = bloch(omega, delta, 1.0 / t2_star, t, [0.0, 0.0, 1.0])[2];
    0.5 * (1.0 - z)
}

/// Resonant damped Rabi oscillation from |+1⟩ (Torrey): the z component
/// for Rabi rate `omega` and coherence decay rate `gamma`, underdamped case.
pub fn torrey_p_minus1(omega: f64, gamma: f64, t: f64) -> f64 {
    let mu = (omega * omega - 0.25 * gamma * gamma).sqrt();
    let z = (-0.5 * gamma * t).exp() * ((mu * t).cos() + 0.5 * gamma / mu * (mu * t).sin());
    0.5 * (1.0 - z)
}

/// Lorentzian amplitude factor √(1/(1 + (2δ/Γ)²)).
pub fn lorentz_amplitude(delta: f64, gamma: f64) -> f64 {
    (1.0 / (1.0 + (2.0 * delta / gamma).powi(2))).sqrt()
}
