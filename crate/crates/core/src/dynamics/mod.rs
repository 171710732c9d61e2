//! Open-system dynamics of the |+1⟩↔|−1⟩ double-quantum transition.
//!
//! In the frame rotating at the drive frequency the Hamiltonian is
//! `H = (δ/2)σ_z + (Ω/2)σ_x` on the basis (|+1⟩, |−1⟩). Pure dephasing is the
//! Lindblad channel `L = √(γ_φ/2)·σ_z`, which damps the coherence ρ_01 at
//! rate γ_φ = 1/T2* and gives a Lorentzian line of FWHM 1/(πT2*) in Hz.
//! The master equation is integrated with fixed-step classical RK4.

mod sweep;

pub use sweep::{
    sweep_injection_detuning, sweep_stress, DetuningSweep, SweepMetadata, SweepResult,
};

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

/// Upper bound on `dt·max(|δ|, Ω, γ_φ)` accepted by the integrator.
pub const MAX_STEP_PHASE: f64 = 0.1;

/// Step phase used when a sequence does not specify its own time step.
/// Halving the step from here changes populations by well under 1e-8.
pub const DEFAULT_STEP_PHASE: f64 = 0.01;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("time step too large: dt·rate = {0:.3} (must be < {MAX_STEP_PHASE})")]
    StepTooLarge(f64),
    #[error("invalid time step {0:e} s")]
    InvalidStep(f64),
    #[error("invalid duration {0:e} s")]
    InvalidDuration(f64),
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("density matrix is not physical: {0}")]
    Unphysical(String),
    #[error("empty detuning grid")]
    EmptyGrid,
    #[error("detuning grid is not sorted")]
    UnsortedGrid,
}

type Matrix = [[C; 2]; 2];
type Super = [[C; 4]; 4];

fn basis(k: usize) -> Matrix {
    let mut m = [[ZERO; 2]; 2];
    m[k / 2][k % 2] = C::new(1.0, 0.0);
    m
}

fn vec4(m: &Matrix) -> [C; 4] {
    [m[0][0], m[0][1], m[1][0], m[1][1]]
}

fn super_mul(a: &Super, b: &Super) -> Super {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            for j in 0..4 {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn super_apply(a: &Super, v: &[C; 4]) -> [C; 4] {
    let mut out = [ZERO; 4];
    for i in 0..4 {
        for k in 0..4 {
            out[i] += a[i][k] * v[k];
        }
    }
    out
}

fn super_pow(mut base: Super, mut n: usize) -> Super {
    let mut acc = [[ZERO; 4]; 4];
    for (i, row) in acc.iter_mut().enumerate() {
        row[i] = C::new(1.0, 0.0);
    }
    while n > 0 {
        if n & 1 == 1 {
            acc = super_mul(&acc, &base);
        }
        n >>= 1;
        if n > 0 {
            base = super_mul(&base, &base);
        }
    }
    acc
}

const ZERO: C = C::new(0.0, 0.0);

/// Density matrix on the (|+1⟩, |−1⟩) basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinState {
    rho: Matrix,
}

impl SpinState {
    pub fn plus_one() -> Self {
        Self {
            rho: [[C::new(1.0, 0.0), ZERO], [ZERO, ZERO]],
        }
    }

    pub fn minus_one() -> Self {
        Self {
            rho: [[ZERO, ZERO], [ZERO, C::new(1.0, 0.0)]],
        }
    }

    /// Build from an explicit matrix, checking the state invariants.
    pub fn from_matrix(rho: Matrix) -> Result<Self, DynamicsError> {
        let s = Self { rho };
        s.check()?;
        Ok(s)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.rho
    }

    pub fn p_plus1(&self) -> f64 {
        self.rho[0][0].re
    }

    pub fn p_minus1(&self) -> f64 {
        self.rho[1][1].re
    }

    /// The off-diagonal element ⟨+1|ρ|−1⟩.
    pub fn coherence(&self) -> C {
        self.rho[0][1]
    }

    pub fn trace(&self) -> C {
        self.rho[0][0] + self.rho[1][1]
    }

    /// Trace, Hermiticity and positivity checks.
    pub fn check(&self) -> Result<(), DynamicsError> {
        let r = &self.rho;
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
            return Err(DynamicsError::Unphysical(format!("trace = {tr}")));
        }
        let herm = (r[0][1] - r[1][0].conj())
            .norm()
            .max(r[0][0].im.abs())
            .max(r[1][1].im.abs());
        if herm > 1e-12 {
            return Err(DynamicsError::Unphysical(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let det = (r[0][0] * r[1][1] - r[0][1] * r[1][0]).re;
        if det < -1e-9 {
            return Err(DynamicsError::Unphysical(format!("det = {det:e}")));
        }
        for p in [r[0][0].re, r[1][1].re] {
            if !(-1e-9..=1.0 + 1e-9).contains(&p) {
                return Err(DynamicsError::Unphysical(format!("population {p}")));
            }
        }
        Ok(())
    }
}

/// Driven, dephased two-level system in the rotating frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevel {
    /// Rabi rate Ω (rad/s).
    pub omega: f64,
    /// Drive detuning δ (rad/s).
    pub delta: f64,
    /// Coherence decay rate γ_φ (1/s).
    pub gamma_phi: f64,
}

impl TwoLevel {
    /// System with dephasing time `t2_star`; `f64::INFINITY` disables dephasing.
    pub fn new(omega: f64, delta: f64, t2_star: f64) -> Self {
        Self {
            omega,
            delta,
            gamma_phi: 1.0 / t2_star,
        }
    }

    /// Fastest rate in the generator.
    pub fn max_rate(&self) -> f64 {
        self.delta.abs().max(self.omega.abs()).max(self.gamma_phi)
    }

    fn validate(&self) -> Result<(), DynamicsError> {
        for (name, value) in [
            ("omega", self.omega),
            ("delta", self.delta),
            ("gamma_phi", self.gamma_phi),
        ] {
            if !value.is_finite() {
                return Err(DynamicsError::InvalidParameter { name, value });
            }
        }
        if self.gamma_phi < 0.0 {
            return Err(DynamicsError::InvalidParameter {
                name: "gamma_phi",
                value: self.gamma_phi,
            });
        }
        Ok(())
    }

    /// dρ/dt = −i[H, ρ] + γ_φ/2·(σ_z ρ σ_z − ρ).
    #[inline]
    fn rhs(&self, r: &Matrix) -> Matrix {
        let (d, w) = (0.5 * self.delta, 0.5 * self.omega);
        // [H, ρ] for H = [[d, w], [w, -d]]
        let c00 = w * (r[1][0] - r[0][1]);
        let c01 = 2.0 * d * r[0][1] + w * (r[1][1] - r[0][0]);
        let c10 = -2.0 * d * r[1][0] + w * (r[0][0] - r[1][1]);
        let i = C::new(0.0, 1.0);
        let g = self.gamma_phi;
        [
            [-i * c00, -i * c01 - g * r[0][1]],
            [-i * c10 - g * r[1][0], i * c00],
        ]
    }

    fn rk4_step(&self, r: &Matrix, h: f64) -> Matrix {
        let axpy = |a: &Matrix, s: f64, b: &Matrix| -> Matrix {
            [
                [a[0][0] + s * b[0][0], a[0][1] + s * b[0][1]],
                [a[1][0] + s * b[1][0], a[1][1] + s * b[1][1]],
            ]
        };
        let k1 = self.rhs(r);
        let k2 = self.rhs(&axpy(r, 0.5 * h, &k1));
        let k3 = self.rhs(&axpy(r, 0.5 * h, &k2));
        let k4 = self.rhs(&axpy(r, h, &k3));
        let mut out = *r;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += h / 6.0 * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
            }
        }
        out
    }

    /// One RK4 step as a linear map on vec(ρ) = (ρ00, ρ01, ρ10, ρ11).
    fn step_map(&self, h: f64) -> Super {
        let mut m = [[ZERO; 4]; 4];
        for (k, col) in (0..4).map(|k| (k, basis(k))) {
            let out = self.rk4_step(&col, h);
            for (i, v) in vec4(&out).into_iter().enumerate() {
                m[i][k] = v;
            }
        }
        m
    }

    fn checked_steps(&self, duration: f64, dt: f64) -> Result<(usize, f64), DynamicsError> {
        self.validate()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(DynamicsError::InvalidStep(dt));
        }
        if !(duration >= 0.0 && duration.is_finite()) {
            return Err(DynamicsError::InvalidDuration(duration));
        }
        let phase = dt * self.max_rate();
        if phase >= MAX_STEP_PHASE {
            return Err(DynamicsError::StepTooLarge(phase));
        }
        let steps = (duration / dt).ceil().max(1.0) as usize;
        Ok((steps, duration / steps as f64))
    }

    /// Evolve `initial` for `duration` with steps no longer than `dt`. The
    /// step is shortened so that an integer number of steps spans `duration`.
    ///
    /// The generator is time independent, so `n` RK4 steps equal the n-th
    /// power of the one-step map, which is formed by repeated squaring.
    pub fn evolve(
        &self,
        initial: &SpinState,
        duration: f64,
        dt: f64,
    ) -> Result<SpinState, DynamicsError> {
        let (steps, h) = self.checked_steps(duration, dt)?;
        if duration == 0.0 {
            return Ok(*initial);
        }
        let p = super_pow(self.step_map(h), steps);
        let v = super_apply(&p, &vec4(&initial.rho));
        let out = SpinState {
            rho: [[v[0], v[1]], [v[2], v[3]]],
        };
        debug_assert!(out.check().is_ok(), "{:?}", out.check());
        Ok(out)
    }

    /// Same result as [`TwoLevel::evolve`], stepping one RK4 step at a time
    /// and checking the state invariants after each step in debug builds.
    pub fn evolve_stepwise(
        &self,
        initial: &SpinState,
        duration: f64,
        dt: f64,
    ) -> Result<SpinState, DynamicsError> {
        let (steps, h) = self.checked_steps(duration, dt)?;
        if duration == 0.0 {
            return Ok(*initial);
        }
        let mut rho = initial.rho;
        for _ in 0..steps {
            rho = self.rk4_step(&rho, h);
            debug_assert!(
                SpinState { rho }.check().is_ok(),
                "{:?}",
                SpinState { rho }.check()
            );
        }
        Ok(SpinState { rho })
    }

    /// Time step giving `DEFAULT_STEP_PHASE` per step, capped at `duration`.
    pub fn default_dt(&self, duration: f64) -> f64 {
        let rate = self.max_rate();
        let dt = if rate > 0.0 {
            DEFAULT_STEP_PHASE / rate
        } else {
            f64::INFINITY
        };
        if duration > 0.0 {
            dt.min(duration)
        } else {
            dt.min(1.0)
        }
    }
}

/// Evolve a two-level state under drive `omega` at detuning `delta` with
/// dephasing time `t2_star`.
pub fn evolve_two_level(
    initial: &SpinState,
    omega: f64,
    delta: f64,
    t2_star: f64,
    duration: f64,
    dt: f64,
) -> Result<SpinState, DynamicsError> {
    TwoLevel::new(omega, delta, t2_star).evolve(initial, duration, dt)
}

/// Initialize in |+1⟩, drive mechanically, read out both populations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    /// Mechanical drive time (s).
    pub drive_duration: f64,
    /// Rabi rate Ω (rad/s).
    pub drive_rabi: f64,
    /// Drive detuning δ_s,i (rad/s).
    pub drive_detuning: f64,
    /// Dephasing time (s).
    pub t2_star: f64,
    /// Fraction of the population the initializing π-pulse moves into |+1⟩.
    pub pi_pulse_fidelity: f64,
    /// Extra dephasing from injection-tone frequency jitter (1/s).
    pub gamma_inj: f64,
    /// Integration step; `None` picks one from the fastest rate.
    pub dt: Option<f64>,
}

impl Default for PulseSequence {
    fn default() -> Self {
        Self {
            drive_duration: 7e-6,
            drive_rabi: 0.0,
            drive_detuning: 0.0,
            t2_star: 0.8e-6,
            pi_pulse_fidelity: 1.0,
            gamma_inj: 0.0,
            dt: None,
        }
    }
}

impl PulseSequence {
    pub fn with_drive(self, rabi: f64, detuning: f64) -> Self {
        Self {
            drive_rabi: rabi,
            drive_detuning: detuning,
            ..self
        }
    }

    pub fn system(&self) -> TwoLevel {
        let mut sys = TwoLevel::new(self.drive_rabi, self.drive_detuning, self.t2_star);
        sys.gamma_phi += self.gamma_inj;
        sys
    }

    fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.drive_duration >= 0.0 && self.drive_duration.is_finite()) {
            return Err(DynamicsError::InvalidDuration(self.drive_duration));
        }
        if !(0.0..=1.0).contains(&self.pi_pulse_fidelity) {
            return Err(DynamicsError::InvalidParameter {
                name: "pi_pulse_fidelity",
                value: self.pi_pulse_fidelity,
            });
        }
        if !(self.t2_star > 0.0) {
            return Err(DynamicsError::InvalidParameter {
                name: "t2_star",
                value: self.t2_star,
            });
        }
        if !(self.gamma_inj >= 0.0) {
            return Err(DynamicsError::InvalidParameter {
                name: "gamma_inj",
                value: self.gamma_inj,
            });
        }
        Ok(())
    }
}

/// Populations `(p_{+1}, p_{−1})` at the end of the sequence.
///
/// Population left in |0⟩ by an imperfect π-pulse does not take part in the
/// drive and is not counted in either readout.
pub fn run_sequence(seq: &PulseSequence) -> Result<(f64, f64), DynamicsError> {
    seq.validate()?;
    let sys = seq.system();
    let dt = seq.dt.unwrap_or_else(|| sys.default_dt(seq.drive_duration));
    let end = sys.evolve(&SpinState::plus_one(), seq.drive_duration, dt)?;
    let f = seq.pi_pulse_fidelity;
    Ok((f * end.p_plus1(), f * end.p_minus1()))
}
