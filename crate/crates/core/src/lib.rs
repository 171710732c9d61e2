//! Desk-scale simulator for a cavity-optomechanical spin interface.
//!
//! A blue-detuned telecom drive pushes a diamond microdisk's radial
//! breathing mode into self-oscillation; an injection tone locks and tunes
//! the oscillation, and the resulting stress drives the |+1⟩↔|−1⟩ transition
//! of NV centres. The crate covers:
//!
//! - [`params`] and [`config`]: parameter sets and the key–value file format
//! - [`optomech`]: cooperativity, lasing threshold, clamped amplitude
//! - [`injection`]: locked amplitude versus injection detuning
//! - [`nv`]: spin level structure and stress-to-Rabi conversion
//! - [`dynamics`]: dephased two-level master equation and sweeps
//! - [`analysis`]: FWHM, width/contrast inversion, pedestal correction, fits
//! - [`roadmap`]: cooperativity presets
//!
//! Rates and frequencies are angular (rad/s) throughout; [`units`] converts
//! to and from the `ν` units used in files.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod dynamics;
pub mod injection;
pub mod io;
pub mod nv;
pub mod optomech;
pub mod params;
pub mod roadmap;
pub mod units;

pub use config::{load_config, Config, ConfigError};
pub use dynamics::{run_sequence, PulseSequence, SpinState, SweepResult};
pub use injection::LockProfile;
pub use optomech::OscillatorState;
pub use params::{DeviceParams, DriveConfig, SpinParams};
