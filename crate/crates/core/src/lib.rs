//! Spontaneous decay of a two-level emitter dressed by a strong,
//! low-frequency classical field.
//!
//! The drive is absorbed into a time-dependent rotation of the quasi-spin,
//! which turns the vacuum coupling into a decay rate γ(t) that is periodic at
//! twice the drive frequency. Its harmonic content comes from products of
//! Bessel functions, collapsed here into a single set of amplitudes, and the
//! resulting master equation is integrated with an adaptive Runge–Kutta
//! scheme.

pub mod bessel;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod ode;
pub mod params;
pub mod scenarios;
pub mod spectrum;
pub mod spin;

pub use dynamics::{evolve, EvolveOptions, QubitState, StandardModel, Trajectory};
pub use error::{Error, RegimeError, Result};
pub use scenarios::{compare, preset, run, sweep, ComparisonReport, ScenarioPreset, ScenarioRun};
pub use params::{derive, DerivedParams, DriveParams, ModelOrder};
pub use spectrum::{gamma_bar, gamma_t, harmonic_amplitudes, HarmonicSpectrum, TruncationPolicy};
