//! Exact finite-dimensional models of a noncommutative position algebra,
//! synthesis and spectral estimation of the transverse "holographic" jitter it
//! predicts, interferometer observables built on that jitter, and the
//! quantum/black-hole size bounds that meet at the Planck scale.
//!
//! All quantities are SI. Every operation takes a [`PlanckScale`] so that the
//! constants can be swapped for round numbers in tests.

pub mod algebra;
pub mod bounds;
pub mod interferometer;
pub mod noise;
pub mod planck;
pub mod spectrum;

mod error;

pub use algebra::{AlgebraRep, Axis, Spin, StateVector};
pub use bounds::{ComptonConvention, Regime, RegimeClassification};
pub use error::Error;
pub use interferometer::{DetectabilityReport, InterferometerConfig, Verdict};
pub use noise::{NoiseConfig, NoiseSeries};
pub use planck::PlanckScale;
pub use spectrum::{Autocorrelation, SpectrumEstimate};

pub type Result<T, E = Error> = std::result::Result<T, E>;
