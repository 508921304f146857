//! Numerical core for paired significance testing experiments.
//!
//! The crate is `no_std` (with `alloc`) and contains everything that is pure
//! computation:
//!
//! * [`distributions`]: samplers and exact moments for the non-normal
//!   families used to model per-topic differences (generalized normal,
//!   skewed generalized normal, Tukey g-and-h, irregular beta-binomial over
//!   a metric support, bimodal normal mixture).
//! * [`calibration`]: departure-level grids and the root finders that solve
//!   for shape parameters hitting a target skewness, excess kurtosis or
//!   standard deviation.
//! * [`paired`]: the paired Student t-test and the Wilcoxon signed-rank test
//!   with exact and normal-approximation null distributions.
//! * [`montecarlo`]: the single-replicate kernel and tallies used by the
//!   parallel engine in the companion crate.
//! * [`diagnostics`]: sample moments, resampling and the test-with-warnings
//!   report for observed differences.
//!
//! IO, parallelism, file formats and the command line live in the `pairsig`
//! crate.
#![no_std]

extern crate alloc;

pub mod calibration;
pub mod diagnostics;
pub mod distributions;
mod error;
pub mod montecarlo;
pub mod paired;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
