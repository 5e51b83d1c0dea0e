//! A test for "dragon kings": extreme observations that deviate
//! significantly from a fitted power-law or stretched-exponential tail.
//!
//! The construction is simple. The empirical distribution function of a
//! sample is asymptotically normal around the true cdf, so a tail model
//! fitted to the extreme order statistics yields a pointwise confidence
//! interval at every abscissa. Extreme observations falling outside that
//! interval are classified as dragon kings; those inside are black swans —
//! large, but consistent with the tail law.
//!
//! The crate provides:
//! - the four sampling laws (Cauchy, Pareto, symmetric hyperbolic, Weibull)
//!   with seeded deterministic samplers ([`distributions`]),
//! - the edf and pointwise CI machinery ([`edf`]),
//! - least-squares tail calibration and Weibull MLE ([`tailfit`]),
//! - the classification test itself ([`dktest`]),
//! - a Monte Carlo validation harness reproducing rejection-rate grids
//!   ([`study`]),
//! - data preparation pipelines: financial drawdowns and electricity-price
//!   deseasonalization ([`preprocess`]),
//! - CSV/JSON interchange and a CLI ([`io`], [`cli`]).
//!
//! See the `examples/` directory for one runnable example per capability.
//!
//! Note on conventions: the edf uses strict inequality,
//! `F_n(x) = #{x_i < x}/n`, and every interval here is a *pointwise*
//! confidence interval — valid at each fixed `x` separately — not a
//! simultaneous confidence band.

pub mod cli;
pub mod distributions;
pub mod dktest;
pub mod edf;
pub mod error;
pub mod io;
pub mod preprocess;
pub mod quad;
pub mod rng;
pub mod special;
pub mod study;
pub mod tailfit;
mod wavelet;

pub use distributions::DistributionModel;
pub use edf::{ConfidenceSpec, Sample, Side};
pub use error::{Error, Result};
pub use rng::Seed;
pub use tailfit::{TailForm, TailModel, TailWindow};
