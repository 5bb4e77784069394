#![forbid(unsafe_code)]

//! Sliced Wasserstein distances between empirical distributions, with
//! generalized (nonlinear) slicing, Monte Carlo reference estimators and
//! deterministic moment-based fast approximations.
//!
//! The modules fit together like this:
//!
//! * [`sample`] holds point clouds ([`SampleSet`]) and their moment
//!   summaries, and loads them from CSV.
//! * [`transport1d`] solves the one dimensional transport problems that
//!   slicing reduces everything to.
//! * [`slicer`] produces projection directions and the nonlinear feature
//!   maps: monomial lifts, random linear stacks, circular offsets.
//! * [`montecarlo`] averages projected transport costs over many random
//!   directions. It is the reference estimator the fast paths are judged
//!   against.
//! * [`fastapprox`] computes closed-form approximations from first and
//!   second moments alone; no projections are drawn.
//! * [`diagnostics`] estimates the concentration functional that controls
//!   the approximation error and fits error-versus-dimension rates.
//! * [`datagen`] draws reproducible synthetic inputs (Gaussian, Gamma,
//!   AR(1) rows).
//!
//! Everything randomized takes an explicit [`RngHandle`]. Equal handles
//! give bit-identical results, independent of thread count.

pub mod datagen;
pub mod defining;
pub mod diagnostics;
pub mod error;
pub mod fastapprox;
pub mod montecarlo;
pub mod rng;
pub mod sample;
pub mod slicer;
pub mod transport1d;

pub use defining::DefiningFunction;
pub use error::{Error, Result};
pub use rng::RngHandle;
pub use sample::{load_sample_set, CsvOptions, HeaderMode, MomentSummary, SampleSet};
