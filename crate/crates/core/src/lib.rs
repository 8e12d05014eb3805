//! Geometry of learned representations.
//!
//! This crate measures the local intrinsic dimension of point clouds
//! (nearest-neighbor likelihood, method-of-moments, and distance-ratio
//! estimators, plus the correlation dimension), fits cross-validated ridge
//! encoding pipelines between representation spaces, normalizes scores by
//! trial-noise ceilings, and generates the synthetic data used to validate
//! all of the above.
//!
//! Everything is deterministic: every operation that draws random numbers
//! takes an explicit seed, and repeated runs produce bit-identical output
//! regardless of thread count.

pub mod alignment;
pub mod dimension;
pub mod error;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod neighbors;
pub mod noise_ceiling;
pub mod seed;
pub mod stats;
pub mod synthetic;
mod util;

pub use error::{Error, Result};
pub use matrix::Matrix;
