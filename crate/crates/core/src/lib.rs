//! Instrumental-variables estimation with weak-instrument diagnostics.
//!
//! The pipeline partials covariates out once, then fits 2SLS, the first
//! stage, the reduced form and naive OLS on the partialled data. Strength
//! statistics, robust inference (bootstrap, Anderson-Rubin, tF) and
//! local-to-zero adjustments build on those fits. [`harness`] wires it all
//! into study reports, plots, batch summaries and Monte-Carlo checks.

pub mod data;
pub mod dist;
pub mod error;
pub mod float;
pub mod harness;
pub mod inference;
pub mod iv;
pub mod linalg;
pub mod ltz;
pub mod regression;
pub mod resample;
pub mod strength;

pub use data::{Clusters, Dataset, Role, Roles};
pub use error::{Error, ErrorClass, Result};
pub use iv::{IVModel, Identification};
pub use regression::{FitResult, VCovFlavor, VCovSpec};
