//! Positive-unlabeled (PU) and one-class (OC) learning toolkit.
//!
//! The crate covers the empirical risk estimators used for PU learning,
//! PU-SVM in both its stochastic primal and dual quadratic-program forms,
//! a few baseline scorers, rank statistics, and the two-sample checks
//! that flag unreliable unlabeled data.

pub mod data;
pub mod error;
pub mod math;
pub mod models;
pub mod reliability;
pub mod stats;

pub use error::{PuError, Result};
