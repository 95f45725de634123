//! Signed iterative random forests.
//!
//! This crate trains importance-reweighted random forests, encodes decision
//! paths as signed feature sets, mines prevalent signed interactions with a
//! randomized intersection search, scores them with stability and precision
//! metrics, filters them over an outer bootstrap layer, and ships a Gaussian
//! simulation benchmark for end-to-end evaluation.

pub mod data;
pub mod error;
pub mod forest;
pub mod interactions;
pub mod irf;
pub mod metrics;
pub mod rng;
pub mod rulepred;
pub mod simbench;
pub mod stability;

pub use error::{Error, Result};
