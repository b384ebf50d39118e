#![no_std]

//! Optimal Parseval frames for probabilistic erasure channels.
//!
//! Each of the `m` transmission channels loses its coefficient independently
//! with probability `p_i`. This crate computes the squared-norm profile that
//! minimizes the worst probability-weighted single-erasure error, builds a
//! Parseval frame realizing that profile, and evaluates erasure errors both
//! exactly (by enumeration) and by seeded Monte Carlo. It also compares the
//! resulting frames against the equal-norm and transformed-weight profiles.
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the
//! command-line front end live in the companion `parseval-erasure-cli` crate.
//!
//! Channel convention: every function that pairs a [`Frame`] with an
//! [`ErasureDistribution`] treats row `i` of the frame as channel `i` of
//! [`ErasureDistribution::probs`], which is sorted ascending.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod comparison;
mod error;
pub mod frame;
pub mod metrics;
pub mod probability;
pub mod simulation;
pub mod spectral;

pub use comparison::{compare_models, ComparisonReport};
pub use error::{Error, Result};
pub use frame::{Frame, ParsevalCertificate};
pub use metrics::{ErasurePattern, ErasureReport};
pub use probability::{rpm_design, ErasureDistribution, RpmDesign, TildeWeights};
pub use simulation::{monte_carlo_error, MonteCarloEstimate};
pub use spectral::{Matrix, SymmetricMatrix};
