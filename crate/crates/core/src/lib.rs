//! Sum-least-percentile rate maximization via power control.
//!
//! The crate is organized bottom-up:
//!
//! - [`percentile`]: the sum-least / sum-greatest percentile utilities.
//! - [`network`]: interference networks, parallel channels and the cellular drop.
//! - [`solver`]: concave maximization (supergradient ascent, barrier Newton, water-filling).
//! - [`fractional`]: quadratic and logarithmic fractional-transform MM algorithms,
//!   parallel-channel solvers, baselines and convergence diagnostics.
//! - [`hardness`]: reduction instances from maximum independent set with a brute-force oracle.
//! - [`bench`]: configuration, seeded experiments, plot data and verification suites.

pub mod bench;
pub mod error;
pub mod percentile;
pub mod network;
pub mod solver;
pub mod fractional;
pub mod hardness;

pub use error::{Error, Result};
