//! Zeroth-order stochastic convex optimization via randomized smoothing.
//!
//! The crate builds gradient-free methods from a noisy value oracle using two
//! smoothing schemes (directions uniform on the l1 or l2 unit sphere), exposes
//! the closed-form constants attached to the estimators (second-moment bounds,
//! smoothing bias, admissible noise thresholds), and verifies those properties
//! empirically with seeded Monte Carlo checks.
//!
//! Monte Carlo loops, batched estimates and sweep cells run data-parallel
//! under the default `parallel` feature and fall back to sequential execution
//! without it; results are bit-identical either way for a fixed seed.

// Guards are written as `!(x > 0.0)` on purpose: the negation also rejects
// NaN, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod estimators;
pub mod exec;
pub mod harness;
pub mod optimizer;
pub mod oracle;
pub mod plot;
pub mod problems;
pub mod report;
pub mod rng;
pub mod sampling;
pub mod stats;
pub mod vector;
pub mod verify;

pub use error::{Error, Result};
