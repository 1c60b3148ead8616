//! Finite-horizon constrained MDPs whose actions modulate transition
//! probabilities inside per-state polytopes.
//!
//! Solution methods: the occupancy-measure LP ([`occupancy`]), the
//! extreme-point reduction ([`vertex`]) and the concave envelope for convex
//! rewards ([`envelope`]). [`evaluator`] scores any policy independently,
//! and [`loan`] generates the synthetic loan-delinquency benchmark.

// `!(x > 0.0)` style checks are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod envelope;
pub mod error;
pub mod evaluator;
pub mod extended;
pub mod io;
pub mod loan;
pub mod lp;
pub mod manifest;
pub mod model;
pub mod occupancy;
pub mod solve;
pub mod vertex;

pub use error::{Error, Result};
