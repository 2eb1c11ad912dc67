//! Exact and Monte Carlo Lebesgue-measure experiments for unions of closed
//! balls, greedy disjoint covers, and badly approximable points.
//!
//! The library is organised around five subsystems:
//!
//! - [`geometry`]: exact-rational points, closed balls, cubes, boxes and
//!   canonical 1-D interval unions. All predicates are decided exactly.
//! - [`vitali`]: greedy disjoint-subfamily selection with verified
//!   `3r`-enlargement covers, plus both scaled-union measure bounds — the
//!   exact one-dimensional ratio and the `(delta/3)^d` certificate.
//! - [`systems`]: indexed ball systems (the rational-approximation lattice
//!   family, the constant-radius integer-lattice counterexample, explicit
//!   finite families), shrinking-locally diagnostics, hit counting and
//!   tail-survival semi-decisions.
//! - [`diophantine`]: continued fractions with exact quadratic-surd state,
//!   convergents, pigeonhole approximation search and bounded-quotient
//!   evidence reports.
//! - [`measure`]: seeded Monte Carlo volume estimates with Hoeffding
//!   confidence half-widths, exact 1-D coverage fractions, survivor-grid
//!   sweeps and the local density experiment.
//!
//! The `examples/` directory contains one runnable program per capability;
//! `src/main.rs` is a thin command-line front end over the same operations.

pub mod cli;
pub mod diophantine;
pub mod error;
pub mod geometry;
pub mod measure;
pub mod systems;
pub mod vitali;

pub use error::{Error, Result};
