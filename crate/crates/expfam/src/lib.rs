//! Exponential families on closed forms and finite supports.
//!
//! The crate has three layers:
//!
//! - a catalog of five univariate exponential families (binomial, Poisson,
//!   normal, gamma, square-root gamma) with closed-form partition functions,
//!   cumulants, and parameter maps, cross-validated against shared numerics
//!   (quadrature, truncated summation, finite differences);
//! - entropy machinery on finite distributions: entropy, risk, entropy
//!   relative to a prior measure, KL divergence, counting identities, and
//!   concavity witnesses;
//! - a maximum-entropy solver that tilts an arbitrary base over a finite
//!   support to match moment targets through the convex dual, along with a
//!   brute-force primal oracle and randomized optimality verification.
//!
//! Change-of-variables support (Jacobian-corrected densities, closure
//! detection, invariance demonstrations) connects the catalog to the entropy
//! layer. The `expfam` binary exposes evaluation, parameter conversion,
//! solving, and the verification suites; see the crate README.
//!
//! With the default `parallel` feature, verification trials fan out over a
//! rayon pool. Per-trial seeds derive from the master seed alone, so parallel
//! and sequential runs produce byte-identical reports.

#![forbid(unsafe_code)]
// Negated comparisons like `!(x > 0.0)` are deliberate: they reject NaN along
// with the out-of-range values, which `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops over small dense matrices read better than iterator chains.
#![allow(clippy::needless_range_loop)]

pub mod documents;
pub mod entropy;
mod error;
pub mod families;
pub mod maxent;
pub mod numeric;
pub mod par;
pub mod suites;
pub mod transforms;

pub use error::{Error, Result};
pub use numeric::newton::{NewtonReport, Tolerance};
