//! Shared numerical machinery: stable reductions, special functions,
//! finite differences, adaptive quadrature, and a damped Newton solver.

pub mod diff;
pub mod linalg;
pub mod newton;
pub mod partition;
pub mod quad;
pub mod special;

use crate::error::{Error, Result};

/// Sum after sorting by total order.
///
/// The result depends only on the multiset of terms, so reductions built on
/// this are exactly invariant under permutations of the input.
pub fn stable_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

/// log Σ exp(terms), computed by max-shifting.
///
/// Entries may be `-inf` (they contribute nothing). A single-element input is
/// returned unchanged, with no exp/log round trip.
pub fn log_sum_exp(terms: &[f64]) -> Result<f64> {
    if terms.is_empty() {
        return Err(Error::EmptyInput);
    }
    if terms.len() == 1 {
        return Ok(terms[0]);
    }
    let mut max = f64::NEG_INFINITY;
    for &t in terms {
        if t.is_nan() || t == f64::INFINITY {
            return Err(Error::NonFinite("log_sum_exp input"));
        }
        max = max.max(t);
    }
    if max == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let shifted: Vec<f64> = terms.iter().map(|&t| (t - max).exp()).collect();
    Ok(max + stable_sum(shifted).ln())
}

/// Dot product of two equal-length slices.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
pub(crate) fn l2_norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}
