//! Damped Newton minimization for smooth convex objectives.

use crate::error::{Error, Result};
use crate::numeric::linalg::{solve_linear_with_cond, Matrix};
use crate::numeric::{dot, l2_norm};

const ARMIJO_C: f64 = 1e-4;
const CONDITION_LIMIT: f64 = 1e12;
const MIN_STEP: f64 = 1e-18;

/// Convergence thresholds shared by the iterative routines.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_iter: 200,
        }
    }
}

impl Tolerance {
    pub fn validate(&self) -> Result<()> {
        if self.abs_tol < 0.0 || self.rel_tol < 0.0 {
            return Err(Error::Domain(
                "tolerance: abs_tol and rel_tol must be >= 0".into(),
            ));
        }
        if self.abs_tol == 0.0 && self.rel_tol == 0.0 {
            return Err(Error::Domain(
                "tolerance: at least one of abs_tol, rel_tol must be > 0".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::Domain("tolerance: max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

/// Outcome of a Newton run. `converged` implies
/// `final_grad_norm <= abs_tol`.
#[derive(Debug, Clone)]
pub struct NewtonReport {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub final_grad_norm: f64,
    pub converged: bool,
}

/// Minimize a convex, twice-differentiable objective by damped Newton steps
/// with a backtracking (halving) Armijo line search.
///
/// Objective values that come back non-finite during the line search are
/// treated as +inf, which rejects the step; this keeps iterates inside open
/// domains. A near-singular Newton system (condition estimate above 1e12)
/// falls back to a plain gradient step; an exactly singular system is an
/// error.
pub fn newton_minimize<F, G, H>(
    f: F,
    grad: G,
    hess: H,
    x0: &[f64],
    tol: &Tolerance,
) -> Result<NewtonReport>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
    H: Fn(&[f64]) -> Matrix,
{
    tol.validate()?;
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    if !fx.is_finite() {
        return Err(Error::NonFinite("newton_minimize: objective at start"));
    }
    let mut iterations = 0;
    let mut grad_norm = f64::INFINITY;
    for iter in 0..=tol.max_iter {
        let g = grad(&x);
        grad_norm = l2_norm(&g);
        if !grad_norm.is_finite() {
            return Err(Error::NonFinite("newton_minimize: gradient"));
        }
        iterations = iter;
        if grad_norm <= tol.abs_tol {
            return Ok(NewtonReport {
                solution: x,
                iterations,
                final_grad_norm: grad_norm,
                converged: true,
            });
        }
        if iter == tol.max_iter {
            break;
        }
        let h = hess(&x);
        let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
        let (mut dir, cond) = solve_linear_with_cond(&h, &neg_g)?;
        let ill_conditioned =
            !cond.is_finite() || cond > CONDITION_LIMIT || dir.iter().any(|d| !d.is_finite());
        if ill_conditioned || dot(&g, &dir) >= 0.0 {
            // Descent in the raw gradient direction, scaled to unit length.
            dir = g.iter().map(|v| -v / grad_norm).collect();
        }
        let slope = dot(&g, &dir);
        let mut step = 1.0;
        let mut accepted = false;
        while step >= MIN_STEP {
            let xt: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + step * di).collect();
            let ft = f(&xt);
            if ft.is_finite() && ft <= fx + ARMIJO_C * step * slope {
                if ft < fx {
                    x = xt;
                    fx = ft;
                    accepted = true;
                    break;
                }
                // The objective can no longer decrease at floating-point
                // resolution (ft == fx up to rounding); convergence is
                // measured by the gradient, so let the gradient decide.
                let gt_norm = l2_norm(&grad(&xt));
                if gt_norm.is_finite() && gt_norm < grad_norm {
                    x = xt;
                    fx = ft;
                    accepted = true;
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // Even the sufficient-decrease test is beyond resolution; the
            // full step is still right if it shrinks the gradient, which is
            // exactly the quadratic-convergence end game.
            let xt: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + di).collect();
            let ft = f(&xt);
            let gt_norm = l2_norm(&grad(&xt));
            if ft.is_finite() && gt_norm.is_finite() && gt_norm < 0.9 * grad_norm {
                x = xt;
                fx = ft;
                continue;
            }
            // Genuinely stalled; report the best point found.
            break;
        }
    }
    Ok(NewtonReport {
        solution: x,
        iterations,
        final_grad_norm: grad_norm,
        converged: false,
    })
}
