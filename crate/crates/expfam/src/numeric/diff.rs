//! Central finite differences for gradients and Hessians.
//!
//! Step sizes follow the usual machine-epsilon scaling: eps^(1/3) per
//! coordinate for first derivatives and eps^(1/4) for second derivatives,
//! both relative to max(|x_i|, 1).

use crate::error::{Error, Result};

fn grad_step(xi: f64) -> f64 {
    xi.abs().max(1.0) * f64::EPSILON.powf(1.0 / 3.0)
}

fn hess_step(xi: f64) -> f64 {
    xi.abs().max(1.0) * f64::EPSILON.powf(0.25)
}

fn probe<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("finite-difference probe"))
    }
}

/// Central-difference gradient of `f` at `x`.
pub fn fd_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    let mut grad = vec![0.0; n];
    let mut xp = x.to_vec();
    for i in 0..n {
        let h = grad_step(x[i]);
        // Recompute the realized step so the divisor matches the probes.
        let hi = (x[i] + h) - x[i];
        xp[i] = x[i] + h;
        let fp = probe(&f, &xp)?;
        xp[i] = x[i] - h;
        let fm = probe(&f, &xp)?;
        xp[i] = x[i];
        grad[i] = (fp - fm) / (2.0 * hi);
    }
    Ok(grad)
}

/// Central-difference Hessian of `f` at `x`, symmetrized.
pub fn fd_hessian<F: Fn(&[f64]) -> f64>(f: F, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = x.len();
    let f0 = probe(&f, x)?;
    let steps: Vec<f64> = x.iter().map(|&xi| hess_step(xi)).collect();
    let mut hess = vec![vec![0.0; n]; n];
    let mut xp = x.to_vec();
    for i in 0..n {
        let hi = steps[i];
        xp[i] = x[i] + hi;
        let fp = probe(&f, &xp)?;
        xp[i] = x[i] - hi;
        let fm = probe(&f, &xp)?;
        xp[i] = x[i];
        hess[i][i] = (fp - 2.0 * f0 + fm) / (hi * hi);
        for j in (i + 1)..n {
            let hj = steps[j];
            let mut eval = |si: f64, sj: f64| -> Result<f64> {
                xp[i] = x[i] + si * hi;
                xp[j] = x[j] + sj * hj;
                let v = probe(&f, &xp);
                xp[i] = x[i];
                xp[j] = x[j];
                v
            };
            let fpp = eval(1.0, 1.0)?;
            let fpm = eval(1.0, -1.0)?;
            let fmp = eval(-1.0, 1.0)?;
            let fmm = eval(-1.0, -1.0)?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    Ok(hess)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::dot;

    #[test]
    fn gradient_of_linear_map_is_its_coefficients() {
        let c = [2.0, -3.0, 0.5];
        let f = |x: &[f64]| dot(&c, x);
        let g = fd_gradient(f, &[0.3, -1.2, 4.0]).unwrap();
        for (gi, ci) in g.iter().zip(c.iter()) {
            assert!((gi - ci).abs() < 1e-9, "{gi} vs {ci}");
        }
    }

    #[test]
    fn hessian_of_half_norm_squared_is_identity() {
        let f = |x: &[f64]| 0.5 * dot(x, x);
        let h = fd_hessian(f, &[1.0, -2.0]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((h[i][j] - expected).abs() < 1e-5, "h[{i}][{j}]={}", h[i][j]);
            }
        }
    }

    #[test]
    fn gradient_rejects_nonfinite_probes() {
        let f = |x: &[f64]| x[0].ln();
        assert!(matches!(fd_gradient(f, &[0.0]), Err(Error::NonFinite(_))));
    }
}
