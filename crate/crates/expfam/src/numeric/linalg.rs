//! Small dense linear algebra: the systems solved here are at most a dozen
//! rows, so plain Gaussian elimination and cyclic Jacobi are entirely adequate.

use crate::error::{Error, Result};
use crate::numeric::dot;

pub type Matrix = Vec<Vec<f64>>;

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
///
/// Returns the solution together with a crude condition estimate
/// (max |pivot| / min |pivot|).
pub fn solve_linear_with_cond(a: &Matrix, b: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "solve_linear: matrix must be {n}x{n} to match rhs"
        )));
    }
    let mut m: Matrix = a.clone();
    let mut rhs = b.to_vec();
    let mut max_pivot = 0.0f64;
    let mut min_pivot = f64::INFINITY;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        let pivot = m[pivot_row][col];
        if !pivot.is_finite() || pivot.abs() < 1e-300 {
            return Err(Error::SingularHessian);
        }
        m.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        max_pivot = max_pivot.max(pivot.abs());
        min_pivot = min_pivot.min(pivot.abs());
        for row in (col + 1)..n {
            let factor = m[row][col] / m[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                m[row][k] -= factor * m[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in (row + 1)..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
        if !x[row].is_finite() {
            return Err(Error::SingularHessian);
        }
    }
    Ok((x, max_pivot / min_pivot))
}

pub fn solve_linear(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    solve_linear_with_cond(a, b).map(|(x, _)| x)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn sym_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch(
            "sym_eigenvalues: matrix must be square".into(),
        ));
    }
    if n == 0 {
        return Ok(vec![]);
    }
    let mut m = a.clone();
    // Symmetrize defensively; callers pass symmetric data.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    let frob: f64 = m
        .iter()
        .flat_map(|row| row.iter().map(|x| x * x))
        .sum::<f64>()
        .sqrt();
    let tol = (frob * 1e-14).max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() <= tol / (n as f64) {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    eigs.sort_by(f64::total_cmp);
    Ok(eigs)
}

/// Orthonormal basis of the row space of `rows` (modified Gram-Schmidt with a
/// second orthogonalization pass). Rows that collapse below `1e-12` of their
/// original norm are dropped.
pub fn orthonormal_rows(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    for row in rows {
        let original_norm = dot(row, row).sqrt();
        if original_norm == 0.0 {
            continue;
        }
        let mut v = row.clone();
        for _pass in 0..2 {
            for b in &basis {
                let coef = dot(&v, b);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= coef * bi;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-12 * original_norm.max(1.0) {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            basis.push(v);
        }
    }
    basis
}

/// Remove from `v` its components along an orthonormal basis (two passes).
pub fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for _pass in 0..2 {
        for b in basis {
            let coef = dot(v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= coef * bi;
            }
        }
    }
}

/// Least-squares fit `design * coef ~ y` via the normal equations.
///
/// Returns the coefficients and the per-row residuals `y - design * coef`.
pub fn least_squares(design: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let rows = design.len();
    if rows == 0 || rows != y.len() {
        return Err(Error::DimensionMismatch(
            "least_squares: design rows must match responses".into(),
        ));
    }
    let cols = design[0].len();
    if design.iter().any(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch(
            "least_squares: ragged design matrix".into(),
        ));
    }
    let mut gram = vec![vec![0.0; cols]; cols];
    let mut rhs = vec![0.0; cols];
    for (row, &yi) in design.iter().zip(y) {
        for i in 0..cols {
            rhs[i] += row[i] * yi;
            for j in 0..cols {
                gram[i][j] += row[i] * row[j];
            }
        }
    }
    let coef = solve_linear(&gram, &rhs)?;
    let residuals = design
        .iter()
        .zip(y)
        .map(|(row, &yi)| yi - dot(row, &coef))
        .collect();
    Ok((coef, residuals))
}
