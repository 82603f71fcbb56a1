//! Brute-force primal maximizer for small moment problems.
//!
//! Runs entirely on the primal side: the feasible polytope
//! {q >= floor, Σ q = 1, Σ q_i t_i = target} is parametrized by an
//! orthonormal basis of the constraint null space, seeded by a grid search
//! and polished by coordinate ascent with golden-section line searches. The
//! objective G(q, base) is strictly concave on the polytope, so coordinate
//! ascent converges to the unique maximizer. No part of the dual solver is
//! involved, which makes this an independent check of it.

use crate::entropy::FiniteDistribution;
use crate::error::{Error, Result};
use crate::maxent::{check_feasibility, MomentProblem};
use crate::numeric::linalg::{orthonormal_rows, project_out, solve_linear};
use crate::numeric::{dot, stable_sum};

/// Probability floor that keeps oracle iterates strictly positive.
const FLOOR: f64 = 1e-9;
const GOLDEN: f64 = 0.618_033_988_749_894_9;
const MAX_SWEEPS: usize = 500;

struct Polytope {
    /// Particular solution of the constraints (minimum norm, may be
    /// infeasible in sign).
    particular: Vec<f64>,
    /// Orthonormal basis of the constraint null space, one direction per row.
    basis: Vec<Vec<f64>>,
}

fn constraint_rows(problem: &MomentProblem) -> (Vec<Vec<f64>>, Vec<f64>) {
    let k = problem.k();
    let d = problem.dim();
    let mut rows = vec![vec![0.0; k]; d + 1];
    for (i, srow) in problem.stats().iter().enumerate() {
        for r in 0..d {
            rows[r][i] = srow[r];
        }
        rows[d][i] = 1.0;
    }
    let mut rhs = problem.target().to_vec();
    rhs.push(1.0);
    (rows, rhs)
}

fn build_polytope(problem: &MomentProblem) -> Result<Polytope> {
    let (rows, rhs) = constraint_rows(problem);
    let k = problem.k();
    let m = rows.len();
    // Minimum-norm particular solution q = A^T (A A^T)^{-1} b.
    let mut gram = vec![vec![0.0; m]; m];
    for r in 0..m {
        for c in 0..m {
            gram[r][c] = dot(&rows[r], &rows[c]);
        }
    }
    let y = solve_linear(&gram, &rhs)?;
    let particular: Vec<f64> = (0..k)
        .map(|i| (0..m).map(|r| y[r] * rows[r][i]).sum())
        .collect();
    let row_basis = orthonormal_rows(&rows);
    // Null-space basis from coordinate vectors with the row space removed.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for i in 0..k {
        let mut v = vec![0.0; k];
        v[i] = 1.0;
        project_out(&mut v, &row_basis);
        project_out(&mut v, &basis);
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-10 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    Ok(Polytope { particular, basis })
}

fn point_of(polytope: &Polytope, alpha: &[f64]) -> Vec<f64> {
    let mut q = polytope.particular.clone();
    for (coef, dir) in alpha.iter().zip(&polytope.basis) {
        for (qi, di) in q.iter_mut().zip(dir) {
            *qi += coef * di;
        }
    }
    q
}

/// G(q, base) = -KL(q || base) in nats, the quantity the maximizer must make
/// largest subject to the constraints.
fn objective(q: &[f64], base_log_probs: &[f64]) -> f64 {
    let terms: Vec<f64> = q
        .iter()
        .zip(base_log_probs)
        .filter(|(&qi, _)| qi > 0.0)
        .map(|(&qi, &lb)| -qi * (qi.ln() - lb))
        .collect();
    stable_sum(terms)
}

/// Feasible interval of the coordinate `axis` around `alpha`, from the
/// linear constraints q_i >= FLOOR.
fn axis_interval(polytope: &Polytope, alpha: &[f64], axis: usize) -> (f64, f64) {
    let q = point_of(polytope, alpha);
    let dir = &polytope.basis[axis];
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (&qi, &di) in q.iter().zip(dir) {
        if di.abs() < 1e-15 {
            continue;
        }
        let bound = (FLOOR - qi) / di;
        if di > 0.0 {
            lo = lo.max(bound);
        } else {
            hi = hi.min(bound);
        }
    }
    (lo, hi)
}

/// Coordinate ascent on min_i q_i(alpha), a concave piecewise-linear
/// function; its maximizer is the most interior point of the polytope. Used
/// to anchor the grid search, since a thin polytope can slip between coarse
/// lattice points.
fn find_interior(polytope: &Polytope) -> Option<Vec<f64>> {
    let m = polytope.basis.len();
    let min_coord = |alpha: &[f64]| -> f64 {
        point_of(polytope, alpha)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    };
    let mut alpha = vec![0.0; m];
    let mut best = min_coord(&alpha);
    for _sweep in 0..200 {
        let mut improved = false;
        for axis in 0..m {
            let line = |t: f64| -> f64 {
                let mut trial = alpha.clone();
                trial[axis] += t;
                min_coord(&trial)
            };
            let step = golden_section_max(line, -3.0, 3.0);
            let candidate = line(step);
            if candidate > best + 1e-15 {
                alpha[axis] += step;
                best = candidate;
                improved = true;
            }
        }
        if best >= 16.0 * FLOOR || !improved {
            break;
        }
    }
    (best > 2.0 * FLOOR).then_some(alpha)
}

fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..120 {
        if hi - lo < 1e-14 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Brute-force maximizer of G(q, base) over the feasible polytope.
///
/// `resolution` is the number of grid points per free axis used to seed the
/// search; the polish step is resolution-independent.
pub fn primal_oracle(problem: &MomentProblem, resolution: usize) -> Result<FiniteDistribution> {
    let k = problem.k();
    let d = problem.dim();
    if k > 6 || d > 2 {
        return Err(Error::OracleScaleExceeded { k, d });
    }
    let feas = check_feasibility(problem);
    if !feas.feasible {
        return Err(Error::Infeasible(format!(
            "oracle requires an interior target; margin estimate {:e}",
            feas.margin
        )));
    }
    let polytope = build_polytope(problem)?;
    let base_log_probs = problem.normalized_log_weights();
    let m = polytope.basis.len();
    if m == 0 {
        // The constraints pin a unique point.
        let q = polytope.particular.clone();
        if q.iter().any(|&qi| qi < 0.0) {
            return Err(Error::Infeasible(
                "unique constrained point has negative coordinates".into(),
            ));
        }
        let total = stable_sum(q.clone());
        return FiniteDistribution::new(
            problem.points().to_vec(),
            q.into_iter().map(|qi| qi / total).collect(),
        );
    }

    let center = find_interior(&polytope).ok_or_else(|| {
        Error::Infeasible("oracle found no strictly interior point of the polytope".into())
    })?;
    // Grid-search the cross section through the interior point: per-axis
    // feasible intervals give the lattice its bounds.
    let res = resolution.max(3);
    let intervals: Vec<(f64, f64)> = (0..m)
        .map(|axis| axis_interval(&polytope, &center, axis))
        .collect();
    let mut best_alpha = center.clone();
    let mut best_val = objective(&point_of(&polytope, &center), &base_log_probs);
    let mut lattice = vec![0usize; m];
    loop {
        let alpha: Vec<f64> = lattice
            .iter()
            .zip(&intervals)
            .zip(&center)
            .map(|((&ix, &(lo, hi)), &c)| c + lo + (hi - lo) * ix as f64 / (res - 1) as f64)
            .collect();
        let q = point_of(&polytope, &alpha);
        if q.iter().all(|&qi| qi >= FLOOR) {
            let val = objective(&q, &base_log_probs);
            if val > best_val {
                best_val = val;
                best_alpha = alpha;
            }
        }
        // Advance the mixed-radix counter.
        let mut axis = 0;
        loop {
            if axis == m {
                break;
            }
            lattice[axis] += 1;
            if lattice[axis] < res {
                break;
            }
            lattice[axis] = 0;
            axis += 1;
        }
        if axis == m {
            break;
        }
    }
    let mut alpha = best_alpha;

    // Coordinate ascent: each line restriction of the strictly concave
    // objective is itself strictly concave, so golden-section suffices.
    for _sweep in 0..MAX_SWEEPS {
        let mut largest_move = 0.0f64;
        for axis in 0..m {
            let (lo, hi) = axis_interval(&polytope, &alpha, axis);
            if !(lo < hi) {
                continue;
            }
            let line = |t: f64| -> f64 {
                let mut trial = alpha.clone();
                trial[axis] += t;
                let q = point_of(&polytope, &trial);
                objective(&q, &base_log_probs)
            };
            let step = golden_section_max(line, lo, hi);
            alpha[axis] += step;
            largest_move = largest_move.max(step.abs());
        }
        if largest_move < 1e-13 {
            break;
        }
    }
    let q = point_of(&polytope, &alpha);
    let total = stable_sum(q.clone());
    FiniteDistribution::new(
        problem.points().to_vec(),
        q.into_iter().map(|qi| qi / total).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::tv_distance;
    use crate::maxent::solve_dual;
    use crate::numeric::linalg::Matrix;
    use crate::numeric::newton::Tolerance;

    fn integer_points(k: usize) -> Vec<f64> {
        (0..k).map(|i| i as f64).collect()
    }

    fn identity_stats(k: usize) -> Matrix {
        (0..k).map(|i| vec![i as f64]).collect()
    }

    #[test]
    fn symmetric_problem_recovers_uniform() {
        let problem = MomentProblem::new(
            integer_points(3),
            vec![0.0; 3],
            identity_stats(3),
            vec![1.0],
        )
        .unwrap();
        let q = primal_oracle(&problem, 41).unwrap();
        let dual = solve_dual(&problem, &Tolerance::default()).unwrap();
        assert!(tv_distance(&q, &dual.dist).unwrap() < 1e-6);
        for &p in q.probs() {
            assert!((p - 1.0 / 3.0).abs() < 1e-6);
        }
    }

    #[test]
    fn asymmetric_target_agrees_with_dual() {
        let problem = MomentProblem::new(
            integer_points(3),
            vec![0.0; 3],
            identity_stats(3),
            vec![0.5],
        )
        .unwrap();
        let q = primal_oracle(&problem, 41).unwrap();
        let dual = solve_dual(&problem, &Tolerance::default()).unwrap();
        assert!(tv_distance(&q, &dual.dist).unwrap() < 1e-6);
    }

    #[test]
    fn two_constraint_round_trip_recovers_the_tilt() {
        // Target the exact moments of a known tilt; the oracle must find that
        // tilt's distribution back.
        let points = integer_points(4);
        let stats: Matrix = (0..4).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let eta = [0.4, -0.3];
        let seed = crate::maxent::tilt(&points, &[0.0; 4], &stats, &eta).unwrap();
        let target: Vec<f64> = (0..2)
            .map(|j| {
                seed.probs()
                    .iter()
                    .zip(&stats)
                    .map(|(&p, row)| p * row[j])
                    .sum()
            })
            .collect();
        let problem = MomentProblem::new(points, vec![0.0; 4], stats, target).unwrap();
        let q = primal_oracle(&problem, 31).unwrap();
        assert!(tv_distance(&q, &seed).unwrap() < 1e-5);
    }

    #[test]
    fn scale_limits_are_enforced() {
        let problem = MomentProblem::new(
            integer_points(9),
            vec![0.0; 9],
            identity_stats(9),
            vec![4.0],
        )
        .unwrap();
        assert!(matches!(
            primal_oracle(&problem, 11),
            Err(Error::OracleScaleExceeded { .. })
        ));
    }
}
