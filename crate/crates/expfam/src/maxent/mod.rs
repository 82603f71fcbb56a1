//! Exponential families on finite supports: exponential tilting of a base
//! weight vector, feasibility analysis of moment targets, and the convex-dual
//! solver for the maximum-entropy moment problem.

mod oracle;
mod verify;

pub use oracle::primal_oracle;
pub use verify::{random_feasible, verify_prop1, verify_prop2, PropReport};

use crate::entropy::FiniteDistribution;
use crate::error::{Error, Result};
use crate::numeric::linalg::{sym_eigenvalues, Matrix};
use crate::numeric::newton::{newton_minimize, NewtonReport, Tolerance};
use crate::numeric::{dot, log_sum_exp, stable_sum};

/// Moment tolerance every accepted solution must meet, in the max norm.
pub const MOMENT_TOL: f64 = 1e-8;

/// A maximum-entropy moment problem: unnormalized base weights (stored as
/// logs), one statistics row per support point, and target expectations.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentProblem {
    points: Vec<f64>,
    log_weights: Vec<f64>,
    stats: Matrix,
    target: Vec<f64>,
}

impl MomentProblem {
    pub fn new(
        points: Vec<f64>,
        log_weights: Vec<f64>,
        stats: Matrix,
        target: Vec<f64>,
    ) -> Result<Self> {
        let k = points.len();
        if k < 2 {
            return Err(Error::Invalid(format!(
                "support: need at least 2 points (got {k})"
            )));
        }
        if log_weights.len() != k {
            return Err(Error::Invalid(format!(
                "log_base_weights: expected length {k} to match support (got {})",
                log_weights.len()
            )));
        }
        if stats.len() != k {
            return Err(Error::Invalid(format!(
                "stats: expected {k} rows to match support (got {})",
                stats.len()
            )));
        }
        let d = target.len();
        if d < 1 {
            return Err(Error::Invalid("target_moments: must be non-empty".into()));
        }
        if d > k - 1 {
            return Err(Error::Invalid(format!(
                "target_moments: dimension {d} must be at most K-1 = {}",
                k - 1
            )));
        }
        if stats.iter().any(|row| row.len() != d) {
            return Err(Error::Invalid(format!(
                "stats: every row must have length {d} to match target_moments"
            )));
        }
        if log_weights.iter().any(|w| !w.is_finite())
            || stats.iter().flatten().any(|v| !v.is_finite())
            || target.iter().any(|v| !v.is_finite())
            || points.iter().any(|v| !v.is_finite())
        {
            return Err(Error::Invalid("all entries must be finite".into()));
        }
        let mut sorted = points.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("support: points must be distinct".into()));
        }
        let problem = Self {
            points,
            log_weights,
            stats,
            target,
        };
        problem.check_minimal_representation()?;
        Ok(problem)
    }

    /// Affine independence of the statistics columns, decided by the singular
    /// values of the column-centered statistics matrix.
    fn check_minimal_representation(&self) -> Result<()> {
        let k = self.k();
        let d = self.dim();
        let mut means = vec![0.0; d];
        for row in &self.stats {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v / k as f64;
            }
        }
        let mut gram = vec![vec![0.0; d]; d];
        for row in &self.stats {
            for i in 0..d {
                for j in 0..d {
                    gram[i][j] += (row[i] - means[i]) * (row[j] - means[j]);
                }
            }
        }
        let eigs = sym_eigenvalues(&gram)?;
        let s_max = eigs.last().copied().unwrap_or(0.0).max(0.0).sqrt();
        let s_min = eigs.first().copied().unwrap_or(0.0).max(0.0).sqrt();
        if s_max == 0.0 || s_min < 1e-10 * s_max {
            return Err(Error::Invalid(
                "stats: columns are affinely dependent; the representation is not minimal".into(),
            ));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.target.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn stats(&self) -> &Matrix {
        &self.stats
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    /// Log-weights shifted to sum to one after exponentiation.
    pub fn normalized_log_weights(&self) -> Vec<f64> {
        let lse = log_sum_exp(&self.log_weights).expect("non-empty by construction");
        self.log_weights.iter().map(|w| w - lse).collect()
    }

    /// The normalized base distribution b = h / z(0).
    pub fn base_distribution(&self) -> FiniteDistribution {
        let lw = self.normalized_log_weights();
        let probs: Vec<f64> = lw.iter().map(|w| w.exp()).collect();
        let total = stable_sum(probs.clone());
        FiniteDistribution::new(
            self.points.clone(),
            probs.into_iter().map(|p| p / total).collect(),
        )
        .expect("normalized weights form a distribution")
    }

    /// Tilt this problem's base by `eta`.
    pub fn tilt(&self, eta: &[f64]) -> Result<FiniteDistribution> {
        tilt(&self.points, &self.log_weights, &self.stats, eta)
    }

    /// Expectations of the statistics under `dist`.
    pub fn moments_of(&self, dist: &FiniteDistribution) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|j| {
                stable_sum(
                    dist.probs()
                        .iter()
                        .zip(&self.stats)
                        .map(|(&p, row)| p * row[j])
                        .collect(),
                )
            })
            .collect()
    }

    /// True when every base log-weight is identical (a uniform base).
    pub fn has_uniform_base(&self) -> bool {
        let first = self.log_weights[0];
        self.log_weights.iter().all(|&w| (w - first).abs() <= 1e-12)
    }
}

/// Exponentially tilt unnormalized base weights along the statistics:
/// p_i proportional to h_i exp(<eta, t_i>).
pub fn tilt(
    points: &[f64],
    log_weights: &[f64],
    stats: &Matrix,
    eta: &[f64],
) -> Result<FiniteDistribution> {
    let k = points.len();
    if log_weights.len() != k || stats.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "tilt: {k} points, {} log-weights, {} stats rows",
            log_weights.len(),
            stats.len()
        )));
    }
    if stats.iter().any(|row| row.len() != eta.len()) {
        return Err(Error::DimensionMismatch(format!(
            "tilt: eta has dimension {}, stats rows disagree",
            eta.len()
        )));
    }
    let logits: Vec<f64> = log_weights
        .iter()
        .zip(stats)
        .map(|(&lw, row)| lw + dot(eta, row))
        .collect();
    let log_z = log_sum_exp(&logits)?;
    let raw: Vec<f64> = logits.iter().map(|&l| (l - log_z).exp()).collect();
    let total = stable_sum(raw.clone());
    FiniteDistribution::new(
        points.to_vec(),
        raw.into_iter().map(|p| p / total).collect(),
    )
}

/// Feasibility of a moment target with respect to the statistics hull.
#[derive(Debug, Clone, Copy)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// Signed estimate of the distance from the target to the hull boundary;
    /// positive inside, negative outside. Exact for d <= 2.
    pub margin: f64,
}

/// Decide whether the target lies strictly inside the convex hull of the
/// statistics rows.
///
/// In one dimension this is the exact min/max interval test. In higher
/// dimensions the margin is the minimum support-function gap over a direction
/// set (every pairwise edge normal for d = 2, which is exact there; a seeded
/// random direction sample for d > 2), and an interior point is additionally
/// required from a small convex program: the dual of maximizing Σ log q_i
/// subject to the moment constraints, a log-barrier objective minimized with
/// the same Newton machinery as the main solver.
pub fn check_feasibility(problem: &MomentProblem) -> FeasibilityReport {
    let d = problem.dim();
    let margin = if d == 1 {
        let lo = problem
            .stats
            .iter()
            .map(|r| r[0])
            .fold(f64::INFINITY, f64::min);
        let hi = problem
            .stats
            .iter()
            .map(|r| r[0])
            .fold(f64::NEG_INFINITY, f64::max);
        let mu = problem.target[0];
        (mu - lo).min(hi - mu)
    } else {
        hull_margin(&problem.stats, &problem.target)
    };
    let feasible = margin > 0.0 && (d == 1 || analytic_center_interior(problem));
    FeasibilityReport { feasible, margin }
}

/// Minimum over candidate directions v of max_i <v, t_i> - <v, target>.
fn hull_margin(stats: &Matrix, target: &[f64]) -> f64 {
    let d = target.len();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for axis in 0..d {
        let mut v = vec![0.0; d];
        v[axis] = 1.0;
        dirs.push(v.clone());
        v[axis] = -1.0;
        dirs.push(v);
    }
    if d == 2 {
        // Normals of every pairwise edge; the hull boundary's normals are
        // among them, which makes the margin exact in the plane.
        for i in 0..stats.len() {
            for j in (i + 1)..stats.len() {
                let ex = stats[j][0] - stats[i][0];
                let ey = stats[j][1] - stats[i][1];
                let norm = (ex * ex + ey * ey).sqrt();
                if norm < 1e-14 {
                    continue;
                }
                dirs.push(vec![-ey / norm, ex / norm]);
                dirs.push(vec![ey / norm, -ex / norm]);
            }
        }
    } else {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xFEA5_1B1E);
        for _ in 0..2048 {
            let mut v: Vec<f64> = (0..d)
                .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                .collect();
            let norm = dot(&v, &v).sqrt();
            if norm < 1e-9 {
                continue;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            dirs.push(v);
        }
    }
    let mut margin = f64::INFINITY;
    for v in &dirs {
        let support = stats
            .iter()
            .map(|row| dot(v, row))
            .fold(f64::NEG_INFINITY, f64::max);
        margin = margin.min(support - dot(v, target));
    }
    margin
}

/// Interior feasibility via the analytic-center dual: minimize over nu the
/// convex barrier -Σ log((A^T nu)_i) + <nu, b> with A the constraint matrix
/// (statistics plus normalization) and b the target stacked with 1. A finite
/// minimizer recovers q_i = 1 / (A^T nu)_i > 0 with A q = b.
fn analytic_center_interior(problem: &MomentProblem) -> bool {
    let k = problem.k();
    let d = problem.dim();
    let rows = d + 1;
    // a[r][i]: constraint r evaluated at support point i.
    let mut a = vec![vec![0.0; k]; rows];
    for (i, row) in problem.stats.iter().enumerate() {
        for r in 0..d {
            a[r][i] = row[r];
        }
        a[d][i] = 1.0;
    }
    let mut b = problem.target.to_vec();
    b.push(1.0);

    let slack = |nu: &[f64]| -> Vec<f64> {
        (0..k)
            .map(|i| (0..rows).map(|r| nu[r] * a[r][i]).sum())
            .collect()
    };
    let f = |nu: &[f64]| -> f64 {
        let s = slack(nu);
        if s.iter().any(|&si| si <= 0.0) {
            return f64::INFINITY;
        }
        -s.iter().map(|si| si.ln()).sum::<f64>() + dot(nu, &b)
    };
    let grad = |nu: &[f64]| -> Vec<f64> {
        let s = slack(nu);
        let q: Vec<f64> = s.iter().map(|si| 1.0 / si).collect();
        (0..rows).map(|r| b[r] - dot(&a[r], &q)).collect()
    };
    let hess = |nu: &[f64]| -> Matrix {
        let s = slack(nu);
        let q2: Vec<f64> = s.iter().map(|si| 1.0 / (si * si)).collect();
        let mut h = vec![vec![0.0; rows]; rows];
        for r in 0..rows {
            for c in r..rows {
                let v: f64 = (0..k).map(|i| a[r][i] * q2[i] * a[c][i]).sum();
                h[r][c] = v;
                h[c][r] = v;
            }
        }
        h
    };
    let mut nu0 = vec![0.0; rows];
    nu0[d] = 1.0;
    let tol = Tolerance {
        abs_tol: 1e-8,
        rel_tol: 0.0,
        max_iter: 200,
    };
    match newton_minimize(f, grad, hess, &nu0, &tol) {
        Ok(report) if report.converged => {
            let s = slack(&report.solution);
            s.iter().all(|&si| si.is_finite() && si > 0.0)
        }
        _ => false,
    }
}

/// A solved moment problem: the canonical parameters, the tilted
/// distribution, and the minimized dual value a(eta) - <eta, target> with the
/// base normalized.
#[derive(Debug, Clone)]
pub struct MaxEntSolution {
    pub eta: Vec<f64>,
    pub dist: FiniteDistribution,
    pub dual_value: f64,
    pub report: NewtonReport,
}

/// Solve the moment problem through its convex dual.
///
/// The dual objective a(eta) - <eta, target> is globally convex, so the
/// iteration always starts from eta = 0 (which makes the untilted base the
/// zeroth iterate). Gradient and Hessian are exact: the tilted mean minus the
/// target, and the tilted covariance of the statistics.
pub fn solve_dual(problem: &MomentProblem, tol: &Tolerance) -> Result<MaxEntSolution> {
    tol.validate()?;
    let feas = check_feasibility(problem);
    if !feas.feasible {
        return Err(Error::Infeasible(format!(
            "target lies outside (or on the boundary of) the statistics hull; margin estimate {:e}",
            feas.margin
        )));
    }
    let lw = problem.normalized_log_weights();
    let stats = &problem.stats;
    let target = &problem.target;
    let d = problem.dim();

    let logits = |eta: &[f64]| -> Vec<f64> {
        lw.iter()
            .zip(stats)
            .map(|(&w, row)| w + dot(eta, row))
            .collect()
    };
    let log_partition =
        |eta: &[f64]| -> f64 { log_sum_exp(&logits(eta)).expect("non-empty logits") };
    let tilted_probs = |eta: &[f64]| -> Vec<f64> {
        let l = logits(eta);
        let z = log_sum_exp(&l).expect("non-empty logits");
        l.iter().map(|&v| (v - z).exp()).collect()
    };
    let mean_of = |p: &[f64]| -> Vec<f64> {
        (0..d)
            .map(|j| stable_sum(p.iter().zip(stats).map(|(&pi, row)| pi * row[j]).collect()))
            .collect()
    };

    let f = |eta: &[f64]| log_partition(eta) - dot(eta, target);
    let grad = |eta: &[f64]| -> Vec<f64> {
        let p = tilted_probs(eta);
        let mean = mean_of(&p);
        mean.iter().zip(target).map(|(m, t)| m - t).collect()
    };
    let hess = |eta: &[f64]| -> Matrix {
        let p = tilted_probs(eta);
        let mean = mean_of(&p);
        let mut h = vec![vec![0.0; d]; d];
        for r in 0..d {
            for c in r..d {
                let v = stable_sum(
                    p.iter()
                        .zip(stats)
                        .map(|(&pi, row)| pi * (row[r] - mean[r]) * (row[c] - mean[c]))
                        .collect(),
                );
                h[r][c] = v;
                h[c][r] = v;
            }
        }
        h
    };

    let report = newton_minimize(f, grad, hess, &vec![0.0; d], tol)?;
    if !report.converged {
        return Err(Error::NotConverged(report));
    }
    let eta = report.solution.clone();
    let dist = problem.tilt(&eta)?;
    let achieved = problem.moments_of(&dist);
    let worst = achieved
        .iter()
        .zip(target)
        .map(|(a, t)| (a - t).abs())
        .fold(0.0f64, f64::max);
    if worst > MOMENT_TOL.max(tol.abs_tol) {
        return Err(Error::InvariantViolation(format!(
            "converged solution misses the target moments by {worst:e}"
        )));
    }
    let dual_value = f(&eta);
    Ok(MaxEntSolution {
        eta,
        dist,
        dual_value,
        report,
    })
}
