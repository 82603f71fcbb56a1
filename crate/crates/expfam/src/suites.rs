//! Seeded verification suites, shared between the CLI `verify` command and
//! the acceptance tests. Every suite is byte-deterministic for a given
//! (seed, trials): per-trial randomness derives from the master seed alone
//! and results are reduced in trial order, so parallel and sequential
//! execution print identical reports.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::documents::ProblemDocument;
use crate::entropy::{
    concavity_witness, cross_entropy, entropy, entropy_rate_gap, g_rate_gap, kl_divergence,
    tv_distance, CountVector, EntropyUnits, FiniteDistribution, EQUALITY_TV,
};
use crate::error::{Error, Result};
use crate::families::{CanonicalParams, ClosedFormFamily, StandardParams};
use crate::maxent::{
    check_feasibility, primal_oracle, solve_dual, tilt, verify_prop1, verify_prop2, MomentProblem,
};
use crate::numeric::diff::{fd_gradient, fd_hessian};
use crate::numeric::linalg::{sym_eigenvalues, Matrix};
use crate::numeric::newton::Tolerance;
use crate::numeric::partition::numeric_log_partition;
use crate::par;
use crate::transforms::{
    check_efu_closure, demo_g_invariance, demo_h_noninvariance, gamma_sqrt_consistency, MonotoneMap,
};

/// A completed suite: its name and the report lines to print, in order.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: String,
    pub lines: Vec<String>,
}

#[derive(Serialize)]
struct Counterexample {
    suite: String,
    detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    problem: Option<ProblemDocument>,
}

fn violation(suite: &str, problem: Option<&MomentProblem>, detail: String) -> Error {
    let doc = Counterexample {
        suite: suite.to_string(),
        detail,
        problem: problem.map(ProblemDocument::from_problem),
    };
    Error::InvariantViolation(
        serde_json::to_string_pretty(&doc).unwrap_or_else(|_| doc.detail.clone()),
    )
}

/// Dispatch a named suite. Unknown names are malformed input.
pub fn run_suite(name: &str, seed: u64, trials: Option<usize>) -> Result<SuiteReport> {
    match name {
        "prop1" => run_prop_suite(false, seed, trials.unwrap_or(1000)),
        "prop2" => run_prop_suite(true, seed, trials.unwrap_or(1000)),
        "concavity" => run_concavity_suite(seed, trials.unwrap_or(1000)),
        "combinatorial" => run_combinatorial_suite(),
        "table2" => run_table2_suite(),
        "transforms" => run_transforms_suite(seed, trials.unwrap_or(500)),
        other => Err(Error::Invalid(format!(
            "suite: unknown name {other:?} (expected prop1, prop2, concavity, combinatorial, table2, transforms)"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Closed-form cross-validation grid
// ---------------------------------------------------------------------------

/// The standard (family, eta) grid used by the cross-validation checks.
pub fn reference_grid() -> Vec<(ClosedFormFamily, CanonicalParams)> {
    let binom = ClosedFormFamily::binomial(10).expect("n = 10 is valid");
    let mut grid: Vec<(ClosedFormFamily, CanonicalParams)> = Vec::new();
    for eta in [-1.0, 0.0, 0.7] {
        grid.push((binom.clone(), CanonicalParams::from(eta)));
    }
    for eta in [-0.5, 0.0, std::f64::consts::LN_2] {
        grid.push((ClosedFormFamily::poisson(), CanonicalParams::from(eta)));
    }
    for eta in [(0.0, -0.5), (1.0, -0.25), (-0.5, -1.0)] {
        grid.push((ClosedFormFamily::normal(), CanonicalParams::from(eta)));
    }
    for eta in [(-1.0 / 3.0, 1.0), (-1.0, 0.5), (-0.5, 0.0), (-0.5, -0.5)] {
        grid.push((ClosedFormFamily::gamma(), CanonicalParams::from(eta)));
    }
    for eta in [(-1.0 / 3.0, 3.0), (-1.0, 0.5), (-0.5, 0.0)] {
        grid.push((ClosedFormFamily::sqrt_gamma(), CanonicalParams::from(eta)));
    }
    grid
}

/// One grid point of the closed-form cross-validation.
#[derive(Debug, Clone)]
pub struct Table2Row {
    pub family: String,
    pub eta: Vec<f64>,
    pub a_closed: f64,
    pub a_numeric: f64,
    pub a_abs_err: f64,
    pub mu_closed: Vec<f64>,
    pub mu_fd: Vec<f64>,
    /// Largest relative deviation between closed-form and finite-difference
    /// means.
    pub mu_rel_err: f64,
    /// Largest scaled deviation between the variance matrix and the
    /// finite-difference Hessian of the log-partition.
    pub var_rel_err: f64,
    /// Smallest eigenvalue of the variance matrix.
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone)]
pub struct Table2Report {
    pub rows: Vec<Table2Row>,
    pub max_a_err: f64,
    pub max_mu_rel_err: f64,
    pub max_var_rel_err: f64,
    pub min_psd_margin: f64,
}

/// Cross-validate every grid point: closed-form log-partition against
/// quadrature/summation, the closed-form mean against the finite-difference
/// gradient, and the variance against the finite-difference Hessian.
pub fn table2_grid_report() -> Result<Table2Report> {
    let tol = Tolerance::default();
    let mut rows = Vec::new();
    let mut max_a_err = 0.0f64;
    let mut max_mu_rel_err = 0.0f64;
    let mut max_var_rel_err = 0.0f64;
    let mut min_psd_margin = f64::INFINITY;
    for (family, eta) in reference_grid() {
        let a_closed = family.log_partition(&eta)?;
        let a_numeric = numeric_log_partition(&family, &eta, &tol)?;
        let a_abs_err = (a_closed - a_numeric).abs();

        let mu_closed = family.mean_stats(&eta)?.mu_t;
        let fam = family.clone();
        let a_fn = move |e: &[f64]| {
            fam.log_partition(&CanonicalParams::new(e.to_vec()))
                .unwrap_or(f64::NAN)
        };
        let mu_fd = fd_gradient(&a_fn, eta.values())?;
        let mu_rel_err = mu_closed
            .iter()
            .zip(&mu_fd)
            .map(|(c, g)| (c - g).abs() / c.abs().max(1.0))
            .fold(0.0f64, f64::max);

        let var = family.var_stats(&eta)?;
        let hess_fd = fd_hessian(&a_fn, eta.values())?;
        let scale = var.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        let var_rel_err = var
            .iter()
            .zip(&hess_fd)
            .flat_map(|(vr, fr)| vr.iter().zip(fr).map(|(v, f)| (v - f).abs() / scale))
            .fold(0.0f64, f64::max);
        let eigs = sym_eigenvalues(&var)?;
        let min_eigenvalue = eigs[0];

        max_a_err = max_a_err.max(a_abs_err);
        max_mu_rel_err = max_mu_rel_err.max(mu_rel_err);
        max_var_rel_err = max_var_rel_err.max(var_rel_err);
        min_psd_margin = min_psd_margin.min(min_eigenvalue / eigs.last().unwrap().max(1.0));

        rows.push(Table2Row {
            family: family.name().to_string(),
            eta: eta.values().to_vec(),
            a_closed,
            a_numeric,
            a_abs_err,
            mu_closed,
            mu_fd,
            mu_rel_err,
            var_rel_err,
            min_eigenvalue,
        });
    }
    Ok(Table2Report {
        rows,
        max_a_err,
        max_mu_rel_err,
        max_var_rel_err,
        min_psd_margin,
    })
}

fn run_table2_suite() -> Result<SuiteReport> {
    let report = table2_grid_report()?;
    let mut lines = Vec::new();
    for row in &report.rows {
        lines.push(format!(
            "table2 family={} eta={:?} a_err={:e} mu_rel_err={:e} var_rel_err={:e}",
            row.family, row.eta, row.a_abs_err, row.mu_rel_err, row.var_rel_err
        ));
    }
    if report.max_a_err > 1e-8 {
        return Err(violation(
            "table2",
            None,
            format!(
                "closed-form vs numeric log-partition error {:e} above 1e-8",
                report.max_a_err
            ),
        ));
    }
    if report.max_mu_rel_err > 1e-6 {
        return Err(violation(
            "table2",
            None,
            format!(
                "mean map vs finite-difference gradient error {:e} above 1e-6",
                report.max_mu_rel_err
            ),
        ));
    }
    if report.max_var_rel_err > 1e-4 {
        return Err(violation(
            "table2",
            None,
            format!(
                "variance vs finite-difference Hessian error {:e} above 1e-4",
                report.max_var_rel_err
            ),
        ));
    }
    if report.min_psd_margin < -1e-8 {
        return Err(violation(
            "table2",
            None,
            format!(
                "variance matrix not positive semidefinite (margin {:e})",
                report.min_psd_margin
            ),
        ));
    }
    lines.push(format!(
        "suite=table2 points={} max_a_err={:e} max_mu_rel_err={:e} max_var_rel_err={:e} status=ok",
        report.rows.len(),
        report.max_a_err,
        report.max_mu_rel_err,
        report.max_var_rel_err
    ));
    Ok(SuiteReport {
        name: "table2".into(),
        lines,
    })
}

/// Rows for the reference-parameter table printed by the CLI: one per family
/// at its conventional parameter point.
pub fn table2_reference_rows() -> Result<Vec<Table2Row>> {
    let cases: Vec<(ClosedFormFamily, StandardParams)> = vec![
        (
            ClosedFormFamily::binomial(10)?,
            StandardParams::Binomial { theta: 0.3 },
        ),
        (
            ClosedFormFamily::poisson(),
            StandardParams::Poisson { lambda: 2.0 },
        ),
        (
            ClosedFormFamily::normal(),
            StandardParams::Normal {
                mu: 1.0,
                sigma2: 2.0,
            },
        ),
        (
            ClosedFormFamily::gamma(),
            StandardParams::Gamma {
                alpha: 2.0,
                theta: 3.0,
            },
        ),
        (
            ClosedFormFamily::sqrt_gamma(),
            StandardParams::SqrtGamma {
                alpha: 2.0,
                theta: 3.0,
            },
        ),
    ];
    let tol = Tolerance::default();
    let mut rows = Vec::new();
    for (family, std) in cases {
        let eta = family.to_canonical(&std)?;
        let a_closed = family.log_partition(&eta)?;
        let a_numeric = numeric_log_partition(&family, &eta, &tol)?;
        let mu_closed = family.mean_stats(&eta)?.mu_t;
        let fam = family.clone();
        let a_fn = move |e: &[f64]| {
            fam.log_partition(&CanonicalParams::new(e.to_vec()))
                .unwrap_or(f64::NAN)
        };
        let mu_fd = fd_gradient(&a_fn, eta.values())?;
        let mu_rel_err = mu_closed
            .iter()
            .zip(&mu_fd)
            .map(|(c, g)| (c - g).abs() / c.abs().max(1.0))
            .fold(0.0f64, f64::max);
        let var = family.var_stats(&eta)?;
        let eigs = sym_eigenvalues(&var)?;
        rows.push(Table2Row {
            family: family.name().to_string(),
            eta: eta.values().to_vec(),
            a_closed,
            a_numeric,
            a_abs_err: (a_closed - a_numeric).abs(),
            mu_closed,
            mu_fd,
            mu_rel_err,
            var_rel_err: 0.0,
            min_eigenvalue: eigs[0],
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Randomized problem generation
// ---------------------------------------------------------------------------

fn random_simplex(rng: &mut ChaCha8Rng, k: usize) -> FiniteDistribution {
    loop {
        // Normalized unit-exponential draws land uniformly on the simplex.
        let raw: Vec<f64> = (0..k)
            .map(|_| (-(1.0 - rng.random::<f64>()).ln()).max(1e-12))
            .collect();
        let total: f64 = raw.iter().sum();
        if let Ok(dist) = FiniteDistribution::from_probs(raw.iter().map(|x| x / total).collect()) {
            return dist;
        }
    }
}

/// A random feasible moment problem: statistics drawn uniformly, the target
/// taken as the exact moments of a random tilt so it is strictly interior.
pub fn random_problem(rng: &mut ChaCha8Rng, uniform_base: bool, max_k: usize) -> MomentProblem {
    loop {
        let k = rng.random_range(3..=max_k.max(4));
        let d = if k >= 4 { rng.random_range(1..=2) } else { 1 };
        let points: Vec<f64> = (0..k).map(|i| i as f64).collect();
        let stats: Matrix = (0..k)
            .map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let log_weights: Vec<f64> = if uniform_base {
            vec![0.0; k]
        } else {
            (0..k).map(|_| rng.random_range(-1.0..1.0)).collect()
        };
        let eta_star: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let Ok(seed_dist) = tilt(&points, &log_weights, &stats, &eta_star) else {
            continue;
        };
        let target: Vec<f64> = (0..d)
            .map(|j| {
                stats
                    .iter()
                    .zip(seed_dist.probs())
                    .map(|(row, &p)| row[j] * p)
                    .sum()
            })
            .collect();
        if let Ok(problem) = MomentProblem::new(points, log_weights, stats, target) {
            if check_feasibility(&problem).feasible {
                return problem;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Optimality suites
// ---------------------------------------------------------------------------

const PROP_PROBLEMS: usize = 20;

fn run_prop_suite(uniform_base: bool, seed: u64, trials: usize) -> Result<SuiteReport> {
    let name = if uniform_base { "prop2" } else { "prop1" };
    let tol = Tolerance::default();
    let mut lines = Vec::new();
    let mut overall_min_gap = f64::INFINITY;
    let mut overall_max_err = 0.0f64;
    for index in 0..PROP_PROBLEMS {
        let mut rng = ChaCha8Rng::seed_from_u64(par::derive_seed(seed, index as u64));
        let problem = random_problem(&mut rng, uniform_base, 12);
        let trial_seed = par::derive_seed(seed, 10_000 + index as u64);
        let outcome = if uniform_base {
            verify_prop2(&problem, trials, trial_seed, &tol)
        } else {
            verify_prop1(&problem, trials, trial_seed, &tol)
        };
        let report = match outcome {
            Ok(r) => r,
            Err(Error::InvariantViolation(detail)) => {
                return Err(violation(name, Some(&problem), detail));
            }
            Err(other) => return Err(other),
        };
        let min_gap = report.min_gap.unwrap_or(f64::INFINITY);
        overall_min_gap = overall_min_gap.min(min_gap);
        overall_max_err = overall_max_err.max(report.max_identity_err);
        lines.push(format!(
            "{name} problem={index:02} K={} d={} trials={} min_gap={:e} max_identity_err={:e}",
            problem.k(),
            problem.dim(),
            report.trials,
            min_gap,
            report.max_identity_err
        ));
    }
    lines.push(format!(
        "suite={name} seed={seed} problems={PROP_PROBLEMS} trials={trials} min_gap={overall_min_gap:e} max_identity_err={overall_max_err:e} status=ok"
    ));
    Ok(SuiteReport {
        name: name.into(),
        lines,
    })
}

// ---------------------------------------------------------------------------
// Entropy-metric suites
// ---------------------------------------------------------------------------

fn run_concavity_suite(seed: u64, trials: usize) -> Result<SuiteReport> {
    let outcomes: Vec<Result<(f64, f64, f64)>> = par::map_indexed(trials, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(par::derive_seed(seed, i as u64));
        let k = rng.random_range(2..=8);
        let q0 = random_simplex(&mut rng, k);
        let mut q1 = random_simplex(&mut rng, k);
        while tv_distance(&q0, &q1)? <= EQUALITY_TV {
            q1 = random_simplex(&mut rng, k);
        }
        let mut lambda = rng.random::<f64>();
        if lambda <= 0.0 {
            lambda = 0.5;
        }
        let prior = random_simplex(&mut rng, k);
        let report = concavity_witness(&q0, &q1, lambda, Some(&prior))?;
        let h_margin = report.lhs - report.rhs;
        let g_margin = report.g_lhs.unwrap() - report.g_rhs.unwrap();
        Ok((h_margin, g_margin, report.risk_identity_gap.unwrap()))
    });
    let mut min_h = f64::INFINITY;
    let mut min_g = f64::INFINITY;
    let mut max_risk_gap = 0.0f64;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok((h, g, risk)) => {
                min_h = min_h.min(h);
                min_g = min_g.min(g);
                max_risk_gap = max_risk_gap.max(risk);
            }
            Err(Error::InvariantViolation(detail)) => {
                return Err(violation("concavity", None, format!("trial {i}: {detail}")));
            }
            Err(other) => return Err(other),
        }
    }
    let lines = vec![format!(
        "suite=concavity seed={seed} trials={trials} min_h_margin={min_h:e} min_g_margin={min_g:e} max_risk_identity_gap={max_risk_gap:e} status=ok"
    )];
    Ok(SuiteReport {
        name: "concavity".into(),
        lines,
    })
}

fn run_combinatorial_suite() -> Result<SuiteReport> {
    let mut lines = Vec::new();
    let prior = FiniteDistribution::from_probs(vec![0.3, 0.7])?;
    let mut previous_h: Option<f64> = None;
    let mut previous_g: Option<f64> = None;
    for n in [100u64, 1000, 10000] {
        let counts = CountVector::new(vec![n / 2, n / 2])?;
        let bound = ((n as f64).ln() + 1.0) / n as f64;
        let h_gap = entropy_rate_gap(&counts)?.abs();
        let g_gap = g_rate_gap(&counts, &prior)?.abs();
        if h_gap > bound {
            return Err(violation(
                "combinatorial",
                None,
                format!("n={n}: entropy rate gap {h_gap:e} above bound {bound:e}"),
            ));
        }
        if g_gap > bound {
            return Err(violation(
                "combinatorial",
                None,
                format!("n={n}: prior-measure rate gap {g_gap:e} above bound {bound:e}"),
            ));
        }
        if previous_h.is_some_and(|p| h_gap >= p) || previous_g.is_some_and(|p| g_gap >= p) {
            return Err(violation(
                "combinatorial",
                None,
                format!("n={n}: rate gaps failed to decrease"),
            ));
        }
        previous_h = Some(h_gap);
        previous_g = Some(g_gap);
        lines.push(format!(
            "combinatorial n={n} h_gap={h_gap:e} g_gap={g_gap:e} bound={bound:e}"
        ));
    }
    lines.push("suite=combinatorial status=ok".into());
    Ok(SuiteReport {
        name: "combinatorial".into(),
        lines,
    })
}

/// Random (q, p) properness checks; exercised by the acceptance suite rather
/// than a CLI verb.
pub struct GibbsSummary {
    pub pairs: usize,
    pub max_route_gap: f64,
    pub min_kl: f64,
}

pub fn run_gibbs_suite(seed: u64, pairs: usize) -> Result<GibbsSummary> {
    let nats = EntropyUnits::nats();
    let outcomes: Vec<Result<(f64, f64)>> = par::map_indexed(pairs, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(par::derive_seed(seed, i as u64));
        let k = rng.random_range(2..=8);
        let q = random_simplex(&mut rng, k);
        // Exercise the equality direction on every tenth pair.
        let p = if i % 10 == 9 {
            q.clone()
        } else {
            random_simplex(&mut rng, k)
        };
        let kl = kl_divergence(&q, &p, nats)?;
        let via_risk = cross_entropy(&q, &p, nats)? - entropy(&q, nats);
        let route_gap = (kl - via_risk).abs();
        if route_gap > 1e-12 {
            return Err(Error::InvariantViolation(format!(
                "pair {i}: risk-minus-entropy and divergence routes differ by {route_gap:e}"
            )));
        }
        if kl < -1e-12 {
            return Err(Error::InvariantViolation(format!(
                "pair {i}: divergence {kl:e} below zero"
            )));
        }
        let tv = tv_distance(&q, &p)?;
        if (kl.abs() <= 1e-12) != (tv <= EQUALITY_TV) {
            return Err(Error::InvariantViolation(format!(
                "pair {i}: zero divergence and zero distance disagree (kl={kl:e}, tv={tv:e})"
            )));
        }
        Ok((route_gap, kl))
    });
    let mut max_route_gap = 0.0f64;
    let mut min_kl = f64::INFINITY;
    for outcome in outcomes {
        let (gap, kl) = outcome?;
        max_route_gap = max_route_gap.max(gap);
        min_kl = min_kl.min(kl);
    }
    Ok(GibbsSummary {
        pairs,
        max_route_gap,
        min_kl,
    })
}

// ---------------------------------------------------------------------------
// Transform suite
// ---------------------------------------------------------------------------

fn run_transforms_suite(seed: u64, trials: usize) -> Result<SuiteReport> {
    let mut lines = Vec::new();

    // Transformed gamma against its closed-form image.
    let mut worst_density = 0.0f64;
    for alpha in [0.5, 1.0, 2.0, 5.0] {
        for theta in [0.5, 1.0, 3.0] {
            worst_density = worst_density.max(gamma_sqrt_consistency(alpha, theta)?);
        }
    }
    if worst_density > 1e-9 {
        return Err(violation(
            "transforms",
            None,
            format!("transformed gamma deviates from its catalog image by {worst_density:e}"),
        ));
    }
    lines.push(format!(
        "transforms gamma_sqrt_density_err={worst_density:e}"
    ));

    // Closure of the unit-base form under the square-root map.
    let gamma = ClosedFormFamily::gamma();
    let eta_g = gamma.to_canonical(&StandardParams::Gamma {
        alpha: 2.0,
        theta: 3.0,
    })?;
    let closure = check_efu_closure(&MonotoneMap::sqrt_map(), &gamma, &eta_g)?;
    if !closure.holds {
        return Err(violation(
            "transforms",
            None,
            format!(
                "square-root of the gamma family should keep a constant base (residual {:e})",
                closure.max_residual
            ),
        ));
    }
    let normal = ClosedFormFamily::normal();
    let eta_n = CanonicalParams::from((0.0, -0.5));
    let anti_closure = check_efu_closure(&MonotoneMap::cube(), &normal, &eta_n)?;
    if anti_closure.holds {
        return Err(violation(
            "transforms",
            None,
            "cubing the normal family must not keep a constant base".into(),
        ));
    }
    lines.push(format!(
        "transforms closure_residual={:e} anti_closure_residual={:e}",
        closure.max_residual, anti_closure.max_residual
    ));

    // Closed-form normal entropy against quadrature.
    let mut worst_entropy = 0.0f64;
    for sigma2 in [1.0, std::f64::consts::E / (2.0 * std::f64::consts::PI), 4.0] {
        let eta = normal.to_canonical(&StandardParams::Normal { mu: 0.0, sigma2 })?;
        let closed = normal.entropy_closed(&eta)?;
        let identity = MonotoneMap::identity((f64::NEG_INFINITY, f64::INFINITY));
        let report = demo_h_noninvariance(&normal, &eta, &identity)?;
        worst_entropy = worst_entropy.max((report.h_before - closed).abs());
    }
    if worst_entropy > 1e-7 {
        return Err(violation(
            "transforms",
            None,
            format!("normal entropy quadrature deviates from the closed form by {worst_entropy:e}"),
        ));
    }

    // Entropy is not invariant: y = 2x shifts it by exactly log 2.
    let scale = MonotoneMap::scale(2.0, (f64::NEG_INFINITY, f64::INFINITY))?;
    let shift = demo_h_noninvariance(&normal, &eta_n, &scale)?;
    let delta_err = (shift.delta - 2.0f64.ln()).abs();
    if delta_err > 1e-6 {
        return Err(violation(
            "transforms",
            None,
            format!(
                "entropy shift under y = 2x is {} (expected log 2)",
                shift.delta
            ),
        ));
    }
    lines.push(format!(
        "transforms normal_entropy_err={worst_entropy:e} scale_delta_err={delta_err:e}"
    ));

    // Data processing only increases entropy relative to a prior.
    let outcomes: Vec<Result<f64>> = par::map_indexed(trials, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(par::derive_seed(seed, 50_000 + i as u64));
        let k = rng.random_range(3..=8);
        let q = random_simplex(&mut rng, k);
        let p = random_simplex(&mut rng, k);
        let m = rng.random_range(1..k);
        let mut index_map: Vec<usize> = (0..k)
            .map(|j| if j < m { j } else { rng.random_range(0..m) })
            .collect();
        // Shuffle source order so the surjection is not always monotone.
        for j in (1..k).rev() {
            let swap = rng.random_range(0..=j);
            index_map.swap(j, swap);
        }
        let report = demo_g_invariance(&q, &p, &index_map)?;
        Ok(report.delta)
    });
    let mut min_delta = f64::INFINITY;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(delta) => min_delta = min_delta.min(delta),
            Err(Error::InvariantViolation(detail)) => {
                return Err(violation(
                    "transforms",
                    None,
                    format!("merge trial {i}: {detail}"),
                ));
            }
            Err(other) => return Err(other),
        }
    }
    lines.push(format!(
        "transforms merge_trials={trials} min_delta={min_delta:e}"
    ));
    lines.push(format!("suite=transforms seed={seed} status=ok"));
    Ok(SuiteReport {
        name: "transforms".into(),
        lines,
    })
}

// ---------------------------------------------------------------------------
// Dual-primal agreement
// ---------------------------------------------------------------------------

pub struct OracleSummary {
    pub instances: usize,
    pub max_tv: f64,
}

/// Compare the dual solver against the brute-force primal maximizer on
/// oracle-scale problems.
pub fn run_oracle_suite(seed: u64, instances: usize) -> Result<OracleSummary> {
    let tol = Tolerance::default();
    let mut max_tv = 0.0f64;
    for index in 0..instances {
        let mut rng = ChaCha8Rng::seed_from_u64(par::derive_seed(seed, 70_000 + index as u64));
        let problem = random_problem(&mut rng, index % 2 == 0, 6);
        let dual = solve_dual(&problem, &tol)?;
        let primal = primal_oracle(&problem, 21)?;
        let tv = tv_distance(&dual.dist, &primal)?;
        if tv > 1e-5 {
            return Err(violation(
                "oracle",
                Some(&problem),
                format!("instance {index}: dual and primal disagree (tv {tv:e})"),
            ));
        }
        max_tv = max_tv.max(tv);
    }
    Ok(OracleSummary { instances, max_tv })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_grid_is_large_enough() {
        let grid = reference_grid();
        assert!(grid.len() >= 12, "only {} grid points", grid.len());
        for (family, eta) in &grid {
            family.check_eta(eta).unwrap();
        }
    }

    #[test]
    fn random_problems_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let p = random_problem(&mut rng, false, 12);
            assert!(p.k() >= 3 && p.k() <= 12);
            assert!(p.dim() >= 1 && p.dim() <= 2);
            assert!(check_feasibility(&p).feasible);
        }
    }

    #[test]
    fn suite_dispatch_rejects_unknown_names() {
        assert!(matches!(
            run_suite("nonsense", 42, None),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn combinatorial_suite_passes() {
        let report = run_suite("combinatorial", 42, None).unwrap();
        assert!(report.lines.last().unwrap().contains("status=ok"));
    }

    #[test]
    fn suites_are_deterministic_for_a_seed() {
        let a = run_suite("concavity", 7, Some(50)).unwrap();
        let b = run_suite("concavity", 7, Some(50)).unwrap();
        assert_eq!(a.lines, b.lines);
        let c = run_suite("concavity", 8, Some(50)).unwrap();
        assert_ne!(a.lines, c.lines);
    }

    #[test]
    fn small_prop_runs_pass() {
        let report = run_suite("prop1", 3, Some(25)).unwrap();
        assert!(report.lines.last().unwrap().contains("status=ok"));
        let report = run_suite("prop2", 3, Some(25)).unwrap();
        assert!(report.lines.last().unwrap().contains("status=ok"));
    }

    #[test]
    fn gibbs_suite_small_run() {
        let summary = run_gibbs_suite(5, 500).unwrap();
        assert!(summary.max_route_gap <= 1e-12);
        assert!(summary.min_kl >= -1e-12);
    }

    #[test]
    fn oracle_suite_small_run() {
        let summary = run_oracle_suite(11, 4).unwrap();
        assert!(summary.max_tv <= 1e-5);
    }
}
