//! Change-of-variables machinery: relabelled discrete distributions,
//! Jacobian-corrected densities, detection of tilts that absorb the Jacobian
//! (so a unit-base family stays unit-base), and invariance demonstrations for
//! entropy with and without a prior measure.

use crate::entropy::{relative_entropy_g, EntropyUnits, FiniteDistribution};
use crate::error::{Error, Result};
use crate::families::{CanonicalParams, ClosedFormFamily, FamilyKind};
use crate::numeric::linalg::least_squares;
use crate::numeric::newton::Tolerance;
use crate::numeric::quad::{integrate, Domain};

/// An invertible, differentiable map of a real interval, with its inverse and
/// the absolute inverse derivative |dx/dy| supplied explicitly.
pub struct MonotoneMap {
    forward: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    inverse: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    d_inverse: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    x_domain: (f64, f64),
    y_domain: (f64, f64),
}

impl MonotoneMap {
    pub fn new(
        forward: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inverse: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d_inverse: impl Fn(f64) -> f64 + Send + Sync + 'static,
        x_domain: (f64, f64),
        y_domain: (f64, f64),
    ) -> Self {
        Self {
            forward: Box::new(forward),
            inverse: Box::new(inverse),
            d_inverse: Box::new(d_inverse),
            x_domain,
            y_domain,
        }
    }

    pub fn identity(domain: (f64, f64)) -> Self {
        Self::new(|x| x, |y| y, |_| 1.0, domain, domain)
    }

    /// y = c x for c != 0.
    pub fn scale(c: f64, x_domain: (f64, f64)) -> Result<Self> {
        if c == 0.0 || !c.is_finite() {
            return Err(Error::Domain(format!(
                "scale map: factor must be finite and nonzero (got {c})"
            )));
        }
        let (a, b) = (c * x_domain.0, c * x_domain.1);
        let y_domain = (a.min(b), a.max(b));
        Ok(Self::new(
            move |x| c * x,
            move |y| y / c,
            move |_| 1.0 / c.abs(),
            x_domain,
            y_domain,
        ))
    }

    /// y = x + c.
    pub fn shift(c: f64, x_domain: (f64, f64)) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::Domain(format!(
                "shift map: offset must be finite (got {c})"
            )));
        }
        Ok(Self::new(
            move |x| x + c,
            move |y| y - c,
            |_| 1.0,
            x_domain,
            (x_domain.0 + c, x_domain.1 + c),
        ))
    }

    /// y = sqrt(x) on the positive reals; |dx/dy| = 2y.
    pub fn sqrt_map() -> Self {
        Self::new(
            |x| x.sqrt(),
            |y| y * y,
            |y| 2.0 * y,
            (0.0, f64::INFINITY),
            (0.0, f64::INFINITY),
        )
    }

    /// y = x^3 on the real line; |dx/dy| = |y|^(-2/3) / 3.
    pub fn cube() -> Self {
        Self::new(
            |x| x * x * x,
            f64::cbrt,
            |y| y.abs().powf(-2.0 / 3.0) / 3.0,
            (f64::NEG_INFINITY, f64::INFINITY),
            (f64::NEG_INFINITY, f64::INFINITY),
        )
    }

    pub fn forward(&self, x: f64) -> f64 {
        (self.forward)(x)
    }

    pub fn inverse(&self, y: f64) -> f64 {
        (self.inverse)(y)
    }

    pub fn d_inverse(&self, y: f64) -> f64 {
        (self.d_inverse)(y)
    }

    pub fn x_domain(&self) -> (f64, f64) {
        self.x_domain
    }

    pub fn y_domain(&self) -> (f64, f64) {
        self.y_domain
    }
}

/// Relabel the support of a discrete distribution; probabilities carry over
/// unchanged.
pub fn transform_discrete(
    dist: &FiniteDistribution,
    map: &MonotoneMap,
) -> Result<FiniteDistribution> {
    let new_points: Vec<f64> = dist.points().iter().map(|&x| map.forward(x)).collect();
    if new_points.iter().any(|y| y.is_nan()) {
        return Err(Error::NonInjectiveOnSupport);
    }
    let mut sorted = new_points.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::NonInjectiveOnSupport);
    }
    FiniteDistribution::new(new_points, dist.probs().to_vec())
}

/// Log-density of the transformed variable:
/// log p_y(y) = log p_x(x(y)) + log |dx/dy|.
pub fn transform_density(log_pdf: impl Fn(f64) -> f64, map: &MonotoneMap, y: f64) -> Result<f64> {
    let (lo, hi) = map.y_domain();
    if !(y > lo && y < hi) {
        return Err(Error::Domain(format!(
            "transform_density: y = {y} outside the mapped domain ({lo}, {hi})"
        )));
    }
    let x = map.inverse(y);
    Ok(log_pdf(x) + map.d_inverse(y).ln())
}

/// Whether the log-Jacobian is an affine function of the transformed
/// canonical statistics; when it is, the transformed family again has a
/// constant base function.
#[derive(Debug, Clone)]
pub struct ClosureReport {
    pub holds: bool,
    pub max_residual: f64,
    /// Fitted coefficients on (1, t_1, t_2).
    pub coefficients: Vec<f64>,
}

const CLOSURE_GRID: usize = 64;
const CLOSURE_TOL: f64 = 1e-8;

/// Test numerically whether log |dx/dy| is an affine combination of the
/// transformed canonical statistics, on a 64-point grid over the central 99%
/// probability interval of the family at `eta` (log-spaced when the interval
/// is positive).
pub fn check_efu_closure(
    map: &MonotoneMap,
    family: &ClosedFormFamily,
    eta: &CanonicalParams,
) -> Result<ClosureReport> {
    if !family.is_continuous() {
        return Err(Error::Unsupported(family.name()));
    }
    let (lo, hi) = central_interval(family, eta, 0.99)?;
    let grid = grid_points(lo, hi, CLOSURE_GRID);
    let mut design = Vec::new();
    let mut response = Vec::new();
    for &x in &grid {
        // t_y(y) = t_x(x(y)), so at y = forward(x) the transformed statistics
        // are just t_x(x).
        let t = match family.canonical_stats(x) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let y = map.forward(x);
        if y.is_nan() {
            continue;
        }
        let log_jac = map.d_inverse(y).ln();
        if !log_jac.is_finite() || t.iter().any(|v| !v.is_finite()) {
            continue;
        }
        let mut row = vec![1.0];
        row.extend_from_slice(&t);
        design.push(row);
        response.push(log_jac);
    }
    if design.len() < family.dim() + 2 {
        return Err(Error::Domain(
            "check_efu_closure: map is undefined on most of the support's central interval".into(),
        ));
    }
    let (coefficients, residuals) = least_squares(&design, &response)?;
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(ClosureReport {
        holds: max_residual < CLOSURE_TOL,
        max_residual,
        coefficients,
    })
}

/// Differential entropies before and after a change of variables.
#[derive(Debug, Clone, Copy)]
pub struct HNoninvarianceReport {
    pub h_before: f64,
    pub h_after: f64,
    pub delta: f64,
}

/// Compute both differential entropies by quadrature and report their
/// difference; for y = c x the difference is log |c|.
pub fn demo_h_noninvariance(
    family: &ClosedFormFamily,
    eta: &CanonicalParams,
    map: &MonotoneMap,
) -> Result<HNoninvarianceReport> {
    if !family.is_continuous() {
        return Err(Error::Unsupported(family.name()));
    }
    family.check_eta(eta)?;
    let fam = family.clone();
    let e = eta.clone();
    let log_pdf = move |x: f64| fam.log_pdmf(&e, x).unwrap_or(f64::NEG_INFINITY);
    let h_before = differential_entropy(&log_pdf, family.x_interval(), &quad_tol())?;
    let log_pdf_y = |y: f64| transform_density(&log_pdf, map, y).unwrap_or(f64::NEG_INFINITY);
    let h_after = differential_entropy(&log_pdf_y, map.y_domain(), &quad_tol())?;
    Ok(HNoninvarianceReport {
        h_before,
        h_after,
        delta: h_after - h_before,
    })
}

/// Relative entropy before and after pushing both distributions through an
/// index map.
#[derive(Debug, Clone, Copy)]
pub struct GInvarianceReport {
    pub g_before: f64,
    pub g_after: f64,
    pub delta: f64,
    /// True when the map was a bijection of indices.
    pub lossless: bool,
}

/// Push q and p through `index_map` (entry i gives the destination cell of
/// index i) and compare relative entropies.
///
/// Bijections must leave G exactly unchanged; merges must not decrease it
/// (the data-processing direction). Violations of either escalate to errors.
pub fn demo_g_invariance(
    q: &FiniteDistribution,
    p: &FiniteDistribution,
    index_map: &[usize],
) -> Result<GInvarianceReport> {
    let k = q.len();
    if p.len() != k || index_map.len() != k {
        return Err(Error::SupportMismatch(format!(
            "q has {k} cells, p has {}, index map has {}",
            p.len(),
            index_map.len()
        )));
    }
    let m = index_map.iter().copied().max().unwrap_or(0) + 1;
    let mut seen = vec![false; m];
    for &j in index_map {
        seen[j] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Domain(
            "index map must hit every destination cell".into(),
        ));
    }
    let lossless = m == k;
    let mut q_probs = vec![0.0; m];
    let mut p_probs = vec![0.0; m];
    for (i, &j) in index_map.iter().enumerate() {
        q_probs[j] += q.probs()[i];
        p_probs[j] += p.probs()[i];
    }
    let points: Vec<f64> = if lossless {
        let mut pts = vec![0.0; m];
        for (i, &j) in index_map.iter().enumerate() {
            pts[j] = q.points()[i];
        }
        pts
    } else {
        (0..m).map(|j| j as f64).collect()
    };
    let q_new = FiniteDistribution::new(points.clone(), q_probs)?;
    let p_new = FiniteDistribution::new(points, p_probs)?;
    let nats = EntropyUnits::nats();
    let g_before = relative_entropy_g(q, p, nats)?;
    let g_after = relative_entropy_g(&q_new, &p_new, nats)?;
    if lossless {
        if g_after != g_before {
            return Err(Error::InvariantViolation(format!(
                "relative entropy moved under a bijection: {g_before} -> {g_after}"
            )));
        }
    } else if g_after < g_before - 1e-12 {
        return Err(Error::InvariantViolation(format!(
            "data processing decreased relative entropy: {g_before} -> {g_after}"
        )));
    }
    let delta = if g_after == g_before {
        0.0
    } else {
        g_after - g_before
    };
    Ok(GInvarianceReport {
        g_before,
        g_after,
        delta,
        lossless,
    })
}

fn quad_tol() -> Tolerance {
    Tolerance {
        abs_tol: 1e-12,
        rel_tol: 1e-10,
        max_iter: 1,
    }
}

/// Integrate over an open interval with possibly infinite endpoints by
/// shifting or reflecting onto the canned quadrature domains.
pub(crate) fn integrate_over_interval(
    f: impl Fn(f64) -> f64,
    (a, b): (f64, f64),
    tol: &Tolerance,
) -> Result<f64> {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => integrate(f, Domain::Finite(a, b), tol),
        (true, false) => integrate(move |t| f(a + t), Domain::PositiveHalf, tol),
        (false, true) => integrate(move |t| f(b - t), Domain::PositiveHalf, tol),
        (false, false) => integrate(f, Domain::RealLine, tol),
    }
}

/// -∫ p log p by quadrature, with the integrand written through the
/// log-density so that far-tail underflow contributes zero instead of NaN.
fn differential_entropy(
    log_pdf: &impl Fn(f64) -> f64,
    interval: (f64, f64),
    tol: &Tolerance,
) -> Result<f64> {
    integrate_over_interval(
        |x| {
            let lp = log_pdf(x);
            if lp < -700.0 {
                0.0
            } else {
                -lp.exp() * lp
            }
        },
        interval,
        tol,
    )
    .map_err(|e| match e {
        Error::QuadratureFailure(msg) => Error::QuadratureFailure(msg),
        other => other,
    })
}

/// Central probability interval of a continuous family at `eta`, located by
/// scanning a cumulative trapezoid of the density over a generous window.
fn central_interval(
    family: &ClosedFormFamily,
    eta: &CanonicalParams,
    mass: f64,
) -> Result<(f64, f64)> {
    family.check_eta(eta)?;
    let (win_lo, win_hi) = match family.kind() {
        FamilyKind::Normal => {
            let e = eta.values();
            let sigma2 = -1.0 / (2.0 * e[1]);
            let mu = e[0] * sigma2;
            let sigma = sigma2.sqrt();
            (mu - 12.0 * sigma, mu + 12.0 * sigma)
        }
        FamilyKind::Gamma => {
            let e = eta.values();
            let alpha = e[1] + 1.0;
            let theta = -1.0 / e[0];
            let hi = alpha * theta + 30.0 * theta * alpha.sqrt();
            (hi * 1e-9, hi)
        }
        FamilyKind::SqrtGamma => {
            let e = eta.values();
            let alpha = 0.5 * (e[1] + 1.0);
            let theta = -1.0 / e[0];
            let hi = (alpha * theta).sqrt() * 14.0;
            (hi * 1e-9, hi)
        }
        _ => return Err(Error::Unsupported(family.name())),
    };
    const SCAN: usize = 8192;
    let step = (win_hi - win_lo) / SCAN as f64;
    let mut densities = Vec::with_capacity(SCAN + 1);
    for i in 0..=SCAN {
        let x = win_lo + i as f64 * step;
        densities.push(family.pdmf(eta, x).unwrap_or(0.0));
    }
    let mut cumulative = vec![0.0; SCAN + 1];
    for i in 1..=SCAN {
        cumulative[i] = cumulative[i - 1] + 0.5 * (densities[i - 1] + densities[i]) * step;
    }
    let total = cumulative[SCAN];
    if !(total > 0.0) {
        return Err(Error::QuadratureFailure(
            "central_interval: no probability mass found in the scan window".into(),
        ));
    }
    let tail = 0.5 * (1.0 - mass);
    let locate = |target: f64| -> f64 {
        let t = target * total;
        let idx = cumulative.partition_point(|&c| c < t);
        win_lo + idx.min(SCAN) as f64 * step
    };
    let lo = locate(tail);
    let hi = locate(1.0 - tail);
    if !(lo < hi) {
        return Err(Error::QuadratureFailure(
            "central_interval: degenerate interval".into(),
        ));
    }
    Ok((lo, hi))
}

fn grid_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if lo > 0.0 {
        let (llo, lhi) = (lo.ln(), hi.ln());
        (0..n)
            .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
            .collect()
    } else {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Catalogued log-density discrepancy between a transformed family and its
/// closed-form image, maximized over a grid of evaluation points.
pub fn gamma_sqrt_consistency(alpha: f64, theta: f64) -> Result<f64> {
    let gamma = ClosedFormFamily::gamma();
    let sqrt_gamma = ClosedFormFamily::sqrt_gamma();
    let eta_g = gamma.to_canonical(&crate::families::StandardParams::Gamma { alpha, theta })?;
    let eta_s =
        sqrt_gamma.to_canonical(&crate::families::StandardParams::SqrtGamma { alpha, theta })?;
    let map = MonotoneMap::sqrt_map();
    let (lo, hi) = central_interval(&sqrt_gamma, &eta_s, 0.99)?;
    let grid = grid_points(lo, hi, CLOSURE_GRID);
    let log_pdf_x = |x: f64| gamma.log_pdmf(&eta_g, x).unwrap_or(f64::NEG_INFINITY);
    let mut worst = 0.0f64;
    for &y in &grid {
        let transformed = transform_density(log_pdf_x, &map, y)?;
        let catalog = sqrt_gamma.log_pdmf(&eta_s, y)?;
        worst = worst.max((transformed - catalog).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::entropy;
    use crate::families::StandardParams;
    use std::f64::consts::PI;

    #[test]
    fn discrete_transform_relabels_points() {
        let dist = FiniteDistribution::from_probs(vec![0.2, 0.3, 0.5]).unwrap();
        let shifted =
            transform_discrete(&dist, &MonotoneMap::shift(1.0, (0.0, 2.0)).unwrap()).unwrap();
        assert_eq!(shifted.points(), &[1.0, 2.0, 3.0]);
        assert_eq!(shifted.probs(), dist.probs());

        let same = transform_discrete(&dist, &MonotoneMap::identity((0.0, 2.0))).unwrap();
        assert_eq!(same.points(), dist.points());
    }

    #[test]
    fn discrete_entropy_is_invariant_under_bijections() {
        let dist = FiniteDistribution::from_probs(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let h = entropy(&dist, EntropyUnits::nats());
        for map in [
            MonotoneMap::scale(-2.5, (0.0, 3.0)).unwrap(),
            MonotoneMap::shift(7.0, (0.0, 3.0)).unwrap(),
            MonotoneMap::cube(),
        ] {
            let moved = transform_discrete(&dist, &map).unwrap();
            assert_eq!(entropy(&moved, EntropyUnits::nats()), h);
        }
    }

    #[test]
    fn collapsing_map_is_rejected() {
        let dist = FiniteDistribution::new(vec![-1.0, 0.0, 1.0], vec![0.25, 0.25, 0.5]).unwrap();
        // x^2 folds -1 and 1 together.
        let fold = MonotoneMap::new(
            |x| x * x,
            |y| y.sqrt(),
            |y| 0.5 / y.sqrt(),
            (f64::NEG_INFINITY, f64::INFINITY),
            (0.0, f64::INFINITY),
        );
        assert!(matches!(
            transform_discrete(&dist, &fold),
            Err(Error::NonInjectiveOnSupport)
        ));
    }

    #[test]
    fn transformed_gamma_density_matches_catalog() {
        let gamma = ClosedFormFamily::gamma();
        let eta_g = gamma
            .to_canonical(&StandardParams::Gamma {
                alpha: 2.0,
                theta: 3.0,
            })
            .unwrap();
        let sqrt_gamma = ClosedFormFamily::sqrt_gamma();
        let eta_s = sqrt_gamma
            .to_canonical(&StandardParams::SqrtGamma {
                alpha: 2.0,
                theta: 3.0,
            })
            .unwrap();
        let map = MonotoneMap::sqrt_map();
        let log_pdf = |x: f64| gamma.log_pdmf(&eta_g, x).unwrap();
        let lhs = transform_density(log_pdf, &map, 1.0).unwrap();
        let rhs = sqrt_gamma.log_pdmf(&eta_s, 1.0).unwrap();
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn consistency_grid_for_gamma_and_its_square_root() {
        for alpha in [0.5, 1.0, 2.0, 5.0] {
            for theta in [0.5, 1.0, 3.0] {
                let worst = gamma_sqrt_consistency(alpha, theta).unwrap();
                assert!(
                    worst <= 1e-9,
                    "alpha={alpha}, theta={theta}: discrepancy {worst:e}"
                );
            }
        }
    }

    #[test]
    fn scaled_normal_density_at_zero() {
        let normal = ClosedFormFamily::normal();
        let eta = CanonicalParams::from((0.0, -0.5));
        let map = MonotoneMap::scale(2.0, (f64::NEG_INFINITY, f64::INFINITY)).unwrap();
        let log_pdf = |x: f64| normal.log_pdmf(&eta, x).unwrap();
        let v = transform_density(log_pdf, &map, 0.0).unwrap();
        let expected = -0.5 * (2.0 * PI).ln() - 2.0f64.ln();
        assert!((v - expected).abs() < 1e-13);
    }

    #[test]
    fn density_outside_mapped_domain_is_rejected() {
        let gamma = ClosedFormFamily::gamma();
        let eta = CanonicalParams::from((-1.0, 1.0));
        let map = MonotoneMap::sqrt_map();
        let log_pdf = |x: f64| gamma.log_pdmf(&eta, x).unwrap_or(f64::NEG_INFINITY);
        assert!(transform_density(log_pdf, &map, -1.0).is_err());
    }

    #[test]
    fn closure_detection() {
        let gamma = ClosedFormFamily::gamma();
        let eta_g = gamma
            .to_canonical(&StandardParams::Gamma {
                alpha: 2.0,
                theta: 3.0,
            })
            .unwrap();
        let report = check_efu_closure(&MonotoneMap::sqrt_map(), &gamma, &eta_g).unwrap();
        assert!(report.holds, "residual {:e}", report.max_residual);

        let normal = ClosedFormFamily::normal();
        let eta_n = CanonicalParams::from((0.0, -0.5));
        let report = check_efu_closure(&MonotoneMap::cube(), &normal, &eta_n).unwrap();
        assert!(!report.holds, "residual {:e}", report.max_residual);

        let report = check_efu_closure(
            &MonotoneMap::identity((f64::NEG_INFINITY, f64::INFINITY)),
            &normal,
            &eta_n,
        )
        .unwrap();
        assert!(report.holds);
    }

    #[test]
    fn entropy_shift_under_scaling_is_log_c() {
        let normal = ClosedFormFamily::normal();
        let eta = CanonicalParams::from((0.0, -0.5));
        let map = MonotoneMap::scale(2.0, (f64::NEG_INFINITY, f64::INFINITY)).unwrap();
        let r = demo_h_noninvariance(&normal, &eta, &map).unwrap();
        assert!((r.delta - 2.0f64.ln()).abs() < 1e-6, "delta {}", r.delta);

        let r = demo_h_noninvariance(
            &normal,
            &eta,
            &MonotoneMap::identity((f64::NEG_INFINITY, f64::INFINITY)),
        )
        .unwrap();
        assert!(r.delta.abs() < 1e-9);
    }

    #[test]
    fn gamma_entropy_shift_under_square_root() {
        // H(Y) = H(X) - E log |dy/dx|^{-1}; for y = sqrt(x) the expectation is
        // log 2 + E(log x)/2, available in closed form through the mean map.
        let gamma = ClosedFormFamily::gamma();
        let eta = gamma
            .to_canonical(&StandardParams::Gamma {
                alpha: 2.0,
                theta: 3.0,
            })
            .unwrap();
        let r = demo_h_noninvariance(&gamma, &eta, &MonotoneMap::sqrt_map()).unwrap();
        assert!(r.delta.abs() > 1e-3);
        let mean_log_x = gamma.mean_stats(&eta).unwrap().mu_t[1];
        let expected = -(2.0f64.ln() + 0.5 * mean_log_x);
        assert!(
            (r.delta - expected).abs() < 1e-6,
            "delta {} vs expected {expected}",
            r.delta
        );
    }

    #[test]
    fn transformed_density_still_normalizes() {
        let gamma = ClosedFormFamily::gamma();
        let eta = gamma
            .to_canonical(&StandardParams::Gamma {
                alpha: 2.0,
                theta: 3.0,
            })
            .unwrap();
        let map = MonotoneMap::sqrt_map();
        let log_pdf = move |x: f64| gamma.log_pdmf(&eta, x).unwrap_or(f64::NEG_INFINITY);
        let mass = integrate_over_interval(
            |y| {
                transform_density(&log_pdf, &map, y)
                    .map(f64::exp)
                    .unwrap_or(0.0)
            },
            map.y_domain(),
            &quad_tol(),
        )
        .unwrap();
        assert!((mass - 1.0).abs() < 1e-7, "mass {mass}");
    }

    #[test]
    fn permutations_leave_g_alone_merges_do_not_decrease_it() {
        let q = FiniteDistribution::from_probs(vec![0.25, 0.25, 0.5]).unwrap();
        let p = FiniteDistribution::from_probs(vec![0.5, 0.25, 0.25]).unwrap();

        let r = demo_g_invariance(&q, &p, &[2, 0, 1]).unwrap();
        assert!(r.lossless);
        assert_eq!(r.delta, 0.0);

        let r = demo_g_invariance(&q, &p, &[0, 0, 1]).unwrap();
        assert!(!r.lossless);
        assert!(r.g_after >= r.g_before - 1e-12);

        // Merging everything gives two identical point masses, so G = 0.
        let r = demo_g_invariance(&q, &p, &[0, 0, 0]).unwrap();
        assert_eq!(r.g_after, 0.0);
        assert!(r.g_after >= r.g_before);
    }
}
