//! Numeric evaluation of log-partition functions, independent of the closed
//! forms in the family catalog: truncated summation for discrete supports and
//! adaptive quadrature for continuous ones.

use crate::error::{Error, Result};
use crate::families::{CanonicalParams, ClosedFormFamily, FamilyKind};
use crate::numeric::newton::Tolerance;
use crate::numeric::quad::log_integrate_exp;
use crate::numeric::special::log_gamma_fn;
use crate::numeric::{dot, log_sum_exp};

/// log z(eta) by summation or quadrature over the support.
///
/// Discrete infinite sums are truncated once a geometric bound on the
/// remaining tail mass, obtained from the term ratio, drops below
/// `tol.abs_tol / 10` relative to the accumulated sum.
pub fn numeric_log_partition(
    family: &ClosedFormFamily,
    eta: &CanonicalParams,
    tol: &Tolerance,
) -> Result<f64> {
    family.check_eta(eta)?;
    match family.kind() {
        FamilyKind::Binomial => {
            let n = family.fixed_shape().expect("binomial carries n");
            let mut terms = Vec::with_capacity(n as usize + 1);
            for k in 0..=n {
                let x = k as f64;
                let lb = family.log_base(x)?;
                let t = family.canonical_stats(x)?;
                terms.push(lb + dot(eta.values(), &t));
            }
            log_sum_exp(&terms)
        }
        FamilyKind::Poisson => poisson_log_partition(eta.values()[0], tol.abs_tol),
        FamilyKind::Normal | FamilyKind::Gamma | FamilyKind::SqrtGamma => {
            let domain = family
                .quad_domain()
                .expect("continuous family has a quadrature domain");
            let e = eta.values().to_vec();
            let fam = family.clone();
            let quad_tol = Tolerance {
                abs_tol: tol.abs_tol.min(1e-14),
                rel_tol: tol.rel_tol.min(1e-11),
                max_iter: 1,
            };
            // h(x) = 1 on the continuous supports, so the log-integrand is the
            // tilt alone.
            log_integrate_exp(
                |x| match fam.canonical_stats(x) {
                    Ok(t) => dot(&e, &t),
                    Err(_) => f64::NEG_INFINITY,
                },
                domain,
                &quad_tol,
            )
        }
    }
}

fn poisson_log_partition(eta: f64, abs_tol: f64) -> Result<f64> {
    let rate = eta.exp();
    let log_tail_target = (abs_tol.max(1e-300) / 10.0).ln();
    // Running logsumexp of the series terms exp(k eta) / k!.
    let mut max_term = f64::NEG_INFINITY;
    let mut scaled_sum = 0.0;
    let mut k = 0u64;
    loop {
        let lt = k as f64 * eta - log_gamma_fn(k as f64 + 1.0)?;
        if lt > max_term {
            scaled_sum = scaled_sum * (max_term - lt).exp() + 1.0;
            max_term = lt;
        } else {
            scaled_sum += (lt - max_term).exp();
        }
        let next = (k + 1) as f64 * eta - log_gamma_fn(k as f64 + 2.0)?;
        let ratio = rate / (k as f64 + 2.0);
        if ratio < 1.0 {
            // Terms beyond k+1 shrink at least geometrically with this ratio.
            let log_tail_bound = next - (1.0 - ratio).ln();
            let log_partial = max_term + scaled_sum.ln();
            if log_tail_bound <= log_tail_target + log_partial {
                return Ok(log_partial);
            }
        }
        k += 1;
        if k > 10_000_000 {
            return Err(Error::NonFinite("poisson partition accumulation"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::ClosedFormFamily;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn poisson_at_zero_matches_closed_form() {
        let fam = ClosedFormFamily::poisson();
        let eta = CanonicalParams::from(0.0);
        let v = numeric_log_partition(&fam, &eta, &tol()).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn gamma_reference_point_is_log_nine() {
        let fam = ClosedFormFamily::gamma();
        let eta = CanonicalParams::from((-1.0 / 3.0, 1.0));
        let v = numeric_log_partition(&fam, &eta, &tol()).unwrap();
        assert!((v - 9.0f64.ln()).abs() < 1e-8, "got {v}");
    }

    #[test]
    fn standard_normal_partition() {
        let fam = ClosedFormFamily::normal();
        let eta = CanonicalParams::from((0.0, -0.5));
        let v = numeric_log_partition(&fam, &eta, &tol()).unwrap();
        let expected = 0.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((v - expected).abs() < 1e-8, "got {v}");
    }

    #[test]
    fn matches_closed_forms_across_grid() {
        for (fam, eta) in crate::suites::reference_grid() {
            let closed = fam.log_partition(&eta).unwrap();
            let numeric = numeric_log_partition(&fam, &eta, &tol()).unwrap();
            assert!(
                (closed - numeric).abs() <= 1e-8,
                "{}: closed {closed} vs numeric {numeric}",
                fam.name()
            );
        }
    }

    #[test]
    fn rejects_eta_outside_domain() {
        let fam = ClosedFormFamily::normal();
        let eta = CanonicalParams::from((0.0, 0.5));
        assert!(numeric_log_partition(&fam, &eta, &tol()).is_err());
    }
}
