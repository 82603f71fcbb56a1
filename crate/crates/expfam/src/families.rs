//! Closed forms for five univariate exponential families: binomial, Poisson,
//! normal, gamma, and square-root gamma.
//!
//! Each family is described by its base function h(x), canonical statistics
//! t(x), and log-partition a(eta), with conversions between canonical and
//! conventional parameters. All probability arithmetic stays in the log
//! domain; densities and masses are exposed as log values plus a convenience
//! exponentiation.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::dot;
use crate::numeric::linalg::Matrix;
use crate::numeric::quad::Domain;
use crate::numeric::special::{digamma_fn, log_gamma_fn};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Binomial,
    Poisson,
    Normal,
    Gamma,
    SqrtGamma,
}

/// Support of the base function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportDescriptor {
    /// {0, 1, ..., max}
    FiniteIntegers {
        max: u64,
    },
    /// {0, 1, 2, ...}
    NonNegativeIntegers,
    RealLine,
    PositiveReals,
}

/// Canonical (natural) parameters; one entry for binomial and Poisson, two
/// for the continuous families.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalParams {
    eta: Vec<f64>,
}

impl CanonicalParams {
    pub fn new(eta: Vec<f64>) -> Self {
        Self { eta }
    }

    pub fn values(&self) -> &[f64] {
        &self.eta
    }

    pub fn dim(&self) -> usize {
        self.eta.len()
    }
}

impl From<f64> for CanonicalParams {
    fn from(eta: f64) -> Self {
        Self::new(vec![eta])
    }
}

impl From<(f64, f64)> for CanonicalParams {
    fn from((e1, e2): (f64, f64)) -> Self {
        Self::new(vec![e1, e2])
    }
}

/// Expectations of the canonical statistics, mu_t = E t(x).
#[derive(Debug, Clone, PartialEq)]
pub struct MeanParams {
    pub mu_t: Vec<f64>,
}

/// Conventional parametrisations with their usual strict bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StandardParams {
    Binomial { theta: f64 },
    Poisson { lambda: f64 },
    Normal { mu: f64, sigma2: f64 },
    Gamma { alpha: f64, theta: f64 },
    SqrtGamma { alpha: f64, theta: f64 },
}

/// A catalog family: the kind plus, for the binomial, its trial count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedFormFamily {
    kind: FamilyKind,
    fixed_shape: Option<u64>,
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn is_integer(x: f64) -> bool {
    x.is_finite() && x == x.trunc()
}

impl ClosedFormFamily {
    pub fn binomial(n: u64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain(format!(
                "binomial: trial count n must be >= 1 (got {n})"
            )));
        }
        Ok(Self {
            kind: FamilyKind::Binomial,
            fixed_shape: Some(n),
        })
    }

    pub fn poisson() -> Self {
        Self {
            kind: FamilyKind::Poisson,
            fixed_shape: None,
        }
    }

    pub fn normal() -> Self {
        Self {
            kind: FamilyKind::Normal,
            fixed_shape: None,
        }
    }

    pub fn gamma() -> Self {
        Self {
            kind: FamilyKind::Gamma,
            fixed_shape: None,
        }
    }

    pub fn sqrt_gamma() -> Self {
        Self {
            kind: FamilyKind::SqrtGamma,
            fixed_shape: None,
        }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn fixed_shape(&self) -> Option<u64> {
        self.fixed_shape
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FamilyKind::Binomial => "binomial",
            FamilyKind::Poisson => "poisson",
            FamilyKind::Normal => "normal",
            FamilyKind::Gamma => "gamma",
            FamilyKind::SqrtGamma => "sqrtgamma",
        }
    }

    pub fn support(&self) -> SupportDescriptor {
        match self.kind {
            FamilyKind::Binomial => SupportDescriptor::FiniteIntegers {
                max: self.fixed_shape.expect("binomial carries n"),
            },
            FamilyKind::Poisson => SupportDescriptor::NonNegativeIntegers,
            FamilyKind::Normal => SupportDescriptor::RealLine,
            FamilyKind::Gamma | FamilyKind::SqrtGamma => SupportDescriptor::PositiveReals,
        }
    }

    /// Dimension of eta and t(x).
    pub fn dim(&self) -> usize {
        match self.kind {
            FamilyKind::Binomial | FamilyKind::Poisson => 1,
            _ => 2,
        }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(
            self.kind,
            FamilyKind::Normal | FamilyKind::Gamma | FamilyKind::SqrtGamma
        )
    }

    /// Quadrature region for continuous supports.
    pub fn quad_domain(&self) -> Option<Domain> {
        match self.kind {
            FamilyKind::Normal => Some(Domain::RealLine),
            FamilyKind::Gamma | FamilyKind::SqrtGamma => Some(Domain::PositiveHalf),
            _ => None,
        }
    }

    /// Support as an open interval of the real line (continuous families).
    pub(crate) fn x_interval(&self) -> (f64, f64) {
        match self.kind {
            FamilyKind::Normal => (f64::NEG_INFINITY, f64::INFINITY),
            _ => (0.0, f64::INFINITY),
        }
    }

    pub fn check_support(&self, x: f64) -> Result<()> {
        let ok = match self.support() {
            SupportDescriptor::FiniteIntegers { max } => {
                is_integer(x) && x >= 0.0 && x <= max as f64
            }
            SupportDescriptor::NonNegativeIntegers => is_integer(x) && x >= 0.0,
            SupportDescriptor::RealLine => x.is_finite(),
            SupportDescriptor::PositiveReals => x.is_finite() && x > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfSupport(x, self.name()))
        }
    }

    /// Validate eta against the family's canonical domain, the set where the
    /// partition function is finite.
    pub fn check_eta(&self, eta: &CanonicalParams) -> Result<()> {
        let e = eta.values();
        if e.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}: eta must have dimension {} (got {})",
                self.name(),
                self.dim(),
                e.len()
            )));
        }
        if e.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "{}: eta must be finite (got {e:?})",
                self.name()
            )));
        }
        match self.kind {
            FamilyKind::Binomial | FamilyKind::Poisson => Ok(()),
            FamilyKind::Normal => {
                if e[1] < 0.0 {
                    Ok(())
                } else {
                    Err(Error::Domain(format!(
                        "normal: eta2 must be < 0 (got {})",
                        e[1]
                    )))
                }
            }
            FamilyKind::Gamma | FamilyKind::SqrtGamma => {
                if e[0] >= 0.0 {
                    Err(Error::Domain(format!(
                        "{}: eta1 must be < 0 (got {})",
                        self.name(),
                        e[0]
                    )))
                } else if e[1] <= -1.0 {
                    Err(Error::Domain(format!(
                        "{}: eta2 must be > -1 (got {})",
                        self.name(),
                        e[1]
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// log h(x). The binomial coefficient goes through log-gamma, never a
    /// factorial loop; the continuous families have h = 1.
    pub fn log_base(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        match self.kind {
            FamilyKind::Binomial => {
                let n = self.fixed_shape.expect("binomial carries n") as f64;
                Ok(log_gamma_fn(n + 1.0)? - log_gamma_fn(x + 1.0)? - log_gamma_fn(n - x + 1.0)?)
            }
            FamilyKind::Poisson => Ok(-log_gamma_fn(x + 1.0)?),
            _ => Ok(0.0),
        }
    }

    /// Canonical statistics t(x).
    pub fn canonical_stats(&self, x: f64) -> Result<Vec<f64>> {
        self.check_support(x)?;
        Ok(match self.kind {
            FamilyKind::Binomial | FamilyKind::Poisson => vec![x],
            FamilyKind::Normal => vec![x, x * x],
            FamilyKind::Gamma => vec![x, x.ln()],
            FamilyKind::SqrtGamma => vec![x * x, x.ln()],
        })
    }

    /// Closed-form log-partition a(eta) = log z(eta).
    pub fn log_partition(&self, eta: &CanonicalParams) -> Result<f64> {
        self.check_eta(eta)?;
        let e = eta.values();
        Ok(match self.kind {
            FamilyKind::Binomial => {
                self.fixed_shape.expect("binomial carries n") as f64 * softplus(e[0])
            }
            FamilyKind::Poisson => e[0].exp(),
            FamilyKind::Normal => 0.5 * (-PI / e[1]).ln() - e[0] * e[0] / (4.0 * e[1]),
            FamilyKind::Gamma => -(e[1] + 1.0) * (-e[0]).ln() + log_gamma_fn(e[1] + 1.0)?,
            FamilyKind::SqrtGamma => {
                let half_shape = 0.5 * (e[1] + 1.0);
                0.5f64.ln() - half_shape * (-e[0]).ln() + log_gamma_fn(half_shape)?
            }
        })
    }

    /// log p(x | eta) = log h(x) + <eta, t(x)> - a(eta).
    pub fn log_pdmf(&self, eta: &CanonicalParams, x: f64) -> Result<f64> {
        let a = self.log_partition(eta)?;
        let lb = self.log_base(x)?;
        let t = self.canonical_stats(x)?;
        Ok(lb + dot(eta.values(), &t) - a)
    }

    /// Convenience exponentiation of [`log_pdmf`](Self::log_pdmf).
    pub fn pdmf(&self, eta: &CanonicalParams, x: f64) -> Result<f64> {
        Ok(self.log_pdmf(eta, x)?.exp())
    }

    /// Mean of the canonical statistics, the gradient of the log-partition.
    pub fn mean_stats(&self, eta: &CanonicalParams) -> Result<MeanParams> {
        self.check_eta(eta)?;
        let e = eta.values();
        let mu_t = match self.kind {
            FamilyKind::Binomial => {
                let n = self.fixed_shape.expect("binomial carries n") as f64;
                vec![n * sigmoid(e[0])]
            }
            FamilyKind::Poisson => vec![e[0].exp()],
            FamilyKind::Normal => {
                let sigma2 = -1.0 / (2.0 * e[1]);
                let mu = e[0] * sigma2;
                vec![mu, sigma2 + mu * mu]
            }
            FamilyKind::Gamma => {
                let alpha = e[1] + 1.0;
                vec![-alpha / e[0], digamma_fn(alpha)? - (-e[0]).ln()]
            }
            FamilyKind::SqrtGamma => {
                let alpha = 0.5 * (e[1] + 1.0);
                vec![-alpha / e[0], 0.5 * (digamma_fn(alpha)? - (-e[0]).ln())]
            }
        };
        Ok(MeanParams { mu_t })
    }

    /// Variance of the canonical statistics, the Hessian of the log-partition.
    ///
    /// Closed form for the one-parameter families; the two-parameter families
    /// use the central-difference Jacobian of [`mean_stats`](Self::mean_stats),
    /// symmetrized.
    pub fn var_stats(&self, eta: &CanonicalParams) -> Result<Matrix> {
        self.check_eta(eta)?;
        let e = eta.values();
        match self.kind {
            FamilyKind::Binomial => {
                let n = self.fixed_shape.expect("binomial carries n") as f64;
                let theta = sigmoid(e[0]);
                Ok(vec![vec![n * theta * (1.0 - theta)]])
            }
            FamilyKind::Poisson => Ok(vec![vec![e[0].exp()]]),
            _ => self.mean_jacobian(eta),
        }
    }

    /// Half the distance from eta to the canonical-domain boundary along
    /// coordinate `j`; finite-difference probes must stay inside.
    fn boundary_room(&self, e: &[f64], j: usize) -> f64 {
        match (self.kind, j) {
            (FamilyKind::Normal, 1) => 0.5 * e[1].abs(),
            (FamilyKind::Gamma | FamilyKind::SqrtGamma, 0) => 0.5 * e[0].abs(),
            (FamilyKind::Gamma | FamilyKind::SqrtGamma, 1) => 0.5 * (e[1] + 1.0),
            _ => f64::INFINITY,
        }
    }

    fn mean_jacobian(&self, eta: &CanonicalParams) -> Result<Matrix> {
        let e = eta.values();
        let d = e.len();
        let mut jac = vec![vec![0.0; d]; d];
        for j in 0..d {
            let base_step = e[j].abs().max(1.0) * f64::EPSILON.powf(1.0 / 3.0);
            let h = base_step.min(self.boundary_room(e, j));
            let mut ep = e.to_vec();
            ep[j] = e[j] + h;
            let hi = ep[j] - e[j];
            let mp = self.mean_stats(&CanonicalParams::new(ep.clone()))?;
            ep[j] = e[j] - h;
            let mm = self.mean_stats(&CanonicalParams::new(ep))?;
            for i in 0..d {
                jac[i][j] = (mp.mu_t[i] - mm.mu_t[i]) / (2.0 * hi);
            }
        }
        // Symmetrize; the Jacobian of a gradient is symmetric up to
        // finite-difference noise.
        let mut out = vec![vec![0.0; d]; d];
        for i in 0..d {
            for j in 0..d {
                out[i][j] = 0.5 * (jac[i][j] + jac[j][i]);
            }
        }
        Ok(out)
    }

    /// Map conventional parameters to canonical ones.
    pub fn to_canonical(&self, std: &StandardParams) -> Result<CanonicalParams> {
        match (self.kind, std) {
            (FamilyKind::Binomial, StandardParams::Binomial { theta }) => {
                if !(*theta > 0.0 && *theta < 1.0) {
                    return Err(Error::Domain(format!(
                        "binomial: theta must be in (0,1) (got {theta})"
                    )));
                }
                Ok(CanonicalParams::from((theta / (1.0 - theta)).ln()))
            }
            (FamilyKind::Poisson, StandardParams::Poisson { lambda }) => {
                if !(*lambda > 0.0) {
                    return Err(Error::Domain(format!(
                        "poisson: lambda must be > 0 (got {lambda})"
                    )));
                }
                Ok(CanonicalParams::from(lambda.ln()))
            }
            (FamilyKind::Normal, StandardParams::Normal { mu, sigma2 }) => {
                if !(*sigma2 > 0.0) {
                    return Err(Error::Domain(format!(
                        "normal: sigma2 must be > 0 (got {sigma2})"
                    )));
                }
                if !mu.is_finite() {
                    return Err(Error::Domain(format!(
                        "normal: mu must be finite (got {mu})"
                    )));
                }
                Ok(CanonicalParams::from((mu / sigma2, -1.0 / (2.0 * sigma2))))
            }
            (FamilyKind::Gamma, StandardParams::Gamma { alpha, theta }) => {
                check_shape_scale("gamma", *alpha, *theta)?;
                Ok(CanonicalParams::from((-1.0 / theta, alpha - 1.0)))
            }
            (FamilyKind::SqrtGamma, StandardParams::SqrtGamma { alpha, theta }) => {
                check_shape_scale("sqrtgamma", *alpha, *theta)?;
                Ok(CanonicalParams::from((-1.0 / theta, 2.0 * alpha - 1.0)))
            }
            _ => Err(Error::Domain(format!(
                "standard parameters {std:?} do not belong to the {} family",
                self.name()
            ))),
        }
    }

    /// Map canonical parameters back to conventional ones.
    pub fn to_standard(&self, eta: &CanonicalParams) -> Result<StandardParams> {
        self.check_eta(eta)?;
        let e = eta.values();
        Ok(match self.kind {
            FamilyKind::Binomial => StandardParams::Binomial {
                theta: sigmoid(e[0]),
            },
            FamilyKind::Poisson => StandardParams::Poisson { lambda: e[0].exp() },
            FamilyKind::Normal => {
                let sigma2 = -1.0 / (2.0 * e[1]);
                StandardParams::Normal {
                    mu: e[0] * sigma2,
                    sigma2,
                }
            }
            FamilyKind::Gamma => StandardParams::Gamma {
                alpha: e[1] + 1.0,
                theta: -1.0 / e[0],
            },
            FamilyKind::SqrtGamma => StandardParams::SqrtGamma {
                alpha: 0.5 * (e[1] + 1.0),
                theta: -1.0 / e[0],
            },
        })
    }

    /// Closed-form differential entropy in nats; available for the normal
    /// family only. Other entropies are obtained numerically by quadrature.
    pub fn entropy_closed(&self, eta: &CanonicalParams) -> Result<f64> {
        if self.kind != FamilyKind::Normal {
            return Err(Error::Unsupported(self.name()));
        }
        self.check_eta(eta)?;
        let sigma2 = -1.0 / (2.0 * eta.values()[1]);
        Ok(0.5 * ((2.0 * PI * sigma2).ln() + 1.0))
    }
}

fn check_shape_scale(name: &str, alpha: f64, theta: f64) -> Result<()> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!(
            "{name}: alpha must be > 0 (got {alpha})"
        )));
    }
    if !(theta > 0.0) {
        return Err(Error::Domain(format!(
            "{name}: theta must be > 0 (got {theta})"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::diff::{fd_gradient, fd_hessian};
    use crate::numeric::linalg::sym_eigenvalues;
    use proptest::prelude::*;

    const EULER_GAMMA: f64 = 0.577215664901532860606512090082;

    fn binom10() -> ClosedFormFamily {
        ClosedFormFamily::binomial(10).unwrap()
    }

    #[test]
    fn log_base_values() {
        assert_eq!(ClosedFormFamily::normal().log_base(3.7).unwrap(), 0.0);
        // log C(1,0) = 0 up to log-gamma rounding.
        assert!(
            ClosedFormFamily::binomial(1)
                .unwrap()
                .log_base(0.0)
                .unwrap()
                .abs()
                < 1e-13
        );
        // C(10, 3) by direct factorial arithmetic.
        let c: u64 = (8..=10).product::<u64>() / (1..=3).product::<u64>();
        assert_eq!(c, 120);
        let lb = binom10().log_base(3.0).unwrap();
        assert!((lb - (c as f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn out_of_support_is_rejected() {
        let b = binom10();
        assert!(b.log_base(11.0).is_err());
        assert!(b.log_base(3.5).is_err());
        assert!(b.log_base(-1.0).is_err());
        assert!(ClosedFormFamily::poisson().log_base(2.5).is_err());
        assert!(ClosedFormFamily::gamma().log_base(0.0).is_err());
        assert!(ClosedFormFamily::gamma().log_base(-1.0).is_err());
    }

    #[test]
    fn log_partition_reference_values() {
        let pois = ClosedFormFamily::poisson();
        assert!((pois.log_partition(&0.0.into()).unwrap() - 1.0).abs() < 1e-15);

        let bern = ClosedFormFamily::binomial(1).unwrap();
        assert!((bern.log_partition(&0.0.into()).unwrap() - 2.0f64.ln()).abs() < 1e-15);

        let gamma = ClosedFormFamily::gamma();
        let a = gamma.log_partition(&(-1.0 / 3.0, 1.0).into()).unwrap();
        assert!((a - 9.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn log_pdmf_reference_values() {
        let pois = ClosedFormFamily::poisson();
        assert!((pois.log_pdmf(&0.0.into(), 0.0).unwrap() + 1.0).abs() < 1e-13);

        let bern = ClosedFormFamily::binomial(1).unwrap();
        assert!((bern.log_pdmf(&0.0.into(), 1.0).unwrap() + 2.0f64.ln()).abs() < 1e-13);

        let norm = ClosedFormFamily::normal();
        let lp = norm.log_pdmf(&(0.0, -0.5).into(), 0.0).unwrap();
        assert!((lp + 0.5 * (2.0 * PI).ln()).abs() < 1e-15);
    }

    #[test]
    fn canonical_stats_per_kind() {
        assert_eq!(
            ClosedFormFamily::poisson().canonical_stats(4.0).unwrap(),
            vec![4.0]
        );
        assert_eq!(
            ClosedFormFamily::normal().canonical_stats(2.0).unwrap(),
            vec![2.0, 4.0]
        );
        assert_eq!(
            ClosedFormFamily::sqrt_gamma().canonical_stats(1.0).unwrap(),
            vec![1.0, 0.0]
        );
    }

    #[test]
    fn mean_stats_reference_values() {
        let pois = ClosedFormFamily::poisson();
        let m = pois.mean_stats(&2.0f64.ln().into()).unwrap();
        assert!((m.mu_t[0] - 2.0).abs() < 1e-14);

        let m = binom10().mean_stats(&0.0.into()).unwrap();
        assert!((m.mu_t[0] - 5.0).abs() < 1e-14);

        let gamma = ClosedFormFamily::gamma();
        let m = gamma.mean_stats(&(-1.0 / 3.0, 1.0).into()).unwrap();
        assert!((m.mu_t[0] - 6.0).abs() < 1e-12);
        // psi(2) = 1 - Euler-Mascheroni constant.
        let expected = (1.0 - EULER_GAMMA) + 3.0f64.ln();
        assert!((m.mu_t[1] - expected).abs() < 1e-12);
    }

    #[test]
    fn var_stats_reference_values() {
        let pois = ClosedFormFamily::poisson();
        let v = pois.var_stats(&2.0f64.ln().into()).unwrap();
        assert!((v[0][0] - 2.0).abs() < 1e-14);

        let v = binom10().var_stats(&0.0.into()).unwrap();
        assert!((v[0][0] - 2.5).abs() < 1e-14);

        let norm = ClosedFormFamily::normal();
        let v = norm.var_stats(&(0.0, -0.5).into()).unwrap();
        assert!(
            (v[0][0] - 1.0).abs() < 1e-6,
            "Var(x) = sigma2 = 1, got {}",
            v[0][0]
        );
    }

    #[test]
    fn gradient_identity_against_finite_differences() {
        for (fam, eta) in crate::suites::reference_grid() {
            let closed = fam.mean_stats(&eta).unwrap().mu_t;
            let f = |e: &[f64]| {
                fam.log_partition(&CanonicalParams::new(e.to_vec()))
                    .unwrap()
            };
            let fd = fd_gradient(f, eta.values()).unwrap();
            for (c, g) in closed.iter().zip(&fd) {
                assert!(
                    (c - g).abs() <= 1e-6 * c.abs().max(1.0),
                    "{}: closed {c} vs fd {g}",
                    fam.name()
                );
            }
        }
    }

    #[test]
    fn hessian_identity_and_psd() {
        for (fam, eta) in crate::suites::reference_grid() {
            let var = fam.var_stats(&eta).unwrap();
            let f = |e: &[f64]| {
                fam.log_partition(&CanonicalParams::new(e.to_vec()))
                    .unwrap()
            };
            let fd = fd_hessian(f, eta.values()).unwrap();
            let mut max_entry = 1.0f64;
            for row in &var {
                for v in row {
                    max_entry = max_entry.max(v.abs());
                }
            }
            for (vr, fr) in var.iter().zip(&fd) {
                for (v, g) in vr.iter().zip(fr) {
                    assert!(
                        (v - g).abs() <= 1e-4 * max_entry,
                        "{}: var {v} vs fd {g}",
                        fam.name()
                    );
                }
            }
            let eigs = sym_eigenvalues(&var).unwrap();
            assert!(
                eigs[0] >= -1e-8 * eigs.last().unwrap().max(1.0),
                "{}: not PSD, eigenvalues {eigs:?}",
                fam.name()
            );
        }
    }

    #[test]
    fn parameter_maps_reference_values() {
        let b = binom10();
        let eta = b
            .to_canonical(&StandardParams::Binomial { theta: 0.5 })
            .unwrap();
        assert!(eta.values()[0].abs() < 1e-15);

        let n = ClosedFormFamily::normal();
        let eta = n
            .to_canonical(&StandardParams::Normal {
                mu: 0.0,
                sigma2: 1.0,
            })
            .unwrap();
        assert_eq!(eta.values(), &[0.0, -0.5]);

        let g = ClosedFormFamily::gamma();
        let eta = g
            .to_canonical(&StandardParams::Gamma {
                alpha: 2.0,
                theta: 3.0,
            })
            .unwrap();
        assert!((eta.values()[0] + 1.0 / 3.0).abs() < 1e-15);
        assert!((eta.values()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parameter_bounds_are_enforced() {
        let b = binom10();
        assert!(b
            .to_canonical(&StandardParams::Binomial { theta: 0.0 })
            .is_err());
        assert!(b
            .to_canonical(&StandardParams::Binomial { theta: 1.0 })
            .is_err());
        assert!(ClosedFormFamily::poisson()
            .to_canonical(&StandardParams::Poisson { lambda: -2.0 })
            .is_err());
        assert!(ClosedFormFamily::normal()
            .to_canonical(&StandardParams::Normal {
                mu: 0.0,
                sigma2: 0.0
            })
            .is_err());
        // Kind mismatch.
        assert!(ClosedFormFamily::poisson()
            .to_canonical(&StandardParams::Binomial { theta: 0.5 })
            .is_err());
    }

    #[test]
    fn entropy_closed_reference_values() {
        let n = ClosedFormFamily::normal();
        let eta1 = n
            .to_canonical(&StandardParams::Normal {
                mu: 0.0,
                sigma2: 1.0,
            })
            .unwrap();
        let h1 = n.entropy_closed(&eta1).unwrap();
        assert!((h1 - 0.5 * ((2.0 * PI).ln() + 1.0)).abs() < 1e-15);

        // Solving the formula for H = 1 gives sigma2 = e / (2 pi).
        let s2 = std::f64::consts::E / (2.0 * PI);
        let eta2 = n
            .to_canonical(&StandardParams::Normal {
                mu: 0.0,
                sigma2: s2,
            })
            .unwrap();
        assert!((n.entropy_closed(&eta2).unwrap() - 1.0).abs() < 1e-14);

        // Scaling sigma2 by 4 adds log 2.
        let eta4 = n
            .to_canonical(&StandardParams::Normal {
                mu: 0.0,
                sigma2: 4.0,
            })
            .unwrap();
        let h4 = n.entropy_closed(&eta4).unwrap();
        assert!((h4 - h1 - 2.0f64.ln()).abs() < 1e-14);

        assert!(matches!(
            ClosedFormFamily::poisson().entropy_closed(&0.0.into()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn normalization_across_reference_grid() {
        use crate::numeric::newton::Tolerance;
        use crate::numeric::quad::integrate;
        for (fam, eta) in crate::suites::reference_grid() {
            let total = match fam.support() {
                SupportDescriptor::FiniteIntegers { max } => (0..=max)
                    .map(|k| fam.pdmf(&eta, k as f64).unwrap())
                    .sum::<f64>(),
                SupportDescriptor::NonNegativeIntegers => {
                    // Truncate once the remaining mass is provably negligible.
                    let mut total = 0.0;
                    let mut k = 0.0f64;
                    loop {
                        let p = fam.pdmf(&eta, k).unwrap();
                        total += p;
                        if total > 0.999_999_999_99 || k > 1e6 {
                            break total;
                        }
                        k += 1.0;
                    }
                }
                _ => integrate(
                    |x| fam.pdmf(&eta, x).unwrap_or(0.0),
                    fam.quad_domain().unwrap(),
                    &Tolerance {
                        abs_tol: 1e-12,
                        rel_tol: 1e-10,
                        max_iter: 1,
                    },
                )
                .unwrap(),
            };
            assert!((total - 1.0).abs() < 1e-8, "{}: mass {total}", fam.name());
        }
    }

    proptest! {
        #[test]
        fn binomial_roundtrip(theta in 0.001f64..0.999) {
            let b = binom10();
            let eta = b.to_canonical(&StandardParams::Binomial { theta }).unwrap();
            if let StandardParams::Binomial { theta: back } = b.to_standard(&eta).unwrap() {
                prop_assert!((back - theta).abs() < 1e-12);
            } else {
                prop_assert!(false);
            }
        }

        #[test]
        fn normal_roundtrip(mu in -20.0f64..20.0, sigma2 in 0.01f64..50.0) {
            let n = ClosedFormFamily::normal();
            let eta = n.to_canonical(&StandardParams::Normal { mu, sigma2 }).unwrap();
            if let StandardParams::Normal { mu: m, sigma2: s } = n.to_standard(&eta).unwrap() {
                prop_assert!((m - mu).abs() < 1e-12 * mu.abs().max(1.0));
                prop_assert!((s - sigma2).abs() < 1e-12 * sigma2.max(1.0));
            } else {
                prop_assert!(false);
            }
        }

        #[test]
        fn gamma_roundtrip(alpha in 0.05f64..20.0, theta in 0.05f64..20.0) {
            for fam in [ClosedFormFamily::gamma(), ClosedFormFamily::sqrt_gamma()] {
                let std = match fam.kind() {
                    FamilyKind::Gamma => StandardParams::Gamma { alpha, theta },
                    _ => StandardParams::SqrtGamma { alpha, theta },
                };
                let eta = fam.to_canonical(&std).unwrap();
                let back = fam.to_standard(&eta).unwrap();
                let (a2, t2) = match back {
                    StandardParams::Gamma { alpha, theta }
                    | StandardParams::SqrtGamma { alpha, theta } => (alpha, theta),
                    _ => unreachable!(),
                };
                prop_assert!((a2 - alpha).abs() < 1e-12 * alpha.max(1.0));
                prop_assert!((t2 - theta).abs() < 1e-12 * theta.max(1.0));
            }
        }

        #[test]
        fn mean_map_matches_standard_parameters(theta in 0.05f64..0.95, lambda in 0.1f64..20.0) {
            // Binomial mean nθ and Poisson mean λ through the canonical map.
            let b = binom10();
            let eta = b.to_canonical(&StandardParams::Binomial { theta }).unwrap();
            let m = b.mean_stats(&eta).unwrap();
            prop_assert!((m.mu_t[0] - 10.0 * theta).abs() < 1e-10);

            let p = ClosedFormFamily::poisson();
            let eta = p.to_canonical(&StandardParams::Poisson { lambda }).unwrap();
            let m = p.mean_stats(&eta).unwrap();
            prop_assert!((m.mu_t[0] - lambda).abs() < 1e-10 * lambda.max(1.0));
        }
    }
}
