//! Entropy, cross-entropy (risk), entropy relative to a prior measure, KL
//! divergence, log-loss, the Gibbs inequality, multinomial counting
//! identities, and concavity witnesses, all on finite distributions.
//!
//! Conventions: 0 log 0 = 0 throughout; impossible events surface as explicit
//! infinities, never as overflow. Support matching is by index position.
//! Reductions over the support go through a sorted sum, so every metric here
//! is exactly invariant under simultaneous permutation of its inputs.

use crate::error::{Error, Result};
use crate::numeric::special::log_gamma_fn;
use crate::numeric::stable_sum;

/// Threshold below which two distributions count as equal, in total
/// variation distance.
pub const EQUALITY_TV: f64 = 1e-12;

/// A probability distribution on finitely many labelled points.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution {
    points: Vec<f64>,
    probs: Vec<f64>,
}

impl FiniteDistribution {
    /// Validate and build: probabilities must be nonnegative, sum to one
    /// within 1e-12, and sit on distinct points.
    pub fn new(points: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidDistribution(
                "support must be non-empty".into(),
            ));
        }
        if points.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} points but {} probabilities",
                points.len(),
                probs.len()
            )));
        }
        if points.iter().any(|x| x.is_nan()) {
            return Err(Error::InvalidDistribution(
                "support points must not be NaN".into(),
            ));
        }
        let mut sorted: Vec<f64> = points.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidDistribution(
                "support points must be distinct".into(),
            ));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidDistribution(
                "probabilities must be finite and >= 0".into(),
            ));
        }
        let total = stable_sum(probs.clone());
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1 within 1e-12"
            )));
        }
        Ok(Self { points, probs })
    }

    /// Uniform distribution on the given points.
    pub fn uniform(points: Vec<f64>) -> Result<Self> {
        let k = points.len();
        Self::new(points, vec![1.0 / k as f64; k])
    }

    /// Distribution on the integer points 0..K-1.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let points = (0..probs.len()).map(|i| i as f64).collect();
        Self::new(points, probs)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    /// Always false: the constructor rejects empty supports.
    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Total variation distance, half the L1 distance.
pub fn tv_distance(a: &FiniteDistribution, b: &FiniteDistribution) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SupportMismatch(format!(
            "lengths {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let terms: Vec<f64> = a
        .probs
        .iter()
        .zip(&b.probs)
        .map(|(x, y)| (x - y).abs())
        .collect();
    Ok(0.5 * stable_sum(terms))
}

/// Affine equivalence class of entropy scores: reported entropy is
/// `scale_k * H_nats + offset_c`. Nats use k = 1, bits k = 1/ln 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyUnits {
    pub scale_k: f64,
    pub offset_c: f64,
}

impl EntropyUnits {
    pub fn new(scale_k: f64, offset_c: f64) -> Result<Self> {
        if !(scale_k > 0.0) || !scale_k.is_finite() || !offset_c.is_finite() {
            return Err(Error::Domain(format!(
                "entropy units: scale_k must be > 0 and finite (got k={scale_k}, c={offset_c})"
            )));
        }
        Ok(Self { scale_k, offset_c })
    }

    pub fn nats() -> Self {
        Self {
            scale_k: 1.0,
            offset_c: 0.0,
        }
    }

    pub fn bits() -> Self {
        Self {
            scale_k: 1.0 / std::f64::consts::LN_2,
            offset_c: 0.0,
        }
    }

    fn apply(&self, nats: f64) -> f64 {
        self.scale_k * nats + self.offset_c
    }

    /// For divergence-like quantities the additive constant cancels.
    fn apply_scale_only(&self, nats: f64) -> f64 {
        self.scale_k * nats
    }
}

/// Counts per class for the multinomial identities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountVector {
    counts: Vec<u64>,
    n: u64,
}

impl CountVector {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyInput);
        }
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::Domain(
                "count vector must have a positive total".into(),
            ));
        }
        Ok(Self { counts, n })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.n
    }
}

/// H(Q) = -Σ q log q, mapped through the units.
pub fn entropy(q: &FiniteDistribution, units: EntropyUnits) -> f64 {
    let terms: Vec<f64> = q
        .probs()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .collect();
    units.apply(stable_sum(terms))
}

/// Log-loss -log p(x) of the observed index under the model `p`; +inf on a
/// zero-probability outcome.
pub fn log_loss(x_index: usize, p: &FiniteDistribution) -> Result<f64> {
    let pi = *p.probs().get(x_index).ok_or(Error::IndexOutOfRange {
        index: x_index,
        len: p.len(),
    })?;
    Ok(if pi == 0.0 { f64::INFINITY } else { -pi.ln() })
}

/// Mean log-loss H(Q, P) = -Σ q log p, the risk of model P under data
/// distribution Q; +inf wherever Q puts mass on a P-null point.
pub fn cross_entropy(
    q: &FiniteDistribution,
    p: &FiniteDistribution,
    units: EntropyUnits,
) -> Result<f64> {
    if q.len() != p.len() {
        return Err(Error::SupportMismatch(format!(
            "lengths {} vs {}",
            q.len(),
            p.len()
        )));
    }
    let mut terms = Vec::with_capacity(q.len());
    for (&qi, &pi) in q.probs().iter().zip(p.probs()) {
        if qi == 0.0 {
            continue;
        }
        if pi == 0.0 {
            return Ok(f64::INFINITY);
        }
        terms.push(-qi * pi.ln());
    }
    Ok(units.apply(stable_sum(terms)))
}

fn kl_nats(q: &FiniteDistribution, p: &FiniteDistribution) -> Result<f64> {
    if q.len() != p.len() {
        return Err(Error::SupportMismatch(format!(
            "lengths {} vs {}",
            q.len(),
            p.len()
        )));
    }
    let mut terms = Vec::with_capacity(q.len());
    for (&qi, &pi) in q.probs().iter().zip(p.probs()) {
        if qi == 0.0 {
            continue;
        }
        if pi == 0.0 {
            return Ok(f64::INFINITY);
        }
        terms.push(qi * (qi / pi).ln());
    }
    Ok(stable_sum(terms))
}

/// Entropy of Q relative to the prior measure P: G(Q, P) = H(Q) - H(Q, P),
/// which equals -KL(Q || P). Nonpositive, zero only at Q = P. Only the scale
/// part of the units applies; the additive constant cancels.
pub fn relative_entropy_g(
    q: &FiniteDistribution,
    p: &FiniteDistribution,
    units: EntropyUnits,
) -> Result<f64> {
    Ok(units.apply_scale_only(-kl_nats(q, p)?))
}

/// KL divergence D(Q, P) = H(Q, P) - H(Q) >= 0.
pub fn kl_divergence(
    q: &FiniteDistribution,
    p: &FiniteDistribution,
    units: EntropyUnits,
) -> Result<f64> {
    Ok(units.apply_scale_only(kl_nats(q, p)?))
}

/// Outcome of a Gibbs-inequality check: `lhs` is the risk H(Q, P), `rhs` the
/// entropy H(Q), both in nats.
#[derive(Debug, Clone, Copy)]
pub struct GibbsReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub tight: bool,
}

/// Check the properness inequality H(Q, P) >= H(Q). A failure beyond rounding
/// indicates a bug in the metrics themselves and is escalated to an error.
pub fn gibbs_check(q: &FiniteDistribution, p: &FiniteDistribution) -> Result<GibbsReport> {
    let lhs = cross_entropy(q, p, EntropyUnits::nats())?;
    let rhs = entropy(q, EntropyUnits::nats());
    let holds = lhs == f64::INFINITY || lhs - rhs >= -1e-12;
    let tight = tv_distance(q, p)? <= EQUALITY_TV;
    if !holds {
        return Err(Error::InvariantViolation(format!(
            "Gibbs inequality failed: H(Q,P) = {lhs} < H(Q) = {rhs}"
        )));
    }
    Ok(GibbsReport {
        lhs,
        rhs,
        holds,
        tight,
    })
}

/// log of the multinomial coefficient n! / (n_1! ... n_K!).
pub fn log_multiplicity(d: &CountVector) -> Result<f64> {
    let total = log_gamma_fn(d.total() as f64 + 1.0)?;
    let mut terms = Vec::with_capacity(d.counts().len());
    for &nk in d.counts() {
        terms.push(log_gamma_fn(nk as f64 + 1.0)?);
    }
    Ok(total - stable_sum(terms))
}

/// log of the probability of observing the counts `d` under class
/// probabilities `p`: log W + Σ n_k log p_k. Counts on zero-probability
/// classes make the macrostate impossible and yield -inf.
pub fn log_macrostate_prob(d: &CountVector, p: &FiniteDistribution) -> Result<f64> {
    if d.counts().len() != p.len() {
        return Err(Error::SupportMismatch(format!(
            "counts length {} vs distribution length {}",
            d.counts().len(),
            p.len()
        )));
    }
    let mut terms = Vec::with_capacity(p.len());
    for (&nk, &pk) in d.counts().iter().zip(p.probs()) {
        if nk == 0 {
            continue;
        }
        if pk == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        terms.push(nk as f64 * pk.ln());
    }
    Ok(log_multiplicity(d)? + stable_sum(terms))
}

fn empirical_entropy_nats(d: &CountVector) -> f64 {
    // H of the frequencies n_k / n, written as log n - (1/n) Σ n_k log n_k so
    // no intermediate distribution needs to pass a sum-to-one check.
    let n = d.total() as f64;
    let terms: Vec<f64> = d
        .counts()
        .iter()
        .filter(|&&nk| nk > 0)
        .map(|&nk| nk as f64 * (nk as f64).ln())
        .collect();
    n.ln() - stable_sum(terms) / n
}

/// (1/n) log W - H(q_hat): the finite-n defect of the counting identity for
/// entropy. Shrinks toward zero as n grows at fixed frequencies.
pub fn entropy_rate_gap(d: &CountVector) -> Result<f64> {
    let n = d.total() as f64;
    Ok(log_multiplicity(d)? / n - empirical_entropy_nats(d))
}

/// (1/n) log P(D | p) - G(q_hat, p): the finite-n defect of the counting
/// identity for entropy with a prior measure.
pub fn g_rate_gap(d: &CountVector, p: &FiniteDistribution) -> Result<f64> {
    if d.counts().len() != p.len() {
        return Err(Error::SupportMismatch(format!(
            "counts length {} vs distribution length {}",
            d.counts().len(),
            p.len()
        )));
    }
    if d.counts()
        .iter()
        .zip(p.probs())
        .any(|(&nk, &pk)| nk > 0 && pk == 0.0)
    {
        return Err(Error::Domain(
            "g_rate_gap: classes with positive counts must have positive prior probability".into(),
        ));
    }
    let n = d.total() as f64;
    let lhs = log_macrostate_prob(d, p)? / n;
    // G(q_hat, p) = -Σ q_hat log(q_hat / p)
    let terms: Vec<f64> = d
        .counts()
        .iter()
        .zip(p.probs())
        .filter(|(&nk, _)| nk > 0)
        .map(|(&nk, &pk)| {
            let qk = nk as f64 / n;
            -qk * (qk / pk).ln()
        })
        .collect();
    Ok(lhs - stable_sum(terms))
}

/// Pointwise convex combination (1 - lambda) q0 + lambda q1 on a shared
/// support.
pub fn mixture(
    q0: &FiniteDistribution,
    q1: &FiniteDistribution,
    lambda: f64,
) -> Result<FiniteDistribution> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!(
            "mixture: lambda must be in [0,1] (got {lambda})"
        )));
    }
    if q0.points() != q1.points() {
        return Err(Error::SupportMismatch(
            "mixture requires identical support points".into(),
        ));
    }
    let probs = q0
        .probs()
        .iter()
        .zip(q1.probs())
        .map(|(&a, &b)| (1.0 - lambda) * a + lambda * b)
        .collect();
    FiniteDistribution::new(q0.points().to_vec(), probs)
}

/// Both sides of the strict-concavity inequality for H (and for G when a
/// prior is supplied), plus the mixture-preserving risk identity.
#[derive(Debug, Clone)]
pub struct ConcavityReport {
    /// H of the mixture, nats.
    pub lhs: f64,
    /// Convex combination of the endpoint entropies, nats.
    pub rhs: f64,
    pub strict: bool,
    pub g_lhs: Option<f64>,
    pub g_rhs: Option<f64>,
    /// |H(Q_lambda, P) - interpolated risk| when a prior is supplied.
    pub risk_identity_gap: Option<f64>,
}

/// Witness strict concavity of H (and of G, given a prior) at one mixture.
///
/// With q0 != q1 the mixture entropy must exceed the interpolated entropies
/// strictly; the risk is checked to be exactly mixture-preserving within
/// 1e-12. Any failed relation is an invariant violation.
pub fn concavity_witness(
    q0: &FiniteDistribution,
    q1: &FiniteDistribution,
    lambda: f64,
    prior: Option<&FiniteDistribution>,
) -> Result<ConcavityReport> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!(
            "concavity_witness: lambda must lie strictly inside (0,1) (got {lambda})"
        )));
    }
    let mix = mixture(q0, q1, lambda)?;
    let nats = EntropyUnits::nats();
    let lhs = entropy(&mix, nats);
    let rhs = (1.0 - lambda) * entropy(q0, nats) + lambda * entropy(q1, nats);
    let strict = tv_distance(q0, q1)? > EQUALITY_TV;
    if strict {
        if lhs <= rhs {
            return Err(Error::InvariantViolation(format!(
                "entropy concavity failed: H(mixture) = {lhs} <= {rhs}"
            )));
        }
    } else if (lhs - rhs).abs() > 1e-12 {
        return Err(Error::InvariantViolation(format!(
            "entropy of mixture of equal distributions deviates: {lhs} vs {rhs}"
        )));
    }
    let (mut g_lhs, mut g_rhs, mut risk_identity_gap) = (None, None, None);
    if let Some(p) = prior {
        let gl = relative_entropy_g(&mix, p, nats)?;
        let gr = (1.0 - lambda) * relative_entropy_g(q0, p, nats)?
            + lambda * relative_entropy_g(q1, p, nats)?;
        if strict {
            if gl <= gr {
                return Err(Error::InvariantViolation(format!(
                    "relative-entropy concavity failed: G(mixture) = {gl} <= {gr}"
                )));
            }
        } else if (gl - gr).abs() > 1e-12 {
            return Err(Error::InvariantViolation(format!(
                "relative entropy of mixture of equal distributions deviates: {gl} vs {gr}"
            )));
        }
        let risk_mix = cross_entropy(&mix, p, nats)?;
        let risk_combo =
            (1.0 - lambda) * cross_entropy(q0, p, nats)? + lambda * cross_entropy(q1, p, nats)?;
        let gap = if risk_mix == f64::INFINITY && risk_combo == f64::INFINITY {
            0.0
        } else {
            (risk_mix - risk_combo).abs()
        };
        if gap > 1e-12 {
            return Err(Error::InvariantViolation(format!(
                "risk is not mixture-preserving: gap {gap}"
            )));
        }
        g_lhs = Some(gl);
        g_rhs = Some(gr);
        risk_identity_gap = Some(gap);
    }
    Ok(ConcavityReport {
        lhs,
        rhs,
        strict,
        g_lhs,
        g_rhs,
        risk_identity_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dist(probs: &[f64]) -> FiniteDistribution {
        FiniteDistribution::from_probs(probs.to_vec()).unwrap()
    }

    #[test]
    fn entropy_reference_values() {
        let u4 = dist(&[0.25; 4]);
        assert!((entropy(&u4, EntropyUnits::nats()) - 4.0f64.ln()).abs() < 1e-14);

        let point = dist(&[1.0, 0.0, 0.0]);
        assert_eq!(entropy(&point, EntropyUnits::nats()), 0.0);

        // Direct sum: 1/2 * 1 + 1/4 * 2 + 1/4 * 2 bits.
        let q = dist(&[0.5, 0.25, 0.25]);
        assert!((entropy(&q, EntropyUnits::bits()) - 1.5).abs() < 1e-14);
    }

    #[test]
    fn log_loss_reference_values() {
        let u2 = dist(&[0.5, 0.5]);
        assert!((log_loss(0, &u2).unwrap() - 2.0f64.ln()).abs() < 1e-15);
        let p = dist(&[1.0, 0.0]);
        assert_eq!(log_loss(0, &p).unwrap(), 0.0);
        assert_eq!(log_loss(1, &p).unwrap(), f64::INFINITY);
        assert!(matches!(
            log_loss(5, &p),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn cross_entropy_reference_values() {
        let nats = EntropyUnits::nats();
        let q = dist(&[0.3, 0.7]);
        let h = entropy(&q, nats);
        assert!((cross_entropy(&q, &q, nats).unwrap() - h).abs() < 1e-14);

        let point = dist(&[1.0, 0.0]);
        let u2 = dist(&[0.5, 0.5]);
        assert!((cross_entropy(&point, &u2, nats).unwrap() - 2.0f64.ln()).abs() < 1e-15);
        assert_eq!(cross_entropy(&u2, &point, nats).unwrap(), f64::INFINITY);
    }

    #[test]
    fn relative_entropy_reference_values() {
        let nats = EntropyUnits::nats();
        let q = dist(&[0.3, 0.7]);
        assert_eq!(relative_entropy_g(&q, &q, nats).unwrap(), 0.0);

        let point = dist(&[1.0, 0.0]);
        let u2 = dist(&[0.5, 0.5]);
        let g = relative_entropy_g(&point, &u2, nats).unwrap();
        assert!((g + 2.0f64.ln()).abs() < 1e-15);

        // Against a uniform prior over K points, G = H(q) - log K.
        let q3 = dist(&[0.2, 0.3, 0.5]);
        let u3 = dist(&[1.0 / 3.0; 3]);
        let g = relative_entropy_g(&q3, &u3, nats).unwrap();
        let expected = entropy(&q3, nats) - 3.0f64.ln();
        assert!((g - expected).abs() < 1e-13);
    }

    #[test]
    fn kl_mirrors_relative_entropy_exactly() {
        let nats = EntropyUnits::nats();
        let q = dist(&[0.1, 0.2, 0.7]);
        let p = dist(&[0.3, 0.3, 0.4]);
        let kl = kl_divergence(&q, &p, nats).unwrap();
        let g = relative_entropy_g(&q, &p, nats).unwrap();
        assert_eq!(kl, -g);
        assert!(kl > 0.0);
        assert_eq!(
            kl_divergence(&dist(&[0.5, 0.5]), &dist(&[1.0, 0.0]), nats).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn gibbs_reference_cases() {
        let u2 = dist(&[0.5, 0.5]);
        let r = gibbs_check(&u2, &u2).unwrap();
        assert!(r.holds && r.tight);

        let q = dist(&[0.9, 0.1]);
        let r = gibbs_check(&q, &u2).unwrap();
        assert!(r.holds && !r.tight);
        let gap = r.lhs - r.rhs;
        let kl = kl_divergence(&q, &u2, EntropyUnits::nats()).unwrap();
        assert!((gap - kl).abs() < 1e-14);

        let a = dist(&[1.0, 0.0]);
        let b = dist(&[0.0, 1.0]);
        let r = gibbs_check(&a, &b).unwrap();
        assert!(r.holds);
        assert_eq!(r.lhs, f64::INFINITY);
    }

    #[test]
    fn multiplicity_reference_values() {
        // 4!/(2!2!) = 6 and 3! = 6 by direct counting.
        let d = CountVector::new(vec![2, 2]).unwrap();
        assert!((log_multiplicity(&d).unwrap() - 6.0f64.ln()).abs() < 1e-12);

        let d = CountVector::new(vec![7, 0, 0]).unwrap();
        assert!(log_multiplicity(&d).unwrap().abs() < 1e-12);

        let d = CountVector::new(vec![1, 1, 1]).unwrap();
        assert!((log_multiplicity(&d).unwrap() - 6.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn macrostate_probability_reference_values() {
        let d = CountVector::new(vec![1, 1]).unwrap();
        let p = dist(&[0.5, 0.5]);
        assert!((log_macrostate_prob(&d, &p).unwrap() - 0.5f64.ln()).abs() < 1e-12);

        let d = CountVector::new(vec![5]).unwrap();
        let p = FiniteDistribution::new(vec![0.0], vec![1.0]).unwrap();
        assert!(log_macrostate_prob(&d, &p).unwrap().abs() < 1e-12);

        let d = CountVector::new(vec![2, 2]).unwrap();
        let p = dist(&[0.5, 0.5]);
        let expected = (6.0f64 / 16.0).ln();
        assert!((log_macrostate_prob(&d, &p).unwrap() - expected).abs() < 1e-12);

        let d = CountVector::new(vec![1, 1]).unwrap();
        let p = dist(&[1.0, 0.0]);
        assert_eq!(log_macrostate_prob(&d, &p).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn rate_gaps_shrink_with_n() {
        let d1 = CountVector::new(vec![1, 1]).unwrap();
        let gap1 = entropy_rate_gap(&d1).unwrap();
        let expected = 0.5 * 2.0f64.ln() - 2.0f64.ln();
        assert!((gap1 - expected).abs() < 1e-12);

        let d10 = CountVector::new(vec![10, 10]).unwrap();
        let gap10 = entropy_rate_gap(&d10).unwrap();
        assert!(gap10.abs() < gap1.abs());

        // With matching prior the two gaps coincide: the cross term cancels.
        let p = dist(&[0.5, 0.5]);
        let g = g_rate_gap(&d10, &p).unwrap();
        assert!((g - gap10).abs() < 1e-12);
    }

    #[test]
    fn mixture_reference_values() {
        let a = dist(&[1.0, 0.0]);
        let b = dist(&[0.0, 1.0]);
        assert_eq!(mixture(&a, &b, 0.0).unwrap().probs(), a.probs());
        assert_eq!(mixture(&a, &b, 1.0).unwrap().probs(), b.probs());
        assert_eq!(mixture(&a, &b, 0.5).unwrap().probs(), &[0.5, 0.5]);
        assert!(mixture(&a, &b, 1.5).is_err());
    }

    #[test]
    fn concavity_witness_reference_cases() {
        let a = dist(&[1.0, 0.0]);
        let b = dist(&[0.0, 1.0]);
        let r = concavity_witness(&a, &b, 0.5, None).unwrap();
        assert!(r.strict);
        assert!((r.lhs - 2.0f64.ln()).abs() < 1e-14);
        assert_eq!(r.rhs, 0.0);

        let r = concavity_witness(&a, &a.clone(), 0.3, None).unwrap();
        assert!(!r.strict);
        assert!((r.lhs - r.rhs).abs() <= 1e-12);

        let p = dist(&[0.6, 0.4]);
        let r = concavity_witness(&a, &b, 0.25, Some(&p)).unwrap();
        assert!(r.g_lhs.unwrap() > r.g_rhs.unwrap());
        assert!(r.risk_identity_gap.unwrap() <= 1e-12);
    }

    #[test]
    fn permutation_leaves_g_exactly_unchanged() {
        let q = dist(&[0.1, 0.2, 0.3, 0.4]);
        let p = dist(&[0.4, 0.1, 0.2, 0.3]);
        let g1 = relative_entropy_g(&q, &p, EntropyUnits::nats()).unwrap();
        let perm = [2usize, 0, 3, 1];
        let qp =
            FiniteDistribution::from_probs(perm.iter().map(|&i| q.probs()[i]).collect()).unwrap();
        let pp =
            FiniteDistribution::from_probs(perm.iter().map(|&i| p.probs()[i]).collect()).unwrap();
        let g2 = relative_entropy_g(&qp, &pp, EntropyUnits::nats()).unwrap();
        assert_eq!(g1, g2);
    }

    #[test]
    fn invalid_distributions_are_rejected() {
        assert!(FiniteDistribution::from_probs(vec![0.5, 0.6]).is_err());
        assert!(FiniteDistribution::from_probs(vec![-0.1, 1.1]).is_err());
        assert!(FiniteDistribution::new(vec![0.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(FiniteDistribution::new(vec![], vec![]).is_err());
    }

    proptest! {
        #[test]
        fn kl_nonnegative_and_consistent(
            raw_q in prop::collection::vec(0.01f64..1.0, 2..8),
            raw_p in prop::collection::vec(0.01f64..1.0, 2..8),
        ) {
            let k = raw_q.len().min(raw_p.len());
            let qs: f64 = raw_q[..k].iter().sum();
            let ps: f64 = raw_p[..k].iter().sum();
            let q = dist(&raw_q[..k].iter().map(|x| x / qs).collect::<Vec<_>>());
            let p = dist(&raw_p[..k].iter().map(|x| x / ps).collect::<Vec<_>>());
            let nats = EntropyUnits::nats();
            let kl = kl_divergence(&q, &p, nats).unwrap();
            prop_assert!(kl >= -1e-12);
            // Two routes to the same number.
            let via_risk = cross_entropy(&q, &p, nats).unwrap() - entropy(&q, nats);
            prop_assert!((kl - via_risk).abs() < 1e-12);
            prop_assert_eq!(relative_entropy_g(&q, &p, nats).unwrap(), -kl);
        }

        #[test]
        fn bits_are_nats_over_log_two(raw in prop::collection::vec(0.01f64..1.0, 2..8)) {
            let s: f64 = raw.iter().sum();
            let q = dist(&raw.iter().map(|x| x / s).collect::<Vec<_>>());
            let h_nats = entropy(&q, EntropyUnits::nats());
            let h_bits = entropy(&q, EntropyUnits::bits());
            prop_assert!((h_bits * std::f64::consts::LN_2 - h_nats).abs() < 1e-12);
        }

        #[test]
        fn offset_cancels_in_relative_entropy(
            raw_q in prop::collection::vec(0.01f64..1.0, 3..6),
            raw_p in prop::collection::vec(0.01f64..1.0, 3..6),
            c in -10.0f64..10.0,
        ) {
            let k = raw_q.len().min(raw_p.len());
            let qs: f64 = raw_q[..k].iter().sum();
            let ps: f64 = raw_p[..k].iter().sum();
            let q = dist(&raw_q[..k].iter().map(|x| x / qs).collect::<Vec<_>>());
            let p = dist(&raw_p[..k].iter().map(|x| x / ps).collect::<Vec<_>>());
            let plain = relative_entropy_g(&q, &p, EntropyUnits::nats()).unwrap();
            let offset = relative_entropy_g(&q, &p, EntropyUnits::new(1.0, c).unwrap()).unwrap();
            prop_assert_eq!(plain, offset);
        }
    }
}
