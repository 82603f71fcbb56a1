//! JSON problem and solution documents, the file interface of the solver.
//!
//! One document per file, UTF-8. Numbers are serialized in the shortest
//! representation that reparses to the identical double, so written documents
//! are byte-stable and round-trip exact.

use serde::{Deserialize, Serialize};

use crate::entropy::{entropy, relative_entropy_g, EntropyUnits};
use crate::error::{Error, Result};
use crate::maxent::{MaxEntSolution, MomentProblem};
use crate::numeric::newton::Tolerance;

pub const SCHEMA_VERSION: u32 = 1;

/// A support point: either a real value or an opaque label. Labels are mapped
/// to the integer points 0..K-1 when the problem is numeric.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SupportEntry {
    Real(f64),
    Label(String),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
}

/// The on-disk description of a moment problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemDocument {
    pub schema_version: u32,
    pub support: Vec<SupportEntry>,
    pub log_base_weights: Vec<f64>,
    pub stats: Vec<Vec<f64>>,
    pub target_moments: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

impl ProblemDocument {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Invalid(format!(
                "schema_version: expected {SCHEMA_VERSION} (got {})",
                self.schema_version
            )));
        }
        let k = self.support.len();
        if k == 0 {
            return Err(Error::Invalid("support: must be non-empty".into()));
        }
        if self.log_base_weights.len() != k {
            return Err(Error::Invalid(format!(
                "log_base_weights: expected length {k} to match support (got {})",
                self.log_base_weights.len()
            )));
        }
        if self.stats.len() != k {
            return Err(Error::Invalid(format!(
                "stats: expected {k} rows to match support (got {})",
                self.stats.len()
            )));
        }
        let d = self.target_moments.len();
        if self.stats.iter().any(|row| row.len() != d) {
            return Err(Error::Invalid(format!(
                "stats: every row must have length {d} to match target_moments"
            )));
        }
        if let Some(t) = &self.tolerances {
            if t.abs_tol.is_some_and(|v| !(v >= 0.0)) {
                return Err(Error::Invalid("tolerances.abs_tol: must be >= 0".into()));
            }
            if t.rel_tol.is_some_and(|v| !(v >= 0.0)) {
                return Err(Error::Invalid("tolerances.rel_tol: must be >= 0".into()));
            }
            if t.max_iter == Some(0) {
                return Err(Error::Invalid("tolerances.max_iter: must be >= 1".into()));
            }
        }
        Ok(())
    }

    /// Numeric support points; labels become their indices.
    pub fn numeric_points(&self) -> Result<Vec<f64>> {
        let all_real = self
            .support
            .iter()
            .all(|s| matches!(s, SupportEntry::Real(_)));
        if all_real {
            Ok(self
                .support
                .iter()
                .map(|s| match s {
                    SupportEntry::Real(x) => *x,
                    SupportEntry::Label(_) => unreachable!(),
                })
                .collect())
        } else {
            // Mixed or labelled supports index by position; labels must be
            // pairwise distinct for the relabelling to be faithful.
            let mut labels: Vec<String> = Vec::new();
            for s in &self.support {
                let text = match s {
                    SupportEntry::Real(x) => format!("{x}"),
                    SupportEntry::Label(l) => l.clone(),
                };
                if labels.contains(&text) {
                    return Err(Error::Invalid(format!("support: duplicate label {text:?}")));
                }
                labels.push(text);
            }
            Ok((0..self.support.len()).map(|i| i as f64).collect())
        }
    }

    pub fn to_problem(&self) -> Result<MomentProblem> {
        self.validate()?;
        MomentProblem::new(
            self.numeric_points()?,
            self.log_base_weights.clone(),
            self.stats.clone(),
            self.target_moments.clone(),
        )
    }

    /// Apply this document's overrides on top of a base tolerance.
    pub fn tolerance(&self, base: Tolerance) -> Tolerance {
        let mut tol = base;
        if let Some(t) = &self.tolerances {
            if let Some(v) = t.abs_tol {
                tol.abs_tol = v;
            }
            if let Some(v) = t.rel_tol {
                tol.rel_tol = v;
            }
            if let Some(v) = t.max_iter {
                tol.max_iter = v;
            }
        }
        tol
    }

    pub fn from_problem(problem: &MomentProblem) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            support: problem
                .points()
                .iter()
                .map(|&x| SupportEntry::Real(x))
                .collect(),
            log_base_weights: problem.log_weights().to_vec(),
            stats: problem.stats().clone(),
            target_moments: problem.target().to_vec(),
            tolerances: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverBlock {
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
}

/// The on-disk result of a solved moment problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionDocument {
    pub eta: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub dual_value: f64,
    pub achieved_moments: Vec<f64>,
    pub entropy_nats: f64,
    pub g_vs_base_nats: f64,
    pub solver: SolverBlock,
}

impl SolutionDocument {
    pub fn from_solution(problem: &MomentProblem, solution: &MaxEntSolution) -> Result<Self> {
        let nats = EntropyUnits::nats();
        let base = problem.base_distribution();
        Ok(Self {
            eta: solution.eta.clone(),
            probabilities: solution.dist.probs().to_vec(),
            dual_value: solution.dual_value,
            achieved_moments: problem.moments_of(&solution.dist),
            entropy_nats: entropy(&solution.dist, nats),
            g_vs_base_nats: relative_entropy_g(&solution.dist, &base, nats)?,
            solver: SolverBlock {
                iterations: solution.report.iterations,
                grad_norm: solution.report.final_grad_norm,
                converged: solution.report.converged,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxent::solve_dual;

    fn sample_doc() -> ProblemDocument {
        ProblemDocument {
            schema_version: 1,
            support: (0..3).map(|i| SupportEntry::Real(i as f64)).collect(),
            log_base_weights: vec![0.0; 3],
            stats: (0..3).map(|i| vec![i as f64]).collect(),
            target_moments: vec![0.5],
            tolerances: None,
        }
    }

    #[test]
    fn json_round_trip_preserves_every_number() {
        let mut doc = sample_doc();
        doc.target_moments = vec![0.1 + 0.2];
        doc.log_base_weights = vec![1.0 / 3.0, f64::EPSILON, -1e-300];
        let text = serde_json::to_string_pretty(&doc).unwrap();
        let back: ProblemDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back.target_moments, doc.target_moments);
        assert_eq!(back.log_base_weights, doc.log_base_weights);
    }

    #[test]
    fn validation_names_the_offending_field() {
        let mut doc = sample_doc();
        doc.schema_version = 9;
        let err = doc.validate().unwrap_err().to_string();
        assert!(err.contains("schema_version"), "{err}");

        let mut doc = sample_doc();
        doc.log_base_weights.pop();
        let err = doc.validate().unwrap_err().to_string();
        assert!(err.contains("log_base_weights"), "{err}");

        let mut doc = sample_doc();
        doc.stats[1] = vec![1.0, 2.0];
        let err = doc.validate().unwrap_err().to_string();
        assert!(err.contains("stats"), "{err}");
    }

    #[test]
    fn labelled_support_maps_to_indices() {
        let mut doc = sample_doc();
        doc.support = vec![
            SupportEntry::Label("a".into()),
            SupportEntry::Label("b".into()),
            SupportEntry::Label("c".into()),
        ];
        assert_eq!(doc.numeric_points().unwrap(), vec![0.0, 1.0, 2.0]);

        doc.support[2] = SupportEntry::Label("a".into());
        assert!(doc.numeric_points().is_err());
    }

    #[test]
    fn tolerance_overrides_apply_on_top_of_base() {
        let mut doc = sample_doc();
        doc.tolerances = Some(ToleranceOverrides {
            abs_tol: Some(1e-6),
            rel_tol: None,
            max_iter: Some(7),
        });
        let tol = doc.tolerance(Tolerance::default());
        assert_eq!(tol.abs_tol, 1e-6);
        assert_eq!(tol.rel_tol, Tolerance::default().rel_tol);
        assert_eq!(tol.max_iter, 7);
    }

    #[test]
    fn solution_document_reports_achieved_moments() {
        let doc = sample_doc();
        let problem = doc.to_problem().unwrap();
        let solution = solve_dual(&problem, &Tolerance::default()).unwrap();
        let out = SolutionDocument::from_solution(&problem, &solution).unwrap();
        assert!((out.achieved_moments[0] - 0.5).abs() < 1e-8);
        assert!(out.solver.converged);
        assert!(out.g_vs_base_nats <= 0.0);
    }
}
