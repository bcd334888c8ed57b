//! Quantum instruments: one CP branch map per classical outcome, summing to a
//! trace-preserving map.

pub mod diagnostics;

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::error::{QiError, Result};
use crate::ptm::{ptm_from_kraus, Ptm};
use crate::state::PauliVector;
use crate::superop::{is_cp, is_trace_nonincreasing, tp_residual};

/// Branches whose probability does not exceed this are treated as impossible;
/// their conditional state is undefined.
pub const P_FLOOR: f64 = 1e-12;

/// Joins outcome labels of composed instruments, earliest measurement first.
pub const LABEL_SEPARATOR: &str = ",";

/// Allowed deviation of an input Pauli vector's trace from 1.
const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub branch: Ptm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumInstrument {
    num_qubits: usize,
    outcomes: Vec<Outcome>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchValidation {
    pub label: String,
    pub cp_min_eigenvalue: f64,
    pub is_cp: bool,
    pub trace_nonincreasing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub tolerance: f64,
    pub tp_residual: f64,
    pub branches: Vec<BranchValidation>,
    /// Human-readable reasons for failure; empty when `passed`.
    pub violations: Vec<String>,
}

/// One entry of [`QuantumInstrument::apply`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeBranch {
    pub label: String,
    pub probability: f64,
    pub state: PauliVector,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstrumentOutput {
    pub branches: Vec<OutcomeBranch>,
    /// Total probability of outcomes at or below [`P_FLOOR`].
    pub floored_probability: f64,
}

impl QuantumInstrument {
    pub fn new(outcomes: Vec<(String, Ptm)>) -> Result<Self> {
        let first = outcomes.first().ok_or(QiError::EmptyInstrument)?;
        let side = first.1.side();
        let mut seen = HashSet::new();
        for (label, branch) in &outcomes {
            if !seen.insert(label.as_str()) {
                return Err(QiError::DuplicateLabel(label.clone()));
            }
            if branch.side() != side {
                return Err(QiError::DimensionMismatch {
                    expected: side,
                    found: branch.side(),
                });
            }
        }
        Ok(Self {
            num_qubits: first.1.num_qubits(),
            outcomes: outcomes
                .into_iter()
                .map(|(label, branch)| Outcome { label, branch })
                .collect(),
        })
    }

    /// Single-outcome instrument that applies `channel` and always reports `label`.
    pub fn single(label: impl Into<String>, channel: Ptm) -> Self {
        Self {
            num_qubits: channel.num_qubits(),
            outcomes: vec![Outcome {
                label: label.into(),
                branch: channel,
            }],
        }
    }

    pub fn from_kraus(branches: Vec<(String, Vec<crate::linalg::CMatrix>)>) -> Result<Self> {
        let outcomes = branches
            .into_iter()
            .map(|(label, kraus)| Ok((label, ptm_from_kraus(&kraus)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(outcomes)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.outcomes.iter().map(|o| o.label.as_str())
    }

    pub fn branch(&self, label: &str) -> Option<&Ptm> {
        self.outcomes
            .iter()
            .find(|o| o.label == label)
            .map(|o| &o.branch)
    }

    /// Every branch CP and trace non-increasing, and the branch sum TP, all to `tol`.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let mut violations = Vec::new();
        let branches: Vec<BranchValidation> = self
            .outcomes
            .iter()
            .map(|o| {
                let cp = is_cp(&o.branch, tol);
                let tni = is_trace_nonincreasing(&o.branch, tol);
                if !cp.is_cp {
                    violations.push(format!(
                        "branch {:?} is not CP (min Choi eigenvalue {:.3e})",
                        o.label, cp.min_eigenvalue
                    ));
                }
                if !tni.holds {
                    violations.push(format!(
                        "branch {:?} increases trace (margin {:.3e})",
                        o.label, tni.min_eigenvalue
                    ));
                }
                BranchValidation {
                    label: o.label.clone(),
                    cp_min_eigenvalue: cp.min_eigenvalue,
                    is_cp: cp.is_cp,
                    trace_nonincreasing: tni.holds,
                }
            })
            .collect();
        let tp_residual = tp_residual(&self.discard());
        if tp_residual > tol {
            violations.push(format!(
                "branch sum is not trace preserving (top-row residual {tp_residual:.3e})"
            ));
        }
        ValidationReport {
            passed: violations.is_empty(),
            tolerance: tol,
            tp_residual,
            branches,
            violations,
        }
    }

    /// Returns `self` when it validates at `tol`.
    pub fn validated(self, tol: f64) -> Result<Self> {
        let report = self.validate(tol);
        if report.passed {
            Ok(self)
        } else {
            Err(QiError::InvalidInstrument(report.violations.join("; ")))
        }
    }

    fn check_input(&self, v: &PauliVector) -> Result<()> {
        let side = self.outcomes[0].branch.side();
        if v.len() != side {
            return Err(QiError::DimensionMismatch {
                expected: side,
                found: v.len(),
            });
        }
        if (v.trace() - 1.0).abs() > NORMALIZATION_TOL {
            return Err(QiError::InvalidParameter(format!(
                "input state must be normalized (trace {})",
                v.trace()
            )));
        }
        Ok(())
    }

    /// `p_i = (top row of Λ_i) · v`, in outcome order.
    pub fn outcome_probabilities(&self, v: &PauliVector) -> Result<Vec<f64>> {
        self.check_input(v)?;
        Ok(self
            .outcomes
            .iter()
            .map(|o| o.branch.top_row().dot(v.coeffs()))
            .collect())
    }

    /// `Λ_i v / (top row of Λ_i · v)`.
    pub fn post_measurement_state(&self, label: &str, v: &PauliVector) -> Result<PauliVector> {
        self.check_input(v)?;
        let branch = self
            .branch(label)
            .ok_or_else(|| QiError::UnknownOutcome(label.to_string()))?;
        let unnormalized = branch.apply(v)?;
        let probability = unnormalized.trace();
        if probability <= P_FLOOR {
            return Err(QiError::ZeroProbability {
                label: label.to_string(),
                probability,
            });
        }
        Ok(unnormalized.scaled(1.0 / probability))
    }

    /// Probability and conditional state of every outcome above [`P_FLOOR`].
    pub fn apply(&self, v: &PauliVector) -> Result<InstrumentOutput> {
        self.check_input(v)?;
        let mut branches = Vec::with_capacity(self.outcomes.len());
        let mut floored_probability = 0.0;
        for o in &self.outcomes {
            let unnormalized = o.branch.apply(v)?;
            let probability = unnormalized.trace();
            if probability <= P_FLOOR {
                floored_probability += probability;
                continue;
            }
            branches.push(OutcomeBranch {
                label: o.label.clone(),
                probability,
                state: unnormalized.scaled(1.0 / probability),
            });
        }
        Ok(InstrumentOutput {
            branches,
            floored_probability,
        })
    }

    /// The channel obtained by ignoring the outcome: `Σ_i Λ_i`.
    pub fn discard(&self) -> Ptm {
        self.outcomes
            .iter()
            .skip(1)
            .fold(self.outcomes[0].branch.clone(), |acc, o| {
                acc.add(&o.branch).expect("branches share a dimension")
            })
    }

    /// `self` followed by `second`; see [`compose`].
    pub fn then(&self, second: &Self) -> Result<Self> {
        compose(second, self)
    }

    /// `branch_i <- post_i · Λ_i · pre`. Outcomes missing from
    /// `post_by_outcome` get the identity. Wrappers must be TP to `tol`.
    pub fn wrap(&self, pre: &Ptm, post_by_outcome: &BTreeMap<String, Ptm>, tol: f64) -> Result<Self> {
        let side = self.outcomes[0].branch.side();
        let check = |what: String, p: &Ptm| -> Result<()> {
            if p.side() != side {
                return Err(QiError::DimensionMismatch {
                    expected: side,
                    found: p.side(),
                });
            }
            let residual = tp_residual(p);
            if residual > tol {
                return Err(QiError::NotTracePreserving { what, residual });
            }
            Ok(())
        };
        check("pre-measurement channel".into(), pre)?;
        for (label, post) in post_by_outcome {
            if self.branch(label).is_none() {
                return Err(QiError::UnknownOutcome(label.clone()));
            }
            check(format!("post-measurement channel for {label:?}"), post)?;
        }
        let outcomes = self
            .outcomes
            .iter()
            .map(|o| {
                let mut branch = o.branch.compose(pre)?;
                if let Some(post) = post_by_outcome.get(&o.label) {
                    branch = post.compose(&branch)?;
                }
                Ok((o.label.clone(), branch))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(outcomes)
    }

    /// Wraps every outcome with the same post-measurement channel.
    pub fn wrap_uniform(&self, pre: &Ptm, post: &Ptm, tol: f64) -> Result<Self> {
        let posts = self
            .labels()
            .map(|l| (l.to_string(), post.clone()))
            .collect();
        self.wrap(pre, &posts, tol)
    }
}

/// Sequential composition: `first` is measured, then `second`.
///
/// The result has one outcome per pair, labelled `"<first>,<second>"`, with
/// branch `Λ_second^(j) · Λ_first^(i)`.
pub fn compose(second: &QuantumInstrument, first: &QuantumInstrument) -> Result<QuantumInstrument> {
    if second.num_qubits != first.num_qubits {
        return Err(QiError::DimensionMismatch {
            expected: first.outcomes[0].branch.side(),
            found: second.outcomes[0].branch.side(),
        });
    }
    let mut outcomes = Vec::with_capacity(first.len() * second.len());
    for a in &first.outcomes {
        for b in &second.outcomes {
            outcomes.push((
                format!("{}{LABEL_SEPARATOR}{}", a.label, b.label),
                b.branch.compose(&a.branch)?,
            ));
        }
    }
    QuantumInstrument::new(outcomes)
}

/// Ideal computational-basis measurement on `num_qubits` qubits.
///
/// Outcome `b` (labelled by its bit string, qubit 0 leftmost) has the single
/// Kraus operator `|b><b|`.
pub fn ideal_projective_instrument(num_qubits: usize) -> Result<QuantumInstrument> {
    crate::check_qubit_count(num_qubits)?;
    let d = 1usize << num_qubits;
    let branches = (0..d)
        .map(|b| {
            let mut k = crate::linalg::CMatrix::zeros(d, d);
            k[(b, b)] = crate::linalg::ONE;
            (format!("{b:0width$b}", width = num_qubits), vec![k])
        })
        .collect();
    QuantumInstrument::from_kraus(branches)
}
