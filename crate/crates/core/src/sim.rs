//! Density-vector simulation of circuits with mid-circuit measurements.
//!
//! States are Pauli vectors over the whole register; every instruction acts
//! on its targets through [`Ptm::apply_on`]. [`Circuit::run_exact`] follows
//! every outcome branch depth-first; [`Circuit::run_sampled`] draws one
//! outcome per measurement per shot, with shot `k` driven by ChaCha stream `k`
//! of the given seed so results do not depend on scheduling.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{QiError, Result};
use crate::instrument::QuantumInstrument;
use crate::ptm::{check_targets, Ptm};
use crate::state::PauliVector;
use crate::superop::tp_residual;

/// Default cumulative-probability threshold below which branches are pruned.
pub const DEFAULT_P_MIN: f64 = 1e-12;
/// Default tolerance for the TP / validation checks done by [`Circuit::new`].
pub const DEFAULT_CIRCUIT_TOL: f64 = 1e-6;

/// A conjunction of `register == label` tests. Empty means always true.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub requirements: Vec<(String, String)>,
}

impl Condition {
    pub fn always() -> Self {
        Self::default()
    }

    pub fn equals(register: impl Into<String>, label: impl Into<String>) -> Self {
        Self {
            requirements: vec![(register.into(), label.into())],
        }
    }

    pub fn and(mut self, register: impl Into<String>, label: impl Into<String>) -> Self {
        self.requirements.push((register.into(), label.into()));
        self
    }

    pub fn matches(&self, record: &[(String, String)]) -> bool {
        self.requirements.iter().all(|(reg, want)| {
            record
                .iter()
                .any(|(name, got)| name == reg && got == want)
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instruction {
    Channel {
        ptm: Ptm,
        targets: Vec<usize>,
    },
    Measure {
        instrument: QuantumInstrument,
        targets: Vec<usize>,
        register: String,
    },
    Conditional {
        ptm: Ptm,
        targets: Vec<usize>,
        condition: Condition,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    instructions: Vec<Instruction>,
}

/// Register assignments in measurement order.
pub type Record = Vec<(String, String)>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchState {
    pub record: Record,
    pub probability: f64,
    pub state: PauliVector,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunResult {
    pub registers: Vec<String>,
    pub branches: Vec<BranchState>,
    pub pruned_mass: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShotRecord {
    pub shot_index: usize,
    pub record: Record,
}

impl Circuit {
    /// Checks targets, register names and condition references; channels must
    /// be TP and instruments must validate, both to `tol`.
    pub fn new(num_qubits: usize, instructions: Vec<Instruction>, tol: f64) -> Result<Self> {
        crate::check_qubit_count(num_qubits)?;
        let mut written: HashSet<&str> = HashSet::new();
        for instruction in &instructions {
            match instruction {
                Instruction::Channel { ptm, targets } | Instruction::Conditional { ptm, targets, .. } => {
                    check_targets(targets, ptm.num_qubits(), num_qubits)?;
                    let residual = tp_residual(ptm);
                    if residual > tol {
                        return Err(QiError::NotTracePreserving {
                            what: "circuit channel".into(),
                            residual,
                        });
                    }
                    if let Instruction::Conditional { condition, .. } = instruction {
                        for (reg, _) in &condition.requirements {
                            if !written.contains(reg.as_str()) {
                                return Err(QiError::UnknownRegister(reg.clone()));
                            }
                        }
                    }
                }
                Instruction::Measure {
                    instrument,
                    targets,
                    register,
                } => {
                    check_targets(targets, instrument.num_qubits(), num_qubits)?;
                    let report = instrument.validate(tol);
                    if !report.passed {
                        return Err(QiError::InvalidInstrument(report.violations.join("; ")));
                    }
                    if !written.insert(register.as_str()) {
                        return Err(QiError::RegisterCollision(register.clone()));
                    }
                }
            }
        }
        Ok(Self {
            num_qubits,
            instructions,
        })
    }

    pub fn builder(num_qubits: usize) -> CircuitBuilder {
        CircuitBuilder {
            num_qubits,
            instructions: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    /// Register names in the order they are written.
    pub fn registers(&self) -> Vec<String> {
        self.instructions
            .iter()
            .filter_map(|i| match i {
                Instruction::Measure { register, .. } => Some(register.clone()),
                _ => None,
            })
            .collect()
    }

    fn check_input(&self, v0: &PauliVector) -> Result<()> {
        let side = 1usize << (2 * self.num_qubits);
        if v0.len() != side {
            return Err(QiError::DimensionMismatch {
                expected: side,
                found: v0.len(),
            });
        }
        if (v0.trace() - 1.0).abs() > 1e-9 {
            return Err(QiError::InvalidParameter(format!(
                "initial state must be normalized (trace {})",
                v0.trace()
            )));
        }
        Ok(())
    }

    /// Every outcome branch with cumulative probability above `p_min`.
    pub fn run_exact(&self, v0: &PauliVector, p_min: f64) -> Result<RunResult> {
        self.check_input(v0)?;
        let mut walker = ExactWalker {
            circuit: self,
            p_min,
            branches: Vec::new(),
            pruned_mass: 0.0,
        };
        walker.walk(0, Vec::new(), 1.0, v0.clone())?;
        Ok(RunResult {
            registers: self.registers(),
            branches: walker.branches,
            pruned_mass: walker.pruned_mass,
        })
    }

    /// `shots` independent samples of the measurement record.
    pub fn run_sampled(&self, v0: &PauliVector, shots: usize, seed: u64) -> Result<Vec<ShotRecord>> {
        self.check_input(v0)?;
        if shots == 0 {
            return Err(QiError::InvalidParameter("shots must be at least 1".into()));
        }
        (0..shots)
            .into_par_iter()
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64);
                Ok(ShotRecord {
                    shot_index: k,
                    record: self.sample_once(v0, &mut rng)?,
                })
            })
            .collect()
    }

    fn sample_once<R: Rng>(&self, v0: &PauliVector, rng: &mut R) -> Result<Record> {
        let mut state = v0.clone();
        let mut record = Record::new();
        for instruction in &self.instructions {
            match instruction {
                Instruction::Channel { ptm, targets } => state = ptm.apply_on(targets, &state)?,
                Instruction::Conditional {
                    ptm,
                    targets,
                    condition,
                } => {
                    if condition.matches(&record) {
                        state = ptm.apply_on(targets, &state)?;
                    }
                }
                Instruction::Measure {
                    instrument,
                    targets,
                    register,
                } => {
                    let candidates = instrument
                        .outcomes()
                        .iter()
                        .map(|o| o.branch.apply_on(targets, &state))
                        .collect::<Result<Vec<_>>>()?;
                    let weights: Vec<f64> = candidates.iter().map(|c| c.trace().max(0.0)).collect();
                    let total: f64 = weights.iter().sum();
                    let mut u = rng.random::<f64>() * total;
                    let mut chosen = weights.len() - 1;
                    for (i, &w) in weights.iter().enumerate() {
                        if w > 0.0 && u < w {
                            chosen = i;
                            break;
                        }
                        u -= w;
                    }
                    // Guard against landing on a zero-weight tail through rounding.
                    while weights[chosen] <= 0.0 && chosen > 0 {
                        chosen -= 1;
                    }
                    let p = candidates[chosen].trace();
                    state = candidates[chosen].scaled(1.0 / p);
                    record.push((register.clone(), instrument.outcomes()[chosen].label.clone()));
                }
            }
        }
        Ok(record)
    }
}

struct ExactWalker<'a> {
    circuit: &'a Circuit,
    p_min: f64,
    branches: Vec<BranchState>,
    pruned_mass: f64,
}

impl ExactWalker<'_> {
    fn walk(&mut self, start: usize, record: Record, probability: f64, mut state: PauliVector) -> Result<()> {
        let instructions = &self.circuit.instructions;
        for (offset, instruction) in instructions[start..].iter().enumerate() {
            match instruction {
                Instruction::Channel { ptm, targets } => state = ptm.apply_on(targets, &state)?,
                Instruction::Conditional {
                    ptm,
                    targets,
                    condition,
                } => {
                    if condition.matches(&record) {
                        state = ptm.apply_on(targets, &state)?;
                    }
                }
                Instruction::Measure {
                    instrument,
                    targets,
                    register,
                } => {
                    for o in instrument.outcomes() {
                        let unnormalized = o.branch.apply_on(targets, &state)?;
                        let p = unnormalized.trace();
                        let cumulative = probability * p;
                        if cumulative <= self.p_min {
                            self.pruned_mass += cumulative;
                            continue;
                        }
                        let mut next = record.clone();
                        next.push((register.clone(), o.label.clone()));
                        self.walk(start + offset + 1, next, cumulative, unnormalized.scaled(1.0 / p))?;
                    }
                    return Ok(());
                }
            }
        }
        self.branches.push(BranchState {
            record,
            probability,
            state,
        });
        Ok(())
    }
}

impl RunResult {
    /// Probability of each combination of labels on `registers`, summed
    /// over the other registers. Keys list labels in the order of `registers`.
    pub fn marginal_distribution(&self, registers: &[&str]) -> Result<BTreeMap<Vec<String>, f64>> {
        for r in registers {
            if !self.registers.iter().any(|known| known == r) {
                return Err(QiError::UnknownRegister(r.to_string()));
            }
        }
        let mut out = BTreeMap::new();
        for branch in &self.branches {
            let key: Vec<String> = registers
                .iter()
                .map(|r| {
                    branch
                        .record
                        .iter()
                        .find(|(name, _)| name == r)
                        .map(|(_, label)| label.clone())
                        .unwrap_or_default()
                })
                .collect();
            *out.entry(key).or_insert(0.0) += branch.probability;
        }
        Ok(out)
    }

    /// Marginal over every register, in measurement order.
    pub fn joint_distribution(&self) -> BTreeMap<Vec<String>, f64> {
        let all: Vec<&str> = self.registers.iter().map(String::as_str).collect();
        self.marginal_distribution(&all).expect("own registers")
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }
}

pub struct CircuitBuilder {
    num_qubits: usize,
    instructions: Vec<Instruction>,
}

impl CircuitBuilder {
    pub fn channel(mut self, ptm: Ptm, targets: &[usize]) -> Self {
        self.instructions.push(Instruction::Channel {
            ptm,
            targets: targets.to_vec(),
        });
        self
    }

    pub fn measure(mut self, instrument: QuantumInstrument, targets: &[usize], register: impl Into<String>) -> Self {
        self.instructions.push(Instruction::Measure {
            instrument,
            targets: targets.to_vec(),
            register: register.into(),
        });
        self
    }

    pub fn conditional(mut self, ptm: Ptm, targets: &[usize], condition: Condition) -> Self {
        self.instructions.push(Instruction::Conditional {
            ptm,
            targets: targets.to_vec(),
            condition,
        });
        self
    }

    pub fn build(self) -> Result<Circuit> {
        Circuit::new(self.num_qubits, self.instructions, DEFAULT_CIRCUIT_TOL)
    }

    pub fn build_with_tol(self, tol: f64) -> Result<Circuit> {
        Circuit::new(self.num_qubits, self.instructions, tol)
    }
}
