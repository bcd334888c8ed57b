//! Workloads shared by the benchmarks.

use qikit::{channels, ideal_projective_instrument, Circuit, Condition, PauliVector};

/// Two rounds of measure-and-correct on each of `num_qubits` qubits, with
/// damping between rounds.
pub fn feedback_circuit(num_qubits: usize) -> Circuit {
    let measure = ideal_projective_instrument(1).expect("one qubit");
    let flip = channels::unitary(&channels::pauli_x()).expect("unitary");
    let damp = channels::amplitude_damping(0.1).expect("valid rate");
    let h = channels::unitary(&channels::hadamard()).expect("unitary");
    let mut b = Circuit::builder(num_qubits);
    for round in 0..2 {
        for q in 0..num_qubits {
            let reg = format!("r{round}q{q}");
            b = b
                .channel(h.clone(), &[q])
                .channel(damp.clone(), &[q])
                .measure(measure.clone(), &[q], reg.clone())
                .conditional(flip.clone(), &[q], Condition::equals(reg, "1"));
        }
    }
    b.build().expect("valid circuit")
}

pub fn mixed_state(num_qubits: usize) -> PauliVector {
    PauliVector::maximally_mixed(num_qubits)
}
