//! Input-state tokens for `--state`.

use qikit::PauliVector;

use crate::error::{CliError, Result};

/// Pauli vector of a named single-qubit state.
fn single_qubit(token: &str) -> Option<[f64; 4]> {
    Some(match token {
        "0" => [1.0, 0.0, 0.0, 1.0],
        "1" => [1.0, 0.0, 0.0, -1.0],
        "+" => [1.0, 1.0, 0.0, 0.0],
        "-" => [1.0, -1.0, 0.0, 0.0],
        "i" => [1.0, 0.0, 1.0, 0.0],
        "-i" => [1.0, 0.0, -1.0, 0.0],
        "mixed" => [1.0, 0.0, 0.0, 0.0],
        _ => return None,
    })
}

/// Parses a state spec for `num_qubits` qubits.
///
/// Accepted forms: a named state (`0`, `1`, `+`, `-`, `i`, `-i`, `mixed`)
/// applied to every qubit; named states joined by `:` giving one per qubit
/// (leftmost first); or `4^n` comma-separated Pauli-vector components.
pub fn parse_state(spec: &str, num_qubits: usize) -> Result<PauliVector> {
    let spec = spec.trim();
    if spec.contains(',') {
        let coeffs = spec
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::input(format!("state component {t:?}"), e))
            })
            .collect::<Result<Vec<_>>>()?;
        let expected = 1usize << (2 * num_qubits);
        if coeffs.len() != expected {
            return Err(CliError::Input(format!(
                "explicit state needs {expected} components, found {}",
                coeffs.len()
            )));
        }
        return PauliVector::new(coeffs).map_err(|e| CliError::input("state", e));
    }
    let tokens: Vec<&str> = if spec.contains(':') {
        spec.split(':').map(str::trim).collect()
    } else {
        vec![spec; num_qubits]
    };
    if tokens.len() != num_qubits {
        return Err(CliError::Input(format!(
            "state {spec:?} names {} qubit(s), instrument has {num_qubits}",
            tokens.len()
        )));
    }
    let mut state: Option<PauliVector> = None;
    for token in tokens {
        let v = single_qubit(token)
            .ok_or_else(|| CliError::Input(format!("unknown state token {token:?}")))?;
        let v = PauliVector::new(v.to_vec()).expect("four components");
        state = Some(match state {
            None => v,
            Some(s) => s.tensor(&v),
        });
    }
    Ok(state.expect("at least one qubit"))
}
