//! Noisy instrument fixtures built from the ideal computational-basis
//! measurement.

use qikit::{channels, ideal_projective_instrument, Ptm, QuantumInstrument};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynthKind {
    /// Ideal projective measurement.
    Ideal,
    /// Amplitude damping with rate `gamma` after the measurement.
    Damped,
    /// Depolarizing with rate `p` after the measurement.
    Dephased,
    /// Ry(`angle`) before the measurement, i.e. a tilted measurement axis.
    Rotated,
    /// Bit flip with probability `p` before the measurement.
    Bitflip,
}

impl std::str::FromStr for SynthKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ideal" => SynthKind::Ideal,
            "damped" => SynthKind::Damped,
            "dephased" => SynthKind::Dephased,
            "rotated" => SynthKind::Rotated,
            "bitflip" => SynthKind::Bitflip,
            other => return Err(CliError::Input(format!("unknown instrument kind {other:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SynthParams {
    pub gamma: Option<f64>,
    pub p: Option<f64>,
    pub angle: Option<f64>,
}

fn required(value: Option<f64>, flag: &str, kind: &str) -> Result<f64> {
    value.ok_or_else(|| CliError::Input(format!("--kind {kind} requires --{flag}")))
}

fn rate(value: f64, flag: &str) -> Result<f64> {
    if !(0.0..=1.0).contains(&value) {
        return Err(CliError::Input(format!("--{flag} must lie in [0, 1], got {value}")));
    }
    Ok(value)
}

fn on_every_qubit(single: &Ptm, num_qubits: usize) -> Ptm {
    (1..num_qubits).fold(single.clone(), |acc, _| acc.tensor(single))
}

pub fn synthesize(kind: SynthKind, params: SynthParams, num_qubits: usize) -> Result<QuantumInstrument> {
    let ideal = ideal_projective_instrument(num_qubits).map_err(|e| CliError::input("--qubits", e))?;
    let identity = Ptm::identity(1);
    let (pre, post) = match kind {
        SynthKind::Ideal => return Ok(ideal),
        SynthKind::Damped => {
            let gamma = rate(required(params.gamma, "gamma", "damped")?, "gamma")?;
            (Ok(identity), channels::amplitude_damping(gamma))
        }
        SynthKind::Dephased => {
            let p = rate(required(params.p, "p", "dephased")?, "p")?;
            (Ok(identity), channels::depolarizing(p))
        }
        SynthKind::Rotated => {
            let angle = required(params.angle, "angle", "rotated")?;
            if !angle.is_finite() {
                return Err(CliError::Input(format!("--angle must be finite, got {angle}")));
            }
            (channels::unitary(&channels::ry(angle)), Ok(identity))
        }
        SynthKind::Bitflip => {
            let p = rate(required(params.p, "p", "bitflip")?, "p")?;
            (channels::bit_flip(p), Ok(identity))
        }
    };
    let pre = pre.map_err(|e| CliError::input("pre-measurement channel", e))?;
    let post = post.map_err(|e| CliError::input("post-measurement channel", e))?;
    let pre = on_every_qubit(&pre, num_qubits);
    let post = on_every_qubit(&post, num_qubits);
    ideal
        .wrap_uniform(&pre, &post, qikit::sim::DEFAULT_CIRCUIT_TOL)
        .map_err(|e| CliError::failure("synthesized instrument", e))
}
