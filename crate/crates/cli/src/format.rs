//! On-disk formats: instrument files, single-PTM files and circuit files.
//!
//! All files are JSON. Matrices are stored row-major in the Pauli basis with
//! IXYZ-lexicographic order, leftmost qubit most significant; the order is
//! named in every file's `pauli_order` field and any other value is rejected.
//! Numbers are written in shortest round-trip form and parsed with correct
//! rounding, so write-then-read reproduces every entry bit for bit.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use qikit::{channels, Circuit, Condition, Instruction, Ptm, QuantumInstrument};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const FORMAT_VERSION: &str = "1";
pub const PAULI_ORDER: &str = "IXYZ-lex";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstrumentFile {
    pub format_version: String,
    pub num_qubits: usize,
    pub pauli_order: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub outcomes: Vec<OutcomeEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeEntry {
    pub label: String,
    pub ptm: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PtmFile {
    pub format_version: String,
    pub num_qubits: usize,
    pub pauli_order: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub ptm: Vec<f64>,
}

fn check_header(version: &str, num_qubits: usize, order: &str) -> Result<()> {
    if version != FORMAT_VERSION {
        return Err(CliError::Input(format!(
            "unsupported format_version {version:?} (expected {FORMAT_VERSION:?})"
        )));
    }
    if order != PAULI_ORDER {
        return Err(CliError::Input(format!(
            "unsupported pauli_order {order:?} (expected {PAULI_ORDER:?})"
        )));
    }
    qikit::check_qubit_count(num_qubits).map_err(|e| CliError::input("num_qubits", e))
}

fn check_entries(what: &str, entries: &[f64], num_qubits: usize) -> Result<()> {
    let expected = 1usize << (4 * num_qubits);
    if entries.len() != expected {
        return Err(CliError::Input(format!(
            "{what}: expected {expected} PTM entries for {num_qubits} qubit(s), found {}",
            entries.len()
        )));
    }
    Ok(())
}

impl InstrumentFile {
    pub fn from_instrument(instr: &QuantumInstrument, description: Option<String>) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            num_qubits: instr.num_qubits(),
            pauli_order: PAULI_ORDER.into(),
            description,
            outcomes: instr
                .outcomes()
                .iter()
                .map(|o| OutcomeEntry {
                    label: o.label.clone(),
                    ptm: o.branch.to_row_major(),
                })
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: Self =
            serde_json::from_str(text).map_err(|e| CliError::input("invalid instrument file", e))?;
        file.check()?;
        Ok(file)
    }

    pub fn check(&self) -> Result<()> {
        check_header(&self.format_version, self.num_qubits, &self.pauli_order)?;
        if self.outcomes.is_empty() {
            return Err(CliError::Input("instrument file has no outcomes".into()));
        }
        let mut seen = HashSet::new();
        for o in &self.outcomes {
            if !seen.insert(o.label.as_str()) {
                return Err(CliError::Input(format!("duplicate outcome label {:?}", o.label)));
            }
            check_entries(&format!("outcome {:?}", o.label), &o.ptm, self.num_qubits)?;
        }
        Ok(())
    }

    pub fn to_instrument(&self) -> Result<QuantumInstrument> {
        self.check()?;
        let outcomes = self
            .outcomes
            .iter()
            .map(|o| {
                Ptm::from_row_major(&o.ptm)
                    .map(|p| (o.label.clone(), p))
                    .map_err(|e| CliError::input(format!("outcome {:?}", o.label), e))
            })
            .collect::<Result<Vec<_>>>()?;
        QuantumInstrument::new(outcomes).map_err(|e| CliError::input("instrument", e))
    }

    /// Pretty JSON with one PTM row per line.
    pub fn to_json(&self) -> String {
        let mut out = header_json(&self.format_version, self.num_qubits, &self.pauli_order, &self.description);
        out.push_str("  \"outcomes\": [\n");
        for (k, o) in self.outcomes.iter().enumerate() {
            out.push_str("    {\n");
            out.push_str(&format!("      \"label\": {},\n", json_string(&o.label)));
            out.push_str("      \"ptm\": ");
            out.push_str(&matrix_json(&o.ptm, "      "));
            out.push_str("\n    }");
            out.push_str(if k + 1 < self.outcomes.len() { ",\n" } else { "\n" });
        }
        out.push_str("  ]\n}\n");
        out
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn header_json(version: &str, num_qubits: usize, order: &str, description: &Option<String>) -> String {
    let mut out = format!(
        "{{\n  \"format_version\": {},\n  \"num_qubits\": {num_qubits},\n  \"pauli_order\": {},\n",
        json_string(version),
        json_string(order)
    );
    if let Some(d) = description {
        out.push_str(&format!("  \"description\": {},\n", json_string(d)));
    }
    out
}

/// Row-major entries laid out as a square, one row per line.
fn matrix_json(entries: &[f64], indent: &str) -> String {
    let side = (entries.len() as f64).sqrt().round() as usize;
    let rows: Vec<String> = entries
        .chunks(side.max(1))
        .map(|row| {
            let cells: Vec<String> = row
                .iter()
                .map(|x| serde_json::to_string(x).expect("numbers serialize"))
                .collect();
            format!("{indent}  {}", cells.join(", "))
        })
        .collect();
    format!("[\n{}\n{indent}]", rows.join(",\n"))
}

impl PtmFile {
    pub fn from_ptm(ptm: &Ptm, description: Option<String>) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            num_qubits: ptm.num_qubits(),
            pauli_order: PAULI_ORDER.into(),
            description,
            ptm: ptm.to_row_major(),
        }
    }

    pub fn to_ptm(&self) -> Result<Ptm> {
        check_header(&self.format_version, self.num_qubits, &self.pauli_order)?;
        check_entries("ptm", &self.ptm, self.num_qubits)?;
        Ptm::from_row_major(&self.ptm).map_err(|e| CliError::input("ptm", e))
    }

    pub fn to_json(&self) -> String {
        let mut out = header_json(&self.format_version, self.num_qubits, &self.pauli_order, &self.description);
        out.push_str("  \"ptm\": ");
        out.push_str(&matrix_json(&self.ptm, "  "));
        out.push_str("\n}\n");
        out
    }
}

/// Contents of a file that holds either an instrument or a single PTM.
pub enum MatrixFile {
    Instrument(QuantumInstrument),
    Single(Ptm),
}

pub fn parse_matrix_file(text: &str) -> Result<MatrixFile> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::input("invalid JSON", e))?;
    if value.get("outcomes").is_some() {
        Ok(MatrixFile::Instrument(InstrumentFile::parse(text)?.to_instrument()?))
    } else {
        let file: PtmFile =
            serde_json::from_value(value).map_err(|e| CliError::input("invalid PTM file", e))?;
        Ok(MatrixFile::Single(file.to_ptm()?))
    }
}

pub fn read_input(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::input(format!("cannot read {}", path.display()), e))
}

pub fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read_input(path)?)
        .map_err(|e| CliError::input(format!("{} is not UTF-8", path.display()), e))
}

pub fn read_instrument(path: &Path) -> Result<QuantumInstrument> {
    InstrumentFile::parse(&read_text(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        .to_instrument()
}

/// Writes via a temporary sibling and a rename so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Failure(format!("invalid output path {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let fail = |e: std::io::Error| CliError::failure(format!("cannot write {}", path.display()), e);
    fs::write(&tmp, contents).map_err(fail)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        fail(e)
    })
}

/// A channel in a circuit file: a named gate, a named noise channel, or an
/// explicit row-major PTM.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ChannelSpec {
    Gate {
        gate: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        angle: Option<f64>,
    },
    Noise {
        noise: String,
        p: f64,
    },
    Matrix {
        ptm: Vec<f64>,
    },
}

impl ChannelSpec {
    pub fn to_ptm(&self) -> Result<Ptm> {
        match self {
            ChannelSpec::Gate { gate, angle } => {
                let needs_angle = |name: &str| {
                    angle.ok_or_else(|| CliError::Input(format!("gate {name:?} requires \"angle\"")))
                };
                let u = match gate.to_ascii_lowercase().as_str() {
                    "i" | "id" => nalgebra::DMatrix::identity(2, 2),
                    "x" => channels::pauli_x(),
                    "y" => channels::pauli_y(),
                    "z" => channels::pauli_z(),
                    "h" => channels::hadamard(),
                    "s" => channels::s_gate(),
                    "cnot" | "cx" => channels::cnot(),
                    "rx" => channels::rx(needs_angle("rx")?),
                    "ry" => channels::ry(needs_angle("ry")?),
                    "rz" => channels::rz(needs_angle("rz")?),
                    other => return Err(CliError::Input(format!("unknown gate {other:?}"))),
                };
                channels::unitary(&u).map_err(|e| CliError::input("gate", e))
            }
            ChannelSpec::Noise { noise, p } => {
                let built = match noise.to_ascii_lowercase().as_str() {
                    "amplitude_damping" => channels::amplitude_damping(*p),
                    "dephasing" => channels::dephasing(*p),
                    "depolarizing" => channels::depolarizing(*p),
                    "bit_flip" | "bitflip" => channels::bit_flip(*p),
                    other => return Err(CliError::Input(format!("unknown noise channel {other:?}"))),
                };
                built.map_err(|e| CliError::input("noise channel", e))
            }
            ChannelSpec::Matrix { ptm } => {
                Ptm::from_row_major(ptm).map_err(|e| CliError::input("ptm", e))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum InstrumentRef {
    #[serde(rename = "path")]
    Path(PathBuf),
    #[serde(rename = "inline")]
    Inline(InstrumentFile),
    /// Ideal computational-basis measurement on this many qubits.
    #[serde(rename = "ideal")]
    Ideal(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstructionEntry {
    Channel {
        targets: Vec<usize>,
        channel: ChannelSpec,
    },
    Measure {
        targets: Vec<usize>,
        register: String,
        instrument: InstrumentRef,
    },
    Conditional {
        targets: Vec<usize>,
        channel: ChannelSpec,
        /// Register values that must all match.
        when: BTreeMap<String, String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitFile {
    pub format_version: String,
    pub num_qubits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// State token understood by `--state`; defaults to all qubits in |0>.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<String>,
    pub instructions: Vec<InstructionEntry>,
}

impl CircuitFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: Self =
            serde_json::from_str(text).map_err(|e| CliError::input("invalid circuit file", e))?;
        if file.format_version != FORMAT_VERSION {
            return Err(CliError::Input(format!(
                "unsupported format_version {:?}",
                file.format_version
            )));
        }
        qikit::check_qubit_count(file.num_qubits).map_err(|e| CliError::input("num_qubits", e))?;
        Ok(file)
    }

    /// Builds the circuit; instrument paths resolve relative to `base_dir`.
    /// Structural problems are input errors; instruments that fail validation
    /// at `tol` are semantic failures.
    pub fn to_circuit(&self, base_dir: &Path, tol: f64) -> Result<Circuit> {
        let mut instructions = Vec::with_capacity(self.instructions.len());
        for (i, entry) in self.instructions.iter().enumerate() {
            let ctx = |e: CliError| match e {
                CliError::Input(m) => CliError::Input(format!("instruction {i}: {m}")),
                CliError::Failure(m) => CliError::Failure(format!("instruction {i}: {m}")),
            };
            instructions.push(match entry {
                InstructionEntry::Channel { targets, channel } => Instruction::Channel {
                    ptm: channel.to_ptm().map_err(ctx)?,
                    targets: targets.clone(),
                },
                InstructionEntry::Measure {
                    targets,
                    register,
                    instrument,
                } => {
                    let instrument = match instrument {
                        InstrumentRef::Path(p) => read_instrument(&base_dir.join(p)),
                        InstrumentRef::Inline(file) => file.to_instrument(),
                        InstrumentRef::Ideal(n) => qikit::ideal_projective_instrument(*n)
                            .map_err(|e| CliError::input("ideal instrument", e)),
                    }
                    .map_err(ctx)?;
                    Instruction::Measure {
                        instrument,
                        targets: targets.clone(),
                        register: register.clone(),
                    }
                }
                InstructionEntry::Conditional {
                    targets,
                    channel,
                    when,
                } => Instruction::Conditional {
                    ptm: channel.to_ptm().map_err(ctx)?,
                    targets: targets.clone(),
                    condition: Condition {
                        requirements: when.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
                    },
                },
            });
        }
        Circuit::new(self.num_qubits, instructions, tol).map_err(|e| match e {
            qikit::QiError::InvalidInstrument(_) | qikit::QiError::NotTracePreserving { .. } => {
                CliError::failure("circuit", e)
            }
            other => CliError::input("circuit", other),
        })
    }
}
