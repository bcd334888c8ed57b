//! Subcommand implementations. Each returns the text to print and an exit
//! status; nothing is written to the terminal here.

use std::collections::BTreeMap;
use std::path::Path;

use qikit::instrument::compose as compose_instruments;
use qikit::{diagnose as run_diagnose, QuantumInstrument};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::format::{
    parse_matrix_file, read_input, read_instrument, read_text, write_atomic, CircuitFile,
    InstrumentFile, MatrixFile,
};
use crate::render::render_svg;
use crate::report::ReportFile;
use crate::states::parse_state;
use crate::synth::{synthesize, SynthKind, SynthParams};

#[derive(Debug, Default, PartialEq, Eq)]
pub struct CommandOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl CommandOutput {
    fn ok(stdout: String) -> Self {
        Self { stdout, ..Default::default() }
    }
}

fn fmt_vector(values: &[f64]) -> String {
    let parts: Vec<String> = values
        .iter()
        .map(|v| {
            let s = format!("{v:.6}");
            if s == "-0.000000" { "0.000000".into() } else { s }
        })
        .collect();
    format!("[{}]", parts.join(", "))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    text
}

fn parse_instrument_bytes(path: &Path, bytes: &[u8]) -> Result<QuantumInstrument> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| CliError::input(format!("{} is not UTF-8", path.display()), e))?;
    InstrumentFile::parse(text)
        .and_then(|f| f.to_instrument())
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, contents: String) -> Result<CommandOutput> {
    match out {
        Some(path) => {
            write_atomic(path, contents.as_bytes())?;
            Ok(CommandOutput::default())
        }
        None => Ok(CommandOutput::ok(contents)),
    }
}

fn validation_summary(report: &qikit::instrument::ValidationReport) -> String {
    let mut s = format!(
        "validation: {} (tolerance {:e})\ntp residual: {:e}\n",
        if report.passed { "PASS" } else { "FAIL" },
        report.tolerance,
        report.tp_residual
    );
    for b in &report.branches {
        s += &format!(
            "outcome {:?}: min Choi eigenvalue {:e}, CP {}, trace-nonincreasing {}\n",
            b.label,
            b.cp_min_eigenvalue,
            if b.is_cp { "yes" } else { "no" },
            if b.trace_nonincreasing { "yes" } else { "no" }
        );
    }
    for v in &report.violations {
        s += &format!("violation: {v}\n");
    }
    s
}

pub fn validate(path: &Path, tol: f64, json: bool) -> Result<CommandOutput> {
    let instr = read_instrument(path)?;
    let report = instr.validate(tol);
    let stdout = if json { to_json(&report) } else { validation_summary(&report) };
    Ok(CommandOutput {
        stdout,
        stderr: String::new(),
        code: if report.passed { 0 } else { crate::error::EXIT_FAILURE },
    })
}

pub fn diagnose(path: &Path, tol: f64, force: bool, out: Option<&Path>) -> Result<CommandOutput> {
    let bytes = read_input(path)?;
    let instr = parse_instrument_bytes(path, &bytes)?;
    let validation = instr.validate(tol);
    if !validation.passed && !force {
        return Ok(CommandOutput {
            stdout: String::new(),
            stderr: format!(
                "{}instrument fails validation; rerun with --force to diagnose anyway\n",
                validation_summary(&validation)
            ),
            code: crate::error::EXIT_FAILURE,
        });
    }
    emit(out, ReportFile::new(&bytes, run_diagnose(&instr, tol)).to_json())
}

#[derive(Debug, Serialize)]
struct ApplyRow {
    label: String,
    probability: f64,
    state: Option<Vec<f64>>,
}

pub fn apply(path: &Path, state: &str, json: bool) -> Result<CommandOutput> {
    let instr = read_instrument(path)?;
    let v = parse_state(state, instr.num_qubits())?;
    let probabilities = instr
        .outcome_probabilities(&v)
        .map_err(|e| CliError::input("state", e))?;
    let output = instr.apply(&v).map_err(|e| CliError::input("state", e))?;
    let rows: Vec<ApplyRow> = instr
        .labels()
        .zip(probabilities)
        .map(|(label, probability)| ApplyRow {
            label: label.to_string(),
            probability,
            state: output
                .branches
                .iter()
                .find(|b| b.label == label)
                .map(|b| b.state.to_vec()),
        })
        .collect();
    if json {
        return Ok(CommandOutput::ok(to_json(&rows)));
    }
    let width = rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max(7);
    let mut s = format!("{:<width$}  {:<12}  post-measurement state\n", "outcome", "probability");
    for r in &rows {
        let post = r.state.as_deref().map_or("undefined (zero probability)".into(), fmt_vector);
        s += &format!("{:<width$}  {:<12.10}  {post}\n", r.label, r.probability);
    }
    Ok(CommandOutput::ok(s))
}

/// Measures with `first`, then `second`.
pub fn compose(first: &Path, second: &Path, tol: f64, out: Option<&Path>) -> Result<CommandOutput> {
    let a = read_instrument(first)?;
    let b = read_instrument(second)?;
    for (path, instr) in [(first, &a), (second, &b)] {
        let report = instr.validate(tol);
        if !report.passed {
            return Err(CliError::Failure(format!(
                "{} fails validation:\n{}",
                path.display(),
                validation_summary(&report)
            )));
        }
    }
    let composed = compose_instruments(&b, &a).map_err(|e| CliError::failure("compose", e))?;
    emit(out, InstrumentFile::from_instrument(&composed, None).to_json())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimulationMode {
    Exact,
    Sample,
}

pub struct SimulateOptions<'a> {
    pub mode: SimulationMode,
    pub shots: usize,
    pub seed: u64,
    pub p_min: f64,
    pub tol: f64,
    pub state: Option<&'a str>,
    pub json: bool,
}

fn record_key(record: &[(String, String)]) -> String {
    if record.is_empty() {
        return "(no measurements)".into();
    }
    record
        .iter()
        .map(|(r, l)| format!("{r}={l}"))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Serialize)]
struct ExactJson<'a> {
    result: &'a qikit::RunResult,
    marginals: BTreeMap<String, BTreeMap<String, f64>>,
}

#[derive(Serialize)]
struct SampleJson {
    shots: usize,
    seed: u64,
    counts: BTreeMap<String, usize>,
}

pub fn simulate(path: &Path, opts: &SimulateOptions<'_>) -> Result<CommandOutput> {
    let file = CircuitFile::parse(&read_text(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let circuit = file.to_circuit(base, opts.tol)?;
    let spec = opts.state.or(file.initial_state.as_deref()).unwrap_or("0");
    let v0 = parse_state(spec, file.num_qubits)?;
    match opts.mode {
        SimulationMode::Exact => {
            let result = circuit
                .run_exact(&v0, opts.p_min)
                .map_err(|e| CliError::failure("simulation", e))?;
            let mut marginals = BTreeMap::new();
            for reg in &result.registers {
                let m = result
                    .marginal_distribution(&[reg.as_str()])
                    .map_err(|e| CliError::failure("marginal", e))?;
                marginals.insert(
                    reg.clone(),
                    m.into_iter().map(|(k, p)| (k.join(","), p)).collect::<BTreeMap<_, _>>(),
                );
            }
            if opts.json {
                return Ok(CommandOutput::ok(to_json(&ExactJson { result: &result, marginals })));
            }
            let mut s = format!(
                "branches: {}\npruned mass: {:e}\njoint distribution:\n",
                result.branches.len(),
                result.pruned_mass
            );
            for b in &result.branches {
                s += &format!(
                    "  {:<24}  {:.10}  final state {}\n",
                    record_key(&b.record),
                    b.probability,
                    fmt_vector(b.state.as_slice())
                );
            }
            for (reg, dist) in &marginals {
                s += &format!("marginal {reg}:\n");
                for (label, p) in dist {
                    s += &format!("  {label:<8}  {p:.10}\n");
                }
            }
            Ok(CommandOutput::ok(s))
        }
        SimulationMode::Sample => {
            let shots = circuit
                .run_sampled(&v0, opts.shots, opts.seed)
                .map_err(|e| CliError::failure("simulation", e))?;
            let mut counts: BTreeMap<String, usize> = BTreeMap::new();
            for shot in &shots {
                *counts.entry(record_key(&shot.record)).or_default() += 1;
            }
            if opts.json {
                return Ok(CommandOutput::ok(to_json(&SampleJson {
                    shots: opts.shots,
                    seed: opts.seed,
                    counts,
                })));
            }
            let mut s = format!("shots: {}\nseed: {}\ncounts:\n", opts.shots, opts.seed);
            for (key, count) in &counts {
                s += &format!(
                    "  {key:<24}  {count:>10}  {:.6}\n",
                    *count as f64 / opts.shots.max(1) as f64
                );
            }
            Ok(CommandOutput::ok(s))
        }
    }
}

pub fn synth(
    kind: SynthKind,
    params: SynthParams,
    num_qubits: usize,
    description: Option<String>,
    out: Option<&Path>,
) -> Result<CommandOutput> {
    let instr = synthesize(kind, params, num_qubits)?;
    emit(out, InstrumentFile::from_instrument(&instr, description).to_json())
}

pub fn render(path: &Path, out: &Path) -> Result<CommandOutput> {
    let panels = match parse_matrix_file(&read_text(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
    {
        MatrixFile::Instrument(instr) => instr
            .outcomes()
            .iter()
            .map(|o| (format!("outcome {}", o.label), o.branch.clone()))
            .collect::<Vec<_>>(),
        MatrixFile::Single(ptm) => vec![("PTM".to_string(), ptm)],
    };
    write_atomic(out, render_svg(&panels).as_bytes())?;
    Ok(CommandOutput::default())
}
