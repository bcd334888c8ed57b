use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qikit_cli::commands::{self, SimulateOptions, SimulationMode};
use qikit_cli::synth::{SynthKind, SynthParams};
use qikit_cli::{CliError, CommandOutput};

/// Quantum-instrument toolkit: validate, diagnose and simulate mid-circuit
/// measurements described as Pauli transfer matrices.
#[derive(Parser)]
#[command(name = "qikit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Sample,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ideal,
    Damped,
    Dephased,
    Rotated,
    Bitflip,
}

#[derive(Subcommand)]
enum Command {
    /// Check that an instrument file is CP and sums to a TP map.
    Validate {
        path: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Full error analysis as a JSON report.
    Diagnose {
        path: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Diagnose even if validation fails.
        #[arg(long)]
        force: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Outcome probabilities and post-measurement states for an input state.
    Apply {
        path: PathBuf,
        /// 0, 1, +, -, i, -i, mixed; per-qubit tokens joined by ':'; or
        /// comma-separated Pauli-vector components.
        #[arg(long, allow_hyphen_values = true)]
        state: String,
        #[arg(long)]
        json: bool,
    },
    /// Sequential composition: FIRST is measured, then SECOND.
    Compose {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a circuit file.
    Simulate {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long, default_value_t = 1000)]
        shots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Branches at or below this probability are pruned (exact mode).
        #[arg(long, default_value_t = qikit::sim::DEFAULT_P_MIN)]
        p_min: f64,
        #[arg(long, default_value_t = qikit::sim::DEFAULT_CIRCUIT_TOL)]
        tol: f64,
        /// Overrides the circuit's initial state.
        #[arg(long, allow_hyphen_values = true)]
        state: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Write a noisy computational-basis measurement.
    Synth {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        /// Radians.
        #[arg(long, allow_hyphen_values = true)]
        angle: Option<f64>,
        #[arg(long, default_value_t = 1)]
        qubits: usize,
        #[arg(long)]
        description: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw each branch of an instrument (or a single PTM) as an SVG heatmap.
    Render {
        path: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<CommandOutput, CliError> {
    match cli.command {
        Command::Validate { path, tol, json } => commands::validate(&path, tol, json),
        Command::Diagnose { path, tol, force, out } => commands::diagnose(&path, tol, force, out.as_deref()),
        Command::Apply { path, state, json } => commands::apply(&path, &state, json),
        Command::Compose { first, second, tol, out } => commands::compose(&first, &second, tol, out.as_deref()),
        Command::Simulate { path, mode, shots, seed, p_min, tol, state, json } => {
            let opts = SimulateOptions {
                mode: match mode {
                    Mode::Exact => SimulationMode::Exact,
                    Mode::Sample => SimulationMode::Sample,
                },
                shots,
                seed,
                p_min,
                tol,
                state: state.as_deref(),
                json,
            };
            commands::simulate(&path, &opts)
        }
        Command::Synth { kind, gamma, p, angle, qubits, description, out } => {
            let kind = match kind {
                Kind::Ideal => SynthKind::Ideal,
                Kind::Damped => SynthKind::Damped,
                Kind::Dephased => SynthKind::Dephased,
                Kind::Rotated => SynthKind::Rotated,
                Kind::Bitflip => SynthKind::Bitflip,
            };
            commands::synth(kind, SynthParams { gamma, p, angle }, qubits, description, out.as_deref())
        }
        Command::Render { path, out } => commands::render(&path, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { qikit_cli::error::EXIT_INPUT } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            let _ = std::io::stdout().write_all(out.stdout.as_bytes());
            let _ = std::io::stderr().write_all(out.stderr.as_bytes());
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
