//! File formats and subcommands behind the `qikit` binary.

pub mod commands;
pub mod error;
pub mod format;
pub mod render;
pub mod report;
pub mod states;
pub mod synth;

pub use commands::CommandOutput;
pub use error::{CliError, Result};
pub use format::{CircuitFile, InstrumentFile, OutcomeEntry, PtmFile};
pub use report::ReportFile;
