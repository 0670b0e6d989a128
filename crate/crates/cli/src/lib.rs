//! Benchmark harness: configuration, reference values, the solver × seed
//! matrix, and CSV/JSON output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod config;
pub mod output;
pub mod run;

pub use check::{audit_trace, TraceAudit};
pub use config::{ProblemSpec, ReferenceSpec, RunConfig, SolverSpec};
pub use output::{
    read_summary_csv, read_trace_csv, write_outputs, write_summary_csv, write_trace_csv, TraceRow,
};
pub use run::{run_matrix, run_reference, summarize, Hit, MatrixOutput, RunOutcome, SummaryRow};

/// Failures surfaced by the harness, split by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver failure: {0}")]
    Solver(#[from] vmdca::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) | CliError::Output(_) => 3,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
