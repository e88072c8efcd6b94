//! Monte-Carlo experiment harness for the `aogd` solvers.
//!
//! An [`ExperimentSpec`] names the experiment, the scenario template, the
//! phase-update methods, the surface sizes and the realization count. The
//! runners return rows in a fixed CSV schema together with per-run summaries;
//! [`output`] writes them with a header block and [`svg`] draws them.

pub mod error;
pub mod experiment;
pub mod oracle;
pub mod output;
pub mod svg;

pub use error::{BenchError, Result};
pub use experiment::{
    run_convergence, run_experiment, run_m_sweep, run_timing, Application, ExperimentKind, ExperimentOutput,
    ExperimentSpec, RunSummary,
};
pub use oracle::{brute_force_oracle, OracleResult, OracleTarget};
pub use output::{csv_bytes, write_csv, Label, Row, COLUMNS};
