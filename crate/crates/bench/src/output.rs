//! CSV serialization with a commented header block.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use aogd::baselines::PhaseMethod;

use crate::error::{BenchError, Result};
use crate::experiment::{ExperimentKind, ExperimentOutput, ExperimentSpec};

/// Column order of every output file.
pub const COLUMNS: [&str; 11] = [
    "experiment",
    "method",
    "M",
    "realization",
    "iteration",
    "objective",
    "metric_bits",
    "step_size",
    "backtracks",
    "grad_norm",
    "elapsed_ms",
];

/// Realization column: an index, or a statistic over all realizations.
/// Indices sort before statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Index(usize),
    Mean,
    Std,
    Median,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Label::Index(i) => write!(f, "{i}"),
            Label::Mean => f.write_str("mean"),
            Label::Std => f.write_str("std"),
            Label::Median => f.write_str("median"),
        }
    }
}

/// One CSV record. Optional fields are written as empty cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub experiment: ExperimentKind,
    pub method: PhaseMethod,
    pub m: usize,
    pub realization: Label,
    pub iteration: Option<usize>,
    pub objective: f64,
    pub metric_bits: f64,
    pub step_size: Option<f64>,
    pub backtracks: Option<usize>,
    pub grad_norm: Option<f64>,
    pub elapsed_ms: Option<f64>,
}

impl Row {
    /// Row of realization 0 with NaN values and empty optional cells; the
    /// form used for a failed run.
    pub fn empty(experiment: ExperimentKind, method: PhaseMethod, m: usize) -> Self {
        Self {
            experiment,
            method,
            m,
            realization: Label::Index(0),
            iteration: None,
            objective: f64::NAN,
            metric_bits: f64::NAN,
            step_size: None,
            backtracks: None,
            grad_norm: None,
            elapsed_ms: None,
        }
    }

    fn record(&self) -> [String; 11] {
        fn opt<T: ToString>(x: Option<T>) -> String {
            x.map(|v| v.to_string()).unwrap_or_default()
        }
        [
            self.experiment.name().to_string(),
            self.method.name().to_string(),
            self.m.to_string(),
            self.realization.to_string(),
            opt(self.iteration),
            self.objective.to_string(),
            self.metric_bits.to_string(),
            opt(self.step_size),
            opt(self.backtracks),
            opt(self.grad_norm),
            opt(self.elapsed_ms),
        ]
    }
}

/// `#`-prefixed lines recording the tool version, the resolved experiment and
/// scenario, and the seed. The worker count is deliberately absent.
pub fn header_block(spec: &ExperimentSpec) -> String {
    let join = |xs: Vec<String>| xs.join(",");
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str("# ");
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("tool: aogd-bench {}", env!("CARGO_PKG_VERSION")));
    line(format!("experiment: {}", spec.kind.name()));
    line(format!("application: {}", spec.application.name()));
    line(format!("methods: {}", join(spec.methods.iter().map(|m| m.name().to_string()).collect())));
    line(format!("m_list: {}", join(spec.m_list.iter().map(|m| m.to_string()).collect())));
    line(format!("realizations: {}", spec.realizations));
    line(format!("seed: {}", spec.seed));
    line(format!("record_time: {}", spec.record_time));
    line(format!("solver: {:?}", spec.solver));
    line("scenario (m is replaced by each entry of m_list):".to_string());
    for l in spec.scenario.to_toml_string().lines() {
        line(format!("  {l}"));
    }
    out
}

/// Complete file contents: header block, column names, rows. LF line endings.
pub fn csv_bytes(spec: &ExperimentSpec, output: &ExperimentOutput) -> Result<Vec<u8>> {
    let mut buf = header_block(spec).into_bytes();
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut buf);
        w.write_record(COLUMNS)?;
        for row in &output.rows {
            w.write_record(row.record())?;
        }
        w.flush()?;
    }
    Ok(buf)
}

/// Writes `bytes` to a new file; an existing file is never overwritten.
pub fn write_new_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut file = OpenOptions::new().write(true).create_new(true).open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::AlreadyExists {
            BenchError::Input(format!("refusing to overwrite {}", path.display()))
        } else {
            BenchError::Io(e)
        }
    })?;
    file.write_all(bytes)?;
    Ok(())
}

pub fn write_csv(spec: &ExperimentSpec, output: &ExperimentOutput, path: &Path) -> Result<()> {
    write_new_file(path, &csv_bytes(spec, output)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::Application;

    fn spec() -> ExperimentSpec {
        ExperimentSpec {
            m_list: vec![3],
            realizations: 1,
            methods: vec![PhaseMethod::Tailored],
            ..ExperimentSpec::new(ExperimentKind::Convergence, Application::Secrecy)
        }
    }

    #[test]
    fn labels_sort_indices_first() {
        let mut v = vec![Label::Median, Label::Index(3), Label::Mean, Label::Index(1), Label::Std];
        v.sort();
        assert_eq!(v, vec![Label::Index(1), Label::Index(3), Label::Mean, Label::Std, Label::Median]);
    }

    #[test]
    fn rows_serialize_in_column_order() {
        let row = Row {
            realization: Label::Index(2),
            iteration: Some(7),
            objective: -1.5,
            metric_bits: 0.25,
            backtracks: Some(3),
            ..Row::empty(ExperimentKind::Timing, PhaseMethod::Manifold, 40)
        };
        assert_eq!(row.record().join(","), "timing,manifold,40,2,7,-1.5,0.25,,3,,");
        assert_eq!(Row::empty(ExperimentKind::Convergence, PhaseMethod::Tailored, 1).record()[5], "NaN");
    }

    #[test]
    fn file_has_header_block_columns_and_lf_endings() {
        let s = spec();
        let out = ExperimentOutput {
            rows: vec![Row {
                iteration: Some(0),
                objective: -2.0,
                metric_bits: 1.0,
                ..Row::empty(s.kind, PhaseMethod::Tailored, 3)
            }],
            runs: vec![],
        };
        let text = String::from_utf8(csv_bytes(&s, &out).unwrap()).unwrap();
        assert!(!text.contains('\r'));
        assert!(text.starts_with("# tool: aogd-bench "));
        assert!(text.contains("# seed: 0\n"));
        assert!(text.contains("#   c0_db = "));
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body[0], COLUMNS.join(","));
        assert_eq!(body[1], "convergence,aogd,3,0,0,-2,1,,,,");
    }

    #[test]
    fn existing_files_are_not_overwritten() {
        let dir = std::env::temp_dir().join(format!("aogd-bench-output-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("once.csv");
        let _ = std::fs::remove_file(&path);
        write_new_file(&path, b"first").unwrap();
        assert!(matches!(write_new_file(&path, b"second"), Err(BenchError::Input(_))));
        assert_eq!(std::fs::read(&path).unwrap(), b"first");
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
