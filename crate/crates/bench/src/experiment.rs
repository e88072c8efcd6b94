//! Experiment descriptions and the Monte-Carlo runners.
//!
//! Every realization derives its generator from `(seed, M, index)`, draws the
//! channels first and the initial phases second, and shares both across all
//! methods. Results are collected by task and sorted before they are
//! returned, so the output does not depend on the worker count.

use std::collections::HashSet;
use std::f64::consts::LN_2;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use aogd::ao::{IterationTrace, PhaseVector, SolverOptions};
use aogd::baselines::{run_method, PhaseMethod};
use aogd::secrecy::{secrecy_rate, SecrecyProblem};
use aogd::sim::{child_seed, gen_secrecy_instance, gen_wsr_instance, realization_rng, ScenarioConfig};
use aogd::wsr::WsrProblem;
use rayon::prelude::*;

use crate::error::{BenchError, Result};
use crate::output::{Label, Row};

/// Iteration cap of sweep and timing runs. They compare final states and
/// times to the stopping rule, so the cap only guards against runaway runs.
pub const FINAL_STATE_MAX_ITERATIONS: usize = 200_000;

/// Which experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Convergence,
    MSweepSecrecy,
    MSweepWsr,
    Timing,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::MSweepSecrecy => "m_sweep_secrecy",
            ExperimentKind::MSweepWsr => "m_sweep_wsr",
            ExperimentKind::Timing => "timing",
        }
    }
}

/// Which optimization problem the experiment solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Application {
    Secrecy,
    Wsr,
}

impl Application {
    pub fn name(self) -> &'static str {
        match self {
            Application::Secrecy => "secrecy",
            Application::Wsr => "wsr",
        }
    }

    /// Reported metric in bits: the secrecy rate, or the weighted sum rate
    /// converted from nats.
    pub fn metric_bits(self, objective: f64) -> f64 {
        match self {
            Application::Secrecy => secrecy_rate(-objective),
            Application::Wsr => -objective / LN_2,
        }
    }
}

impl std::str::FromStr for Application {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "secrecy" => Ok(Application::Secrecy),
            "wsr" => Ok(Application::Wsr),
            other => Err(BenchError::Input(format!("unknown application `{other}`"))),
        }
    }
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub application: Application,
    /// Scenario template; `m` is replaced by each entry of `m_list`.
    pub scenario: ScenarioConfig,
    pub solver: SolverOptions<f64>,
    pub methods: Vec<PhaseMethod>,
    pub m_list: Vec<usize>,
    pub realizations: usize,
    pub output: Option<PathBuf>,
    pub seed: u64,
    /// Fill `elapsed_ms`. Always on for timing runs; off elsewhere so that
    /// identical inputs give identical files.
    pub record_time: bool,
    /// Worker threads. Results do not depend on it. Timing runs are serial.
    pub threads: usize,
}

impl ExperimentSpec {
    /// Default settings of `kind` for `application`.
    pub fn new(kind: ExperimentKind, application: Application) -> Self {
        let application = match kind {
            ExperimentKind::MSweepSecrecy => Application::Secrecy,
            ExperimentKind::MSweepWsr => Application::Wsr,
            _ => application,
        };
        let (scenario, mut solver) = match (kind, application) {
            (ExperimentKind::Convergence, Application::Secrecy) => {
                (ScenarioConfig::secrecy_convergence(60), SolverOptions::secrecy())
            }
            (_, Application::Secrecy) => (ScenarioConfig::secrecy_sweep(60), SolverOptions::secrecy()),
            (_, Application::Wsr) => (ScenarioConfig::wsr(20), SolverOptions::wsr()),
        };
        use PhaseMethod::*;
        let (methods, m_list, realizations) = match (kind, application) {
            (ExperimentKind::Convergence, Application::Secrecy) => (vec![Tailored, Armijo, BarzilaiBorwein], vec![60, 100], 100),
            (ExperimentKind::Convergence, Application::Wsr) => (vec![Tailored, Armijo, BarzilaiBorwein], vec![20], 100),
            (ExperimentKind::MSweepSecrecy, _) => (vec![Tailored, ElementwiseBcd, Manifold], vec![20, 40, 60, 80], 200),
            (ExperimentKind::MSweepWsr, _) => (vec![Tailored, ElementwiseBcd, Manifold], vec![10, 20, 40], 200),
            (ExperimentKind::Timing, Application::Secrecy) => (vec![Tailored, Manifold], vec![20, 40, 60, 80, 100], 20),
            (ExperimentKind::Timing, Application::Wsr) => (vec![Tailored, Manifold], vec![20, 40, 60, 80], 20),
        };
        if kind != ExperimentKind::Convergence {
            solver.max_iterations = FINAL_STATE_MAX_ITERATIONS;
        }
        Self {
            kind,
            application,
            scenario,
            solver,
            methods,
            m_list,
            realizations,
            output: None,
            seed: 0,
            record_time: kind == ExperimentKind::Timing,
            threads: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(BenchError::Input(msg));
        match (self.kind, self.application) {
            (ExperimentKind::MSweepSecrecy, Application::Wsr) | (ExperimentKind::MSweepWsr, Application::Secrecy) => {
                return bad(format!("{} cannot run the {} application", self.kind.name(), self.application.name()));
            }
            _ => {}
        }
        if self.methods.is_empty() {
            return bad("method list is empty".into());
        }
        if self.methods.iter().collect::<HashSet<_>>().len() != self.methods.len() {
            return bad("method list has duplicates".into());
        }
        if self.m_list.is_empty() {
            return bad("M list is empty".into());
        }
        if self.m_list.contains(&0) {
            return bad("M must be at least 1".into());
        }
        if self.m_list.iter().collect::<HashSet<_>>().len() != self.m_list.len() {
            return bad("M list has duplicates".into());
        }
        if self.realizations == 0 {
            return bad("realization count must be at least 1".into());
        }
        if self.threads == 0 {
            return bad("thread count must be at least 1".into());
        }
        self.scenario_for(self.m_list[0]).validate()?;
        self.solver.validate()?;
        Ok(())
    }

    /// Scenario template with `m` surface elements.
    pub fn scenario_for(&self, m: usize) -> ScenarioConfig {
        ScenarioConfig { m, ..self.scenario.clone() }
    }
}

/// Final state of one (method, M, realization) run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub method: PhaseMethod,
    pub m: usize,
    pub realization: usize,
    /// Objective in minimization orientation; NaN when the run failed.
    pub objective: f64,
    pub metric_bits: f64,
    pub iterations: usize,
    /// First iteration within `1e-4` (normalized) of the final objective.
    pub iterations_to_final: Option<usize>,
    pub converged: bool,
    /// Wall time of the solve, when recorded.
    pub wall_time: Option<Duration>,
    pub error: Option<String>,
}

/// Rows and per-run summaries of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<Row>,
    pub runs: Vec<RunSummary>,
}

impl ExperimentOutput {
    pub fn failures(&self) -> usize {
        self.runs.iter().filter(|r| r.error.is_some()).count()
    }

    fn successful(&self, method: PhaseMethod, m: usize) -> impl Iterator<Item = &RunSummary> {
        self.runs
            .iter()
            .filter(move |r| r.method == method && r.m == m && r.error.is_none())
    }

    pub fn mean_metric(&self, method: PhaseMethod, m: usize) -> Option<f64> {
        mean(&self.successful(method, m).map(|r| r.metric_bits).collect::<Vec<_>>())
    }

    pub fn median_iterations_to_final(&self, method: PhaseMethod, m: usize) -> Option<f64> {
        median(
            &self
                .successful(method, m)
                .filter_map(|r| r.iterations_to_final)
                .map(|i| i as f64)
                .collect::<Vec<_>>(),
        )
    }

    pub fn median_wall_time(&self, method: PhaseMethod, m: usize) -> Option<Duration> {
        median(
            &self
                .successful(method, m)
                .filter_map(|r| r.wall_time)
                .map(|t| t.as_secs_f64())
                .collect::<Vec<_>>(),
        )
        .map(Duration::from_secs_f64)
    }
}

pub(crate) fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample standard deviation; zero for a single value.
pub(crate) fn std_dev(xs: &[f64]) -> Option<f64> {
    let mu = mean(xs)?;
    if xs.len() < 2 {
        return Some(0.0);
    }
    Some((xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt())
}

pub(crate) fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Solves realization `index` at size `m` and returns its trace, whether the
/// stopping test fired, and the solve wall time.
pub fn solve_realization(
    spec: &ExperimentSpec,
    method: PhaseMethod,
    m: usize,
    index: usize,
) -> aogd::Result<(IterationTrace<f64>, bool, Duration)> {
    let cfg = spec.scenario_for(m);
    let mut rng = realization_rng(child_seed(spec.seed, m as u64), index as u64);
    match spec.application {
        Application::Secrecy => {
            let inst = gen_secrecy_instance::<f64, _>(&cfg, &mut rng)?;
            let theta0 = PhaseVector::random(m, &mut rng);
            let problem = SecrecyProblem::new(&inst);
            let start = Instant::now();
            let sol = run_method(&problem, theta0, &spec.solver, method)?;
            Ok((sol.trace, sol.converged, start.elapsed()))
        }
        Application::Wsr => {
            let inst = gen_wsr_instance::<f64, _>(&cfg, &mut rng)?;
            let theta0 = PhaseVector::random(m, &mut rng);
            let problem = WsrProblem::new(&inst, &spec.solver);
            let start = Instant::now();
            let sol = run_method(&problem, theta0, &spec.solver, method)?;
            Ok((sol.trace, sol.converged, start.elapsed()))
        }
    }
}

struct TaskResult {
    summary: RunSummary,
    trace: Option<IterationTrace<f64>>,
}

fn run_task(spec: &ExperimentSpec, method: PhaseMethod, m: usize, index: usize) -> TaskResult {
    match solve_realization(spec, method, m, index) {
        Ok((trace, converged, elapsed)) => {
            let objective = trace.final_objective().unwrap_or(f64::NAN);
            TaskResult {
                summary: RunSummary {
                    method,
                    m,
                    realization: index,
                    objective,
                    metric_bits: spec.application.metric_bits(objective),
                    iterations: trace.len(),
                    iterations_to_final: trace.iterations_to_reach_final(1e-4),
                    converged,
                    wall_time: spec.record_time.then_some(elapsed),
                    error: None,
                },
                trace: Some(trace),
            }
        }
        Err(e) => TaskResult {
            summary: RunSummary {
                method,
                m,
                realization: index,
                objective: f64::NAN,
                metric_bits: f64::NAN,
                iterations: 0,
                iterations_to_final: None,
                converged: false,
                wall_time: None,
                error: Some(e.to_string()),
            },
            trace: None,
        },
    }
}

fn tasks(spec: &ExperimentSpec) -> Vec<(PhaseMethod, usize, usize)> {
    let mut out = Vec::with_capacity(spec.methods.len() * spec.m_list.len() * spec.realizations);
    for &method in &spec.methods {
        for &m in &spec.m_list {
            for r in 0..spec.realizations {
                out.push((method, m, r));
            }
        }
    }
    out
}

fn run_parallel(spec: &ExperimentSpec) -> Result<Vec<TaskResult>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.threads)
        .build()
        .map_err(|e| BenchError::Input(format!("cannot start worker pool: {e}")))?;
    let list = tasks(spec);
    Ok(pool.install(|| list.par_iter().map(|&(method, m, r)| run_task(spec, method, m, r)).collect()))
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn failed_row(spec: &ExperimentSpec, s: &RunSummary) -> Row {
    Row {
        realization: Label::Index(s.realization),
        ..Row::empty(spec.kind, s.method, s.m)
    }
}

fn finish(spec: &ExperimentSpec, mut rows: Vec<Row>, runs: Vec<RunSummary>) -> Result<ExperimentOutput> {
    let output = ExperimentOutput {
        rows: {
            let order = |m: PhaseMethod| spec.methods.iter().position(|x| *x == m).unwrap_or(usize::MAX);
            rows.sort_by(|a, b| {
                (order(a.method), a.m, a.realization, a.iteration).cmp(&(order(b.method), b.m, b.realization, b.iteration))
            });
            rows
        },
        runs,
    };
    if output.failures() == output.runs.len() {
        let first = output.runs.iter().find_map(|r| r.error.clone()).unwrap_or_default();
        return Err(BenchError::AllFailed(first));
    }
    Ok(output)
}

/// Per-iteration traces of every (method, M, realization).
pub fn run_convergence(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let results = run_parallel(spec)?;
    let mut rows = Vec::new();
    let mut runs = Vec::with_capacity(results.len());
    for TaskResult { summary: s, trace } in results {
        match &trace {
            Some(trace) => {
                for rec in &trace.records {
                    rows.push(Row {
                        realization: Label::Index(s.realization),
                        iteration: Some(rec.iteration),
                        objective: rec.objective,
                        metric_bits: spec.application.metric_bits(rec.objective),
                        step_size: Some(rec.step_size),
                        backtracks: Some(rec.backtracks),
                        grad_norm: Some(rec.grad_norm),
                        elapsed_ms: spec.record_time.then(|| ms(rec.elapsed)),
                        ..Row::empty(spec.kind, s.method, s.m)
                    });
                }
            }
            None => rows.push(failed_row(spec, &s)),
        }
        runs.push(s);
    }
    finish(spec, rows, runs)
}

fn final_row(spec: &ExperimentSpec, s: &RunSummary, trace: &IterationTrace<f64>) -> Row {
    Row {
        realization: Label::Index(s.realization),
        iteration: Some(s.iterations),
        objective: s.objective,
        metric_bits: s.metric_bits,
        grad_norm: trace.records.last().map(|r| r.grad_norm),
        elapsed_ms: s.wall_time.map(ms),
        ..Row::empty(spec.kind, s.method, s.m)
    }
}

fn summary_rows(spec: &ExperimentSpec, runs: &[RunSummary], labels: &[Label]) -> Vec<Row> {
    let mut rows = Vec::new();
    for &method in &spec.methods {
        for &m in &spec.m_list {
            let ok: Vec<&RunSummary> = runs
                .iter()
                .filter(|r| r.method == method && r.m == m && r.error.is_none())
                .collect();
            let objectives: Vec<f64> = ok.iter().map(|r| r.objective).collect();
            let metrics: Vec<f64> = ok.iter().map(|r| r.metric_bits).collect();
            let times: Vec<f64> = ok.iter().filter_map(|r| r.wall_time.map(ms)).collect();
            for &label in labels {
                let stat = match label {
                    Label::Mean => mean,
                    Label::Std => std_dev,
                    Label::Median => median,
                    Label::Index(_) => unreachable!("summary labels only"),
                };
                rows.push(Row {
                    realization: label,
                    objective: stat(&objectives).unwrap_or(f64::NAN),
                    metric_bits: stat(&metrics).unwrap_or(f64::NAN),
                    elapsed_ms: stat(&times),
                    ..Row::empty(spec.kind, method, m)
                });
            }
        }
    }
    rows
}

/// Final objective and metric per realization, followed by the mean and
/// standard deviation per (method, M).
pub fn run_m_sweep(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let results = run_parallel(spec)?;
    let mut rows = Vec::new();
    let mut runs = Vec::with_capacity(results.len());
    for TaskResult { summary: s, trace } in results {
        rows.push(match &trace {
            Some(trace) => final_row(spec, &s, trace),
            None => failed_row(spec, &s),
        });
        runs.push(s);
    }
    rows.extend(summary_rows(spec, &runs, &[Label::Mean, Label::Std]));
    finish(spec, rows, runs)
}

/// Wall time of every solve, run serially after one untimed warm-up solve per
/// (method, M), followed by the median per (method, M).
pub fn run_timing(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let timed = ExperimentSpec {
        record_time: true,
        ..spec.clone()
    };
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    for &method in &timed.methods {
        for &m in &timed.m_list {
            let _ = solve_realization(&timed, method, m, 0);
            for r in 0..timed.realizations {
                let TaskResult { summary: s, trace } = run_task(&timed, method, m, r);
                rows.push(match &trace {
                    Some(trace) => final_row(&timed, &s, trace),
                    None => failed_row(&timed, &s),
                });
                runs.push(s);
            }
        }
    }
    rows.extend(summary_rows(&timed, &runs, &[Label::Median]));
    finish(&timed, rows, runs)
}

/// Dispatches on `spec.kind`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    match spec.kind {
        ExperimentKind::Convergence => run_convergence(spec),
        ExperimentKind::MSweepSecrecy | ExperimentKind::MSweepWsr => run_m_sweep(spec),
        ExperimentKind::Timing => run_timing(spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: ExperimentKind, app: Application) -> ExperimentSpec {
        ExperimentSpec {
            m_list: vec![4],
            realizations: 2,
            ..ExperimentSpec::new(kind, app)
        }
    }

    #[test]
    fn statistics() {
        assert_eq!(mean(&[]), None);
        assert_eq!(mean(&[1.0, 2.0, 6.0]), Some(3.0));
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), Some(2.5));
        assert_eq!(std_dev(&[5.0]), Some(0.0));
        assert!((std_dev(&[1.0, 3.0]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn validation_rejects_bad_specs() {
        let ok = small(ExperimentKind::Convergence, Application::Secrecy);
        ok.validate().unwrap();
        for bad in [
            ExperimentSpec { methods: vec![], ..ok.clone() },
            ExperimentSpec { m_list: vec![], ..ok.clone() },
            ExperimentSpec { m_list: vec![0], ..ok.clone() },
            ExperimentSpec { realizations: 0, ..ok.clone() },
            ExperimentSpec { threads: 0, ..ok.clone() },
            ExperimentSpec {
                methods: vec![PhaseMethod::Tailored, PhaseMethod::Tailored],
                ..ok.clone()
            },
            ExperimentSpec {
                kind: ExperimentKind::MSweepWsr,
                ..ok.clone()
            },
        ] {
            assert!(matches!(bad.validate(), Err(BenchError::Input(_))), "{bad:?}");
        }
    }

    #[test]
    fn sweep_kinds_fix_the_application() {
        assert_eq!(ExperimentSpec::new(ExperimentKind::MSweepWsr, Application::Secrecy).application, Application::Wsr);
        assert_eq!(ExperimentSpec::new(ExperimentKind::MSweepSecrecy, Application::Wsr).application, Application::Secrecy);
    }

    #[test]
    fn only_convergence_runs_keep_the_solver_cap() {
        let default_cap = SolverOptions::<f64>::secrecy().max_iterations;
        assert_eq!(ExperimentSpec::new(ExperimentKind::Convergence, Application::Secrecy).solver.max_iterations, default_cap);
        for kind in [ExperimentKind::MSweepSecrecy, ExperimentKind::MSweepWsr, ExperimentKind::Timing] {
            assert_eq!(ExperimentSpec::new(kind, Application::Wsr).solver.max_iterations, FINAL_STATE_MAX_ITERATIONS);
        }
    }

    #[test]
    fn single_method_single_m_sweep_has_one_row_per_realization_plus_summary() {
        let spec = ExperimentSpec {
            methods: vec![PhaseMethod::Tailored],
            ..small(ExperimentKind::MSweepSecrecy, Application::Secrecy)
        };
        let out = run_m_sweep(&spec).unwrap();
        assert_eq!(out.runs.len(), 2);
        assert_eq!(out.rows.len(), 4);
        assert_eq!(out.rows[2].realization, Label::Mean);
        assert_eq!(out.rows[3].realization, Label::Std);
        let mu = (out.runs[0].metric_bits + out.runs[1].metric_bits) / 2.0;
        assert!((out.rows[2].metric_bits - mu).abs() <= 1e-12 * mu.abs().max(1.0));
    }

    #[test]
    fn convergence_rows_follow_the_traces() {
        let spec = small(ExperimentKind::Convergence, Application::Wsr);
        let out = run_convergence(&spec).unwrap();
        let total: usize = out.runs.iter().map(|r| r.iterations).sum();
        assert_eq!(out.rows.len(), total);
        assert!(out.rows.iter().all(|r| r.elapsed_ms.is_none()));
        let first = &out.rows[0];
        assert_eq!((first.method, first.realization, first.iteration), (PhaseMethod::Tailored, Label::Index(0), Some(0)));
    }

    #[test]
    fn timing_runs_record_positive_times() {
        let spec = small(ExperimentKind::Timing, Application::Secrecy);
        let out = run_timing(&spec).unwrap();
        assert!(out.runs.iter().all(|r| r.wall_time.is_some_and(|t| t > Duration::ZERO)));
        assert!(out.median_wall_time(PhaseMethod::Tailored, 4).is_some());
        assert_eq!(out.rows.iter().filter(|r| r.realization == Label::Median).count(), 2);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let spec = small(ExperimentKind::Convergence, Application::Secrecy);
        let serial = run_convergence(&spec).unwrap();
        let parallel = run_convergence(&ExperimentSpec { threads: 3, ..spec }).unwrap();
        assert_eq!(serial, parallel);
    }
}
