use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aogd::baselines::PhaseMethod;
use aogd::sim::ScenarioConfig;
use aogd_bench::experiment::RunSummary;
use aogd_bench::oracle::{
    aogd_best_of, bcd_best_of, f4_oracle_model, oracle_secrecy_scenario, oracle_solver_options, secrecy_oracle_instance,
};
use aogd_bench::output::write_new_file;
use aogd_bench::svg::chart_for;
use aogd_bench::{
    brute_force_oracle, csv_bytes, run_experiment, Application, BenchError, ExperimentKind, ExperimentOutput,
    ExperimentSpec, OracleTarget, Result,
};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Reproducible experiments for alternating phase optimization on
/// reflecting surfaces.
#[derive(Debug, Parser)]
#[command(name = "aogd-bench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-iteration objective traces of each step rule.
    Convergence {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = AppArg::Secrecy)]
        app: AppArg,
    },
    /// Average secrecy rate against the number of elements.
    SweepSecrecy {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Average weighted sum rate against the number of elements.
    SweepWsr {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Wall time of each method against the number of elements.
    Timing {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = AppArg::Secrecy)]
        app: AppArg,
    },
    /// Exhaustive phase-grid optimum of small instances next to the local solvers.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AppArg {
    Secrecy,
    Wsr,
}

impl From<AppArg> for Application {
    fn from(a: AppArg) -> Self {
        match a {
            AppArg::Secrecy => Application::Secrecy,
            AppArg::Wsr => Application::Wsr,
        }
    }
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Scenario file (TOML key-value pairs); replaces the experiment's preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed; defaults to the scenario's `rng_seed`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    realizations: Option<usize>,
    /// Comma-separated subset of aogd, ag, bb, bcd, manifold.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Comma-separated surface sizes.
    #[arg(long = "m-list", value_delimiter = ',')]
    m_list: Option<Vec<usize>>,
    /// Output CSV; refused if it exists. Without it the CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    threads: Option<usize>,
    /// Also write an SVG chart next to the CSV.
    #[arg(long)]
    svg: bool,
    /// Record wall times in convergence and sweep runs.
    #[arg(long)]
    wall_time: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OracleKind {
    Secrecy,
    F4,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, value_enum, default_value_t = OracleKind::Secrecy)]
    kind: OracleKind,
    /// Scenario file; defaults to a unit-scale secrecy scenario or the WSR preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 3600)]
    grid: usize,
    #[arg(long, default_value_t = 20)]
    instances: usize,
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
}

fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(ScenarioConfig::from_toml_str(&text).map_err(|e| BenchError::Input(e.to_string()))?)
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn build_spec(kind: ExperimentKind, app: Application, args: &CommonArgs) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::new(kind, app);
    if let Some(path) = &args.config {
        spec.scenario = load_config(path)?;
    }
    spec.seed = args.seed.unwrap_or(spec.scenario.rng_seed);
    spec.scenario.rng_seed = spec.seed;
    if let Some(n) = args.realizations {
        spec.realizations = n;
    }
    if let Some(names) = &args.methods {
        spec.methods = names
            .iter()
            .map(|s| s.parse::<PhaseMethod>())
            .collect::<aogd::Result<_>>()
            .map_err(|e| BenchError::Input(e.to_string()))?;
    }
    if let Some(list) = &args.m_list {
        spec.m_list = list.clone();
    }
    spec.output = args.out.clone();
    spec.threads = args.threads.unwrap_or_else(default_threads);
    spec.record_time |= args.wall_time;
    if args.svg && args.out.is_none() {
        return Err(BenchError::Input("--svg needs --out".into()));
    }
    spec.validate()?;
    Ok(spec)
}

fn print_summary(spec: &ExperimentSpec, output: &ExperimentOutput) {
    eprintln!("{:<10} {:>5} {:>12} {:>12} {:>14} {:>8}", "method", "M", "mean bits", "median it.", "median ms", "failed");
    for &method in &spec.methods {
        for &m in &spec.m_list {
            let failed = output
                .runs
                .iter()
                .filter(|r: &&RunSummary| r.method == method && r.m == m && r.error.is_some())
                .count();
            let fmt = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
            eprintln!(
                "{:<10} {:>5} {:>12} {:>12} {:>14} {:>8}",
                method.name(),
                m,
                fmt(output.mean_metric(method, m)),
                fmt(output.median_iterations_to_final(method, m)),
                fmt(output.median_wall_time(method, m).map(|d| d.as_secs_f64() * 1e3)),
                failed
            );
        }
    }
}

fn run_and_write(spec: &ExperimentSpec, svg: bool) -> Result<()> {
    if let Some(path) = &spec.output {
        if path.exists() {
            return Err(BenchError::Input(format!("refusing to overwrite {}", path.display())));
        }
    }
    let output = run_experiment(spec)?;
    let bytes = csv_bytes(spec, &output)?;
    match &spec.output {
        Some(path) => {
            write_new_file(path, &bytes)?;
            if svg {
                write_new_file(&path.with_extension("svg"), chart_for(spec, &output).to_svg().as_bytes())?;
            }
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
        }
    }
    print_summary(spec, &output);
    if output.failures() > 0 {
        eprintln!("warning: {} of {} runs failed", output.failures(), output.runs.len());
    }
    Ok(())
}

fn run_oracle(args: &OracleArgs) -> Result<()> {
    if args.instances == 0 || args.restarts == 0 {
        return Err(BenchError::Input("instances and restarts must be at least 1".into()));
    }
    let threads = args.threads.unwrap_or_else(default_threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| BenchError::Input(e.to_string()))?;
    let mut cfg = match (&args.config, args.kind) {
        (Some(path), _) => load_config(path)?,
        (None, OracleKind::Secrecy) => oracle_secrecy_scenario(),
        (None, OracleKind::F4) => ScenarioConfig::wsr(args.m),
    };
    cfg.m = args.m;
    let opts = oracle_solver_options();
    println!("instance,grid_objective,aogd_best,bcd_best,gap");
    for i in 0..args.instances {
        let (grid, aogd, bcd) = match args.kind {
            OracleKind::Secrecy => {
                let inst = secrecy_oracle_instance(&cfg, args.seed, i)?;
                let target = OracleTarget::Secrecy(&inst);
                let grid = pool.install(|| brute_force_oracle(target, args.grid))?;
                (grid, aogd_best_of(target, args.restarts, args.seed, &opts)?, None)
            }
            OracleKind::F4 => {
                let q = f4_oracle_model(&cfg, args.seed, i)?;
                let target = OracleTarget::PhaseQuadratic(&q);
                let grid = pool.install(|| brute_force_oracle(target, args.grid))?;
                let aogd = aogd_best_of(target, args.restarts, args.seed, &opts)?;
                (grid, aogd, Some(bcd_best_of(&q, args.restarts, args.seed)))
            }
        };
        println!(
            "{i},{},{aogd},{},{}",
            grid.objective,
            bcd.map(|b| b.to_string()).unwrap_or_default(),
            aogd - grid.objective
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match &cli.command {
        Command::Convergence { common, app } => {
            build_spec(ExperimentKind::Convergence, (*app).into(), common).and_then(|s| run_and_write(&s, common.svg))
        }
        Command::SweepSecrecy { common } => {
            build_spec(ExperimentKind::MSweepSecrecy, Application::Secrecy, common).and_then(|s| run_and_write(&s, common.svg))
        }
        Command::SweepWsr { common } => {
            build_spec(ExperimentKind::MSweepWsr, Application::Wsr, common).and_then(|s| run_and_write(&s, common.svg))
        }
        Command::Timing { common, app } => {
            build_spec(ExperimentKind::Timing, (*app).into(), common).and_then(|s| run_and_write(&s, common.svg))
        }
        Command::Oracle(args) => run_oracle(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
