mod subprocess;
mod task;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use bbo_core::advisor::Algorithm;
use bbo_core::bench::{self, BenchOptions, PROBLEM_NAMES};
use bbo_core::optimizer::{run, RunOptions};
use bbo_core::report::{self, Analyses};
use bbo_core::{rng_from_seed, BboError};
use clap::{Parser, Subcommand};

use crate::subprocess::SubprocessObjective;
use crate::task::TaskFile;

#[derive(Parser)]
#[command(name = "bbo", version, about = "Black-box optimization from the command line")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Optimize an external program described by a task file.
    Run {
        /// Task file (JSON).
        #[arg(long)]
        task: PathBuf,
        /// Shell command evaluating one configuration per invocation.
        #[arg(long)]
        cmd: String,
        /// Directory for history.json and report.html.
        #[arg(long, default_value = "bbo-out")]
        out: PathBuf,
        /// Concurrent evaluations (overrides the task file).
        #[arg(long)]
        parallelism: Option<usize>,
        /// Seconds allowed per evaluation (overrides the task file).
        #[arg(long)]
        timeout: Option<f64>,
    },
    /// Render an HTML report from a history file.
    Report {
        history: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Compare strategies on the built-in problems.
    Bench {
        /// Comma-separated problem names.
        #[arg(long, value_delimiter = ',', default_value = "constr,branin,ackley")]
        problems: Vec<String>,
        /// Comma-separated strategies (auto, gp, prf, ea, random).
        #[arg(long, value_delimiter = ',', default_value = "auto,random")]
        strategies: Vec<String>,
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long, default_value_t = 100)]
        budget: usize,
        /// Directory for bench.csv and summary.json.
        #[arg(long, default_value = "bbo-bench")]
        out: PathBuf,
        /// Worker threads (defaults to the number of CPUs).
        #[arg(long)]
        threads: Option<usize>,
    },
}

enum Failure {
    Setup(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Setup(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Setup(m) | Failure::Io(m) => m,
        }
    }
}

fn setup(e: BboError) -> Failure {
    Failure::Setup(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Io(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    std::io::Write::write_all(&mut tmp, contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn cmd_run(
    task_path: &Path,
    command: &str,
    out: &Path,
    parallelism: Option<usize>,
    timeout: Option<f64>,
) -> Result<(), Failure> {
    if command.trim().is_empty() {
        return Err(Failure::Setup("--cmd must name a program".into()));
    }
    let text = read(task_path)?;
    let file = TaskFile::parse(&text)
        .map_err(|e| Failure::Setup(format!("{}: {e}", task_path.display())))?;
    let parallelism = parallelism.or(file.parallelism).unwrap_or(1);
    if parallelism == 0 {
        return Err(Failure::Setup("parallelism must be at least 1".into()));
    }
    let timeout = match timeout.or(file.timeout) {
        Some(t) if !(t > 0.0 && t.is_finite()) => {
            return Err(Failure::Setup("timeout must be a positive number of seconds".into()))
        }
        t => t.map(Duration::from_secs_f64),
    };
    let spec = file.to_spec(parallelism).map_err(setup)?;
    let space = spec.space.clone();
    let objective = SubprocessObjective {
        command: command.to_string(),
        timeout,
        shape: (spec.num_objectives, spec.num_constraints),
    };
    let options = RunOptions { parallelism, ..RunOptions::default() };
    let result = run(spec, objective, &options).map_err(setup)?;

    let history = &result.history;
    let analyses = Analyses::for_history(history, Some(&space), &mut rng_from_seed(file.seed));
    write_atomic(&out.join("history.json"), &report::export_json(history))?;
    write_atomic(&out.join("report.html"), &report::render_html(history, &analyses))?;
    let failed = history.observations().iter().filter(|o| !o.is_success()).count();
    eprintln!(
        "{} evaluations ({failed} failed), stopped: {:?}; wrote {}",
        history.len(),
        result.stop_reason,
        out.display()
    );
    if let Some(best) = &result.incumbent {
        println!("best objective {} at {}", best.objectives[0], best.config);
    } else if !result.pareto_front.is_empty() {
        println!("pareto front of {} configurations", result.pareto_front.len());
    }
    Ok(())
}

fn cmd_report(history_path: &Path, out: &Path) -> Result<(), Failure> {
    let text = read(history_path)?;
    let history = report::import_json(&text).map_err(|e| Failure::Setup(format!("{}: {e}", history_path.display())))?;
    let space = report::infer_space(&history).ok();
    let analyses = Analyses::for_history(&history, space.as_ref(), &mut rng_from_seed(0));
    write_atomic(out, &report::render_html(&history, &analyses))
}

fn cmd_bench(
    problems: &[String],
    strategies: &[String],
    seeds: usize,
    budget: usize,
    out: &Path,
    threads: Option<usize>,
) -> Result<(), Failure> {
    let problems = problems
        .iter()
        .map(|name| {
            bench::problem_by_name(name).ok_or_else(|| {
                Failure::Setup(format!("unknown problem '{name}' (valid: {})", PROBLEM_NAMES.join(", ")))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let strategies = strategies
        .iter()
        .map(|s| s.parse::<Algorithm>().map_err(setup))
        .collect::<Result<Vec<_>, _>>()?;
    if seeds == 0 || budget == 0 {
        return Err(Failure::Setup("--seeds and --budget must be positive".into()));
    }
    let mut options = BenchOptions::default();
    if let Some(t) = threads {
        options.threads = t.max(1);
    }
    let table = bench::run_benchmark(&problems, &strategies, seeds, budget, &options).map_err(setup)?;
    write_atomic(&out.join("bench.csv"), &table.to_csv())?;
    write_atomic(&out.join("summary.json"), &table.summary_json())?;
    for s in table.summary().strategies {
        println!("{:<8} median rank {:.2}", s.strategy, s.median_rank);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Cmd::Run { task, cmd, out, parallelism, timeout } => cmd_run(task, cmd, out, *parallelism, *timeout),
        Cmd::Report { history, out } => cmd_report(history, out),
        Cmd::Bench { problems, strategies, seeds, budget, out, threads } => {
            cmd_bench(problems, strategies, *seeds, *budget, out, *threads)
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("bbo: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
