use std::ops::ControlFlow;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

use lasbound::generate::{near_regular_graph, random_graph};
use lasbound::pipeline::{
    load_manifest, run_batch_with, run_with_progress, summarize, summary_csv, summary_markdown, LevelOverride,
    RunConfig, RunRequest, DEFAULT_MAX_BASIS, DEFAULT_MAX_ORDER,
};
use lasbound::solver::Checkpoint;
use lasbound::{Error, PrecisionMode, SolverConfig};

/// Certified upper bounds on the stability number of a graph from
/// Lasserre-hierarchy relaxations solved by ADMM.
#[derive(Parser)]
#[command(name = "lasbound", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
    /// Only print warnings and errors.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Erdős–Rényi graph G(n, p) in DIMACS format.
    GenRandom {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Graph with degrees at most r from collapsing r perfect matchings'
    /// worth of points.
    GenNearRegular {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every entry of a JSON manifest and print a summary table.
    Batch {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_enum, default_value_t = SummaryFormat::Markdown)]
        summary: SummaryFormat,
        /// Directory receiving one JSON report per entry.
        #[arg(long)]
        reports: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SummaryFormat {
    Markdown,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Clone, Copy, ValueEnum)]
enum Precision {
    Single,
    Double,
}

#[derive(Args)]
struct RunArgs {
    /// DIMACS graph file.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Bound the stability number of the complement instead.
    #[arg(long)]
    complement: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_BASIS)]
    max_basis: usize,
    #[arg(long, value_enum)]
    level: Option<Level>,
    /// Refuse bases larger than this.
    #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
    max_order: usize,
    /// Start the final solve from zero instead of the first-level solution.
    #[arg(long)]
    cold: bool,
    #[arg(long, default_value_t = 3600.0)]
    time_limit: f64,
    #[arg(long, value_enum, default_value_t = Precision::Single)]
    precision: Precision,
    #[arg(long, default_value_t = 0.8)]
    rho_scale: f64,
    #[arg(long, default_value_t = 1.5)]
    step: f64,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    check_every: u64,
    #[arg(long, default_value_t = 150)]
    kstag: usize,
    #[arg(long, default_value_t = 1e-5)]
    stag_tol: f64,
    #[arg(long, default_value_t = 100)]
    bound_every: u64,
    /// Also record a bound whenever this many seconds have passed.
    #[arg(long)]
    bound_interval: Option<f64>,
    #[arg(long)]
    max_iters: Option<u64>,
    /// Known stability number, used for the gap-closed column.
    #[arg(long)]
    alpha: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Eigensolver threads, 0 for all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            max_basis: self.max_basis,
            level: self.level.map(|l| match l {
                Level::One => LevelOverride::One,
                Level::Two => LevelOverride::Two,
            }),
            solver: SolverConfig {
                rho_scale: self.rho_scale,
                step: self.step,
                tol: self.tol,
                check_every: self.check_every,
                k_stag: self.kstag,
                stag_tol: self.stag_tol,
                time_limit_sec: self.time_limit,
                bound_every: self.bound_every,
                bound_interval_sec: self.bound_interval,
                precision: match self.precision {
                    Precision::Single => PrecisionMode::Single,
                    Precision::Double => PrecisionMode::Double,
                },
                max_iters: self.max_iters,
                ..SolverConfig::default()
            },
            alpha: self.alpha,
            max_order: self.max_order,
            cold_start: self.cold,
        }
    }
}

fn set_threads(threads: usize) {
    let par = if threads == 1 {
        faer::Par::Seq
    } else {
        faer::Par::rayon(threads)
    };
    faer::set_global_parallelism(par);
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn install_interrupt() -> Arc<AtomicBool> {
    let flag = Arc::new(AtomicBool::new(false));
    let handler_flag = flag.clone();
    if let Err(e) = ctrlc::set_handler(move || handler_flag.store(true, Ordering::SeqCst)) {
        warn!("interrupt handler not installed: {e}");
    }
    flag
}

fn log_checkpoint(c: &Checkpoint) {
    info!(
        "iter {:>6}  {:>8.1}s  bound {:.6}  primal {:.2e}  dual {:.2e}",
        c.iter, c.seconds, c.bound, c.primal, c.dual
    );
}

fn run_single(args: &RunArgs) -> Result<(), Error> {
    let Some(graph) = &args.graph else {
        return Err(Error::Config("--graph is required".into()));
    };
    let req = RunRequest {
        graph_path: graph.clone(),
        complement: args.complement,
        config: args.config(),
    };
    let stop = install_interrupt();
    let report = run_with_progress(&req, |c| {
        log_checkpoint(c);
        if stop.load(Ordering::SeqCst) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    for w in &report.warnings {
        warn!("{w}");
    }
    info!(
        "theta {:.6}  |B| {}  bound {:.6}  gap closed {}",
        report.theta,
        report.basis_size,
        report.best_bound,
        report.gap_closed_display.as_deref().unwrap_or("-")
    );
    let text = match args.format {
        OutputFormat::Json => report.to_json()? + "\n",
        OutputFormat::Csv => report.to_csv(),
    };
    write_output(args.out.as_ref(), &text)
}

fn run_command(cmd: &Command) -> Result<(), Error> {
    match cmd {
        Command::GenRandom { n, p, seed, out } => write_output(out.as_ref(), &random_graph(*n, *p, *seed)?.to_dimacs()),
        Command::GenNearRegular { n, r, seed, out } => {
            write_output(out.as_ref(), &near_regular_graph(*n, *r, *seed)?.to_dimacs())
        }
        Command::Batch {
            manifest,
            summary,
            reports,
            out,
            threads,
        } => {
            set_threads(*threads);
            let reqs = load_manifest(manifest)?;
            let stop = install_interrupt();
            let entries = run_batch_with(&reqs, |i, c| {
                info!("[{i}] iter {} bound {:.6}", c.iter, c.bound);
                if stop.load(Ordering::SeqCst) {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
            if let Some(dir) = reports {
                std::fs::create_dir_all(dir)?;
                for (i, e) in entries.iter().enumerate() {
                    if let Ok(r) = &e.outcome {
                        std::fs::write(dir.join(format!("report_{i:03}.json")), r.to_json()?)?;
                    }
                }
            }
            let rows = summarize(&entries);
            let text = match summary {
                SummaryFormat::Markdown => summary_markdown(&rows),
                SummaryFormat::Csv => summary_csv(&rows),
            };
            write_output(out.as_ref(), &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    let result = match &cli.command {
        Some(cmd) => run_command(cmd),
        None => {
            set_threads(cli.run.threads);
            run_single(&cli.run)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
