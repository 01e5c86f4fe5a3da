//! End-to-end runs: read a graph, solve the first level, pick a basis,
//! warm-start the larger relaxation and collect everything into a
//! [`RunReport`].

use std::fmt::Write as _;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::basis::{build_constraint_index, level2_basis, select_basis, LevelKind};
use crate::bound::{format_gap_closed, gap_closed};
use crate::error::{Error, Result};
use crate::graph::{brute_force_alpha_capped, parse_dimacs, Graph, DEFAULT_ALPHA_CAP};
use crate::solver::{
    run_admm, solve_theta, warm_start_from_theta, BoundRecord, Checkpoint, SolverConfig, Termination,
};

pub const REPORT_SCHEMA: u32 = 1;
pub const DEFAULT_MAX_BASIS: usize = 2500;
/// Largest basis accepted by [`run_graph`]. Each iterate matrix of order
/// 4000 takes 128 MB and the solver keeps about eight of them alive.
pub const DEFAULT_MAX_ORDER: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelOverride {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

/// Everything about a run except the graph itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub max_basis: usize,
    pub level: Option<LevelOverride>,
    pub solver: SolverConfig,
    /// Known stability number, used for the gap-closed metric.
    pub alpha: Option<usize>,
    /// Hard cap on `|B|`, checked before any large allocation.
    pub max_order: usize,
    /// Start the final solve from zero instead of the first-level solution.
    pub cold_start: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_basis: DEFAULT_MAX_BASIS,
            level: None,
            solver: SolverConfig::default(),
            alpha: None,
            max_order: DEFAULT_MAX_ORDER,
            cold_start: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRequest {
    pub graph_path: PathBuf,
    #[serde(default)]
    pub complement: bool,
    #[serde(default, flatten)]
    pub config: RunConfig,
}

impl RunRequest {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        RunRequest {
            graph_path: path.into(),
            complement: false,
            config: RunConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaSource {
    Provided,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub load: f64,
    pub theta: f64,
    pub select: f64,
    pub solve: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub graph: String,
    pub complement: bool,
    pub n: usize,
    pub edges: usize,
    pub theta: f64,
    pub theta_degraded: bool,
    pub basis_size: usize,
    pub level_kind: LevelKind,
    pub best_bound: f64,
    pub best_bound_floor: i64,
    pub alpha: Option<usize>,
    pub alpha_source: Option<AlphaSource>,
    pub gap_closed: Option<f64>,
    pub gap_closed_display: Option<String>,
    pub iterations: u64,
    pub termination: Termination,
    pub timings: PhaseTimings,
    pub config: RunConfig,
    pub warnings: Vec<String>,
    pub bound_history: Vec<BoundRecord>,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<RunReport> {
        Ok(serde_json::from_str(text)?)
    }

    /// Header and one data row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        out.push_str(&self.csv_row());
        out.push('\n');
        out
    }

    fn csv_row(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        [
            csv_field(&self.graph),
            self.complement.to_string(),
            self.n.to_string(),
            self.edges.to_string(),
            format!("{:.6}", self.theta),
            self.basis_size.to_string(),
            level_name(self.level_kind).to_string(),
            format!("{:.6}", self.best_bound),
            self.best_bound_floor.to_string(),
            opt(self.alpha.map(|a| a.to_string())),
            opt(self.gap_closed_display.clone()),
            self.iterations.to_string(),
            termination_name(self.termination).to_string(),
            format!("{:.3}", self.timings.total),
        ]
        .join(",")
    }
}

const CSV_HEADER: &str =
    "graph,complement,n,edges,theta,basis_size,level_kind,best_bound,best_bound_floor,alpha,gap_closed,iterations,termination,seconds";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn level_name(k: LevelKind) -> &'static str {
    match k {
        LevelKind::Level1 => "level1",
        LevelKind::Intermediate => "intermediate",
        LevelKind::Level2 => "level2",
    }
}

fn termination_name(t: Termination) -> &'static str {
    match t {
        Termination::ResidualConverged => "residual_converged",
        Termination::Stagnated => "stagnated",
        Termination::TimeLimit => "time_limit",
        Termination::IterLimit => "iter_limit",
        Termination::Cancelled => "cancelled",
    }
}

/// Reads the graph named by `req` and runs the full pipeline on it.
pub fn run(req: &RunRequest) -> Result<RunReport> {
    run_with_progress(req, |_| ControlFlow::Continue(()))
}

pub fn run_with_progress(
    req: &RunRequest,
    progress: impl FnMut(&Checkpoint) -> ControlFlow<()>,
) -> Result<RunReport> {
    let start = Instant::now();
    let (g, warnings) = load_graph(&req.graph_path, req.complement)?;
    let load = start.elapsed().as_secs_f64();
    let mut report = run_graph_with_progress(&g, &req.config, progress)?;
    report.graph = req.graph_path.display().to_string();
    report.complement = req.complement;
    report.timings.load = load;
    report.timings.total += load;
    let mut all = warnings;
    all.append(&mut report.warnings);
    report.warnings = all;
    Ok(report)
}

/// Parses a DIMACS file, complementing it on request.
pub fn load_graph(path: &Path, complement: bool) -> Result<(Graph, Vec<String>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let parsed = parse_dimacs(&text)?;
    let g = if complement {
        parsed.graph.complement()
    } else {
        parsed.graph
    };
    Ok((g, parsed.warnings))
}

pub fn run_graph(g: &Graph, cfg: &RunConfig) -> Result<RunReport> {
    run_graph_with_progress(g, cfg, |_| ControlFlow::Continue(()))
}

/// Runs the pipeline on an in-memory graph. `progress` sees the checkpoints
/// of the final solve and may cancel it.
pub fn run_graph_with_progress(
    g: &Graph,
    cfg: &RunConfig,
    mut progress: impl FnMut(&Checkpoint) -> ControlFlow<()>,
) -> Result<RunReport> {
    cfg.solver.validate()?;
    let n = g.n();
    if n == 0 {
        return Err(Error::Input("graph has no vertices".into()));
    }
    if cfg.max_basis < 1 + n {
        return Err(Error::Config(format!(
            "maximum basis size {} is smaller than 1 + n = {}",
            cfg.max_basis,
            1 + n
        )));
    }
    if 1 + n > cfg.max_order {
        return Err(Error::ResourceGuard {
            size: 1 + n,
            cap: cfg.max_order,
        });
    }
    let start = Instant::now();
    let mut warnings = Vec::new();

    let ts = solve_theta(g, &cfg.solver)?;
    let theta_secs = start.elapsed().as_secs_f64();
    if ts.degraded {
        warnings.push("first-level moment matrix failed its feasibility checks; basis ranking may be poor".into());
    }

    let mut timings = PhaseTimings {
        theta: theta_secs,
        ..Default::default()
    };

    let (basis_size, level_kind, solve_report) = if cfg.level == Some(LevelOverride::One) {
        (1 + n, LevelKind::Level1, ts.report.clone())
    } else {
        let t0 = Instant::now();
        let basis = match cfg.level {
            Some(LevelOverride::Two) => level2_basis(g),
            _ => select_basis(g, &ts, cfg.max_basis)?,
        };
        if basis.len() > cfg.max_order {
            return Err(Error::ResourceGuard {
                size: basis.len(),
                cap: cfg.max_order,
            });
        }
        let idx = build_constraint_index(g, &basis);
        let rho = cfg.solver.rho(basis.len());
        let warm = if cfg.cold_start {
            None
        } else {
            Some(warm_start_from_theta(&ts, &basis, rho)?)
        };
        timings.select = t0.elapsed().as_secs_f64();

        let remaining = cfg.solver.time_limit_sec - start.elapsed().as_secs_f64();
        if remaining <= 0.0 {
            return Err(Error::TimeLimit);
        }
        let solver_cfg = SolverConfig {
            time_limit_sec: remaining,
            ..cfg.solver.clone()
        };
        let t1 = Instant::now();
        let (report, _) = run_admm(&idx, warm, &solver_cfg, &mut progress)?;
        timings.solve = t1.elapsed().as_secs_f64();
        (basis.len(), basis.level_kind(g), report)
    };
    timings.total = start.elapsed().as_secs_f64();

    let (alpha, alpha_source) = match cfg.alpha {
        Some(a) => (Some(a), Some(AlphaSource::Provided)),
        None if n <= DEFAULT_ALPHA_CAP => (
            Some(brute_force_alpha_capped(g, DEFAULT_ALPHA_CAP)?),
            Some(AlphaSource::BruteForce),
        ),
        None => (None, None),
    };
    let best_bound = solve_report.best_bound;
    let gc = alpha.and_then(|a| match gap_closed(ts.theta, best_bound, a as f64) {
        Ok(v) => Some(v),
        Err(e) => {
            warnings.push(format!("gap closed not computed: {e}"));
            None
        }
    });
    if let Some(a) = alpha {
        if best_bound < a as f64 {
            warnings.push(format!("bound {best_bound} is below the stated alpha {a}"));
        }
    }

    Ok(RunReport {
        schema: REPORT_SCHEMA,
        graph: String::new(),
        complement: false,
        n,
        edges: g.edge_count(),
        theta: ts.theta,
        theta_degraded: ts.degraded,
        basis_size,
        level_kind,
        best_bound,
        best_bound_floor: best_bound.floor() as i64,
        alpha,
        alpha_source,
        gap_closed: gc,
        gap_closed_display: gc.map(format_gap_closed),
        iterations: solve_report.iters,
        termination: solve_report.termination,
        timings,
        config: cfg.clone(),
        warnings,
        bound_history: solve_report.bound_history,
    })
}

/// One line of a batch: either a report or the error that stopped it.
#[derive(Debug)]
pub struct BatchEntry {
    pub request: RunRequest,
    pub outcome: Result<RunReport>,
}

/// Runs the requests one after another. Failures are recorded per entry.
pub fn run_batch(manifest: &[RunRequest]) -> Vec<BatchEntry> {
    run_batch_with(manifest, |_, _| ControlFlow::Continue(()))
}

/// As [`run_batch`], forwarding `(entry index, checkpoint)` to `progress`.
pub fn run_batch_with(
    manifest: &[RunRequest],
    mut progress: impl FnMut(usize, &Checkpoint) -> ControlFlow<()>,
) -> Vec<BatchEntry> {
    manifest
        .iter()
        .enumerate()
        .map(|(i, req)| BatchEntry {
            request: req.clone(),
            outcome: run_with_progress(req, |c| progress(i, c)),
        })
        .collect()
}

/// Reads a batch manifest: a JSON array of run requests. Relative graph
/// paths are resolved against the manifest's directory.
pub fn load_manifest(path: &Path) -> Result<Vec<RunRequest>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut reqs: Vec<RunRequest> = serde_json::from_str(&text)?;
    let base = path.parent().unwrap_or(Path::new(""));
    for r in &mut reqs {
        if r.graph_path.is_relative() {
            r.graph_path = base.join(&r.graph_path);
        }
    }
    Ok(reqs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub graph: String,
    pub n: Option<usize>,
    pub edges: Option<usize>,
    pub alpha: Option<usize>,
    pub basis_size: Option<usize>,
    pub bound: Option<f64>,
    pub gap_closed: Option<String>,
    pub theta: Option<f64>,
    pub error: Option<String>,
}

pub fn summarize(entries: &[BatchEntry]) -> Vec<SummaryRow> {
    entries
        .iter()
        .map(|e| {
            let mut graph = e.request.graph_path.display().to_string();
            if e.request.complement {
                graph.push_str(" (complement)");
            }
            match &e.outcome {
                Ok(r) => SummaryRow {
                    graph,
                    n: Some(r.n),
                    edges: Some(r.edges),
                    alpha: r.alpha,
                    basis_size: Some(r.basis_size),
                    bound: Some(r.best_bound),
                    gap_closed: r.gap_closed_display.clone(),
                    theta: Some(r.theta),
                    error: None,
                },
                Err(err) => SummaryRow {
                    graph,
                    n: None,
                    edges: None,
                    alpha: None,
                    basis_size: None,
                    bound: None,
                    gap_closed: None,
                    theta: None,
                    error: Some(err.to_string()),
                },
            }
        })
        .collect()
}

fn summary_cells(r: &SummaryRow) -> [String; 9] {
    let num = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
    let real = |v: Option<f64>| v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into());
    [
        r.graph.clone(),
        num(r.n),
        num(r.edges),
        num(r.alpha),
        num(r.basis_size),
        real(r.bound),
        r.gap_closed.clone().unwrap_or_else(|| "-".into()),
        real(r.theta),
        r.error.clone().unwrap_or_default(),
    ]
}

const SUMMARY_COLUMNS: [&str; 9] = ["graph", "n", "|E|", "alpha", "|B|", "Bound", "GC", "theta", "error"];

pub fn summary_markdown(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", SUMMARY_COLUMNS.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(SUMMARY_COLUMNS.len()));
    for r in rows {
        let cells: Vec<String> = summary_cells(r).iter().map(|c| c.replace('|', "\\|")).collect();
        let _ = writeln!(out, "| {} |", cells.join(" | "));
    }
    out
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph,n,edges,alpha,basis_size,bound,gap_closed,theta,error");
    for r in rows {
        let cells: Vec<String> = summary_cells(r)
            .iter()
            .map(|c| if c == "-" { String::new() } else { csv_field(c) })
            .collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}
