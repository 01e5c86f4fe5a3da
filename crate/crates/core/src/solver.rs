//! Scaled-form ADMM for `min { X_∅∅ : X ⪰ 0, X ∈ L(B) }`.
//!
//! Each iteration projects onto the PSD cone, then onto the polyhedral set,
//! then takes a dual step:
//!
//! ```text
//! X⁺ = P_psd(Y + Z)
//! Y⁺ = P_L(X⁺ - H/ρ - Z)
//! Z⁺ = Z + step · (Y⁺ - X⁺)
//! ```
//!
//! where `H` is zero except `H_∅∅ = 1`. Every `X` iterate is PSD, so every
//! iterate yields a valid bound through [`certified_bound`].

use std::ops::ControlFlow;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::basis::{build_constraint_index, level1_basis, Basis, ConstraintIndex};
use crate::bound::certified_bound;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::SymMatrix;
use crate::projection::{project_polyhedral_in_place, project_psd, PrecisionMode};

/// Upper end of the admissible dual step interval, `(1 + √5) / 2`.
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

/// Tolerance on the theta moment matrix checks (edge zeros, diagonal = first row).
const THETA_VALIDATION_TOL: f64 = 1e-2;
const THETA_ESCALATIONS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// `ρ = rho_scale · √|B|`.
    pub rho_scale: f64,
    /// Dual step size, in `(0, (1 + √5) / 2)`.
    pub step: f64,
    pub tol: f64,
    /// Successive iterations that must satisfy the residual test.
    pub consecutive: usize,
    pub check_every: u64,
    /// Number of small-objective-change iterations (not necessarily
    /// consecutive) after which the run stops.
    pub k_stag: usize,
    pub stag_tol: f64,
    pub time_limit_sec: f64,
    pub bound_every: u64,
    /// Optional wall-clock bound cadence, used in addition to `bound_every`.
    pub bound_interval_sec: Option<f64>,
    pub precision: PrecisionMode,
    pub max_iters: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rho_scale: 0.8,
            step: 1.5,
            tol: 1e-4,
            consecutive: 3,
            check_every: 100,
            k_stag: 150,
            stag_tol: 1e-5,
            time_limit_sec: 3600.0,
            bound_every: 100,
            bound_interval_sec: None,
            precision: PrecisionMode::Single,
            max_iters: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        let positive = |x: f64| x > 0.0;
        if !(self.step > 0.0 && self.step < GOLDEN_RATIO) {
            return bad("step must lie in (0, (1 + sqrt 5) / 2)");
        }
        if !positive(self.rho_scale) || !positive(self.tol) || !positive(self.stag_tol) {
            return bad("rho_scale, tol and stag_tol must be positive");
        }
        if !positive(self.time_limit_sec) {
            return bad("time limit must be positive");
        }
        if self.consecutive == 0 || self.check_every == 0 || self.k_stag == 0 || self.bound_every == 0 {
            return bad("consecutive, check_every, k_stag and bound_every must be at least 1");
        }
        if self.max_iters == Some(0) {
            return bad("max_iters must be at least 1");
        }
        if matches!(self.bound_interval_sec, Some(s) if !positive(s)) {
            return bad("bound interval must be positive");
        }
        Ok(())
    }

    pub fn rho(&self, basis_size: usize) -> f64 {
        self.rho_scale * (basis_size as f64).sqrt()
    }
}

/// ADMM iterate `(X, Y, Z)` at iteration `iter`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub x: SymMatrix,
    pub y: SymMatrix,
    pub z: SymMatrix,
    pub iter: u64,
}

impl IterateState {
    /// All-zero start, counted as iteration 1.
    pub fn zeros(order: usize) -> Self {
        IterateState {
            x: SymMatrix::zeros(order),
            y: SymMatrix::zeros(order),
            z: SymMatrix::zeros(order),
            iter: 1,
        }
    }

    pub fn order(&self) -> usize {
        self.x.order()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ResidualConverged,
    Stagnated,
    TimeLimit,
    IterLimit,
    Cancelled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub iter: u64,
    pub seconds: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub iter: u64,
    pub primal: f64,
    pub dual: f64,
}

/// Data handed to a progress callback at every bound checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub iter: u64,
    pub seconds: f64,
    pub bound: f64,
    pub primal: f64,
    pub dual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub best_bound: f64,
    pub bound_history: Vec<BoundRecord>,
    /// `X_∅∅` of the final iterate.
    pub final_objective: f64,
    pub iters: u64,
    pub termination: Termination,
    pub residual_history: Vec<ResidualRecord>,
    pub wall_seconds: f64,
}

/// Level-1 solution used for basis selection and warm starts.
#[derive(Debug, Clone)]
pub struct ThetaSolution {
    /// Certified bound of the final level-1 iterate.
    pub theta: f64,
    /// Final `X` iterate (order `1 + n`).
    pub xstar: SymMatrix,
    /// Moment matrix: sign-normalized `ρ Z`, scaled to a unit `(∅, ∅)` entry.
    pub zstar: SymMatrix,
    /// `ρ Z` of the final iterate with no normalization applied.
    pub raw_dual: SymMatrix,
    /// The moment matrix failed its feasibility checks after all escalations.
    pub degraded: bool,
    pub report: SolveReport,
}

/// One ADMM iteration.
pub fn admm_step(state: &IterateState, idx: &ConstraintIndex, cfg: &SolverConfig) -> Result<IterateState> {
    let mut next = state.clone();
    step_in_place(&mut next, idx, cfg.rho(idx.order()), cfg.step, cfg.precision)?;
    Ok(next)
}

/// Advances `state` by one iteration and returns the previous `X`.
fn step_in_place(
    state: &mut IterateState,
    idx: &ConstraintIndex,
    rho: f64,
    step: f64,
    precision: PrecisionMode,
) -> Result<SymMatrix> {
    let x_new = project_psd(&state.y.add_scaled(1.0, &state.z), precision)?;
    let mut y_new = x_new.add_scaled(-1.0, &state.z);
    y_new.add_at(0, 0, -1.0 / rho);
    project_polyhedral_in_place(&mut y_new, idx);

    {
        let z = state.z.data_mut();
        for ((zi, yi), xi) in z.iter_mut().zip(y_new.as_slice()).zip(x_new.as_slice()) {
            *zi += step * (yi - xi);
        }
    }
    state.y = y_new;
    state.iter += 1;
    Ok(std::mem::replace(&mut state.x, x_new))
}

/// Relative primal and dual residuals `‖X - Y‖ / (1 + ‖X‖)` and
/// `ρ ‖X_prev - X‖ / (1 + ‖X‖)`.
pub fn residuals(prev_x: &SymMatrix, state: &IterateState, rho: f64) -> (f64, f64) {
    let denom = 1.0 + state.x.frobenius_norm();
    let primal = state.x.distance(&state.y) / denom;
    let dual = rho * prev_x.distance(&state.x) / denom;
    (primal, dual)
}

pub fn solve(
    g: &Graph,
    b: &Basis,
    idx: &ConstraintIndex,
    warm: Option<IterateState>,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    solve_with_progress(g, b, idx, warm, cfg, |_| ControlFlow::Continue(()))
}

/// As [`solve`], invoking `progress` at every bound checkpoint. Returning
/// `ControlFlow::Break` stops the run with [`Termination::Cancelled`].
pub fn solve_with_progress(
    g: &Graph,
    b: &Basis,
    idx: &ConstraintIndex,
    warm: Option<IterateState>,
    cfg: &SolverConfig,
    progress: impl FnMut(&Checkpoint) -> ControlFlow<()>,
) -> Result<SolveReport> {
    if b.n() != g.n() || b.len() != idx.order() {
        return Err(Error::Input("basis, graph and constraint index do not match".into()));
    }
    let (report, _) = run_admm(idx, warm, cfg, progress)?;
    Ok(report)
}

/// Runs the ADMM loop and returns the report together with the final state.
pub fn run_admm(
    idx: &ConstraintIndex,
    warm: Option<IterateState>,
    cfg: &SolverConfig,
    mut progress: impl FnMut(&Checkpoint) -> ControlFlow<()>,
) -> Result<(SolveReport, IterateState)> {
    cfg.validate()?;
    let order = idx.order();
    if order == 0 {
        return Err(Error::Input("empty basis".into()));
    }
    let mut state = match warm {
        Some(s) if s.order() != order => {
            return Err(Error::Input(format!(
                "warm start has order {}, basis has {order}",
                s.order()
            )))
        }
        Some(s) => s,
        None => IterateState::zeros(order),
    };
    let rho = cfg.rho(order);
    let start = Instant::now();
    let first_iter = state.iter;

    let mut bound_history = Vec::new();
    let mut residual_history = Vec::new();
    let mut best = f64::INFINITY;
    let mut last_bound_time = 0.0;

    let mut record = |state: &IterateState,
                      primal: f64,
                      dual: f64,
                      hist: &mut Vec<BoundRecord>,
                      best: &mut f64|
     -> ControlFlow<()> {
        let seconds = start.elapsed().as_secs_f64();
        let bound = certified_bound(&state.x, idx);
        *best = best.min(bound);
        hist.push(BoundRecord {
            iter: state.iter,
            seconds,
            bound,
        });
        progress(&Checkpoint {
            iter: state.iter,
            seconds,
            bound,
            primal,
            dual,
        })
    };

    let initial_primal = state.x.distance(&state.y) / (1.0 + state.x.frobenius_norm());
    let mut termination = None;
    if record(&state, initial_primal, 0.0, &mut bound_history, &mut best).is_break() {
        termination = Some(Termination::Cancelled);
    }

    let mut stagnant = 0usize;
    let mut streak = 0usize;
    while termination.is_none() {
        if cfg.max_iters.is_some_and(|m| state.iter >= m) {
            termination = Some(Termination::IterLimit);
            break;
        }
        if start.elapsed().as_secs_f64() >= cfg.time_limit_sec {
            termination = Some(Termination::TimeLimit);
            break;
        }

        let prev_x = step_in_place(&mut state, idx, rho, cfg.step, cfg.precision)?;
        let iter = state.iter;

        if (state.x.get(0, 0) - prev_x.get(0, 0)).abs() < cfg.stag_tol {
            stagnant += 1;
        }

        let want_residual = iter % cfg.check_every == 0 || streak > 0;
        let want_bound = iter % cfg.bound_every == 0
            || cfg
                .bound_interval_sec
                .is_some_and(|dt| start.elapsed().as_secs_f64() - last_bound_time >= dt);

        let (mut primal, mut dual) = (f64::NAN, f64::NAN);
        if want_residual || want_bound {
            (primal, dual) = residuals(&prev_x, &state, rho);
            residual_history.push(ResidualRecord { iter, primal, dual });
        }
        if want_residual {
            if primal.max(dual) <= cfg.tol {
                streak += 1;
                if streak >= cfg.consecutive {
                    termination = Some(Termination::ResidualConverged);
                }
            } else {
                streak = 0;
            }
        }
        if termination.is_none() && stagnant >= cfg.k_stag {
            termination = Some(Termination::Stagnated);
        }
        if want_bound {
            last_bound_time = start.elapsed().as_secs_f64();
            if record(&state, primal, dual, &mut bound_history, &mut best).is_break() && termination.is_none() {
                termination = Some(Termination::Cancelled);
            }
        }
    }

    if bound_history.last().map(|r| r.iter) != Some(state.iter) {
        let (p, d) = residual_history
            .last()
            .filter(|r| r.iter == state.iter)
            .map_or((f64::NAN, f64::NAN), |r| (r.primal, r.dual));
        let _ = record(&state, p, d, &mut bound_history, &mut best);
    }

    let report = SolveReport {
        best_bound: best,
        bound_history,
        final_objective: state.x.get(0, 0),
        iters: state.iter - first_iter,
        termination: termination.unwrap_or(Termination::IterLimit),
        residual_history,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    Ok((report, state))
}

/// Solves the first level (the theta function) and extracts the primal
/// iterate and the normalized moment matrix.
///
/// The level-1 run uses `cfg.tol / 10`, disables the stagnation exit and
/// always decomposes in double precision (the matrices are only of order
/// `1 + n`). If the moment matrix fails its feasibility checks the run is
/// continued with a halved tolerance, up to three times; after that the
/// solution is returned with `degraded` set.
pub fn solve_theta(g: &Graph, cfg: &SolverConfig) -> Result<ThetaSolution> {
    cfg.validate()?;
    let basis = level1_basis(g);
    let idx = build_constraint_index(g, &basis);
    let rho = cfg.rho(basis.len());

    let mut run_cfg = SolverConfig {
        tol: cfg.tol / 10.0,
        k_stag: usize::MAX,
        precision: PrecisionMode::Double,
        ..cfg.clone()
    };
    let start = Instant::now();
    let mut state = None;
    let mut merged: Option<SolveReport> = None;
    let mut escalation = 0;
    loop {
        run_cfg.time_limit_sec = (cfg.time_limit_sec - start.elapsed().as_secs_f64()).max(1e-9);
        let (report, final_state) = run_admm(&idx, state.take(), &run_cfg, |_| ControlFlow::Continue(()))?;
        let stop = report.termination;
        merged = Some(match merged {
            None => report,
            Some(mut m) => {
                m.best_bound = m.best_bound.min(report.best_bound);
                m.bound_history.extend(report.bound_history);
                m.residual_history.extend(report.residual_history);
                m.final_objective = report.final_objective;
                m.iters += report.iters;
                m.termination = report.termination;
                m.wall_seconds = start.elapsed().as_secs_f64();
                m
            }
        });
        let total_iters = merged.as_ref().map_or(0, |m| m.iters);
        if total_iters == 0 {
            return Err(Error::TimeLimit);
        }
        let (raw, zstar, ok) = moment_matrix(g, &final_state.z, rho);
        let out_of_budget = matches!(stop, Termination::TimeLimit | Termination::IterLimit | Termination::Cancelled);
        if ok || escalation >= THETA_ESCALATIONS || out_of_budget {
            return Ok(ThetaSolution {
                theta: certified_bound(&final_state.x, &idx),
                xstar: final_state.x,
                zstar,
                raw_dual: raw,
                degraded: !ok,
                report: merged.unwrap(),
            });
        }
        escalation += 1;
        run_cfg.tol /= 2.0;
        state = Some(final_state);
    }
}

/// Returns `(ρZ, normalized moment matrix, passes checks)`.
fn moment_matrix(g: &Graph, z: &SymMatrix, rho: f64) -> (SymMatrix, SymMatrix, bool) {
    let raw = z.scaled(rho);
    let corner = raw.get(0, 0);
    let sign = if corner < 0.0 { -1.0 } else { 1.0 };
    let scale = if corner != 0.0 { sign / corner.abs() } else { 1.0 };
    let zstar = raw.scaled(scale);
    let n = g.n();
    let edges_ok = g
        .edges()
        .iter()
        .all(|&(i, j)| zstar.get(1 + i, 1 + j).abs() <= THETA_VALIDATION_TOL);
    let diag_ok = (0..n).all(|i| (zstar.get(1 + i, 1 + i) - zstar.get(0, 1 + i)).abs() <= THETA_VALIDATION_TOL);
    (raw, zstar, corner != 0.0 && edges_ok && diag_ok)
}

/// Initial iterate for basis `b` built from a level-1 solution: `X¹ = Y¹`
/// carry `X*` in the leading block, `Z¹` carries the level-1 dual rescaled
/// to the new penalty, everything else is zero.
pub fn warm_start_from_theta(ts: &ThetaSolution, b: &Basis, rho: f64) -> Result<IterateState> {
    if ts.xstar.order() != 1 + b.n() || b.len() < ts.xstar.order() {
        return Err(Error::Input(format!(
            "theta solution of order {} does not fit a basis over {} vertices",
            ts.xstar.order(),
            b.n()
        )));
    }
    let x = ts.xstar.embed(b.len());
    let z = ts.raw_dual.scaled(1.0 / rho).embed(b.len());
    Ok(IterateState {
        y: x.clone(),
        x,
        z,
        iter: 1,
    })
}
