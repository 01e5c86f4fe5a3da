//! Upper bounds on the stability number α(G) from Lasserre-hierarchy
//! semidefinite relaxations, solved approximately with ADMM.
//!
//! Every iterate of the solver is positive semidefinite, and
//! [`certified_bound`] turns any such matrix into a valid bound, so the
//! reported number is an upper bound on α(G) no matter how far the solver
//! got.
//!
//! ```
//! use lasbound::{Graph, SolverConfig};
//!
//! let g = Graph::cycle(5);
//! let ts = lasbound::solve_theta(&g, &SolverConfig::default()).unwrap();
//! assert!((ts.theta - 5f64.sqrt()).abs() < 1e-3);
//! ```

pub mod basis;
pub mod bound;
pub mod error;
pub mod generate;
pub mod graph;
pub mod matrix;
pub mod pipeline;
pub mod projection;
pub mod solver;

pub use basis::{
    build_constraint_index, level1_basis, level2_basis, select_basis, select_basis_from_moments, Basis,
    ConstraintIndex, LevelKind, Monomial,
};
pub use bound::{certified_bound, coefficient_map, format_gap_closed, gap_closed, CoefficientMap};
pub use error::{Error, Result};
pub use graph::{brute_force_alpha, brute_force_alpha_capped, parse_dimacs, Graph, ParsedGraph, VertexSet};
pub use matrix::SymMatrix;
pub use projection::{min_eigenvalue, project_halfspace, project_polyhedral, project_psd, PrecisionMode};
pub use solver::{
    admm_step, residuals, solve, solve_theta, solve_with_progress, warm_start_from_theta, IterateState,
    SolveReport, SolverConfig, Termination, ThetaSolution,
};
