//! Valid upper bounds on the stability number from any PSD matrix indexed
//! by a basis, and the gap-closed metric used in reports.

use crate::basis::ConstraintIndex;
use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

/// Coefficients of `(x^B)ᵀ M x^B` reduced modulo the edge ideal.
///
/// `groups[k]` is the coefficient of `x^γ` for the `k`-th group of the
/// index it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMap {
    pub constant: f64,
    pub groups: Vec<f64>,
}

pub fn coefficient_map(m: &SymMatrix, idx: &ConstraintIndex) -> CoefficientMap {
    assert_eq!(m.order(), idx.order());
    let groups = idx
        .groups()
        .map(|g| {
            g.positions
                .iter()
                .map(|&(r, c)| {
                    let v = m.get(r as usize, c as usize);
                    if r == c {
                        v
                    } else {
                        2.0 * v
                    }
                })
                .sum()
        })
        .collect();
    CoefficientMap {
        constant: m.get(0, 0),
        groups,
    }
}

/// `M_∅∅ + Σ_γ max(f_γ + [|γ| = 1], 0)`, an upper bound on α(G) whenever
/// `m` is positive semidefinite. PSD-ness is not checked here.
pub fn certified_bound(m: &SymMatrix, idx: &ConstraintIndex) -> f64 {
    let coeffs = coefficient_map(m, idx);
    let correction: f64 = idx
        .groups()
        .zip(&coeffs.groups)
        .map(|(g, &f)| {
            let unit = if g.gamma.len() == 1 { 1.0 } else { 0.0 };
            (f + unit).max(0.0)
        })
        .sum();
    coeffs.constant + correction
}

/// Fraction `(θ - bound) / (θ - α)` of the gap between the theta value and
/// the stability number closed by `bound`. The bound is clamped into
/// `[α, θ]`; the fraction is 1 when `θ = α`.
pub fn gap_closed(theta: f64, bound: f64, alpha: f64) -> Result<f64> {
    if alpha > theta {
        return Err(Error::Input(format!(
            "alpha {alpha} exceeds theta {theta}"
        )));
    }
    if theta == alpha {
        return Ok(1.0);
    }
    let f = bound.clamp(alpha, theta);
    Ok((theta - f) / (theta - alpha))
}

/// Percentage rounded down to one decimal, e.g. `0.80949` → `"80.9%"`.
pub fn format_gap_closed(fraction: f64) -> String {
    // Small slack so that values such as 0.5 stored as 0.49999999999 are not
    // pushed down a whole display step.
    let tenths = (fraction * 1000.0 + 1e-7).floor() / 10.0;
    format!("{tenths:.1}%")
}
