//! Euclidean projections used by the ADMM: onto the positive semidefinite
//! cone and onto the polyhedral constraint set of a [`ConstraintIndex`].

use faer::linalg::matmul::triangular::{self, BlockStructure};
use faer::{Accum, Mat, MatRef, Side};
use serde::{Deserialize, Serialize};

use crate::basis::ConstraintIndex;
use crate::error::{Error, Result};
pub use crate::matrix::SymMatrix;

/// Floating-point width used for the eigendecomposition inside
/// [`project_psd`]. Reconstruction is always carried out in `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionMode {
    #[default]
    Single,
    Double,
}

impl std::str::FromStr for PrecisionMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "single" => Ok(PrecisionMode::Single),
            "double" => Ok(PrecisionMode::Double),
            other => Err(format!("unknown precision '{other}'")),
        }
    }
}

/// Positive eigenpairs `(λ, u)` of `a`, with `u` in double precision.
fn positive_eigenpairs(a: &SymMatrix, mode: PrecisionMode) -> Result<(Vec<f64>, Mat<f64>)> {
    let n = a.order();
    let view = MatRef::from_column_major_slice(a.as_slice(), n, n);
    let fail = |_| Error::Numerical { order: n };
    match mode {
        PrecisionMode::Double => {
            let evd = view.self_adjoint_eigen(Side::Lower).map_err(fail)?;
            let s = evd.S().column_vector();
            let keep: Vec<usize> = (0..n).filter(|&k| s[k] > 0.0).collect();
            let u = evd.U();
            let vals = keep.iter().map(|&k| s[k]).collect();
            let vecs = Mat::from_fn(n, keep.len(), |i, c| u[(i, keep[c])]);
            Ok((vals, vecs))
        }
        PrecisionMode::Single => {
            let low = Mat::<f32>::from_fn(n, n, |i, j| view[(i, j)] as f32);
            let evd = low.self_adjoint_eigen(Side::Lower).map_err(fail)?;
            let s = evd.S().column_vector();
            let keep: Vec<usize> = (0..n).filter(|&k| s[k] > 0.0).collect();
            let u = evd.U();
            let vals = keep.iter().map(|&k| s[k] as f64).collect();
            let vecs = Mat::from_fn(n, keep.len(), |i, c| u[(i, keep[c])] as f64);
            Ok((vals, vecs))
        }
    }
}

/// Projection onto the PSD cone: `Σ_{λ>0} λ u uᵀ` over the spectrum of `a`.
///
/// The result is assembled as the Gram matrix `W Wᵀ` with `W = U₊ diag(√λ₊)`
/// in double precision, so it is positive semidefinite up to `f64` rounding
/// regardless of `mode`.
pub fn project_psd(a: &SymMatrix, mode: PrecisionMode) -> Result<SymMatrix> {
    let n = a.order();
    if !a.is_finite() {
        return Err(Error::Numerical { order: n });
    }
    if n == 0 {
        return Ok(SymMatrix::zeros(0));
    }
    let (vals, mut w) = positive_eigenpairs(a, mode)?;
    for (c, &lam) in vals.iter().enumerate() {
        let root = lam.sqrt();
        w.col_mut(c).iter_mut().for_each(|x| *x *= root);
    }
    let mut out = Mat::<f64>::zeros(n, n);
    if !vals.is_empty() {
        triangular::matmul(
            out.as_mut(),
            BlockStructure::TriangularLower,
            Accum::Replace,
            w.as_ref(),
            BlockStructure::Rectangular,
            w.transpose(),
            BlockStructure::Rectangular,
            1.0,
            faer::get_global_parallelism(),
        );
    }
    let mut result = SymMatrix::zeros(n);
    let data = result.data_mut();
    for j in 0..n {
        for i in j..n {
            let v = out[(i, j)];
            data[j * n + i] = v;
            data[i * n + j] = v;
        }
    }
    Ok(result)
}

/// Smallest eigenvalue of `a`, computed in double precision.
pub fn min_eigenvalue(a: &SymMatrix) -> Result<f64> {
    let n = a.order();
    if n == 0 {
        return Ok(0.0);
    }
    let view = MatRef::from_column_major_slice(a.as_slice(), n, n);
    let vals = view
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::Numerical { order: n })?;
    Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
}

/// Projection of `z` onto `{x : aᵀx <= b}` in the norm weighted by `diag(a)`:
/// `z - max(aᵀz - b, 0) / Σa · 1`.
///
/// Panics if `a` and `z` differ in length.
pub fn project_halfspace(a: &[f64], b: f64, z: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), z.len());
    let excess = a.iter().zip(z).map(|(ai, zi)| ai * zi).sum::<f64>() - b;
    if excess <= 0.0 {
        return z.to_vec();
    }
    let shift = excess / a.iter().sum::<f64>();
    z.iter().map(|zi| zi - shift).collect()
}

/// Projection onto the polyhedral set described by `idx`. Each group is a
/// separate weighted half-space; free positions are left untouched.
pub fn project_polyhedral(y: &SymMatrix, idx: &ConstraintIndex) -> SymMatrix {
    let mut out = y.clone();
    project_polyhedral_in_place(&mut out, idx);
    out
}

pub(crate) fn project_polyhedral_in_place(y: &mut SymMatrix, idx: &ConstraintIndex) {
    assert_eq!(y.order(), idx.order(), "matrix order does not match the basis size");
    let n = y.order();
    let data = y.data_mut();
    for k in 0..idx.m() {
        let group = idx.group(k);
        let mut lhs = 0.0;
        for &(r, c) in group.positions {
            let v = data[c as usize * n + r as usize];
            lhs += if r == c { v } else { 2.0 * v };
        }
        let excess = lhs - group.rhs;
        if excess > 0.0 {
            let shift = excess / idx.weight_sum(k);
            for &(r, c) in group.positions {
                let (r, c) = (r as usize, c as usize);
                data[c * n + r] -= shift;
                if r != c {
                    data[r * n + c] -= shift;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_constraint_index, level1_basis};
    use crate::graph::Graph;

    #[test]
    fn clips_negative_eigenvalue() {
        for mode in [PrecisionMode::Single, PrecisionMode::Double] {
            let p = project_psd(&SymMatrix::diag(&[1.0, -1.0]), mode).unwrap();
            assert!(p.distance(&SymMatrix::diag(&[1.0, 0.0])) < 1e-6);
            let i = project_psd(&SymMatrix::identity(5), mode).unwrap();
            assert!(i.distance(&SymMatrix::identity(5)) < 1e-6);
        }
        let z = project_psd(&SymMatrix::diag(&[-1.0, -2.0]), PrecisionMode::Double).unwrap();
        assert_eq!(z, SymMatrix::zeros(2));
    }

    #[test]
    fn rejects_non_finite() {
        let m = SymMatrix::diag(&[f64::NAN, 1.0]);
        assert!(matches!(
            project_psd(&m, PrecisionMode::Double),
            Err(Error::Numerical { order: 2 })
        ));
    }

    #[test]
    fn halfspace_examples() {
        assert_eq!(project_halfspace(&[1.0], 0.0, &[1.0]), vec![0.0]);
        let x = project_halfspace(&[2.0, 1.0], -1.0, &[1.0, 1.0]);
        assert!((x[0] + 1.0 / 3.0).abs() < 1e-15 && (x[1] + 1.0 / 3.0).abs() < 1e-15);
        assert!((2.0 * x[0] + x[1] + 1.0).abs() < 1e-14);
        assert_eq!(project_halfspace(&[2.0, 1.0], 5.0, &[1.0, 1.0]), vec![1.0, 1.0]);
    }

    #[test]
    fn polyhedral_from_zero_on_k2() {
        let g = Graph::complete(2);
        let idx = build_constraint_index(&g, &level1_basis(&g));
        let p = project_polyhedral(&SymMatrix::zeros(3), &idx);
        let third = -1.0 / 3.0;
        for (r, c) in [(0, 1), (1, 1), (0, 2), (2, 2)] {
            assert!((p.get(r, c) - third).abs() < 1e-15);
        }
        assert_eq!(p.get(0, 0), 0.0);
        assert_eq!(p.get(1, 2), 0.0);
        // feasible point is a fixed point
        assert_eq!(project_polyhedral(&p, &idx), p);
    }

    #[test]
    fn polyhedral_ignores_free_positions() {
        let g = Graph::complete(2);
        let idx = build_constraint_index(&g, &level1_basis(&g));
        let base = project_polyhedral(&SymMatrix::zeros(3), &idx);
        let mut y = base.clone();
        y.set(0, 0, 7.0);
        y.set(1, 2, -3.0);
        let p = project_polyhedral(&y, &idx);
        assert_eq!(p.get(0, 0), 7.0);
        assert_eq!(p.get(1, 2), -3.0);
        for (r, c) in [(0, 1), (1, 1), (0, 2), (2, 2)] {
            assert_eq!(p.get(r, c), base.get(r, c));
        }
    }
}
