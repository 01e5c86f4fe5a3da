//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::collections::HashSet;

use lasbound::{Basis, ConstraintIndex, Graph, SymMatrix};
use rand::seq::SliceRandom;
use rand::Rng;

/// `G Gᵀ` for a random `order x rank` factor with entries in `[-scale, scale]`.
pub fn random_psd(order: usize, rank: usize, scale: f64, rng: &mut impl Rng) -> SymMatrix {
    let g: Vec<f64> = (0..order * rank).map(|_| rng.gen_range(-scale..=scale)).collect();
    SymMatrix::from_upper_fn(order, |i, j| (0..rank).map(|k| g[i * rank + k] * g[j * rank + k]).sum())
}

pub fn random_symmetric(order: usize, scale: f64, rng: &mut impl Rng) -> SymMatrix {
    SymMatrix::from_upper_fn(order, |_, _| rng.gen_range(-scale..=scale))
}

/// Basis with a random subset of the non-edges, in random order.
pub fn random_basis(g: &Graph, rng: &mut impl Rng) -> Basis {
    let mut pairs = g.non_edges();
    pairs.shuffle(rng);
    let keep = rng.gen_range(0..=pairs.len());
    pairs.truncate(keep);
    Basis::with_pairs(g, &pairs).unwrap()
}

/// Checks that groups and free positions cover every upper-triangular
/// position exactly once and that each group's positions multiply to its key.
pub fn check_partition(b: &Basis, idx: &ConstraintIndex) -> Result<(), String> {
    let order = b.len();
    let mut seen = HashSet::new();
    for group in idx.groups() {
        for &(r, c) in group.positions {
            let (r, c) = (r as usize, c as usize);
            if r > c {
                return Err(format!("position ({r}, {c}) below the diagonal"));
            }
            let u = b.monomials()[r].support.union(&b.monomials()[c].support);
            if &u != group.gamma {
                return Err(format!("position ({r}, {c}) filed under the wrong monomial"));
            }
            if !seen.insert((r, c)) {
                return Err(format!("position ({r}, {c}) listed twice"));
            }
        }
    }
    for &(r, c) in idx.free_positions() {
        if !seen.insert((r as usize, c as usize)) {
            return Err(format!("free position ({r}, {c}) also in a group"));
        }
    }
    let expected = order * (order + 1) / 2;
    if seen.len() != expected {
        return Err(format!("{} positions covered, expected {expected}", seen.len()));
    }
    Ok(())
}

/// Minimizer of `Σ aᵢ (xᵢ - zᵢ)²` subject to `aᵀx <= b` (all `aᵢ > 0`),
/// found by bisection on the Lagrange multiplier with every coordinate
/// minimized by bisection on its derivative. Uses no closed form.
pub fn halfspace_oracle(a: &[f64], b: f64, z: &[f64]) -> Vec<f64> {
    let argmin = |mu: f64| -> Vec<f64> {
        a.iter()
            .zip(z)
            .map(|(&ai, &zi)| {
                let deriv = |x: f64| 2.0 * ai * (x - zi) + mu * ai;
                let mut width = 1.0;
                while deriv(zi - width) >= 0.0 || deriv(zi + width) <= 0.0 {
                    width *= 2.0;
                }
                bisect(zi - width, zi + width, |x| deriv(x) > 0.0)
            })
            .collect()
    };
    let lhs = |x: &[f64]| a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>();
    let free = argmin(0.0);
    if lhs(&free) <= b {
        return free;
    }
    let mut hi = 1.0;
    while lhs(&argmin(hi)) > b {
        hi *= 2.0;
    }
    let mu = bisect(0.0, hi, |m| lhs(&argmin(m)) <= b);
    argmin(mu)
}

/// Smallest point of `[lo, hi]` where the monotone predicate turns true.
fn bisect(mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
