//! Random graph generators used to build benchmark instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Erdős–Rényi graph: every pair becomes an edge independently with
/// probability `p`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Input(format!("edge probability {p} not in [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Ok(Graph::from_edges(n, edges))
}

/// Near-regular graph: a uniformly random perfect matching on `n * r`
/// points, `r` points per vertex, collapsed onto the vertices. Parallel
/// edges and self-loops are removed afterwards.
pub fn near_regular_graph(n: usize, r: usize, seed: u64) -> Result<Graph> {
    if !(n * r).is_multiple_of(2) {
        return Err(Error::Input(format!("n * r = {} must be even", n * r)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..n * r).map(|p| p / r).collect();
    points.shuffle(&mut rng);
    let edges = points.chunks_exact(2).map(|c| (c[0], c[1]));
    Ok(Graph::from_edges(n, edges))
}

/// Hamming graph H(d, k): binary words of length `d`, adjacent when their
/// Hamming distance is at least `k`.
pub fn hamming_graph(d: u32, k: u32) -> Graph {
    let n = 1usize << d;
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if ((a ^ b) as u64).count_ones() >= k {
                edges.push((a, b));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Clique instance built from the Steiner triple system on the nine points
/// of the affine plane over GF(3), in the form of the `MANN_a9` benchmark.
///
/// For each of the 12 triples there are three vertices, one per point of the
/// triple, and the nine remaining vertices stand for the points. In the
/// complement graph each triple's vertices form a triangle and each is joined
/// to the vertex of its point. The complement has 45 vertices, 72 edges and
/// stability number 16.
pub fn steiner_clique_graph() -> Graph {
    let triples = affine_plane_lines();
    let n = 3 * triples.len() + 9;
    let point_vertex = |p: usize| 3 * triples.len() + p;
    let mut comp_edges = Vec::new();
    for (t, line) in triples.iter().enumerate() {
        for (a, &p) in line.iter().enumerate() {
            for b in a + 1..3 {
                comp_edges.push((3 * t + a, 3 * t + b));
            }
            comp_edges.push((3 * t + a, point_vertex(p)));
        }
    }
    Graph::from_edges(n, comp_edges).complement()
}

/// The 12 lines of AG(2, 3); point `(x, y)` is numbered `3x + y`.
fn affine_plane_lines() -> Vec<[usize; 3]> {
    let pt = |x: usize, y: usize| 3 * (x % 3) + (y % 3);
    let mut lines = Vec::new();
    for (dx, dy) in [(0, 1), (1, 0), (1, 1), (1, 2)] {
        let mut seen = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                let mut line = [pt(x, y), pt(x + dx, y + dy), pt(x + 2 * dx, y + 2 * dy)];
                line.sort_unstable();
                if !seen.contains(&line) {
                    seen.push(line);
                }
            }
        }
        lines.extend(seen);
    }
    lines
}
