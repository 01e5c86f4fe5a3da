//! Simple undirected graphs, vertex subsets and the DIMACS clique format.
//!
//! Vertices are 0-based inside the library. DIMACS files use 1-based
//! indices; the conversion happens only in [`parse_dimacs`] and
//! [`Graph::to_dimacs`].

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Largest vertex count accepted by [`brute_force_alpha`] by default.
pub const DEFAULT_ALPHA_CAP: usize = 25;

/// A subset of `0..n` stored as a bitset.
///
/// Trailing zero words are never stored, so equality and hashing only depend
/// on membership.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct VertexSet {
    words: SmallVec<[u64; 4]>,
}

impl VertexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(v: usize) -> Self {
        let mut s = Self::new();
        s.insert(v);
        s
    }

    pub fn from_vertices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        let mut s = Self::new();
        for v in it {
            s.insert(v);
        }
        s
    }

    pub fn insert(&mut self, v: usize) {
        let w = v / 64;
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1u64 << (v % 64);
    }

    pub fn remove(&mut self, v: usize) {
        let w = v / 64;
        if w < self.words.len() {
            self.words[w] &= !(1u64 << (v % 64));
            self.trim();
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.words
            .get(v / 64)
            .is_some_and(|w| w & (1u64 << (v % 64)) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, s) in words.iter_mut().zip(short.words.iter()) {
            *w |= s;
        }
        VertexSet { words }
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .any(|(a, b)| a & b != 0)
    }

    /// Largest element, if any.
    pub fn max_vertex(&self) -> Option<usize> {
        let w = self.words.len().checked_sub(1)?;
        Some(w * 64 + 63 - self.words[w].leading_zeros() as usize)
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl Hash for VertexSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.words.as_slice().hash(state);
    }
}

/// Sets compare as unsigned integers whose bit `v` marks vertex `v`.
impl Ord for VertexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.words
            .len()
            .cmp(&other.words.len())
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for VertexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<VertexSet>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

impl Graph {
    /// Builds a graph from 0-based vertex pairs. Self-loops and repeated
    /// pairs are dropped.
    ///
    /// Panics if an endpoint is `>= n`.
    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Self {
        let mut adjacency = vec![VertexSet::new(); n];
        let mut list = Vec::new();
        for (a, b) in edges {
            assert!(a < n && b < n, "edge ({a}, {b}) out of range for n = {n}");
            if a == b || adjacency[a].contains(b) {
                continue;
            }
            adjacency[a].insert(b);
            adjacency[b].insert(a);
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        Graph {
            n,
            edges: list,
            adjacency,
        }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_edges(n, [])
    }

    pub fn complete(n: usize) -> Self {
        Self::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
    }

    /// Cycle `0-1-...-(n-1)-0`.
    pub fn cycle(n: usize) -> Self {
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn petersen() -> Self {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        Self::from_edges(10, outer.chain(spokes).chain(inner))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].contains(b)
    }

    pub fn complement(&self) -> Graph {
        let n = self.n;
        Graph::from_edges(
            n,
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| !self.has_edge(i, j)),
        )
    }

    /// True iff no two members of `s` are adjacent.
    pub fn is_stable(&self, s: &VertexSet) -> bool {
        s.iter().all(|v| !self.adjacency[v].intersects(s))
    }

    /// All pairs `(i, j)`, `i < j`, that are not edges, in lexicographic order.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n * self.n.saturating_sub(1) / 2 - self.edges.len());
        for i in 0..self.n {
            for j in i + 1..self.n {
                if !self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Writes the graph in DIMACS format with 1-based vertices.
    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p edge {} {}\n", self.n, self.edges.len());
        for &(i, j) in &self.edges {
            s.push_str(&format!("e {} {}\n", i + 1, j + 1));
        }
        s
    }
}

/// Result of reading a DIMACS file.
#[derive(Debug, Clone)]
pub struct ParsedGraph {
    pub graph: Graph,
    pub warnings: Vec<String>,
}

/// Parses the DIMACS clique format (`c`, `p edge n m`, `e i j` records).
pub fn parse_dimacs(text: &str) -> Result<ParsedGraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut pairs = Vec::new();
    let mut dropped_loops = 0usize;
    let err = |line: usize, msg: String| Error::Parse { line, msg };

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("c") => {}
            Some("p") => {
                if header.is_some() {
                    return Err(err(lineno, "duplicate problem line".into()));
                }
                let format = fields.next();
                if !matches!(format, Some("edge") | Some("col")) {
                    return Err(err(lineno, format!("unsupported problem format {format:?}")));
                }
                let mut num = || -> Result<usize> {
                    fields
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| err(lineno, "malformed problem line".into()))
                };
                let n = num()?;
                let m = num()?;
                header = Some((n, m));
            }
            Some("e") => {
                let (n, _) = header.ok_or_else(|| err(lineno, "edge before problem line".into()))?;
                let mut vertex = || -> Result<usize> {
                    let v: usize = fields
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| err(lineno, "malformed edge line".into()))?;
                    if v == 0 || v > n {
                        return Err(err(lineno, format!("vertex {v} outside [1, {n}]")));
                    }
                    Ok(v - 1)
                };
                let a = vertex()?;
                let b = vertex()?;
                if a == b {
                    dropped_loops += 1;
                } else {
                    pairs.push((a, b));
                }
            }
            Some(other) => {
                return Err(err(lineno, format!("unknown record type '{other}'")));
            }
            None => {}
        }
    }

    let (n, m) = header.ok_or_else(|| err(0, "missing problem line".into()))?;
    let edge_lines = pairs.len() + dropped_loops;
    let graph = Graph::from_edges(n, pairs);
    let mut warnings = Vec::new();
    if dropped_loops > 0 {
        warnings.push(format!("dropped {dropped_loops} self-loop record(s)"));
    }
    let duplicates = edge_lines - dropped_loops - graph.edge_count();
    if duplicates > 0 {
        warnings.push(format!("dropped {duplicates} duplicate edge record(s)"));
    }
    if m != graph.edge_count() {
        warnings.push(format!(
            "problem line declares {m} edges, file contains {} distinct edges",
            graph.edge_count()
        ));
    }
    Ok(ParsedGraph { graph, warnings })
}

/// Exact stability number by branch and bound over neighbour masks.
pub fn brute_force_alpha(g: &Graph) -> Result<usize> {
    brute_force_alpha_capped(g, DEFAULT_ALPHA_CAP)
}

/// As [`brute_force_alpha`] with an explicit size cap (at most 64).
pub fn brute_force_alpha_capped(g: &Graph, cap: usize) -> Result<usize> {
    let cap = cap.min(64);
    if g.n() > cap {
        return Err(Error::SizeCap { n: g.n(), cap });
    }
    let masks: Vec<u64> = (0..g.n())
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, u| m | (1u64 << u)))
        .collect();
    let all = if g.n() == 64 { u64::MAX } else { (1u64 << g.n()) - 1 };
    let mut best = 0;
    branch(&masks, all, 0, &mut best);
    Ok(best)
}

fn branch(masks: &[u64], candidates: u64, size: usize, best: &mut usize) {
    if candidates == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + candidates.count_ones() as usize <= *best {
        return;
    }
    let v = candidates.trailing_zeros() as usize;
    let rest = candidates & !(1u64 << v);
    branch(masks, rest & !masks[v], size + 1, best);
    // Excluding v only helps if some neighbour of v can still be chosen.
    if rest & masks[v] != 0 {
        branch(masks, rest, size, best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)])
    }

    #[test]
    fn parses_simple_file() {
        let p = parse_dimacs("p edge 3 2\ne 1 2\ne 2 3").unwrap();
        assert_eq!(p.graph.n(), 3);
        assert_eq!(p.graph.edges(), &[(0, 1), (1, 2)]);
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn duplicate_edges_are_dropped() {
        let p = parse_dimacs("c hello\np edge 2 1\ne 1 2\ne 1 2").unwrap();
        assert_eq!(p.graph.edges(), &[(0, 1)]);
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn self_loops_and_count_mismatch_warn() {
        let p = parse_dimacs("p edge 3 5\ne 1 1\ne 2 3\ne 3 2\n").unwrap();
        assert_eq!(p.graph.edges(), &[(1, 2)]);
        assert_eq!(p.warnings.len(), 3);
    }

    #[test]
    fn edge_before_problem_line() {
        match parse_dimacs("e 1 2\np edge 2 1") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_dimacs("c nothing"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_dimacs("p edge 2 1\ne 1 3"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_dimacs("p edge 2 1\nx 1 2"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn dimacs_round_trip() {
        let g = Graph::petersen();
        let back = parse_dimacs(&g.to_dimacs()).unwrap();
        assert_eq!(back.graph, g);
        assert!(back.warnings.is_empty());
    }

    #[test]
    fn complement_examples() {
        assert_eq!(Graph::complete(3).complement(), Graph::empty(3));
        assert_eq!(path3().complement().edges(), &[(0, 2)]);
        let c5 = Graph::cycle(5).complement();
        assert_eq!(c5.edge_count(), 5);
        assert_eq!(brute_force_alpha(&c5).unwrap(), 2);
    }

    #[test]
    fn stability() {
        assert!(Graph::complete(4).is_stable(&VertexSet::new()));
        assert!(Graph::complete(4).is_stable(&VertexSet::singleton(2)));
        assert!(path3().is_stable(&VertexSet::from_vertices([0, 2])));
        assert!(!path3().is_stable(&VertexSet::from_vertices([0, 1])));
    }

    #[test]
    fn non_edge_lists() {
        assert!(Graph::complete(3).non_edges().is_empty());
        assert_eq!(Graph::empty(4).non_edges().len(), 6);
        assert_eq!(
            Graph::cycle(5).non_edges(),
            vec![(0, 2), (0, 3), (1, 3), (1, 4), (2, 4)]
        );
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(brute_force_alpha(&Graph::cycle(5)).unwrap(), 2);
        assert_eq!(brute_force_alpha(&Graph::empty(7)).unwrap(), 7);
        assert_eq!(brute_force_alpha(&Graph::petersen()).unwrap(), 4);
        assert!(matches!(
            brute_force_alpha(&Graph::empty(26)),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn vertex_set_basics() {
        let mut s = VertexSet::from_vertices([3, 70, 1]);
        assert_eq!(s.len(), 3);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1, 3, 70]);
        assert_eq!(s.max_vertex(), Some(70));
        s.remove(70);
        assert_eq!(s, VertexSet::from_vertices([1, 3]));
        assert!(VertexSet::singleton(1) < VertexSet::singleton(2));
        assert!(VertexSet::from_vertices([0, 1]) < VertexSet::singleton(2));
        assert!(VertexSet::singleton(63) < VertexSet::singleton(64));
    }
}
