//! Monomial bases between the first and second hierarchy levels and the
//! grouped constraint structure they induce.
//!
//! A basis always starts with the constant monomial, followed by the `n`
//! singletons in vertex order, so the first-level basis is the leading
//! block of every basis. Any further entries are stable pairs.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::matrix::SymMatrix;
use crate::solver::ThetaSolution;

/// Square-free monomial `x^β`, identified with its support `β`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub support: VertexSet,
}

impl Monomial {
    pub fn constant() -> Self {
        Monomial {
            support: VertexSet::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.support.len()
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.support.is_empty() {
            write!(f, "1")
        } else {
            let names: Vec<String> = self.support.iter().map(|v| format!("x{}", v + 1)).collect();
            write!(f, "{}", names.join("*"))
        }
    }
}

/// How a basis relates to the hierarchy levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelKind {
    Level1,
    Intermediate,
    Level2,
}

/// Ordered monomial basis with `P(n,1) ⊆ B ⊆ P(n,2)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Basis {
    n: usize,
    monomials: Vec<Monomial>,
}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.monomials).finish()
    }
}

impl Basis {
    /// Constant monomial, singletons, then the given pairs in the given order.
    ///
    /// Every pair must be a non-edge of `g`, and no pair may repeat.
    pub fn with_pairs(g: &Graph, pairs: &[(usize, usize)]) -> Result<Basis> {
        let n = g.n();
        let mut monomials = Vec::with_capacity(1 + n + pairs.len());
        monomials.push(Monomial::constant());
        monomials.extend((0..n).map(|v| Monomial {
            support: VertexSet::singleton(v),
        }));
        let mut seen = std::collections::HashSet::new();
        for &(a, b) in pairs {
            let (a, b) = (a.min(b), a.max(b));
            if a == b || b >= n {
                return Err(Error::Input(format!("invalid pair ({a}, {b})")));
            }
            if g.has_edge(a, b) {
                return Err(Error::Input(format!("pair {{{}, {}}} is an edge", a + 1, b + 1)));
            }
            if !seen.insert((a, b)) {
                return Err(Error::Input(format!("pair {{{}, {}}} repeated", a + 1, b + 1)));
            }
            monomials.push(Monomial {
                support: VertexSet::from_vertices([a, b]),
            });
        }
        Ok(Basis { n, monomials })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// Degree-two monomials, as 0-based `(i, j)` with `i < j`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.monomials[1 + self.n..]
            .iter()
            .map(|m| {
                let mut it = m.support.iter();
                (it.next().unwrap(), it.next().unwrap())
            })
            .collect()
    }

    pub fn level_kind(&self, g: &Graph) -> LevelKind {
        let pairs = self.len() - 1 - self.n;
        if pairs == 0 && g.n() * g.n().saturating_sub(1) / 2 != g.edge_count() {
            LevelKind::Level1
        } else if pairs == g.n() * g.n().saturating_sub(1) / 2 - g.edge_count() {
            LevelKind::Level2
        } else {
            LevelKind::Intermediate
        }
    }

    /// One monomial per line as sorted 1-based vertex lists; `-` is the constant.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for m in &self.monomials {
            if m.support.is_empty() {
                s.push('-');
            } else {
                let v: Vec<String> = m.support.iter().map(|v| (v + 1).to_string()).collect();
                s.push_str(&v.join(" "));
            }
            s.push('\n');
        }
        s
    }

    /// Reads the format written by [`Basis::to_text`] and validates it against `g`.
    pub fn from_text(g: &Graph, text: &str) -> Result<Basis> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let mut sets = Vec::new();
        for &(lineno, line) in &lines {
            if line == "-" {
                sets.push((lineno, Vec::new()));
                continue;
            }
            let mut vs = Vec::new();
            for tok in line.split_whitespace() {
                let v: usize = tok.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("bad vertex '{tok}'"),
                })?;
                if v == 0 || v > g.n() {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("vertex {v} outside [1, {}]", g.n()),
                    });
                }
                vs.push(v - 1);
            }
            sets.push((lineno, vs));
        }
        let n = g.n();
        let prefix_ok = sets.len() > n
            && sets[0].1.is_empty()
            && (0..n).all(|v| sets[1 + v].1 == [v]);
        if !prefix_ok {
            return Err(Error::Input(
                "basis must start with the constant monomial and all singletons in order".into(),
            ));
        }
        let mut pairs = Vec::new();
        for (lineno, vs) in &sets[1 + n..] {
            if vs.len() != 2 {
                return Err(Error::Parse {
                    line: *lineno,
                    msg: "expected a pair of vertices".into(),
                });
            }
            pairs.push((vs[0], vs[1]));
        }
        Basis::with_pairs(g, &pairs)
    }
}

/// Basis of the first level: constant monomial and singletons.
pub fn level1_basis(g: &Graph) -> Basis {
    Basis::with_pairs(g, &[]).expect("singleton basis is always valid")
}

/// Basis of the second level restricted to stable monomials.
pub fn level2_basis(g: &Graph) -> Basis {
    Basis::with_pairs(g, &g.non_edges()).expect("non-edges form a valid basis")
}

/// Chooses a basis of size at most `max_size` from a first-level solution.
///
/// When every non-edge fits, the full second level is returned with pairs in
/// lexicographic order. Otherwise the non-edges with the largest moment
/// values are kept, ordered by decreasing value and then lexicographically.
pub fn select_basis(g: &Graph, theta: &ThetaSolution, max_size: usize) -> Result<Basis> {
    select_basis_from_moments(g, &theta.zstar, max_size)
}

/// As [`select_basis`], ranking non-edges by the entries of `moments`
/// (a symmetric matrix indexed by the first-level basis).
pub fn select_basis_from_moments(g: &Graph, moments: &SymMatrix, max_size: usize) -> Result<Basis> {
    let n = g.n();
    if max_size < 1 + n {
        return Err(Error::Config(format!(
            "maximum basis size {max_size} is smaller than 1 + n = {}",
            1 + n
        )));
    }
    if moments.order() != 1 + n {
        return Err(Error::Input(format!(
            "moment matrix has order {}, expected {}",
            moments.order(),
            1 + n
        )));
    }
    let non_edges = g.non_edges();
    if max_size >= 1 + n + non_edges.len() {
        return Basis::with_pairs(g, &non_edges);
    }
    let mut ranked: Vec<((usize, usize), f64)> = non_edges
        .into_iter()
        .map(|(i, j)| ((i, j), moments.get(1 + i, 1 + j)))
        .collect();
    // Stable sort keeps the lexicographic order among equal values.
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    let keep: Vec<(usize, usize)> = ranked
        .into_iter()
        .take(max_size - 1 - n)
        .map(|(p, _)| p)
        .collect();
    Basis::with_pairs(g, &keep)
}

/// Half-space group of the polyhedral constraint set: the entries at
/// `positions` (upper triangle, row <= col) whose monomials multiply to
/// `x^gamma`, weighted 1 on the diagonal and 2 off it, must sum to at most
/// `rhs`.
#[derive(Debug, Clone, Copy)]
pub struct Group<'a> {
    pub gamma: &'a VertexSet,
    pub positions: &'a [(u32, u32)],
    pub rhs: f64,
}

impl Group<'_> {
    pub fn weight(&self, k: usize) -> f64 {
        let (r, c) = self.positions[k];
        if r == c {
            1.0
        } else {
            2.0
        }
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.positions.len()).map(move |k| self.weight(k))
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights().sum()
    }
}

/// Partition of the upper-triangular positions of a `|B| x |B|` matrix into
/// constraint groups (keyed by a stable, nonempty union `γ`) and free
/// positions.
#[derive(Debug, Clone)]
pub struct ConstraintIndex {
    order: usize,
    gammas: Vec<VertexSet>,
    rhs: Vec<f64>,
    offsets: Vec<usize>,
    positions: Vec<(u32, u32)>,
    weight_sums: Vec<f64>,
    free: Vec<(u32, u32)>,
}

impl ConstraintIndex {
    /// Order of the matrices this index applies to (the basis size).
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of groups (linear inequality constraints).
    pub fn m(&self) -> usize {
        self.gammas.len()
    }

    pub fn group(&self, k: usize) -> Group<'_> {
        Group {
            gamma: &self.gammas[k],
            positions: &self.positions[self.offsets[k]..self.offsets[k + 1]],
            rhs: self.rhs[k],
        }
    }

    pub fn groups(&self) -> impl Iterator<Item = Group<'_>> + '_ {
        (0..self.m()).map(move |k| self.group(k))
    }

    pub(crate) fn weight_sum(&self, k: usize) -> f64 {
        self.weight_sums[k]
    }

    pub fn free_positions(&self) -> &[(u32, u32)] {
        &self.free
    }

    /// Index of the group keyed by `gamma`, if any.
    pub fn find(&self, gamma: &VertexSet) -> Option<usize> {
        self.gammas.binary_search(gamma).ok()
    }
}

/// Groups every upper-triangular position `(row, col)` by the union of the
/// supports of its two monomials. Positions whose union is empty or not
/// stable in `g` are free.
pub fn build_constraint_index(g: &Graph, b: &Basis) -> ConstraintIndex {
    let order = b.len();
    let mono = b.monomials();
    let mut lookup: HashMap<VertexSet, usize> = HashMap::new();
    let mut members: Vec<(VertexSet, Vec<(u32, u32)>)> = Vec::new();
    let mut free = Vec::new();

    for col in 0..order {
        for row in 0..=col {
            let gamma = mono[row].support.union(&mono[col].support);
            if gamma.is_empty() || !g.is_stable(&gamma) {
                free.push((row as u32, col as u32));
                continue;
            }
            let id = match lookup.get(&gamma) {
                Some(&id) => id,
                None => {
                    let id = members.len();
                    lookup.insert(gamma.clone(), id);
                    members.push((gamma, Vec::new()));
                    id
                }
            };
            members[id].1.push((row as u32, col as u32));
        }
    }
    drop(lookup);
    members.sort_by(|a, b| a.0.cmp(&b.0));

    let total: usize = members.iter().map(|m| m.1.len()).sum();
    let mut gammas = Vec::with_capacity(members.len());
    let mut rhs = Vec::with_capacity(members.len());
    let mut offsets = Vec::with_capacity(members.len() + 1);
    let mut positions = Vec::with_capacity(total);
    let mut weight_sums = Vec::with_capacity(members.len());
    offsets.push(0);
    for (gamma, mut pos) in members {
        pos.sort_unstable_by_key(|&(r, c)| (c, r));
        rhs.push(if gamma.len() == 1 { -1.0 } else { 0.0 });
        weight_sums.push(pos.iter().map(|&(r, c)| if r == c { 1.0 } else { 2.0 }).sum());
        positions.extend(pos);
        offsets.push(positions.len());
        gammas.push(gamma);
    }
    ConstraintIndex {
        order,
        gammas,
        rhs,
        offsets,
        positions,
        weight_sums,
        free,
    }
}
