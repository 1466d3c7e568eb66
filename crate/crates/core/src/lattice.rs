//! Constraint matrices with column sums two, their multigraphs, and
//! alternating circuits.
//!
//! For `D ∈ {0,1,2}^{p×m}` with every column summing to two, column `e` is an
//! edge of the multigraph `G_D`: a self-loop at `s` if `D[s][e] = 2`, the edge
//! `{s, t}` if `D[s][e] = D[t][e] = 1`. A closed walk `v_0 -e_0-> v_1 ... ->
//! v_0` of even length has alternating indicator vector `sum_i (-1)^i 1_{e_i}`,
//! and every such vector lies in `L_D = {x ∈ Z^m : Dx = 0}`.
//!
//! Lattice vectors shorter than `2λ(L_D)` are exactly indicator vectors of
//! single sign-consistent circuits, which is what makes the searches below
//! complete.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::LatticeError;

/// `D ∈ {0,1,2}^{p×m}` with column sums two, plus an optional right-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<u8>>,
    rhs: Option<Vec<i64>>,
}

impl ConstraintMatrix {
    pub fn new(rows: Vec<Vec<i64>>, cols: usize) -> Result<Self, LatticeError> {
        let mut entries = Vec::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(LatticeError::ShapeMismatch { expected: cols, got: row.len() });
            }
            let mut out = Vec::with_capacity(cols);
            for (c, &v) in row.iter().enumerate() {
                if !(0..=2).contains(&v) {
                    return Err(LatticeError::BadEntry { row: r, col: c, value: v });
                }
                out.push(v as u8);
            }
            entries.push(out);
        }
        for col in 0..cols {
            let sum: i64 = rows.iter().map(|row| row[col]).sum();
            if sum != 2 {
                return Err(LatticeError::BadColumnSum { col, sum });
            }
        }
        Ok(ConstraintMatrix { rows: rows.len(), cols, entries, rhs: None })
    }

    pub fn with_rhs(mut self, rhs: Vec<i64>) -> Result<Self, LatticeError> {
        if rhs.len() != self.rows {
            return Err(LatticeError::ShapeMismatch { expected: self.rows, got: rhs.len() });
        }
        self.rhs = Some(rhs);
        Ok(self)
    }

    /// Incidence matrix of a multigraph on `p` vertices; `(s, s)` is a loop.
    pub fn from_edges(p: usize, edges: &[(usize, usize)]) -> Result<Self, LatticeError> {
        let mut rows = vec![vec![0i64; edges.len()]; p];
        for (e, &(s, t)) in edges.iter().enumerate() {
            for v in [s, t] {
                if v >= p {
                    return Err(LatticeError::ShapeMismatch { expected: p, got: v + 1 });
                }
                rows[v][e] += 1;
            }
        }
        ConstraintMatrix::new(rows, edges.len())
    }

    /// Uniformly random valid matrix: each column is a loop with probability
    /// `loop_prob`, otherwise an edge between two distinct random rows.
    pub fn random<R: Rng + ?Sized>(p: usize, m: usize, loop_prob: f64, rng: &mut R) -> Self {
        assert!(p >= 1, "at least one row is needed");
        let edges: Vec<(usize, usize)> = (0..m)
            .map(|_| {
                let s = rng.gen_range(0..p);
                if p == 1 || rng.gen_bool(loop_prob) {
                    (s, s)
                } else {
                    let mut t = rng.gen_range(0..p - 1);
                    if t >= s {
                        t += 1;
                    }
                    (s, t)
                }
            })
            .collect();
        ConstraintMatrix::from_edges(p, &edges).expect("valid by construction")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> u8 {
        self.entries[r][c]
    }

    pub fn entries(&self) -> &[Vec<u8>] {
        &self.entries
    }

    pub fn rhs(&self) -> Option<&[i64]> {
        self.rhs.as_deref()
    }

    /// `D x`.
    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        self.entries.iter().map(|row| row.iter().zip(x).map(|(&d, &v)| d as i64 * v).sum()).collect()
    }

    pub fn in_lattice(&self, x: &[i64]) -> bool {
        x.len() == self.cols && self.apply(x).iter().all(|&v| v == 0)
    }

    /// Rank over the rationals (fraction-free elimination).
    pub fn rational_rank(&self) -> usize {
        let mut a: Vec<Vec<i128>> =
            self.entries.iter().map(|row| row.iter().map(|&v| v as i128).collect()).collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(piv) = (rank..self.rows).find(|&r| a[r][c] != 0) else {
                continue;
            };
            a.swap(rank, piv);
            for r in rank + 1..self.rows {
                if a[r][c] == 0 {
                    continue;
                }
                let (num, den) = (a[r][c], a[rank][c]);
                for k in c..self.cols {
                    a[r][k] = a[r][k] * den - a[rank][k] * num;
                }
                let g = a[r].iter().fold(0i128, |g, &v| gcd(g, v.abs()));
                if g > 1 {
                    a[r].iter_mut().for_each(|v| *v /= g);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Whether `L_D = {0}`.
    pub fn lattice_is_trivial(&self) -> bool {
        self.rational_rank() == self.cols
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `G_D`: edge `e` joins `edges[e].0` and `edges[e].1` (equal for a loop).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl MultiGraph {
    /// The other endpoint of `e` seen from `v`, if `e` is incident to `v`.
    pub fn across(&self, e: usize, v: usize) -> Option<usize> {
        let (s, t) = self.edges[e];
        if s == v {
            Some(t)
        } else if t == v {
            Some(s)
        } else {
            None
        }
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.edges[e].0 == self.edges[e].1
    }
}

pub fn build_graph(d: &ConstraintMatrix) -> MultiGraph {
    let edges = (0..d.cols)
        .map(|e| {
            let hits: Vec<usize> = (0..d.rows).filter(|&r| d.entries[r][e] > 0).collect();
            match hits.as_slice() {
                [s] => (*s, *s),
                [s, t] => (*s, *t),
                _ => unreachable!("column sums are validated"),
            }
        })
        .collect();
    MultiGraph { vertices: d.rows, edges }
}

/// A closed walk of even length and its alternating indicator vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlternatingCircuit {
    /// `v_0, v_1, ..., v_k` with `v_k = v_0`.
    pub vertices: Vec<usize>,
    /// `e_0, ..., e_{k-1}`.
    pub edges: Vec<usize>,
    pub indicator: Vec<i64>,
}

impl AlternatingCircuit {
    /// Number of edges `|C|` in the walk.
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn indicator_norm(&self) -> u64 {
        l1(&self.indicator)
    }
}

pub fn l1(x: &[i64]) -> u64 {
    x.iter().map(|v| v.unsigned_abs()).sum()
}

/// `a ⊑ b`: same signs and dominated magnitudes.
pub fn is_conformal(a: &[i64], b: &[i64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(&x, &y)| x * y >= 0 && x.abs() <= y.abs())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", content = "circuits", rename_all = "snake_case")]
pub enum Decomposition {
    Circuits(Vec<AlternatingCircuit>),
    NotInLattice,
}

/// Splits `x` into conformal alternating circuits, choosing the lowest
/// admissible edge index at every step and starting each walk from the
/// smaller endpoint of its first edge. Reports [`Decomposition::NotInLattice`]
/// exactly when `Dx != 0`.
pub fn decompose(d: &ConstraintMatrix, x: &[i64]) -> Result<Decomposition, LatticeError> {
    if x.len() != d.cols {
        return Err(LatticeError::ShapeMismatch { expected: d.cols, got: x.len() });
    }
    let g = build_graph(d);
    let mut rest = x.to_vec();
    let mut circuits = Vec::new();
    loop {
        if rest.iter().all(|&v| v == 0) {
            return Ok(Decomposition::Circuits(circuits));
        }
        let Some(e0) = rest.iter().position(|&v| v > 0) else {
            // A nonzero vector with no positive entry has D·x < 0 somewhere.
            return Ok(Decomposition::NotInLattice);
        };
        let mut y = vec![0i64; d.cols];
        y[e0] = 1;
        let (s, t) = g.edges[e0];
        let v0 = s.min(t);
        let mut vertices = vec![v0, if v0 == s { t } else { s }];
        let mut edges = vec![e0];
        loop {
            let j = edges.len();
            let vj = *vertices.last().unwrap();
            if j % 2 == 0 && vj == v0 {
                break;
            }
            let sign = if j % 2 == 0 { 1 } else { -1 };
            let next = (0..d.cols).find_map(|e| {
                let u = g.across(e, vj)?;
                (rest[e].abs() > y[e].abs() && sign * rest[e] > 0).then_some((e, u))
            });
            let Some((e, u)) = next else {
                return Ok(Decomposition::NotInLattice);
            };
            y[e] += sign;
            edges.push(e);
            vertices.push(u);
        }
        for (r, yv) in rest.iter_mut().zip(&y) {
            *r -= yv;
        }
        circuits.push(AlternatingCircuit { vertices, edges, indicator: y });
    }
}

/// Length of the shortest nonzero lattice vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Lambda {
    Finite(u64),
    Infinite,
}

impl Lambda {
    pub fn finite(self) -> Option<u64> {
        match self {
            Lambda::Finite(v) => Some(v),
            Lambda::Infinite => None,
        }
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lambda::Finite(v) => write!(f, "{v}"),
            Lambda::Infinite => write!(f, "infinity"),
        }
    }
}

impl Serialize for Lambda {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Lambda::Finite(v) => s.serialize_u64(*v),
            Lambda::Infinite => s.serialize_str("infinity"),
        }
    }
}

/// Indicator vectors of sign-consistent closed walks of length at most
/// `max_len` that stop at their first even return to the start.
///
/// Each walk starts on edge `e0` with sign `+` from the smaller endpoint and
/// never uses an edge below `e0` with sign `+`, so a vector whose smallest
/// positive coordinate is `e0` is found from that start only. Negatives are
/// not included.
fn first_return_vectors(g: &MultiGraph, m: usize, max_len: u64) -> BTreeSet<Vec<i64>> {
    let mut found = BTreeSet::new();
    for e0 in 0..m {
        let (s, t) = g.edges[e0];
        let v0 = s.min(t);
        let v1 = if v0 == s { t } else { s };
        let mut y = vec![0i64; m];
        y[e0] = 1;
        let mut seen: HashSet<(usize, Vec<i64>)> = HashSet::new();
        let mut stack = vec![(v1, y)];
        while let Some((v, y)) = stack.pop() {
            let j = l1(&y);
            if j % 2 == 0 && v == v0 {
                found.insert(y);
                continue;
            }
            if j >= max_len || !seen.insert((v, y.clone())) {
                continue;
            }
            let sign: i64 = if j % 2 == 0 { 1 } else { -1 };
            for e in 0..m {
                if sign > 0 && e < e0 {
                    continue;
                }
                let Some(u) = g.across(e, v) else { continue };
                if y[e] * sign < 0 {
                    continue;
                }
                let mut next = y.clone();
                next[e] += sign;
                stack.push((u, next));
            }
        }
    }
    found
}

/// `λ(L_D)`, or [`Lambda::Infinite`] when the lattice is `{0}`.
pub fn lambda(d: &ConstraintMatrix) -> Lambda {
    if d.lattice_is_trivial() {
        return Lambda::Infinite;
    }
    let g = build_graph(d);
    // Deepen until the first circuit appears; one always exists for a
    // nontrivial lattice.
    let mut bound = 2;
    loop {
        if let Some(min) = first_return_vectors(&g, d.cols, bound).iter().map(|v| l1(v)).min() {
            return Lambda::Finite(min);
        }
        bound += 2;
    }
}

/// All `v ∈ L_D` with `0 < |v| < (numer / denom) · λ`, for factors in `(0, 2]`.
pub fn near_shortest_with_factor(
    d: &ConstraintMatrix,
    numer: u64,
    denom: u64,
) -> Result<Vec<Vec<i64>>, LatticeError> {
    if numer == 0 || denom == 0 || numer > 2 * denom {
        return Err(LatticeError::BadFactor { numer, denom });
    }
    let Lambda::Finite(lam) = lambda(d) else {
        return Ok(Vec::new());
    };
    // Largest length strictly below the threshold.
    let max_len = (numer * lam - 1) / denom;
    let g = build_graph(d);
    let mut out: BTreeSet<Vec<i64>> = BTreeSet::new();
    for v in first_return_vectors(&g, d.cols, max_len) {
        if l1(&v) * denom < numer * lam {
            out.insert(v.iter().map(|x| -x).collect());
            out.insert(v);
        }
    }
    Ok(out.into_iter().collect())
}

/// All `v ∈ L_D` with `0 < |v| < 2λ`.
pub fn near_shortest(d: &ConstraintMatrix) -> Vec<Vec<i64>> {
    near_shortest_with_factor(d, 2, 1).expect("factor 2 is valid")
}

/// Alternating indicator vectors of every sign-consistent first-return walk
/// up to `max_len` edges, closed under negation. Useful for synthesizing
/// lattice vectors.
pub fn circuit_vectors(d: &ConstraintMatrix, max_len: u64) -> Vec<Vec<i64>> {
    let g = build_graph(d);
    let mut out = BTreeSet::new();
    for v in first_return_vectors(&g, d.cols, max_len) {
        out.insert(v.iter().map(|x| -x).collect());
        out.insert(v);
    }
    out.into_iter().collect()
}
