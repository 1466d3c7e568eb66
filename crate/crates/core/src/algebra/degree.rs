//! Total degree and nonvanishing of `det(M)` for matrices over `F_p[t11, t12, t21, t22]`.
//!
//! Two routes are provided:
//!
//! * **Randomized.** Substitute `t_{p,q} <- alpha_{p,q} * u` for random
//!   `alpha`. The determinant becomes a univariate polynomial in `u` whose
//!   degree equals the total degree of `det(M)` unless the top homogeneous
//!   component vanishes at `alpha`, which happens with probability at most
//!   `deg / p`. The univariate determinant is recovered exactly by sparse
//!   interpolation: every exponent of `det(M(u))` is a sum of one entry
//!   exponent per row (and per column), so the support is known in advance,
//!   and evaluating at `u = g^j` turns the recovery into a transposed
//!   Vandermonde system.
//! * **Deterministic.** Dense tensor-product interpolation on a grid sized by
//!   per-variable degree bounds. Exponential in the degree, for tiny inputs only.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::AlgebraError;

use super::field::{FieldElem, PrimeField};
use super::linalg::det_in_place;
use super::matrix::{FieldMatrix, Matrix, QuadPolyMatrix};
use super::quadpoly::{Exponents, QuadPoly};

/// Largest interpolation support the randomized route accepts.
pub const SUPPORT_CAP: usize = 20_000;
/// Largest grid the deterministic route accepts.
pub const GRID_CAP: usize = 400_000;

/// Degree of a polynomial, with a sentinel for the zero polynomial that
/// sorts below every finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    MinusInfinity,
    Finite(u64),
}

impl Degree {
    pub fn finite(self) -> Option<u64> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::MinusInfinity => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Degree::Finite(_))
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::MinusInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

impl Serialize for Degree {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Degree::MinusInfinity => s.serialize_str("-inf"),
            Degree::Finite(d) => s.serialize_u64(*d),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeMode {
    Deterministic,
    Randomized,
}

/// Total degree of `det(m)` in the four variables.
///
/// In randomized mode the result is the maximum over `trials` independent
/// projections, so it can only err low.
pub fn total_degree_of_det<R: Rng + ?Sized>(
    m: &QuadPolyMatrix,
    mode: DegreeMode,
    trials: usize,
    field: PrimeField,
    rng: &mut R,
) -> Result<Degree, AlgebraError> {
    if !m.is_square() {
        return Err(AlgebraError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    match mode {
        DegreeMode::Deterministic => Ok(det_polynomial(m, field)?.total_degree()),
        DegreeMode::Randomized => {
            let mut best = Degree::MinusInfinity;
            for _ in 0..trials.max(1) {
                let alpha: [FieldElem; 4] = std::array::from_fn(|_| field.random(rng));
                best = best.max(projected_det_degree(m, &alpha, field, rng)?);
            }
            Ok(best)
        }
    }
}

/// Whether `det(m)` is a nonzero polynomial, by evaluation at `trials`
/// random points. A `true` answer is always correct.
pub fn is_nonzero_poly_det<R: Rng + ?Sized>(
    m: &QuadPolyMatrix,
    trials: usize,
    field: PrimeField,
    rng: &mut R,
) -> Result<bool, AlgebraError> {
    if !m.is_square() {
        return Err(AlgebraError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    for _ in 0..trials.max(1) {
        let point: [FieldElem; 4] = std::array::from_fn(|_| field.random(rng));
        let mut at = m.map(|e| e.eval(&point, field));
        if !det_in_place(&mut at, field).is_zero() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Exact nonvanishing test by full grid interpolation; tiny inputs only.
pub fn is_nonzero_poly_det_exact(m: &QuadPolyMatrix, field: PrimeField) -> Result<bool, AlgebraError> {
    Ok(!det_polynomial(m, field)?.is_zero())
}

/// Sparse univariate polynomial: exponent -> coefficient.
type SparseUni = BTreeMap<u64, FieldElem>;

fn project(p: &QuadPoly, alpha: &[FieldElem; 4], field: PrimeField) -> SparseUni {
    let mut out = SparseUni::new();
    for (e, c) in p.terms() {
        let mut coeff = *c;
        for v in 0..4 {
            coeff = field.mul(coeff, field.pow(alpha[v], e[v]));
        }
        let total: u64 = e.iter().sum();
        let slot = out.entry(total).or_insert(FieldElem::ZERO);
        *slot = field.add(*slot, coeff);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Sorted sumset over lines (rows or columns): one exponent from each line.
fn sumset(lines: &[Vec<u64>]) -> Result<Vec<u64>, AlgebraError> {
    let mut acc = vec![0u64];
    for exps in lines {
        if exps.is_empty() {
            return Ok(Vec::new());
        }
        let mut next: Vec<u64> = acc.iter().flat_map(|s| exps.iter().map(move |e| s + e)).collect();
        next.sort_unstable();
        next.dedup();
        if next.len() > SUPPORT_CAP {
            return Err(AlgebraError::SupportTooLarge { size: next.len(), cap: SUPPORT_CAP });
        }
        acc = next;
    }
    Ok(acc)
}

fn projected_det_degree<R: Rng + ?Sized>(
    m: &QuadPolyMatrix,
    alpha: &[FieldElem; 4],
    field: PrimeField,
    rng: &mut R,
) -> Result<Degree, AlgebraError> {
    let n = m.rows();
    let uni: Matrix<SparseUni> = m.map(|e| project(e, alpha, field));

    let mut row_exps = vec![Vec::new(); n];
    let mut col_exps = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            for &k in uni[(i, j)].keys() {
                row_exps[i].push(k);
                col_exps[j].push(k);
            }
        }
    }
    for v in row_exps.iter_mut().chain(col_exps.iter_mut()) {
        v.sort_unstable();
        v.dedup();
    }
    let by_rows = sumset(&row_exps)?;
    let by_cols = sumset(&col_exps)?;
    let support: Vec<u64> = by_rows.into_iter().filter(|e| by_cols.binary_search(e).is_ok()).collect();
    if support.is_empty() {
        return Ok(Degree::MinusInfinity);
    }
    if n == 0 {
        return Ok(Degree::Finite(0));
    }
    let coeffs = interpolate_on_support(&uni, &support, field, rng, true)?;
    Ok(coeffs
        .iter()
        .zip(&support)
        .rev()
        .find(|(c, _)| !c.is_zero())
        .map_or(Degree::MinusInfinity, |(_, &e)| Degree::Finite(e)))
}

/// Recovers the coefficients of `det(uni(u))` on the given support.
///
/// With `top_only`, coefficients are solved from the highest exponent down
/// and the remaining ones are left zero once a nonzero one is found.
fn interpolate_on_support<R: Rng + ?Sized>(
    uni: &Matrix<SparseUni>,
    support: &[u64],
    field: PrimeField,
    rng: &mut R,
    top_only: bool,
) -> Result<Vec<FieldElem>, AlgebraError> {
    let k = support.len();
    let p = field.modulus();
    if k as u64 >= p {
        return Err(AlgebraError::FieldTooSmall { needed: k as u64 + 1, modulus: p });
    }
    // A generator candidate with pairwise distinct node values g^e.
    let mut chosen = None;
    for _ in 0..32 {
        let g = field.random_nonzero(rng);
        let mut nodes: Vec<FieldElem> = support.iter().map(|&e| field.pow(g, e)).collect();
        let candidate = nodes.clone();
        nodes.sort_unstable();
        nodes.dedup();
        if nodes.len() == k {
            chosen = Some((g, candidate));
            break;
        }
    }
    let Some((g, nodes)) = chosen else {
        let needed = support.last().copied().unwrap_or(0) + 2;
        return Err(AlgebraError::FieldTooSmall { needed, modulus: p });
    };

    // Evaluate det(uni(g^j)) for j = 0..k, stepping each g^e incrementally.
    let n = uni.rows();
    let mut exps: Vec<u64> = uni.entries().iter().flat_map(|s| s.keys().copied()).collect();
    exps.sort_unstable();
    exps.dedup();
    let step: Vec<FieldElem> = exps.iter().map(|&e| field.pow(g, e)).collect();
    let mut cur: Vec<FieldElem> = vec![field.one(); exps.len()];
    let mut values = Vec::with_capacity(k);
    let mut scratch = FieldMatrix::zeros(field, n, n);
    for _ in 0..k {
        for i in 0..n {
            for j in 0..n {
                let v = uni[(i, j)].iter().fold(field.zero(), |acc, (e, c)| {
                    let idx = exps.binary_search(e).unwrap();
                    field.add(acc, field.mul(*c, cur[idx]))
                });
                scratch[(i, j)] = v;
            }
        }
        values.push(det_in_place(&mut scratch, field));
        for (c, s) in cur.iter_mut().zip(&step) {
            *c = field.mul(*c, *s);
        }
    }
    Ok(solve_transposed_vandermonde(&nodes, &values, field, top_only))
}

/// Solves `sum_k c_k * nodes[k]^j = values[j]` for `j = 0..K`.
///
/// With `master(z) = prod (z - nodes[k])` and `q_k = master / (z - nodes[k])`,
/// `sum_j q_k[j] * values[j] = c_k * q_k(nodes[k])`.
fn solve_transposed_vandermonde(
    nodes: &[FieldElem],
    values: &[FieldElem],
    field: PrimeField,
    top_only: bool,
) -> Vec<FieldElem> {
    let k = nodes.len();
    let master = master_poly(nodes, field);
    let mut coeffs = vec![field.zero(); k];
    let mut q = vec![field.zero(); k];
    for idx in (0..k).rev() {
        let b = nodes[idx];
        // Synthetic division of master by (z - b).
        q[k - 1] = master[k];
        for i in (1..k).rev() {
            q[i - 1] = field.add(master[i], field.mul(b, q[i]));
        }
        let num = q.iter().zip(values).fold(field.zero(), |acc, (a, v)| field.add(acc, field.mul(*a, *v)));
        let den = horner(&q, b, field);
        coeffs[idx] = field.div(num, den);
        if top_only && !coeffs[idx].is_zero() {
            break;
        }
    }
    coeffs
}

fn master_poly(nodes: &[FieldElem], field: PrimeField) -> Vec<FieldElem> {
    let mut poly = vec![field.one()];
    for &b in nodes {
        let mut next = vec![field.zero(); poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i + 1] = field.add(next[i + 1], c);
            next[i] = field.sub(next[i], field.mul(c, b));
        }
        poly = next;
    }
    poly
}

fn horner(poly: &[FieldElem], x: FieldElem, field: PrimeField) -> FieldElem {
    poly.iter().rev().fold(field.zero(), |acc, &c| field.add(field.mul(acc, x), c))
}

/// `det(m)` as an explicit polynomial, by dense grid interpolation.
pub fn det_polynomial(m: &QuadPolyMatrix, field: PrimeField) -> Result<QuadPoly, AlgebraError> {
    if !m.is_square() {
        return Err(AlgebraError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let mut bounds = [0usize; 4];
    for (v, bound) in bounds.iter_mut().enumerate() {
        let by_rows: u64 = (0..n).map(|i| (0..n).map(|j| m[(i, j)].degree_in(v)).max().unwrap_or(0)).sum();
        let by_cols: u64 = (0..n).map(|j| (0..n).map(|i| m[(i, j)].degree_in(v)).max().unwrap_or(0)).sum();
        *bound = by_rows.min(by_cols) as usize;
    }
    let max_bound = *bounds.iter().max().unwrap() as u64;
    if max_bound + 1 > field.modulus() {
        return Err(AlgebraError::FieldTooSmall { needed: max_bound + 1, modulus: field.modulus() });
    }
    let dims: [usize; 4] = bounds.map(|b| b + 1);
    let total: usize = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).unwrap_or(usize::MAX);
    if total > GRID_CAP {
        return Err(AlgebraError::SupportTooLarge { size: total, cap: GRID_CAP });
    }
    let strides = [dims[1] * dims[2] * dims[3], dims[2] * dims[3], dims[3], 1];

    let mut grid = vec![field.zero(); total];
    let mut scratch = FieldMatrix::zeros(field, n, n);
    for (flat, slot) in grid.iter_mut().enumerate() {
        let point: [FieldElem; 4] = std::array::from_fn(|v| field.elem(((flat / strides[v]) % dims[v]) as u64));
        for i in 0..n {
            for j in 0..n {
                scratch[(i, j)] = m[(i, j)].eval(&point, field);
            }
        }
        *slot = det_in_place(&mut scratch, field);
    }

    // Convert values to monomial coefficients one axis at a time.
    for v in 0..4 {
        let len = dims[v];
        if len == 1 {
            continue;
        }
        let nodes: Vec<FieldElem> = (0..len as u64).map(|x| field.elem(x)).collect();
        let basis = lagrange_basis(&nodes, field);
        let mut fiber = vec![field.zero(); len];
        for base in 0..total {
            if (base / strides[v]) % len != 0 {
                continue;
            }
            for (t, slot) in fiber.iter_mut().enumerate() {
                *slot = grid[base + t * strides[v]];
            }
            for d in 0..len {
                let c = (0..len).fold(field.zero(), |acc, t| field.add(acc, field.mul(fiber[t], basis[t][d])));
                grid[base + d * strides[v]] = c;
            }
        }
    }

    let mut out = QuadPoly::zero();
    for (flat, c) in grid.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let exps: Exponents = std::array::from_fn(|v| ((flat / strides[v]) % dims[v]) as u64);
        out.add_assign(&QuadPoly::monomial(exps, *c), field);
    }
    Ok(out)
}

/// Monomial coefficients of the Lagrange basis polynomials on `nodes`.
fn lagrange_basis(nodes: &[FieldElem], field: PrimeField) -> Vec<Vec<FieldElem>> {
    let k = nodes.len();
    let master = master_poly(nodes, field);
    nodes
        .iter()
        .map(|&b| {
            let mut q = vec![field.zero(); k];
            q[k - 1] = master[k];
            for i in (1..k).rev() {
                q[i - 1] = field.add(master[i], field.mul(b, q[i]));
            }
            let inv = field.inv(horner(&q, b, field)).unwrap();
            q.iter().map(|&c| field.mul(c, inv)).collect()
        })
        .collect()
}
