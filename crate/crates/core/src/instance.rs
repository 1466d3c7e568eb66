//! Lines, their rank-two skew-symmetric coefficient matrices, and the
//! second-order blow-ups built from them.
//!
//! A line `l_i = <a_i, b_i>` contributes `A_i = a_i b_i^T - b_i a_i^T`. The
//! second-order blow-up replaces the scalar variable of `A_i` by a 2x2 block
//! `X_i`, giving `sum_i X_i ⊗ A_i` of order `2n`. Only two concrete views of
//! it are ever built: numeric evaluations at chosen `X_i`, and the
//! four-variable substitution `Ã_w(v)` used by the solver.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    det, kron, kron_accumulate, pfaffian, rank, FieldElem, FieldMatrix, Matrix, PrimeField, QuadPoly,
    QuadPolyMatrix,
};
use crate::error::{AlgebraError, InstanceError};

/// `a b^T - b a^T`, rejecting dependent pairs (their wedge is zero or the
/// line would not be two-dimensional).
pub fn coeff_matrix(a: &[FieldElem], b: &[FieldElem], field: PrimeField) -> Result<FieldMatrix, InstanceError> {
    if a.len() != b.len() {
        return Err(InstanceError::WrongLength { index: 0, expected: a.len(), got: b.len() });
    }
    let n = a.len();
    let m = Matrix::from_fn(n, n, |i, j| field.sub(field.mul(a[i], b[j]), field.mul(b[i], a[j])));
    if m.is_zero() {
        return Err(InstanceError::DependentPair { index: 0 });
    }
    Ok(m)
}

/// A two-dimensional subspace given by a spanning pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub a: Vec<FieldElem>,
    pub b: Vec<FieldElem>,
}

/// `m` lines in `F_p^n` together with their coefficient matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    field: PrimeField,
    n: usize,
    lines: Vec<Line>,
    coeffs: Vec<FieldMatrix>,
}

impl Instance {
    pub fn new(field: PrimeField, n: usize, lines: Vec<Line>) -> Result<Self, InstanceError> {
        if n == 0 {
            return Err(InstanceError::ZeroDimension);
        }
        let mut coeffs = Vec::with_capacity(lines.len());
        for (index, line) in lines.iter().enumerate() {
            for v in [&line.a, &line.b] {
                if v.len() != n {
                    return Err(InstanceError::WrongLength { index, expected: n, got: v.len() });
                }
            }
            let a_i = coeff_matrix(&line.a, &line.b, field).map_err(|e| match e {
                InstanceError::DependentPair { .. } => InstanceError::DependentPair { index },
                other => other,
            })?;
            coeffs.push(a_i);
        }
        Ok(Instance { field, n, lines, coeffs })
    }

    /// Convenience constructor from signed integer coordinates.
    pub fn from_i64(field: PrimeField, n: usize, pairs: &[(Vec<i64>, Vec<i64>)]) -> Result<Self, InstanceError> {
        let lines = pairs
            .iter()
            .map(|(a, b)| Line {
                a: a.iter().map(|&x| field.from_i64(x)).collect(),
                b: b.iter().map(|&x| field.from_i64(x)).collect(),
            })
            .collect();
        Instance::new(field, n, lines)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of lines.
    pub fn m(&self) -> usize {
        self.lines.len()
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    /// `A_i`.
    pub fn coeff(&self, i: usize) -> &FieldMatrix {
        &self.coeffs[i]
    }

    /// `B_i = [a_i b_i]`, an `n x 2` matrix.
    pub fn spanning_matrix(&self, i: usize) -> FieldMatrix {
        let l = &self.lines[i];
        Matrix::from_fn(self.n, 2, |r, c| if c == 0 { l.a[r] } else { l.b[r] })
    }

    /// The `2m` ground vectors `a_1, b_1, ..., a_m, b_m`.
    pub fn ground_vectors(&self) -> Vec<&[FieldElem]> {
        self.lines.iter().flat_map(|l| [l.a.as_slice(), l.b.as_slice()]).collect()
    }

    /// Same lines with a permuted order.
    pub fn permuted(&self, order: &[usize]) -> Instance {
        let lines = order.iter().map(|&i| self.lines[i].clone()).collect();
        Instance::new(self.field, self.n, lines).expect("permutation of a valid instance")
    }

    /// Applies the linear map `g` (`n x n`, invertible) to every vector.
    pub fn transformed(&self, g: &FieldMatrix) -> Result<Instance, InstanceError> {
        let f = self.field;
        let apply = |v: &[FieldElem]| -> Vec<FieldElem> {
            (0..self.n).map(|r| (0..self.n).fold(f.zero(), |acc, c| f.add(acc, f.mul(g[(r, c)], v[c])))).collect()
        };
        let lines = self.lines.iter().map(|l| Line { a: apply(&l.a), b: apply(&l.b) }).collect();
        Instance::new(f, self.n, lines)
    }
}

/// A point of `{0, 1/2, 1}^m`, stored doubled as `{0, 1, 2}^m`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct HalfIntegralVector {
    doubled: Vec<u8>,
}

impl TryFrom<Vec<u8>> for HalfIntegralVector {
    type Error = InstanceError;

    fn try_from(doubled: Vec<u8>) -> Result<Self, InstanceError> {
        HalfIntegralVector::from_doubled(doubled)
    }
}

impl From<HalfIntegralVector> for Vec<u8> {
    fn from(v: HalfIntegralVector) -> Vec<u8> {
        v.doubled
    }
}

impl HalfIntegralVector {
    pub fn from_doubled(doubled: Vec<u8>) -> Result<Self, InstanceError> {
        if let Some(&bad) = doubled.iter().find(|&&d| d > 2) {
            return Err(InstanceError::NotHalfIntegral(bad));
        }
        Ok(HalfIntegralVector { doubled })
    }

    pub fn zeros(m: usize) -> Self {
        HalfIntegralVector { doubled: vec![0; m] }
    }

    /// The all-ones vector `1`.
    pub fn ones(m: usize) -> Self {
        HalfIntegralVector { doubled: vec![2; m] }
    }

    pub fn len(&self) -> usize {
        self.doubled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doubled.is_empty()
    }

    /// `2 * y_i`.
    pub fn doubled(&self, i: usize) -> u8 {
        self.doubled[i]
    }

    pub fn as_doubled(&self) -> &[u8] {
        &self.doubled
    }

    /// `2 * |y|`.
    pub fn size_doubled(&self) -> u64 {
        self.doubled.iter().map(|&d| d as u64).sum()
    }

    /// `2 * (w · y)`.
    pub fn weight_doubled(&self, w: &[u64]) -> u128 {
        self.doubled.iter().zip(w).map(|(&d, &wi)| d as u128 * wi as u128).sum()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &HalfIntegralVector) -> bool {
        self.doubled.iter().zip(&other.doubled).all(|(a, b)| a <= b)
    }

    /// Every point of `{0, 1/2, 1}^m` in lexicographic order of doubled entries.
    pub fn all(m: usize) -> impl Iterator<Item = HalfIntegralVector> {
        let total = 3usize.pow(m as u32);
        (0..total).map(move |mut code| {
            let mut doubled = vec![0u8; m];
            for slot in doubled.iter_mut().rev() {
                *slot = (code % 3) as u8;
                code /= 3;
            }
            HalfIntegralVector { doubled }
        })
    }
}

impl fmt::Display for HalfIntegralVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.doubled.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match d {
                0 => write!(f, "0")?,
                1 => write!(f, "1/2")?,
                _ => write!(f, "1")?,
            }
        }
        write!(f, ")")
    }
}

/// `sum_i X_i ⊗ A_i` for numeric 2x2 blocks `X_i`.
pub fn blowup2_eval(inst: &Instance, blocks: &[FieldMatrix]) -> Result<FieldMatrix, InstanceError> {
    if blocks.len() != inst.m() {
        return Err(InstanceError::CountMismatch { expected: inst.m(), got: blocks.len() });
    }
    let f = inst.field();
    let mut acc = FieldMatrix::zeros(f, 2 * inst.n(), 2 * inst.n());
    for (i, x) in blocks.iter().enumerate() {
        if x.rows() != 2 || x.cols() != 2 {
            return Err(AlgebraError::DimensionMismatch(format!("block {i} is {}x{}, expected 2x2", x.rows(), x.cols()))
                .into());
        }
        kron_accumulate(&mut acc, x, inst.coeff(i), f)?;
    }
    Ok(acc)
}

/// Generic evaluation of the blow-up at independent random `X_i`.
pub fn random_blowup<R: Rng + ?Sized>(inst: &Instance, rng: &mut R) -> FieldMatrix {
    let f = inst.field();
    let blocks: Vec<FieldMatrix> = (0..inst.m()).map(|_| FieldMatrix::random(f, 2, 2, rng)).collect();
    blowup2_eval(inst, &blocks).expect("blocks sized by construction")
}

/// Random `2 x (2 y_i)` factor `U_i`.
fn random_factor<R: Rng + ?Sized>(field: PrimeField, doubled: u8, rng: &mut R) -> FieldMatrix {
    FieldMatrix::random(field, 2, doubled as usize, rng)
}

fn gram(u: &FieldMatrix, field: PrimeField) -> FieldMatrix {
    if u.cols() == 0 {
        return FieldMatrix::zeros(field, 2, 2);
    }
    u.mul(&u.transpose(), field).expect("2xk times kx2")
}

/// `A^{2}(y)` at random factors: `X_i = U_i U_i^T` with `U_i` of shape `2 x 2y_i`.
pub fn pattern_blowup<R: Rng + ?Sized>(inst: &Instance, y: &HalfIntegralVector, rng: &mut R) -> FieldMatrix {
    let f = inst.field();
    let blocks: Vec<FieldMatrix> =
        (0..inst.m()).map(|i| gram(&random_factor(f, y.doubled(i), rng), f)).collect();
    blowup2_eval(inst, &blocks).expect("blocks sized by construction")
}

/// Non-commutative rank estimate `max_trials rank(A^{2}) / 2`.
///
/// Never exceeds the true value; equals it unless every trial lands on the
/// vanishing locus of the relevant minor.
pub fn ncrank_estimate<R: Rng + ?Sized>(inst: &Instance, trials: usize, rng: &mut R) -> usize {
    (0..trials.max(1)).map(|_| rank(&random_blowup(inst, rng), inst.field())).max().unwrap_or(0) / 2
}

/// `Ã_w(v) = sum_i V_i ⊗ A_i` over `F_p[t11, t12, t21, t22]`.
///
/// For `v_i = 1`, `V_i = T_i T_i^T` with `T_i = [[t11^w, t12^w], [t21^w, t22^w]]`;
/// for `v_i = 1/2`, `T_i` is the first column `(t11^w, t21^w)^T`; for
/// `v_i = 0`, `V_i = 0`.
pub fn build_atilde(inst: &Instance, w: &[u64], v: &HalfIntegralVector) -> Result<QuadPolyMatrix, InstanceError> {
    if w.len() != inst.m() {
        return Err(InstanceError::CountMismatch { expected: inst.m(), got: w.len() });
    }
    if v.len() != inst.m() {
        return Err(InstanceError::CountMismatch { expected: inst.m(), got: v.len() });
    }
    let f = inst.field();
    let n2 = 2 * inst.n();
    let mut acc = Matrix::filled(n2, n2, QuadPoly::zero());
    for i in 0..inst.m() {
        let d = v.doubled(i);
        if d == 0 {
            continue;
        }
        let block = monomial_gram(w[i], d, f);
        kron_accumulate(&mut acc, &block, inst.coeff(i), f)?;
    }
    Ok(acc)
}

/// `T T^T` for the monomial factor of a line with weight `w`.
fn monomial_gram(w: u64, doubled: u8, field: PrimeField) -> QuadPolyMatrix {
    let cols: Vec<usize> = if doubled == 2 { vec![1, 2] } else { vec![1] };
    let t = Matrix::from_fn(2, cols.len(), |r, c| QuadPoly::power_of_var(r + 1, cols[c], w));
    Matrix::from_fn(2, 2, |r, s| {
        (0..t.cols()).fold(QuadPoly::zero(), |acc, k| acc.add(&t[(r, k)].mul(&t[(s, k)], field), field))
    })
}

/// Column choices `J_i` for one line, as 0-based column sets of `U_i ⊗ B_i`.
fn column_choices(doubled: u8) -> Vec<(u8, Vec<usize>)> {
    match doubled {
        0 => vec![(0, vec![])],
        1 => vec![(0, vec![]), (1, vec![0, 1])],
        _ => vec![(0, vec![]), (1, vec![0, 1]), (1, vec![2, 3]), (2, vec![0, 1, 2, 3])],
    }
}

/// Both sides of the Pfaffian expansion of `A^{2}(y)` at one random draw of
/// the factors `U_i`: the Pfaffian itself, and the sum over `z <= y` with
/// `|z| = n/2` and column tuples `J` of `det([(U_1 ⊗ B_1)[J_1] ... ])`.
pub fn pfaffian_expansion_sides<R: Rng + ?Sized>(
    inst: &Instance,
    y: &HalfIntegralVector,
    rng: &mut R,
) -> Result<(FieldElem, FieldElem), InstanceError> {
    pfaffian_expansion_sides_with(inst, y, rng, pfaffian)
}

/// As [`pfaffian_expansion_sides`], with the left side computed by `pf`.
pub fn pfaffian_expansion_sides_with<R: Rng + ?Sized>(
    inst: &Instance,
    y: &HalfIntegralVector,
    rng: &mut R,
    pf: impl Fn(&FieldMatrix, PrimeField) -> Result<FieldElem, AlgebraError>,
) -> Result<(FieldElem, FieldElem), InstanceError> {
    if y.len() != inst.m() {
        return Err(InstanceError::CountMismatch { expected: inst.m(), got: y.len() });
    }
    let f = inst.field();
    let n = inst.n();
    let factors: Vec<FieldMatrix> = (0..inst.m()).map(|i| random_factor(f, y.doubled(i), rng)).collect();

    let blocks: Vec<FieldMatrix> = factors.iter().map(|u| gram(u, f)).collect();
    let lhs = pf(&blowup2_eval(inst, &blocks)?, f)?;

    let products: Vec<FieldMatrix> =
        factors.iter().enumerate().map(|(i, u)| kron(u, &inst.spanning_matrix(i), f)).collect();
    let choices: Vec<Vec<(u8, Vec<usize>)>> = (0..inst.m()).map(|i| column_choices(y.doubled(i))).collect();

    let mut rhs = f.zero();
    let mut pick = vec![0usize; inst.m()];
    loop {
        let z_doubled: usize = pick.iter().enumerate().map(|(i, &k)| choices[i][k].0 as usize).sum();
        if z_doubled == n {
            let selected: Vec<FieldMatrix> = pick
                .iter()
                .enumerate()
                .filter(|(i, &k)| !choices[*i][k].1.is_empty())
                .map(|(i, &k)| products[i].select(&(0..2 * n).collect::<Vec<_>>(), &choices[i][k].1))
                .collect();
            let square = Matrix::hcat(2 * n, &selected)?;
            rhs = f.add(rhs, det(&square, f)?);
        }
        // Odometer over the per-line choices.
        let mut i = 0;
        loop {
            if i == inst.m() {
                return Ok((lhs, rhs));
            }
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// Checks the Pfaffian expansion at `trials` independent random draws.
pub fn pfaffian_expansion_check<R: Rng + ?Sized>(
    inst: &Instance,
    y: &HalfIntegralVector,
    trials: usize,
    rng: &mut R,
) -> Result<bool, InstanceError> {
    for _ in 0..trials.max(1) {
        let (lhs, rhs) = pfaffian_expansion_sides(inst, y, rng)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}
