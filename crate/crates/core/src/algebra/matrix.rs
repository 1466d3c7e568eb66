use std::ops::{Index, IndexMut};

use crate::error::AlgebraError;

use super::field::{FieldElem, PrimeField};
use super::quadpoly::QuadPoly;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type FieldMatrix = Matrix<FieldElem>;
pub type QuadPolyMatrix = Matrix<QuadPoly>;

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, AlgebraError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(AlgebraError::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Submatrix on the given row and column indices, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    /// Horizontal concatenation. All blocks must share the row count `rows`.
    pub fn hcat(rows: usize, blocks: &[Matrix<T>]) -> Result<Self, AlgebraError> {
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(AlgebraError::DimensionMismatch("hcat row counts differ".into()));
        }
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for b in blocks {
                data.extend_from_slice(&b.data[i * b.cols..(i + 1) * b.cols]);
            }
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Applies `f` entrywise.
    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<T> Matrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Entry types that can be scaled by a field element, so that
/// `kron` works for both numeric and polynomial left factors.
pub trait ScaleByField: Clone {
    fn zero_like(field: PrimeField) -> Self;
    fn scale(&self, c: FieldElem, field: PrimeField) -> Self;
    fn accumulate(&mut self, other: &Self, field: PrimeField);
}

impl ScaleByField for FieldElem {
    fn zero_like(field: PrimeField) -> Self {
        field.zero()
    }

    fn scale(&self, c: FieldElem, field: PrimeField) -> Self {
        field.mul(*self, c)
    }

    fn accumulate(&mut self, other: &Self, field: PrimeField) {
        *self = field.add(*self, *other);
    }
}

impl ScaleByField for QuadPoly {
    fn zero_like(_field: PrimeField) -> Self {
        QuadPoly::zero()
    }

    fn scale(&self, c: FieldElem, field: PrimeField) -> Self {
        QuadPoly::scale(self, c, field)
    }

    fn accumulate(&mut self, other: &Self, field: PrimeField) {
        self.add_assign(other, field);
    }
}

/// Kronecker product `a ⊗ b`: block `(i, j)` of the result is `a[i, j] * b`.
pub fn kron<T: ScaleByField>(a: &Matrix<T>, b: &FieldMatrix, field: PrimeField) -> Matrix<T> {
    let (p, q) = (b.rows(), b.cols());
    Matrix::from_fn(a.rows() * p, a.cols() * q, |r, c| {
        a[(r / p, c / q)].scale(b[(r % p, c % q)], field)
    })
}

/// `acc += a ⊗ b`, without materializing the product.
pub fn kron_accumulate<T: ScaleByField>(
    acc: &mut Matrix<T>,
    a: &Matrix<T>,
    b: &FieldMatrix,
    field: PrimeField,
) -> Result<(), AlgebraError> {
    let (p, q) = (b.rows(), b.cols());
    if acc.rows() != a.rows() * p || acc.cols() != a.cols() * q {
        return Err(AlgebraError::DimensionMismatch(format!(
            "accumulator is {}x{}, product is {}x{}",
            acc.rows(),
            acc.cols(),
            a.rows() * p,
            a.cols() * q
        )));
    }
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            for r in 0..p {
                for s in 0..q {
                    let c = b[(r, s)];
                    if c.is_zero() {
                        continue;
                    }
                    let term = a[(i, j)].scale(c, field);
                    acc[(i * p + r, j * q + s)].accumulate(&term, field);
                }
            }
        }
    }
    Ok(())
}

impl FieldMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Matrix::filled(rows, cols, field.zero())
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { field.one() } else { field.zero() })
    }

    /// Builds a matrix from signed integers reduced into the field.
    pub fn from_i64_rows(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self, AlgebraError> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| field.from_i64(v)).collect()).collect())
    }

    pub fn random<R: rand::Rng + ?Sized>(field: PrimeField, rows: usize, cols: usize, rng: &mut R) -> Self {
        Matrix::from_fn(rows, cols, |_, _| field.random(rng))
    }

    /// Random skew-symmetric matrix of order `n`.
    pub fn random_skew<R: rand::Rng + ?Sized>(field: PrimeField, n: usize, rng: &mut R) -> Self {
        let mut m = FieldMatrix::zeros(field, n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = field.random(rng);
                m[(i, j)] = v;
                m[(j, i)] = field.neg(v);
            }
        }
        m
    }

    pub fn mul(&self, other: &FieldMatrix, field: PrimeField) -> Result<FieldMatrix, AlgebraError> {
        if self.cols() != other.rows() {
            return Err(AlgebraError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Matrix::from_fn(self.rows(), other.cols(), |i, j| {
            (0..self.cols()).fold(field.zero(), |acc, k| field.add(acc, field.mul(self[(i, k)], other[(k, j)])))
        }))
    }

    pub fn add(&self, other: &FieldMatrix, field: PrimeField) -> Result<FieldMatrix, AlgebraError> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(AlgebraError::DimensionMismatch("cannot add matrices of different shapes".into()));
        }
        Ok(Matrix::from_fn(self.rows(), self.cols(), |i, j| field.add(self[(i, j)], other[(i, j)])))
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|e| e.is_zero())
    }

    pub fn is_skew_symmetric(&self, field: PrimeField) -> bool {
        self.skew_violation(field).is_none()
    }

    pub(crate) fn skew_violation(&self, field: PrimeField) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        for i in 0..self.rows() {
            for j in i..self.cols() {
                if self[(i, j)] != field.neg(self[(j, i)]) {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    #[test]
    fn kron_with_identity_is_block_diagonal() {
        let f = f7();
        let b = FieldMatrix::from_i64_rows(f, &[vec![1, 2], vec![3, 4]]).unwrap();
        let k = kron(&FieldMatrix::identity(f, 2), &b, f);
        let expect = FieldMatrix::from_i64_rows(
            f,
            &[vec![1, 2, 0, 0], vec![3, 4, 0, 0], vec![0, 0, 1, 2], vec![0, 0, 3, 4]],
        )
        .unwrap();
        assert_eq!(k, expect);
    }

    #[test]
    fn kron_with_scalar_scales() {
        let f = f7();
        let b = FieldMatrix::from_i64_rows(f, &[vec![1, 2], vec![3, 4]]).unwrap();
        let c = FieldMatrix::from_i64_rows(f, &[vec![3]]).unwrap();
        let expect = FieldMatrix::from_i64_rows(f, &[vec![3, 6], vec![9, 12]]).unwrap();
        assert_eq!(kron(&c, &b, f), expect);
    }

    #[test]
    fn kron_swap_with_symplectic_block() {
        // [[0,1],[1,0]] ⊗ [[0,1],[-1,0]] expanded block by block.
        let f = f7();
        let a = FieldMatrix::from_i64_rows(f, &[vec![0, 1], vec![1, 0]]).unwrap();
        let b = FieldMatrix::from_i64_rows(f, &[vec![0, 1], vec![-1, 0]]).unwrap();
        let expect = FieldMatrix::from_i64_rows(
            f,
            &[vec![0, 0, 0, 1], vec![0, 0, -1, 0], vec![0, 1, 0, 0], vec![-1, 0, 0, 0]],
        )
        .unwrap();
        assert_eq!(kron(&a, &b, f), expect);
    }

    #[test]
    fn kron_accumulate_matches_sum_of_products() {
        let f = f7();
        let a1 = FieldMatrix::from_i64_rows(f, &[vec![1, 2], vec![0, 5]]).unwrap();
        let a2 = FieldMatrix::from_i64_rows(f, &[vec![3, 1], vec![4, 4]]).unwrap();
        let b1 = FieldMatrix::from_i64_rows(f, &[vec![0, 1, 2], vec![-1, 0, 3]]).unwrap();
        let b2 = FieldMatrix::from_i64_rows(f, &[vec![2, 2, 1], vec![6, 0, 1]]).unwrap();
        let mut acc = FieldMatrix::zeros(f, 4, 6);
        kron_accumulate(&mut acc, &a1, &b1, f).unwrap();
        kron_accumulate(&mut acc, &a2, &b2, f).unwrap();
        let direct = kron(&a1, &b1, f).add(&kron(&a2, &b2, f), f).unwrap();
        assert_eq!(acc, direct);
        assert!(kron_accumulate(&mut FieldMatrix::zeros(f, 3, 3), &a1, &b1, f).is_err());
    }
}
