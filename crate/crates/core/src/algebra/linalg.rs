//! Exact elimination over `F_p`: rank, determinant and Pfaffian.

use crate::error::AlgebraError;

use super::field::{FieldElem, PrimeField};
use super::matrix::FieldMatrix;

/// Rank by Gaussian elimination.
pub fn rank(m: &FieldMatrix, field: PrimeField) -> usize {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(r, piv);
        let inv = field.inv(a[(r, c)]).unwrap();
        for i in r + 1..rows {
            let factor = field.mul(a[(i, c)], inv);
            if factor.is_zero() {
                continue;
            }
            for j in c..cols {
                let v = field.sub(a[(i, j)], field.mul(factor, a[(r, j)]));
                a[(i, j)] = v;
            }
        }
        r += 1;
    }
    r
}

/// Determinant by Gaussian elimination.
pub fn det(m: &FieldMatrix, field: PrimeField) -> Result<FieldElem, AlgebraError> {
    if !m.is_square() {
        return Err(AlgebraError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    Ok(det_in_place(&mut m.clone(), field))
}

/// Determinant that consumes the scratch matrix; `m` must be square.
pub(crate) fn det_in_place(a: &mut FieldMatrix, field: PrimeField) -> FieldElem {
    let n = a.rows();
    let mut acc = field.one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| !a[(i, c)].is_zero()) else {
            return field.zero();
        };
        if piv != c {
            a.swap_rows(c, piv);
            acc = field.neg(acc);
        }
        let p = a[(c, c)];
        acc = field.mul(acc, p);
        let inv = field.inv(p).unwrap();
        for i in c + 1..n {
            let factor = field.mul(a[(i, c)], inv);
            if factor.is_zero() {
                continue;
            }
            for j in c + 1..n {
                let v = field.sub(a[(i, j)], field.mul(factor, a[(c, j)]));
                a[(i, j)] = v;
            }
        }
    }
    acc
}

/// Pfaffian of a skew-symmetric matrix; zero for odd order.
///
/// Eliminates one 2x2 pivot block at a time: with pivot `a = M[k][k+1]`
/// the trailing block is replaced by its Schur complement
/// `M[i][j] + (M[i][k] M[k+1][j] - M[i][k+1] M[k][j]) / a`, and
/// `pf(M) = a * pf(complement)`. Each symmetric row/column swap flips the sign.
pub fn pfaffian(m: &FieldMatrix, field: PrimeField) -> Result<FieldElem, AlgebraError> {
    if !m.is_square() {
        return Err(AlgebraError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    if let Some((row, col)) = m.skew_violation(field) {
        return Err(AlgebraError::NotSkewSymmetric { row, col });
    }
    let n = m.rows();
    if n % 2 == 1 {
        return Ok(field.zero());
    }
    let mut a = m.clone();
    let mut acc = field.one();
    let mut k = 0;
    while k < n {
        let Some(piv) = (k + 1..n).find(|&j| !a[(k, j)].is_zero()) else {
            return Ok(field.zero());
        };
        if piv != k + 1 {
            a.swap_rows(k + 1, piv);
            a.swap_cols(k + 1, piv);
            acc = field.neg(acc);
        }
        let p = a[(k, k + 1)];
        acc = field.mul(acc, p);
        let inv = field.inv(p).unwrap();
        for i in k + 2..n {
            for j in i + 1..n {
                let cross = field.sub(
                    field.mul(a[(i, k)], a[(k + 1, j)]),
                    field.mul(a[(i, k + 1)], a[(k, j)]),
                );
                let v = field.add(a[(i, j)], field.mul(cross, inv));
                a[(i, j)] = v;
                a[(j, i)] = field.neg(v);
            }
        }
        k += 2;
    }
    Ok(acc)
}
