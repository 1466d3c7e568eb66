//! Exact arithmetic kernel: prime fields, dense matrices, Kronecker
//! products, rank, determinant, Pfaffian, and determinant degrees of
//! matrices over four-variable polynomials.

pub mod degree;
pub mod field;
pub mod linalg;
pub mod matrix;
pub mod quadpoly;

pub use degree::{
    det_polynomial, is_nonzero_poly_det, is_nonzero_poly_det_exact, total_degree_of_det, Degree, DegreeMode,
};
pub use field::{is_prime, FieldElem, PrimeField, DEFAULT_PRIME};
pub use linalg::{det, pfaffian, rank};
pub use matrix::{kron, kron_accumulate, FieldMatrix, Matrix, QuadPolyMatrix};
pub use quadpoly::{var, Exponents, QuadPoly};
