//! Prime fields `F_p` with a modulus chosen at run time.
//!
//! Elements are plain residues; every operation goes through the
//! [`PrimeField`] context that owns the modulus. Residues are kept below
//! 2^63 so that products fit comfortably in `u128`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;

/// Default modulus `15 * 2^27 + 1`, a prime just below 2^31.
pub const DEFAULT_PRIME: u64 = 2_013_265_921;

/// A residue modulo the prime of some [`PrimeField`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElem(u64);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    /// The residue as an integer in `0..p`.
    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The field of residues modulo a prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    p: u64,
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: DEFAULT_PRIME }
    }
}

impl TryFrom<u64> for PrimeField {
    type Error = AlgebraError;

    fn try_from(p: u64) -> Result<Self, Self::Error> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.p
    }
}

impl PrimeField {
    /// Builds the field, rejecting composite moduli and moduli of 2^63 or more.
    pub fn new(p: u64) -> Result<Self, AlgebraError> {
        if p >= 1 << 63 || !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    pub fn zero(self) -> FieldElem {
        FieldElem(0)
    }

    pub fn one(self) -> FieldElem {
        FieldElem(1)
    }

    /// Reduces an unsigned integer.
    pub fn elem(self, v: u64) -> FieldElem {
        FieldElem(v % self.p)
    }

    /// Reduces a signed integer into `0..p`.
    pub fn from_i64(self, v: i64) -> FieldElem {
        let r = (v as i128).rem_euclid(self.p as i128);
        FieldElem(r as u64)
    }

    /// Symmetric representative in `(-p/2, p/2]`, handy for printing.
    pub fn to_i64(self, a: FieldElem) -> i64 {
        if a.0 > self.p / 2 {
            a.0 as i64 - self.p as i64
        } else {
            a.0 as i64
        }
    }

    pub fn add(self, a: FieldElem, b: FieldElem) -> FieldElem {
        let s = a.0 + b.0;
        FieldElem(if s >= self.p { s - self.p } else { s })
    }

    pub fn sub(self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.p - b.0 })
    }

    pub fn neg(self, a: FieldElem) -> FieldElem {
        if a.0 == 0 {
            a
        } else {
            FieldElem(self.p - a.0)
        }
    }

    pub fn mul(self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(((a.0 as u128 * b.0 as u128) % self.p as u128) as u64)
    }

    pub fn pow(self, a: FieldElem, mut e: u64) -> FieldElem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: FieldElem) -> Option<FieldElem> {
        if a.is_zero() {
            None
        } else {
            Some(self.pow(a, self.p - 2))
        }
    }

    /// Division by a nonzero element.
    ///
    /// # Panics
    /// Panics if `b` is zero.
    pub fn div(self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.mul(a, self.inv(b).expect("division by zero in prime field"))
    }

    /// A uniformly random element.
    pub fn random<R: Rng + ?Sized>(self, rng: &mut R) -> FieldElem {
        FieldElem(rng.gen_range(0..self.p))
    }

    /// A uniformly random nonzero element.
    pub fn random_nonzero<R: Rng + ?Sized>(self, rng: &mut R) -> FieldElem {
        FieldElem(rng.gen_range(1..self.p))
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &WITNESSES {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
