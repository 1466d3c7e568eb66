//! Sparse polynomials in the four indeterminates `t11, t12, t21, t22`.

use std::collections::BTreeMap;

use super::degree::Degree;
use super::field::{FieldElem, PrimeField};

/// Exponents of `(t11, t12, t21, t22)`.
pub type Exponents = [u64; 4];

/// Index of `t_{p,q}` (with `p, q` in `{1, 2}`) within an [`Exponents`] tuple.
pub const fn var(p: usize, q: usize) -> usize {
    (p - 1) * 2 + (q - 1)
}

/// Polynomial over `F_p` in four commuting variables.
///
/// Zero coefficients are never stored, so equality is structural.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QuadPoly {
    terms: BTreeMap<Exponents, FieldElem>,
}

impl QuadPoly {
    pub fn zero() -> Self {
        QuadPoly::default()
    }

    pub fn constant(c: FieldElem) -> Self {
        QuadPoly::monomial([0; 4], c)
    }

    pub fn monomial(exps: Exponents, c: FieldElem) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        QuadPoly { terms }
    }

    /// `t_{p,q}^e` with unit coefficient.
    pub fn power_of_var(p: usize, q: usize, e: u64) -> Self {
        let mut exps = [0; 4];
        exps[var(p, q)] = e;
        QuadPoly::monomial(exps, FieldElem::ONE)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &FieldElem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &Exponents) -> FieldElem {
        self.terms.get(exps).copied().unwrap_or(FieldElem::ZERO)
    }

    fn add_term(&mut self, exps: Exponents, c: FieldElem, field: PrimeField) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps).or_insert(FieldElem::ZERO);
        *entry = field.add(*entry, c);
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn add_assign(&mut self, other: &QuadPoly, field: PrimeField) {
        for (e, c) in &other.terms {
            self.add_term(*e, *c, field);
        }
    }

    pub fn add(&self, other: &QuadPoly, field: PrimeField) -> QuadPoly {
        let mut out = self.clone();
        out.add_assign(other, field);
        out
    }

    pub fn neg(&self, field: PrimeField) -> QuadPoly {
        QuadPoly { terms: self.terms.iter().map(|(e, c)| (*e, field.neg(*c))).collect() }
    }

    pub fn sub(&self, other: &QuadPoly, field: PrimeField) -> QuadPoly {
        self.add(&other.neg(field), field)
    }

    pub fn scale(&self, c: FieldElem, field: PrimeField) -> QuadPoly {
        if c.is_zero() {
            return QuadPoly::zero();
        }
        QuadPoly { terms: self.terms.iter().map(|(e, v)| (*e, field.mul(*v, c))).collect() }
    }

    pub fn mul(&self, other: &QuadPoly, field: PrimeField) -> QuadPoly {
        let mut out = QuadPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                out.add_term(e, field.mul(*ca, *cb), field);
            }
        }
        out
    }

    /// Total degree; [`Degree::MinusInfinity`] for the zero polynomial.
    pub fn total_degree(&self) -> Degree {
        self.terms
            .keys()
            .map(|e| Degree::Finite(e.iter().sum()))
            .max()
            .unwrap_or(Degree::MinusInfinity)
    }

    /// Largest exponent of variable index `v` (0 when the polynomial is zero).
    pub fn degree_in(&self, v: usize) -> u64 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    pub fn eval(&self, point: &[FieldElem; 4], field: PrimeField) -> FieldElem {
        self.terms.iter().fold(field.zero(), |acc, (e, c)| {
            let mut term = *c;
            for v in 0..4 {
                if e[v] > 0 {
                    term = field.mul(term, field.pow(point[v], e[v]));
                }
            }
            field.add(acc, term)
        })
    }

    /// True when every term has the same total degree.
    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u64>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_cancels_and_tracks_degree() {
        let f = PrimeField::new(101).unwrap();
        let t11 = QuadPoly::power_of_var(1, 1, 1);
        let t22 = QuadPoly::power_of_var(2, 2, 1);
        let prod = t11.mul(&t22, f);
        assert_eq!(prod.total_degree(), Degree::Finite(2));
        assert!(prod.sub(&prod, f).is_zero());
        assert_eq!(QuadPoly::zero().total_degree(), Degree::MinusInfinity);
        let sq = t11.add(&t22, f).mul(&t11.sub(&t22, f), f);
        // (t11 + t22)(t11 - t22) = t11^2 - t22^2
        assert_eq!(sq.num_terms(), 2);
        assert!(sq.is_homogeneous());
        let pt = [f.elem(3), f.elem(0), f.elem(0), f.elem(5)];
        assert_eq!(sq.eval(&pt, f), f.from_i64(9 - 25));
    }
}
