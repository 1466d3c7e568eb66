//! Black-box hitting set for `sum_i x_i A_i` with rank-two skew-symmetric `A_i`.
//!
//! Each element is a tuple `(T_1, ..., T_m)` of 2x2 matrices with
//! `T_i = V_i V_i^T` and `V_i = [[a^{w_i}, b^{w_i}], [c^{w_i}, d^{w_i}]]`, for
//! `w` in a weight family (made distinct) and `(a, b, c, d) ∈ S^4`,
//! `S = {0, 1, ..., 2nD}` where `D` is the largest distinct weight. If the
//! symbolic matrix has full non-commutative rank, some tuple makes
//! `sum_i T_i ⊗ A_i` nonsingular.
//!
//! The set is indexed: position `k` decodes to a family element (outermost)
//! and an odometer over `(a, b, c, d)` with `d` fastest.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{det, FieldMatrix, PrimeField};
use crate::error::HittingSetError;
use crate::instance::{blowup2_eval, Instance};
use crate::weights::{make_distinct, Family};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HittingTuple {
    /// Distinct weights the powers use.
    pub w: Vec<u64>,
    pub abcd: [u64; 4],
    #[serde(rename = "T")]
    pub t: Vec<[[u64; 2]; 2]>,
    pub prime: u64,
}

impl HittingTuple {
    pub fn new(w: &[u64], abcd: [u64; 4], field: PrimeField) -> Self {
        let t = w
            .iter()
            .map(|&wi| {
                let [a, b, c, d] = abcd.map(|x| field.pow(field.elem(x), wi));
                let dot = |x: [_; 2], y: [_; 2]| field.add(field.mul(x[0], y[0]), field.mul(x[1], y[1]));
                let (r0, r1) = ([a, b], [c, d]);
                [[dot(r0, r0).value(), dot(r0, r1).value()], [dot(r1, r0).value(), dot(r1, r1).value()]]
            })
            .collect();
        HittingTuple { w: w.to_vec(), abcd, t, prime: field.modulus() }
    }

    pub fn blocks(&self, field: PrimeField) -> Vec<FieldMatrix> {
        self.t
            .iter()
            .map(|b| FieldMatrix::from_fn(2, 2, |r, c| field.elem(b[r][c])))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct HittingSet {
    family: Family,
    n: usize,
    field: PrimeField,
    s_size: u64,
    len: u128,
}

impl HittingSet {
    pub fn new(n: usize, family: Family, field: PrimeField) -> Result<Self, HittingSetError> {
        let m = family.m() as u64;
        let d = m * m * family.max_weight() + m;
        let s_size = 2 * n as u64 * d + 1;
        if s_size > field.modulus() {
            return Err(HittingSetError::FieldTooSmall { needed: s_size, modulus: field.modulus() });
        }
        let len = (s_size as u128)
            .checked_pow(4)
            .and_then(|s4| s4.checked_mul(family.len() as u128))
            .ok_or(HittingSetError::TooLarge)?;
        Ok(HittingSet { family, n, field, s_size, len })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// `|S| = 2nD + 1`.
    pub fn s_size(&self) -> u64 {
        self.s_size
    }

    pub fn len(&self) -> u128 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, index: u128) -> Option<HittingTuple> {
        if index >= self.len {
            return None;
        }
        let s = self.s_size as u128;
        let per_w = s.pow(4);
        let w = make_distinct(&self.family.get((index / per_w) as u64)?);
        let mut code = index % per_w;
        let mut abcd = [0u64; 4];
        for slot in abcd.iter_mut().rev() {
            *slot = (code % s) as u64;
            code /= s;
        }
        Some(HittingTuple::new(&w.values, abcd, self.field))
    }

    pub fn iter(&self) -> impl Iterator<Item = HittingTuple> + '_ {
        (0..self.len).map(move |i| self.get(i).expect("index in range"))
    }
}

/// Whether `det(sum_i T_i ⊗ A_i) != 0`.
pub fn is_witness(inst: &Instance, tuple: &HittingTuple) -> bool {
    let f = inst.field();
    let m = blowup2_eval(inst, &tuple.blocks(f)).expect("tuple sized for the instance");
    !det(&m, f).expect("square").is_zero()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum WitnessSearch {
    Witness { index: u128, tuple: HittingTuple },
    /// The whole set was searched.
    NoWitness { searched: u128 },
    /// The budget ran out first.
    Indeterminate { searched: u128 },
}

/// First witness in set order among the first `budget` tuples (all of them
/// when `budget` is `None`). Parallel mode searches chunks concurrently and
/// still reports the minimum index.
pub fn find_witness(
    inst: &Instance,
    set: &HittingSet,
    budget: Option<u128>,
    parallel: bool,
) -> Result<WitnessSearch, HittingSetError> {
    if inst.m() != set.family.m() {
        return Err(HittingSetError::LineCountMismatch { expected: set.family.m(), got: inst.m() });
    }
    let limit = budget.map_or(set.len, |b| b.min(set.len));
    let hit = |i: u128| {
        let t = set.get(i).expect("index in range");
        is_witness(inst, &t).then_some((i, t))
    };
    let found = if parallel {
        const CHUNK: u128 = 1 << 14;
        let mut start = 0;
        let mut found = None;
        while start < limit && found.is_none() {
            let end = (start + CHUNK).min(limit);
            found = (0..(end - start) as u64).into_par_iter().find_map_first(|o| hit(start + o as u128));
            start = end;
        }
        found
    } else {
        (0..limit).find_map(hit)
    };
    Ok(match found {
        Some((index, tuple)) => WitnessSearch::Witness { index, tuple },
        None if limit == set.len => WitnessSearch::NoWitness { searched: limit },
        None => WitnessSearch::Indeterminate { searched: limit },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> PrimeField {
        PrimeField::default()
    }

    #[test]
    fn tuple_examples() {
        let t = HittingTuple::new(&[1], [1, 0, 0, 1], f());
        assert_eq!(t.t, vec![[[1, 0], [0, 1]]]);
        let f101 = PrimeField::new(101).unwrap();
        let t = HittingTuple::new(&[2], [2, 0, 0, 3], f101);
        assert_eq!(t.t, vec![[[16, 0], [0, 81]]]);
    }

    #[test]
    fn cardinality_and_order() {
        let family = Family::explicit(1, vec![vec![1]]).unwrap();
        // m = 1: distinct weights (2), D = 2, |S| = 2*1*2 + 1 = 5.
        let hs = HittingSet::new(1, family, f()).unwrap();
        assert_eq!(hs.s_size(), 5);
        assert_eq!(hs.len(), 625);
        assert_eq!(hs.get(0).unwrap().abcd, [0, 0, 0, 0]);
        assert_eq!(hs.get(1).unwrap().abcd, [0, 0, 0, 1]);
        assert_eq!(hs.get(5).unwrap().abcd, [0, 0, 1, 0]);
        assert_eq!(hs.get(624).unwrap().abcd, [4, 4, 4, 4]);
        assert!(hs.get(625).is_none());
        assert_eq!(hs.iter().count(), 625);
    }

    #[test]
    fn small_field_is_rejected() {
        let family = Family::brute(2, 3).unwrap();
        assert!(matches!(
            HittingSet::new(4, family, PrimeField::new(101).unwrap()),
            Err(HittingSetError::FieldTooSmall { .. })
        ));
    }

    #[test]
    fn witness_examples() {
        let line = Instance::from_i64(f(), 2, &[(vec![1, 0], vec![0, 1])]).unwrap();
        let hs = HittingSet::new(2, Family::brute(1, 1).unwrap(), f()).unwrap();
        let WitnessSearch::Witness { tuple, .. } = find_witness(&line, &hs, None, false).unwrap() else { panic!() };
        assert!(is_witness(&line, &tuple));

        let triangle = Instance::from_i64(
            f(),
            3,
            &[(vec![1, 0, 0], vec![0, 1, 0]), (vec![0, 1, 0], vec![0, 0, 1]), (vec![1, 0, 0], vec![0, 0, 1])],
        )
        .unwrap();
        let hs = HittingSet::new(3, Family::brute(3, 1).unwrap(), f()).unwrap();
        let seq = find_witness(&triangle, &hs, None, false).unwrap();
        let par = find_witness(&triangle, &hs, None, true).unwrap();
        assert!(matches!(seq, WitnessSearch::Witness { .. }));
        assert_eq!(seq, par);
    }

    #[test]
    fn deficient_instance_has_no_witness() {
        // One line in F^3 cannot reach full rank.
        let inst = Instance::from_i64(f(), 3, &[(vec![1, 0, 0], vec![0, 1, 0])]).unwrap();
        let hs = HittingSet::new(3, Family::explicit(1, vec![vec![1]]).unwrap(), f()).unwrap();
        assert_eq!(find_witness(&inst, &hs, None, true).unwrap(), WitnessSearch::NoWitness { searched: hs.len() });
        assert_eq!(
            find_witness(&inst, &hs, Some(10), false).unwrap(),
            WitnessSearch::Indeterminate { searched: 10 }
        );
    }
}
