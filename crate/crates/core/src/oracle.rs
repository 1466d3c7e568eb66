//! Brute-force description of the fractional linear matroid matching polytope.
//!
//! `P` is cut out by `y >= 0` and, for every flat `S` of the ground vectors
//! `E = {a_1, b_1, ..., a_m, b_m}`,
//!
//! ```text
//! sum_i y_i * dim(span(S) ∩ l_i) <= dim span(S).
//! ```
//!
//! Vertices of `P` are half-integral, so optimizing a linear function over
//! `P` reduces to scanning `{0, 1/2, 1}^m`. Everything here is exponential and
//! guarded accordingly.

use serde::Serialize;

use crate::algebra::{FieldElem, PrimeField};
use crate::error::GuardError;
use crate::instance::{HalfIntegralVector, Instance};
use crate::lattice::ConstraintMatrix;

/// Largest ground set (`2m`) for which flats are enumerated.
pub const MAX_GROUND: usize = 16;
/// Largest `m` for which `{0, 1/2, 1}^m` is scanned.
pub const MAX_LINES: usize = 10;

/// Incrementally maintained row-echelon basis of a subspace of `F_p^n`.
#[derive(Clone, Debug)]
pub struct Span {
    field: PrimeField,
    /// Rows with distinct pivot columns, each normalized to pivot 1.
    rows: Vec<(usize, Vec<FieldElem>)>,
}

impl Span {
    pub fn new(field: PrimeField) -> Self {
        Span { field, rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        let f = self.field;
        let mut r = v.to_vec();
        for (piv, row) in &self.rows {
            let c = r[*piv];
            if !c.is_zero() {
                for (x, y) in r.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, *y));
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[FieldElem]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[FieldElem]) -> bool {
        let f = self.field;
        let mut r = self.reduce(v);
        let Some(piv) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = f.inv(r[piv]).expect("nonzero pivot");
        for x in r.iter_mut() {
            *x = f.mul(*x, inv);
        }
        for (_, row) in self.rows.iter_mut() {
            let c = row[piv];
            if !c.is_zero() {
                for (x, y) in row.iter_mut().zip(&r) {
                    *x = f.sub(*x, f.mul(c, *y));
                }
            }
        }
        self.rows.push((piv, r));
        true
    }
}

/// A flat: a subset of the ground vectors closed under span within them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Flat {
    mask: u32,
    dim: usize,
}

impl Flat {
    /// Bit `j` set iff ground vector `j` belongs to the flat.
    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, j: usize) -> bool {
        self.mask >> j & 1 == 1
    }

    pub fn members(&self) -> Vec<usize> {
        (0..32).filter(|&j| self.contains(j)).collect()
    }
}

fn span_of(vectors: &[&[FieldElem]], mask: u32, field: PrimeField) -> Span {
    let mut s = Span::new(field);
    for (j, v) in vectors.iter().enumerate() {
        if mask >> j & 1 == 1 {
            s.insert(v);
        }
    }
    s
}

fn closure(vectors: &[&[FieldElem]], mask: u32, field: PrimeField) -> Flat {
    let s = span_of(vectors, mask, field);
    let mut closed = 0u32;
    for (j, v) in vectors.iter().enumerate() {
        if s.contains(v) {
            closed |= 1 << j;
        }
    }
    Flat { mask: closed, dim: s.dim() }
}

/// All flats of an arbitrary vector family, sorted by mask.
///
/// Every flat other than `cl(∅)` covers some smaller flat, so a breadth-first
/// search over single-element extensions reaches all of them.
pub fn enumerate_flats_of(vectors: &[&[FieldElem]], field: PrimeField) -> Result<Vec<Flat>, GuardError> {
    if vectors.len() > MAX_GROUND {
        return Err(GuardError::Exceeded { what: "ground set size 2m", got: vectors.len(), limit: MAX_GROUND });
    }
    let mut seen = std::collections::BTreeSet::new();
    let start = closure(vectors, 0, field);
    let mut queue = std::collections::VecDeque::from([start.clone()]);
    seen.insert(start);
    while let Some(flat) = queue.pop_front() {
        for j in 0..vectors.len() {
            if flat.contains(j) {
                continue;
            }
            let next = closure(vectors, flat.mask | 1 << j, field);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<Flat> = seen.into_iter().collect();
    out.sort_by_key(|f| f.mask);
    Ok(out)
}

/// All flats of the instance's ground vectors `a_1, b_1, ..., a_m, b_m`.
pub fn enumerate_flats(inst: &Instance) -> Result<Vec<Flat>, GuardError> {
    enumerate_flats_of(&inst.ground_vectors(), inst.field())
}

/// `dim(span(S) ∩ l_i) = dim S + 2 - dim(S + l_i)`.
pub fn dim_intersection(inst: &Instance, flat: &Flat, i: usize) -> usize {
    let vectors = inst.ground_vectors();
    let mut s = span_of(&vectors, flat.mask, inst.field());
    let before = s.dim();
    s.insert(&inst.lines()[i].a);
    s.insert(&inst.lines()[i].b);
    before + 2 - s.dim()
}

/// `sum_i coeffs[i] * y_i <= rhs` for one flat.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Inequality {
    pub coeffs: Vec<u8>,
    pub rhs: usize,
}

impl Inequality {
    /// `2 * sum_i coeffs[i] * y_i`.
    pub fn lhs_doubled(&self, y: &HalfIntegralVector) -> usize {
        self.coeffs.iter().zip(y.as_doubled()).map(|(&c, &d)| c as usize * d as usize).sum()
    }

    pub fn holds(&self, y: &HalfIntegralVector) -> bool {
        self.lhs_doubled(y) <= 2 * self.rhs
    }

    pub fn is_tight(&self, y: &HalfIntegralVector) -> bool {
        self.lhs_doubled(y) == 2 * self.rhs
    }
}

/// The flat inequalities of an instance, computed once.
#[derive(Clone, Debug)]
pub struct Polytope {
    m: usize,
    n: usize,
    flats: Vec<Flat>,
    inequalities: Vec<Inequality>,
}

impl Polytope {
    pub fn new(inst: &Instance) -> Result<Self, GuardError> {
        let flats = enumerate_flats(inst)?;
        let inequalities = flats
            .iter()
            .map(|fl| Inequality {
                coeffs: (0..inst.m()).map(|i| dim_intersection(inst, fl, i) as u8).collect(),
                rhs: fl.dim(),
            })
            .collect();
        Ok(Polytope { m: inst.m(), n: inst.n(), flats, inequalities })
    }

    pub fn flats(&self) -> &[Flat] {
        &self.flats
    }

    pub fn inequalities(&self) -> &[Inequality] {
        &self.inequalities
    }

    pub fn is_feasible(&self, y: &HalfIntegralVector) -> bool {
        y.len() == self.m && self.inequalities.iter().all(|q| q.holds(y))
    }

    /// Every feasible point of `{0, 1/2, 1}^m`.
    pub fn feasible_points(&self) -> Result<Vec<HalfIntegralVector>, GuardError> {
        guard_lines(self.m)?;
        Ok(HalfIntegralVector::all(self.m).filter(|y| self.is_feasible(y)).collect())
    }

    /// Maximizers of `w · y` over `P` (`w = 1` when absent).
    pub fn maximize(&self, w: Option<&[u64]>) -> Result<Optimum, GuardError> {
        let pts = self.feasible_points()?;
        Ok(best_of(pts, w, self.m))
    }

    /// Maximizers of `w · y` over the perfect face `|y| = n/2`; `None` when
    /// that face is empty.
    pub fn maximize_perfect(&self, w: Option<&[u64]>) -> Result<Option<Optimum>, GuardError> {
        let pts: Vec<_> =
            self.feasible_points()?.into_iter().filter(|y| y.size_doubled() == self.n as u64).collect();
        if pts.is_empty() {
            return Ok(None);
        }
        Ok(Some(best_of(pts, w, self.m)))
    }
}

fn guard_lines(m: usize) -> Result<(), GuardError> {
    if m > MAX_LINES {
        return Err(GuardError::Exceeded { what: "number of lines m", got: m, limit: MAX_LINES });
    }
    Ok(())
}

fn best_of(points: Vec<HalfIntegralVector>, w: Option<&[u64]>, m: usize) -> Optimum {
    let ones = vec![1u64; m];
    let w = w.unwrap_or(&ones);
    let mut best = 0u128;
    let mut maximizers = Vec::new();
    for y in points {
        let v = y.weight_doubled(w);
        if maximizers.is_empty() || v > best {
            best = v;
            maximizers.clear();
            maximizers.push(y);
        } else if v == best {
            maximizers.push(y);
        }
    }
    Optimum { value_doubled: best, maximizers }
}

/// Optimal value (doubled) and every half-integral maximizer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Optimum {
    pub value_doubled: u128,
    pub maximizers: Vec<HalfIntegralVector>,
}

impl Optimum {
    pub fn is_unique(&self) -> bool {
        self.maximizers.len() == 1
    }
}

pub fn is_feasible(inst: &Instance, y: &HalfIntegralVector) -> Result<bool, GuardError> {
    Ok(Polytope::new(inst)?.is_feasible(y))
}

/// Maximum of `w · y` over `P`, with all maximizers.
pub fn max_matching(inst: &Instance, w: Option<&[u64]>) -> Result<Optimum, GuardError> {
    Polytope::new(inst)?.maximize(w)
}

/// Maximum of `w · y` over perfect fractional matchings.
pub fn max_perfect_matching(inst: &Instance, w: Option<&[u64]>) -> Result<Option<Optimum>, GuardError> {
    Polytope::new(inst)?.maximize_perfect(w)
}

/// Whether `w` has a unique maximizer over `P`.
pub fn is_isolating(inst: &Instance, w: &[u64]) -> Result<bool, GuardError> {
    Ok(max_matching(inst, Some(w))?.is_unique())
}

/// Whether `w` has a unique maximizer over the perfect face (false when the
/// face is empty).
pub fn isolates_perfect_face(inst: &Instance, w: &[u64]) -> Result<bool, GuardError> {
    Ok(max_perfect_matching(inst, Some(w))?.is_some_and(|o| o.is_unique()))
}

/// Equalities describing the `w`-optimal face of `P`.
///
/// `rows[k] · y = rhs[k]` are the flat inequalities tight on every maximizer
/// (the empty flat is skipped), and `zero_set` lists the coordinates that
/// vanish on every maximizer. Together with `P` they cut out exactly the
/// optimal face.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceSystem {
    pub rows: Vec<Vec<u8>>,
    pub rhs: Vec<usize>,
    pub zero_set: Vec<usize>,
}

impl FaceSystem {
    pub fn satisfied_by(&self, y: &HalfIntegralVector) -> bool {
        self.rows.iter().zip(&self.rhs).all(|(row, &b)| {
            row.iter().zip(y.as_doubled()).map(|(&c, &d)| c as usize * d as usize).sum::<usize>() == 2 * b
        }) && self.zero_set.iter().all(|&i| y.doubled(i) == 0)
    }

    /// The rows as a lattice constraint matrix, when every column happens to
    /// sum to two.
    pub fn to_constraint_matrix(&self, m: usize) -> Option<ConstraintMatrix> {
        let rows: Vec<Vec<i64>> = self.rows.iter().map(|r| r.iter().map(|&c| c as i64).collect()).collect();
        ConstraintMatrix::new(rows, m).ok()
    }
}

pub fn face_system(inst: &Instance, w: &[u64]) -> Result<FaceSystem, GuardError> {
    let poly = Polytope::new(inst)?;
    let opt = poly.maximize(Some(w))?;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for q in poly.inequalities() {
        if q.rhs == 0 && q.coeffs.iter().all(|&c| c == 0) {
            continue;
        }
        if opt.maximizers.iter().all(|y| q.is_tight(y)) {
            rows.push(q.coeffs.clone());
            rhs.push(q.rhs);
        }
    }
    let zero_set = (0..inst.m()).filter(|&i| opt.maximizers.iter().all(|y| y.doubled(i) == 0)).collect();
    Ok(FaceSystem { rows, rhs, zero_set })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FieldMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f() -> PrimeField {
        PrimeField::default()
    }

    fn hv(d: &[u8]) -> HalfIntegralVector {
        HalfIntegralVector::from_doubled(d.to_vec()).unwrap()
    }

    fn single_line() -> Instance {
        Instance::from_i64(f(), 2, &[(vec![1, 0], vec![0, 1])]).unwrap()
    }

    fn triangle() -> Instance {
        Instance::from_i64(
            f(),
            3,
            &[(vec![1, 0, 0], vec![0, 1, 0]), (vec![0, 1, 0], vec![0, 0, 1]), (vec![1, 0, 0], vec![0, 0, 1])],
        )
        .unwrap()
    }

    fn two_disjoint() -> Instance {
        // Two copies of each of two complementary lines in F^4.
        Instance::from_i64(
            f(),
            4,
            &[
                (vec![1, 0, 0, 0], vec![0, 1, 0, 0]),
                (vec![0, 0, 1, 0], vec![0, 0, 0, 1]),
                (vec![1, 0, 0, 0], vec![0, 1, 0, 0]),
                (vec![0, 0, 1, 0], vec![0, 0, 0, 1]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn single_line_flats() {
        let flats = enumerate_flats(&single_line()).unwrap();
        let masks: Vec<u32> = flats.iter().map(Flat::mask).collect();
        assert_eq!(masks, vec![0b00, 0b01, 0b10, 0b11]);
    }

    #[test]
    fn parallel_vectors_give_two_flats() {
        let f = f();
        let v: Vec<FieldElem> = vec![f.one(), f.elem(2)];
        let w: Vec<FieldElem> = vec![f.elem(3), f.elem(6)];
        let flats = enumerate_flats_of(&[&v, &w, &v], f).unwrap();
        assert_eq!(flats.len(), 2);
    }

    #[test]
    fn triangle_flats_contain_coordinate_and_pair_spans() {
        let flats = enumerate_flats(&triangle()).unwrap();
        // Ground order: a1=e1, b1=e2, a2=e2, b2=e3, a3=e1, b3=e3.
        let e1 = 0b010001;
        let e12 = 0b010111;
        assert!(flats.iter().any(|fl| fl.mask() == e1 && fl.dim() == 1));
        assert!(flats.iter().any(|fl| fl.mask() == e12 && fl.dim() == 2));
        assert_eq!(flats.iter().filter(|fl| fl.dim() == 1).count(), 3);
        assert_eq!(flats.iter().filter(|fl| fl.dim() == 2).count(), 3);
    }

    #[test]
    fn dim_intersection_examples() {
        let inst = triangle();
        let flats = enumerate_flats(&inst).unwrap();
        let empty = &flats[0];
        assert_eq!(dim_intersection(&inst, empty, 0), 0);
        let e1 = flats.iter().find(|fl| fl.mask() == 0b010001).unwrap();
        assert_eq!(dim_intersection(&inst, e1, 0), 1);
        let all = flats.last().unwrap();
        assert_eq!(dim_intersection(&inst, all, 2), 2);
    }

    #[test]
    fn feasibility_examples() {
        let inst = triangle();
        assert!(is_feasible(&inst, &hv(&[0, 0, 0])).unwrap());
        assert!(is_feasible(&inst, &hv(&[1, 1, 1])).unwrap());
        assert!(!is_feasible(&inst, &hv(&[2, 2, 0])).unwrap());
    }

    #[test]
    fn max_matching_examples() {
        let o = max_matching(&single_line(), None).unwrap();
        assert_eq!(o.value_doubled, 2);
        assert_eq!(o.maximizers, vec![hv(&[2])]);

        let o = max_matching(&triangle(), None).unwrap();
        assert_eq!(o.value_doubled, 3);
        assert_eq!(o.maximizers, vec![hv(&[1, 1, 1])]);

        let odd = Instance::from_i64(f(), 3, &[(vec![1, 0, 0], vec![0, 1, 0]), (vec![1, 0, 0], vec![0, 0, 1])]).unwrap();
        assert!(max_matching(&odd, None).unwrap().value_doubled < 3);
        assert!(max_perfect_matching(&odd, None).unwrap().is_none());
    }

    #[test]
    fn isolation_examples() {
        assert!(is_isolating(&single_line(), &[4]).unwrap());
        assert!(is_isolating(&triangle(), &[1, 1, 1]).unwrap());
        assert!(!is_isolating(&two_disjoint(), &[1, 1, 1, 1]).unwrap());
        assert!(is_isolating(&two_disjoint(), &[1, 2, 3, 1]).unwrap());
        assert!(isolates_perfect_face(&two_disjoint(), &[2, 1, 1, 3]).unwrap());
    }

    #[test]
    fn guards() {
        let f = f();
        let lines: Vec<(Vec<i64>, Vec<i64>)> = (0..9).map(|_| (vec![1, 0], vec![0, 1])).collect();
        let inst = Instance::from_i64(f, 2, &lines).unwrap();
        assert!(matches!(max_matching(&inst, None), Err(GuardError::Exceeded { .. })));
    }

    #[test]
    fn face_system_cuts_out_optimal_face() {
        for (inst, w) in [
            (triangle(), vec![1u64, 1, 1]),
            (two_disjoint(), vec![1, 1, 1, 1]),
            (two_disjoint(), vec![3, 1, 1, 2]),
            (single_line(), vec![1]),
        ] {
            let poly = Polytope::new(&inst).unwrap();
            let opt = poly.maximize(Some(&w)).unwrap();
            let sys = face_system(&inst, &w).unwrap();
            let on_face: Vec<_> =
                poly.feasible_points().unwrap().into_iter().filter(|y| sys.satisfied_by(y)).collect();
            assert_eq!(on_face, opt.maximizers);
            for row in &sys.rows {
                assert!(row.iter().all(|&c| c <= 2));
            }
        }
    }

    #[test]
    fn value_invariant_under_relabeling_and_basis_change() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = f();
        let inst = triangle();
        let base = max_matching(&inst, None).unwrap().value_doubled;
        assert_eq!(max_matching(&inst.permuted(&[2, 0, 1]), None).unwrap().value_doubled, base);
        let g = loop {
            let g = FieldMatrix::random(f, 3, 3, &mut rng);
            if crate::algebra::rank(&g, f) == 3 {
                break g;
            }
        };
        assert_eq!(max_matching(&inst.transformed(&g).unwrap(), None).unwrap().value_doubled, base);
    }
}
