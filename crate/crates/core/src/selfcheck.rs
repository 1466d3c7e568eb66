//! Runtime self-check: the nine acceptance properties, evaluated against the
//! brute-force oracle on seeded corpora.
//!
//! `Scale::Small` runs a reduced corpus in seconds; `Scale::Full` runs the
//! sizes the acceptance suite requires. A [`Faults`] value injects known
//! defects so that the harness itself can be tested.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{
    det, pfaffian, total_degree_of_det, Degree, DegreeMode, FieldElem, FieldMatrix, PrimeField, QuadPoly,
    QuadPolyMatrix,
};
use crate::corpus::{self, Entry};
use crate::hitting_set::{find_witness, is_witness, HittingSet, WitnessSearch};
use crate::instance::{ncrank_estimate, pfaffian_expansion_sides_with, HalfIntegralVector, Instance};
use crate::lattice::{
    circuit_vectors, decompose, is_conformal, l1, lambda, near_shortest, ConstraintMatrix, Decomposition, Lambda,
};
use crate::oracle::Polytope;
use crate::solver::{degree_probe, probe_rng, solve, Outcome, SolveConfig};
use crate::weights::{make_distinct, Family, DEFAULT_BRUTE_K, DEFAULT_GTV_Q, DEFAULT_GTV_T};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Small,
    Full,
}

/// Deliberate defects for testing the harness.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Faults {
    /// Adds one to every Pfaffian the checks compute.
    pub corrupt_pfaffian: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    /// Number of cases checked.
    pub cases: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub scale: Scale,
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

struct Ctx {
    scale: Scale,
    seed: u64,
    faults: Faults,
    field: PrimeField,
}

impl Ctx {
    fn pick(&self, small: usize, full: usize) -> usize {
        match self.scale {
            Scale::Small => small,
            Scale::Full => full,
        }
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    fn pfaffian(&self, m: &FieldMatrix) -> FieldElem {
        let pf = pfaffian(m, self.field).expect("square input");
        if self.faults.corrupt_pfaffian {
            self.field.add(pf, self.field.one())
        } else {
            pf
        }
    }
}

fn result(id: u8, name: &'static str, cases: usize, failures: Vec<String>, needed: usize) -> CriterionResult {
    let passed = failures.is_empty() && cases >= needed;
    let detail = if let Some(first) = failures.first() {
        format!("{} of {cases} failed; first: {first}", failures.len())
    } else if cases < needed {
        format!("only {cases} cases, need {needed}")
    } else {
        format!("{cases} cases")
    };
    CriterionResult { id, name, passed, cases, detail }
}

/// Every desk corpus instance paired with its oracle polytope.
fn classified(field: PrimeField, seed: u64) -> Vec<(Entry, Polytope)> {
    corpus::desk_corpus(field, seed)
        .into_iter()
        .map(|e| {
            let p = Polytope::new(&e.instance).expect("desk corpus is within guards");
            (e, p)
        })
        .collect()
}

fn has_perfect(p: &Polytope) -> bool {
    p.maximize_perfect(None).expect("within guards").is_some()
}

/// Thins `items` to roughly `keep` evenly spaced elements.
fn thin<T>(items: Vec<T>, keep: usize) -> Vec<T> {
    let step = items.len().div_ceil(keep.max(1)).max(1);
    items.into_iter().step_by(step).collect()
}

fn rank_identity(ctx: &Ctx) -> CriterionResult {
    let count = ctx.pick(20, 120);
    let cases: Vec<Instance> = (0..count as u64)
        .map(|k| {
            let m = 1 + (k % 5) as usize;
            let n = 2 + (k / 5 % 5) as usize;
            if k % 4 == 3 {
                corpus::intersection(ctx.field, m, n.div_ceil(2).min(3), 1, ctx.seed + k)
            } else {
                corpus::random(ctx.field, m, n, 1 + (k % 2) as i64, ctx.seed + k)
            }
        })
        .collect();
    let failures: Vec<String> = cases
        .par_iter()
        .enumerate()
        .filter_map(|(k, inst)| {
            let mut rng = ctx.rng(100 + k as u64);
            let nr = ncrank_estimate(inst, 3, &mut rng);
            let oracle = match Polytope::new(inst).and_then(|p| p.maximize(None)) {
                Ok(opt) => opt.value_doubled,
                Err(e) => return Some(format!("case {k}: {e}")),
            };
            (nr as u128 != oracle).then(|| format!("case {k}: rank/2 = {nr}, oracle 2|y| = {oracle}"))
        })
        .collect();
    result(1, "rank identity", cases.len(), failures, ctx.pick(20, 100))
}

fn end_to_end(ctx: &Ctx, corpus: &[(Entry, Polytope)]) -> CriterionResult {
    let (with, without): (Vec<_>, Vec<_>) = corpus.iter().partition(|(_, p)| has_perfect(p));
    let with = thin(with, ctx.pick(12, usize::MAX));
    let without = thin(without, ctx.pick(6, usize::MAX));
    let config = SolveConfig { seed: ctx.seed, ..SolveConfig::default() };
    let run = |(e, p): &&(Entry, Polytope), expect: bool| -> Option<String> {
        let inst = &e.instance;
        let family = default_family(inst.m());
        let report = solve(inst, &family, &config);
        match (expect, report.outcome, &report.y) {
            (true, Outcome::Matching, Some(y)) if p.is_feasible(y) && y.size_doubled() == inst.n() as u64 => None,
            (false, Outcome::None, _) => None,
            _ => Some(format!("{}: expected matching = {expect}, got {:?} {:?}", e.name, report.outcome, report.y)),
        }
    };
    let mut failures: Vec<String> = with.par_iter().filter_map(|c| run(c, true)).collect();
    failures.par_extend(without.par_iter().filter_map(|c| run(c, false)));
    let cases = with.len() + without.len();
    let needed = if with.len() >= ctx.pick(10, 50) && without.len() >= ctx.pick(5, 20) { 0 } else { usize::MAX };
    result(2, "end-to-end solver", cases, failures, needed)
}

/// The family the solver uses by default for `m` lines.
pub fn default_family(m: usize) -> Family {
    if m == 0 {
        Family::explicit(0, vec![vec![]]).expect("empty assignment")
    } else {
        Family::gtv(m, DEFAULT_GTV_T, DEFAULT_GTV_Q).expect("default parameters fit the cap")
    }
}

fn degree_law(ctx: &Ctx, corpus: &[(Entry, Polytope)]) -> CriterionResult {
    let per_instance = ctx.pick(1, 2);
    let mut pairs = Vec::new();
    for (e, p) in corpus.iter().filter(|(e, p)| e.instance.m() > 0 && has_perfect(p)) {
        let family = Family::brute(e.instance.m(), DEFAULT_BRUTE_K).expect("small family");
        let isolating = family
            .iter()
            .map(|w| make_distinct(&w).values)
            .filter(|w| p.maximize_perfect(Some(w)).expect("within guards").expect("perfect").is_unique())
            .take(per_instance);
        pairs.extend(isolating.map(|w| (e, p, w)));
    }
    let pairs = thin(pairs, ctx.pick(25, usize::MAX));
    let failures: Vec<String> = pairs
        .par_iter()
        .enumerate()
        .filter_map(|(k, (e, p, w))| {
            let opt = p.maximize_perfect(Some(w)).expect("within guards").expect("perfect").value_doubled;
            let mut rng = probe_rng(ctx.seed, k as u64, 0);
            let got = match degree_probe(&e.instance, w, 3, &mut rng) {
                Ok(d) => d,
                Err(err) => return Some(format!("{}: {err}", e.name)),
            };
            (got != Degree::Finite(4 * opt as u64))
                .then(|| format!("{} w = {w:?}: degree {got}, expected {}", e.name, 4 * opt))
        })
        .collect();
    result(3, "degree law", pairs.len(), failures, ctx.pick(20, 20))
}

fn pfaffian_expansion(ctx: &Ctx, corpus: &[(Entry, Polytope)]) -> CriterionResult {
    let trials = ctx.pick(3, 20);
    let insts: Vec<&Instance> =
        corpus.iter().map(|(e, _)| &e.instance).filter(|i| i.m() <= 3 && i.n() <= 4).collect();
    let insts = thin(insts, ctx.pick(15, usize::MAX));
    let failures: Vec<String> = insts
        .par_iter()
        .enumerate()
        .flat_map_iter(|(k, inst)| {
            let mut rng = ctx.rng(400 + k as u64);
            let mut out = Vec::new();
            for y in HalfIntegralVector::all(inst.m()) {
                for _ in 0..trials {
                    let (lhs, rhs) = pfaffian_expansion_sides_with(inst, &y, &mut rng, |m, _| Ok(ctx.pfaffian(m)))
                        .expect("sizes match");
                    if lhs != rhs {
                        out.push(format!("instance {k}, y = {y}"));
                        break;
                    }
                }
            }
            out
        })
        .collect();
    let cases = insts.iter().map(|i| 3usize.pow(i.m() as u32)).sum();
    result(4, "pfaffian expansion", cases, failures, 1)
}

fn algorithm1(ctx: &Ctx) -> CriterionResult {
    let mut rng = ctx.rng(500);
    let want_in = ctx.pick(40, 220);
    let want_out = ctx.pick(20, 110);
    let mut failures = Vec::new();
    let (mut n_in, mut n_out) = (0, 0);
    while n_in < want_in || n_out < want_out {
        let p = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=8);
        let d = ConstraintMatrix::random(p, m, 0.2, &mut rng);
        let circuits = circuit_vectors(&d, 8);
        if n_in < want_in && !circuits.is_empty() {
            let mut x = vec![0i64; m];
            for _ in 0..rng.gen_range(1..=3) {
                let c = &circuits[rng.gen_range(0..circuits.len())];
                let s = if rng.gen_bool(0.5) { 1 } else { -1 };
                x.iter_mut().zip(c).for_each(|(a, b)| *a += s * b);
            }
            if x.iter().any(|&v| v != 0) {
                n_in += 1;
                if let Some(err) = check_decomposition(&d, &x) {
                    failures.push(err);
                }
            }
        }
        if n_out < want_out {
            let x: Vec<i64> = (0..m).map(|_| rng.gen_range(-2..=2)).collect();
            if !d.in_lattice(&x) {
                n_out += 1;
                if decompose(&d, &x) != Ok(Decomposition::NotInLattice) {
                    failures.push(format!("non-lattice {x:?} was decomposed"));
                }
            }
        }
    }
    let needed = if n_in >= ctx.pick(40, 200) && n_out >= ctx.pick(20, 100) { 0 } else { usize::MAX };
    result(5, "circuit decomposition round trip", n_in + n_out, failures, needed)
}

/// `None` when `decompose` splits `x` into conformal circuits summing to it.
pub fn check_decomposition(d: &ConstraintMatrix, x: &[i64]) -> Option<String> {
    match decompose(d, x) {
        Ok(Decomposition::Circuits(cs)) => {
            let mut sum = vec![0i64; x.len()];
            for c in &cs {
                if !is_conformal(&c.indicator, x) || c.indicator_norm() != c.size() as u64 {
                    return Some(format!("x = {x:?}: bad circuit {c:?}"));
                }
                sum.iter_mut().zip(&c.indicator).for_each(|(a, b)| *a += b);
            }
            (sum != x).then(|| format!("x = {x:?}: circuits sum to {sum:?}"))
        }
        other => Some(format!("x = {x:?}: {other:?}")),
    }
}

/// Every nonzero `v` with `|v| <= radius`, `|v_i| <= bound` and `Dv = 0`.
pub fn lattice_ball(d: &ConstraintMatrix, radius: u64, bound: u64) -> BTreeSet<Vec<i64>> {
    fn rec(d: &ConstraintMatrix, v: &mut Vec<i64>, left: u64, bound: i64, out: &mut BTreeSet<Vec<i64>>) {
        if v.len() == d.cols() {
            if v.iter().any(|&x| x != 0) && d.in_lattice(v) {
                out.insert(v.clone());
            }
            return;
        }
        let b = bound.min(left as i64);
        for x in -b..=b {
            v.push(x);
            rec(d, v, left - x.unsigned_abs(), bound, out);
            v.pop();
        }
    }
    let mut out = BTreeSet::new();
    rec(d, &mut Vec::new(), radius, bound as i64, &mut out);
    out
}

/// Number of points in the `L1` ball of the given radius in `dim` dimensions.
fn ball_size(dim: usize, radius: u64) -> u128 {
    // Points with exactly k nonzero coordinates: C(dim, k) 2^k C(radius, k).
    let choose = |n: u128, k: u128| -> u128 { (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1)) };
    (0..=dim.min(radius as usize) as u128).map(|k| choose(dim as u128, k) * (1 << k) * choose(radius as u128, k)).sum()
}

fn near_shortest_check(ctx: &Ctx) -> CriterionResult {
    let mut rng = ctx.rng(600);
    let count = ctx.pick(20, 80);
    let mut failures = Vec::new();
    for k in 0..count {
        let p = rng.gen_range(2..=5);
        let m = rng.gen_range(1..=7);
        let d = ConstraintMatrix::random(p, m, 0.2, &mut rng);
        let got: BTreeSet<Vec<i64>> = near_shortest(&d).into_iter().collect();
        let bound = (p as u128).pow(17);
        if got.len() as u128 > bound {
            failures.push(format!("D{k}: {} vectors exceed {p}^17", got.len()));
        }
        let Lambda::Finite(lam) = lambda(&d) else {
            if !got.is_empty() || !lattice_ball(&d, 4, 4).is_empty() {
                failures.push(format!("D{k}: trivial lattice has vectors"));
            }
            continue;
        };
        let radius = 2 * lam - 1;
        let entry_bound = if ball_size(m, radius) <= 2_000_000 { radius } else { 2 };
        let want = lattice_ball(&d, radius, entry_bound);
        let got_in_box: BTreeSet<Vec<i64>> =
            got.iter().filter(|v| v.iter().all(|x| x.unsigned_abs() <= entry_bound)).cloned().collect();
        let shortest = want.iter().map(|v| l1(v)).min();
        if got_in_box != want {
            failures.push(format!("D{k}: near_shortest differs from enumeration"));
        } else if entry_bound >= lam && shortest != Some(lam) {
            failures.push(format!("D{k}: lambda {lam} but enumeration gives {shortest:?}"));
        } else if got.iter().any(|v| !d.in_lattice(v) || l1(v) >= 2 * lam) {
            failures.push(format!("D{k}: output outside the near-shortest range"));
        }
    }
    result(6, "near-shortest structure", count, failures, ctx.pick(20, 50))
}

fn isolation_coverage(ctx: &Ctx, corpus: &[(Entry, Polytope)]) -> CriterionResult {
    let corpus = thin(corpus.iter().collect(), ctx.pick(60, usize::MAX));
    let failures: Vec<String> = corpus
        .par_iter()
        .filter_map(|(e, p)| {
            let m = e.instance.m();
            let families = [
                ("brute", Family::brute(m, DEFAULT_BRUTE_K).expect("small family")),
                ("gtv", default_family(m)),
            ];
            for (name, family) in families {
                let covered = family.iter().any(|w| p.maximize(Some(&w.values)).expect("within guards").is_unique());
                if !covered {
                    return Some(format!("{}: no isolating {name} assignment", e.name));
                }
            }
            None
        })
        .collect();
    result(7, "isolation coverage", corpus.len(), failures, 1)
}

fn hitting_set_check(ctx: &Ctx, corpus: &[(Entry, Polytope)]) -> CriterionResult {
    let small: Vec<&(Entry, Polytope)> =
        corpus.iter().filter(|(e, _)| (1..=3).contains(&e.instance.m()) && e.instance.n() <= 4).collect();
    let (full, deficient): (Vec<_>, Vec<_>) = small.into_iter().partition(|(e, p)| {
        p.maximize(None).expect("within guards").value_doubled == e.instance.n() as u128
    });
    let full = thin(full, ctx.pick(6, 24));
    let deficient = thin(deficient, ctx.pick(4, 12));
    let samples = ctx.pick(100, 1000);
    let mut failures = Vec::new();
    for (k, (e, _)) in full.iter().enumerate() {
        let inst = &e.instance;
        let set = hitting_family_set(inst, ctx.field);
        match find_witness(inst, &set, None, true) {
            Ok(WitnessSearch::Witness { tuple, .. }) => {
                let mut rng = ctx.rng(800 + k as u64);
                if !is_witness(inst, &tuple) || ncrank_estimate(inst, 3, &mut rng) != inst.n() {
                    failures.push(format!("{}: unsound witness", e.name));
                }
            }
            other => failures.push(format!("{}: {other:?}", e.name)),
        }
    }
    for (k, (e, _)) in deficient.iter().enumerate() {
        let inst = &e.instance;
        let set = hitting_family_set(inst, ctx.field);
        let mut rng = ctx.rng(900 + k as u64);
        let singular = (0..samples).all(|_| {
            let i = rng.gen_range(0..set.len());
            !is_witness(inst, &set.get(i).expect("index in range"))
        });
        if !singular {
            failures.push(format!("{}: deficient instance has a witness", e.name));
        }
    }
    let needed = if full.len() >= ctx.pick(5, 20) && deficient.len() >= ctx.pick(3, 10) { 0 } else { usize::MAX };
    result(8, "hitting set", full.len() + deficient.len(), failures, needed)
}

/// The hitting set the checks use: `[2]^m`, which isolates the whole corpus.
pub fn hitting_family_set(inst: &Instance, field: PrimeField) -> HittingSet {
    let family = Family::brute(inst.m(), 2).expect("small family");
    HittingSet::new(inst.n(), family, field).expect("default prime is large enough")
}

fn random_quadpoly<R: Rng>(field: PrimeField, rng: &mut R) -> QuadPoly {
    let mut p = QuadPoly::zero();
    for _ in 0..rng.gen_range(0..=2) {
        let exps = std::array::from_fn(|_| rng.gen_range(0..=2));
        p.add_assign(&QuadPoly::monomial(exps, field.random_nonzero(rng)), field);
    }
    p
}

fn algebra_kernel(ctx: &Ctx) -> CriterionResult {
    let f = ctx.field;
    let mut rng = ctx.rng(1000);
    let mut failures = Vec::new();
    let skew = ctx.pick(100, 500);
    for k in 0..skew {
        let n = 2 + k % 7;
        let a = FieldMatrix::random_skew(f, n, &mut rng);
        let pf = ctx.pfaffian(&a);
        if f.mul(pf, pf) != det(&a, f).expect("square") {
            failures.push(format!("pf^2 != det at order {n}"));
        }
    }
    let tiny = ctx.pick(20, 50);
    for k in 0..tiny {
        let n = 1 + k % 3;
        let m: QuadPolyMatrix = QuadPolyMatrix::from_fn(n, n, |_, _| random_quadpoly(f, &mut rng));
        let exact = total_degree_of_det(&m, DegreeMode::Deterministic, 1, f, &mut rng);
        let randomized = total_degree_of_det(&m, DegreeMode::Randomized, 3, f, &mut rng);
        if exact != randomized {
            failures.push(format!("degree mismatch: {exact:?} vs {randomized:?}"));
        }
    }
    result(9, "algebra kernel", skew + tiny, failures, ctx.pick(100, 550))
}

/// Runs every criterion and collects the results in order.
pub fn run(scale: Scale, seed: u64, faults: Faults) -> Summary {
    let ctx = Ctx { scale, seed, faults, field: PrimeField::default() };
    let corpus = classified(ctx.field, seed);
    let criteria = vec![
        rank_identity(&ctx),
        end_to_end(&ctx, &corpus),
        degree_law(&ctx, &corpus),
        pfaffian_expansion(&ctx, &corpus),
        algorithm1(&ctx),
        near_shortest_check(&ctx),
        isolation_coverage(&ctx, &corpus),
        hitting_set_check(&ctx, &corpus),
        algebra_kernel(&ctx),
    ];
    let passed = criteria.iter().all(|c| c.passed);
    Summary { scale, seed, passed, criteria }
}
