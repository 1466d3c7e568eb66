mod support;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fracmatroid::algebra::{rank, FieldMatrix, PrimeField};
use fracmatroid::instance::{ncrank_estimate, pattern_blowup, random_blowup, HalfIntegralVector, Instance};
use fracmatroid::oracle::Polytope;
use fracmatroid::weights::{make_distinct, perturb, WeightAssignment};

use support::RefPolytope;

fn instance(m: usize, n: usize, seed: u64) -> Instance {
    let f = PrimeField::default();
    let p = f.modulus();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = Vec::new();
    while lines.len() < m {
        let a: Vec<i64> = (0..n).map(|_| rng.gen_range(-1..=1)).collect();
        let b: Vec<i64> = (0..n).map(|_| rng.gen_range(-1..=1)).collect();
        let rows: Vec<Vec<u64>> = [&a, &b].iter().map(|v| v.iter().map(|&x| support::reduce(x, p)).collect()).collect();
        if support::rank(&rows, p) == 2 {
            lines.push((a, b));
        }
    }
    Instance::from_i64(f, n, &lines).unwrap()
}

fn small_instance() -> impl Strategy<Value = Instance> {
    (1usize..=4, 2usize..=4, any::<u64>()).prop_map(|(m, n, seed)| instance(m, n, seed))
}

fn value(w: &[u64], y: &[u8]) -> u128 {
    y.iter().zip(w).map(|(&a, &b)| a as u128 * b as u128).sum()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn oracle_matches_reference(inst in small_instance()) {
        let lib: BTreeSet<Vec<u8>> =
            Polytope::new(&inst).unwrap().feasible_points().unwrap().iter().map(|y| y.as_doubled().to_vec()).collect();
        let reference: BTreeSet<Vec<u8>> = RefPolytope::new(&inst).points().into_iter().collect();
        prop_assert_eq!(lib, reference);
    }

    #[test]
    fn make_distinct_keeps_strict_order(inst in small_instance(), raw in prop::collection::vec(1u64..6, 4)) {
        let w = WeightAssignment::user(raw[..inst.m()].to_vec()).unwrap();
        let d = make_distinct(&w);
        prop_assert!(d.has_distinct_entries());
        let points = RefPolytope::new(&inst).points();
        for a in &points {
            for b in &points {
                if value(&w.values, a) > value(&w.values, b) {
                    prop_assert!(value(&d.values, a) > value(&d.values, b));
                }
            }
        }
    }

    #[test]
    fn perturbation_keeps_a_unique_maximizer(inst in small_instance(), raw in prop::collection::vec(1u64..6, 4), e in 0usize..4) {
        let w = make_distinct(&WeightAssignment::user(raw[..inst.m()].to_vec()).unwrap());
        let e = e % inst.m();
        let we = perturb(&w, e).unwrap();
        let r = RefPolytope::new(&inst);
        let (best, set) = r.maximize(&w.values, false).unwrap();
        let (best_e, set_e) = r.maximize(&we.values, false).unwrap();
        if set.len() == 1 {
            let z = set.iter().next().unwrap();
            prop_assert_eq!(&set_e, &set);
            // w^e · z = 4 w·z + z_e: the classification margin.
            prop_assert_eq!(best_e, 4 * best + z[e] as u128);
        }
    }

    #[test]
    fn rank_identity(inst in small_instance(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(ncrank_estimate(&inst, 3, &mut rng) as u128, RefPolytope::new(&inst).max_size());
    }

    #[test]
    fn oracle_ignores_line_order(inst in small_instance(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..inst.m()).collect();
        rand::seq::SliceRandom::shuffle(&mut order[..], &mut rng);
        let permuted = inst.permuted(&order);
        let base: BTreeSet<Vec<u8>> = RefPolytope::new(&inst).points().into_iter().collect();
        let moved: BTreeSet<Vec<u8>> = Polytope::new(&permuted)
            .unwrap()
            .feasible_points()
            .unwrap()
            .iter()
            .map(|y| {
                // Line k of `permuted` is line order[k] of `inst`.
                let mut back = vec![0u8; order.len()];
                for (k, &i) in order.iter().enumerate() {
                    back[i] = y.doubled(k);
                }
                back
            })
            .collect();
        prop_assert_eq!(base, moved);
    }

    #[test]
    fn oracle_ignores_change_of_basis(inst in small_instance(), seed in any::<u64>()) {
        let f = inst.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = loop {
            let g = FieldMatrix::random(f, inst.n(), inst.n(), &mut rng);
            if rank(&g, f) == inst.n() {
                break g;
            }
        };
        let moved = inst.transformed(&g).unwrap();
        let a = Polytope::new(&inst).unwrap().feasible_points().unwrap();
        let b = Polytope::new(&moved).unwrap().feasible_points().unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn full_rank_pattern_has_an_optimal_point_below(inst in small_instance(), y in prop::collection::vec(0u8..=2, 4), seed in any::<u64>()) {
        let y = HalfIntegralVector::from_doubled(y[..inst.m()].to_vec()).unwrap();
        let f = inst.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let full = (0..3).map(|_| rank(&random_blowup(&inst, &mut rng), f)).max().unwrap();
        let at_y = (0..3).map(|_| rank(&pattern_blowup(&inst, &y, &mut rng), f)).max().unwrap();
        prop_assert!(at_y <= full);
        if at_y == full {
            let r = RefPolytope::new(&inst);
            let best = r.max_size();
            let below = r.points().into_iter().any(|z| {
                z.iter().zip(y.as_doubled()).all(|(a, b)| a <= b) && z.iter().map(|&v| v as u128).sum::<u128>() == best
            });
            prop_assert!(below, "rank {} reached at y = {} without an optimal z <= y", full, y);
        }
    }

    #[test]
    fn half_integral_json_round_trip(y in prop::collection::vec(0u8..=2, 0..8)) {
        let v = HalfIntegralVector::from_doubled(y.clone()).unwrap();
        let text = serde_json::to_string(&v).unwrap();
        prop_assert_eq!(&text, &serde_json::to_string(&y).unwrap());
        let back: HalfIntegralVector = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, v);
    }
}
