//! Seeded instance generators and the standard desk-scale corpora.
//!
//! * `graph`: one coordinate line `<e_u, e_v>` per edge of a loopless multigraph,
//!   so the polytope is the fractional matching polytope of the graph.
//! * `random`: independent pairs with small integer coordinates.
//! * `intersection`: two linear matroids represented by `u_i, v_i ∈ F^r`,
//!   encoded as lines `<(u_i, 0), (0, v_i)>` in `F^{2r}`; perfect integral
//!   matchings are the common bases.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{FieldElem, PrimeField};
use crate::error::InstanceError;
use crate::instance::{Instance, Line};

fn unit(field: PrimeField, n: usize, k: usize) -> Vec<FieldElem> {
    (0..n).map(|i| if i == k { field.one() } else { field.zero() }).collect()
}

/// Lines `<e_u, e_v>` for the edges of a graph on `vertices` vertices.
pub fn graph(field: PrimeField, vertices: usize, edges: &[(usize, usize)]) -> Result<Instance, InstanceError> {
    let lines = edges
        .iter()
        .map(|&(u, v)| Line { a: unit(field, vertices, u), b: unit(field, vertices, v) })
        .collect();
    Instance::new(field, vertices, lines)
}

pub fn triangle(field: PrimeField) -> Instance {
    graph(field, 3, &[(0, 1), (1, 2), (0, 2)]).expect("valid graph")
}

pub fn single_edge(field: PrimeField) -> Instance {
    graph(field, 2, &[(0, 1)]).expect("valid graph")
}

fn small_vector<R: Rng + ?Sized>(field: PrimeField, n: usize, range: i64, rng: &mut R) -> Vec<FieldElem> {
    (0..n).map(|_| field.from_i64(rng.gen_range(-range..=range))).collect()
}

/// `m` random lines in `F^n` with coordinates in `[-range, range]`,
/// resampling dependent pairs.
pub fn random(field: PrimeField, m: usize, n: usize, range: i64, seed: u64) -> Instance {
    assert!(n >= 2, "a line needs two dimensions");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lines = (0..m)
        .map(|_| loop {
            let a = small_vector(field, n, range, &mut rng);
            let b = small_vector(field, n, range, &mut rng);
            if crate::instance::coeff_matrix(&a, &b, field).is_ok() {
                break Line { a, b };
            }
        })
        .collect();
    Instance::new(field, n, lines).expect("pairs checked")
}

/// Two random rank-`r` representations over `[-range, range]`, `m` elements.
pub fn intersection(field: PrimeField, m: usize, r: usize, range: i64, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nonzero = |rng: &mut ChaCha8Rng| loop {
        let v = small_vector(field, r, range, rng);
        if v.iter().any(|x| !x.is_zero()) {
            break v;
        }
    };
    let lines = (0..m)
        .map(|_| {
            let u = nonzero(&mut rng);
            let v = nonzero(&mut rng);
            let mut a = u;
            a.extend(std::iter::repeat(field.zero()).take(r));
            let mut b = vec![field.zero(); r];
            b.extend(v);
            Line { a, b }
        })
        .collect();
    Instance::new(field, 2 * r, lines).expect("nonzero halves are independent")
}

/// Loopless multigraphs on `vertices` vertices with exactly `edges` edges,
/// as sorted edge lists (one representative per multiset of edges).
pub fn multigraphs(vertices: usize, edges: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> =
        (0..vertices).flat_map(|u| (u + 1..vertices).map(move |v| (u, v))).collect();
    let mut out = Vec::new();
    let mut pick = Vec::new();
    fn rec(pairs: &[(usize, usize)], start: usize, left: usize, pick: &mut Vec<usize>, out: &mut Vec<Vec<(usize, usize)>>) {
        if left == 0 {
            out.push(pick.iter().map(|&i| pairs[i]).collect());
            return;
        }
        for i in start..pairs.len() {
            pick.push(i);
            rec(pairs, i, left - 1, pick, out);
            pick.pop();
        }
    }
    rec(&pairs, 0, edges, &mut pick, &mut out);
    out
}

/// A named instance.
#[derive(Clone, Debug)]
pub struct Entry {
    pub name: String,
    pub instance: Instance,
}

/// The desk corpus: every loopless multigraph on 2 to 4 vertices with 1 to
/// 4 edges, plus seeded random and intersection instances, all with
/// `m <= 4` and `n <= 4`.
pub fn desk_corpus(field: PrimeField, seed: u64) -> Vec<Entry> {
    let mut out = Vec::new();
    for vertices in 2..=4 {
        for edges in 1..=4 {
            for g in multigraphs(vertices, edges) {
                let instance = graph(field, vertices, &g).expect("valid graph");
                out.push(Entry { name: format!("graph{vertices}:{g:?}"), instance });
            }
        }
    }
    for k in 0..24u64 {
        let m = 1 + (k % 4) as usize;
        let n = 2 + (k % 3) as usize;
        out.push(Entry {
            name: format!("random(m={m},n={n},seed={})", seed + k),
            instance: random(field, m, n, 1, seed + k),
        });
    }
    for k in 0..16u64 {
        let m = 1 + (k % 4) as usize;
        let r = 1 + (k % 2) as usize;
        out.push(Entry {
            name: format!("intersection(m={m},r={r},seed={})", seed + k),
            instance: intersection(field, m, r, 1, seed + k),
        });
    }
    out
}
