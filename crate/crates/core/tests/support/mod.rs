//! Reference implementations for the integration tests, written without the
//! library's algebra or oracle code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use fracmatroid::instance::Instance;

pub fn add(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

pub fn sub(a: u64, b: u64, p: u64) -> u64 {
    add(a, p - b % p, p)
}

pub fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a, p);
        }
        a = mul(a, a, p);
        e >>= 1;
    }
    r
}

pub fn inv(a: u64, p: u64) -> u64 {
    pow(a, p - 2, p)
}

pub fn reduce(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

pub type Mat = Vec<Vec<u64>>;

/// Row rank by plain Gauss-Jordan elimination.
pub fn rank(rows: &[Vec<u64>], p: u64) -> usize {
    let mut a: Mat = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, piv);
        let iv = inv(a[r][c], p);
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let f = mul(a[i][c], iv, p);
                for k in c..cols {
                    let t = mul(f, a[r][k], p);
                    a[i][k] = sub(a[i][k], t, p);
                }
            }
        }
        r += 1;
    }
    r
}

pub fn det(m: &Mat, p: u64) -> u64 {
    let n = m.len();
    let mut a = m.clone();
    let mut d = 1;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| a[i][c] != 0) else { return 0 };
        if piv != c {
            a.swap(piv, c);
            d = sub(0, d, p);
        }
        d = mul(d, a[c][c], p);
        let iv = inv(a[c][c], p);
        for i in c + 1..n {
            let f = mul(a[i][c], iv, p);
            for k in c..n {
                let t = mul(f, a[c][k], p);
                a[i][k] = sub(a[i][k], t, p);
            }
        }
    }
    d
}

/// Pfaffian by expansion along the first row.
pub fn pfaffian(m: &Mat, p: u64) -> u64 {
    fn go(m: &Mat, idx: &[usize], p: u64) -> u64 {
        if idx.is_empty() {
            return 1;
        }
        if idx.len() % 2 == 1 {
            return 0;
        }
        let mut total = 0;
        for j in 1..idx.len() {
            let a = m[idx[0]][idx[j]];
            if a == 0 {
                continue;
            }
            let rest: Vec<usize> = idx.iter().enumerate().filter(|&(k, _)| k != 0 && k != j).map(|(_, &v)| v).collect();
            let term = mul(a, go(m, &rest, p), p);
            total = if j % 2 == 1 { add(total, term, p) } else { sub(total, term, p) };
        }
        total
    }
    go(m, &(0..m.len()).collect::<Vec<_>>(), p)
}

pub fn kron(a: &Mat, b: &Mat, p: u64) -> Mat {
    let (ar, ac, br, bc) = (a.len(), a[0].len(), b.len(), b[0].len());
    let mut out = vec![vec![0; ac * bc]; ar * br];
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    out[i * br + k][j * bc + l] = mul(a[i][j], b[k][l], p);
                }
            }
        }
    }
    out
}

pub fn mat_add(a: &mut Mat, b: &Mat, p: u64) {
    for (ra, rb) in a.iter_mut().zip(b) {
        for (x, y) in ra.iter_mut().zip(rb) {
            *x = add(*x, *y, p);
        }
    }
}

/// `(a_i, b_i)` of every line as residues.
pub fn pairs(inst: &Instance) -> Vec<(Vec<u64>, Vec<u64>)> {
    inst.lines()
        .iter()
        .map(|l| (l.a.iter().map(|x| x.value()).collect(), l.b.iter().map(|x| x.value()).collect()))
        .collect()
}

/// `a b^T - b a^T`.
pub fn wedge(a: &[u64], b: &[u64], p: u64) -> Mat {
    let n = a.len();
    (0..n).map(|r| (0..n).map(|c| sub(mul(a[r], b[c], p), mul(b[r], a[c], p), p)).collect()).collect()
}

/// `sum_i X_i ⊗ A_i`.
pub fn substitute(inst: &Instance, blocks: &[Mat]) -> Mat {
    let p = inst.field().modulus();
    let n = inst.n();
    let mut out = vec![vec![0; 2 * n]; 2 * n];
    for ((a, b), x) in pairs(inst).iter().zip(blocks) {
        mat_add(&mut out, &kron(x, &wedge(a, b, p), p), p);
    }
    out
}

/// The polytope, with one constraint per subset of the ground set (the span
/// of any subset equals the span of its closure, so this is the same set of
/// inequalities as the flats give).
pub struct RefPolytope {
    pub m: usize,
    pub n: usize,
    /// `(coefficients dim(span S ∩ l_i), dim span S)`.
    pub constraints: Vec<(Vec<usize>, usize)>,
}

impl RefPolytope {
    pub fn new(inst: &Instance) -> Self {
        let p = inst.field().modulus();
        let lines = pairs(inst);
        let ground: Vec<Vec<u64>> = lines.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
        let mut constraints = BTreeSet::new();
        for mask in 0u32..(1 << ground.len()) {
            let s: Vec<Vec<u64>> = (0..ground.len()).filter(|j| mask >> j & 1 == 1).map(|j| ground[j].clone()).collect();
            let r = rank(&s, p);
            let coeffs = lines
                .iter()
                .map(|(a, b)| {
                    let mut t = s.clone();
                    t.push(a.clone());
                    t.push(b.clone());
                    r + 2 - rank(&t, p)
                })
                .collect();
            constraints.insert((coeffs, r));
        }
        RefPolytope { m: inst.m(), n: inst.n(), constraints: constraints.into_iter().collect() }
    }

    /// Feasibility of a doubled half-integral point.
    pub fn contains(&self, y: &[u8]) -> bool {
        y.len() == self.m
            && y.iter().all(|&v| v <= 2)
            && self.constraints.iter().all(|(c, r)| c.iter().zip(y).map(|(a, &b)| a * b as usize).sum::<usize>() <= 2 * r)
    }

    pub fn points(&self) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        for code in 0..3usize.pow(self.m as u32) {
            let mut c = code;
            let y: Vec<u8> = (0..self.m)
                .map(|_| {
                    let v = (c % 3) as u8;
                    c /= 3;
                    v
                })
                .collect();
            if self.contains(&y) {
                out.push(y);
            }
        }
        out
    }

    /// Largest doubled `w·y` and all maximizers, optionally over perfect points only.
    pub fn maximize(&self, w: &[u64], perfect: bool) -> Option<(u128, BTreeSet<Vec<u8>>)> {
        let mut best: Option<(u128, BTreeSet<Vec<u8>>)> = None;
        for y in self.points() {
            if perfect && y.iter().map(|&v| v as usize).sum::<usize>() != self.n {
                continue;
            }
            let val: u128 = y.iter().zip(w).map(|(&a, &b)| a as u128 * b as u128).sum();
            match &mut best {
                Some((v, set)) if *v == val => {
                    set.insert(y);
                }
                Some((v, _)) if *v > val => {}
                _ => best = Some((val, BTreeSet::from([y]))),
            }
        }
        best
    }

    /// Largest doubled size.
    pub fn max_size(&self) -> u128 {
        self.maximize(&vec![1; self.m], false).map_or(0, |(v, _)| v)
    }

    pub fn has_perfect(&self) -> bool {
        self.maximize(&vec![1; self.m], true).is_some()
    }
}

/// Polynomials in four variables as exponent-to-coefficient maps.
pub type Poly = BTreeMap<[u64; 4], u64>;

pub fn poly_mul(a: &Poly, b: &Poly, p: u64) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
            let c = out.entry(e).or_insert(0);
            *c = add(*c, mul(*ca, *cb, p), p);
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

pub fn poly_add(a: &mut Poly, b: &Poly, p: u64, negate: bool) {
    for (e, c) in b {
        let v = a.entry(*e).or_insert(0);
        *v = if negate { sub(*v, *c, p) } else { add(*v, *c, p) };
    }
    a.retain(|_, c| *c != 0);
}

/// Symbolic determinant by the Leibniz formula; tiny matrices only.
pub fn leibniz(m: &[Vec<Poly>], p: u64) -> Poly {
    fn perms(n: usize) -> Vec<(Vec<usize>, bool)> {
        if n == 0 {
            return vec![(vec![], false)];
        }
        let mut out = Vec::new();
        for (rest, odd) in perms(n - 1) {
            for pos in 0..n {
                let mut q = rest.clone();
                q.insert(pos, n - 1);
                // Inserting at `pos` adds `n - 1 - pos` inversions.
                out.push((q, odd ^ ((n - 1 - pos) % 2 == 1)));
            }
        }
        out
    }
    let mut total = Poly::new();
    for (perm, odd) in perms(m.len()) {
        let mut term = Poly::from([([0; 4], 1)]);
        for (r, &c) in perm.iter().enumerate() {
            term = poly_mul(&term, &m[r][c], p);
        }
        poly_add(&mut total, &term, p, odd);
    }
    total
}

/// Total degree, `None` for the zero polynomial.
pub fn total_degree(poly: &Poly) -> Option<u64> {
    poly.keys().map(|e| e.iter().sum()).max()
}

/// Rank over the rationals by fraction-free elimination.
pub fn rational_rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, piv);
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let (f, g) = (a[i][c], a[r][c]);
                for k in 0..cols {
                    a[i][k] = a[i][k] * g - a[r][k] * f;
                }
                let div = a[i].iter().fold(0i128, |acc, &x| gcd(acc, x));
                if div > 1 {
                    a[i].iter_mut().for_each(|x| *x /= div);
                }
            }
        }
        r += 1;
    }
    r
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}
