//! Candidate isolating weight families and the transforms the solver applies.
//!
//! Two families are provided. `Brute` lists all of `[K]^m`. `Gtv` combines
//! `L = ceil(log2(2m))` rounds of power-residue weights
//! `(t^1 mod q, ..., t^m mod q)` lexicographically, `w = sum_j M^{L-j} w^(j)`,
//! with `M` exceeding the largest doubled single-round value `2m(Q-1)`. Both
//! are indexed, so elements can be produced lazily or fetched by position.

use serde::Serialize;

use crate::error::WeightError;

/// Default magnitude cap for family weights.
pub const DEFAULT_CAP: u64 = 1 << 20;
/// Power-residue parameters that cover the test corpus (see the acceptance suite).
pub const DEFAULT_GTV_T: u64 = 4;
pub const DEFAULT_GTV_Q: u64 = 5;
/// `[3]^m` already isolates every instance of the test corpus.
pub const DEFAULT_BRUTE_K: u64 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Brute { index: u64 },
    Gtv { index: u64, rounds: Vec<(u64, u64)> },
    Explicit { index: u64 },
    Shifted { index: u64, shift: u64 },
    User,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightAssignment {
    pub values: Vec<u64>,
    pub provenance: Provenance,
}

impl WeightAssignment {
    /// User-supplied weights; entries must be positive.
    pub fn user(values: Vec<u64>) -> Result<Self, WeightError> {
        if let Some(index) = values.iter().position(|&v| v == 0) {
            return Err(WeightError::NonPositive { index });
        }
        Ok(WeightAssignment { values, provenance: Provenance::User })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> u64 {
        self.values.iter().copied().max().unwrap_or(0)
    }

    pub fn has_distinct_entries(&self) -> bool {
        let mut v = self.values.clone();
        v.sort_unstable();
        v.windows(2).all(|p| p[0] != p[1])
    }
}

/// `w'_i = m^2 w_i + i` (with `i` counted from one).
pub fn make_distinct(w: &WeightAssignment) -> WeightAssignment {
    let m = w.len() as u64;
    let values = w.values.iter().enumerate().map(|(i, &x)| m * m * x + i as u64 + 1).collect();
    WeightAssignment { values, provenance: w.provenance.clone() }
}

/// `w^e_i = 4 w_i + [i = e]` (`e` is a zero-based line index).
pub fn perturb(w: &WeightAssignment, e: usize) -> Result<WeightAssignment, WeightError> {
    if e >= w.len() {
        return Err(WeightError::IndexOutOfRange { index: e, len: w.len() });
    }
    let values = w.values.iter().enumerate().map(|(i, &x)| 4 * x + u64::from(i == e)).collect();
    Ok(WeightAssignment { values, provenance: w.provenance.clone() })
}

fn primes_up_to(q: u64) -> Vec<u64> {
    (2..=q).filter(|&x| (2..x).take_while(|d| d * d <= x).all(|d| x % d != 0)).collect()
}

/// A deterministic, indexable family of weight assignments for `m` lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// All of `[k]^m`, first coordinate varying slowest.
    Brute { m: usize, k: u64 },
    /// Round-based power-residue family.
    Gtv { m: usize, t_max: u64, q_max: u64 },
    Explicit { m: usize, elements: Vec<Vec<u64>> },
    /// `{N v + w : w in base}` with `N = n * max(base) + 1`.
    Shifted { base: Box<Family>, v: Vec<u64>, n: usize },
}

impl Family {
    pub fn brute(m: usize, k: u64) -> Result<Self, WeightError> {
        if k == 0 {
            return Err(WeightError::BadParams("K must be positive".into()));
        }
        let f = Family::Brute { m, k };
        f.check_cap(DEFAULT_CAP)?;
        if k.checked_pow(m as u32).is_none() {
            return Err(WeightError::BadParams(format!("{k}^{m} assignments overflow")));
        }
        Ok(f)
    }

    pub fn gtv(m: usize, t_max: u64, q_max: u64) -> Result<Self, WeightError> {
        Family::gtv_with_cap(m, t_max, q_max, DEFAULT_CAP)
    }

    pub fn gtv_with_cap(m: usize, t_max: u64, q_max: u64, cap: u64) -> Result<Self, WeightError> {
        if m == 0 {
            return Err(WeightError::BadParams("m must be positive".into()));
        }
        let f = Family::Gtv { m, t_max, q_max };
        if f.base_pairs().is_empty() {
            return Err(WeightError::BadParams(format!("no base pairs with t <= {t_max}, q <= {q_max}")));
        }
        f.check_cap(cap)?;
        Ok(f)
    }

    pub fn explicit(m: usize, elements: Vec<Vec<u64>>) -> Result<Self, WeightError> {
        for (i, w) in elements.iter().enumerate() {
            if w.len() != m {
                return Err(WeightError::LengthMismatch { expected: m, got: w.len() });
            }
            if w.contains(&0) {
                return Err(WeightError::NonPositive { index: i });
            }
        }
        Ok(Family::Explicit { m, elements })
    }

    fn check_cap(&self, cap: u64) -> Result<(), WeightError> {
        let max = self.max_weight();
        if max > cap {
            return Err(WeightError::CapExceeded { value: max, cap });
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        match self {
            Family::Brute { m, .. } | Family::Gtv { m, .. } | Family::Explicit { m, .. } => *m,
            Family::Shifted { base, .. } => base.m(),
        }
    }

    /// Pairs `(t, q)` with `2 <= t <= T`, `q <= Q` prime, and `q` not dividing `t`.
    pub fn base_pairs(&self) -> Vec<(u64, u64)> {
        match self {
            Family::Gtv { t_max, q_max, .. } => {
                let primes = primes_up_to(*q_max);
                (2..=*t_max).flat_map(|t| primes.iter().filter(move |&&q| t % q != 0).map(move |&q| (t, q))).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Number of rounds `ceil(log2(2m))`.
    pub fn rounds(&self) -> u32 {
        let m = self.m().max(1) as u64;
        (2 * m).next_power_of_two().trailing_zeros()
    }

    fn radix(&self) -> u64 {
        match self {
            Family::Gtv { m, q_max, .. } => 2 * *m as u64 * q_max.saturating_sub(1) + 1,
            _ => 0,
        }
    }

    pub fn len(&self) -> u64 {
        match self {
            Family::Brute { m, k } => k.pow(*m as u32),
            Family::Gtv { .. } => (self.base_pairs().len() as u64).pow(self.rounds()),
            Family::Explicit { elements, .. } => elements.len() as u64,
            Family::Shifted { base, .. } => base.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest entry of any element (without materializing the family).
    pub fn max_weight(&self) -> u64 {
        match self {
            Family::Brute { k, .. } => *k,
            Family::Gtv { q_max, .. } => {
                let big = self.radix();
                (0..self.rounds()).fold(0u64, |acc, _| acc.saturating_mul(big).saturating_add(q_max - 1))
            }
            Family::Explicit { elements, .. } => elements.iter().flatten().copied().max().unwrap_or(0),
            Family::Shifted { base, v, n } => {
                let shift = shift_factor(base.max_weight(), *n);
                v.iter().copied().max().unwrap_or(0) * shift + base.max_weight()
            }
        }
    }

    /// Element at position `index` in family order.
    pub fn get(&self, index: u64) -> Option<WeightAssignment> {
        if index >= self.len() {
            return None;
        }
        Some(match self {
            Family::Brute { m, k } => {
                let mut values = vec![0u64; *m];
                let mut code = index;
                for slot in values.iter_mut().rev() {
                    *slot = code % k + 1;
                    code /= k;
                }
                WeightAssignment { values, provenance: Provenance::Brute { index } }
            }
            Family::Gtv { m, .. } => {
                let pairs = self.base_pairs();
                let b = pairs.len() as u64;
                let rounds = self.rounds();
                let big = self.radix();
                let mut digits = vec![0usize; rounds as usize];
                let mut code = index;
                for d in digits.iter_mut().rev() {
                    *d = (code % b) as usize;
                    code /= b;
                }
                let mut values = vec![0u64; *m];
                for &d in &digits {
                    let (t, q) = pairs[d];
                    let mut pow = 1u64;
                    for v in values.iter_mut() {
                        pow = pow * t % q;
                        *v = *v * big + pow;
                    }
                }
                let rounds = digits.iter().map(|&d| pairs[d]).collect();
                WeightAssignment { values, provenance: Provenance::Gtv { index, rounds } }
            }
            Family::Explicit { elements, .. } => WeightAssignment {
                values: elements[index as usize].clone(),
                provenance: Provenance::Explicit { index },
            },
            Family::Shifted { base, v, n } => {
                let shift = shift_factor(base.max_weight(), *n);
                let w = base.get(index)?;
                let values = w.values.iter().zip(v).map(|(&x, &vi)| shift * vi + x).collect();
                WeightAssignment { values, provenance: Provenance::Shifted { index, shift } }
            }
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = WeightAssignment> + '_ {
        (0..self.len()).map(move |i| self.get(i).expect("index in range"))
    }
}

fn shift_factor(max: u64, n: usize) -> u64 {
    n as u64 * max + 1
}

/// The family `{N v + w}` used for maximum-weight solving, with
/// `N = n * max(family) + 1`.
pub fn shift_for_input_weights(v: &[u64], family: &Family, n: usize) -> Result<Family, WeightError> {
    if v.len() != family.m() {
        return Err(WeightError::LengthMismatch { expected: family.m(), got: v.len() });
    }
    Ok(Family::Shifted { base: Box::new(family.clone()), v: v.to_vec(), n })
}
