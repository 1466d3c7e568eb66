//! Perfect (and maximum-weight perfect) fractional linear matroid matching by
//! isolation and determinant degrees.
//!
//! For each weight assignment `w` of a family, after making its entries
//! distinct:
//!
//! 1. `W = deg det Ã_w(1)`;
//! 2. for each line `e`, `W^e = deg det Ã_{w^e}(1)` with `w^e = 4w + 1_e`,
//!    and `y_e = 1, 1/2, 0` for `W^e = 4W + 8, 4W + 4, 4W`;
//! 3. accept `y` if `|y| = n/2` and `det Ã_w(y) != 0`.
//!
//! When `w` isolates the optimum over perfect matchings, `W = 8 w·z*` and the
//! three cases recover `z*` exactly. Any other `W^e` aborts the element. The
//! final determinant test makes every accepted `y` a genuine perfect
//! fractional matching regardless of how the probes behaved.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{is_nonzero_poly_det, total_degree_of_det, Degree, DegreeMode};
use crate::error::AlgebraError;
use crate::instance::{build_atilde, HalfIntegralVector, Instance};
use crate::weights::{make_distinct, perturb, shift_for_input_weights, Family, WeightAssignment};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveConfig {
    /// Independent repetitions of every degree probe and of the final test.
    pub trials: usize,
    pub seed: u64,
    /// Process family elements on the rayon pool; output is identical.
    pub parallel: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { trials: 3, seed: 0x5eed, parallel: false }
    }
}

/// Deterministic randomness for one probe of one family element.
pub fn probe_rng(seed: u64, element: u64, slot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(element);
    rng.set_word_pos((slot as u128) << 48);
    rng
}

/// `deg det Ã_w(1)`.
pub fn degree_probe(
    inst: &Instance,
    w: &[u64],
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Degree, AlgebraError> {
    let m = build_atilde(inst, w, &HalfIntegralVector::ones(inst.m())).map_err(into_algebra)?;
    total_degree_of_det(&m, DegreeMode::Randomized, trials, inst.field(), rng)
}

fn into_algebra(e: crate::error::InstanceError) -> AlgebraError {
    match e {
        crate::error::InstanceError::Algebra(a) => a,
        other => AlgebraError::DimensionMismatch(other.to_string()),
    }
}

/// Why a family element produced no candidate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Abort {
    /// `det Ã_w(1)` vanished.
    ZeroDeterminant,
    /// A perturbed degree outside `{4W, 4W + 4, 4W + 8}`.
    IllegalPerturbedDegree { line: usize, degree: Degree },
    /// The candidate failed `|y| = n/2` or the determinant test.
    VerificationFailed { y: HalfIntegralVector },
    ProbeError { message: String },
}

/// `y_e` from `W^e` relative to `W`: doubled value, or `None` for an illegal degree.
fn classify(big_w: u64, we: Degree) -> Option<u8> {
    let we = we.finite()?;
    match we.checked_sub(4 * big_w)? {
        0 => Some(0),
        4 => Some(1),
        8 => Some(2),
        _ => None,
    }
}

/// Candidate `y` from the perturbed probes, with every `W^e`.
pub fn extract_candidate(
    inst: &Instance,
    w: &WeightAssignment,
    big_w: u64,
    trials: usize,
    mut rng_for: impl FnMut(usize) -> ChaCha8Rng,
) -> Result<(HalfIntegralVector, Vec<Degree>), Abort> {
    let mut doubled = Vec::with_capacity(inst.m());
    let mut degrees = Vec::with_capacity(inst.m());
    for e in 0..inst.m() {
        let we = perturb(w, e).expect("line index in range");
        let deg = degree_probe(inst, &we.values, trials, &mut rng_for(e))
            .map_err(|err| Abort::ProbeError { message: err.to_string() })?;
        degrees.push(deg);
        match classify(big_w, deg) {
            Some(d) => doubled.push(d),
            None => return Err(Abort::IllegalPerturbedDegree { line: e, degree: deg }),
        }
    }
    Ok((HalfIntegralVector::from_doubled(doubled).expect("entries in 0..=2"), degrees))
}

/// `|y| = n/2` and `det Ã_w(y) != 0` at one of `trials` random points.
pub fn verify_candidate(
    inst: &Instance,
    w: &[u64],
    y: &HalfIntegralVector,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<bool, AlgebraError> {
    if y.len() != inst.m() || y.size_doubled() != inst.n() as u64 {
        return Ok(false);
    }
    let m = build_atilde(inst, w, y).map_err(into_algebra)?;
    is_nonzero_poly_det(&m, trials, inst.field(), rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Matching,
    None,
}

/// Everything a single family element produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElementTrace {
    pub index: u64,
    pub weights: WeightAssignment,
    /// The distinct-entry weights actually probed.
    pub distinct: Vec<u64>,
    pub degree: Degree,
    pub perturbed_degrees: Vec<Degree>,
    pub result: Result<HalfIntegralVector, Abort>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    pub outcome: Outcome,
    /// Doubled entries of the matching, when one was found.
    pub y: Option<HalfIntegralVector>,
    pub prime: u64,
    pub trials: usize,
    pub seed: u64,
    pub family_size: u64,
    pub elements_tried: u64,
    pub elements_aborted: u64,
    /// Trace of the accepted element.
    pub witness: Option<ElementTrace>,
    /// Input objective for maximum-weight solving.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<Vec<u64>>,
    /// First probe error met, if any (a too-small field, for instance).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_error: Option<String>,
}

/// Runs the three steps on one family element.
pub fn run_element(inst: &Instance, index: u64, w: WeightAssignment, config: &SolveConfig) -> ElementTrace {
    let distinct = make_distinct(&w);
    let mut trace = ElementTrace {
        index,
        weights: w,
        distinct: distinct.values.clone(),
        degree: Degree::MinusInfinity,
        perturbed_degrees: Vec::new(),
        result: Err(Abort::ZeroDeterminant),
    };
    let m = inst.m() as u64;
    let degree = match degree_probe(inst, &distinct.values, config.trials, &mut probe_rng(config.seed, index, 0)) {
        Ok(d) => d,
        Err(err) => {
            trace.result = Err(Abort::ProbeError { message: err.to_string() });
            return trace;
        }
    };
    trace.degree = degree;
    let Degree::Finite(big_w) = degree else {
        return trace;
    };
    let extracted = extract_candidate(inst, &distinct, big_w, config.trials, |e| {
        probe_rng(config.seed, index, 1 + e as u64)
    });
    let y = match extracted {
        Ok((y, degs)) => {
            trace.perturbed_degrees = degs;
            y
        }
        Err(abort) => {
            trace.result = Err(abort);
            return trace;
        }
    };
    let ok = verify_candidate(inst, &distinct.values, &y, config.trials, &mut probe_rng(config.seed, index, m + 1));
    trace.result = match ok {
        Ok(true) => Ok(y),
        Ok(false) => Err(Abort::VerificationFailed { y }),
        Err(err) => Err(Abort::ProbeError { message: err.to_string() }),
    };
    trace
}

/// Searches `family` in order and returns the first verified matching.
pub fn solve(inst: &Instance, family: &Family, config: &SolveConfig) -> SolveReport {
    let total = family.len();
    let mut report = SolveReport {
        outcome: Outcome::None,
        y: None,
        prime: inst.field().modulus(),
        trials: config.trials,
        seed: config.seed,
        family_size: total,
        elements_tried: 0,
        elements_aborted: 0,
        witness: None,
        objective: None,
        first_error: None,
    };
    let batch = if config.parallel { (rayon::current_num_threads() as u64 * 2).max(1) } else { 1 };
    let mut start = 0;
    while start < total {
        let end = (start + batch).min(total);
        let run = |i: u64| run_element(inst, i, family.get(i).expect("index in range"), config);
        let traces: Vec<ElementTrace> =
            if config.parallel { (start..end).into_par_iter().map(run).collect() } else { (start..end).map(run).collect() };
        // Traces are in index order, so the earliest success wins in both modes.
        for trace in traces {
            report.elements_tried += 1;
            match &trace.result {
                Ok(y) => {
                    report.outcome = Outcome::Matching;
                    report.y = Some(y.clone());
                    report.witness = Some(trace);
                    return report;
                }
                Err(abort) => {
                    if !matches!(abort, Abort::ZeroDeterminant) {
                        report.elements_aborted += 1;
                        log::debug!("family element {} aborted: {:?}", trace.index, abort);
                    }
                    if let (Abort::ProbeError { message }, None) = (abort, &report.first_error) {
                        report.first_error = Some(message.clone());
                    }
                }
            }
        }
        start = end;
    }
    report
}

/// Maximum-weight perfect matching for the objective `v`, using the shifted
/// family `{N v + w}`.
pub fn solve_weighted(
    inst: &Instance,
    v: &[u64],
    family: &Family,
    config: &SolveConfig,
) -> Result<SolveReport, crate::error::WeightError> {
    let shifted = shift_for_input_weights(v, family, inst.n())?;
    let mut report = solve(inst, &shifted, config);
    report.objective = Some(v.to_vec());
    Ok(report)
}
