//! `fracmatroid`: command-line driver.
//!
//! Exit codes: 0 success, 1 input error (or a failed self-check), 2 no perfect
//! matching / no witness, 3 enumeration guard or size limit exceeded.

use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fracmatroid::algebra::{PrimeField, DEFAULT_PRIME};
use fracmatroid::corpus;
use fracmatroid::error::{GuardError, HittingSetError};
use fracmatroid::format::{instance_to_json, parse_instance, parse_matrix, parse_signed_list, parse_unsigned_list};
use fracmatroid::hitting_set::{find_witness, HittingSet, WitnessSearch};
use fracmatroid::instance::Instance;
use fracmatroid::lattice::{decompose, lambda, near_shortest_with_factor, Decomposition};
use fracmatroid::oracle::Polytope;
use fracmatroid::selfcheck::{self, Faults, Scale};
use fracmatroid::solver::{solve, solve_weighted, Outcome, SolveConfig};
use fracmatroid::weights::{Family, DEFAULT_BRUTE_K, DEFAULT_GTV_Q, DEFAULT_GTV_T};

const EXIT_INPUT: u8 = 1;
const EXIT_NONE: u8 = 2;
const EXIT_GUARD: u8 = 3;
const HITSET_BRUTE_K: u64 = 2;

#[derive(Parser)]
#[command(name = "fracmatroid", version, about = "Fractional linear matroid matching toolkit")]
struct Cli {
    /// Seed for every random choice (probe points, substitutions, generators).
    #[arg(long, global = true, default_value_t = 0x5eed)]
    rng_seed: u64,
    /// Log progress to stderr (RUST_LOG overrides).
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find a perfect fractional matching (or a maximum-weight one with --weighted).
    Solve {
        /// Instance file, or `-` for stdin.
        instance: PathBuf,
        /// Objective weights, one nonnegative integer per line.
        #[arg(long, value_name = "FILE")]
        weighted: Option<PathBuf>,
        #[command(flatten)]
        family: FamilyArgs,
        /// Repetitions of every randomized probe.
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long)]
        parallel: bool,
    },
    /// Brute-force maximum over the half-integral points of the polytope.
    Oracle {
        instance: PathBuf,
        /// Objective weights; defaults to all ones (maximum size).
        #[arg(long, value_name = "FILE")]
        weights: Option<PathBuf>,
        /// Restrict to perfect matchings.
        #[arg(long)]
        perfect: bool,
    },
    /// Weight families.
    Weights {
        #[command(subcommand)]
        command: WeightsCommand,
    },
    /// Circuit lattices of 0/1/2 constraint matrices.
    Lattice {
        #[command(subcommand)]
        command: LatticeCommand,
    },
    /// Hitting sets for rank-two skew-symmetric coefficient tuples.
    Hitset {
        #[command(subcommand)]
        command: HitsetCommand,
    },
    /// Generate an instance file on stdout.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Run the acceptance checks.
    Selfcheck {
        #[arg(value_enum, default_value_t = ScaleArg::Small)]
        scale: ScaleArg,
        /// Print the summary as JSON instead of PASS/FAIL lines.
        #[arg(long)]
        json: bool,
        /// Inject a known defect to test the harness.
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Gtv,
    Brute,
}

#[derive(Args)]
struct FamilyArgs {
    /// Weight family [default: gtv; brute for `hitset`].
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Largest base `t` of the power-residue family.
    #[arg(long, default_value_t = DEFAULT_GTV_T)]
    gtv_t: u64,
    /// Largest prime modulus `q` of the power-residue family.
    #[arg(long, default_value_t = DEFAULT_GTV_Q)]
    gtv_q: u64,
    /// Weight range `[K]` of the brute family [default: 3; 2 for `hitset`].
    #[arg(long)]
    brute_k: Option<u64>,
}

impl FamilyArgs {
    fn family(&self, m: usize) -> Result<Family> {
        self.family_or(m, Mode::Gtv, DEFAULT_BRUTE_K)
    }

    fn family_or(&self, m: usize, mode: Mode, brute_k: u64) -> Result<Family> {
        Ok(match (self.mode.unwrap_or(mode), m) {
            (_, 0) => Family::explicit(0, vec![vec![]])?,
            (Mode::Gtv, _) => Family::gtv(m, self.gtv_t, self.gtv_q)?,
            (Mode::Brute, _) => Family::brute(m, self.brute_k.unwrap_or(brute_k))?,
        })
    }

    /// Hitting sets have `|W| * |S|^4` tuples with `|S|` growing with the
    /// largest weight, so the small brute family is the practical default.
    fn hitset_family(&self, m: usize) -> Result<Family> {
        self.family_or(m, Mode::Brute, HITSET_BRUTE_K)
    }
}

#[derive(Subcommand)]
enum WeightsCommand {
    /// Print family elements as JSON lines.
    Gen {
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        family: FamilyArgs,
        /// Print at most this many elements.
        #[arg(long)]
        limit: Option<u64>,
    },
}

#[derive(Subcommand)]
enum LatticeCommand {
    /// Split a lattice vector into alternating circuits.
    Decompose {
        matrix: PathBuf,
        /// Comma-separated integers.
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Length of the shortest nonzero lattice vector.
    Lambda { matrix: PathBuf },
    /// All lattice vectors shorter than `factor * lambda`.
    Near {
        matrix: PathBuf,
        /// A fraction `a/b` in (0, 2].
        #[arg(long, default_value = "2")]
        factor: String,
    },
}

#[derive(Subcommand)]
enum HitsetCommand {
    /// Print tuples of the hitting set as JSON lines.
    Gen {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = DEFAULT_PRIME)]
        prime: u64,
        /// Index of the first tuple to print.
        #[arg(long, default_value_t = 0)]
        start: u128,
        /// Number of tuples to print (default: the rest of the set).
        #[arg(long)]
        count: Option<u128>,
    },
    /// Search the hitting set for a tuple making the substituted matrix nonsingular.
    Test {
        instance: PathBuf,
        #[command(flatten)]
        family: FamilyArgs,
        /// Stop after this many tuples.
        #[arg(long)]
        budget: Option<u128>,
        #[arg(long)]
        parallel: bool,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// One coordinate line `<e_u, e_v>` per edge.
    Graph {
        #[arg(long)]
        vertices: usize,
        /// Edge list such as `0-1,1-2,0-2`.
        #[arg(long)]
        edges: String,
        #[arg(long, default_value_t = DEFAULT_PRIME)]
        prime: u64,
    },
    /// Independent random pairs with small coordinates.
    Random {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Coordinates are drawn from `[-range, range]`.
        #[arg(long, default_value_t = 2)]
        range: i64,
        #[arg(long, default_value_t = DEFAULT_PRIME)]
        prime: u64,
    },
    /// Two linear matroids of rank `r` on `m` elements, as lines in `F^{2r}`.
    Intersection {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        range: i64,
        #[arg(long, default_value_t = DEFAULT_PRIME)]
        prime: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Small,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    CorruptPfaffian,
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read_input(path)?).with_context(|| format!("loading instance {}", path.display()))
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string(v)?);
    Ok(())
}

/// Writes JSON lines, treating a closed pipe as a normal end of output.
fn stream_json<T: serde::Serialize>(items: impl Iterator<Item = T>) -> Result<()> {
    let mut out = BufWriter::new(io::stdout().lock());
    for item in items {
        let line = serde_json::to_string(&item)?;
        if let Err(e) = writeln!(out, "{line}") {
            if e.kind() == io::ErrorKind::BrokenPipe {
                return Ok(());
            }
            return Err(e.into());
        }
    }
    match out.flush() {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn parse_edges(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (u, v) = t.split_once('-').with_context(|| format!("edge {t:?} is not of the form u-v"))?;
            Ok((u.trim().parse()?, v.trim().parse()?))
        })
        .collect()
}

fn parse_factor(s: &str) -> Result<(u64, u64)> {
    Ok(match s.split_once('/') {
        Some((a, b)) => (a.trim().parse()?, b.trim().parse()?),
        None => (s.trim().parse()?, 1),
    })
}

fn run(cli: Cli) -> Result<u8> {
    let seed = cli.rng_seed;
    match cli.command {
        Command::Solve { instance, weighted, family, trials, parallel } => {
            let inst = load_instance(&instance)?;
            let fam = family.family(inst.m())?;
            let config = SolveConfig { trials, seed, parallel };
            let report = match weighted {
                Some(path) => {
                    let v = parse_unsigned_list(&read_input(&path)?)?;
                    solve_weighted(&inst, &v, &fam, &config)?
                }
                None => solve(&inst, &fam, &config),
            };
            print_json(&report)?;
            if let Some(err) = &report.first_error {
                log::warn!("some probes failed: {err}");
            }
            Ok(if report.outcome == Outcome::Matching { 0 } else { EXIT_NONE })
        }
        Command::Oracle { instance, weights, perfect } => {
            let inst = load_instance(&instance)?;
            let w = weights.map(|p| read_input(&p).map(|s| parse_unsigned_list(&s))).transpose()?.transpose()?;
            if let Some(w) = &w {
                if w.len() != inst.m() {
                    bail!("expected {} weights, got {}", inst.m(), w.len());
                }
            }
            let polytope = Polytope::new(&inst)?;
            let optimum = if perfect {
                polytope.maximize_perfect(w.as_deref())?
            } else {
                Some(polytope.maximize(w.as_deref())?)
            };
            match optimum {
                Some(o) => {
                    print_json(&json!({"value": o.value_doubled, "maximizers": o.maximizers, "unique": o.is_unique()}))?;
                    Ok(0)
                }
                None => {
                    print_json(&json!({"value": Value::Null, "maximizers": []}))?;
                    Ok(EXIT_NONE)
                }
            }
        }
        Command::Weights { command: WeightsCommand::Gen { m, family, limit } } => {
            let fam = family.family(m)?;
            stream_json(fam.iter().take(limit.map_or(usize::MAX, |l| l as usize)))?;
            Ok(0)
        }
        Command::Lattice { command } => {
            match command {
                LatticeCommand::Decompose { matrix, x } => {
                    let d = parse_matrix(&read_input(&matrix)?)?;
                    let x = parse_signed_list(&x)?;
                    let result = decompose(&d, &x)?;
                    print_json(&result)?;
                    if result == Decomposition::NotInLattice {
                        log::info!("D x = {:?}", d.apply(&x));
                    }
                }
                LatticeCommand::Lambda { matrix } => {
                    let d = parse_matrix(&read_input(&matrix)?)?;
                    print_json(&json!({ "lambda": lambda(&d) }))?;
                }
                LatticeCommand::Near { matrix, factor } => {
                    let d = parse_matrix(&read_input(&matrix)?)?;
                    let (numer, denom) = parse_factor(&factor)?;
                    let vectors = near_shortest_with_factor(&d, numer, denom)?;
                    print_json(&json!({ "lambda": lambda(&d), "count": vectors.len(), "vectors": vectors }))?;
                }
            }
            Ok(0)
        }
        Command::Hitset { command } => match command {
            HitsetCommand::Gen { m, n, family, prime, start, count } => {
                let set = HittingSet::new(n, family.hitset_family(m)?, PrimeField::new(prime)?)?;
                let end = count.map_or(set.len(), |c| start.saturating_add(c).min(set.len()));
                stream_json((start..end).map(|i| set.get(i).expect("index in range")))?;
                Ok(0)
            }
            HitsetCommand::Test { instance, family, budget, parallel } => {
                let inst = load_instance(&instance)?;
                let set = HittingSet::new(inst.n(), family.hitset_family(inst.m())?, inst.field())?;
                let result = find_witness(&inst, &set, budget, parallel)?;
                print_json(&result)?;
                Ok(if matches!(result, WitnessSearch::NoWitness { .. }) { EXIT_NONE } else { 0 })
            }
        },
        Command::Gen { kind } => {
            let inst = match kind {
                GenKind::Graph { vertices, edges, prime } => {
                    let edges = parse_edges(&edges)?;
                    if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u == v || u.max(v) >= vertices) {
                        bail!("edge {u}-{v} is a loop or names a vertex outside 0..{vertices}");
                    }
                    corpus::graph(PrimeField::new(prime)?, vertices, &edges)?
                }
                GenKind::Random { m, n, range, prime } => {
                    if n < 2 || range < 1 {
                        bail!("random instances need n >= 2 and range >= 1");
                    }
                    corpus::random(PrimeField::new(prime)?, m, n, range, seed)
                }
                GenKind::Intersection { m, r, range, prime } => {
                    if r < 1 || range < 1 {
                        bail!("intersection instances need r >= 1 and range >= 1");
                    }
                    corpus::intersection(PrimeField::new(prime)?, m, r, range, seed)
                }
            };
            print!("{}", instance_to_json(&inst));
            Ok(0)
        }
        Command::Selfcheck { scale, json, inject_fault } => {
            let scale = match scale {
                ScaleArg::Small => Scale::Small,
                ScaleArg::Full => Scale::Full,
            };
            let faults = Faults { corrupt_pfaffian: matches!(inject_fault, Some(FaultArg::CorruptPfaffian)) };
            let summary = selfcheck::run(scale, seed, faults);
            if json {
                print_json(&summary)?;
            } else {
                for c in &summary.criteria {
                    let status = if c.passed { "PASS" } else { "FAIL" };
                    println!("{status} criterion {}: {} ({})", c.id, c.name, c.detail);
                }
            }
            Ok(if summary.passed { 0 } else { EXIT_INPUT })
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let guard = err.chain().any(|e| {
        e.downcast_ref::<GuardError>().is_some() || matches!(e.downcast_ref::<HittingSetError>(), Some(HittingSetError::TooLarge))
    });
    if guard {
        EXIT_GUARD
    } else {
        EXIT_INPUT
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let level = if cli.verbose { "debug" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
