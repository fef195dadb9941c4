//! The `qprim` command-line interface.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{classical_embed, validate, KrausChannel, StochasticMatrix};
use crate::error::{invalid, Error, Result};
use crate::generators::{named_channel, random_channel, Generated, GeneratorSpec};
use crate::indices::{classical_exponent, primitivity_report, primitivity_report_with_index, IndexOptions, QSearch};
use crate::io::{parse_any, Input};
use crate::mps::{gamma_rank, injectivity_length_report, kernel_dim, normalize_tensor, MpsTensor};
use crate::numerics::{exact::ExactSpanEngine, ComplexMatrix, TolerancePolicy};
use crate::report::{analyze, to_json, AnalyzeOptions};

/// Environment variable overriding the relative rank tolerance.
pub const TOL_RANK_ENV: &str = "QPRIM_TOL_RANK";

/// CSV header written by `sweep`.
pub const SWEEP_HEADER: &str = "seed,D,d,i,q_lower,q_upper,thm1_case,thm1_bound,bound_respected";

#[derive(Parser, Debug)]
#[command(name = "qprim", version, about = "Primitivity indices of quantum channels")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Source {
    /// Channel, stochastic matrix or MPS tensor JSON file.
    file: Option<PathBuf>,
    /// Built-in generator, e.g. `pauli` or `shift_chord:D=4`.
    #[arg(long = "gen", value_name = "SPEC", conflicts_with = "file")]
    generator: Option<String>,
}

#[derive(Args, Debug)]
struct Search {
    /// Random restarts per `n` in the search for a rank-deficient output.
    #[arg(long, default_value_t = 64)]
    effort: usize,
    /// Seed of the search and of the Wielandt witness sampling.
    #[arg(long = "search-seed", default_value_t = 0)]
    search_seed: u64,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check complete positivity, trace preservation and count Kraus operators.
    Validate {
        #[command(flatten)]
        src: Source,
    },
    /// Full analysis report.
    Analyze {
        #[command(flatten)]
        src: Source,
        /// Human-readable text instead of JSON.
        #[arg(long)]
        pretty: bool,
        /// Decide span ranks exactly over the Gaussian rationals.
        #[arg(long)]
        exact: bool,
        /// Include per-stage wall times.
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        search: Search,
    },
    /// The index i and the bracket on q.
    Index {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        search: Search,
    },
    /// Exponent p of a column-stochastic matrix.
    Classical {
        #[command(flatten)]
        src: Source,
    },
    /// Gauge normalization and injectivity of an MPS tensor.
    Mps {
        #[command(flatten)]
        src: Source,
        /// Also compute the rank of the length-L coefficient map.
        #[arg(long, value_name = "L")]
        gamma: Option<usize>,
    },
    /// Indices of seeded random channels as CSV.
    Sweep {
        #[arg(long = "D", default_value_t = 3)]
        big_d: usize,
        #[arg(long = "d", default_value_t = 2)]
        small_d: usize,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code: 0 on success, 1 on invalid input, 2 on internal or
/// numerical failure.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind::*;
            let to_out = matches!(e.kind(), DisplayHelp | DisplayVersion);
            if to_out {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            let _ = write!(err, "{}", e.render());
            return 1;
        }
    };
    let result = tolerance_from_env().and_then(|pol| execute(cli.cmd, &pol, out));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::NotPrimitive | Error::ResourceLimit(_) => 1,
        Error::NumericalFailure(_) | Error::GaugeFailure(_) => 2,
    }
}

/// Default policy with `rank_rel` taken from `QPRIM_TOL_RANK` when set.
pub fn tolerance_from_env() -> Result<TolerancePolicy> {
    let pol = TolerancePolicy::default();
    match std::env::var(TOL_RANK_ENV) {
        Ok(v) => {
            let r: f64 = v.trim().parse().map_err(|_| invalid(format!("{TOL_RANK_ENV}={v} is not a number")))?;
            pol.with_rank_rel(r)
        }
        Err(_) => Ok(pol),
    }
}

struct Loaded {
    input: Input,
    bytes: Vec<u8>,
}

fn load(src: &Source, pol: &TolerancePolicy) -> Result<Loaded> {
    match (&src.file, &src.generator) {
        (Some(path), None) => {
            let bytes = std::fs::read(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
            let text = std::str::from_utf8(&bytes).map_err(|_| invalid("input is not UTF-8"))?;
            Ok(Loaded { input: parse_any(text, pol)?, bytes })
        }
        (None, Some(spec)) => {
            let spec: GeneratorSpec = spec.parse()?;
            let input = match named_channel(&spec)? {
                Generated::Channel(ch) => Input::Channel { raw: ch.kraus().to_vec(), channel: ch },
                Generated::Stochastic(s) => Input::Stochastic(s),
                Generated::Tensor(t) => Input::Tensor(t),
            };
            Ok(Loaded { input, bytes: spec.to_string().into_bytes() })
        }
        _ => Err(invalid("give exactly one of <FILE> or --gen")),
    }
}

/// The channel an input stands for: stochastic matrices are embedded and
/// tensors gauge-normalized (raw tensor when normalization fails).
fn as_channel(input: Input, pol: &TolerancePolicy) -> Result<(KrausChannel, Vec<ComplexMatrix>)> {
    match input {
        Input::Channel { channel, raw } => Ok((channel, raw)),
        Input::Stochastic(s) => {
            let ch = classical_embed(&s, pol)?;
            Ok((ch.clone(), ch.kraus().to_vec()))
        }
        Input::Tensor(t) => match normalize_tensor(&t, pol) {
            Ok((b, ch)) => Ok((ch, b.matrices().to_vec())),
            Err(Error::GaugeFailure(_)) => Ok((t.raw_channel(pol)?, t.matrices().to_vec())),
            Err(e) => Err(e),
        },
    }
}

fn index_options(s: &Search) -> IndexOptions {
    IndexOptions {
        search: QSearch { effort: s.effort, seed: s.search_seed },
        witness_seed: s.search_seed,
        ..IndexOptions::default()
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    writeln!(out, "{text}").map_err(|e| Error::NumericalFailure(format!("write failed: {e}")))
}

#[derive(Serialize)]
struct IndexOut {
    i: Option<usize>,
    q_lower: Option<usize>,
    q_upper: Option<usize>,
    q_exact: bool,
}

#[derive(Serialize)]
struct MpsOut {
    phys_d: usize,
    bond_dim: usize,
    gauge_failed: bool,
    injectivity_length: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<GammaOut>,
}

#[derive(Serialize)]
struct GammaOut {
    length: usize,
    rank: usize,
    injective: bool,
    kernel_dim: usize,
}

fn execute(cmd: Cmd, pol: &TolerancePolicy, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Cmd::Validate { src } => {
            let (ch, _) = as_channel(load(&src, pol)?.input, pol)?;
            emit(out, &to_json(&validate(&ch, pol), false))
        }
        Cmd::Analyze { src, pretty, exact, timing, search } => {
            let loaded = load(&src, pol)?;
            let (ch, raw) = as_channel(loaded.input, pol)?;
            let opts = AnalyzeOptions { index: index_options(&search), exact, timing };
            let rep = analyze(&ch, &raw, &loaded.bytes, &opts, pol)?;
            if pretty {
                emit(out, rep.to_text().trim_end())
            } else {
                emit(out, &to_json(&rep, false))
            }
        }
        Cmd::Index { src, exact, search } => {
            let (ch, raw) = as_channel(load(&src, pol)?.input, pol)?;
            let opts = index_options(&search);
            let rep = if exact {
                let i = ExactSpanEngine::new(&raw)?.kraus_rank_index();
                primitivity_report_with_index(&ch, i, &opts, pol)?
            } else {
                primitivity_report(&ch, &opts, pol)?
            };
            let o = IndexOut { i: rep.i_index, q_lower: rep.q_lower, q_upper: rep.q_upper, q_exact: rep.q_exact };
            emit(out, &to_json(&o, false))
        }
        Cmd::Classical { src } => {
            let s: StochasticMatrix = match load(&src, pol)?.input {
                Input::Stochastic(s) => s,
                _ => return Err(invalid("classical expects a stochastic matrix")),
            };
            emit(out, &serde_json::json!({ "p": classical_exponent(&s)? }).to_string())
        }
        Cmd::Mps { src, gamma } => {
            let t: MpsTensor = match load(&src, pol)?.input {
                Input::Tensor(t) => t,
                _ => return Err(invalid("mps expects an MPS tensor")),
            };
            let inj = injectivity_length_report(&t, pol)?;
            let gamma = match gamma {
                Some(len) => {
                    let rank = gamma_rank(&t, len, pol)?;
                    Some(GammaOut {
                        length: len,
                        rank,
                        injective: rank == t.bond_dim() * t.bond_dim(),
                        kernel_dim: kernel_dim(&t, len, pol)?,
                    })
                }
                None => None,
            };
            let o = MpsOut {
                phys_d: t.phys_d(),
                bond_dim: t.bond_dim(),
                gauge_failed: inj.gauge_failed,
                injectivity_length: inj.length,
                gamma,
            };
            emit(out, &to_json(&o, false))
        }
        Cmd::Sweep { big_d, small_d, count, seed, jobs } => {
            emit(out, sweep_csv(big_d, small_d, count, seed, jobs, pol)?.trim_end())
        }
    }
}

/// One CSV row per seed in `seed..seed + count`, in seed order regardless
/// of `jobs`.
pub fn sweep_csv(dim: usize, d: usize, count: u64, seed: u64, jobs: usize, pol: &TolerancePolicy) -> Result<String> {
    if jobs == 0 {
        return Err(invalid("--jobs must be positive"));
    }
    if dim == 0 || d == 0 || d > dim * dim {
        return Err(invalid(format!("sweep needs 1 <= d <= D^2, got D={dim}, d={d}")));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::NumericalFailure(format!("thread pool: {e}")))?;
    let seeds: Vec<u64> = (0..count).map(|k| seed.wrapping_add(k)).collect();
    let rows: Vec<Result<String>> = pool.install(|| seeds.par_iter().map(|&s| sweep_row(dim, d, s, pol)).collect());
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for row in rows {
        csv.push_str(&row?);
        csv.push('\n');
    }
    Ok(csv)
}

fn sweep_row(dim: usize, d: usize, seed: u64, pol: &TolerancePolicy) -> Result<String> {
    let ch = random_channel(dim, d, seed)?;
    let r = primitivity_report(&ch, &IndexOptions::default(), pol)?;
    let opt = |v: Option<usize>| v.map_or_else(|| "none".to_string(), |v| v.to_string());
    Ok(format!(
        "{seed},{dim},{},{},{},{},{},{},{}",
        ch.d(),
        opt(r.i_index),
        opt(r.q_lower),
        opt(r.q_upper),
        r.thm1_case.as_str(),
        r.thm1_bound,
        r.bound_respected
    ))
}
