//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use common::{brute_span_dim, walk_exponent};
use qprim::channel::classical_embed;
use qprim::generators::*;
use qprim::indices::{
    classical_exponent, kraus_rank_index, primitivity_index_q, primitivity_report, wielandt_cap, IndexOptions,
    PrimitivityReport, QSearch, WielandtCase,
};
use qprim::mps::{gamma_rank, injectivity_length, normalize_tensor};
use qprim::spans::s_dims;
use qprim::spectral::{classify_primitivity, zero_error_classify, ZeroErrorCase};
use qprim::{Error, KrausChannel, TolerancePolicy};

type Outcome = Result<String, String>;

fn pol() -> TolerancePolicy {
    TolerancePolicy::default()
}

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(elapsed: Duration, limit: Duration) -> Outcome {
    if elapsed < limit {
        Ok(String::new())
    } else {
        Err(format!("took {:.3} s, limit {:.3} s", elapsed.as_secs_f64(), limit.as_secs_f64()))
    }
}

fn qprim_bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qprim"))
        .args(args)
        .env_remove("QPRIM_TOL_RANK")
        .output()
        .expect("qprim binary runs")
}

fn pauli_example() -> Outcome {
    let start = Instant::now();
    let out = qprim_bin(&["analyze", "--gen", "pauli"]);
    let elapsed = start.elapsed();
    check!(out.status.success(), "exit {:?}", out.status.code());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let p = &v["primitivity"];
    check!(p["i_index"] == 2, "i = {}", p["i_index"]);
    check!(p["q_lower"] == 1 && p["q_upper"] == 1 && p["q_exact"] == true, "q bracket {p}");
    within(elapsed, Duration::from_millis(100))?;
    Ok("i = 2, q = 1".into())
}

fn extremal_family() -> Outcome {
    let start = Instant::now();
    for dim in 2..=6 {
        let ch = shift_chord_channel(dim).map_err(|e| e.to_string())?;
        let i = kraus_rank_index(&ch, &pol()).map_err(|e| e.to_string())?;
        check!(i == Some(dim * dim - dim), "D={dim}: i = {i:?}");
        if (3..=5).contains(&dim) {
            let n = dim * (dim - 1) - 1;
            let s = s_dims(&ch, n, &pol()).map_err(|e| e.to_string())?[n - 1];
            check!(s < dim * dim, "D={dim}: dim S_{n} = {s}");
        }
    }
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok("i = D^2 - D for D = 2..6".into())
}

fn classical_sharpness() -> Outcome {
    for dim in 3..=8 {
        let w = wielandt_digraph(dim).map_err(|e| e.to_string())?;
        let p = classical_exponent(&w).map_err(|e| e.to_string())?;
        let oracle = walk_exponent(&w.pattern());
        check!(p == Some(wielandt_cap(dim)) && oracle == p, "D={dim}: p = {p:?}, oracle {oracle:?}");
        if dim <= 5 {
            let ch = classical_embed(&w, &pol()).map_err(|e| e.to_string())?;
            let i = kraus_rank_index(&ch, &pol()).map_err(|e| e.to_string())?;
            let q = primitivity_index_q(&ch, QSearch::default(), &pol()).map_err(|e| e.to_string())?;
            check!(i == p, "D={dim}: i = {i:?}, p = {p:?}");
            check!(q.q_exact && Some(q.q_lower) == p && Some(q.q_upper) == p, "D={dim}: q {q:?}");
        }
    }
    Ok("p = D^2 - 2D + 2 for D = 3..8; i = q = p for D = 3..5".into())
}

struct SweepItem {
    dim: usize,
    d: usize,
    seed: u64,
    verdict_primitive: bool,
    report: PrimitivityReport,
}

fn sweep_instances() -> Vec<(usize, usize, u64)> {
    (0..500u64)
        .map(|k| {
            let dim = 2 + (k % 3) as usize;
            let d = 2 + (k as usize / 3) % (dim * dim - 1);
            (dim, d, k)
        })
        .collect()
}

fn run_sweep() -> Result<(Vec<SweepItem>, Duration), String> {
    let start = Instant::now();
    let mut items = Vec::new();
    for (dim, d, seed) in sweep_instances() {
        let ch = random_channel(dim, d, seed).map_err(|e| e.to_string())?;
        let report = primitivity_report(&ch, &IndexOptions::default(), &pol()).map_err(|e| e.to_string())?;
        let verdict_primitive = classify_primitivity(&ch, &pol()).map_err(|e| e.to_string())?.is_primitive();
        items.push(SweepItem { dim, d, seed, verdict_primitive, report });
    }
    Ok((items, start.elapsed()))
}

fn wielandt_bound_sweep(items: &[SweepItem], elapsed: Duration) -> Outcome {
    let mut finite = 0;
    for it in items {
        if let Some(i) = it.report.i_index {
            finite += 1;
            check!(it.report.thm1_case != WielandtCase::NotApplicable, "seed {}: case not selected", it.seed);
            check!(
                i <= it.report.thm1_bound && it.report.bound_respected,
                "seed {} (D={}, d={}): i = {i} > bound {}",
                it.seed,
                it.dim,
                it.d,
                it.report.thm1_bound
            );
        }
    }
    within(elapsed, Duration::from_secs(300))?;
    Ok(format!("{} channels, {finite} with finite i, 0 violations, {:.2} s", items.len(), elapsed.as_secs_f64()))
}

fn named_channels() -> Result<Vec<(String, KrausChannel)>, String> {
    let specs = [
        "pauli",
        "shift_chord:D=2",
        "shift_chord:D=3",
        "shift_chord:D=4",
        "wielandt_digraph:D=3",
        "wielandt_digraph:D=4",
        "depolarizing:D=2,w=1",
        "depolarizing:D=3,w=0.5",
        "depolarizing:D=2,w=0",
        "amplitude_damping:gamma=0.5",
        "amplitude_damping:gamma=1",
        "cyclic_shift_unitary:D=3",
        "cyclic_shift_unitary:D=2",
        "ghz_tensor:D=2",
        "ghz_tensor:D=3",
        "aklt_tensor",
        "random_channel:D=3,d=1,seed=4",
        "random_channel:D=2,d=4,seed=1",
    ];
    let mut out = Vec::new();
    for s in specs {
        let spec: GeneratorSpec = s.parse().map_err(|e: Error| e.to_string())?;
        let ch = match named_channel(&spec).map_err(|e| e.to_string())? {
            Generated::Channel(ch) => ch,
            Generated::Stochastic(m) => classical_embed(&m, &pol()).map_err(|e| e.to_string())?,
            Generated::Tensor(t) => match normalize_tensor(&t, &pol()) {
                Ok((_, ch)) => ch,
                Err(_) => t.raw_channel(&pol()).map_err(|e| e.to_string())?,
            },
        };
        out.push((s.to_string(), ch));
    }
    Ok(out)
}

fn prop3_equivalence(items: &[SweepItem]) -> Outcome {
    for it in items {
        check!(
            it.verdict_primitive == it.report.i_index.is_some(),
            "seed {}: spectral {} vs i {:?}",
            it.seed,
            it.verdict_primitive,
            it.report.i_index
        );
    }
    let named = named_channels()?;
    for (name, ch) in &named {
        let v = classify_primitivity(ch, &pol()).map_err(|e| e.to_string())?;
        let i = kraus_rank_index(ch, &pol()).map_err(|e| e.to_string())?;
        check!(v.is_primitive() == i.is_some(), "{name}: {v:?} vs i {i:?}");
    }
    Ok(format!("{} sweep + {} named channels agree", items.len(), named.len()))
}

fn prop1_suite(items: &[SweepItem]) -> Outcome {
    for it in items {
        let r = &it.report;
        if let (Some(lo), Some(hi)) = (r.q_lower, r.q_upper) {
            check!(lo <= hi, "seed {}: q_lower {lo} > q_upper {hi}", it.seed);
        }
        if let (Some(hi), Some(i)) = (r.q_upper, r.i_index) {
            check!(hi <= i, "seed {}: q_upper {hi} > i {i}", it.seed);
        }
    }
    let named = named_channels()?;
    for (name, ch) in &named {
        let r = primitivity_report(ch, &IndexOptions::default(), &pol()).map_err(|e| e.to_string())?;
        if let (Some(lo), Some(hi), Some(i)) = (r.q_lower, r.q_upper, r.i_index) {
            check!(lo <= hi && hi <= i, "{name}: [{lo}, {hi}] vs i {i}");
        }
    }
    Ok("q_lower <= q_upper <= i on every instance".into())
}

fn zero_error() -> Outcome {
    let cyc = zero_error_classify(&cyclic_shift_unitary(3).unwrap(), &pol()).map_err(|e| e.to_string())?;
    check!(cyc.case == ZeroErrorCase::AlwaysPositive, "cyclic shift: {cyc:?}");
    let dep = zero_error_classify(&depolarizing(2, 1.0).unwrap(), &pol()).map_err(|e| e.to_string())?;
    check!(dep.case == ZeroErrorCase::VanishesFromQ && dep.n_threshold == Some(1), "depolarizing: {dep:?}");
    let amp = zero_error_classify(&amplitude_damping(0.5).unwrap(), &pol()).map_err(|e| e.to_string())?;
    check!(amp.case == ZeroErrorCase::PreconditionFailed, "amplitude damping: {amp:?}");
    Ok("AlwaysPositive, VanishesFromQ(1), PreconditionFailed".into())
}

fn oracle_equivalence() -> Outcome {
    let mut cases = 0;
    for dim in 1..=12usize {
        for d in 1..=(12 / dim).min(dim * dim) {
            for seed in 0..30u64 {
                let ch = random_channel(dim, d, seed).map_err(|e| e.to_string())?;
                let dims = s_dims(&ch, 4, &pol()).map_err(|e| e.to_string())?;
                for n in 1..=4 {
                    let brute = brute_span_dim(ch.kraus(), n);
                    check!(dims[n - 1] == brute, "D={dim} d={d} seed={seed} n={n}: {} vs {brute}", dims[n - 1]);
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} (D, d, seed, n) cases match enumeration"))
}

fn mps() -> Outcome {
    let aklt = aklt_tensor();
    let l = injectivity_length(&aklt, &pol()).map_err(|e| e.to_string())?;
    check!(l == Some(2), "aklt injectivity length {l:?}");
    let g1 = gamma_rank(&aklt, 1, &pol()).map_err(|e| e.to_string())?;
    let g2 = gamma_rank(&aklt, 2, &pol()).map_err(|e| e.to_string())?;
    check!(g1 == 3 && g2 == 4, "aklt gamma ranks {g1}, {g2}");
    let ghz = injectivity_length(&ghz_tensor(2).unwrap(), &pol()).map_err(|e| e.to_string())?;
    check!(ghz.is_none(), "ghz injectivity length {ghz:?}");
    Ok("aklt L = 2, ranks 3 and 4; ghz never injective".into())
}

fn determinism() -> Outcome {
    let base = ["sweep", "--count", "100", "--seed", "42"];
    let one = qprim_bin(&[&base[..], &["--jobs", "1"]].concat());
    let eight = qprim_bin(&[&base[..], &["--jobs", "8"]].concat());
    check!(one.status.success() && eight.status.success(), "sweep failed");
    check!(one.stdout == eight.stdout, "CSV differs between --jobs 1 and --jobs 8");
    let rows = one.stdout.iter().filter(|&&b| b == b'\n').count();
    check!(rows == 101, "{rows} lines");
    Ok("100 rows byte-identical".into())
}

fn guarded(f: &dyn Fn() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    })
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome, f64)> = Vec::new();
    let mut run = |id: u32, name: &'static str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let r = guarded(f);
        results.push((id, name, r, t.elapsed().as_secs_f64()));
    };
    run(1, "pauli example", &pauli_example);
    run(2, "extremal quantum family", &extremal_family);
    run(3, "classical sharpness and embedding", &classical_sharpness);

    // criteria 4 to 6 share one pass over the 500 random channels
    let sweep = catch_unwind(run_sweep).unwrap_or_else(|_| Err("sweep panicked".into()));
    let on_sweep = |f: &dyn Fn(&[SweepItem], Duration) -> Outcome| match &sweep {
        Ok((items, t)) => f(items, *t),
        Err(e) => Err(format!("sweep failed: {e}")),
    };
    run(4, "wielandt bound sweep", &|| on_sweep(&wielandt_bound_sweep));
    run(5, "spectral equivalence", &|| on_sweep(&|items, _| prop3_equivalence(items)));
    run(6, "q bracket order", &|| on_sweep(&|items, _| prop1_suite(items)));
    run(7, "zero-error dichotomy", &zero_error);
    run(8, "oracle equivalence", &oracle_equivalence);
    run(9, "mps injectivity", &mps);
    run(10, "sweep determinism", &determinism);

    let mut failed = 0;
    println!();
    for (id, name, r, secs) in &results {
        match r {
            Ok(msg) => println!("acceptance {id:>2} PASS  {name}: {msg} ({secs:.3} s)"),
            Err(msg) => {
                failed += 1;
                println!("acceptance {id:>2} FAIL  {name}: {msg} ({secs:.3} s)");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
