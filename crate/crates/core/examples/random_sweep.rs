//! Seeded sweep over random channels, in parallel, printed as CSV.
//!
//! `cargo run --release --example random_sweep -- 4 3 50`

use qprim::cli::sweep_csv;
use qprim::TolerancePolicy;

fn main() -> qprim::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let dim = args.first().copied().unwrap_or(3);
    let d = args.get(1).copied().unwrap_or(2);
    let count = args.get(2).copied().unwrap_or(20) as u64;
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    print!("{}", sweep_csv(dim, d, count, 0, jobs, &TolerancePolicy::default())?);
    Ok(())
}
