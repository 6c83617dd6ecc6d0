//! Wall-clock table for the level-by-level transform cost. One row per
//! level m from 10 up: fast-path time, its ratio to the previous level,
//! and (for small m) the quadratic-cost reference implementation.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use anyhow::bail;
use clap::Args;
use dscub::fast_transform;
use dscub::transform::direct_transform;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

const M_FIRST: u32 = 10;
/// Levels where timing the quadratic reference stays affordable.
const DIRECT_M_LIMIT: u32 = 12;

#[derive(Args)]
pub struct BenchArgs {
    /// Largest level to time (10 ≤ mmax ≤ 24).
    #[arg(long, default_value_t = 20)]
    mmax: u32,
    /// Seed for the random sample data.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: BenchArgs) -> anyhow::Result<u8> {
    if !(M_FIRST..=24).contains(&args.mmax) {
        bail!("--mmax must lie in [{M_FIRST}, 24], got {}", args.mmax);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(args.seed);
    let data: Vec<Complex64> = (0..1usize << args.mmax)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();

    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    writeln!(out, "m,n,fast_seconds,ratio,direct_seconds")?;
    let mut previous = None;
    for m in M_FIRST..=args.mmax {
        let n = 1usize << m;
        let fast_seconds = time_min(|| fast_transform(&data[..n], 2).unwrap(), n);
        let ratio = match previous {
            Some(prev) => format!("{:.3}", fast_seconds / prev),
            None => String::new(),
        };
        let direct_seconds = if m <= DIRECT_M_LIMIT {
            format!(
                "{:.6e}",
                time_min(|| direct_transform(&data[..n], 2).unwrap(), n * n)
            )
        } else {
            String::new()
        };
        writeln!(out, "{m},{n},{fast_seconds:.6e},{ratio},{direct_seconds}")?;
        previous = Some(fast_seconds);
    }
    out.flush()?;
    Ok(0)
}

/// Minimum wall time over enough repetitions to damp scheduler noise;
/// `work` scales the repetition count down as the job grows.
fn time_min<T>(mut f: impl FnMut() -> T, work: usize) -> f64 {
    let reps = (1usize << 24).checked_div(work).unwrap_or(1).clamp(1, 64);
    let mut best = f64::INFINITY;
    for _ in 0..reps.max(3) {
        let clock = Instant::now();
        std::hint::black_box(f());
        best = best.min(clock.elapsed().as_secs_f64());
    }
    best
}
