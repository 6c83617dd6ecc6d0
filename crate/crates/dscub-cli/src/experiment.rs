//! Replicated Keister integrations with per-run randomization: each run
//! draws its dimension (unless fixed), scrambles and shifts a fresh
//! generator, integrates to tolerance, and is compared against the
//! quadrature reference value.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::Args;
use dscub::integrands::write_reference_csv;
use dscub::{
    apply_scramble_from_rng, integrate, keister, keister_reference, sobol_generator_with,
    ConeSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Largest dimension the random law can draw: d = ⌊e^D⌋ with D uniform
/// on [0, ln 20).
const MAX_RANDOM_DIMENSION: usize = 20;

#[derive(Args)]
pub struct ExperimentArgs {
    /// Number of independent replications.
    #[arg(long, default_value_t = 200)]
    reps: usize,
    /// Absolute error tolerance per run.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Fixed dimension; omit to draw d = ⌊e^D⌋, D ~ U[0, ln 20) per run.
    #[arg(long)]
    dim: Option<usize>,
    /// Master seed; run r uses an independent stream derived from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest level each run may reach.
    #[arg(long, default_value_t = 22)]
    mmax: u32,
    /// Per-run results CSV; a `keister_ref.csv` with the reference
    /// values used is written next to it.
    #[arg(long)]
    out: PathBuf,
    /// Zero out wall-clock columns so output is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

struct RunRecord {
    run: usize,
    dimension: usize,
    n: u64,
    estimate: f64,
    true_value: f64,
    abs_error: f64,
    bound: f64,
    met: bool,
    elapsed_seconds: f64,
}

pub fn run(args: ExperimentArgs) -> anyhow::Result<u8> {
    if args.reps == 0 {
        bail!("--reps must be at least 1");
    }
    if !args.tol.is_finite() || args.tol <= 0.0 {
        bail!("--tol must be positive, got {}", args.tol);
    }
    if let Some(d) = args.dim {
        // Fail fast before spending time on replications.
        keister_reference(d).context("--dim outside the reference table")?;
    }

    let mut records = Vec::with_capacity(args.reps);
    for run in 1..=args.reps {
        let mut rng = ChaCha12Rng::seed_from_u64(args.seed);
        rng.set_stream(run as u64);
        let dimension = match args.dim {
            Some(d) => d,
            None => draw_dimension(&mut rng),
        };
        let gen = apply_scramble_from_rng(&sobol_generator_with(dimension, args.mmax)?, &mut rng);
        let clock = Instant::now();
        let result = integrate(
            keister,
            dimension,
            args.tol,
            &ConeSpec::default_for_base(2),
            &gen,
            args.mmax,
        )?;
        let elapsed_seconds = clock.elapsed().as_secs_f64();
        let true_value = keister_reference(dimension)?;
        records.push(RunRecord {
            run,
            dimension,
            n: result.n,
            estimate: result.estimate,
            true_value,
            abs_error: (result.estimate - true_value).abs(),
            bound: result.error_bound,
            met: result.met_tolerance,
            elapsed_seconds,
        });
    }

    write_runs_csv(&records, &args)?;
    write_reference_table(&records, &args)?;
    print_summary(&records, args.tol);
    Ok(0)
}

fn draw_dimension<R: Rng>(rng: &mut R) -> usize {
    let exponent: f64 = rng.random_range(0.0..(MAX_RANDOM_DIMENSION as f64).ln());
    (exponent.exp().floor() as usize).clamp(1, MAX_RANDOM_DIMENSION)
}

fn write_runs_csv(records: &[RunRecord], args: &ExperimentArgs) -> anyhow::Result<()> {
    let file = File::create(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let mut out = BufWriter::new(file);
    writeln!(
        out,
        "run,d,n,estimate,true_value,abs_error,bound,met,elapsed_seconds"
    )?;
    for r in records {
        let elapsed = if args.no_timing { 0.0 } else { r.elapsed_seconds };
        writeln!(
            out,
            "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.6}",
            r.run, r.dimension, r.n, r.estimate, r.true_value, r.abs_error, r.bound, r.met,
            elapsed
        )?;
    }
    out.flush()?;
    Ok(())
}

fn write_reference_table(records: &[RunRecord], args: &ExperimentArgs) -> anyhow::Result<()> {
    let mut dims: Vec<usize> = records.iter().map(|r| r.dimension).collect();
    dims.sort_unstable();
    dims.dedup();
    let path = args.out.with_file_name("keister_ref.csv");
    let file =
        File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    write_reference_csv(&dims, BufWriter::new(file))?;
    Ok(())
}

fn print_summary(records: &[RunRecord], tol: f64) {
    let successes = records.iter().filter(|r| r.abs_error <= tol).count();
    println!("replications = {}", records.len());
    println!(
        "success_rate = {:.4} ({successes}/{})",
        successes as f64 / records.len() as f64,
        records.len()
    );
    let errors: Vec<f64> = records.iter().map(|r| r.abs_error).collect();
    let times: Vec<f64> = records.iter().map(|r| r.elapsed_seconds).collect();
    print_quantiles("abs_error", &errors);
    print_quantiles("elapsed_seconds", &times);
}

fn print_quantiles(label: &str, values: &[f64]) {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pick = |q: f64| sorted[((q * (sorted.len() - 1) as f64).round() as usize).min(sorted.len() - 1)];
    println!(
        "{label} quantiles p25/p50/p75/p90 = {:.3e} / {:.3e} / {:.3e} / {:.3e}",
        pick(0.25),
        pick(0.50),
        pick(0.75),
        pick(0.90)
    );
}
