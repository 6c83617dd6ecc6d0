//! Command-line driver for adaptive digital-net cubature: single
//! integrations, the Keister replication experiment, net dumps, and
//! transform timing tables.

mod bench;
mod experiment;
mod walshpoly;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use dscub::{
    apply_scramble, integrate, keister, sobol_generator_with, write_history_csv, ConeSpec,
    CubatureResult, GeneratorSet,
};

/// Exit status when the adaptive loop ran out of budget before meeting
/// the tolerance.
const EXIT_BUDGET_EXHAUSTED: u8 = 2;

#[derive(Parser)]
#[command(name = "dscub", version, about = "Adaptive cubature over digital nets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a single function until the error bound meets the
    /// tolerance.
    Integrate(IntegrateArgs),
    /// Replicate the Keister benchmark across randomized runs and write
    /// per-run results to CSV.
    KeisterExperiment(experiment::ExperimentArgs),
    /// Dump net points as CSV.
    DumpNet(DumpNetArgs),
    /// Time the fast transform level by level.
    TransformBench(bench::BenchArgs),
}

#[derive(Args)]
struct IntegrateArgs {
    /// Integrand: `keister`, `const`, or `walshpoly:<json file>`.
    #[arg(long, default_value = "keister")]
    integrand: String,
    /// Dimension of the cube (taken from the file for `walshpoly`).
    #[arg(long)]
    dim: Option<usize>,
    /// Absolute error tolerance.
    #[arg(long)]
    tol: f64,
    /// Seed for the scramble and shift.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest level the loop may reach (n = 2^mmax points).
    #[arg(long, default_value_t = 22)]
    mmax: u32,
    /// Write the per-level history to this CSV file.
    #[arg(long)]
    history: Option<PathBuf>,
    /// Zero out wall-clock columns so output is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct DumpNetArgs {
    /// Dimension of the points.
    #[arg(long)]
    dim: usize,
    /// Level: 2^m points are written.
    #[arg(long)]
    m: u32,
    /// Seed for the scramble and shift.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dump the plain sequence with no scramble or shift.
    #[arg(long, conflicts_with = "scrambled")]
    raw: bool,
    /// Dump the scrambled and shifted sequence (the default).
    #[arg(long)]
    scrambled: bool,
    /// Output file (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Integrate(args) => cmd_integrate(args),
        Command::KeisterExperiment(args) => experiment::run(args),
        Command::DumpNet(args) => cmd_dump_net(args),
        Command::TransformBench(args) => bench::run(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            // A closed pipe (e.g. piping into `head`) is a normal way to
            // stop consuming output, not a failure.
            let broken_pipe = e.chain().any(|cause| {
                cause
                    .downcast_ref::<io::Error>()
                    .is_some_and(|io_err| io_err.kind() == io::ErrorKind::BrokenPipe)
            });
            if broken_pipe {
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn scrambled_generator(dimension: usize, mmax: u32, seed: u64) -> anyhow::Result<GeneratorSet> {
    let gen = sobol_generator_with(dimension, mmax)
        .with_context(|| format!("building a {dimension}-dimensional generator"))?;
    Ok(apply_scramble(&gen, seed))
}

fn report_result(result: &CubatureResult, tol: f64) {
    println!("estimate = {:.16e}", result.estimate);
    println!("error_bound = {:.16e}", result.error_bound);
    println!("n = {}", result.n);
    println!("m = {}", result.m_final);
    if result.met_tolerance {
        println!("tolerance met ({:.16e} <= {tol:e})", result.error_bound);
    } else {
        println!(
            "tolerance not met, budget exhausted ({:.16e} > {tol:e})",
            result.error_bound
        );
    }
}

fn cmd_integrate(args: IntegrateArgs) -> anyhow::Result<u8> {
    let result = match parse_integrand(&args.integrand)? {
        Integrand::Keister => {
            let dim = args.dim.context("--dim is required for `keister`")?;
            let gen = scrambled_generator(dim, args.mmax, args.seed)?;
            integrate(keister, dim, args.tol, &ConeSpec::default_for_base(2), &gen, args.mmax)?
        }
        Integrand::Const => {
            let dim = args.dim.context("--dim is required for `const`")?;
            let gen = scrambled_generator(dim, args.mmax, args.seed)?;
            integrate(|_| 1.0, dim, args.tol, &ConeSpec::default_for_base(2), &gen, args.mmax)?
        }
        Integrand::WalshPoly(path) => {
            let poly = walshpoly::load(&path)?;
            if poly.base() != 2 {
                bail!("only base-2 Walsh polynomials can be integrated (no tabulated generator for base {})", poly.base());
            }
            let dim = poly.dimension();
            if let Some(flag_dim) = args.dim {
                if flag_dim != dim {
                    bail!("--dim {flag_dim} contradicts the file's dimension {dim}");
                }
            }
            let gen = scrambled_generator(dim, args.mmax, args.seed)?;
            let precision = gen.precision();
            integrate(
                |x| poly.eval_values(x, precision).map(|v| v.re).unwrap_or(f64::NAN),
                dim,
                args.tol,
                &ConeSpec::default_for_base(2),
                &gen,
                args.mmax,
            )?
        }
    };

    report_result(&result, args.tol);
    if let Some(path) = &args.history {
        let file = File::create(path)
            .with_context(|| format!("creating history file {}", path.display()))?;
        write_history_csv(&result, BufWriter::new(file), !args.no_timing)?;
    }
    Ok(if result.met_tolerance {
        0
    } else {
        EXIT_BUDGET_EXHAUSTED
    })
}

enum Integrand {
    Keister,
    Const,
    WalshPoly(PathBuf),
}

fn parse_integrand(spec: &str) -> anyhow::Result<Integrand> {
    match spec {
        "keister" => Ok(Integrand::Keister),
        "const" => Ok(Integrand::Const),
        other => match other.strip_prefix("walshpoly:") {
            Some(path) if !path.is_empty() => Ok(Integrand::WalshPoly(PathBuf::from(path))),
            _ => bail!("unknown integrand `{other}` (expected keister, const, or walshpoly:<file>)"),
        },
    }
}

fn cmd_dump_net(args: DumpNetArgs) -> anyhow::Result<u8> {
    let plain = sobol_generator_with(args.dim, args.m.max(1))?;
    let gen = if args.raw {
        plain
    } else {
        apply_scramble(&plain, args.seed)
    };

    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    write!(out, "i")?;
    for j in 1..=args.dim {
        write!(out, ",x{j}")?;
    }
    writeln!(out)?;
    let mut io_error = None;
    gen.stream_points(args.m, !args.raw, |i, x| {
        if io_error.is_some() {
            return;
        }
        let row = (|| -> io::Result<()> {
            write!(out, "{i}")?;
            for v in x {
                write!(out, ",{v:.16e}")?;
            }
            writeln!(out)
        })();
        if let Err(e) = row {
            io_error = Some(e);
        }
    })?;
    if let Some(e) = io_error {
        return Err(e.into());
    }
    out.flush()?;
    Ok(0)
}
