//! `esforge`: command-line front end for the k/n = 1/x + 1/y + 1/z toolkit.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 search budget exhausted,
//! 3 verification finished with failures.

mod render;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use esforge_core::density::reciprocal_sum_3mod4;
use esforge_core::{
    admissible_domain, cross_check_equivalence, default_n1, density_experiment,
    dirichlet_factor_check, euler_product_p, oracle_enumerate, progression_for_divisor, solve_one,
    HarnessConfig, HarnessError, OracleFallback, RunOutcome, Verifier,
};

use render::Format;

#[derive(Debug, Parser)]
#[command(
    name = "esforge",
    version,
    about = "Parametric solver and verifier for k/n = 1/x + 1/y + 1/z"
)]
struct Cli {
    /// Numerator k (≥ 4).
    #[arg(long, global = true, default_value_t = 4)]
    k: u64,
    /// Lower threshold N₁ (defaults to 2 for k = 4, 11 for k = 5, ⌈k/3⌉ above).
    #[arg(long, global = true)]
    n1: Option<u64>,
    /// Worker threads for range verification.
    #[arg(long, global = true, env = "ESFORGE_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Checkpoint file for resumable verification.
    #[arg(long, global = true)]
    checkpoint: Option<PathBuf>,
    /// Largest x tried by the parametric search.
    #[arg(long = "budget-x", global = true)]
    budget_x: Option<u64>,
    /// Largest t tried per x by the parametric search.
    #[arg(long = "budget-t", global = true)]
    budget_t: Option<u64>,
    /// Whether the exhaustive oracle runs when the search fails.
    #[arg(long = "oracle-fallback", global = true, value_enum, default_value_t = Fallback::Auto)]
    oracle_fallback: Fallback,
    /// Integers per work chunk.
    #[arg(long = "chunk-size", global = true)]
    chunk_size: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Fallback {
    On,
    Off,
    Auto,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Find a decomposition of k/n.
    Solve { n: u64 },
    /// Verify every n in [lo, hi).
    Verify {
        lo: u64,
        hi: u64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Include every solution in the report.
        #[arg(long)]
        log_solutions: bool,
    },
    /// Admissible domain of (x, t).
    Domain { k: u64, x: u64, t: u64 },
    /// All decompositions with x ≤ y ≤ z.
    Oracle { k: u64, n: u64 },
    /// Cross-check the quadratic equivalence against the oracle.
    Crosscheck { k: u64, n: u64 },
    /// Count the exceptional set at the given checkpoints.
    Density {
        #[arg(required = true)]
        checkpoints: Vec<u64>,
    },
    /// Progression of n ≡ residue (mod modulus) divisible by b.
    Progression { b: u64, modulus: u64, residue: u64 },
    /// Partial Euler products over primes ≡ 3 (mod 4).
    Euler { s: f64, prime_limit: u64 },
}

enum Failure {
    Usage(String),
    Budget(String),
    VerificationFailures,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Budget(_) => 2,
            Failure::VerificationFailures => 3,
        }
    }
}

fn usage(msg: impl ToString) -> Failure {
    Failure::Usage(msg.to_string())
}

fn harness_config(cli: &Cli) -> Result<HarnessConfig, Failure> {
    let mut config = HarnessConfig {
        x_max: cli.budget_x,
        t_max_per_x: cli.budget_t,
        oracle_fallback: match cli.oracle_fallback {
            Fallback::On => OracleFallback::On,
            Fallback::Off => OracleFallback::Off,
            Fallback::Auto => OracleFallback::Auto,
        },
        ..Default::default()
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(usage("threads must be ≥ 1"));
        }
        config.threads = t;
    }
    if let Some(c) = cli.chunk_size {
        if c == 0 {
            return Err(usage("chunk size must be ≥ 1"));
        }
        config.chunk_size = c;
    }
    if matches!(cli.budget_x, Some(0)) || matches!(cli.budget_t, Some(0)) {
        return Err(usage("budgets must be ≥ 1"));
    }
    Ok(config)
}

fn check_k(k: u64) -> Result<(), Failure> {
    if k < 4 {
        return Err(usage("k must be ≥ 4"));
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<String, Failure> {
    check_k(cli.k)?;
    if matches!(cli.n1, Some(n) if n < 2) {
        return Err(usage("n1 must be ≥ 2"));
    }
    let format = cli.format;
    match &cli.command {
        Command::Solve { n } => {
            if *n < 2 {
                return Err(usage("n must be ≥ 2"));
            }
            let config = harness_config(cli)?;
            match solve_one(cli.k, *n, &config) {
                Ok(sol) => Ok(render::solution(&sol, format)),
                Err(e @ HarnessError::NoSolutionWithinBudget { .. }) => {
                    Err(Failure::Budget(e.to_string()))
                }
                Err(e) => Err(usage(e)),
            }
        }
        Command::Verify {
            lo,
            hi,
            output,
            log_solutions,
        } => {
            let mut config = harness_config(cli)?;
            config.log_solutions = *log_solutions;
            let mut verifier = Verifier::new(cli.k, *lo, *hi, config);
            if let Some(path) = &cli.checkpoint {
                verifier = verifier.checkpoint(path);
            }
            let report = match verifier.run() {
                Ok(RunOutcome::Complete(r)) => r,
                Ok(RunOutcome::Interrupted { .. }) => unreachable!("no chunk limit"),
                Err(e) => return Err(usage(e)),
            };
            eprintln!(
                "verified [{lo}, {hi}) in {:.3}s: {} solved, {} failures",
                report.elapsed.as_secs_f64(),
                report.solved(),
                report.failures.len()
            );
            let text = render::report(&report, format);
            let has_failures = !report.failures.is_empty();
            let stdout = match output {
                Some(path) => {
                    std::fs::write(path, text)
                        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
                    String::new()
                }
                None => text,
            };
            if has_failures {
                print!("{stdout}");
                return Err(Failure::VerificationFailures);
            }
            Ok(stdout)
        }
        Command::Domain { k, x, t } => {
            check_k(*k)?;
            let n1 = cli.n1.unwrap_or_else(|| default_n1(*k));
            let dom = admissible_domain(*k, *x, *t, n1).map_err(usage)?;
            Ok(render::domain(*k, *x, *t, n1, dom.as_ref(), format))
        }
        Command::Oracle { k, n } => {
            check_k(*k)?;
            if *n < 2 {
                return Err(usage("n must be ≥ 2"));
            }
            Ok(render::triples(*k, *n, &oracle_enumerate(*k, *n), format))
        }
        Command::Crosscheck { k, n } => {
            let r = cross_check_equivalence(*k, *n).map_err(usage)?;
            Ok(render::crosscheck(&r, format))
        }
        Command::Density { checkpoints } => {
            let r = density_experiment(checkpoints).map_err(usage)?;
            Ok(render::density(&r, format))
        }
        Command::Progression {
            b,
            modulus,
            residue,
        } => {
            let p = progression_for_divisor(*b, *modulus, *residue).map_err(usage)?;
            Ok(render::progression(&p, format))
        }
        Command::Euler { s, prime_limit } => {
            let p = euler_product_p(*s, *prime_limit).map_err(usage)?;
            let check = if *s > 1.0 {
                Some(dirichlet_factor_check(*s, *prime_limit).map_err(usage)?)
            } else {
                None
            };
            let recip = reciprocal_sum_3mod4(*prime_limit).map_err(usage)?;
            Ok(render::euler(
                *s,
                *prime_limit,
                p,
                recip,
                check.as_ref(),
                format,
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            match &f {
                Failure::Usage(m) | Failure::Budget(m) => eprintln!("error: {m}"),
                Failure::VerificationFailures => eprintln!("error: verification failures present"),
            }
            ExitCode::from(f.code())
        }
    }
}
