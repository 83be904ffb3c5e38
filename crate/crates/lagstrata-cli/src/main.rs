use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lagstrata_cli::{run, validate, Command, RunConfig, EXIT_USAGE};

#[derive(Parser, Debug)]
#[command(name = "lagstrata", version, about = "Exact experiments on Lagrangian degeneracy loci in ∧³C⁶")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// Prime field for finite-field experiments.
    #[arg(long, global = true)]
    prime: Option<u32>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Suppress the human-readable summary on standard error.
    #[arg(long, global = true)]
    json_only: bool,
    /// census: random | lg1. dual-k3: phi | psi | newsystem | residual | all.
    #[arg(long, global = true)]
    experiment: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Sub {
    /// Degrees of D1, D2, D3 and of G(3,6).
    Degrees,
    /// Class of D2 and the integer solutions of the splitting system.
    Connectedness,
    /// The coefficient b in LG(10,20).
    Exceptional,
    /// Dimension counts for the divisor lemmas.
    Ledger,
    /// Beauville–Bogomolov and Fujiki arithmetic on the Hilbert cube.
    Invariants,
    /// Strata counts over G(3, F_p⁶).
    Census,
    /// Chart quadric identity, tangent-cone orders and restriction ranks.
    ChartVerify,
    /// φ, ψ, the linear system for A ∩ T_ψ and residual triples on S_A.
    DualK3,
    /// Every acceptance criterion.
    AcceptAll,
}

impl From<Sub> for Command {
    fn from(sub: Sub) -> Command {
        match sub {
            Sub::Degrees => Command::Degrees,
            Sub::Connectedness => Command::Connectedness,
            Sub::Exceptional => Command::Exceptional,
            Sub::Ledger => Command::Ledger,
            Sub::Invariants => Command::Invariants,
            Sub::Census => Command::Census,
            Sub::ChartVerify => Command::ChartVerify,
            Sub::DualK3 => Command::DualK3,
            Sub::AcceptAll => Command::AcceptAll,
        }
    }
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_USAGE as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return usage_error("--threads must be positive");
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            return usage_error(&e.to_string());
        }
    }
    let config = RunConfig {
        command: cli.command.into(),
        prime: cli.prime,
        seed: cli.seed,
        trials: cli.trials,
        experiment: cli.experiment,
        verbose: !cli.json_only,
    };
    if let Err(message) = validate(&config) {
        return usage_error(&message);
    }
    let report = run(&config);
    let text = serde_json::to_string_pretty(&report.to_json()).expect("report serializes");
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE as u8);
            }
        }
        None => println!("{text}"),
    }
    if !cli.json_only {
        for failure in report.section.failures() {
            eprintln!("FAIL {}: expected {}, got {}", failure.name, failure.expected, failure.actual);
        }
        eprintln!("{}: {} ({} ms)", report.subcommand, if report.passed() { "pass" } else { "fail" }, report.elapsed_ms);
    }
    ExitCode::from(report.exit_code() as u8)
}
