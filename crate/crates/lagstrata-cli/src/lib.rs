//! Driver behind the `lagstrata` binary: runs one experiment per subcommand and produces a
//! single JSON report whose assertions decide the exit code.

pub mod criteria;
pub mod experiments;
pub mod report;

use std::time::Instant;

use serde_json::{json, Value};

use crate::experiments::DualExperiment;
use crate::report::Section;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Degrees,
    Connectedness,
    Exceptional,
    Ledger,
    Invariants,
    Census,
    ChartVerify,
    DualK3,
    AcceptAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Degrees => "degrees",
            Command::Connectedness => "connectedness",
            Command::Exceptional => "exceptional",
            Command::Ledger => "ledger",
            Command::Invariants => "invariants",
            Command::Census => "census",
            Command::ChartVerify => "chart-verify",
            Command::DualK3 => "dual-k3",
            Command::AcceptAll => "accept-all",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub prime: Option<u32>,
    pub seed: u64,
    pub trials: Option<usize>,
    /// census: `random` or `lg1`; dual-k3: `phi`, `psi`, `newsystem`, `residual` or `all`.
    pub experiment: Option<String>,
    pub verbose: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig { command, prime: None, seed: 0, trials: None, experiment: None, verbose: false }
    }

    fn to_json(&self) -> Value {
        json!({
            "prime": self.prime,
            "seed": self.seed,
            "trials": self.trials,
            "experiment": self.experiment,
            "rng": experiments::RNG_NAME,
            "version": env!("CARGO_PKG_VERSION"),
        })
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub subcommand: &'static str,
    pub config: Value,
    pub section: Section,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.section.passed()
    }

    pub fn exit_code(&self) -> i32 {
        if self.section.budget_exhausted {
            EXIT_BUDGET
        } else if self.passed() {
            EXIT_OK
        } else {
            EXIT_ASSERTION
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "subcommand": self.subcommand,
            "config": self.config,
            "results": Value::Object(self.section.results.clone()),
            "assertions": self.section.assertions.iter().map(report::Assertion::to_json).collect::<Vec<_>>(),
            "passed": self.passed(),
            "budget_exhausted": self.section.budget_exhausted,
            "elapsed_ms": self.elapsed_ms,
        })
    }
}

/// Rejects flag combinations that make no sense for the subcommand.
pub fn validate(config: &RunConfig) -> Result<(), String> {
    match config.command {
        Command::Census => {
            let p = config.prime.unwrap_or(3);
            match config.experiment.as_deref().unwrap_or("random") {
                "random" if p <= 7 => Ok(()),
                "lg1" if p <= 7 => Ok(()),
                "random" | "lg1" => Err(format!("census needs --prime at most 7, got {p}")),
                other => Err(format!("unknown census experiment {other:?} (random, lg1)")),
            }
        }
        Command::DualK3 => match DualExperiment::parse(config.experiment.as_deref().unwrap_or("all")) {
            Some(_) => Ok(()),
            None => Err("dual-k3 --experiment must be phi, psi, newsystem, residual or all".into()),
        },
        _ => match (&config.experiment, config.prime) {
            (Some(_), _) => Err(format!("{} takes no --experiment", config.command.name())),
            (_, Some(_)) if config.command != Command::ChartVerify => Err(format!("{} takes no --prime", config.command.name())),
            (_, Some(p)) if p != 101 => Err("chart-verify runs over Q and F_101 only".into()),
            _ => Ok(()),
        },
    }
}

pub fn run(config: &RunConfig) -> Report {
    let start = Instant::now();
    let seed = config.seed;
    let section = match config.command {
        Command::Degrees => experiments::degrees(),
        Command::Connectedness => experiments::connectedness(),
        Command::Exceptional => experiments::exceptional(),
        Command::Ledger => experiments::ledger(),
        Command::Invariants => experiments::invariants(),
        Command::Census => {
            let p = config.prime.unwrap_or(3);
            match config.experiment.as_deref() {
                Some("lg1") => experiments::census_lg1(p, seed, config.trials.unwrap_or(criteria::LG1_SAMPLES)),
                _ => experiments::census_random(p, seed),
            }
        }
        Command::ChartVerify => {
            let mut s = Section::new();
            let trials = config.trials.unwrap_or(criteria::CHART_TRIALS);
            s.nest("identity", experiments::chart_identity(trials, seed));
            s.nest("tangent_cone", experiments::tangent_cone(config.trials.unwrap_or(criteria::TANGENT_DIRECTIONS), seed));
            s.nest("restriction", experiments::restriction(config.trials.unwrap_or(criteria::RESTRICTION_CONFIGURATIONS), seed));
            s
        }
        Command::DualK3 => {
            let chosen = DualExperiment::parse(config.experiment.as_deref().unwrap_or("all")).unwrap_or_default();
            experiments::dual_k3(config.prime.unwrap_or(101), seed, &chosen, config.trials.unwrap_or(criteria::DUAL_TRIALS))
        }
        Command::AcceptAll => {
            let mut s = Section::new();
            for (number, _) in criteria::CRITERIA {
                let outcome = criteria::run_criterion(number, seed);
                if config.verbose {
                    eprintln!("{}", outcome.line());
                }
                s.nest(&format!("criterion_{number}"), outcome.section);
            }
            s
        }
    };
    Report {
        subcommand: config.command.name(),
        config: config.to_json(),
        section,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}
