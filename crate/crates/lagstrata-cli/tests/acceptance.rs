//! Acceptance suite: one line per criterion, nonzero exit if any criterion fails.

use std::process::ExitCode;

use lagstrata_cli::criteria::{run_criterion, CRITERIA};

const SEED: u64 = 20_261_016;

fn main() -> ExitCode {
    let mut failed = 0;
    for (number, _) in CRITERIA {
        let outcome = run_criterion(number, SEED);
        println!("{}", outcome.line());
        if !outcome.passed() {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
