//! Full acceptance suite: one PASS/FAIL line per criterion, non-zero exit
//! status if any criterion fails. Tolerances live in
//! `cdkink::experiments::validate`.

use std::process::ExitCode;
use std::time::Instant;

use cdkink::experiments::{criterion_ids, run_single};

fn main() -> ExitCode {
    let start = Instant::now();
    let mut failed = Vec::new();
    println!("\nrunning acceptance criteria");
    for id in criterion_ids() {
        match run_single(id) {
            Ok(result) => {
                println!("{result}");
                if !result.passed {
                    failed.push(id);
                }
            }
            Err(e) => {
                println!("{id:<10} FAIL | error: {e}");
                failed.push(id);
            }
        }
    }
    let total = criterion_ids().len();
    println!(
        "\nacceptance: {} passed, {} failed of {total} ({:.1}s)",
        total - failed.len(),
        failed.len(),
        start.elapsed().as_secs_f64()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
