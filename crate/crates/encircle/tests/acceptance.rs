//! Runs every acceptance criterion, printing one verdict line each.

use std::process::ExitCode;
use std::time::Instant;

use encircle::acceptance::{run_criterion, CRITERIA};

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for id in CRITERIA {
        let start = Instant::now();
        let r = run_criterion(id).expect("known criterion");
        println!("{r} [{:.1}s]", start.elapsed().as_secs_f64());
        if !r.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!(
            "acceptance: {}/{} criteria passed",
            CRITERIA.len(),
            CRITERIA.len()
        );
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED criteria {failed:?}");
        ExitCode::FAILURE
    }
}
