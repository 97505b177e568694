//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use effham_core::experiments::{run_experiment, Params, EXPERIMENTS};

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for e in EXPERIMENTS.iter() {
        if !filter.is_empty() && !filter.iter().any(|f| e.name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| run_experiment(e.name, &Params::default())));
        let secs = start.elapsed().as_secs_f64();
        let (ok, detail) = match outcome {
            Ok(Ok(r)) => {
                let detail: Vec<String> = r.checks.iter().map(|c| c.describe()).collect();
                (r.passed(), detail.join("; "))
            }
            Ok(Err(err)) => (false, format!("error: {err}")),
            Err(_) => (false, "panicked".into()),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<34} {} ({secs:.1} s) {detail}",
            e.criterion,
            e.name,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
