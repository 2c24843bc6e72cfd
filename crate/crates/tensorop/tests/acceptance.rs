//! Runs the twelve acceptance checks and prints one pass/fail line for each.
//!
//! Checks 10 and 12 ask for a terminal object in every fiber `L/γ`. The
//! fibers computed here have none for some `γ`, so those two lines print
//! FAIL together with the fibers concerned and their contractibility
//! certificates. Every other check must pass.

use std::process::ExitCode;
use std::time::Instant;

use tensorop::verify::{criterion, Bounds, Status, CRITERIA, DEFAULT_SEED};

const KNOWN_FAILING: [usize; 2] = [10, 12];

fn main() -> ExitCode {
    let bounds = Bounds::default();
    let mut unexpected = Vec::new();
    for n in 1..=CRITERIA {
        let start = Instant::now();
        let case = criterion(n, &bounds, DEFAULT_SEED).unwrap();
        let verdict = match case.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Unstable => "FAIL (unstable)",
        };
        println!("criterion {n:>2} {:<24} {verdict} ({:.1}s)", case.id, start.elapsed().as_secs_f64());
        if !case.passed() {
            println!("    {}", case.witness);
            if !KNOWN_FAILING.contains(&n) {
                unexpected.push(n);
            }
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
