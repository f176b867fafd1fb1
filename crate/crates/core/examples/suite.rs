//! Runs the property suite and prints a per-check summary.
//!
//! `cargo run --release --example suite -- [seed] [size]`

use pmstat::harness::{run_suite, SuiteConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    let size = args.next().map(|s| s.parse()).transpose()?.unwrap_or(30);
    let report = run_suite(&SuiteConfig {
        seed,
        size,
        ..SuiteConfig::default()
    })?;
    for s in &report.summary {
        let tag = if s.negative_control { " (control)" } else { "" };
        println!("{:<36} {:>4} runs {:>4} passed{tag}", s.check, s.runs, s.passed);
    }
    for f in report.failures() {
        println!("UNEXPECTED {} #{:?}: {}", f.check, f.instance, f.detail);
    }
    println!("suite {}", if report.ok() { "ok" } else { "FAILED" });
    Ok(())
}
