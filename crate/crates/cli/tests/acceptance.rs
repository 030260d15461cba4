//! Runs every acceptance criterion and prints one line per criterion.

use opsysdual_cli::suites::{run_criterion, SuiteConfig, CRITERIA};
use std::time::Instant;

fn main() {
    let cfg = SuiteConfig::default();
    let start = Instant::now();
    let mut failed = 0;
    for id in 1..=CRITERIA.len() {
        let t = Instant::now();
        let r = run_criterion(id, &cfg);
        println!("{}  ({:.1} s)", r.line(), t.elapsed().as_secs_f64());
        for f in &r.failures {
            println!("      {f}");
        }
        if !r.passed {
            failed += 1;
        }
    }
    println!(
        "acceptance: {}/{} criteria passed in {:.1} s",
        CRITERIA.len() - failed,
        CRITERIA.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
