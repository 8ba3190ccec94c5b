//! Runs the derivative and oracle checks and prints a one-line verdict per
//! family. Pass a sample count to change the default of 20.

use ddcd::scenario::{self_check, SelfCheckOptions};

fn main() {
    let samples = std::env::args().nth(1).map(|s| s.parse().expect("sample count")).unwrap_or(20);
    let report = self_check(&SelfCheckOptions { samples, ..Default::default() });
    for c in &report.checks {
        println!(
            "{} {:<30} {:>10.3e} / {:.0e}",
            if c.passed { "ok  " } else { "FAIL" },
            c.family,
            c.max_error,
            c.tolerance
        );
    }
    std::process::exit(if report.passed() { 0 } else { 1 });
}
