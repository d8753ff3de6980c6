//! Acceptance report: one line per criterion, nonzero exit on any failure.

use geoflow::acceptance::{run, DEFAULT_SEED};

fn main() {
    let mut failed = 0;
    for id in 1..=11 {
        let res = run(id, DEFAULT_SEED).expect("criterion id in range");
        println!("{}", res.line());
        for c in res.checks.iter().filter(|c| !c.pass) {
            println!("    {}: {} (target {})", c.name, c.value, c.target);
        }
        if !res.passed() {
            failed += 1;
        }
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
