//! Acceptance suite: one line per criterion, nonzero exit on any failure.
//! `HYPNP_SEED` overrides the seed (default 0).

use hypnp::acceptance::run_criterion;
use hypnp::acceptance::CRITERIA;

fn main() {
    let seed = std::env::var("HYPNP_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let mut failed = 0;
    for (id, _) in CRITERIA {
        let r = run_criterion(id, seed);
        println!("{}", r.line());
        if !r.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", CRITERIA.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
