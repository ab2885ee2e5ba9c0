//! Derives a small catalog of rules and runs every validation check on each:
//! moment residual, weight positivity, node interiority, symmetry of the
//! expanded node set, and agreement with the exact rational integral of each
//! monomial up to the rule's degree.
//!
//! Usage: `cargo run --example validate_catalog [tri|tet] [MAX_DEGREE]`

use piquad::initgen::derive_rule;
use piquad::solver::SolveOptions;
use piquad::verify::{validate_rule, DEFAULT_VALIDATE_TOL};
use piquad::{Domain, Result};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let domain = args
        .next()
        .map(|s| Domain::parse(&s).expect("domain must be tri or tet"))
        .unwrap_or(Domain::Triangle);
    let max: u32 = args
        .next()
        .map(|s| s.parse().expect("MAX_DEGREE must be an integer"))
        .unwrap_or(10);

    println!(
        "{:>7} {:>6} {:>13} {:>13} {:>13}  verdict",
        "degree", "nodes", "residual", "monomial err", "min weight"
    );
    for q in 1..=max {
        let (rule, report) = derive_rule(domain, q, &SolveOptions::default())?;
        if !report.converged {
            println!("{q:>7}  derivation did not converge");
            continue;
        }
        let check = validate_rule(&rule, DEFAULT_VALIDATE_TOL)?;
        println!(
            "{q:>7} {:>6} {:>13.2e} {:>13.2e} {:>13.2e}  {}",
            rule.node_count(),
            check.max_moment_residual,
            check.max_monomial_rel_error,
            check.min_weight,
            if check.pass() { "valid" } else { "INVALID" }
        );
    }
    Ok(())
}
