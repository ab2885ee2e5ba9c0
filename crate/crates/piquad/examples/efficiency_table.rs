//! Derives, shrinks, and grades a range of triangle rules against the
//! theoretical node-count lower bound.
//!
//! Usage: `cargo run --release --example efficiency_table [MAX_DEGREE]`

use piquad::eliminate::{eliminate_auto, ElimConfig};
use piquad::initgen::derive_rule;
use piquad::solver::SolveOptions;
use piquad::verify::{efficiency_csv, efficiency_rows};
use piquad::{Domain, Result};

fn main() -> Result<()> {
    let max: u32 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("MAX_DEGREE must be an integer"))
        .unwrap_or(8);

    let mut rules = Vec::new();
    for q in 1..=max {
        let (rule, report) = derive_rule(Domain::Triangle, q, &SolveOptions::default())?;
        assert!(report.converged, "degree {q} must converge");
        let (smaller, _) = eliminate_auto(&rule, &ElimConfig::default())?;
        eprintln!(
            "degree {q}: {} -> {} nodes",
            rule.node_count(),
            smaller.node_count()
        );
        rules.push(smaller);
    }

    print!("{}", efficiency_csv(&efficiency_rows(&rules)?));
    Ok(())
}
