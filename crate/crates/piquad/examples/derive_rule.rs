//! Derives a rule by refining the line-based initial guess with the damped
//! least-squares iteration, then prints the solve history and the rule.
//!
//! Usage: `cargo run --example derive_rule [tri|tet] [DEGREE]`

use piquad::initgen::{derive_rule, initial_guess};
use piquad::rules_io::{serialize_rule, RuleStatus};
use piquad::solver::SolveOptions;
use piquad::{Domain, Result};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let domain = args
        .next()
        .map(|s| Domain::parse(&s).expect("domain must be tri or tet"))
        .unwrap_or(Domain::Triangle);
    let degree: u32 = args
        .next()
        .map(|s| s.parse().expect("DEGREE must be an integer"))
        .unwrap_or(8);

    let guess = initial_guess(domain, degree)?;
    println!(
        "initial guess: {} nodes in {} orbits",
        guess.node_count(),
        guess.orbits.len()
    );

    let (rule, report) = derive_rule(domain, degree, &SolveOptions::default())?;
    println!(
        "converged = {}, {} accepted steps, final residual {:.2e}",
        report.converged, report.iterations, report.residual_inf
    );
    for (i, cost) in report.cost_history.iter().enumerate() {
        println!("  step {i:>3}: cost {cost:.6e}");
    }
    if !report.converged {
        eprintln!("no convergence; not printing the rule");
        return Ok(());
    }
    println!();
    print!("{}", serialize_rule(&rule, RuleStatus::Converged)?);
    Ok(())
}
