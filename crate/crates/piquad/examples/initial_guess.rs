//! Builds the line-based initial guess for one degree and shows how its
//! orbit structure follows the half-line node count n1.
//!
//! The guess places tensor products of half-line Legendre-Gauss nodes in
//! corner-attached subdomains and merges coincident nodes; the resulting
//! per-kind orbit counts are predictable from n1 alone, which this example
//! checks against the constructed rule.
//!
//! Usage: `cargo run --example initial_guess [tri|tet] [DEGREE]`

use piquad::initgen::{initial_guess, predict_orbit_counts, select_n1};
use piquad::rules_io::{serialize_rule, RuleStatus};
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

    let n1 = select_n1(domain, degree);
    let predicted = predict_orbit_counts(domain, n1);
    let guess = initial_guess(domain, degree)?;
    let actual = guess.orbit_counts();

    println!("{domain} degree {degree}: n1 = {n1}");
    println!("predicted orbits: {predicted}");
    println!("actual orbits:    {actual}");
    assert_eq!(predicted.total_nodes(), guess.node_count());
    println!(
        "{} nodes in {} orbits, weight sum {:.6} (reference measure {:.6})",
        guess.node_count(),
        guess.orbits.len(),
        guess.weight_sum(),
        domain.simplex().measure
    );
    println!();
    print!("{}", serialize_rule(&guess, RuleStatus::Initial)?);
    Ok(())
}
