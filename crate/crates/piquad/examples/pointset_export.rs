//! Round-trips a rule through the plain point-list format.
//!
//! The export writes one cartesian node and weight per row with no orbit
//! structure; the import recovers the orbits by classifying each node's
//! barycentric coordinates and grouping symmetric copies.
//!
//! Usage: `cargo run --example pointset_export [tri|tet] [DEGREE]`

use piquad::initgen::derive_rule;
use piquad::rules_io::{import_pointset, serialize_pointset};
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
        .unwrap_or(5);

    let (rule, report) = derive_rule(domain, degree, &SolveOptions::default())?;
    assert!(report.converged);

    let text = serialize_pointset(&rule)?;
    println!("{} nodes, one row per node:", rule.node_count());
    print!("{text}");

    let recovered = import_pointset(&text, domain, degree)?;
    println!();
    println!("re-imported orbit counts: {}", recovered.orbit_counts());
    println!("original orbit counts:    {}", rule.orbit_counts());
    assert_eq!(recovered.orbit_counts(), rule.orbit_counts());
    assert_eq!(recovered.node_count(), rule.node_count());
    println!("round trip preserved the orbit structure");
    Ok(())
}
