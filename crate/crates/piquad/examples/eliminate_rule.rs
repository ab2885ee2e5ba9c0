//! Shrinks a freshly derived rule by removing symmetry orbits one at a time
//! and re-solving after each removal.
//!
//! Every attempt is printed: the orbit picked by the removal criterion, the
//! damping start that made the re-solve converge (or `-` when the whole
//! sweep failed), and the node count afterwards. Larger degrees benefit from
//! `--release`.
//!
//! Usage: `cargo run --example eliminate_rule [tri|tet] [DEGREE]`

use piquad::eliminate::{eliminate_auto, ElimConfig};
use piquad::initgen::derive_rule;
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
        .unwrap_or(7);

    let (rule, report) = derive_rule(domain, degree, &SolveOptions::default())?;
    assert!(report.converged, "derivation must converge before shrinking");
    println!("derived: {} nodes in {} orbits", rule.node_count(), rule.orbits.len());

    let (smaller, attempts) = eliminate_auto(&rule, &ElimConfig::default())?;
    for a in &attempts {
        let nu = a.nu.map_or("-".into(), |nu| format!("{nu:.0e}"));
        println!(
            "  outer {:>2}: remove {:<5} weight {:.3e} facet dist {:.3e} nu {:>5} -> {} ({} nodes)",
            a.outer_iter,
            a.kind.label(),
            a.weight,
            a.min_facet_distance,
            nu,
            if a.converged { "kept" } else { "rejected" },
            a.nodes
        );
    }
    println!(
        "eliminated: {} -> {} nodes",
        rule.node_count(),
        smaller.node_count()
    );
    println!();
    print!("{}", serialize_rule(&smaller, RuleStatus::Eliminated)?);
    Ok(())
}
