//! Grid-convergence study: integrates the separable product of sines over
//! the unit cube on a sequence of uniform tetrahedral meshes and reports
//! the observed convergence rates.
//!
//! Fully symmetric rules gain one order on even degrees, so a degree-q rule
//! converges at rate q+2 when q is even and q+1 when q is odd; the observed
//! rates approach that from above as the mesh resolves the integrand.
//!
//! Usage: `cargo run --release --example mesh_convergence [DEGREE]`

use piquad::initgen::derive_rule;
use piquad::solver::SolveOptions;
use piquad::verify::{convergence_study, TestIntegral};
use piquad::{Domain, Result};

fn main() -> Result<()> {
    let degree: u32 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("DEGREE must be an integer"))
        .unwrap_or(4);

    let (rule, report) = derive_rule(Domain::Tetrahedron, degree, &SolveOptions::default())?;
    assert!(report.converged);

    let case = TestIntegral::J3;
    let expected = degree + if degree % 2 == 0 { 2 } else { 1 };
    println!(
        "case {} with the degree {degree} rule ({} nodes per element); expected rate {expected}",
        case.label(),
        rule.node_count()
    );

    let study = convergence_study(&rule, case, &[2, 3, 4, 6, 8])?;
    println!("{:>4} {:>9} {:>24} {:>12} {:>6}", "n", "elements", "value", "error", "rate");
    for i in 0..study.ns.len() {
        let rate = match study.rates[i] {
            Some(r) => format!("{r:.2}"),
            None if i == 0 => "-".into(),
            None => "sat".into(),
        };
        println!(
            "{:>4} {:>9} {:>24.16e} {:>12.4e} {:>6}",
            study.ns[i],
            6 * study.ns[i].pow(3),
            study.values[i],
            study.errors[i],
            rate
        );
    }
    Ok(())
}
