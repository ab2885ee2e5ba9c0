//! Prints the node-count lower-bound table for both reference elements.
//!
//! Usage: `cargo run --example bounds_table [MAX_DEGREE]`

use piquad::bounds::lower_bound;
use piquad::{Domain, Result};

fn main() -> Result<()> {
    let max: u32 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("MAX_DEGREE must be an integer"))
        .unwrap_or(20);

    for domain in [Domain::Triangle, Domain::Tetrahedron] {
        println!("{domain}:");
        println!("{:>7} {:>6}  per-kind counts", "degree", "nodes");
        for q in 1..=max.min(domain.max_degree()) {
            let estimate = lower_bound(domain, q)?;
            println!("{q:>7} {:>6}  {}", estimate.total_nodes(), estimate.counts);
        }
        println!();
    }
    Ok(())
}
