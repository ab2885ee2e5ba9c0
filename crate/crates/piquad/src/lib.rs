//! Fully symmetric quadrature rules with positive weights and interior nodes
//! on reference triangles and tetrahedra.
//!
//! The crate derives rules by moment matching: a deterministic line-based
//! initial guess is refined by a damped least-squares iteration, then shrunk
//! by attempting to remove one symmetry orbit at a time. Companion modules
//! provide node-count lower bounds, rule validation against exact monomial
//! integrals, a text serialization format, and uniform-mesh convergence
//! studies.
//!
//! Start with the runnable examples:
//!
//! ```text
//! cargo run --example bounds_table
//! cargo run --example initial_guess
//! cargo run --example derive_rule
//! cargo run --example eliminate_rule
//! cargo run --example validate_catalog
//! cargo run --example pointset_export
//! cargo run --example mesh_convergence
//! cargo run --example efficiency_table
//! ```
//!
//! or with the `piquad` binary, e.g.
//! `piquad derive --domain tri --degree 8 --out tri08.rule`.

pub mod basis;
pub mod bounds;
pub mod eliminate;
pub mod error;
pub mod geometry;
pub mod initgen;
pub mod rules_io;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{classify_orbit, Domain, KindCounts, OrbitKind, QuadRule, ReferenceSimplex, SymOrbit};
