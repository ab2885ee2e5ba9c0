//! Crate-wide error type.

use crate::geometry::{Domain, OrbitKind};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("orbit {kind} is degenerate: pattern {pattern:?} collapses to a higher-symmetry orbit")]
    DegenerateOrbit { kind: OrbitKind, pattern: Vec<f64> },

    #[error("orbit {kind} is not interior: pattern {pattern:?} has minimum coordinate {min_coord:e}")]
    NonInteriorOrbit {
        kind: OrbitKind,
        pattern: Vec<f64>,
        min_coord: f64,
    },

    #[error("orbit kind {kind} does not belong to domain {domain}")]
    KindDomainMismatch { kind: OrbitKind, domain: Domain },

    #[error("orbit {kind} expects {expected} parameters, got {got}")]
    ParamCount {
        kind: OrbitKind,
        expected: usize,
        got: usize,
    },

    #[error("invalid barycentric coordinates: {detail}")]
    Barycentric { detail: String },

    #[error("vertex map is singular; cannot recover barycentric coordinates")]
    SingularSimplex,

    #[error("degree {degree} out of supported range {min}..={max} for {domain}")]
    DegreeRange {
        domain: Domain,
        degree: u32,
        min: u32,
        max: u32,
    },

    #[error("rule has no orbits")]
    EmptyRule,

    #[error("initial guess generation failed: {detail}")]
    Generation { detail: String },

    #[error("numerical failure: {detail}")]
    Numeric { detail: String },

    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },

    #[error("expected a {expected} rule, got {got}")]
    DomainMismatch { expected: Domain, got: Domain },

    #[error("invalid argument: {detail}")]
    InvalidArgument { detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
