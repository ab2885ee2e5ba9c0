//! Reference simplices, fully symmetric orbits, and barycentric coordinate maps.
//!
//! Rules are stored as orbits: a kind tag plus the free parameters of one
//! representative barycentric point. Expansion applies the distinct coordinate
//! permutations of the representative, so a rule is symmetric by construction.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

/// Tolerance used to decide whether orbit parameters have collapsed onto a
/// higher-symmetry pattern, and by [`classify_orbit`] callers that do not
/// supply their own.
pub const CLASSIFY_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// domains
// ---------------------------------------------------------------------------

/// Supported reference domains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    Triangle,
    Tetrahedron,
}

impl Domain {
    pub fn dim(self) -> usize {
        match self {
            Domain::Triangle => 2,
            Domain::Tetrahedron => 3,
        }
    }

    /// Number of barycentric coordinates (`dim + 1`).
    pub fn n_bary(self) -> usize {
        self.dim() + 1
    }

    pub fn simplex(self) -> ReferenceSimplex {
        match self {
            Domain::Triangle => ReferenceSimplex::triangle(),
            Domain::Tetrahedron => ReferenceSimplex::tetrahedron(),
        }
    }

    /// Orbit kinds valid on this domain, in canonical (serialization) order.
    pub fn kinds(self) -> &'static [OrbitKind] {
        match self {
            Domain::Triangle => &[OrbitKind::S1, OrbitKind::S21, OrbitKind::S111],
            Domain::Tetrahedron => &[
                OrbitKind::S1,
                OrbitKind::S31,
                OrbitKind::S22,
                OrbitKind::S211,
                OrbitKind::S1111,
            ],
        }
    }

    /// Largest degree the deriver accepts.
    pub fn max_degree(self) -> u32 {
        match self {
            Domain::Triangle => 84,
            Domain::Tetrahedron => 40,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Domain::Triangle => "tri",
            Domain::Tetrahedron => "tet",
        }
    }

    pub fn parse(s: &str) -> Option<Domain> {
        match s {
            "tri" | "triangle" => Some(Domain::Triangle),
            "tet" | "tetrahedron" => Some(Domain::Tetrahedron),
            _ => None,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

// ---------------------------------------------------------------------------
// reference simplex
// ---------------------------------------------------------------------------

/// A reference simplex with vertex rows `T` ((d+1) x d) and its measure.
#[derive(Clone, Debug)]
pub struct ReferenceSimplex {
    pub domain: Domain,
    /// Row i holds vertex i.
    pub vertices: DMatrix<f64>,
    pub measure: f64,
    /// Inverse of the vertex matrix augmented with a row of ones; used to
    /// recover barycentric coordinates.
    bary_inv: DMatrix<f64>,
}

impl ReferenceSimplex {
    /// Vertices (-1,-1), (1,-1), (-1,1); measure 2.
    pub fn triangle() -> Self {
        let vertices = DMatrix::from_row_slice(3, 2, &[-1.0, -1.0, 1.0, -1.0, -1.0, 1.0]);
        Self::build(Domain::Triangle, vertices, 2.0)
    }

    /// Vertices (-1,-1,-1), (1,-1,-1), (-1,1,-1), (-1,-1,1); measure 4/3.
    pub fn tetrahedron() -> Self {
        let vertices = DMatrix::from_row_slice(
            4,
            3,
            &[
                -1.0, -1.0, -1.0, //
                1.0, -1.0, -1.0, //
                -1.0, 1.0, -1.0, //
                -1.0, -1.0, 1.0,
            ],
        );
        Self::build(Domain::Tetrahedron, vertices, 4.0 / 3.0)
    }

    fn build(domain: Domain, vertices: DMatrix<f64>, measure: f64) -> Self {
        let nb = domain.n_bary();
        // Columns are (vertex_i, 1); solving M lambda = (y, 1) recovers lambda.
        let mut m = DMatrix::zeros(nb, nb);
        for i in 0..nb {
            for k in 0..domain.dim() {
                m[(k, i)] = vertices[(i, k)];
            }
            m[(nb - 1, i)] = 1.0;
        }
        let bary_inv = m
            .try_inverse()
            .expect("reference simplex vertices are affinely independent");
        ReferenceSimplex {
            domain,
            vertices,
            measure,
            bary_inv,
        }
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// `y = sum_i lambda_i v_i`.
    pub fn barycentric_to_cartesian(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        let nb = self.domain.n_bary();
        if lambda.len() != nb {
            return Err(Error::Barycentric {
                detail: format!("expected {} coordinates, got {}", nb, lambda.len()),
            });
        }
        let d = self.dim();
        let mut y = vec![0.0; d];
        for i in 0..nb {
            for k in 0..d {
                y[k] += lambda[i] * self.vertices[(i, k)];
            }
        }
        Ok(y)
    }

    /// Recovers the barycentric coordinates of a cartesian point.
    pub fn cartesian_to_barycentric(&self, y: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        if y.len() != d {
            return Err(Error::Barycentric {
                detail: format!("expected {} cartesian coordinates, got {}", d, y.len()),
            });
        }
        let nb = d + 1;
        let mut rhs = DVector::zeros(nb);
        for k in 0..d {
            rhs[k] = y[k];
        }
        rhs[d] = 1.0;
        let lam = &self.bary_inv * rhs;
        Ok(lam.iter().copied().collect())
    }
}

// ---------------------------------------------------------------------------
// orbit kinds
// ---------------------------------------------------------------------------

/// Fully symmetric orbit kinds, named by the multiplicity pattern of the
/// representative barycentric point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrbitKind {
    S1,
    S21,
    S111,
    S31,
    S22,
    S211,
    S1111,
}

impl OrbitKind {
    /// Number of nodes the orbit expands to.
    pub fn cardinality(self) -> usize {
        match self {
            OrbitKind::S1 => 1,
            OrbitKind::S21 => 3,
            OrbitKind::S111 => 6,
            OrbitKind::S31 => 4,
            OrbitKind::S22 => 6,
            OrbitKind::S211 => 12,
            OrbitKind::S1111 => 24,
        }
    }

    /// Number of free geometric parameters.
    pub fn param_count(self) -> usize {
        match self {
            OrbitKind::S1 => 0,
            OrbitKind::S21 | OrbitKind::S31 | OrbitKind::S22 => 1,
            OrbitKind::S111 | OrbitKind::S211 => 2,
            OrbitKind::S1111 => 3,
        }
    }

    pub fn valid_in(self, domain: Domain) -> bool {
        domain.kinds().contains(&self)
    }

    pub fn label(self) -> &'static str {
        match self {
            OrbitKind::S1 => "S1",
            OrbitKind::S21 => "S21",
            OrbitKind::S111 => "S111",
            OrbitKind::S31 => "S31",
            OrbitKind::S22 => "S22",
            OrbitKind::S211 => "S211",
            OrbitKind::S1111 => "S1111",
        }
    }

    pub fn parse(s: &str) -> Option<OrbitKind> {
        match s {
            "S1" => Some(OrbitKind::S1),
            "S21" => Some(OrbitKind::S21),
            "S111" => Some(OrbitKind::S111),
            "S31" => Some(OrbitKind::S31),
            "S22" => Some(OrbitKind::S22),
            "S211" => Some(OrbitKind::S211),
            "S1111" => Some(OrbitKind::S1111),
            _ => None,
        }
    }

    /// Representative barycentric point for the given parameters.
    ///
    /// Only the parameter count is checked here; interiority and degeneracy
    /// are enforced by the validating expansion.
    pub fn pattern(self, params: &[f64], domain: Domain) -> Result<Vec<f64>> {
        if !self.valid_in(domain) {
            return Err(Error::KindDomainMismatch { kind: self, domain });
        }
        if params.len() != self.param_count() {
            return Err(Error::ParamCount {
                kind: self,
                expected: self.param_count(),
                got: params.len(),
            });
        }
        Ok(match self {
            OrbitKind::S1 => match domain {
                Domain::Triangle => vec![1.0 / 3.0; 3],
                Domain::Tetrahedron => vec![0.25; 4],
            },
            OrbitKind::S21 => {
                let a = params[0];
                vec![a, a, 1.0 - 2.0 * a]
            }
            OrbitKind::S111 => {
                let (a, b) = (params[0], params[1]);
                vec![a, b, 1.0 - a - b]
            }
            OrbitKind::S31 => {
                let a = params[0];
                vec![a, a, a, 1.0 - 3.0 * a]
            }
            OrbitKind::S22 => {
                let a = params[0];
                vec![a, a, 0.5 - a, 0.5 - a]
            }
            OrbitKind::S211 => {
                let (a, b) = (params[0], params[1]);
                vec![a, a, b, 1.0 - 2.0 * a - b]
            }
            OrbitKind::S1111 => {
                let (a, b, c) = (params[0], params[1], params[2]);
                vec![a, b, c, 1.0 - a - b - c]
            }
        })
    }

    /// Rows are the derivative of the representative pattern with respect to
    /// each parameter.
    pub fn pattern_jacobian(self) -> &'static [&'static [f64]] {
        match self {
            OrbitKind::S1 => &[],
            OrbitKind::S21 => &[&[1.0, 1.0, -2.0]],
            OrbitKind::S111 => &[&[1.0, 0.0, -1.0], &[0.0, 1.0, -1.0]],
            OrbitKind::S31 => &[&[1.0, 1.0, 1.0, -3.0]],
            OrbitKind::S22 => &[&[1.0, 1.0, -1.0, -1.0]],
            OrbitKind::S211 => &[&[1.0, 1.0, 0.0, -2.0], &[0.0, 0.0, 1.0, -1.0]],
            OrbitKind::S1111 => &[
                &[1.0, 0.0, 0.0, -1.0],
                &[0.0, 1.0, 0.0, -1.0],
                &[0.0, 0.0, 1.0, -1.0],
            ],
        }
    }

    /// Expected multiplicity signature of the representative pattern, sorted
    /// descending.
    fn signature(self, domain: Domain) -> Vec<usize> {
        match self {
            OrbitKind::S1 => vec![domain.n_bary()],
            OrbitKind::S21 => vec![2, 1],
            OrbitKind::S111 => vec![1, 1, 1],
            OrbitKind::S31 => vec![3, 1],
            OrbitKind::S22 => vec![2, 2],
            OrbitKind::S211 => vec![2, 1, 1],
            OrbitKind::S1111 => vec![1, 1, 1, 1],
        }
    }

    /// Coordinate permutations carrying the representative to each node of
    /// the orbit. Row `r` maps node coordinate `j` to `pattern[perm[r][j]]`.
    /// Rows are fixed in lexicographic order of the permuted symbol tuples,
    /// so node order inside an orbit is deterministic.
    pub fn node_permutations(self, domain: Domain) -> &'static [Vec<usize>] {
        static TABLE: OnceLock<BTreeMap<(OrbitKind, Domain), Vec<Vec<usize>>>> = OnceLock::new();
        let table = TABLE.get_or_init(|| {
            let mut map = BTreeMap::new();
            for domain in [Domain::Triangle, Domain::Tetrahedron] {
                for &kind in domain.kinds() {
                    map.insert((kind, domain), build_permutations(kind, domain));
                }
            }
            map
        });
        table
            .get(&(self, domain))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }
}

impl fmt::Display for OrbitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Symbol slots of the representative pattern: coordinates sharing a symbol
/// are equal by construction.
fn kind_symbols(kind: OrbitKind, domain: Domain) -> Vec<usize> {
    match kind {
        OrbitKind::S1 => vec![0; domain.n_bary()],
        OrbitKind::S21 => vec![0, 0, 1],
        OrbitKind::S111 => vec![0, 1, 2],
        OrbitKind::S31 => vec![0, 0, 0, 1],
        OrbitKind::S22 => vec![0, 0, 1, 1],
        OrbitKind::S211 => vec![0, 0, 1, 2],
        OrbitKind::S1111 => vec![0, 1, 2, 3],
    }
}

fn build_permutations(kind: OrbitKind, domain: Domain) -> Vec<Vec<usize>> {
    let symbols = kind_symbols(kind, domain);
    let n = symbols.len();
    // Distinct permuted symbol tuples, each keyed by the lexicographically
    // smallest index permutation producing it.
    let mut seen: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for perm in all_permutations(n) {
        let tuple: Vec<usize> = perm.iter().map(|&slot| symbols[slot]).collect();
        seen.entry(tuple).or_insert(perm);
    }
    let rows: Vec<Vec<usize>> = seen.into_values().collect();
    debug_assert_eq!(rows.len(), kind.cardinality());
    rows
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

// ---------------------------------------------------------------------------
// orbits
// ---------------------------------------------------------------------------

/// One fully symmetric orbit: kind, free parameters, and the weight shared by
/// every node of the orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct SymOrbit {
    pub kind: OrbitKind,
    pub params: Vec<f64>,
    pub weight: f64,
}

impl SymOrbit {
    pub fn new(kind: OrbitKind, params: Vec<f64>, weight: f64) -> Result<Self> {
        if params.len() != kind.param_count() {
            return Err(Error::ParamCount {
                kind,
                expected: kind.param_count(),
                got: params.len(),
            });
        }
        Ok(SymOrbit {
            kind,
            params,
            weight,
        })
    }

    pub fn cardinality(&self) -> usize {
        self.kind.cardinality()
    }

    pub fn pattern(&self, domain: Domain) -> Result<Vec<f64>> {
        self.kind.pattern(&self.params, domain)
    }

    /// Checks interiority and non-degeneracy of the representative pattern.
    pub fn validate(&self, domain: Domain) -> Result<()> {
        let pattern = self.pattern(domain)?;
        let min_coord = pattern.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min_coord > 0.0) {
            return Err(Error::NonInteriorOrbit {
                kind: self.kind,
                pattern,
                min_coord,
            });
        }
        if multiplicity_signature(&pattern, CLASSIFY_TOL) != self.kind.signature(domain) {
            return Err(Error::DegenerateOrbit {
                kind: self.kind,
                pattern,
            });
        }
        Ok(())
    }

    /// Barycentric nodes of the orbit after validation.
    pub fn expand(&self, domain: Domain) -> Result<Vec<Vec<f64>>> {
        self.validate(domain)?;
        Ok(self.expand_formal(domain))
    }

    /// Barycentric nodes without validity checks: always `cardinality()` rows
    /// in the fixed permutation order, even for degenerate parameters. The
    /// solver iterates on this expansion.
    pub fn expand_formal(&self, domain: Domain) -> Vec<Vec<f64>> {
        let pattern = self
            .kind
            .pattern(&self.params, domain)
            .expect("orbit kind/params are structurally valid");
        self.kind
            .node_permutations(domain)
            .iter()
            .map(|perm| perm.iter().map(|&s| pattern[s]).collect())
            .collect()
    }

    /// Smallest barycentric coordinate over the orbit (distance to the
    /// nearest facet in barycentric terms).
    pub fn min_facet_distance(&self, domain: Domain) -> f64 {
        self.pattern(domain)
            .map(|p| p.iter().copied().fold(f64::INFINITY, f64::min))
            .unwrap_or(f64::NEG_INFINITY)
    }

    /// Rewrites the parameters in canonical form without changing the node
    /// set: repeated values stay the leading parameter, free singleton values
    /// are sorted ascending.
    pub fn canonicalized(&self, domain: Domain) -> Result<SymOrbit> {
        let pattern = self.pattern(domain)?;
        let params = match self.kind {
            OrbitKind::S1 => vec![],
            OrbitKind::S21 | OrbitKind::S31 => vec![self.params[0]],
            OrbitKind::S22 => {
                let a = self.params[0];
                vec![a.min(0.5 - a)]
            }
            OrbitKind::S111 => {
                let mut v = pattern.clone();
                v.sort_by(f64::total_cmp);
                vec![v[0], v[1]]
            }
            OrbitKind::S211 => {
                let a = self.params[0];
                let b = self.params[1];
                vec![a, b.min(1.0 - 2.0 * a - b)]
            }
            OrbitKind::S1111 => {
                let mut v = pattern.clone();
                v.sort_by(f64::total_cmp);
                vec![v[0], v[1], v[2]]
            }
        };
        SymOrbit::new(self.kind, params, self.weight)
    }
}

/// Multiplicities of approximately equal values, sorted descending.
/// Values are grouped by adjacency after sorting.
fn multiplicity_signature(values: &[f64], tol: f64) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut sig = Vec::new();
    let mut run = 1usize;
    for i in 1..sorted.len() {
        if (sorted[i] - sorted[i - 1]).abs() <= tol {
            run += 1;
        } else {
            sig.push(run);
            run = 1;
        }
    }
    sig.push(run);
    sig.sort_unstable_by(|a, b| b.cmp(a));
    sig
}

/// Groups approximately equal values; returns (group mean, multiplicity) in
/// descending order of value.
fn value_groups(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| f64::total_cmp(b, a));
    let mut groups: Vec<(f64, usize)> = Vec::new();
    let mut start = 0usize;
    for i in 1..=sorted.len() {
        if i == sorted.len() || (sorted[i - 1] - sorted[i]).abs() > tol {
            let slice = &sorted[start..i];
            let mean = slice.iter().sum::<f64>() / slice.len() as f64;
            groups.push((mean, slice.len()));
            start = i;
        }
    }
    groups
}

/// Identifies the orbit a barycentric point belongs to and recovers canonical
/// parameters. The point may be any member of the orbit.
pub fn classify_orbit(lambda: &[f64], domain: Domain, tol: f64) -> Result<(OrbitKind, Vec<f64>)> {
    let nb = domain.n_bary();
    if lambda.len() != nb {
        return Err(Error::Barycentric {
            detail: format!("expected {} coordinates, got {}", nb, lambda.len()),
        });
    }
    let sum: f64 = lambda.iter().sum();
    if (sum - 1.0).abs() > 1e-8 {
        return Err(Error::Barycentric {
            detail: format!("coordinates sum to {sum}, expected 1"),
        });
    }
    let groups = value_groups(lambda, tol);
    let mut sig: Vec<usize> = groups.iter().map(|&(_, m)| m).collect();
    sig.sort_unstable_by(|a, b| b.cmp(a));

    let kind = domain
        .kinds()
        .iter()
        .copied()
        .find(|k| k.signature(domain) == sig)
        .ok_or_else(|| Error::Barycentric {
            detail: format!("multiplicity signature {sig:?} matches no orbit kind on {domain}"),
        })?;

    let params = match kind {
        OrbitKind::S1 => vec![],
        OrbitKind::S21 | OrbitKind::S31 => {
            // repeated value is the parameter
            let rep = groups
                .iter()
                .find(|&&(_, m)| m > 1)
                .expect("signature guarantees a repeated group");
            vec![rep.0]
        }
        OrbitKind::S22 => {
            // two pairs; the smaller pair value is canonical
            vec![groups.iter().map(|&(v, _)| v).fold(f64::INFINITY, f64::min)]
        }
        OrbitKind::S211 => {
            let rep = groups
                .iter()
                .find(|&&(_, m)| m == 2)
                .expect("signature guarantees a pair");
            let singles: Vec<f64> = groups
                .iter()
                .filter(|&&(_, m)| m == 1)
                .map(|&(v, _)| v)
                .collect();
            vec![rep.0, singles[0].min(singles[1])]
        }
        OrbitKind::S111 | OrbitKind::S1111 => {
            // all distinct; ascending values, dependent coordinate dropped
            let mut v: Vec<f64> = groups.iter().map(|&(val, _)| val).collect();
            v.sort_by(f64::total_cmp);
            v.truncate(nb - 1);
            v
        }
    };
    Ok((kind, params))
}

// ---------------------------------------------------------------------------
// rules
// ---------------------------------------------------------------------------

/// Per-kind orbit counts for one domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KindCounts {
    pub domain: Domain,
    counts: [usize; 7],
}

impl KindCounts {
    pub fn new(domain: Domain) -> Self {
        KindCounts {
            domain,
            counts: [0; 7],
        }
    }

    pub fn get(&self, kind: OrbitKind) -> usize {
        self.counts[kind as usize]
    }

    pub fn set(&mut self, kind: OrbitKind, count: usize) {
        self.counts[kind as usize] = count;
    }

    pub fn add(&mut self, kind: OrbitKind, count: usize) {
        self.counts[kind as usize] += count;
    }

    /// Iterates kinds of the domain in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (OrbitKind, usize)> + '_ {
        self.domain.kinds().iter().map(|&k| (k, self.get(k)))
    }

    pub fn total_orbits(&self) -> usize {
        self.iter().map(|(_, c)| c).sum()
    }

    pub fn total_nodes(&self) -> usize {
        self.iter().map(|(k, c)| k.cardinality() * c).sum()
    }
}

impl fmt::Display for KindCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (kind, count) in self.iter() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{} {}", kind, count)?;
            first = false;
        }
        Ok(())
    }
}

/// A fully symmetric quadrature rule on a reference simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadRule {
    pub domain: Domain,
    pub degree: u32,
    pub orbits: Vec<SymOrbit>,
}

impl QuadRule {
    pub fn new(domain: Domain, degree: u32, orbits: Vec<SymOrbit>) -> Result<Self> {
        for orbit in &orbits {
            if !orbit.kind.valid_in(domain) {
                return Err(Error::KindDomainMismatch {
                    kind: orbit.kind,
                    domain,
                });
            }
        }
        Ok(QuadRule {
            domain,
            degree,
            orbits,
        })
    }

    pub fn node_count(&self) -> usize {
        self.orbits.iter().map(SymOrbit::cardinality).sum()
    }

    pub fn orbit_counts(&self) -> KindCounts {
        let mut counts = KindCounts::new(self.domain);
        for orbit in &self.orbits {
            counts.add(orbit.kind, 1);
        }
        counts
    }

    pub fn weight_sum(&self) -> f64 {
        self.orbits
            .iter()
            .map(|o| o.weight * o.cardinality() as f64)
            .sum()
    }

    /// Validates every orbit (interiority, non-degeneracy, positive weight).
    pub fn validate_orbits(&self) -> Result<()> {
        if self.orbits.is_empty() {
            return Err(Error::EmptyRule);
        }
        for orbit in &self.orbits {
            orbit.validate(self.domain)?;
            if !(orbit.weight > 0.0) {
                return Err(Error::InvalidArgument {
                    detail: format!(
                        "orbit {} has non-positive weight {:e}",
                        orbit.kind, orbit.weight
                    ),
                });
            }
        }
        Ok(())
    }

    /// Barycentric node matrix (`node_count x (d+1)`), orbit-major, using the
    /// formal expansion.
    pub fn barycentric_nodes(&self) -> DMatrix<f64> {
        let nb = self.domain.n_bary();
        let n = self.node_count();
        let mut out = DMatrix::zeros(n, nb);
        let mut row = 0;
        for orbit in &self.orbits {
            for node in orbit.expand_formal(self.domain) {
                for (j, v) in node.iter().enumerate() {
                    out[(row, j)] = *v;
                }
                row += 1;
            }
        }
        out
    }

    /// Node weights aligned with [`Self::barycentric_nodes`].
    pub fn node_weights(&self) -> DVector<f64> {
        let mut out = DVector::zeros(self.node_count());
        let mut row = 0;
        for orbit in &self.orbits {
            for _ in 0..orbit.cardinality() {
                out[row] = orbit.weight;
                row += 1;
            }
        }
        out
    }

    /// Cartesian nodes and weights after validating every orbit.
    pub fn expand(&self) -> Result<(DMatrix<f64>, DVector<f64>)> {
        self.validate_orbits()?;
        Ok(self.expand_formal())
    }

    /// Cartesian nodes and weights without validity checks.
    pub fn expand_formal(&self) -> (DMatrix<f64>, DVector<f64>) {
        let simplex = self.domain.simplex();
        let bary = self.barycentric_nodes();
        let nodes = &bary * &simplex.vertices;
        (nodes, self.node_weights())
    }

    /// Canonical parameter form for every orbit; node sets are unchanged.
    pub fn canonicalized(&self) -> Result<QuadRule> {
        let orbits = self
            .orbits
            .iter()
            .map(|o| o.canonicalized(self.domain))
            .collect::<Result<Vec<_>>>()?;
        Ok(QuadRule {
            domain: self.domain,
            degree: self.degree,
            orbits,
        })
    }

    /// Orbits sorted by kind, then parameters, then weight. Serialization
    /// uses this order so equal rules print identically.
    pub fn sorted_for_output(&self) -> QuadRule {
        let mut orbits = self.orbits.clone();
        orbits.sort_by(|a, b| {
            a.kind
                .cmp(&b.kind)
                .then_with(|| lex_cmp(&a.params, &b.params))
                .then_with(|| a.weight.total_cmp(&b.weight))
        });
        QuadRule {
            domain: self.domain,
            degree: self.degree,
            orbits,
        }
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let c = x.total_cmp(y);
        if c != std::cmp::Ordering::Equal {
            return c;
        }
    }
    a.len().cmp(&b.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn reference_simplices() {
        let tri = ReferenceSimplex::triangle();
        assert_eq!(tri.dim(), 2);
        assert_relative_eq!(tri.measure, 2.0);
        let tet = ReferenceSimplex::tetrahedron();
        assert_eq!(tet.dim(), 3);
        assert_relative_eq!(tet.measure, 4.0 / 3.0);
    }

    #[test]
    fn barycentric_round_trip_vertices() {
        let tri = ReferenceSimplex::triangle();
        let y = tri.barycentric_to_cartesian(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(y, vec![-1.0, -1.0]);
        let lam = tri.cartesian_to_barycentric(&[-1.0, -1.0]).unwrap();
        assert_relative_eq!(lam[0], 1.0, max_relative = 1e-14);
        assert!(lam[1].abs() < 1e-14 && lam[2].abs() < 1e-14);

        let tet = ReferenceSimplex::tetrahedron();
        let y = tet
            .barycentric_to_cartesian(&[0.25, 0.25, 0.25, 0.25])
            .unwrap();
        for v in &y {
            assert_relative_eq!(*v, -0.5, max_relative = 1e-14);
        }
    }

    #[test]
    fn cardinalities_and_param_counts() {
        let expect = [
            (OrbitKind::S1, 1, 0),
            (OrbitKind::S21, 3, 1),
            (OrbitKind::S111, 6, 2),
            (OrbitKind::S31, 4, 1),
            (OrbitKind::S22, 6, 1),
            (OrbitKind::S211, 12, 2),
            (OrbitKind::S1111, 24, 3),
        ];
        for (kind, card, np) in expect {
            assert_eq!(kind.cardinality(), card, "{kind}");
            assert_eq!(kind.param_count(), np, "{kind}");
        }
    }

    #[test]
    fn expansion_s21() {
        let orbit = SymOrbit::new(OrbitKind::S21, vec![0.25], 0.1).unwrap();
        let nodes = orbit.expand(Domain::Triangle).unwrap();
        assert_eq!(nodes.len(), 3);
        // every node is a permutation of (0.25, 0.25, 0.5)
        for node in &nodes {
            let mut s = node.clone();
            s.sort_by(f64::total_cmp);
            assert_eq!(s, vec![0.25, 0.25, 0.5]);
        }
        // rows are distinct
        assert_ne!(nodes[0], nodes[1]);
        assert_ne!(nodes[1], nodes[2]);
    }

    #[test]
    fn expansion_s22_example() {
        let orbit = SymOrbit::new(OrbitKind::S22, vec![0.1], 0.05).unwrap();
        let nodes = orbit.expand(Domain::Tetrahedron).unwrap();
        assert_eq!(nodes.len(), 6);
        for node in &nodes {
            let mut s = node.clone();
            s.sort_by(f64::total_cmp);
            assert_relative_eq!(s[0], 0.1);
            assert_relative_eq!(s[1], 0.1);
            assert_relative_eq!(s[2], 0.4);
            assert_relative_eq!(s[3], 0.4);
        }
    }

    #[test]
    fn degenerate_and_exterior_orbits_rejected() {
        // alpha = 1/3 collapses S21 onto the centroid
        let orbit = SymOrbit::new(OrbitKind::S21, vec![1.0 / 3.0], 0.1).unwrap();
        assert!(matches!(
            orbit.expand(Domain::Triangle),
            Err(Error::DegenerateOrbit { .. })
        ));
        // alpha = 1/2 puts the third coordinate on the boundary
        let orbit = SymOrbit::new(OrbitKind::S21, vec![0.5], 0.1).unwrap();
        assert!(matches!(
            orbit.expand(Domain::Triangle),
            Err(Error::NonInteriorOrbit { .. })
        ));
        // alpha = 0.6 leaves the simplex entirely
        let orbit = SymOrbit::new(OrbitKind::S21, vec![0.6], 0.1).unwrap();
        assert!(matches!(
            orbit.expand(Domain::Triangle),
            Err(Error::NonInteriorOrbit { .. })
        ));
        // S31 at the centroid value collapses
        let orbit = SymOrbit::new(OrbitKind::S31, vec![0.25], 0.1).unwrap();
        assert!(matches!(
            orbit.expand(Domain::Tetrahedron),
            Err(Error::DegenerateOrbit { .. })
        ));
    }

    #[test]
    fn classify_examples() {
        let (kind, params) = classify_orbit(&[0.2, 0.2, 0.6], Domain::Triangle, 1e-9).unwrap();
        assert_eq!(kind, OrbitKind::S21);
        assert_relative_eq!(params[0], 0.2);

        let (kind, params) =
            classify_orbit(&[0.1, 0.1, 0.4, 0.4], Domain::Tetrahedron, 1e-9).unwrap();
        assert_eq!(kind, OrbitKind::S22);
        assert_relative_eq!(params[0], 0.1);

        let (kind, params) = classify_orbit(
            &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            Domain::Triangle,
            1e-9,
        )
        .unwrap();
        assert_eq!(kind, OrbitKind::S1);
        assert!(params.is_empty());
    }

    #[test]
    fn classify_rejects_bad_input() {
        assert!(classify_orbit(&[0.5, 0.5, 0.5], Domain::Triangle, 1e-9).is_err());
        assert!(classify_orbit(&[0.5, 0.5], Domain::Triangle, 1e-9).is_err());
    }

    #[test]
    fn min_facet_distance_example() {
        let orbit = SymOrbit::new(OrbitKind::S111, vec![0.1, 0.2], 0.05).unwrap();
        assert_relative_eq!(orbit.min_facet_distance(Domain::Triangle), 0.1);
    }

    #[test]
    fn permutation_tables() {
        assert_eq!(
            OrbitKind::S21.node_permutations(Domain::Triangle).len(),
            3
        );
        assert_eq!(
            OrbitKind::S1111
                .node_permutations(Domain::Tetrahedron)
                .len(),
            24
        );
        assert_eq!(
            OrbitKind::S211.node_permutations(Domain::Tetrahedron).len(),
            12
        );
        assert_eq!(all_permutations(4).len(), 24);
        // lexicographic enumeration
        let perms = all_permutations(3);
        assert_eq!(perms[0], vec![0, 1, 2]);
        assert_eq!(perms[5], vec![2, 1, 0]);
    }

    #[test]
    fn rule_counts_and_weight_sum() {
        let rule = QuadRule::new(
            Domain::Triangle,
            2,
            vec![SymOrbit::new(OrbitKind::S21, vec![1.0 / 6.0], 2.0 / 3.0).unwrap()],
        )
        .unwrap();
        assert_eq!(rule.node_count(), 3);
        assert_relative_eq!(rule.weight_sum(), 2.0, max_relative = 1e-15);
        let counts = rule.orbit_counts();
        assert_eq!(counts.get(OrbitKind::S21), 1);
        assert_eq!(counts.total_nodes(), 3);
    }

    proptest! {
        #[test]
        fn prop_bary_cart_round_trip_tri(a in 0.01f64..0.98, t in 0.01f64..0.99) {
            let b = (1.0 - a) * t;
            let c = 1.0 - a - b;
            prop_assume!(c > 0.01);
            let tri = ReferenceSimplex::triangle();
            let y = tri.barycentric_to_cartesian(&[a, b, c]).unwrap();
            let lam = tri.cartesian_to_barycentric(&y).unwrap();
            prop_assert!((lam[0] - a).abs() < 1e-13);
            prop_assert!((lam[1] - b).abs() < 1e-13);
            prop_assert!((lam[2] - c).abs() < 1e-13);
        }

        #[test]
        fn prop_classify_round_trip_s211(a in 0.02f64..0.3, b in 0.02f64..0.3) {
            let rest = 1.0 - 2.0 * a - b;
            prop_assume!(rest > 0.02);
            prop_assume!((a - b).abs() > 1e-6 && (a - rest).abs() > 1e-6 && (b - rest).abs() > 1e-6);
            let orbit = SymOrbit::new(OrbitKind::S211, vec![a, b], 0.01).unwrap();
            let canon = orbit.canonicalized(Domain::Tetrahedron).unwrap();
            for node in orbit.expand(Domain::Tetrahedron).unwrap() {
                let (kind, params) = classify_orbit(&node, Domain::Tetrahedron, 1e-10).unwrap();
                prop_assert_eq!(kind, OrbitKind::S211);
                prop_assert!((params[0] - canon.params[0]).abs() < 1e-12);
                prop_assert!((params[1] - canon.params[1]).abs() < 1e-12);
            }
        }

        #[test]
        fn prop_expansion_is_symmetric(a in 0.02f64..0.3, b in 0.35f64..0.45) {
            // node multiset of an orbit is invariant under coordinate permutation
            let orbit = SymOrbit::new(OrbitKind::S211, vec![a, b], 0.01).unwrap();
            let nodes = orbit.expand_formal(Domain::Tetrahedron);
            let canon = |rows: &[Vec<f64>]| {
                let mut v: Vec<Vec<f64>> = rows.to_vec();
                v.sort_by(|x, y| lex_cmp(x, y));
                v
            };
            let base = canon(&nodes);
            for perm in all_permutations(4) {
                let permuted: Vec<Vec<f64>> = nodes
                    .iter()
                    .map(|n| perm.iter().map(|&j| n[j]).collect())
                    .collect();
                let p = canon(&permuted);
                for (x, y) in base.iter().zip(p.iter()) {
                    for (u, v) in x.iter().zip(y.iter()) {
                        prop_assert!((u - v).abs() < 1e-15);
                    }
                }
            }
        }
    }
}
