//! Initial-guess construction: half-line Gauss-Legendre nodes mapped onto a
//! corner subdomain of the simplex by a multilinear map, then collected into
//! symmetry orbits.
//!
//! The construction is fully deterministic, and the resulting orbit counts
//! follow closed-form formulas in the number of half-line nodes; generation
//! fails loudly if the classified counts ever disagree with those formulas.

use crate::error::{Error, Result};
use crate::geometry::{classify_orbit, Domain, KindCounts, OrbitKind, QuadRule, SymOrbit};
use crate::solver::{lm_solve, SolveOptions, SolveReport};

/// Deduplication tolerance for tensor points that land on the same orbit
/// representative.
const DEDUP_TOL: f64 = 1e-12;

/// Classification tolerance for mapping representatives to orbit kinds.
const CLASSIFY_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes
// ---------------------------------------------------------------------------

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], nodes
/// ascending. Roots are located by Newton iteration on the three-term
/// recurrence from cosine initial guesses, converged to 1e-15.
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidArgument {
            detail: "Gauss-Legendre rule needs at least one point".into(),
        });
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        // k = 0 starts near +1
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut converged = false;
        for _ in 0..100 {
            let (p, d) = legendre_eval(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numeric {
                detail: format!("Legendre root {k} of {n} did not converge"),
            });
        }
        // derivative at the converged node gives the weight
        let (_, dp) = legendre_eval(n, x);
        nodes[k] = x;
        weights[k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    nodes.reverse();
    weights.reverse();
    // symmetrize mirror pairs and pin the odd central node to zero
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let v = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -v;
        nodes[j] = v;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// P_n(x) and its derivative via the Legendre recurrence.
fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 1..n {
        let jf = j as f64;
        let p2 = ((2.0 * jf + 1.0) * x * p1 - jf * p0) / (jf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The non-positive half of the n-point Gauss-Legendre nodes, ascending.
/// For odd n this includes the central node at exactly zero.
pub fn half_line_nodes(n: usize) -> Result<Vec<f64>> {
    let (nodes, _) = gauss_legendre(n)?;
    Ok(nodes.into_iter().filter(|&x| x <= 0.0).collect())
}

// ---------------------------------------------------------------------------
// line rule size selection
// ---------------------------------------------------------------------------

/// Number of line Gauss-Legendre points used to seed a degree-q rule.
pub fn select_n1(domain: Domain, q: u32) -> usize {
    let q = q as usize;
    match domain {
        Domain::Triangle => {
            if q >= 30 || q % 2 == 0 || (q - 1) % 4 == 0 {
                q / 2 + 1
            } else {
                q / 2 + 2
            }
        }
        Domain::Tetrahedron => {
            if q == 3 || q == 7 || q == 11 {
                q / 2 + 2
            } else {
                q / 2 + 1
            }
        }
    }
}

/// Closed-form orbit counts of the corner-mapped tensor construction with
/// n1 line nodes.
pub fn predict_orbit_counts(domain: Domain, n1: usize) -> KindCounts {
    let m = n1 % 2;
    let nr = (n1 - m) / 2;
    let mut counts = KindCounts::new(domain);
    match domain {
        Domain::Triangle => {
            counts.set(OrbitKind::S1, m);
            counts.set(OrbitKind::S21, (1 + m) * nr);
            counts.set(OrbitKind::S111, (nr * nr - nr) / 2);
        }
        Domain::Tetrahedron => {
            counts.set(OrbitKind::S1, m);
            counts.set(OrbitKind::S31, (1 + m) * nr);
            counts.set(OrbitKind::S22, m * nr);
            let pairs = nr * nr - nr; // always even
            counts.set(
                OrbitKind::S211,
                if m == 0 { pairs } else { 3 * pairs / 2 },
            );
            let nri = nr as i64;
            let s1111 = ((nri - 1).pow(3) - nri + 1) / 6;
            counts.set(OrbitKind::S1111, s1111.max(0) as usize);
        }
    }
    counts
}

// ---------------------------------------------------------------------------
// corner subdomain maps
// ---------------------------------------------------------------------------

/// Quadrilateral corners in barycentric coordinates: vertex, two adjacent
/// edge midpoints, centroid.
const TRI_CORNERS: [[f64; 3]; 4] = [
    [1.0, 0.0, 0.0],               // vertex
    [0.5, 0.5, 0.0],               // edge midpoint (u-direction)
    [0.5, 0.0, 0.5],               // edge midpoint (v-direction)
    [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], // centroid
];

fn tri_map(u: f64, v: f64) -> Vec<f64> {
    let c = [
        (1.0 - u) * (1.0 - v),
        u * (1.0 - v),
        (1.0 - u) * v,
        u * v,
    ];
    let mut lam = vec![0.0; 3];
    for (ci, corner) in c.iter().zip(TRI_CORNERS.iter()) {
        for k in 0..3 {
            lam[k] += ci * corner[k];
        }
    }
    lam
}

/// Hexahedral corners: vertex, three adjacent edge midpoints, three adjacent
/// face centroids, centroid.
const TET_CORNERS: [[f64; 4]; 8] = [
    [1.0, 0.0, 0.0, 0.0],
    [0.5, 0.5, 0.0, 0.0],
    [0.5, 0.0, 0.5, 0.0],
    [0.5, 0.0, 0.0, 0.5],
    [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0],
    [1.0 / 3.0, 1.0 / 3.0, 0.0, 1.0 / 3.0],
    [1.0 / 3.0, 0.0, 1.0 / 3.0, 1.0 / 3.0],
    [0.25, 0.25, 0.25, 0.25],
];

fn tet_map(u: f64, v: f64, w: f64) -> Vec<f64> {
    let c = [
        (1.0 - u) * (1.0 - v) * (1.0 - w),
        u * (1.0 - v) * (1.0 - w),
        (1.0 - u) * v * (1.0 - w),
        (1.0 - u) * (1.0 - v) * w,
        u * v * (1.0 - w),
        u * (1.0 - v) * w,
        (1.0 - u) * v * w,
        u * v * w,
    ];
    let mut lam = vec![0.0; 4];
    for (ci, corner) in c.iter().zip(TET_CORNERS.iter()) {
        for k in 0..4 {
            lam[k] += ci * corner[k];
        }
    }
    lam
}

// ---------------------------------------------------------------------------
// seed construction
// ---------------------------------------------------------------------------

/// A line Gauss-Legendre seed: the half-line nodes that generate the tensor
/// construction for one domain.
#[derive(Clone, Debug)]
pub struct LineSeed {
    pub domain: Domain,
    pub n1: usize,
    /// 1 when n1 is odd (a node sits at the centroid image), else 0.
    pub m: usize,
    pub n_r: usize,
    /// Half-line nodes mapped to (0, 1]: u = t + 1 for non-positive t.
    pub u: Vec<f64>,
}

impl LineSeed {
    pub fn new(domain: Domain, n1: usize) -> Result<Self> {
        if n1 == 0 {
            return Err(Error::InvalidArgument {
                detail: "line seed needs at least one node".into(),
            });
        }
        let half = half_line_nodes(n1)?;
        let m = n1 % 2;
        let n_r = (n1 - m) / 2;
        debug_assert_eq!(half.len(), n_r + m);
        Ok(LineSeed {
            domain,
            n1,
            m,
            n_r,
            u: half.iter().map(|t| t + 1.0).collect(),
        })
    }

    /// Expected orbit counts of [`Self::rule`].
    pub fn predicted_counts(&self) -> KindCounts {
        predict_orbit_counts(self.domain, self.n1)
    }

    /// Builds the initial rule for degree `q`: tensor points through the
    /// corner map, deduplicated into orbit representatives, classified, and
    /// weighted uniformly with (2/q)^3.
    pub fn rule(&self, q: u32) -> Result<QuadRule> {
        if q == 0 {
            return Err(Error::InvalidArgument {
                detail: "degree must be at least 1".into(),
            });
        }
        let nh = self.u.len();
        let mut reps: Vec<Vec<f64>> = Vec::new();

        let push = |lam: Vec<f64>, reps: &mut Vec<Vec<f64>>| {
            let mut key = lam;
            key.sort_by(|a, b| f64::total_cmp(b, a));
            let dup = reps
                .iter()
                .any(|r| r.iter().zip(key.iter()).all(|(a, b)| (a - b).abs() <= DEDUP_TOL));
            if !dup {
                reps.push(key);
            }
        };

        match self.domain {
            Domain::Triangle => {
                for iu in 0..nh {
                    for iv in 0..nh {
                        push(tri_map(self.u[iu], self.u[iv]), &mut reps);
                    }
                }
            }
            Domain::Tetrahedron => {
                for iu in 0..nh {
                    for iv in 0..nh {
                        for iw in 0..nh {
                            push(tet_map(self.u[iu], self.u[iv], self.u[iw]), &mut reps);
                        }
                    }
                }
            }
        }

        let weight = (2.0 / q as f64).powi(3);
        let mut orbits = Vec::with_capacity(reps.len());
        for rep in &reps {
            let (kind, params) =
                classify_orbit(rep, self.domain, CLASSIFY_TOL).map_err(|e| Error::Generation {
                    detail: format!("representative {rep:?} failed classification: {e}"),
                })?;
            orbits.push(SymOrbit::new(kind, params, weight)?);
        }

        // distinct representatives must map to distinct orbits
        for i in 0..orbits.len() {
            for j in i + 1..orbits.len() {
                let (a, b) = (&orbits[i], &orbits[j]);
                if a.kind == b.kind
                    && a.params
                        .iter()
                        .zip(b.params.iter())
                        .all(|(x, y)| (x - y).abs() <= CLASSIFY_TOL)
                {
                    return Err(Error::Generation {
                        detail: format!(
                            "classification ambiguity: representatives {i} and {j} both map to {} {:?}",
                            a.kind, a.params
                        ),
                    });
                }
            }
        }

        let rule = QuadRule::new(self.domain, q, orbits)?.sorted_for_output();
        let counts = rule.orbit_counts();
        let predicted = self.predicted_counts();
        if counts != predicted {
            return Err(Error::Generation {
                detail: format!(
                    "orbit counts [{counts}] disagree with the construction formulas [{predicted}] for n1 = {}",
                    self.n1
                ),
            });
        }
        rule.validate_orbits()?;
        Ok(rule)
    }
}

/// Full initial-guess pipeline for one degree: pick n1, build the seed, map
/// and classify.
pub fn initial_guess(domain: Domain, q: u32) -> Result<QuadRule> {
    if q < 1 || q > domain.max_degree() {
        return Err(Error::DegreeRange {
            domain,
            degree: q,
            min: 1,
            max: domain.max_degree(),
        });
    }
    LineSeed::new(domain, select_n1(domain, q))?.rule(q)
}

/// Initial damping used by the retry rungs of [`derive_rule`]. Heavier than
/// the solver default, so the first steps stay short and gradient-like.
const RETRY_NU0: f64 = 1.0;

/// Derives the quadrature rule of one degree: build the line seed, then
/// solve the moment equations, retrying a stalled solve up to two times.
///
/// A single damped solve from the seed occasionally stalls in one of two
/// ways: still descending when the iteration cap is reached, or wedged
/// against the weight safeguard with one surplus weight driven toward zero.
/// Continuing from the stall point with heavier initial damping finishes the
/// first kind (and returns immediately on the second, since every retried
/// step is rejected); restarting cold from the seed with heavier damping
/// steers clear of the fold that produced the second. Both retries reuse the
/// caller's tolerance and iteration cap, so the ladder stays bounded and
/// deterministic.
///
/// The returned report describes the attempt that produced the returned
/// rule; on total failure the first attempt's rule and report come back with
/// `converged == false`.
pub fn derive_rule(
    domain: Domain,
    q: u32,
    opts: &SolveOptions,
) -> Result<(QuadRule, SolveReport)> {
    let guess = initial_guess(domain, q)?;
    let (rule, report) = lm_solve(&guess, opts)?;
    if report.converged {
        return Ok((rule, report));
    }
    let retry = SolveOptions {
        nu0: RETRY_NU0,
        ..opts.clone()
    };
    let (warm_rule, warm_report) = lm_solve(&rule, &retry)?;
    if warm_report.converged {
        return Ok((warm_rule, warm_report));
    }
    let (cold_rule, cold_report) = lm_solve(&guess, &retry)?;
    if cold_report.converged {
        return Ok((cold_rule, cold_report));
    }
    Ok((rule, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_small() {
        let (x, w) = gauss_legendre(1).unwrap();
        assert_eq!(x, vec![0.0]);
        assert_relative_eq!(w[0], 2.0);

        let (x, w) = gauss_legendre(2).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert_relative_eq!(x[0], -r, max_relative = 1e-15);
        assert_relative_eq!(x[1], r, max_relative = 1e-15);
        assert_relative_eq!(w[0], 1.0, max_relative = 1e-14);

        let (x, w) = gauss_legendre(3).unwrap();
        let r = (3.0f64 / 5.0).sqrt();
        assert_relative_eq!(x[0], -r, max_relative = 1e-14);
        assert_eq!(x[1], 0.0);
        assert_relative_eq!(w[1], 8.0 / 9.0, max_relative = 1e-14);
    }

    #[test]
    fn gauss_legendre_exactness() {
        // n points integrate monomials up to degree 2n-1 exactly
        for n in 1..=20 {
            let (x, w) = gauss_legendre(n).unwrap();
            for k in 0..2 * n {
                let acc: f64 = x.iter().zip(w.iter()).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
                let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
                assert!(
                    (acc - exact).abs() < 1e-13,
                    "n={n} k={k}: {acc} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn half_line_counts() {
        assert_eq!(half_line_nodes(1).unwrap(), vec![0.0]);
        assert_eq!(half_line_nodes(2).unwrap().len(), 1);
        let h5 = half_line_nodes(5).unwrap();
        assert_eq!(h5.len(), 3);
        assert_eq!(h5[2], 0.0);
        assert!(h5[0] < h5[1] && h5[1] < 0.0);
    }

    #[test]
    fn n1_selection() {
        assert_eq!(select_n1(Domain::Triangle, 8), 5);
        assert_eq!(select_n1(Domain::Triangle, 9), 5);
        assert_eq!(select_n1(Domain::Triangle, 10), 6);
        assert_eq!(select_n1(Domain::Triangle, 11), 7);
        assert_eq!(select_n1(Domain::Triangle, 30), 16);
        assert_eq!(select_n1(Domain::Tetrahedron, 3), 3);
        assert_eq!(select_n1(Domain::Tetrahedron, 7), 5);
        assert_eq!(select_n1(Domain::Tetrahedron, 11), 7);
        assert_eq!(select_n1(Domain::Tetrahedron, 20), 11);
    }

    #[test]
    fn predicted_counts_examples() {
        let c = predict_orbit_counts(Domain::Triangle, 5);
        assert_eq!(c.get(OrbitKind::S1), 1);
        assert_eq!(c.get(OrbitKind::S21), 4);
        assert_eq!(c.get(OrbitKind::S111), 1);
        assert_eq!(c.total_nodes(), 19);

        let c = predict_orbit_counts(Domain::Tetrahedron, 3);
        assert_eq!(c.get(OrbitKind::S1), 1);
        assert_eq!(c.get(OrbitKind::S31), 2);
        assert_eq!(c.get(OrbitKind::S22), 1);
        assert_eq!(c.get(OrbitKind::S211), 0);
        assert_eq!(c.total_nodes(), 15);

        let c = predict_orbit_counts(Domain::Tetrahedron, 11);
        assert_eq!(c.get(OrbitKind::S1), 1);
        assert_eq!(c.get(OrbitKind::S31), 10);
        assert_eq!(c.get(OrbitKind::S22), 5);
        assert_eq!(c.get(OrbitKind::S211), 30);
        assert_eq!(c.get(OrbitKind::S1111), 10);
        assert_eq!(c.total_nodes(), 671);
    }

    #[test]
    fn centroid_only_seeds() {
        let rule = initial_guess(Domain::Triangle, 1).unwrap();
        assert_eq!(rule.node_count(), 1);
        assert_eq!(rule.orbits[0].kind, OrbitKind::S1);
        assert_relative_eq!(rule.orbits[0].weight, 8.0);

        let rule = initial_guess(Domain::Tetrahedron, 1).unwrap();
        assert_eq!(rule.node_count(), 1);
    }

    #[test]
    fn generated_counts_match_formulas() {
        for domain in [Domain::Triangle, Domain::Tetrahedron] {
            for n1 in 1..=16 {
                let seed = LineSeed::new(domain, n1).unwrap();
                let rule = seed.rule(8).unwrap();
                assert_eq!(
                    rule.orbit_counts(),
                    seed.predicted_counts(),
                    "{domain} n1={n1}"
                );
            }
        }
    }

    #[test]
    fn initial_weights() {
        let rule = initial_guess(Domain::Triangle, 8).unwrap();
        for orbit in &rule.orbits {
            assert_relative_eq!(orbit.weight, 0.015625);
        }
    }

    #[test]
    fn seeds_are_interior() {
        for domain in [Domain::Triangle, Domain::Tetrahedron] {
            for n1 in 1..=20 {
                let rule = LineSeed::new(domain, n1).unwrap().rule(10).unwrap();
                for orbit in &rule.orbits {
                    assert!(
                        orbit.min_facet_distance(domain) > 1e-3,
                        "{domain} n1={n1} orbit {} too close to a facet",
                        orbit.kind
                    );
                }
            }
        }
    }

    #[test]
    fn degree_bounds_enforced() {
        assert!(initial_guess(Domain::Triangle, 0).is_err());
        assert!(initial_guess(Domain::Triangle, 85).is_err());
        assert!(initial_guess(Domain::Tetrahedron, 41).is_err());
    }

    #[test]
    fn derivation_matches_plain_solve_when_the_first_attempt_lands() {
        let (rule, report) = derive_rule(Domain::Triangle, 7, &SolveOptions::default()).unwrap();
        let (direct, direct_report) =
            lm_solve(&initial_guess(Domain::Triangle, 7).unwrap(), &SolveOptions::default())
                .unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, direct_report.iterations);
        assert_eq!(rule.orbits.len(), direct.orbits.len());
        for (a, b) in rule.orbits.iter().zip(&direct.orbits) {
            assert_eq!(a.weight, b.weight);
            assert_eq!(a.params, b.params);
        }
    }

    #[test]
    fn retries_rescue_degrees_the_default_solve_stalls_on() {
        // q=15 stalls against the weight safeguard, q=17 runs out of
        // iterations while still descending; the ladder finishes both.
        for q in [15, 17] {
            let guess = initial_guess(Domain::Triangle, q).unwrap();
            let (_, direct) = lm_solve(&guess, &SolveOptions::default()).unwrap();
            assert!(!direct.converged, "q={q} no longer needs a retry");
            let (rule, report) = derive_rule(Domain::Triangle, q, &SolveOptions::default())
                .unwrap();
            assert!(report.converged, "q={q} ladder failed");
            assert!(rule.orbits.iter().all(|o| o.weight > 0.0));
        }
    }
}
