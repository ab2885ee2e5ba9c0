//! Rule validation against independent oracles, uniform-mesh integration of
//! oscillatory reference integrals, and grid-convergence studies.

use nalgebra::DMatrix;
use num::{BigInt, BigRational, One, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{all_permutations, Domain, QuadRule};
use crate::solver;

/// Default bound on the moment residual of a shipped rule.
pub const DEFAULT_VALIDATE_TOL: f64 = 1e-13;

/// Bound on the symmetry defect of the expanded node set.
pub const SYMMETRY_TOL: f64 = 1e-13;

/// Relative agreement required between quadrature and the rational
/// monomial oracle.
pub const MONOMIAL_RTOL: f64 = 1e-12;

/// Relative error below which a convergence rate is considered saturated
/// (the approximation sits in rounding noise, so the rate is meaningless).
pub const SATURATION_RTOL: f64 = 1e-15;

/// Outcome of the validation checks, with one pass flag per check.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub max_moment_residual: f64,
    pub min_weight: f64,
    pub min_barycentric: f64,
    pub symmetry_defect: f64,
    pub max_monomial_rel_error: f64,
    pub residual_ok: bool,
    pub weights_ok: bool,
    pub interior_ok: bool,
    pub symmetry_ok: bool,
    pub monomials_ok: bool,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.residual_ok
            && self.weights_ok
            && self.interior_ok
            && self.symmetry_ok
            && self.monomials_ok
    }
}

/// Runs all five validation checks: moment residual, weight positivity,
/// node interiority, symmetry of the expanded node set, and brute-force
/// agreement with the exact rational integral of every barycentric monomial
/// of total degree up to the rule's degree.
pub fn validate_rule(rule: &QuadRule, tol: f64) -> Result<ValidationReport> {
    if rule.orbits.is_empty() {
        return Err(Error::EmptyRule);
    }
    let max_moment_residual = solver::residual(rule)?.amax();
    let min_weight = rule
        .orbits
        .iter()
        .map(|o| o.weight)
        .fold(f64::INFINITY, f64::min);
    let bary = rule.barycentric_nodes();
    let min_barycentric = bary.iter().copied().fold(f64::INFINITY, f64::min);
    let symmetry_defect = symmetry_defect(&bary);
    let max_monomial_rel_error = max_monomial_rel_error(rule, &bary)?;

    Ok(ValidationReport {
        max_moment_residual,
        min_weight,
        min_barycentric,
        symmetry_defect,
        max_monomial_rel_error,
        residual_ok: max_moment_residual <= tol,
        weights_ok: min_weight > 0.0,
        interior_ok: min_barycentric > 0.0,
        symmetry_ok: symmetry_defect <= SYMMETRY_TOL,
        monomials_ok: max_monomial_rel_error <= MONOMIAL_RTOL,
    })
}

/// Largest elementwise gap between the node set and any of its relabelings
/// under the vertex permutations, after canonical row sorting. Zero when the
/// node multiset is exactly symmetric.
fn symmetry_defect(bary: &DMatrix<f64>) -> f64 {
    let rows: Vec<Vec<f64>> = (0..bary.nrows())
        .map(|i| bary.row(i).iter().copied().collect())
        .collect();
    let sorted = |mut rows: Vec<Vec<f64>>| {
        rows.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|c| *c != std::cmp::Ordering::Equal)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        rows
    };
    let base = sorted(rows.clone());
    let mut defect: f64 = 0.0;
    for perm in all_permutations(bary.ncols()) {
        let permuted: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| perm.iter().map(|&j| r[j]).collect())
            .collect();
        for (a, b) in base.iter().zip(sorted(permuted)) {
            for (x, y) in a.iter().zip(b) {
                defect = defect.max((x - y).abs());
            }
        }
    }
    defect
}

fn factorial(n: u32) -> BigInt {
    (1..=u64::from(n)).fold(BigInt::one(), |acc, k| acc * k)
}

/// Exact integral of the barycentric monomial λ₁^a₁ ··· λ_{d+1}^a_{d+1}
/// over the reference simplex: measure · d! · Π aᵢ! / (Σ aᵢ + d)!.
pub fn exact_monomial_integral(domain: Domain, exponents: &[u32]) -> Result<BigRational> {
    if exponents.len() != domain.n_bary() {
        return Err(Error::InvalidArgument {
            detail: format!(
                "{} barycentric exponents given, {} expects {}",
                exponents.len(),
                domain,
                domain.n_bary()
            ),
        });
    }
    let d = domain.dim() as u32;
    let measure = match domain {
        Domain::Triangle => BigRational::from_integer(2.into()),
        Domain::Tetrahedron => BigRational::new(4.into(), 3.into()),
    };
    let mut numerator = factorial(d);
    for &a in exponents {
        numerator *= factorial(a);
    }
    let total: u32 = exponents.iter().sum();
    let denominator = factorial(total + d);
    Ok(measure * BigRational::new(numerator, denominator))
}

/// Quadrature value of one barycentric monomial.
pub fn monomial_quadrature(rule: &QuadRule, exponents: &[u32]) -> Result<f64> {
    if exponents.len() != rule.domain.n_bary() {
        return Err(Error::InvalidArgument {
            detail: "exponent count does not match the domain".into(),
        });
    }
    let bary = rule.barycentric_nodes();
    let weights = rule.node_weights();
    let mut sum = 0.0;
    for i in 0..bary.nrows() {
        let mut term = weights[i];
        for (j, &a) in exponents.iter().enumerate() {
            term *= bary[(i, j)].powi(a as i32);
        }
        sum += term;
    }
    Ok(sum)
}

/// All exponent tuples over `n_vars` variables with total degree ≤ `max_total`,
/// in lexicographic order.
fn monomial_exponents(n_vars: usize, max_total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n_vars];
    loop {
        out.push(current.clone());
        // odometer increment under the total-degree cap
        let mut pos = n_vars;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            current[pos] += 1;
            if current.iter().sum::<u32>() <= max_total {
                break;
            }
            current[pos] = 0;
        }
    }
}

/// Worst relative disagreement with the rational oracle over every monomial
/// of total degree up to the rule's degree. Terms are all positive, so the
/// quadrature sum carries no cancellation and a relative comparison is
/// meaningful even for tiny exact values.
fn max_monomial_rel_error(rule: &QuadRule, bary: &DMatrix<f64>) -> Result<f64> {
    let nb = rule.domain.n_bary();
    let q = rule.degree;
    let weights = rule.node_weights();

    // per-node power tables: pow[i][j * (q+1) + e] = λ_{ij}^e
    let stride = (q + 1) as usize;
    let mut pow = vec![0.0; bary.nrows() * nb * stride];
    for i in 0..bary.nrows() {
        for j in 0..nb {
            let base = (i * nb + j) * stride;
            pow[base] = 1.0;
            for e in 1..stride {
                pow[base + e] = pow[base + e - 1] * bary[(i, j)];
            }
        }
    }

    let mut worst: f64 = 0.0;
    for exps in monomial_exponents(nb, q) {
        let exact = exact_monomial_integral(rule.domain, &exps)?
            .to_f64()
            .ok_or_else(|| Error::Numeric {
                detail: "monomial oracle does not fit in an f64".into(),
            })?;
        let mut sum = 0.0;
        for i in 0..bary.nrows() {
            let mut term = weights[i];
            for (j, &a) in exps.iter().enumerate() {
                term *= pow[(i * nb + j) * stride + a as usize];
            }
            sum += term;
        }
        worst = worst.max((sum - exact).abs() / exact);
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// uniform meshes
// ---------------------------------------------------------------------------

/// One affine simplex element: vertex rows ((d+1) × d) and its volume.
#[derive(Clone, Debug)]
pub struct MeshElement {
    pub vertices: DMatrix<f64>,
    pub volume: f64,
}

/// Uniform simplicial mesh of the unit square or unit cube.
#[derive(Clone, Debug)]
pub struct UniformMesh {
    pub domain: Domain,
    pub n: usize,
    pub elements: Vec<MeshElement>,
}

impl UniformMesh {
    /// Unit square split into n² cells, each cut into two triangles along
    /// the diagonal parallel to (0,0)→(1,1): 2n² elements.
    pub fn unit_square(n: usize) -> Result<UniformMesh> {
        if n == 0 {
            return Err(Error::InvalidArgument {
                detail: "mesh needs at least one subdivision per axis".into(),
            });
        }
        let h = 1.0 / n as f64;
        let mut elements = Vec::with_capacity(2 * n * n);
        for i in 0..n {
            for j in 0..n {
                let (x0, y0) = (i as f64 * h, j as f64 * h);
                let (x1, y1) = (x0 + h, y0 + h);
                let a = [x0, y0];
                let b = [x1, y0];
                let c = [x1, y1];
                let d = [x0, y1];
                for tri in [[a, b, c], [a, c, d]] {
                    elements.push(simplex_element(&tri.map(|v| v.to_vec())));
                }
            }
        }
        Ok(UniformMesh {
            domain: Domain::Triangle,
            n,
            elements,
        })
    }

    /// Unit cube split into n³ cells, each cut into six tetrahedra sharing
    /// the main diagonal (the Kuhn split): 6n³ elements.
    pub fn unit_cube(n: usize) -> Result<UniformMesh> {
        if n == 0 {
            return Err(Error::InvalidArgument {
                detail: "mesh needs at least one subdivision per axis".into(),
            });
        }
        const AXIS_ORDERS: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let h = 1.0 / n as f64;
        let mut elements = Vec::with_capacity(6 * n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let lo = [i as f64 * h, j as f64 * h, k as f64 * h];
                    let hi = [lo[0] + h, lo[1] + h, lo[2] + h];
                    for order in AXIS_ORDERS {
                        // walk from the low corner to the high corner one
                        // axis at a time
                        let mut verts = vec![lo.to_vec()];
                        let mut p = lo;
                        for &axis in &order[..2] {
                            p[axis] = hi[axis];
                            verts.push(p.to_vec());
                        }
                        verts.push(hi.to_vec());
                        elements.push(simplex_element(&verts));
                    }
                }
            }
        }
        Ok(UniformMesh {
            domain: Domain::Tetrahedron,
            n,
            elements,
        })
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn total_volume(&self) -> f64 {
        self.elements.iter().map(|e| e.volume).sum()
    }
}

fn simplex_element(verts: &[Vec<f64>]) -> MeshElement {
    let d = verts.len() - 1;
    let mut vertices = DMatrix::zeros(d + 1, d);
    for (i, v) in verts.iter().enumerate() {
        for (k, &x) in v.iter().enumerate() {
            vertices[(i, k)] = x;
        }
    }
    let mut edges = DMatrix::zeros(d, d);
    for i in 0..d {
        for k in 0..d {
            edges[(i, k)] = vertices[(i + 1, k)] - vertices[(0, k)];
        }
    }
    let dfact: f64 = (1..=d).map(|k| k as f64).product();
    MeshElement {
        volume: edges.determinant().abs() / dfact,
        vertices,
    }
}

// ---------------------------------------------------------------------------
// mesh integration
// ---------------------------------------------------------------------------

/// Integrates `f` over the mesh with the rule applied on every element.
///
/// Element contributions are computed in parallel but summed in element
/// order, so the result is bit-reproducible.
pub fn integrate_on_mesh<F>(rule: &QuadRule, mesh: &UniformMesh, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if rule.domain != mesh.domain {
        return Err(Error::DomainMismatch {
            expected: mesh.domain,
            got: rule.domain,
        });
    }
    let bary = rule.barycentric_nodes();
    let weights = rule.node_weights();
    let ref_measure = rule.domain.simplex().measure;

    let contributions: Vec<f64> = mesh
        .elements
        .par_iter()
        .map(|elem| {
            let nodes = &bary * &elem.vertices;
            let mut acc = 0.0;
            for i in 0..nodes.nrows() {
                acc += weights[i] * f(nodes.row(i).transpose().as_slice());
            }
            acc * elem.volume / ref_measure
        })
        .collect();
    Ok(contributions.iter().sum())
}

/// The oscillatory reference integrands, with their exact values over the
/// unit square/cube.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestIntegral {
    /// sin(48π x₁⁸) cos(48π x₂⁵) on the unit square.
    I2,
    /// sin(16π x₁⁸) cos(16π x₂⁵) cos(16π x₃⁷) on the unit cube.
    I3,
    /// sin(3π x₁) sin(5π x₂) sin(3π x₃) on the unit cube; separable with
    /// closed form 8/(45π³).
    J3,
}

/// Reference value of [`TestIntegral::I2`], first 16 significant digits.
pub const I2_REFERENCE: f64 = 0.03116210698718051;

/// Reference value of [`TestIntegral::I3`], first 16 significant digits.
pub const I3_REFERENCE: f64 = 0.02288392144769807;

impl TestIntegral {
    pub fn label(self) -> &'static str {
        match self {
            TestIntegral::I2 => "I2",
            TestIntegral::I3 => "I3",
            TestIntegral::J3 => "J3",
        }
    }

    pub fn parse(s: &str) -> Option<TestIntegral> {
        match s {
            "I2" | "i2" => Some(TestIntegral::I2),
            "I3" | "i3" => Some(TestIntegral::I3),
            "J3" | "j3" => Some(TestIntegral::J3),
            _ => None,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            TestIntegral::I2 => 2,
            TestIntegral::I3 | TestIntegral::J3 => 3,
        }
    }

    pub fn domain(self) -> Domain {
        match self {
            TestIntegral::I2 => Domain::Triangle,
            TestIntegral::I3 | TestIntegral::J3 => Domain::Tetrahedron,
        }
    }

    pub fn reference(self) -> f64 {
        use std::f64::consts::PI;
        match self {
            TestIntegral::I2 => I2_REFERENCE,
            TestIntegral::I3 => I3_REFERENCE,
            TestIntegral::J3 => 8.0 / (45.0 * PI.powi(3)),
        }
    }

    pub fn eval(self, x: &[f64]) -> f64 {
        use std::f64::consts::PI;
        match self {
            TestIntegral::I2 => {
                (48.0 * PI * x[0].powi(8)).sin() * (48.0 * PI * x[1].powi(5)).cos()
            }
            TestIntegral::I3 => {
                (16.0 * PI * x[0].powi(8)).sin()
                    * (16.0 * PI * x[1].powi(5)).cos()
                    * (16.0 * PI * x[2].powi(7)).cos()
            }
            TestIntegral::J3 => {
                (3.0 * PI * x[0]).sin() * (5.0 * PI * x[1]).sin() * (3.0 * PI * x[2]).sin()
            }
        }
    }
}

/// Integrates a reference case on the n-per-axis uniform mesh.
pub fn integrate_case(rule: &QuadRule, case: TestIntegral, n: usize) -> Result<f64> {
    let mesh = match case.domain() {
        Domain::Triangle => UniformMesh::unit_square(n)?,
        Domain::Tetrahedron => UniformMesh::unit_cube(n)?,
    };
    integrate_on_mesh(rule, &mesh, |x| case.eval(x))
}

/// Grid-convergence study result. `rates[i]` pairs meshes `ns[i-1]` and
/// `ns[i]`; `None` marks saturation (the error sits in rounding noise).
#[derive(Clone, Debug)]
pub struct ConvergenceStudy {
    pub ns: Vec<usize>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub rates: Vec<Option<f64>>,
}

/// Runs the rule over increasingly fine meshes and reports errors against
/// `reference` plus observed convergence rates.
pub fn convergence_study_fn<F>(
    rule: &QuadRule,
    mesh_domain: Domain,
    reference: f64,
    f: F,
    ns: &[usize],
) -> Result<ConvergenceStudy>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if ns.len() < 2 || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument {
            detail: "need at least two strictly increasing mesh sizes".into(),
        });
    }
    let mut values = Vec::with_capacity(ns.len());
    let mut errors = Vec::with_capacity(ns.len());
    for &n in ns {
        let mesh = match mesh_domain {
            Domain::Triangle => UniformMesh::unit_square(n)?,
            Domain::Tetrahedron => UniformMesh::unit_cube(n)?,
        };
        let value = integrate_on_mesh(rule, &mesh, &f)?;
        values.push(value);
        errors.push((value - reference).abs());
    }
    let saturation = SATURATION_RTOL * reference.abs();
    let mut rates = vec![None];
    for i in 1..ns.len() {
        let saturated = errors[i] <= saturation || errors[i - 1] <= saturation;
        rates.push(if saturated || errors[i] == 0.0 || errors[i - 1] == 0.0 {
            None
        } else {
            Some((errors[i - 1] / errors[i]).ln() / (ns[i] as f64 / ns[i - 1] as f64).ln())
        });
    }
    Ok(ConvergenceStudy {
        ns: ns.to_vec(),
        values,
        errors,
        rates,
    })
}

/// Convergence study for one of the built-in reference cases.
pub fn convergence_study(
    rule: &QuadRule,
    case: TestIntegral,
    ns: &[usize],
) -> Result<ConvergenceStudy> {
    convergence_study_fn(rule, case.domain(), case.reference(), |x| case.eval(x), ns)
}

// ---------------------------------------------------------------------------
// efficiency
// ---------------------------------------------------------------------------

/// One row of an efficiency table: actual nodes against the lower-bound
/// estimate for the same degree.
#[derive(Clone, Debug)]
pub struct EfficiencyRow {
    pub domain: Domain,
    pub degree: u32,
    pub nodes: usize,
    pub bound_nodes: usize,
    pub efficiency: f64,
}

/// Efficiency rows for a set of rules, sorted by domain then degree.
pub fn efficiency_rows(rules: &[QuadRule]) -> Result<Vec<EfficiencyRow>> {
    let mut rows = Vec::with_capacity(rules.len());
    for rule in rules {
        let estimate = crate::bounds::lower_bound(rule.domain, rule.degree)?;
        rows.push(EfficiencyRow {
            domain: rule.domain,
            degree: rule.degree,
            nodes: rule.node_count(),
            bound_nodes: estimate.total_nodes(),
            efficiency: crate::bounds::efficiency(rule.node_count(), &estimate)?,
        });
    }
    rows.sort_by_key(|r| (r.domain != Domain::Triangle, r.degree));
    Ok(rows)
}

/// CSV form of an efficiency table.
pub fn efficiency_csv(rows: &[EfficiencyRow]) -> String {
    let mut out = String::from("domain,degree,nodes,bound,efficiency\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{:.4}\n",
            r.domain.tag(),
            r.degree,
            r.nodes,
            r.bound_nodes,
            r.efficiency
        ));
    }
    out
}
