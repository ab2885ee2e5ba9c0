//! Moment residual, Jacobian assembly, and the damped least-squares
//! iteration that drives rule derivation.
//!
//! The unknown vector stacks every orbit's free parameters (orbit by orbit)
//! followed by one weight per orbit. The residual is g = Vᵀw − f over the
//! orthonormal basis of the target degree, so a converged rule integrates
//! every basis function of that degree exactly.

use nalgebra::{DMatrix, DVector};

use crate::basis::{moment_vector, vandermonde, vandermonde_with_grads};
use crate::error::{Error, Result};
use crate::geometry::{Domain, OrbitKind, QuadRule, SymOrbit};

/// Reset level for the weight safeguard: a step that would take a weight
/// through zero is truncated so the crossing weight lands here instead.
pub const WEIGHT_FLOOR: f64 = 1e-4;

/// Relative singular-value cutoff for the pseudo-inverse of the normal
/// matrix; the system is frequently rank-deficient near solutions with
/// surplus parameters.
const SVD_CUTOFF: f64 = 1e-13;

const NU_GROW: f64 = 10.0;
const NU_FLOOR: f64 = 1e-12;
const NU_FAIL: f64 = 1e12;

/// Knobs for a single solve.
#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Max-norm target for the residual; `None` selects 3e-15·√n_b, which
    /// absorbs rounding accumulation over the moment count.
    pub tol: Option<f64>,
    /// Accepted-step budget.
    pub max_iter: usize,
    /// Initial damping.
    pub nu0: f64,
    /// Reset level a weight is landed on when a step would drive it
    /// through zero.
    pub weight_floor: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: None,
            max_iter: 200,
            nu0: 1e-3,
            weight_floor: WEIGHT_FLOOR,
        }
    }
}

impl SolveOptions {
    pub fn resolve_tol(&self, n_basis: usize) -> f64 {
        self.tol.unwrap_or(3e-15 * (n_basis as f64).sqrt())
    }
}

/// Outcome of a solve. Non-convergence is reported here, not as an error.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub converged: bool,
    /// Accepted steps taken.
    pub iterations: usize,
    /// Max norm of the final residual.
    pub residual_inf: f64,
    /// Damping value after every trial step, accepted or rejected.
    pub nu_history: Vec<f64>,
    /// ½gᵀg at the initial point and after every accepted step.
    pub cost_history: Vec<f64>,
}

/// Fixed shape of a moment-matching problem: the orbit kinds of the rule
/// being solved for and where each orbit's parameters live inside the
/// unknown vector.
#[derive(Clone, Debug)]
pub struct MomentProblem {
    domain: Domain,
    degree: u32,
    kinds: Vec<OrbitKind>,
    param_offsets: Vec<usize>,
    n_params: usize,
    moments: DVector<f64>,
    vertices: DMatrix<f64>,
}

impl MomentProblem {
    pub fn new(domain: Domain, degree: u32, kinds: Vec<OrbitKind>) -> Result<Self> {
        if kinds.is_empty() {
            return Err(Error::EmptyRule);
        }
        for &kind in &kinds {
            if !kind.valid_in(domain) {
                return Err(Error::KindDomainMismatch { kind, domain });
            }
        }
        let mut param_offsets = Vec::with_capacity(kinds.len());
        let mut n_params = 0;
        for &kind in &kinds {
            param_offsets.push(n_params);
            n_params += kind.param_count();
        }
        Ok(MomentProblem {
            domain,
            degree,
            kinds,
            param_offsets,
            n_params,
            moments: moment_vector(domain, degree),
            vertices: domain.simplex().vertices,
        })
    }

    /// Problem shaped after `rule` together with its packed unknowns.
    pub fn for_rule(rule: &QuadRule) -> Result<(Self, DVector<f64>)> {
        let problem = Self::new(
            rule.domain,
            rule.degree,
            rule.orbits.iter().map(|o| o.kind).collect(),
        )?;
        let tau = problem.pack(&rule.orbits);
        Ok((problem, tau))
    }

    pub fn n_basis(&self) -> usize {
        self.moments.len()
    }

    pub fn n_orbits(&self) -> usize {
        self.kinds.len()
    }

    pub fn n_unknowns(&self) -> usize {
        self.n_params + self.kinds.len()
    }

    fn weight_index(&self, orbit: usize) -> usize {
        self.n_params + orbit
    }

    fn params_of<'a>(&self, tau: &'a DVector<f64>, orbit: usize) -> &'a [f64] {
        let off = self.param_offsets[orbit];
        &tau.as_slice()[off..off + self.kinds[orbit].param_count()]
    }

    pub fn pack(&self, orbits: &[SymOrbit]) -> DVector<f64> {
        assert_eq!(orbits.len(), self.kinds.len());
        let mut tau = DVector::zeros(self.n_unknowns());
        for (o, orbit) in orbits.iter().enumerate() {
            let off = self.param_offsets[o];
            for (p, &v) in orbit.params.iter().enumerate() {
                tau[off + p] = v;
            }
            tau[self.weight_index(o)] = orbit.weight;
        }
        tau
    }

    pub fn unpack(&self, tau: &DVector<f64>) -> Vec<SymOrbit> {
        self.kinds
            .iter()
            .enumerate()
            .map(|(o, &kind)| {
                SymOrbit::new(
                    kind,
                    self.params_of(tau, o).to_vec(),
                    tau[self.weight_index(o)],
                )
                .expect("kind/param shape fixed at construction")
            })
            .collect()
    }

    pub fn rule_from(&self, tau: &DVector<f64>) -> QuadRule {
        QuadRule::new(self.domain, self.degree, self.unpack(tau))
            .expect("kinds validated at construction")
    }

    /// Every orbit pattern strictly inside the simplex?
    fn is_interior(&self, tau: &DVector<f64>) -> bool {
        self.kinds.iter().enumerate().all(|(o, &kind)| {
            let pattern = kind
                .pattern(self.params_of(tau, o), self.domain)
                .expect("kind/param shape fixed at construction");
            pattern.iter().all(|&c| c > 0.0)
        })
    }

    fn check_interior(&self, tau: &DVector<f64>) -> Result<()> {
        for (o, &kind) in self.kinds.iter().enumerate() {
            let pattern = kind
                .pattern(self.params_of(tau, o), self.domain)
                .expect("kind/param shape fixed at construction");
            let min_coord = pattern.iter().copied().fold(f64::INFINITY, f64::min);
            if !(min_coord > 0.0) {
                return Err(Error::NonInteriorOrbit {
                    kind,
                    pattern,
                    min_coord,
                });
            }
        }
        Ok(())
    }

    /// Moment residual g = Vᵀw − f at the given unknowns.
    pub fn residual(&self, tau: &DVector<f64>) -> Result<DVector<f64>> {
        let rule = self.rule_from(tau);
        let (nodes, w) = rule.expand_formal();
        let v = vandermonde(self.domain, self.degree, &nodes)?;
        Ok(v.tr_mul(&w) - &self.moments)
    }

    /// Residual with its Jacobian (n_b × n_unknowns).
    ///
    /// Weight columns sum the Vandermonde rows of the orbit's nodes. Each
    /// parameter column chains the basis gradients through the node motion:
    /// a node's barycentric row is a fixed permutation of the orbit pattern,
    /// so its cartesian velocity is (perm ∘ pattern_jacobian) mapped through
    /// the vertex matrix.
    pub fn residual_and_jacobian(
        &self,
        tau: &DVector<f64>,
    ) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let rule = self.rule_from(tau);
        let (nodes, w) = rule.expand_formal();
        let (v, grads) = vandermonde_with_grads(self.domain, self.degree, &nodes)?;
        let g = v.tr_mul(&w) - &self.moments;

        let nb = self.n_basis();
        let d = self.domain.dim();
        let mut jac = DMatrix::zeros(nb, self.n_unknowns());
        let mut row0 = 0;
        for (o, orbit) in rule.orbits.iter().enumerate() {
            let wcol = self.weight_index(o);
            for i in row0..row0 + orbit.cardinality() {
                for b in 0..nb {
                    jac[(b, wcol)] += v[(i, b)];
                }
            }
            let pattern_jac = orbit.kind.pattern_jacobian();
            let perms = orbit.kind.node_permutations(self.domain);
            for p in 0..orbit.kind.param_count() {
                let col = self.param_offsets[o] + p;
                for (loc, perm) in perms.iter().enumerate() {
                    let i = row0 + loc;
                    for k in 0..d {
                        let mut dxk = 0.0;
                        for (j, &sym) in perm.iter().enumerate() {
                            dxk += pattern_jac[p][sym] * self.vertices[(j, k)];
                        }
                        if dxk != 0.0 {
                            let scale = orbit.weight * dxk;
                            for b in 0..nb {
                                jac[(b, col)] += scale * grads[k][(i, b)];
                            }
                        }
                    }
                }
            }
            row0 += orbit.cardinality();
        }
        Ok((g, jac))
    }

    /// Damped iteration from `tau`: keeps weights at or above the floor,
    /// rejects steps that leave the interior or fail to reduce ½gᵀg.
    pub fn solve(
        &self,
        mut tau: DVector<f64>,
        opts: &SolveOptions,
    ) -> Result<(DVector<f64>, SolveReport)> {
        self.check_interior(&tau)?;
        let tol = opts.resolve_tol(self.n_basis());
        let floor = opts.weight_floor;

        let (mut g, mut jac) = self.residual_and_jacobian(&tau)?;
        let mut cost = 0.5 * g.dot(&g);
        let mut nu = opts.nu0;
        let mut nu_history = Vec::new();
        let mut cost_history = vec![cost];
        let mut iterations = 0;
        let mut converged = false;

        loop {
            if g.amax() <= tol {
                converged = true;
                break;
            }
            if iterations >= opts.max_iter {
                break;
            }

            let h = lm_step(&jac, &g, nu)?;
            let eta = safeguard_eta(&tau, &h, self.n_params, floor);
            let mut accepted = false;
            if eta > 0.0 && eta.is_finite() {
                let mut trial = tau.clone();
                trial.axpy(eta, &h, 1.0);
                debug_assert!(
                    (self.n_params..trial.len()).all(|i| trial[i] > 0.0),
                    "truncated step kept every weight positive"
                );
                if self.is_interior(&trial) {
                    let trial_g = self.residual(&trial)?;
                    let trial_cost = 0.5 * trial_g.dot(&trial_g);
                    if trial_cost < cost {
                        tau = trial;
                        let (ng, nj) = self.residual_and_jacobian(&tau)?;
                        g = ng;
                        jac = nj;
                        cost = trial_cost;
                        cost_history.push(cost);
                        iterations += 1;
                        nu = (nu / NU_GROW).max(NU_FLOOR);
                        accepted = true;
                    }
                }
            }
            if !accepted {
                nu *= NU_GROW;
                if nu > NU_FAIL {
                    nu_history.push(nu);
                    break;
                }
            }
            nu_history.push(nu);
        }

        let report = SolveReport {
            converged,
            iterations,
            residual_inf: g.amax(),
            nu_history,
            cost_history,
        };
        Ok((tau, report))
    }
}

/// Moment residual of a rule.
pub fn residual(rule: &QuadRule) -> Result<DVector<f64>> {
    let (problem, tau) = MomentProblem::for_rule(rule)?;
    problem.residual(&tau)
}

/// Jacobian of the moment residual with respect to the rule's unknowns.
pub fn jacobian(rule: &QuadRule) -> Result<DMatrix<f64>> {
    let (problem, tau) = MomentProblem::for_rule(rule)?;
    problem.residual_and_jacobian(&tau).map(|(_, j)| j)
}

/// One damped step: h solves (JᵀJ + ν·diag(JᵀJ)) h = −Jᵀg through a
/// pseudo-inverse with relative singular-value cutoff.
pub fn lm_step(jac: &DMatrix<f64>, g: &DVector<f64>, nu: f64) -> Result<DVector<f64>> {
    let mut a = jac.tr_mul(jac);
    for i in 0..a.nrows() {
        a[(i, i)] *= 1.0 + nu;
    }
    let rhs = -jac.tr_mul(g);
    let n = rhs.len();
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    if smax <= 0.0 {
        return Ok(DVector::zeros(n));
    }
    svd.solve(&rhs, SVD_CUTOFF * smax)
        .map_err(|e| Error::Numeric {
            detail: format!("pseudo-inverse failed: {e}"),
        })
}

/// Solves the moment equations starting from `initial`, returning the final
/// rule (converged or best-so-far) with a report.
pub fn lm_solve(initial: &QuadRule, opts: &SolveOptions) -> Result<(QuadRule, SolveReport)> {
    let (problem, tau0) = MomentProblem::for_rule(initial)?;
    let (tau, report) = problem.solve(tau0, opts)?;
    Ok((problem.rule_from(&tau), report))
}

/// Largest step fraction keeping every weight strictly positive. The full
/// step passes while no weight crosses zero; a crossing weight is instead
/// landed back at the reset level ε via (ε − τᵢ)/hᵢ, most restrictive index
/// first. Weights may drift inside (0, ε) freely; only a sign change
/// triggers the truncation. Returns ≤ 0 when a weight already below ε would
/// cross zero; the caller rejects the trial and raises ν until the step is
/// short enough to stay positive.
fn safeguard_eta(tau: &DVector<f64>, h: &DVector<f64>, n_params: usize, floor: f64) -> f64 {
    let mut eta = 1.0;
    for i in n_params..tau.len() {
        if tau[i] + h[i] <= 0.0 {
            let e = (floor - tau[i]) / h[i];
            if e < eta {
                eta = e;
            }
        }
    }
    eta
}
