//! Orbit elimination: repeatedly removes whole symmetry orbits from a
//! converged rule and re-solves the moment system, keeping only removals
//! that re-converge to a valid PI rule.

use crate::bounds::lower_bound;
use crate::error::{Error, Result};
use crate::geometry::{KindCounts, OrbitKind, QuadRule};
use crate::solver::{lm_solve, SolveOptions, WEIGHT_FLOOR};

/// How candidate orbits are ranked for removal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    /// Orbits closest to a facet first (smallest barycentric coordinate).
    FacetProximity,
    /// Orbits with the smallest weight first.
    SmallestWeight,
}

impl Criterion {
    pub fn label(self) -> &'static str {
        match self {
            Criterion::FacetProximity => "facet",
            Criterion::SmallestWeight => "weight",
        }
    }

    pub fn parse(s: &str) -> Option<Criterion> {
        match s {
            "facet" | "facet-proximity" => Some(Criterion::FacetProximity),
            "weight" | "smallest-weight" => Some(Criterion::SmallestWeight),
            _ => None,
        }
    }
}

/// Elimination controls.
#[derive(Clone, Debug)]
pub struct ElimConfig {
    pub criterion: Criterion,
    /// Initial damping values tried per removal, in order; first convergent
    /// solve wins.
    pub nu_sweep: Vec<f64>,
    /// Number of leading outer iterations that only remove orbits while the
    /// per-kind counts stay at or above the lower-bound estimate.
    pub respect_bounds_outer_iters: usize,
    /// Residual tolerance handed to the solver; `None` uses its default.
    pub tol: Option<f64>,
    /// Hard cap on outer iterations.
    pub max_outer_iters: usize,
    /// Iteration budget per removal attempt (each nu restart gets this).
    pub solver_max_iter: usize,
}

impl Default for ElimConfig {
    fn default() -> Self {
        ElimConfig {
            criterion: Criterion::FacetProximity,
            nu_sweep: default_nu_sweep(),
            respect_bounds_outer_iters: 2,
            tol: None,
            max_outer_iters: 50,
            solver_max_iter: 100,
        }
    }
}

/// The damping ladder 1e-8, 1e-7, ..., 1e4.
pub fn default_nu_sweep() -> Vec<f64> {
    (-8..=4).map(|e| 10f64.powi(e)).collect()
}

/// One removal attempt, for the elimination log.
#[derive(Clone, Debug)]
pub struct ElimAttempt {
    /// Outer iteration the attempt belongs to (1-based).
    pub outer_iter: usize,
    pub kind: OrbitKind,
    pub weight: f64,
    pub min_facet_distance: f64,
    /// Damping start that converged; `None` when the whole sweep failed.
    pub nu: Option<f64>,
    pub converged: bool,
    /// Node count after the attempt (unchanged when it failed).
    pub nodes: usize,
}

/// Orbit indices in removal-preference order.
///
/// In the bound-respecting regime only orbits of kinds whose count exceeds
/// the per-kind lower bound are candidates, largest-cardinality kind first;
/// afterwards all orbits compete at once. Within equal kind the criterion
/// orders ascending (closest to a facet, or lightest); ties fall back to
/// smaller cardinality, then orbit index.
pub fn rank_orbits(
    rule: &QuadRule,
    bound: &KindCounts,
    criterion: Criterion,
    bound_respecting: bool,
) -> Vec<usize> {
    let counts = rule.orbit_counts();
    let mut candidates: Vec<usize> = (0..rule.orbits.len()).collect();
    if bound_respecting {
        candidates.retain(|&i| {
            let kind = rule.orbits[i].kind;
            counts.get(kind) > bound.get(kind)
        });
    }
    let value = |i: usize| -> f64 {
        let orbit = &rule.orbits[i];
        match criterion {
            Criterion::FacetProximity => orbit.min_facet_distance(rule.domain),
            Criterion::SmallestWeight => orbit.weight,
        }
    };
    candidates.sort_by(|&a, &b| {
        let ka = rule.orbits[a].kind;
        let kb = rule.orbits[b].kind;
        let primary = if bound_respecting {
            kb.cardinality().cmp(&ka.cardinality())
        } else {
            std::cmp::Ordering::Equal
        };
        primary
            .then_with(|| value(a).total_cmp(&value(b)))
            .then_with(|| ka.cardinality().cmp(&kb.cardinality()))
            .then_with(|| a.cmp(&b))
    });
    candidates
}

/// Removes one orbit and tries to re-converge, sweeping the damping ladder.
/// Returns the reduced rule with the damping start that worked, or `None`
/// when every start fails (the caller keeps the original rule).
pub fn try_eliminate(
    rule: &QuadRule,
    orbit_index: usize,
    cfg: &ElimConfig,
) -> Result<Option<(QuadRule, f64)>> {
    if orbit_index >= rule.orbits.len() {
        return Err(Error::InvalidArgument {
            detail: format!(
                "orbit index {orbit_index} out of range for a rule with {} orbits",
                rule.orbits.len()
            ),
        });
    }
    let mut orbits = rule.orbits.clone();
    orbits.remove(orbit_index);
    if orbits.is_empty() {
        return Ok(None);
    }
    let reduced = QuadRule::new(rule.domain, rule.degree, orbits)?;
    for &nu0 in &cfg.nu_sweep {
        let opts = SolveOptions {
            tol: cfg.tol,
            max_iter: cfg.solver_max_iter,
            nu0,
            weight_floor: WEIGHT_FLOOR,
        };
        let (candidate, report) = lm_solve(&reduced, &opts)?;
        if report.converged && candidate.validate_orbits().is_ok() {
            return Ok(Some((candidate.canonicalized()?, nu0)));
        }
    }
    Ok(None)
}

/// Runs the full elimination loop and returns the reduced rule with a log
/// of every attempt.
///
/// The first `respect_bounds_outer_iters` outer iterations restrict
/// candidates per [`rank_orbits`]; later iterations rank every orbit and the
/// loop stops once a whole iteration removes nothing.
pub fn eliminate_all(rule: &QuadRule, cfg: &ElimConfig) -> Result<(QuadRule, Vec<ElimAttempt>)> {
    rule.validate_orbits()?;
    let bound = lower_bound(rule.domain, rule.degree)?;
    let mut current = rule.clone();
    let mut log = Vec::new();

    for outer in 1..=cfg.max_outer_iters {
        let bound_respecting = outer <= cfg.respect_bounds_outer_iters;
        let mut tried = vec![false; current.orbits.len()];
        let mut removed_any = false;

        loop {
            let ranking = rank_orbits(&current, &bound.counts, cfg.criterion, bound_respecting);
            let Some(idx) = ranking.into_iter().find(|&i| !tried[i]) else {
                break;
            };
            let orbit = current.orbits[idx].clone();
            let attempt = try_eliminate(&current, idx, cfg)?;
            let (nu, converged, nodes) = match attempt {
                Some((reduced, nu)) => {
                    current = reduced;
                    tried.remove(idx);
                    removed_any = true;
                    (Some(nu), true, current.node_count())
                }
                None => {
                    tried[idx] = true;
                    (None, false, current.node_count())
                }
            };
            log.push(ElimAttempt {
                outer_iter: outer,
                kind: orbit.kind,
                weight: orbit.weight,
                min_facet_distance: orbit.min_facet_distance(current.domain),
                nu,
                converged,
                nodes,
            });
        }

        if !bound_respecting && !removed_any {
            break;
        }
    }

    Ok((current, log))
}

/// Tries both criterion orders (facet-first then weight, and weight-first
/// then facet) and keeps the ladder that ends with fewer nodes; ties go to
/// facet-first.
pub fn eliminate_auto(rule: &QuadRule, cfg: &ElimConfig) -> Result<(QuadRule, Vec<ElimAttempt>)> {
    let ladder = |first: Criterion, second: Criterion| -> Result<(QuadRule, Vec<ElimAttempt>)> {
        let mut stage = cfg.clone();
        stage.criterion = first;
        let (mid, mut log) = eliminate_all(rule, &stage)?;
        stage.criterion = second;
        let (end, mut log2) = eliminate_all(&mid, &stage)?;
        log.append(&mut log2);
        Ok((end, log))
    };
    let facet_first = ladder(Criterion::FacetProximity, Criterion::SmallestWeight)?;
    let weight_first = ladder(Criterion::SmallestWeight, Criterion::FacetProximity)?;
    if weight_first.0.node_count() < facet_first.0.node_count() {
        Ok(weight_first)
    } else {
        Ok(facet_first)
    }
}
