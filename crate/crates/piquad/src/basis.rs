//! Orthonormal polynomial bases on the reference simplices, built from
//! normalized Jacobi polynomials in collapsed coordinates, plus the moment
//! vector they induce.
//!
//! Modes are ordered graded-lexicographically: by total degree, then by the
//! leading index. The basis is orthonormal, so integrating mode 0 gives
//! `sqrt(measure)` and every higher mode integrates to zero.

use crate::error::{Error, Result};
use crate::geometry::Domain;
use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::SQRT_2;

/// Number of basis polynomials of total degree <= q.
pub fn basis_size(domain: Domain, q: u32) -> usize {
    let q = q as usize;
    match domain {
        Domain::Triangle => (q + 1) * (q + 2) / 2,
        Domain::Tetrahedron => (q + 1) * (q + 2) * (q + 3) / 6,
    }
}

/// Exact integrals of the basis polynomials: `sqrt(measure)` for the constant
/// mode, zero for the rest.
pub fn moment_vector(domain: Domain, q: u32) -> DVector<f64> {
    let mut f = DVector::zeros(basis_size(domain, q));
    f[0] = domain.simplex().measure.sqrt();
    f
}

/// Mode index tuples in evaluation order.
pub fn mode_indices(domain: Domain, q: u32) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::with_capacity(basis_size(domain, q));
    match domain {
        Domain::Triangle => {
            for l in 0..=q {
                for i in 0..=l {
                    out.push((i, l - i, 0));
                }
            }
        }
        Domain::Tetrahedron => {
            for l in 0..=q {
                for i in 0..=l {
                    for j in 0..=(l - i) {
                        out.push((i, j, l - i - j));
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// normalized Jacobi polynomials
// ---------------------------------------------------------------------------

/// Values of the orthonormal Jacobi polynomials P~_0..P~_nmax at `x`,
/// normalized so that integrating P~_m P~_n (1-x)^alpha (1+x)^beta over
/// [-1, 1] gives delta_mn. Normalization constants are assembled in log
/// space to stay finite for large parameters.
pub fn jacobi_row(x: f64, alpha: f64, beta: f64, nmax: usize, out: &mut [f64]) {
    debug_assert!(out.len() > nmax);
    let ln_gamma0 = (alpha + beta + 1.0) * std::f64::consts::LN_2 - (alpha + beta + 1.0).ln()
        + ln_gamma(alpha + 1.0)
        + ln_gamma(beta + 1.0)
        - ln_gamma(alpha + beta + 1.0);
    out[0] = (-0.5 * ln_gamma0).exp();
    if nmax == 0 {
        return;
    }
    let ln_gamma1 = ((alpha + 1.0) * (beta + 1.0) / (alpha + beta + 3.0)).ln() + ln_gamma0;
    out[1] = ((alpha + beta + 2.0) * x / 2.0 + (alpha - beta) / 2.0) * (-0.5 * ln_gamma1).exp();
    let mut aold = 2.0 / (2.0 + alpha + beta)
        * ((alpha + 1.0) * (beta + 1.0) / (alpha + beta + 3.0)).sqrt();
    for i in 1..nmax {
        let ifl = i as f64;
        let h1 = 2.0 * ifl + alpha + beta;
        let anew = 2.0 / (h1 + 2.0)
            * ((ifl + 1.0) * (ifl + 1.0 + alpha + beta) * (ifl + 1.0 + alpha)
                * (ifl + 1.0 + beta)
                / (h1 + 1.0)
                / (h1 + 3.0))
                .sqrt();
        let bnew = -(alpha * alpha - beta * beta) / h1 / (h1 + 2.0);
        out[i + 1] = ((x - bnew) * out[i] - aold * out[i - 1]) / anew;
        aold = anew;
    }
}

/// Derivatives of the polynomials evaluated by [`jacobi_row`], via
/// d/dx P~_n^(a,b) = sqrt(n (n+a+b+1)) P~_(n-1)^(a+1,b+1).
pub fn jacobi_deriv_row(x: f64, alpha: f64, beta: f64, nmax: usize, out: &mut [f64]) {
    out[0] = 0.0;
    if nmax == 0 {
        return;
    }
    let mut shifted = vec![0.0; nmax];
    jacobi_row(x, alpha + 1.0, beta + 1.0, nmax - 1, &mut shifted);
    for n in 1..=nmax {
        let nfl = n as f64;
        out[n] = (nfl * (nfl + alpha + beta + 1.0)).sqrt() * shifted[n - 1];
    }
}

// ---------------------------------------------------------------------------
// collapsed coordinates
// ---------------------------------------------------------------------------

const COLLAPSE_EPS: f64 = 1e-14;

/// Triangle (x, y) -> (a, b); the singular ray y = 1 maps to a = -1.
fn collapse_tri(x: f64, y: f64) -> (f64, f64) {
    let denom = 1.0 - y;
    let a = if denom.abs() > COLLAPSE_EPS {
        2.0 * (1.0 + x) / denom - 1.0
    } else {
        -1.0
    };
    (a, y)
}

/// Tetrahedron (x, y, z) -> (a, b, c) with the same singular-limit handling.
fn collapse_tet(x: f64, y: f64, z: f64) -> (f64, f64, f64) {
    let d1 = -y - z;
    let a = if d1.abs() > COLLAPSE_EPS {
        2.0 * (1.0 + x) / d1 - 1.0
    } else {
        -1.0
    };
    let d2 = 1.0 - z;
    let b = if d2.abs() > COLLAPSE_EPS {
        2.0 * (1.0 + y) / d2 - 1.0
    } else {
        -1.0
    };
    (a, b, z)
}

// ---------------------------------------------------------------------------
// Vandermonde assembly
// ---------------------------------------------------------------------------

struct TriScratch {
    pa: Vec<f64>,
    pad: Vec<f64>,
    pb: Vec<f64>,
    pbd: Vec<f64>,
}

struct TetScratch {
    pa: Vec<f64>,
    pad: Vec<f64>,
    pb: Vec<f64>,
    pbd: Vec<f64>,
    pc: Vec<f64>,
    pcd: Vec<f64>,
}

/// Vandermonde matrix: `V[(i, j)] = psi_j(node_i)` for cartesian `nodes`
/// (one row per node).
pub fn vandermonde(domain: Domain, q: u32, nodes: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    assemble(domain, q, nodes, false).map(|(v, _)| v)
}

/// Vandermonde matrix along with its coordinate-direction derivatives
/// (`grads[k][(i, j)] = d psi_j / d x_k (node_i)`).
pub fn vandermonde_with_grads(
    domain: Domain,
    q: u32,
    nodes: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, Vec<DMatrix<f64>>)> {
    assemble(domain, q, nodes, true).map(|(v, g)| (v, g.unwrap()))
}

fn assemble(
    domain: Domain,
    q: u32,
    nodes: &DMatrix<f64>,
    with_grads: bool,
) -> Result<(DMatrix<f64>, Option<Vec<DMatrix<f64>>>)> {
    let d = domain.dim();
    if nodes.ncols() != d {
        return Err(Error::InvalidArgument {
            detail: format!(
                "node matrix has {} columns, expected {} for {}",
                nodes.ncols(),
                d,
                domain
            ),
        });
    }
    let n = nodes.nrows();
    let nb = basis_size(domain, q);
    let mut v = DMatrix::zeros(n, nb);
    let mut grads = if with_grads {
        Some(vec![DMatrix::zeros(n, nb); d])
    } else {
        None
    };

    match domain {
        Domain::Triangle => {
            let qi = q as usize;
            let mut s = TriScratch {
                pa: vec![0.0; qi + 1],
                pad: vec![0.0; qi + 1],
                pb: vec![0.0; qi + 1],
                pbd: vec![0.0; qi + 1],
            };
            for r in 0..n {
                tri_point(
                    q,
                    nodes[(r, 0)],
                    nodes[(r, 1)],
                    &mut s,
                    &mut v,
                    grads.as_mut(),
                    r,
                );
            }
        }
        Domain::Tetrahedron => {
            let qi = q as usize;
            let mut s = TetScratch {
                pa: vec![0.0; qi + 1],
                pad: vec![0.0; qi + 1],
                pb: vec![0.0; qi + 1],
                pbd: vec![0.0; qi + 1],
                pc: vec![0.0; qi + 1],
                pcd: vec![0.0; qi + 1],
            };
            for r in 0..n {
                tet_point(
                    q,
                    nodes[(r, 0)],
                    nodes[(r, 1)],
                    nodes[(r, 2)],
                    &mut s,
                    &mut v,
                    grads.as_mut(),
                    r,
                );
            }
        }
    }
    Ok((v, grads))
}

#[allow(clippy::too_many_arguments)]
fn tri_point(
    q: u32,
    x: f64,
    y: f64,
    s: &mut TriScratch,
    v: &mut DMatrix<f64>,
    mut grads: Option<&mut Vec<DMatrix<f64>>>,
    row: usize,
) {
    let qi = q as usize;
    let (a, b) = collapse_tri(x, y);
    jacobi_row(a, 0.0, 0.0, qi, &mut s.pa);
    if grads.is_some() {
        jacobi_deriv_row(a, 0.0, 0.0, qi, &mut s.pad);
    }

    // column index of mode (i, j): psi appears at graded position
    // l(l+1)/2 + i with l = i + j.
    let col = |i: usize, j: usize| {
        let l = i + j;
        l * (l + 1) / 2 + i
    };

    for i in 0..=qi {
        let af = 2.0 * i as f64 + 1.0;
        jacobi_row(b, af, 0.0, qi - i, &mut s.pb);
        if grads.is_some() {
            jacobi_deriv_row(b, af, 0.0, qi - i, &mut s.pbd);
        }
        let pow_i = (0..i).fold(1.0, |acc, _| acc * (1.0 - b));
        let pow_im1 = if i == 0 {
            0.0
        } else {
            (0..i - 1).fold(1.0, |acc, _| acc * (1.0 - b))
        };
        for j in 0..=(qi - i) {
            let c = col(i, j);
            v[(row, c)] = SQRT_2 * s.pa[i] * s.pb[j] * pow_i;
            if let Some(g) = grads.as_deref_mut() {
                let dx = 2.0 * SQRT_2 * s.pad[i] * s.pb[j] * pow_im1;
                let dy = SQRT_2
                    * (s.pad[i] * (1.0 + a) * s.pb[j] * pow_im1 + s.pa[i] * s.pbd[j] * pow_i
                        - i as f64 * s.pa[i] * s.pb[j] * pow_im1);
                g[0][(row, c)] = dx;
                g[1][(row, c)] = dy;
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn tet_point(
    q: u32,
    x: f64,
    y: f64,
    z: f64,
    s: &mut TetScratch,
    v: &mut DMatrix<f64>,
    mut grads: Option<&mut Vec<DMatrix<f64>>>,
    row: usize,
) {
    let qi = q as usize;
    let (a, b, c) = collapse_tet(x, y, z);
    jacobi_row(a, 0.0, 0.0, qi, &mut s.pa);
    if grads.is_some() {
        jacobi_deriv_row(a, 0.0, 0.0, qi, &mut s.pad);
    }

    // column index of mode (i, j, k) within the graded ordering
    let col = |i: usize, j: usize, k: usize| {
        let l = i + j + k;
        let base = l * (l + 1) * (l + 2) / 6;
        // offset of (i, j) inside degree level l
        let mut off = 0;
        for ii in 0..i {
            off += l - ii + 1;
        }
        base + off + j
    };

    let norm = 2.0 * SQRT_2;
    for i in 0..=qi {
        let ab = 2.0 * i as f64 + 1.0;
        jacobi_row(b, ab, 0.0, qi - i, &mut s.pb);
        if grads.is_some() {
            jacobi_deriv_row(b, ab, 0.0, qi - i, &mut s.pbd);
        }
        let powb_i = (0..i).fold(1.0, |acc, _| acc * (1.0 - b));
        let powb_im1 = if i == 0 {
            0.0
        } else {
            (0..i - 1).fold(1.0, |acc, _| acc * (1.0 - b))
        };
        for j in 0..=(qi - i) {
            let ac = 2.0 * (i + j) as f64 + 2.0;
            jacobi_row(c, ac, 0.0, qi - i - j, &mut s.pc);
            if grads.is_some() {
                jacobi_deriv_row(c, ac, 0.0, qi - i - j, &mut s.pcd);
            }
            let ij = i + j;
            let powc_ij = (0..ij).fold(1.0, |acc, _| acc * (1.0 - c));
            let powc_ijm1 = if ij == 0 {
                0.0
            } else {
                (0..ij - 1).fold(1.0, |acc, _| acc * (1.0 - c))
            };
            for k in 0..=(qi - i - j) {
                let cc = col(i, j, k);
                let fa = s.pa[i];
                let gb = s.pb[j];
                let hc = s.pc[k];
                v[(row, cc)] = norm * fa * gb * powb_i * hc * powc_ij;
                if let Some(g) = grads.as_deref_mut() {
                    let fad = s.pad[i];
                    let gbd = s.pbd[j];
                    let hcd = s.pcd[k];
                    // d/db of g(b) (1-b)^i
                    let gb_full_d = gbd * powb_i - i as f64 * gb * powb_im1;
                    // d/dc of h(c) (1-c)^(i+j)
                    let hc_full_d = hcd * powc_ij - ij as f64 * hc * powc_ijm1;

                    let dx = norm * 4.0 * fad * gb * powb_im1 * hc * powc_ijm1;
                    let dy = norm
                        * (2.0 * fad * (1.0 + a) * gb * powb_im1 * hc * powc_ijm1
                            + 2.0 * fa * gb_full_d * hc * powc_ijm1);
                    let dz = norm
                        * (2.0 * fad * (1.0 + a) * gb * powb_im1 * hc * powc_ijm1
                            + fa * (1.0 + b) * gb_full_d * hc * powc_ijm1
                            + fa * gb * powb_i * hc_full_d);
                    g[0][(row, cc)] = dx;
                    g[1][(row, cc)] = dy;
                    g[2][(row, cc)] = dz;
                }
            }
        }
    }
}
