//! Lower-bound estimates for the node count of symmetric PI quadrature rules,
//! split per orbit kind, and the efficiency measure they induce.
//!
//! All arithmetic is exact integer arithmetic. Rounding to nearest uses
//! round-half-up; the inputs never produce exact ties for q <= 100 (checked
//! by an exhaustive scan in the tests), so the choice of tie direction cannot
//! change any published count.

use crate::error::{Error, Result};
use crate::geometry::{Domain, KindCounts, OrbitKind};

/// Largest degree the bound formulas are validated for.
pub const MAX_BOUND_DEGREE: u32 = 100;

/// Estimated minimal orbit structure of a degree-q rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundEstimate {
    pub domain: Domain,
    pub degree: u32,
    pub counts: KindCounts,
}

impl BoundEstimate {
    pub fn total_nodes(&self) -> usize {
        self.counts.total_nodes()
    }
}

/// Lower-bound node-count estimate for a symmetric PI rule of degree q.
pub fn lower_bound(domain: Domain, q: u32) -> Result<BoundEstimate> {
    if q < 1 || q > MAX_BOUND_DEGREE {
        return Err(Error::DegreeRange {
            domain,
            degree: q,
            min: 1,
            max: MAX_BOUND_DEGREE,
        });
    }
    let counts = match domain {
        Domain::Triangle => tri_counts(q as i64),
        Domain::Tetrahedron => tet_counts(q as i64),
    };
    Ok(BoundEstimate {
        domain,
        degree: q,
        counts,
    })
}

/// Efficiency of a rule with `n_actual` nodes against the estimate:
/// estimated count over actual count. Values above 1 mean the rule beats
/// the estimate and are reported as-is.
pub fn efficiency(n_actual: usize, estimate: &BoundEstimate) -> Result<f64> {
    if n_actual == 0 {
        return Err(Error::InvalidArgument {
            detail: "efficiency needs a rule with at least one node".into(),
        });
    }
    Ok(estimate.total_nodes() as f64 / n_actual as f64)
}

// ---------------------------------------------------------------------------
// triangle
// ---------------------------------------------------------------------------

/// Moment count E(q, alpha_q): the number of independent symmetric moments.
fn tri_moments(q: i64) -> i64 {
    const ALPHA: [i64; 6] = [3, -4, -1, 0, -1, -4];
    let alpha = ALPHA[(q.rem_euclid(6)) as usize];
    let e2 = (q + 3) * (q + 3) + alpha;
    debug_assert_eq!(e2 % 12, 0);
    e2 / 12
}

fn tri_counts(q: i64) -> KindCounts {
    let e = tri_moments(q);
    let s111 = if q < 6 { 0 } else { (tri_moments(q - 6) + 2) / 3 };
    let s21 = (e - 3 * s111) / 2;
    let s1 = if 1 + 2 * s21 + 3 * s111 > e { 0 } else { 1 };
    let mut counts = KindCounts::new(Domain::Triangle);
    counts.set(OrbitKind::S1, clamp_count(s1, "S1"));
    counts.set(OrbitKind::S21, clamp_count(s21, "S21"));
    counts.set(OrbitKind::S111, clamp_count(s111, "S111"));
    counts
}

// ---------------------------------------------------------------------------
// tetrahedron
// ---------------------------------------------------------------------------

/// floor(n / d) for positive d.
fn div_floor(n: i64, d: i64) -> i64 {
    n.div_euclid(d)
}

/// ceil(n / d) for positive d.
fn div_ceil(n: i64, d: i64) -> i64 {
    -(-n).div_euclid(d)
}

/// round(n / d) with half rounded up, for positive d.
fn div_round(n: i64, d: i64) -> i64 {
    debug_assert!(d % 2 == 0);
    (n + d / 2).div_euclid(d)
}

/// Step indicator: 1 when q >= a.
fn step(q: i64, a: i64) -> i64 {
    i64::from(q >= a)
}

/// Independent symmetric moments associated with the interior orbit kinds.
fn tet_m4(q: i64) -> i64 {
    let t = q + 4;
    let n = t * t * t + 3 * t * t - 9 * t * (t % 2);
    div_round(n, 144) * step(q, 0)
}

fn tet_counts(q: i64) -> KindCounts {
    let m2 = div_floor(q - 2, 2) * step(q, 4);
    let m3 = {
        let h = q / 2 - 2; // floor((q/2 - 2)^2) with integer q/2
        let v = if q % 2 == 0 {
            h * h
        } else {
            // (q/2 - 2)^2 with q/2 half-integer: floor((2h+1)^2 / 4)
            let t = 2 * h + 1;
            (t * t) / 4
        };
        v * step(q, 6)
    };
    let m4 = tet_m4(q - 12);
    let m_e = tet_m4(q);

    let s1111 = clamp_count(div_ceil(m4, 4), "S1111") as i64;
    let s211 = clamp_count(div_ceil(m4 + m3 - 4 * s1111, 3), "S211") as i64;
    let s22 = clamp_count(
        div_ceil(m4 + m3 + m2 - 3 * s211 - 4 * s1111, 2),
        "S22",
    ) as i64;
    let s31 = clamp_count(
        div_floor(m_e - 2 * s22 - 3 * s211 - 4 * s1111, 2),
        "S31",
    ) as i64;
    let s1 = clamp_count(
        m_e - 2 * s31 - 2 * s22 - 3 * s211 - 4 * s1111,
        "S1",
    ) as i64;

    let mut counts = KindCounts::new(Domain::Tetrahedron);
    counts.set(OrbitKind::S1, s1 as usize);
    counts.set(OrbitKind::S31, s31 as usize);
    counts.set(OrbitKind::S22, s22 as usize);
    counts.set(OrbitKind::S211, s211 as usize);
    counts.set(OrbitKind::S1111, s1111 as usize);
    counts
}

fn clamp_count(v: i64, kind: &str) -> usize {
    if v < 0 {
        log::warn!("negative intermediate count {v} for {kind}; clamped to 0");
        0
    } else {
        v as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(q: u32) -> BoundEstimate {
        lower_bound(Domain::Triangle, q).unwrap()
    }

    fn tet(q: u32) -> BoundEstimate {
        lower_bound(Domain::Tetrahedron, q).unwrap()
    }

    #[test]
    fn triangle_reference_values() {
        let b = tri(1);
        assert_eq!(b.total_nodes(), 1);
        assert_eq!(b.counts.get(OrbitKind::S1), 1);

        let b = tri(8);
        assert_eq!(b.counts.get(OrbitKind::S1), 1);
        assert_eq!(b.counts.get(OrbitKind::S21), 3);
        assert_eq!(b.counts.get(OrbitKind::S111), 1);
        assert_eq!(b.total_nodes(), 16);

        let b = tri(10);
        assert_eq!(b.counts.get(OrbitKind::S1), 0);
        assert_eq!(b.counts.get(OrbitKind::S21), 4);
        assert_eq!(b.counts.get(OrbitKind::S111), 2);
        assert_eq!(b.total_nodes(), 24);
    }

    #[test]
    fn tetrahedron_reference_values() {
        assert_eq!(tet(1).total_nodes(), 1);

        let b = tet(2);
        assert_eq!(b.counts.get(OrbitKind::S31), 1);
        assert_eq!(b.total_nodes(), 4);

        let b = tet(4);
        assert_eq!(b.counts.get(OrbitKind::S1), 1);
        assert_eq!(b.counts.get(OrbitKind::S31), 1);
        assert_eq!(b.counts.get(OrbitKind::S22), 1);
        assert_eq!(b.total_nodes(), 11);
    }

    #[test]
    fn bounds_monotone_in_degree() {
        let mut prev = 0;
        for q in 1..=84 {
            let n = tri(q).total_nodes();
            assert!(n >= prev, "triangle bound dropped at q={q}");
            prev = n;
        }
        let mut prev = 0;
        for q in 1..=40 {
            let n = tet(q).total_nodes();
            assert!(n >= prev, "tetrahedron bound dropped at q={q}");
            prev = n;
        }
    }

    #[test]
    fn no_rounding_ties_up_to_max_degree() {
        // round-half-up only matters on exact ties n = 72 (mod 144); confirm
        // none occur for either m4 argument
        for q in 0..=(MAX_BOUND_DEGREE as i64) {
            let t = q + 4;
            let n = t * t * t + 3 * t * t - 9 * t * (t % 2);
            assert_ne!(n.rem_euclid(144), 72, "tie at q={q}");
        }
    }

    #[test]
    fn moment_count_is_integer() {
        // (q+3)^2 + alpha_q is always divisible by 12
        for q in 1..=100 {
            let _ = tri_moments(q);
        }
    }

    #[test]
    fn efficiency_reference() {
        let b = tri(8);
        assert_eq!(efficiency(16, &b).unwrap(), 1.0);
        let b = tet(4);
        assert!((efficiency(14, &b).unwrap() - 11.0 / 14.0).abs() < 1e-15);
        assert!(efficiency(0, &b).is_err());
    }

    /// Published node counts of the eliminated rules (degree 1..84 triangle,
    /// 1..40 tetrahedron).
    pub(crate) const TRI_PUBLISHED: [usize; 84] = [
        1, 3, 6, 6, 7, 12, 15, 16, 19, 25, //
        28, 33, 37, 42, 49, 55, 60, 67, 73, 79, //
        87, 97, 103, 111, 121, 130, 139, 148, 159, 169, //
        181, 192, 202, 214, 226, 240, 250, 265, 277, 292, //
        304, 321, 337, 349, 367, 382, 397, 415, 430, 448, //
        468, 484, 504, 522, 541, 561, 579, 598, 628, 649, //
        670, 693, 709, 724, 748, 793, 808, 829, 865, 868, //
        913, 931, 936, 1000, 1024, 1033, 1081, 1099, 1117, 1129, //
        1174, 1188, 1222, 1261,
    ];

    pub(crate) const TET_PUBLISHED: [usize; 40] = [
        1, 4, 8, 14, 14, 24, 35, 46, 61, 79, //
        100, 124, 145, 181, 216, 259, 299, 370, 408, 469, //
        540, 616, 706, 756, 904, 992, 1148, 1200, 1405, 1564, //
        1667, 1768, 1913, 2175, 2352, 2652, 2671, 3296, 3436, 3815,
    ];

    #[test]
    fn published_rules_never_beat_the_estimate_by_much() {
        // efficiency of every published count stays at or below 1
        for (i, &n) in TRI_PUBLISHED.iter().enumerate() {
            let q = (i + 1) as u32;
            let e = efficiency(n, &tri(q)).unwrap();
            assert!(e <= 1.0 + 1e-12, "triangle q={q}: efficiency {e}");
        }
        for (i, &n) in TET_PUBLISHED.iter().enumerate() {
            let q = (i + 1) as u32;
            let e = efficiency(n, &tet(q)).unwrap();
            assert!(e <= 1.0 + 1e-12, "tetrahedron q={q}: efficiency {e}");
        }
    }

    #[test]
    fn degree_range_enforced() {
        assert!(lower_bound(Domain::Triangle, 0).is_err());
        assert!(lower_bound(Domain::Triangle, 101).is_err());
    }
}
