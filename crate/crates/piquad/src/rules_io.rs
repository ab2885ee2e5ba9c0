//! Rule files in a canonical orbit-based text format, flat point-set export,
//! and an importer that reconstructs orbits from published point tables.
//!
//! A rule file holds `# key: value` header lines followed by one record per
//! orbit, `KIND p1 [p2 [p3]] weight`. Reals carry 17 significant digits so a
//! serialize/parse round trip is bit-exact, and orbits are written in sorted
//! order so equal rules serialize identically.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{classify_orbit, Domain, OrbitKind, QuadRule, SymOrbit};
use crate::solver;

/// Provenance stage recorded in a rule file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleStatus {
    /// Raw initial guess, not yet solved.
    Initial,
    /// Converged solution of the moment equations.
    Converged,
    /// Converged and passed through orbit elimination.
    Eliminated,
}

impl RuleStatus {
    pub fn label(self) -> &'static str {
        match self {
            RuleStatus::Initial => "initial",
            RuleStatus::Converged => "converged",
            RuleStatus::Eliminated => "eliminated",
        }
    }

    pub fn parse(s: &str) -> Option<RuleStatus> {
        match s {
            "initial" => Some(RuleStatus::Initial),
            "converged" => Some(RuleStatus::Converged),
            "eliminated" => Some(RuleStatus::Eliminated),
            _ => None,
        }
    }
}

impl fmt::Display for RuleStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Orbit-classification tolerance for imported point tables; published
/// tables typically carry 15-16 digits.
pub const IMPORT_TOL: f64 = 1e-9;

/// Canonical text form of a rule. The moment residual in the header is
/// recomputed, so it always reflects the records below it.
pub fn serialize_rule(rule: &QuadRule, status: RuleStatus) -> Result<String> {
    rule.validate_orbits()?;
    let residual = solver::residual(rule)?.amax();
    let sorted = rule.sorted_for_output();
    let counts = sorted.orbit_counts();

    let mut out = String::new();
    let _ = writeln!(out, "# domain: {}", sorted.domain.tag());
    let _ = writeln!(out, "# degree: {}", sorted.degree);
    let _ = writeln!(out, "# nodes: {}", sorted.node_count());
    let _ = write!(out, "# orbits:");
    for (kind, count) in counts.iter() {
        let _ = write!(out, " {} {}", kind.label(), count);
    }
    out.push('\n');
    let _ = writeln!(out, "# status: {status}");
    let _ = writeln!(out, "# residual: {residual:.2e}");
    for orbit in &sorted.orbits {
        let _ = write!(out, "{}", orbit.kind.label());
        for p in &orbit.params {
            let _ = write!(out, " {p:.16e}");
        }
        let _ = writeln!(out, " {:.16e}", orbit.weight);
    }
    Ok(out)
}

fn parse_err(line: usize, detail: impl Into<String>) -> Error {
    Error::Parse {
        line,
        detail: detail.into(),
    }
}

/// Parses the text form back into a rule, cross-checking the declared node
/// and orbit counts and validating every record. Errors name the offending
/// line (1-based).
pub fn parse_rule(text: &str) -> Result<(QuadRule, RuleStatus)> {
    let mut domain: Option<Domain> = None;
    let mut degree: Option<u32> = None;
    let mut declared_nodes: Option<(usize, usize)> = None;
    let mut declared_orbits: Option<(Vec<(OrbitKind, usize)>, usize)> = None;
    let mut status = RuleStatus::Converged;
    let mut orbits = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            let Some((key, value)) = rest.split_once(':') else {
                return Err(parse_err(line_no, "header line without ':'"));
            };
            let value = value.trim();
            match key.trim() {
                "domain" => {
                    domain = Some(Domain::parse(value).ok_or_else(|| {
                        parse_err(line_no, format!("unknown domain '{value}'"))
                    })?);
                }
                "degree" => {
                    degree = Some(value.parse().map_err(|_| {
                        parse_err(line_no, format!("bad degree '{value}'"))
                    })?);
                }
                "nodes" => {
                    let n = value.parse().map_err(|_| {
                        parse_err(line_no, format!("bad node count '{value}'"))
                    })?;
                    declared_nodes = Some((n, line_no));
                }
                "orbits" => {
                    let mut pairs = Vec::new();
                    let mut tokens = value.split_whitespace();
                    while let Some(tag) = tokens.next() {
                        let kind = OrbitKind::parse(tag).ok_or_else(|| {
                            parse_err(line_no, format!("unknown orbit kind '{tag}'"))
                        })?;
                        let count = tokens
                            .next()
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| {
                                parse_err(line_no, format!("missing count after '{tag}'"))
                            })?;
                        pairs.push((kind, count));
                    }
                    declared_orbits = Some((pairs, line_no));
                }
                "status" => {
                    status = RuleStatus::parse(value).ok_or_else(|| {
                        parse_err(line_no, format!("unknown status '{value}'"))
                    })?;
                }
                "residual" => {}
                other => {
                    return Err(parse_err(line_no, format!("unknown header key '{other}'")));
                }
            }
            continue;
        }

        let Some(domain) = domain else {
            return Err(parse_err(line_no, "orbit record before the domain header"));
        };
        let mut tokens = line.split_whitespace();
        let tag = tokens.next().expect("non-empty line");
        let kind = OrbitKind::parse(tag)
            .ok_or_else(|| parse_err(line_no, format!("unknown orbit kind '{tag}'")))?;
        let values = tokens
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| parse_err(line_no, format!("bad number '{t}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != kind.param_count() + 1 {
            return Err(parse_err(
                line_no,
                format!(
                    "{} takes {} parameters plus a weight, got {} values",
                    kind.label(),
                    kind.param_count(),
                    values.len()
                ),
            ));
        }
        let (&weight, params) = values.split_last().expect("at least the weight");
        let orbit = SymOrbit::new(kind, params.to_vec(), weight)
            .expect("value count checked above");
        orbit
            .validate(domain)
            .map_err(|e| parse_err(line_no, e.to_string()))?;
        if !(weight > 0.0) {
            return Err(parse_err(
                line_no,
                format!("non-positive weight {weight:e}"),
            ));
        }
        orbits.push(orbit);
    }

    let domain = domain.ok_or_else(|| parse_err(0, "missing '# domain:' header"))?;
    let degree = degree.ok_or_else(|| parse_err(0, "missing '# degree:' header"))?;
    let rule = QuadRule::new(domain, degree, orbits)?;
    if rule.orbits.is_empty() {
        return Err(Error::EmptyRule);
    }
    if let Some((n, line)) = declared_nodes {
        if n != rule.node_count() {
            return Err(parse_err(
                line,
                format!("header declares {n} nodes but records hold {}", rule.node_count()),
            ));
        }
    }
    if let Some((pairs, line)) = declared_orbits {
        let counts = rule.orbit_counts();
        for (kind, declared) in pairs {
            if !kind.valid_in(domain) {
                return Err(parse_err(
                    line,
                    format!("{} is not a {} orbit kind", kind.label(), domain),
                ));
            }
            if counts.get(kind) != declared {
                return Err(parse_err(
                    line,
                    format!(
                        "header declares {declared} {} orbits but records hold {}",
                        kind.label(),
                        counts.get(kind)
                    ),
                ));
            }
        }
    }
    Ok((rule, status))
}

/// Flat point-set form: one `x1 x2 [x3] w` row per node, orbit-major, 17
/// significant digits.
pub fn serialize_pointset(rule: &QuadRule) -> Result<String> {
    let (nodes, weights) = rule.expand()?;
    let mut out = String::new();
    for i in 0..nodes.nrows() {
        for k in 0..nodes.ncols() {
            let _ = write!(out, "{:.16e} ", nodes[(i, k)]);
        }
        let _ = writeln!(out, "{:.16e}", weights[i]);
    }
    Ok(out)
}

/// Rebuilds a rule from a flat `x1 x2 [x3] w` table by classifying each
/// point's barycentric coordinates into a symmetry orbit and averaging the
/// parameters and weights over each orbit found.
pub fn import_pointset(text: &str, domain: Domain, degree: u32) -> Result<QuadRule> {
    struct Group {
        kind: OrbitKind,
        repr: Vec<f64>,
        param_sums: Vec<f64>,
        weight_sum: f64,
        count: usize,
    }

    let simplex = domain.simplex();
    let d = domain.dim();
    let mut groups: Vec<Group> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let values = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| parse_err(line_no, format!("bad number '{t}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != d + 1 {
            return Err(parse_err(
                line_no,
                format!("expected {} coordinates plus a weight", d),
            ));
        }
        let bary = simplex
            .cartesian_to_barycentric(&values[..d])
            .map_err(|e| parse_err(line_no, e.to_string()))?;
        let (kind, params) = classify_orbit(&bary, domain, IMPORT_TOL)
            .map_err(|e| parse_err(line_no, e.to_string()))?;
        let weight = values[d];

        let found = groups.iter_mut().find(|g| {
            g.kind == kind
                && g.repr
                    .iter()
                    .zip(&params)
                    .all(|(a, b)| (a - b).abs() <= IMPORT_TOL)
        });
        match found {
            Some(g) => {
                for (s, p) in g.param_sums.iter_mut().zip(&params) {
                    *s += p;
                }
                g.weight_sum += weight;
                g.count += 1;
            }
            None => groups.push(Group {
                kind,
                repr: params.clone(),
                param_sums: params,
                weight_sum: weight,
                count: 1,
            }),
        }
    }

    let mut orbits = Vec::with_capacity(groups.len());
    for g in groups {
        if g.count != g.kind.cardinality() {
            return Err(Error::InvalidArgument {
                detail: format!(
                    "{} orbit near {:?} has {} points, expected {}",
                    g.kind.label(),
                    g.repr,
                    g.count,
                    g.kind.cardinality()
                ),
            });
        }
        let n = g.count as f64;
        let params = g.param_sums.iter().map(|s| s / n).collect();
        orbits.push(SymOrbit::new(g.kind, params, g.weight_sum / n)?);
    }
    let rule = QuadRule::new(domain, degree, orbits)?.sorted_for_output();
    rule.validate_orbits()?;
    Ok(rule)
}

pub fn write_rule_file(path: impl AsRef<Path>, rule: &QuadRule, status: RuleStatus) -> Result<()> {
    std::fs::write(path, serialize_rule(rule, status)?)?;
    Ok(())
}

pub fn read_rule_file(path: impl AsRef<Path>) -> Result<(QuadRule, RuleStatus)> {
    parse_rule(&std::fs::read_to_string(path)?)
}

pub fn write_pointset_file(path: impl AsRef<Path>, rule: &QuadRule) -> Result<()> {
    std::fs::write(path, serialize_pointset(rule)?)?;
    Ok(())
}

pub fn read_pointset_file(
    path: impl AsRef<Path>,
    domain: Domain,
    degree: u32,
) -> Result<QuadRule> {
    import_pointset(&std::fs::read_to_string(path)?, domain, degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn centroid_rule() -> QuadRule {
        QuadRule::new(
            Domain::Triangle,
            1,
            vec![SymOrbit::new(OrbitKind::S1, vec![], 2.0).unwrap()],
        )
        .unwrap()
    }

    fn three_point_rule() -> QuadRule {
        QuadRule::new(
            Domain::Triangle,
            2,
            vec![SymOrbit::new(OrbitKind::S21, vec![1.0 / 6.0], 2.0 / 3.0).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn serializes_the_centroid_rule() {
        let text = serialize_rule(&centroid_rule(), RuleStatus::Converged).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# domain: tri");
        assert_eq!(lines[1], "# degree: 1");
        assert_eq!(lines[2], "# nodes: 1");
        assert_eq!(lines[3], "# orbits: S1 1 S21 0 S111 0");
        assert_eq!(lines[4], "# status: converged");
        assert!(lines[5].starts_with("# residual: "));
        assert_eq!(lines[6], "S1 2.0000000000000000e0");
        assert_eq!(lines.len(), 7);
    }

    #[test]
    fn serializes_the_three_point_rule_record() {
        let text = serialize_rule(&three_point_rule(), RuleStatus::Converged).unwrap();
        assert!(
            text.contains("S21 1.6666666666666666e-1 6.6666666666666663e-1"),
            "{text}"
        );
    }

    #[test]
    fn round_trip_is_bit_exact() {
        // irrational-ish parameters exercise the 17-digit round trip
        let rule = QuadRule::new(
            Domain::Tetrahedron,
            4,
            vec![
                SymOrbit::new(OrbitKind::S31, vec![1.0 / 7.0], 0.1234567890123456).unwrap(),
                SymOrbit::new(OrbitKind::S22, vec![0.1 + 1e-13], 2f64.sqrt() / 10.0).unwrap(),
                SymOrbit::new(OrbitKind::S1, vec![], 1.0 / 3.0).unwrap(),
            ],
        )
        .unwrap();
        let text = serialize_rule(&rule, RuleStatus::Eliminated).unwrap();
        let (parsed, status) = parse_rule(&text).unwrap();
        assert_eq!(status, RuleStatus::Eliminated);
        assert_eq!(parsed.orbits, rule.sorted_for_output().orbits);
        let text2 = serialize_rule(&parsed, RuleStatus::Eliminated).unwrap();
        assert_eq!(text, text2);
    }

    #[test]
    fn parse_reports_the_offending_line() {
        let cases: &[(&str, usize)] = &[
            ("# domain: tri\n# degree: 2\nS99 0.1 0.5\n", 3),
            ("# domain: tri\n# degree: 2\nS21 0.1\n", 3),
            ("# domain: tri\n# degree: 2\nS21 abc 0.5\n", 3),
            ("# domain: tri\n# degree: 2\nS21 0.6 0.5\n", 3),
            ("# domain: tri\n# degree: 2\nS21 0.1 -0.5\n", 3),
            ("# domain: tri\n# degree: 2\n# nodes: 7\nS21 0.1 0.5\n", 3),
            ("# domain: quad\n# degree: 2\n", 1),
            ("# domain: tri\n# degree: 2\nS31 0.1 0.5\n", 3),
        ];
        for (text, want_line) in cases {
            match parse_rule(text) {
                Err(Error::Parse { line, .. }) => {
                    assert_eq!(line, *want_line, "wrong line for {text:?}")
                }
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn parse_requires_the_domain_and_degree_headers() {
        assert!(matches!(
            parse_rule("S1 2.0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_rule("# domain: tri\n").is_err());
        assert!(parse_rule("# domain: tri\n# degree: 1\n").is_err());
    }

    #[test]
    fn orbit_count_header_is_cross_checked() {
        let bad = "# domain: tri\n# degree: 2\n# orbits: S1 1 S21 1 S111 0\nS21 0.1 0.5\n";
        match parse_rule(bad) {
            Err(Error::Parse { line, detail }) => {
                assert_eq!(line, 3);
                assert!(detail.contains("S1"), "{detail}");
            }
            other => panic!("expected count mismatch, got {other:?}"),
        }
    }

    #[test]
    fn pointset_rows_for_reference_rules() {
        let text = serialize_pointset(&centroid_rule()).unwrap();
        assert_eq!(
            text,
            "-3.3333333333333331e-1 -3.3333333333333331e-1 2.0000000000000000e0\n"
        );

        let text = serialize_pointset(&three_point_rule()).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 3);
        let mut weight_sum = 0.0;
        for row in rows {
            let w: f64 = row.split_whitespace().last().unwrap().parse().unwrap();
            assert_relative_eq!(w, 2.0 / 3.0, max_relative = 1e-15);
            weight_sum += w;
        }
        assert_relative_eq!(weight_sum, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn imports_the_three_point_rule() {
        let text = serialize_pointset(&three_point_rule()).unwrap();
        let rule = import_pointset(&text, Domain::Triangle, 2).unwrap();
        assert_eq!(rule.orbits.len(), 1);
        let orbit = &rule.orbits[0];
        assert_eq!(orbit.kind, OrbitKind::S21);
        assert_relative_eq!(orbit.params[0], 1.0 / 6.0, epsilon = 1e-12);
        assert_relative_eq!(orbit.weight, 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn import_rejects_incomplete_orbits() {
        let full = serialize_pointset(&three_point_rule()).unwrap();
        let truncated: String = full.lines().take(2).map(|l| format!("{l}\n")).collect();
        assert!(import_pointset(&truncated, Domain::Triangle, 2).is_err());
    }

    #[test]
    fn import_survives_low_precision_tables() {
        // 12-digit table, as found in older references
        let a = 1.0 / 6.0;
        let b = 2.0 / 3.0;
        let mut text = String::new();
        for (l0, l1) in [(a, a), (a, b), (b, a)] {
            let l2 = 1.0 - l0 - l1;
            let x = -l0 + l1 - l2;
            let y = -l0 - l1 + l2;
            let _ = writeln!(text, "{:.12} {:.12} {:.12}", x, y, 2.0 / 3.0);
        }
        let rule = import_pointset(&text, Domain::Triangle, 2).unwrap();
        assert_eq!(rule.orbits.len(), 1);
        assert_relative_eq!(rule.orbits[0].params[0], 1.0 / 6.0, epsilon = 1e-9);
    }
}
