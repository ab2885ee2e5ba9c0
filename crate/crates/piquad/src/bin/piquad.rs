//! Command-line driver: derive, shrink, validate, export, and apply rules.
//!
//! Exit codes: 0 success, 1 validation failure, 2 solver non-convergence,
//! 3 usage error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use piquad::eliminate::{eliminate_all, eliminate_auto, Criterion, ElimConfig};
use piquad::initgen::{derive_rule, initial_guess};
use piquad::rules_io::{
    read_rule_file, serialize_rule, write_pointset_file, write_rule_file, RuleStatus,
};
use piquad::solver::SolveOptions;
use piquad::verify::{
    convergence_study, efficiency_csv, efficiency_rows, integrate_case, validate_rule,
    TestIntegral, DEFAULT_VALIDATE_TOL,
};
use piquad::{bounds, Domain, Error, QuadRule, Result};

const EXIT_OK: u8 = 0;
const EXIT_INVALID: u8 = 1;
const EXIT_NO_CONVERGENCE: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "piquad", version, about = "Symmetric positive-interior quadrature rules on triangles and tetrahedra")]
struct Cli {
    /// File of `key = value` defaults for flags not given on the command line
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Increase log verbosity (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive a rule of the requested degree from the line-based initial guess
    Derive(DeriveArgs),
    /// Derive a range of degrees concurrently
    DeriveBatch(DeriveBatchArgs),
    /// Shrink a rule by removing symmetry orbits one at a time
    Eliminate(EliminateArgs),
    /// Check a rule file against the exactness, positivity, and symmetry oracles
    Validate(ValidateArgs),
    /// Print the node-count lower bound for a degree
    Bounds(BoundsArgs),
    /// Integrate a built-in reference case over a uniform mesh
    Integrate(IntegrateArgs),
    /// Grid-convergence study over a list of mesh sizes
    Convergence(ConvergenceArgs),
    /// Efficiency table for a directory of rule files
    Efficiency(EfficiencyArgs),
    /// Convert a rule file to a plain point list
    Export(ExportArgs),
}

#[derive(Args)]
struct DeriveArgs {
    /// Reference element: tri or tet
    #[arg(long)]
    domain: Option<String>,
    /// Polynomial degree the rule must integrate exactly
    #[arg(long)]
    degree: Option<u32>,
    /// Residual tolerance (default 3e-15 scaled by basis size)
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration budget for the solve
    #[arg(long)]
    max_iter: Option<usize>,
    /// Destination rule file (stdout when absent)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Also write the unrefined initial guess to this file
    #[arg(long, value_name = "FILE")]
    dump_initial: Option<PathBuf>,
}

#[derive(Args)]
struct DeriveBatchArgs {
    /// Reference element: tri or tet
    #[arg(long)]
    domain: Option<String>,
    /// Inclusive degree range, e.g. 1..8
    #[arg(long, value_name = "A..B")]
    degrees: Option<String>,
    /// Worker thread count (default: one per core)
    #[arg(long)]
    jobs: Option<usize>,
    /// Directory receiving one rule file per degree
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Residual tolerance (default 3e-15 scaled by basis size)
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration budget per solve
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct EliminateArgs {
    /// Rule file to shrink
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Removal order: facet, weight, or auto (run both ladders, keep the smaller)
    #[arg(long)]
    criterion: Option<String>,
    /// Destination rule file (stdout when absent)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Write one line per removal attempt to this file
    #[arg(long, value_name = "FILE")]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Rule file to check
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Moment-residual tolerance
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Reference element: tri or tet
    #[arg(long)]
    domain: Option<String>,
    /// Degree to bound
    #[arg(long)]
    degree: Option<u32>,
    /// Also print the efficiency of a rule with this many nodes
    #[arg(long)]
    nodes: Option<usize>,
}

#[derive(Args)]
struct IntegrateArgs {
    /// Rule file to apply per element
    #[arg(long, value_name = "FILE")]
    rule: Option<PathBuf>,
    /// Reference case: I2, I3, or J3
    #[arg(long)]
    case: Option<String>,
    /// Mesh subdivisions per axis
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct ConvergenceArgs {
    /// Rule file to apply per element
    #[arg(long, value_name = "FILE")]
    rule: Option<PathBuf>,
    /// Reference case: I2, I3, or J3
    #[arg(long)]
    case: Option<String>,
    /// Comma-separated mesh sizes, e.g. 6,7,8,9
    #[arg(long)]
    n: Option<String>,
    /// Also write the table as CSV to this file
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct EfficiencyArgs {
    /// Directory scanned for *.rule files
    #[arg(long, value_name = "DIR")]
    dir: Option<PathBuf>,
    /// Also write the table as CSV to this file
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    /// Rule file to expand
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Destination point list (one node and weight per row)
    #[arg(long, value_name = "FILE")]
    pointset: Option<PathBuf>,
}

fn main() -> ExitCode {
    ExitCode::from(run())
}

fn run() -> u8 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
        }
    };
    init_logging(cli.verbose);
    let config = match cli.config.as_deref().map(FileConfig::load).transpose() {
        Ok(config) => config.unwrap_or_default(),
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_USAGE;
        }
    };
    let outcome = match cli.command {
        Command::Derive(args) => cmd_derive(args, &config),
        Command::DeriveBatch(args) => cmd_derive_batch(args, &config),
        Command::Eliminate(args) => cmd_eliminate(args, &config),
        Command::Validate(args) => cmd_validate(args, &config),
        Command::Bounds(args) => cmd_bounds(args, &config),
        Command::Integrate(args) => cmd_integrate(args, &config),
        Command::Convergence(args) => cmd_convergence(args, &config),
        Command::Efficiency(args) => cmd_efficiency(args, &config),
        Command::Export(args) => cmd_export(args, &config),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

/// Logging is configured from the flag alone; the environment is never read,
/// so identical invocations behave identically.
fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        // the input data failed a check
        Error::Parse { .. }
        | Error::NonInteriorOrbit { .. }
        | Error::DegenerateOrbit { .. }
        | Error::Barycentric { .. }
        | Error::EmptyRule => EXIT_INVALID,
        // the iteration gave up
        Error::Numeric { .. } | Error::Generation { .. } => EXIT_NO_CONVERGENCE,
        // the request itself was malformed
        Error::Io(_)
        | Error::InvalidArgument { .. }
        | Error::DegreeRange { .. }
        | Error::DomainMismatch { .. }
        | Error::KindDomainMismatch { .. }
        | Error::ParamCount { .. }
        | Error::SingularSimplex => EXIT_USAGE,
    }
}

// ---------------------------------------------------------------------------
// config file
// ---------------------------------------------------------------------------

const CONFIG_KEYS: &[&str] = &[
    "domain",
    "degree",
    "degrees",
    "jobs",
    "tol",
    "max-iter",
    "criterion",
    "out",
    "out-dir",
    "in",
    "rule",
    "case",
    "n",
    "csv",
    "dir",
    "pointset",
    "log",
    "dump-initial",
    "nodes",
];

/// `key = value` defaults; command-line flags always win.
#[derive(Default)]
struct FileConfig(BTreeMap<String, String>);

impl FileConfig {
    fn load(path: &std::path::Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path)?;
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::InvalidArgument {
                detail: format!("config line {}: expected `key = value`", idx + 1),
            })?;
            let key = key.trim();
            if !CONFIG_KEYS.contains(&key) {
                return Err(Error::InvalidArgument {
                    detail: format!("config line {}: unknown key `{key}`", idx + 1),
                });
            }
            map.insert(key.to_string(), value.trim().to_string());
        }
        Ok(FileConfig(map))
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidArgument {
        detail: format!("missing --{flag} (give the flag or a config entry)"),
    })
}

/// Flag value if present, else the parsed config entry under `key`.
fn merged<T>(
    flag: Option<T>,
    config: &FileConfig,
    key: &str,
    parse: impl Fn(&str) -> Result<T>,
) -> Result<Option<T>> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => config.get(key).map(|s| parse(s)).transpose(),
    }
}

fn parse_domain(s: &str) -> Result<Domain> {
    Domain::parse(s).ok_or_else(|| Error::InvalidArgument {
        detail: format!("unknown domain `{s}` (expected tri or tet)"),
    })
}

fn parse_criterion(s: &str) -> Result<Option<Criterion>> {
    if s == "auto" {
        return Ok(None);
    }
    Criterion::parse(s)
        .map(Some)
        .ok_or_else(|| Error::InvalidArgument {
            detail: format!("unknown criterion `{s}` (expected facet, weight, or auto)"),
        })
}

fn parse_case(s: &str) -> Result<TestIntegral> {
    TestIntegral::parse(s).ok_or_else(|| Error::InvalidArgument {
        detail: format!("unknown case `{s}` (expected I2, I3, or J3)"),
    })
}

fn parse_number<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| Error::InvalidArgument {
        detail: format!("cannot parse `{s}` as {what}"),
    })
}

/// Inclusive degree range `A..B` (also accepts `A..=B`).
fn parse_degree_range(s: &str) -> Result<(u32, u32)> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| Error::InvalidArgument {
        detail: format!("cannot parse `{s}` as a degree range A..B"),
    })?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: u32 = parse_number(lo.trim(), "a degree")?;
    let hi: u32 = parse_number(hi.trim(), "a degree")?;
    if lo > hi {
        return Err(Error::InvalidArgument {
            detail: format!("empty degree range {lo}..{hi}"),
        });
    }
    Ok((lo, hi))
}

fn parse_mesh_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|part| parse_number(part.trim(), "a mesh size"))
        .collect()
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

fn solve_options(tol: Option<f64>, max_iter: Option<usize>) -> SolveOptions {
    let mut opts = SolveOptions::default();
    opts.tol = tol;
    if let Some(n) = max_iter {
        opts.max_iter = n;
    }
    opts
}

fn emit_rule(rule: &QuadRule, status: RuleStatus, out: Option<&std::path::Path>) -> Result<()> {
    match out {
        Some(path) => write_rule_file(path, rule, status),
        None => {
            print!("{}", serialize_rule(rule, status)?);
            Ok(())
        }
    }
}

fn cmd_derive(args: DeriveArgs, config: &FileConfig) -> Result<u8> {
    let domain = required(merged(args.domain, config, "domain", |s| Ok(s.into()))?, "domain")?;
    let domain = parse_domain(&domain)?;
    let degree = required(
        merged(args.degree, config, "degree", |s| parse_number(s, "a degree"))?,
        "degree",
    )?;
    let tol = merged(args.tol, config, "tol", |s| parse_number(s, "a tolerance"))?;
    let max_iter = merged(args.max_iter, config, "max-iter", |s| parse_number(s, "an iteration count"))?;
    let out = merged(args.out, config, "out", |s| Ok(PathBuf::from(s)))?;
    let dump_initial = merged(args.dump_initial, config, "dump-initial", |s| Ok(PathBuf::from(s)))?;

    if let Some(path) = dump_initial {
        write_rule_file(path, &initial_guess(domain, degree)?, RuleStatus::Initial)?;
    }
    let (rule, report) = derive_rule(domain, degree, &solve_options(tol, max_iter))?;
    if !report.converged {
        eprintln!(
            "{} degree {degree}: no convergence after {} iterations (residual {:.2e})",
            domain, report.iterations, report.residual_inf
        );
        return Ok(EXIT_NO_CONVERGENCE);
    }
    emit_rule(&rule, RuleStatus::Converged, out.as_deref())?;
    eprintln!(
        "{} degree {degree}: {} nodes in {} orbits, {} iterations, residual {:.2e}",
        domain,
        rule.node_count(),
        rule.orbits.len(),
        report.iterations,
        report.residual_inf
    );
    Ok(EXIT_OK)
}

fn cmd_derive_batch(args: DeriveBatchArgs, config: &FileConfig) -> Result<u8> {
    let domain = required(merged(args.domain, config, "domain", |s| Ok(s.into()))?, "domain")?;
    let domain = parse_domain(&domain)?;
    let degrees = required(
        merged(args.degrees, config, "degrees", |s| Ok(s.into()))?,
        "degrees",
    )?;
    let (lo, hi) = parse_degree_range(&degrees)?;
    let jobs = merged(args.jobs, config, "jobs", |s| parse_number(s, "a thread count"))?;
    let out_dir = required(
        merged(args.out_dir, config, "out-dir", |s| Ok(PathBuf::from(s)))?,
        "out-dir",
    )?;
    let tol = merged(args.tol, config, "tol", |s| parse_number(s, "a tolerance"))?;
    let max_iter = merged(args.max_iter, config, "max-iter", |s| parse_number(s, "an iteration count"))?;

    std::fs::create_dir_all(&out_dir)?;
    let opts = solve_options(tol, max_iter);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument {
            detail: format!("cannot build worker pool: {e}"),
        })?;
    let results: Vec<Result<_>> = pool.install(|| {
        (lo..=hi)
            .into_par_iter()
            .map(|q| {
                let (rule, report) = derive_rule(domain, q, &opts)?;
                Ok((q, rule, report))
            })
            .collect()
    });

    let mut failures = 0usize;
    for result in results {
        let (q, rule, report) = result?;
        if !report.converged {
            eprintln!(
                "{domain} degree {q}: no convergence after {} iterations (residual {:.2e})",
                report.iterations, report.residual_inf
            );
            failures += 1;
            continue;
        }
        let path = out_dir.join(format!("{}{:02}.rule", domain.tag(), q));
        write_rule_file(&path, &rule, RuleStatus::Converged)?;
        eprintln!(
            "{domain} degree {q}: {} nodes, {} iterations, residual {:.2e} -> {}",
            rule.node_count(),
            report.iterations,
            report.residual_inf,
            path.display()
        );
    }
    Ok(if failures > 0 { EXIT_NO_CONVERGENCE } else { EXIT_OK })
}

fn cmd_eliminate(args: EliminateArgs, config: &FileConfig) -> Result<u8> {
    let input = required(
        merged(args.input, config, "in", |s| Ok(PathBuf::from(s)))?,
        "in",
    )?;
    let criterion = merged(args.criterion, config, "criterion", |s| Ok(s.to_string()))?;
    let out = merged(args.out, config, "out", |s| Ok(PathBuf::from(s)))?;
    let log_path = merged(args.log, config, "log", |s| Ok(PathBuf::from(s)))?;

    let (rule, _) = read_rule_file(&input)?;
    let before = rule.node_count();
    let mut cfg = ElimConfig::default();
    let (result, attempts) = match parse_criterion(criterion.as_deref().unwrap_or("auto"))? {
        None => eliminate_auto(&rule, &cfg)?,
        Some(criterion) => {
            cfg.criterion = criterion;
            eliminate_all(&rule, &cfg)?
        }
    };

    if let Some(path) = log_path {
        let mut text = String::new();
        for a in &attempts {
            let nu = a.nu.map_or("-".to_string(), |nu| format!("{nu:.0e}"));
            text.push_str(&format!(
                "outer={} kind={} weight={:.6e} facet_dist={:.6e} nu={} converged={} nodes={}\n",
                a.outer_iter, a.kind, a.weight, a.min_facet_distance, nu, a.converged, a.nodes
            ));
        }
        std::fs::write(path, text)?;
    }
    emit_rule(&result, RuleStatus::Eliminated, out.as_deref())?;
    let accepted = attempts.iter().filter(|a| a.converged).count();
    eprintln!(
        "{} degree {}: {} -> {} nodes ({} of {} attempts accepted)",
        result.domain,
        result.degree,
        before,
        result.node_count(),
        accepted,
        attempts.len()
    );
    Ok(EXIT_OK)
}

fn cmd_validate(args: ValidateArgs, config: &FileConfig) -> Result<u8> {
    let input = required(
        merged(args.input, config, "in", |s| Ok(PathBuf::from(s)))?,
        "in",
    )?;
    let tol = merged(args.tol, config, "tol", |s| parse_number(s, "a tolerance"))?
        .unwrap_or(DEFAULT_VALIDATE_TOL);

    let (rule, status) = read_rule_file(&input)?;
    let report = validate_rule(&rule, tol)?;
    let line = |name: &str, value: f64, ok: bool| {
        println!("{name:<18} {value:>12.4e}  {}", if ok { "ok" } else { "FAIL" });
    };
    println!(
        "{} degree {} ({}), {} nodes in {} orbits",
        rule.domain,
        rule.degree,
        status,
        rule.node_count(),
        rule.orbits.len()
    );
    line("moment residual", report.max_moment_residual, report.residual_ok);
    line("min weight", report.min_weight, report.weights_ok);
    line("min barycentric", report.min_barycentric, report.interior_ok);
    line("symmetry defect", report.symmetry_defect, report.symmetry_ok);
    line("monomial rel err", report.max_monomial_rel_error, report.monomials_ok);
    if report.pass() {
        println!("valid");
        Ok(EXIT_OK)
    } else {
        println!("INVALID");
        Ok(EXIT_INVALID)
    }
}

fn cmd_bounds(args: BoundsArgs, config: &FileConfig) -> Result<u8> {
    let domain = required(merged(args.domain, config, "domain", |s| Ok(s.into()))?, "domain")?;
    let domain = parse_domain(&domain)?;
    let degree = required(
        merged(args.degree, config, "degree", |s| parse_number(s, "a degree"))?,
        "degree",
    )?;
    let nodes = merged(args.nodes, config, "nodes", |s| parse_number(s, "a node count"))?;

    let estimate = bounds::lower_bound(domain, degree)?;
    println!(
        "{} degree {} lower bound: {} ({} nodes)",
        domain,
        degree,
        estimate.counts,
        estimate.total_nodes()
    );
    if let Some(n) = nodes {
        println!("efficiency of {n} nodes: {:.4}", bounds::efficiency(n, &estimate)?);
    }
    Ok(EXIT_OK)
}

fn cmd_integrate(args: IntegrateArgs, config: &FileConfig) -> Result<u8> {
    let rule_path = required(
        merged(args.rule, config, "rule", |s| Ok(PathBuf::from(s)))?,
        "rule",
    )?;
    let case = required(merged(args.case, config, "case", |s| Ok(s.into()))?, "case")?;
    let case = parse_case(&case)?;
    let n = required(merged(args.n, config, "n", |s| parse_number(s, "a mesh size"))?, "n")?;

    let (rule, _) = read_rule_file(&rule_path)?;
    let value = integrate_case(&rule, case, n)?;
    let reference = case.reference();
    println!("case {} on a {}^{} mesh, degree {} rule", case.label(), n, case.dim(), rule.degree);
    println!("value     {value:.16e}");
    println!("reference {reference:.16e}");
    println!("abs error {:.4e}", (value - reference).abs());
    println!("rel error {:.4e}", ((value - reference) / reference).abs());
    Ok(EXIT_OK)
}

fn cmd_convergence(args: ConvergenceArgs, config: &FileConfig) -> Result<u8> {
    let rule_path = required(
        merged(args.rule, config, "rule", |s| Ok(PathBuf::from(s)))?,
        "rule",
    )?;
    let case = required(merged(args.case, config, "case", |s| Ok(s.into()))?, "case")?;
    let case = parse_case(&case)?;
    let ns = required(
        merged(args.n, config, "n", |s| Ok(s.to_string()))?.map(|s| parse_mesh_list(&s)).transpose()?,
        "n",
    )?;
    let csv = merged(args.csv, config, "csv", |s| Ok(PathBuf::from(s)))?;

    let (rule, _) = read_rule_file(&rule_path)?;
    let study = convergence_study(&rule, case, &ns)?;
    println!("case {} with the degree {} rule ({} nodes per element)", case.label(), rule.degree, rule.node_count());
    println!("{:>5} {:>24} {:>12} {:>9}", "n", "value", "error", "rate");
    let mut csv_text = String::from("n,value,error,rate\n");
    for i in 0..study.ns.len() {
        let rate = match study.rates[i] {
            Some(r) => format!("{r:.2}"),
            None if i == 0 => "-".to_string(),
            None => "saturated".to_string(),
        };
        println!(
            "{:>5} {:>24.16e} {:>12.4e} {:>9}",
            study.ns[i], study.values[i], study.errors[i], rate
        );
        csv_text.push_str(&format!(
            "{},{:.16e},{:.4e},{}\n",
            study.ns[i],
            study.values[i],
            study.errors[i],
            study.rates[i].map(|r| format!("{r:.4}")).unwrap_or_default()
        ));
    }
    if let Some(path) = csv {
        std::fs::write(path, csv_text)?;
    }
    Ok(EXIT_OK)
}

fn cmd_efficiency(args: EfficiencyArgs, config: &FileConfig) -> Result<u8> {
    let dir = required(merged(args.dir, config, "dir", |s| Ok(PathBuf::from(s)))?, "dir")?;
    let csv = merged(args.csv, config, "csv", |s| Ok(PathBuf::from(s)))?;

    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|entry| entry.path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "rule"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::InvalidArgument {
            detail: format!("no .rule files in {}", dir.display()),
        });
    }
    let mut rules = Vec::with_capacity(paths.len());
    for path in &paths {
        rules.push(read_rule_file(path)?.0);
    }
    let rows = efficiency_rows(&rules)?;
    println!("{:>6} {:>7} {:>6} {:>6} {:>11}", "domain", "degree", "nodes", "bound", "efficiency");
    for r in &rows {
        println!(
            "{:>6} {:>7} {:>6} {:>6} {:>11.4}",
            r.domain.tag(),
            r.degree,
            r.nodes,
            r.bound_nodes,
            r.efficiency
        );
    }
    if let Some(path) = csv {
        std::fs::write(path, efficiency_csv(&rows))?;
    }
    Ok(EXIT_OK)
}

fn cmd_export(args: ExportArgs, config: &FileConfig) -> Result<u8> {
    let input = required(
        merged(args.input, config, "in", |s| Ok(PathBuf::from(s)))?,
        "in",
    )?;
    let pointset = required(
        merged(args.pointset, config, "pointset", |s| Ok(PathBuf::from(s)))?,
        "pointset",
    )?;

    let (rule, _) = read_rule_file(&input)?;
    write_pointset_file(&pointset, &rule)?;
    eprintln!(
        "{} degree {}: wrote {} nodes to {}",
        rule.domain,
        rule.degree,
        rule.node_count(),
        pointset.display()
    );
    Ok(EXIT_OK)
}
