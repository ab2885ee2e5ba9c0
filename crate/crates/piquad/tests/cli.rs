//! Exercises the `piquad` binary end to end: exit codes, file outputs, and
//! byte-level reproducibility.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_piquad"))
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("piquad-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_exit(output: &Output, expected: i32) {
    assert_eq!(
        output.status.code(),
        Some(expected),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn bounds_prints_counts_and_exits_zero() {
    let output = run(&["bounds", "--domain", "tri", "--degree", "8"]);
    assert_exit(&output, 0);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("S1 1 S21 3 S111 1"), "{stdout}");
    assert!(stdout.contains("16 nodes"), "{stdout}");
}

#[test]
fn out_of_range_degree_is_a_usage_error() {
    assert_exit(&run(&["derive", "--domain", "tri", "--degree", "0"]), 3);
    assert_exit(&run(&["derive", "--domain", "tri", "--degree", "85"]), 3);
    assert_exit(&run(&["derive", "--domain", "tet", "--degree", "41"]), 3);
}

#[test]
fn unknown_flags_and_missing_arguments_are_usage_errors() {
    assert_exit(&run(&["derive", "--domain", "tri", "--degree", "4", "--bogus"]), 3);
    assert_exit(&run(&["derive", "--domain", "tri"]), 3);
    assert_exit(&run(&["bounds", "--domain", "nonsense", "--degree", "4"]), 3);
    assert_exit(&run(&["no-such-command"]), 3);
}

#[test]
fn help_is_not_an_error() {
    assert_exit(&run(&["--help"]), 0);
    assert_exit(&run(&["derive", "--help"]), 0);
}

#[test]
fn derive_then_validate_round_trip() {
    let dir = workdir("round-trip");
    let rule = dir.join("tri02.rule");
    let rule_s = rule.to_str().unwrap();

    assert_exit(
        &run(&["derive", "--domain", "tri", "--degree", "2", "--out", rule_s]),
        0,
    );
    let output = run(&["validate", "--in", rule_s]);
    assert_exit(&output, 0);
    assert!(String::from_utf8_lossy(&output.stdout).contains("valid"));
}

#[test]
fn corrupt_rules_fail_validation() {
    let dir = workdir("corrupt");
    let rule = dir.join("bad.rule");
    // valid shape, but the weight does not satisfy the moments
    std::fs::write(
        &rule,
        "# domain: tri\n# degree: 1\n# nodes: 1\n# orbits: S1 1 S21 0 S111 0\n\
         # status: converged\n# residual: 0.00e0\nS1 1.5000000000000000e0\n",
    )
    .unwrap();
    let output = run(&["validate", "--in", rule.to_str().unwrap()]);
    assert_exit(&output, 1);
    assert!(String::from_utf8_lossy(&output.stdout).contains("INVALID"));

    // unparseable content is also a validation failure, not a usage error
    std::fs::write(&rule, "# domain: tri\n# degree: 1\nS99 1.0\n").unwrap();
    assert_exit(&run(&["validate", "--in", rule.to_str().unwrap()]), 1);

    // a missing file is a usage error
    assert_exit(&run(&["validate", "--in", "/no/such/file.rule"]), 3);
}

#[test]
fn eliminate_shrinks_and_logs() {
    let dir = workdir("eliminate");
    let derived = dir.join("tri04.rule");
    let smaller = dir.join("tri04e.rule");
    let log = dir.join("tri04e.log");

    assert_exit(
        &run(&["derive", "--domain", "tri", "--degree", "4", "--out", derived.to_str().unwrap()]),
        0,
    );
    assert_exit(
        &run(&[
            "eliminate",
            "--in",
            derived.to_str().unwrap(),
            "--criterion",
            "auto",
            "--out",
            smaller.to_str().unwrap(),
            "--log",
            log.to_str().unwrap(),
        ]),
        0,
    );
    let text = std::fs::read_to_string(&smaller).unwrap();
    assert!(text.contains("# nodes: 6"), "{text}");
    assert!(text.contains("# status: eliminated"), "{text}");
    let log_text = std::fs::read_to_string(&log).unwrap();
    assert!(log_text.lines().count() >= 1, "{log_text}");
    assert!(log_text.contains("converged=true"), "{log_text}");

    assert_exit(&run(&["validate", "--in", smaller.to_str().unwrap()]), 0);
}

#[test]
fn export_writes_one_row_per_node() {
    let dir = workdir("export");
    let rule = dir.join("tet03.rule");
    let points = dir.join("tet03.pts");

    assert_exit(
        &run(&["derive", "--domain", "tet", "--degree", "3", "--out", rule.to_str().unwrap()]),
        0,
    );
    assert_exit(
        &run(&[
            "export",
            "--in",
            rule.to_str().unwrap(),
            "--pointset",
            points.to_str().unwrap(),
        ]),
        0,
    );
    let rule_text = std::fs::read_to_string(&rule).unwrap();
    let declared: usize = rule_text
        .lines()
        .find_map(|l| l.strip_prefix("# nodes: "))
        .unwrap()
        .parse()
        .unwrap();
    let rows = std::fs::read_to_string(&points).unwrap().lines().count();
    assert_eq!(rows, declared);
}

#[test]
fn integrate_and_convergence_run() {
    let dir = workdir("integrate");
    let rule = dir.join("tet04.rule");
    assert_exit(
        &run(&["derive", "--domain", "tet", "--degree", "4", "--out", rule.to_str().unwrap()]),
        0,
    );
    let output = run(&["integrate", "--rule", rule.to_str().unwrap(), "--case", "J3", "--n", "3"]);
    assert_exit(&output, 0);
    assert!(String::from_utf8_lossy(&output.stdout).contains("reference"));

    // a 2D case cannot run with a tetrahedral rule
    assert_exit(
        &run(&["integrate", "--rule", rule.to_str().unwrap(), "--case", "I2", "--n", "3"]),
        3,
    );

    let csv = dir.join("conv.csv");
    let output = run(&[
        "convergence",
        "--rule",
        rule.to_str().unwrap(),
        "--case",
        "J3",
        "--n",
        "2,3,4",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("n,value,error,rate\n"), "{csv_text}");
    assert_eq!(csv_text.lines().count(), 4);
}

#[test]
fn efficiency_scans_a_directory() {
    let dir = workdir("efficiency");
    let rules = dir.join("rules");
    std::fs::create_dir_all(&rules).unwrap();
    assert_exit(
        &run(&[
            "derive-batch",
            "--domain",
            "tri",
            "--degrees",
            "2..4",
            "--out-dir",
            rules.to_str().unwrap(),
            "--jobs",
            "2",
        ]),
        0,
    );
    let csv = dir.join("eff.csv");
    let output = run(&[
        "efficiency",
        "--dir",
        rules.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(csv_text.lines().count(), 4, "{csv_text}");
    assert!(csv_text.contains("tri,2,3,3,1.0000"), "{csv_text}");
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = workdir("config");
    let config = dir.join("piquad.conf");
    std::fs::write(&config, "domain = tri\ndegree = 8\nnodes = 16\n").unwrap();

    let output = run(&["--config", config.to_str().unwrap(), "bounds"]);
    assert_exit(&output, 0);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("degree 8"), "{stdout}");
    assert!(stdout.contains("efficiency of 16 nodes: 1.0000"), "{stdout}");

    // a flag overrides its config entry
    let output = run(&[
        "--config",
        config.to_str().unwrap(),
        "bounds",
        "--degree",
        "10",
        "--nodes",
        "25",
    ]);
    assert_exit(&output, 0);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("degree 10"), "{stdout}");
    assert!(stdout.contains("0.9600"), "{stdout}");

    // unknown keys are rejected
    std::fs::write(&config, "nonsense = 1\n").unwrap();
    assert_exit(
        &run(&["--config", config.to_str().unwrap(), "bounds", "--domain", "tri", "--degree", "2"]),
        3,
    );
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = workdir("determinism");
    let a = dir.join("a.rule");
    let b = dir.join("b.rule");
    for (path, label) in [(&a, "a"), (&b, "b")] {
        let _ = label;
        assert_exit(
            &run(&["derive", "--domain", "tri", "--degree", "6", "--out", path.to_str().unwrap()]),
            0,
        );
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let ea = dir.join("a-elim.rule");
    let eb = dir.join("b-elim.rule");
    for (input, out) in [(&a, &ea), (&b, &eb)] {
        assert_exit(
            &run(&[
                "eliminate",
                "--in",
                input.to_str().unwrap(),
                "--criterion",
                "weight",
                "--out",
                out.to_str().unwrap(),
            ]),
            0,
        );
    }
    assert_eq!(std::fs::read(&ea).unwrap(), std::fs::read(&eb).unwrap());
}
