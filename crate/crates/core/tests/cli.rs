//! End-to-end tests of the `nmq` binary: CSV contract, exit codes, config
//! precedence, and the reproduction subcommands.

use std::path::Path;
use std::process::{Command, Output};

fn nmq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nmq"))
        .args(args)
        .output()
        .unwrap()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn trajectory_csv_schema_and_bell_first_row() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("t.csv");
    let out = nmq(&[
        "trajectory",
        "--steps",
        "10",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = read(&out_path);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,eof,mi,j_ae,delta_ae,i_ae");
    let first: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(first.len(), 6);
    let expected = [0.0, 1.0, 2.0, 0.0, 0.0, 0.0];
    for (got, want) in first.iter().zip(expected) {
        assert!((got - want).abs() < 1e-12, "{csv}");
    }
    assert_eq!(csv.lines().count(), 12);
    assert!(csv.ends_with('\n'));
}

#[test]
fn trajectory_initial_eof_of_example_state() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("t.csv");
    let out = nmq(&[
        "trajectory",
        "--state",
        "paper",
        "--steps",
        "4",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let first_eof: f64 = read(&out_path)
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    // 2|ad - bc| with (a, b, c) = (0.05, 0.95, 0.17), mapped through the
    // binary-entropy form of the entanglement of formation.
    let d = (1.0f64 - 0.05 * 0.05 - 0.95 * 0.95 - 0.17 * 0.17).sqrt();
    let c = 2.0 * (0.05 * d - 0.95 * 0.17).abs();
    let x: f64 = 0.5 * (1.0 + (1.0 - c * c).sqrt());
    let expected = -x * x.log2() - (1.0 - x) * (1.0 - x).log2();
    assert!((first_eof - expected).abs() < 1e-10);
}

#[test]
fn gnuplot_flag_emits_script() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("t.csv");
    let out = nmq(&[
        "trajectory",
        "--steps",
        "4",
        "--gnuplot",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let script = read(&out_path.with_extension("gp"));
    assert!(script.contains("set datafile separator ','"));
    assert!(script.contains("t.csv"));
}

#[test]
fn config_file_and_flags_layer_over_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.conf");
    std::fs::write(&config_path, "# comment\nsteps=6\nomega=3.0\nt_end=0.5\n").unwrap();
    let out_path = dir.path().join("t.csv");
    // Flag overrides the file's t_end; the file's steps and omega survive.
    let out = nmq(&[
        "trajectory",
        "--config",
        config_path.to_str().unwrap(),
        "--t-end",
        "0.25",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = read(&out_path);
    assert_eq!(csv.lines().count(), 8);
    let last_t: f64 = csv
        .lines()
        .last()
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((last_t - 0.25).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(nmq(&["trajectory", "--channel", "bogus"]).status.code(), Some(1));
    assert_eq!(nmq(&["reproduce", "fig9"]).status.code(), Some(1));
    assert_eq!(nmq(&["--no-such-flag"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.conf");
    std::fs::write(&config_path, "steps=not_a_number\n").unwrap();
    assert_eq!(
        nmq(&["trajectory", "--config", config_path.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn help_exits_zero() {
    assert!(nmq(&["--help"]).status.success());
    assert!(nmq(&["trajectory", "--help"]).status.success());
}

#[test]
fn check_subcommand_passes() {
    let out = nmq(&["check"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("all checks passed"));
}

#[test]
fn reproduce_fig1_and_fig2_write_expected_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = nmq(&[
        "reproduce",
        "fig1",
        "--gnuplot",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let fig1 = read(&dir.path().join("fig1_eof.csv"));
    assert!(fig1.starts_with("t,eof,mi,j_ae,delta_ae,i_ae\n"));
    assert_eq!(fig1.lines().count(), 4002);
    assert!(dir.path().join("fig1_eof.gp").exists());

    let out = nmq(&[
        "reproduce",
        "fig2",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(dir.path().join("fig2_mi.csv").exists());
}

#[test]
fn reproduce_fig3_reports_region_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let out = nmq(&[
        "reproduce",
        "fig3",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("three-regime pattern found"), "{stdout}");
    let regions = read(&dir.path().join("fig3_regions.csv"));
    assert!(regions.starts_with("region,dj_sign,ddelta_sign,di_sign,t_start,t_end\n"));
    assert!(regions.lines().count() >= 4);
}
