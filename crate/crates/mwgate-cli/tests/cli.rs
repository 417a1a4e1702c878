use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mwgate::squid::josephson_inductance;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mwgate"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn reference() -> String {
    configs().join("reference.cfg").display().to_string()
}

fn assert_error(o: &Output, code: i32, kind: &str) {
    assert_eq!(o.status.code(), Some(code), "stderr: {}", stderr(o));
    let line = format!("error kind={kind} code={code} message=");
    assert!(stderr(o).lines().any(|l| l.starts_with(&line)), "stderr: {}", stderr(o));
}

#[test]
fn usage_errors_exit_2() {
    assert_error(&run(&[]), 2, "usage");
    assert_error(&run(&["transmogrify"]), 2, "usage");
    assert_error(&run(&["design", "--theta", "0.8", "--colour", "red"]), 2, "usage");
    assert_error(&run(&["design"]), 2, "usage");
    assert_error(&run(&["sweep-flux", "--grid", "12by12"]), 2, "usage");
    assert_error(&run(&["band", "--format", "json"]), 2, "usage");
}

#[test]
fn help_exits_0() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sweep-flux"));
}

#[test]
fn validation_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "ic1 = 0.7\n").unwrap();
    let o = run(&["design", "--theta", "0.8", "--config", bad.to_str().unwrap()]);
    assert_error(&o, 3, "validation");
    assert!(stderr(&o).contains("needs a unit"));

    let missing = dir.path().join("absent.cfg");
    assert_error(&run(&["design", "--theta", "0.8", "--config", missing.to_str().unwrap()]), 3, "validation");

    let out = dir.path().to_str().unwrap();
    assert_error(&run(&["sweep-flux", "--grid", "1x5", "--out", out]), 3, "validation");
    let matrix = configs().join("crosstalk_synthetic.txt");
    assert_error(
        &run(&["compensate", "--matrix", matrix.to_str().unwrap(), "--target", "0,1", "--out", out]),
        3,
        "validation",
    );
}

#[test]
fn singular_matrix_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.txt");
    std::fs::write(&m, "units = pH\n100 10\n100 10\n").unwrap();
    let o = run(&["compensate", "--matrix", m.to_str().unwrap(), "--target", "1,0", "--out", dir.path().to_str().unwrap()]);
    assert_error(&o, 4, "computation");
    assert!(stderr(&o).contains("not invertible"));
}

#[test]
fn flux_sweep_is_byte_stable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = run(&["sweep-flux", "--config", &reference(), "--grid", "121x121", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let x = std::fs::read(a.path().join("flux_sweep.csv")).unwrap();
    let y = std::fs::read(b.path().join("flux_sweep.csv")).unwrap();
    assert_eq!(x, y);
    let text = String::from_utf8(x).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("flux1_phi0,flux2_phi0,s21_re,s21_im,s21_abs,s21_arg_rad"));
    assert_eq!(lines.count(), 121 * 121);
}

fn value(out: &str, key: &str) -> String {
    let prefix = format!("{key} = ");
    out.lines().find_map(|l| l.strip_prefix(&prefix)).unwrap_or_else(|| panic!("no {key} in {out}")).to_string()
}

#[test]
fn design_reports_realizable_biases() {
    let o = run(&["design", "--theta", "0.8", "--config", &reference()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(value(&out, "feasibility"), "feasible");
    let l1: f64 = value(&out, "l1_h").parse().unwrap();
    let l2: f64 = value(&out, "l2_h").parse().unwrap();
    let f1: f64 = value(&out, "flux1_phi0").parse().unwrap();
    let f2: f64 = value(&out, "flux2_phi0").parse().unwrap();
    assert!((josephson_inductance(0.7e-6, f1).unwrap() / l1 - 1.0).abs() < 1e-12);
    assert!((josephson_inductance(2.2e-6, f2).unwrap() / l2 - 1.0).abs() < 1e-12);

    let o = run(&["design", "--theta", "-2.5", "--config", &reference()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(value(&stdout(&o), "feasibility").starts_with("infeasible"));
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("all 6 checks passed"));
}

#[test]
fn csv_headers_match_their_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cases: [(&[&str], &str, &str); 4] = [
        (&["single-photon", "--gammas", "0.5,1.0"], "single_photon.csv", "gamma,delta_over_gamma,s21_re,s21_im,s21_abs,s21_arg_rad"),
        (&["band", "--points", "5"], "band.csv", "gamma,delta_f_over_gamma,lower_over_gamma,upper_over_gamma"),
        (
            &["ft-curve", "--samples", "11", "--window", "0.3,0.5,0,0.5"],
            "ft_curve.csv",
            "tau,theta_rad,flux1_phi0,flux2_phi0,s21_abs,s21_arg_rad",
        ),
        (&["compensate", "--target", "0,1,0"], "compensate.csv", "line,target_wb,current_a"),
    ];
    let matrix = configs().join("crosstalk_synthetic.txt");
    for (args, file, header) in cases {
        let mut cmd = bin();
        cmd.args(args).args(["--out", out, "--config", &reference()]);
        if file == "compensate.csv" {
            cmd.args(["--matrix", matrix.to_str().unwrap()]);
        }
        let o = cmd.output().unwrap();
        assert_eq!(o.status.code(), Some(0), "{file}: {}", stderr(&o));
        let text = std::fs::read_to_string(dir.path().join(file)).unwrap();
        assert_eq!(text.lines().next(), Some(header));
    }
}

#[test]
fn curve_fit_reaches_target_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "ft-curve",
        "--config",
        &reference(),
        "--window",
        "0.3,0.5,0,0.5",
        "--fit-to",
        "0.3,0.42,0.46,0",
        "--samples",
        "21",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("fitted phi_line"));
    let text = std::fs::read_to_string(dir.path().join("ft_curve.csv")).unwrap();
    let rows: Vec<Vec<f64>> =
        text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 21);
    let first = &rows[0];
    let last = &rows[20];
    assert!((first[2] - 0.3).abs() < 0.01 && (first[3] - 0.42).abs() < 0.01);
    assert!((last[2] - 0.46).abs() < 0.01 && last[3].abs() < 0.01);
}
