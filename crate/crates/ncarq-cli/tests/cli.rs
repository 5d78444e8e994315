//! Black-box tests of the command-line interface: exit codes, config
//! layering, schema stability and output determinism.

use std::path::Path;
use std::process::{Command, Output};

fn ncarq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncarq"))
        .args(args)
        .env_remove("NCARQ_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const REFERENCE: &[&str] = &[
    "--p1", "0.5", "--p2", "0.4", "--p12", "0.3", "--p21", "0.2", "--q", "0.1",
];

#[test]
fn analyze_writes_analytic_columns_only() {
    let out = ncarq(&[&["analyze"], REFERENCE, &["--np", "50", "--ns", "30"]].concat());
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scheme,p1,p2,p12,p21,q,np,ns,cap,trials,seed,mean_B_sim,mean_B_analytic,eta_p_sim,eta_s_sim,eta_p_analytic,eta_s_analytic,outage_sim,outage_analytic,status"
    );
    let arq: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(arq[0], "ARQ");
    assert_eq!(arq[8], "inf");
    assert_eq!(arq[9], "0", "analysis-only rows consume no trials");
    assert_eq!(arq[11], "", "sim mean empty");
    assert_eq!(arq[12], "132.236842");
    assert_eq!(arq[13], "", "sim eta empty");
    assert_eq!(arq[15], "0.378109453");
    assert_eq!(arq[19], "ok");
    assert_eq!(text.lines().count(), 4, "header plus one row per scheme");
}

#[test]
fn simulate_with_zero_trials_is_analysis_only() {
    let out = ncarq(&[&["simulate"], REFERENCE, &["--np", "10", "--ns", "5", "--trials", "0"]].concat());
    assert!(out.status.success());
    for row in stdout(&out).lines().skip(1) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[11], "");
        assert_ne!(fields[12], "");
    }
}

#[test]
fn config_file_drives_a_run_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# reference profile\np1=0.5\np2=0.4\np12=0.3\np21=0.2\nq=0.1\nnp=50\nns=30\nscheme=ARQ\n",
    )
    .unwrap();
    let out = ncarq(&["analyze", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 2);

    let out = ncarq(&["analyze", cfg.to_str().unwrap(), "--ns", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[7], "0");
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "p1=0.5\nnot a key value\n").unwrap();
    let out = ncarq(&["analyze", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    // missing required field is a config error as well
    let out = ncarq(&["analyze", "--p1", "0.5", "--np", "10", "--ns", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validation_errors_exit_3() {
    let out = ncarq(&[
        "analyze", "--p1", "1.2", "--p2", "0.4", "--p12", "0.3", "--p21", "0.2", "--q", "0.1",
        "--np", "10", "--ns", "5",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p1"));

    let out = ncarq(&[&["simulate"], REFERENCE, &["--np", "10", "--ns", "5", "--cap", "9"]].concat());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn infeasible_sizing_exits_4() {
    let out = ncarq(&[
        "size", "--p1", "0.9", "--p2", "0.4", "--p12", "0.3", "--p21", "0.2", "--q", "0.5",
        "--np", "30", "--cap", "31", "--pout", "0.05", "--trials", "0",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn size_reports_the_reference_loads() {
    let out = ncarq(&[&["size"], REFERENCE, &["--np", "50", "--cap", "120", "--pout", "0.1", "--trials", "0"]].concat());
    assert!(out.status.success());
    let text = stdout(&out);
    let ns: Vec<u32> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(11).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ns, vec![18, 24, 29]);
}

#[test]
fn sweep_rows_preserve_point_order_and_embed_errors() {
    let out = ncarq(&[&["sweep"], REFERENCE, &[
        "--np", "50", "--ns", "30", "--varying", "ns", "--start", "0", "--stop", "20",
        "--step", "10", "--trials", "0", "--scheme", "ARQ",
    ]].concat());
    assert!(out.status.success());
    let text = stdout(&out);
    let ns_col: Vec<&str> =
        text.lines().skip(1).map(|l| l.split(',').nth(7).unwrap()).collect();
    assert_eq!(ns_col, vec!["0", "10", "20"]);
    for line in text.lines().skip(1) {
        assert!(line.ends_with("ok"));
    }
}

#[test]
fn hist_emits_three_columns_and_flags_degenerate_fits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hist.csv");
    let out = ncarq(&[
        "hist", "--p1", "0", "--p2", "0", "--p12", "0", "--p21", "0", "--q", "0",
        "--np", "10", "--ns", "5", "--scheme", "ARQ", "--trials", "100",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, "B,frequency,fitted_density\n15,100,\n");
    assert!(String::from_utf8_lossy(&out.stderr).contains("not-applicable"));
}

#[test]
fn out_dir_environment_variable_anchors_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ncarq"))
        .args([&["analyze"], REFERENCE, &["--np", "10", "--ns", "5", "--out", "report.csv"]].concat())
        .env("NCARQ_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(Path::new(&dir.path().join("report.csv")).exists());
}

#[test]
fn same_seed_yields_byte_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = ncarq(&[&["simulate"], REFERENCE, &[
            "--np", "20", "--ns", "10", "--cap", "50", "--trials", "20000", "--seed", "9",
            "--out", path.to_str().unwrap(),
        ]].concat());
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
