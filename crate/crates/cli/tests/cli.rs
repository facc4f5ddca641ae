use std::process::{Command, Output};

fn sqwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqwalk")).args(args).output().expect("binary runs")
}

fn first_line(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).lines().next().unwrap_or_default().to_string()
}

#[test]
fn run_record_header() {
    let out = sqwalk(&["search", "--n", "4"]);
    assert!(out.status.success());
    assert_eq!(first_line(&out), "n,N,t_opt,p_max,lambda,phi_min,wall_time_s");
    let row = String::from_utf8_lossy(&out.stdout).lines().nth(1).unwrap().to_string();
    assert!(row.starts_with("4,64,"), "{row}");
}

#[test]
fn spectrum_header_and_row_count() {
    let out = sqwalk(&["spectrum", "--n", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "k,l,class,phi,re_v0,im_v0,re_v1,im_v1");
    assert_eq!(lines.count(), 36);
}

#[test]
fn json_output_parses_shape() {
    let out = sqwalk(&["appendix", "--n-list", "4,8", "--format", "json"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("[\n  {\"n\": 4, \"lambda_exact\": "));
    assert!(text.ends_with("}\n]\n"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let out = sqwalk(&["theta-scan", "--n", "6", "--theta-list", "pi/4,pi/2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(2).unwrap().contains(",false,"), "{text}");
}

#[test]
fn failure_to_amplify_is_not_an_error() {
    let out = sqwalk(&["search", "--n", "16", "--theta", "pi/2"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no maximum"));
}

#[test]
fn configuration_errors_exit_nonzero() {
    let bad: &[&[&str]] = &[
        &["search", "--n", "1"],
        &["search", "--n", "4", "--n-list", "4,5"],
        &["search", "--theta", "pi/zero"],
        &["search", "--ordering", "00,01,10"],
        &["search", "--format", "xml"],
        &["search", "--max-steps", "0"],
        &["scaling", "--n-list", "4,5,6"],
        &["frobnicate"],
    ];
    for args in bad {
        let out = sqwalk(args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(out.stdout.is_empty(), "{args:?} wrote output");
    }
}

#[test]
fn recorded_time_is_opt_in() {
    let plain = String::from_utf8(sqwalk(&["search", "--n", "8"]).stdout).unwrap();
    assert!(plain.trim_end().ends_with(",0.0000000000000000e0"));
    let timed = sqwalk(&["search", "--n", "8", "--record-time"]);
    assert!(timed.status.success());
}
