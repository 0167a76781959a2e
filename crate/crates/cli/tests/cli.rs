use std::path::PathBuf;
use std::process::{Command, Output};

use torsionfree::{render_summary, run, ProblemSpec, SolveReportFile, Status};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_torsionfree"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run_cli(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn report_of(o: &Output) -> SolveReportFile {
    SolveReportFile::from_json(&stdout(o)).unwrap()
}

#[test]
fn flat_summary_matches_golden() {
    let o = run_cli(&["--input", fixture("flat_n3.json").to_str().unwrap(), "--summary"]);
    assert_eq!(o.status.code(), Some(0));
    let golden = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/flat_n3.summary.txt")).unwrap();
    assert_eq!(stdout(&o), golden);
    assert!(golden.lines().any(|l| l == "status: consistent"));
    assert!(golden.lines().any(|l| l == "hol dim: 0"));
}

#[test]
fn flat_preset_report() {
    let o = run_cli(&["--preset", "flat", "--dim", "3", "--order", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report_of(&o);
    assert_eq!(r.status, Status::Consistent);
    let res = r.residuals.unwrap();
    assert!(res.consistency_per_degree.iter().all(|&x| x == 0.0));
    assert_eq!(res.torsion, 0.0);
    assert_eq!(r.holonomy.unwrap().dim, 0);
}

#[test]
fn sphere_reports_holonomy_and_radius() {
    let o = run_cli(&["--input", fixture("sphere_n3.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = report_of(&o);
    let h = r.holonomy.as_ref().unwrap();
    assert_eq!(h.dim, 3);
    assert!(h.authoritative && h.closed_under_bracket);
    let radius = r.radius.as_ref().unwrap().frame_degeneracy_radius.unwrap();
    assert!((radius - std::f64::consts::PI).abs() < 0.1, "{radius}");
    for s in &r.transport.as_ref().unwrap().samples {
        assert!(s.deviation.unwrap() < 1e-6);
    }
    assert!(render_summary(&r).lines().any(|l| l == "hol dim: 3"));
}

#[test]
fn negative_control_exits_two() {
    let o = run_cli(&["--input", fixture("gl2_irreducible.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let r = report_of(&o);
    assert_eq!(r.status, Status::Inconsistent);
    assert!(!r.holonomy.as_ref().unwrap().authoritative);
    assert!(render_summary(&r).lines().any(|l| l == "status: inconsistent (first failing degree: 2)"));
}

#[test]
fn input_outside_k_exits_one_with_residual() {
    let o = run_cli(&["--input", fixture("not_in_k.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let r = report_of(&o);
    assert_eq!(r.status, Status::InvalidInput);
    assert_eq!(r.error.as_ref().unwrap().kind, "not-in-k");
    assert!(r.input.as_ref().unwrap().first_bianchi_residual > 0.5);
    let projected = run_cli(&["--input", fixture("not_in_k.json").to_str().unwrap(), "--project"]);
    assert_ne!(projected.status.code(), Some(1));
    assert!(report_of(&projected).input.unwrap().projected);
}

#[test]
fn malformed_files_report_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"dim\": 3,\n  \"preset\": { \"kind\": \"flat\" \n").unwrap();
    let o = run_cli(&["--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 4"), "{err}");

    let missing = dir.path().join("missing.json");
    std::fs::write(&missing, "{ \"preset\": { \"kind\": \"flat\" } }").unwrap();
    let o = run_cli(&["--input", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("dim"));
}

#[test]
fn bad_flags_are_invalid_input() {
    assert_eq!(run_cli(&["--preset", "flat", "--checks", "holonomy,bogus"]).status.code(), Some(1));
    assert_eq!(run_cli(&["--preset", "torus"]).status.code(), Some(1));
    assert_eq!(run_cli(&[]).status.code(), Some(1));
    assert_eq!(run_cli(&["--preset", "flat", "--order", "x"]).status.code(), Some(1));
    assert_eq!(run_cli(&["--preset", "flat", "--order", "1"]).status.code(), Some(1));
    assert_eq!(run_cli(&["--preset", "flat", "--dim", "1"]).status.code(), Some(1));
    assert_eq!(run_cli(&["--preset", "flat", "--checks", "holonomy"]).status.code(), Some(1));
}

#[test]
fn checks_select_report_sections() {
    let o = run_cli(&["--preset", "constant_curvature:-1", "--dim", "2", "--checks", "consistency"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report_of(&o);
    assert!(r.holonomy.is_none() && r.radius.is_none() && r.transport.is_none());
    assert!(r.residuals.unwrap().second_bianchi.is_none());
}

#[test]
fn symmetric_from_basis_preset() {
    let o = run_cli(&["--preset", "symmetric_from_basis:so:1", "--dim", "3", "--checks", "consistency,holonomy"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report_of(&o).holonomy.unwrap().dim, 3);
}

#[test]
fn reports_are_byte_identical_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let mut texts = Vec::new();
    for _ in 0..2 {
        let o = run_cli(&["--input", fixture("polynomial_n2.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
        texts.push(std::fs::read(&out).unwrap());
    }
    let ta = texts.pop().unwrap();
    assert_eq!(texts[0], ta);
    let text = String::from_utf8(ta).unwrap();
    let parsed = SolveReportFile::from_json(&text).unwrap();
    assert_eq!(parsed.to_json(), text);
    assert!(parsed.all_finite());
}

#[test]
fn library_run_matches_binary() {
    let spec = ProblemSpec::from_json(&std::fs::read_to_string(fixture("gl2_irreducible.json")).unwrap()).unwrap();
    let report = run(&spec);
    let o = run_cli(&["--input", fixture("gl2_irreducible.json").to_str().unwrap()]);
    assert_eq!(report.to_json(), stdout(&o));
    assert_eq!(SolveReportFile::from_json(&report.to_json()).unwrap(), report);
}

#[test]
fn problem_round_trip_and_field_errors() {
    let spec = ProblemSpec::from_json(&std::fs::read_to_string(fixture("polynomial_n2.json")).unwrap()).unwrap();
    assert_eq!(ProblemSpec::from_json(&spec.to_json()).unwrap(), spec);
    spec.validate().unwrap();

    let mut unsorted = spec.clone();
    unsorted.s_coefficients[1].degree = 2;
    unsorted.s_coefficients[1].entries[0].mu = vec![1, 0];
    let err = unsorted.validate().unwrap_err().to_string();
    assert!(err.contains("s_coefficients[1].entries[0].mu"), "{err}");

    let mut dup = spec.clone();
    let e = dup.s_coefficients[0].entries[0].clone();
    dup.s_coefficients[0].entries.push(e);
    assert!(dup.validate().unwrap_err().to_string().contains("duplicate"));

    let mut shape = spec.clone();
    shape.s_coefficients[0].entries[0].matrix.pop();
    assert!(shape.validate().unwrap_err().to_string().contains("matrix"));

    let mut pair = spec;
    pair.s_coefficients[0].entries[0].pair = [1, 0];
    assert!(pair.validate().unwrap_err().to_string().contains("pair"));
}
