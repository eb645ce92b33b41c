use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_with_threads(args, None)
}

fn run_with_threads(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_newton-decay"));
    cmd.args(args).env_remove("NEWTON_DECAY_THREADS");
    if let Some(n) = threads {
        cmd.env("NEWTON_DECAY_THREADS", n);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn analyze_reports_the_exact_data() {
    let o = run(&["analyze", "-f", "x1^3 + x2^2", "--rho", "1/2"]);
    // both slice exponents fall below the threshold of the decay bound
    assert_eq!(code(&o), 3);
    let r = json(&o);
    assert_eq!(r["schema"], "newton-decay/1");
    assert_eq!(r["d"], "6/5");
    assert_eq!(r["well_behaved"]["verdict"], true);
    assert_eq!(r["rho"][0]["axis1"]["epsilon"], "0");
    assert_eq!(r["rho"][0]["axis1"]["d"], 1);
    assert_eq!(r["rho"][0]["axis2"]["epsilon"], "1/3");
    assert_eq!(r["rho"][0]["applicable"], false);
}

#[test]
fn analyze_applicable_bound_exits_zero() {
    let o = run(&["analyze", "-f", "|x1|^2 + |x2|^2", "--rho", "9/10", "--rho", "0.25"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["rho"][0]["combined"]["exponent"], "-1/5");
    assert_eq!(r["rho"][1]["rho"], "1/4");
    assert_eq!(r["rho"][1]["applicable"], false);
}

#[test]
fn monomial_is_inapplicable() {
    let o = run(&["analyze", "-f", "x1^2*x2^3", "--rho", "1/4"]);
    assert_eq!(code(&o), 3);
    let r = json(&o);
    assert_eq!(r["rho"][0]["axis1"]["epsilon"], "1/2");
    assert_eq!(r["rho"][0]["axis2"]["epsilon"], "3/4");
}

#[test]
fn bad_input_exits_two() {
    for args in [
        &["analyze", "-f", "1"][..],
        &["analyze", "-f", "x1^2 +"],
        &["analyze", "-f", "x1^2", "--rho", "-1/2"],
        &["analyze", "-f", "x1^2", "--rho", "1/0"],
        &["analyze"],
        &["analyze", "-f", "x1", "--frobnicate"],
        &["verify", "-f", "x1^2 + x2^2", "--suite", "slice"],
        &["verify", "-f", "x1^2 + x2^2", "--rho", "1/2", "--tol", "0"],
    ] {
        let o = run(args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn csv_format() {
    let o = run(&["analyze", "-f", "|x1|^2 + |x2|^2", "--rho", "9/10", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rho,epsilon1,d1,epsilon2,d2,applicable,combined_exponent,combined_log");
    assert_eq!(lines[1], "9/10,4/5,0,4/5,0,true,-1/5,0");
}

#[test]
fn input_file_matches_expression() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    std::fs::write(
        &path,
        r#"{"terms": [{"num": 1, "a": 4, "b": 0}, {"num": 1, "a": 1, "b": 1}, {"num": 1, "a": 0, "b": 4}]}"#,
    )
    .unwrap();
    let from_file = run(&["analyze", "--input", path.to_str().unwrap(), "--rho", "1/3"]);
    let from_text = run(&["analyze", "-f", "x1^4 + x1*x2 + x2^4", "--rho", "1/3"]);
    assert_eq!(code(&from_file), code(&from_text));
    assert_eq!(from_file.stdout, from_text.stdout);
    assert_eq!(json(&from_file)["d"], "1");
}

#[test]
fn slice_suite_reports_the_measured_slope() {
    // the 12-octave window sits close to the transition at rho = 1/2, which
    // biases the fitted slope past the 0.02 tolerance
    let o = run(&["verify", "-f", "|x1|^2 + |x2|^2", "--rho", "3/4", "--suite", "slice"]);
    assert_eq!(code(&o), 4);
    let r = json(&o);
    let c = check(&r, "slice/axis1");
    assert_eq!(c["status"], "fail");
    assert_eq!(c["expected"]["epsilon"], "1/2");
    let slope = c["measured"]["slope"].as_f64().unwrap();
    assert!((slope - 0.5207).abs() < 1e-3, "{slope}");
}

#[test]
fn slice_suite_passes_inside_a_stable_range() {
    let o = run(&["verify", "-f", "|x1|^2 + |x2|^2", "--rho", "9/10", "--suite", "slice"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(check(&r, "slice/axis2")["status"], "pass");
}

#[test]
fn comparability_of_a_monomial_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["verify", "-f", "x1^2*x2^3", "--rho", "1/4", "--suite", "comparability", "--out", out]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let c = check(&r, "comparability");
    assert_eq!(c["status"], "pass");
    assert!((c["measured"]["spread"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let mut rows = csv::Reader::from_path(dir.path().join("ratios_rho1_4.csv")).unwrap();
    assert_eq!(rows.headers().unwrap(), vec!["j", "k", "quadrant", "ratio"]);
    let records: Vec<csv::StringRecord> = rows.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 12 * 12 * 4);
    for rec in &records {
        let ratio: f64 = rec[3].parse().unwrap();
        assert!((ratio - 1.0).abs() < 1e-9);
    }
}

#[test]
fn unmet_preconditions_are_skipped() {
    let o = run(&["verify", "-f", "x1^2 - 2*x1*x2 + x2^2", "--rho", "1/4", "--suite", "comparability", "--suite", "equivalence"]);
    assert_eq!(code(&o), 3);
    let r = json(&o);
    assert_eq!(check(&r, "comparability")["status"], "skipped");
    assert_eq!(check(&r, "equivalence")["status"], "skipped");
    assert!(check(&r, "comparability")["detail"].as_str().unwrap().contains("well-behaved"));
}

#[test]
fn oscillatory_suite_writes_transform_samples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["verify", "-f", "|x1|^2 + |x2|^2", "--rho", "9/10", "--suite", "oscillatory", "--out", out]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let slope = check(&r, "oscillatory/axis1")["measured"]["slope"].as_f64().unwrap();
    assert!((slope + 0.2).abs() <= 0.15, "{slope}");
    for axis in [1, 2] {
        let mut rows = csv::Reader::from_path(dir.path().join(format!("transform_rho9_10_axis{axis}.csv"))).unwrap();
        assert_eq!(rows.headers().unwrap(), vec!["lambda1", "lambda2", "re", "im", "abs", "predicted_envelope"]);
        assert_eq!(rows.records().count(), 6);
    }
}

#[test]
fn reports_do_not_depend_on_the_thread_count() {
    let args = ["verify", "-f", "x1^3 + x1*x2^2", "--rho", "1/2", "--suite", "comparability", "--suite", "equivalence"];
    let one = run_with_threads(&args, Some("1"));
    let four = run_with_threads(&args, Some("4"));
    let default = run(&args);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, default.stdout);
}

#[test]
fn seeds_change_only_the_sampled_suite() {
    let base = ["verify", "-f", "x1^3 + x1*x2^2", "--suite", "equivalence"];
    let a = json(&run(&[&base[..], &["--seed", "1"]].concat()));
    let b = json(&run(&[&base[..], &["--seed", "2"]].concat()));
    assert_eq!(a["seed"], 1);
    assert_ne!(check(&a, "equivalence")["measured"], check(&b, "equivalence")["measured"]);
    assert_eq!(check(&a, "equivalence")["status"], check(&b, "equivalence")["status"]);
}

#[test]
fn in_process_entry_point_matches_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a");
    let code = newton_decay::cli::main_with_args([
        "newton-decay",
        "analyze",
        "-f",
        "x1^3 + x2^2",
        "--rho",
        "1/2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 3);
    let written = std::fs::read(Path::new(&out).join("report.json")).unwrap();
    assert_eq!(written, run(&["analyze", "-f", "x1^3 + x2^2", "--rho", "1/2"]).stdout);
}

#[test]
fn analysis_of_32_terms_is_fast() {
    use newton_decay_core::{rational, MonomialTerm, TermSum};
    let terms: Vec<MonomialTerm> = (0u32..64)
        .map(|i| (i % 8, i / 8))
        .filter(|&(a, b)| (a + b) % 2 == 1)
        .map(|(a, b)| {
            let c = if (a * b) % 3 == 0 { -(i64::from(a) + 1) } else { i64::from(b) + 1 };
            MonomialTerm::new(rational::int(c), a, b)
        })
        .collect();
    assert_eq!(terms.len(), 32);
    let f = TermSum::new(terms).unwrap();
    let rhos: Vec<_> = [(1, 4), (1, 2), (1, 1), (3, 1)].iter().map(|&(n, d)| rational::ratio(n, d)).collect();
    let start = std::time::Instant::now();
    let report = newton_decay::report::AnalysisReport::new(&f, &rhos).unwrap();
    assert!(start.elapsed() < std::time::Duration::from_secs(1), "{:?}", start.elapsed());
    assert_eq!(report.rho.len(), 4);
}
