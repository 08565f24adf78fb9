//! End-to-end tests of the `qcdist` binary.

use std::process::{Command, Output};

use qcdist::bounds::{BoundCheck, Skip, Summary};
use qcdist::distortion::{eta, eta_log, lambda, phi, quasisymmetry_margin, schottky_psi, singular_value, Dilatation};
use qcdist::elliptic::{ellint_e, ellint_k, UnitRadius};
use qcdist::modulus::{m_function, mu, mu_inverse};

fn qcdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcdist")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qcdist(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn radius(r: f64) -> UnitRadius {
    UnitRadius::new(r).unwrap()
}

fn dil(k: f64) -> Dilatation {
    Dilatation::new(k).unwrap()
}

#[test]
fn eval_examples() {
    assert!(stdout(&["eval", "lambda", "--K", "2"]).starts_with("32.970562748"));
    assert!(stdout(&["eval", "mu", "--r", "0.70710678118654752"]).starts_with("1.570796326"));
    assert!(stdout(&["eval", "kp", "--p", "1"]).starts_with("0.707106781"));
}

#[test]
fn eval_json_matches_library_bit_for_bit() {
    let cases: Vec<(Vec<&str>, f64)> = vec![
        (vec!["K", "--r", "0.3"], ellint_k(radius(0.3)).unwrap()),
        (vec!["E", "--r", "0.3"], ellint_e(radius(0.3))),
        (vec!["mu", "--r", "0.3"], mu(radius(0.3)).unwrap()),
        (vec!["mu-inv", "--y", "2.5"], mu_inverse(2.5).unwrap().r()),
        (vec!["m", "--r", "0.3"], m_function(radius(0.3)).unwrap().value),
        (vec!["phi", "--K", "1.7", "--r", "0.3"], phi(dil(1.7), radius(0.3)).unwrap().r()),
        (vec!["lambda", "--K", "3.3"], lambda(dil(3.3)).unwrap()),
        (vec!["eta", "--K", "2.2", "--t", "0.7"], eta(dil(2.2), 0.7).unwrap()),
        (vec!["eta-log", "--K", "150", "--t", "5"], eta_log(dil(150.0), 5.0).unwrap()),
        (vec!["psi", "--a", "0.4", "--z", "0.25"], schottky_psi(0.4, 0.25).unwrap()),
        (vec!["kp", "--p", "7"], singular_value(7).unwrap().k_p.r()),
        (vec!["qs-margin", "--K", "1.001"], quasisymmetry_margin(dil(1.001)).unwrap()),
    ];
    for (args, expected) in cases {
        let mut full = vec!["eval"];
        full.extend(&args);
        full.extend(["--format", "json"]);
        let v = json(&full);
        let got = v["value"].as_f64().unwrap();
        assert_eq!(got.to_bits(), expected.to_bits(), "{args:?}: {got} vs {expected}");
        assert_eq!(v["function"], args[0]);
    }
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["table", "eta", "--K", "1:5:7", "--t", "0.01:100:9", "--log", "--format", "csv"][..],
        &["verify", "--K", "1:10:6", "--t", "0.1:10:4", "--format", "json", "--full"][..],
        &["constants"][..],
    ] {
        let a = qcdist(args);
        let b = qcdist(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn verify_output_independent_of_thread_count() {
    let args = ["verify", "--K", "1:20:8", "--t", "0.01:100:6", "--log", "--format", "csv"];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_qcdist"))
            .args(args)
            .env("QCDIST_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, run("3").stdout);
    assert_eq!(run("0").status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(qcdist(&["eval", "lambda", "--K", "-1"]).status.code(), Some(1));
    assert_eq!(qcdist(&["eval", "mu", "--r", "1"]).status.code(), Some(1));
    assert_eq!(qcdist(&["eval", "nope", "--K", "2"]).status.code(), Some(2));
    assert_eq!(qcdist(&["eval", "lambda"]).status.code(), Some(2));
    assert_eq!(qcdist(&["eval", "lambda", "--K", "2", "--t", "1"]).status.code(), Some(2));
    assert_eq!(qcdist(&["eval", "lambda", "--K", "2", "--digits", "18"]).status.code(), Some(2));
    assert_eq!(qcdist(&["table", "lambda", "--K", "1:2:0"]).status.code(), Some(2));
    assert_eq!(qcdist(&["verify", "--only", "no_such_family"]).status.code(), Some(2));
    assert_eq!(
        qcdist(&["eval", "lambda", "--K", "2", "--output", "/nonexistent/dir/out.txt"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn domain_errors_name_the_precondition() {
    let out = qcdist(&["eval", "eta", "--K", "2", "--t", "-1"]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8(out.stderr).unwrap();
    assert!(msg.contains("t = -1"), "{msg}");
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("qcdist-cli-test-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    assert!(stdout(&["table", "kp", "--p", "1:3", "--format", "csv", "--output", p]).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn digits_control_plain_output() {
    assert_eq!(stdout(&["eval", "lambda", "--K", "2", "--digits", "6"]).trim(), "32.9706");
    assert_eq!(stdout(&["eval", "kp", "--p", "1", "--digits", "3"]).trim(), "0.707");
}

#[test]
fn lambda_table_increases() {
    let text = stdout(&["table", "lambda", "--K", "1.1:3:20", "--format", "csv"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("K,lambda"));
    let values: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 20);
    assert!(values.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn singular_value_table_decreases() {
    let v = json(&["table", "kp", "--p", "1:9", "--format", "json"]);
    let values: Vec<f64> = v.as_array().unwrap().iter().map(|r| r["value"].as_f64().unwrap()).collect();
    assert_eq!(values.len(), 9);
    assert!(values.windows(2).all(|w| w[0] > w[1]));
    // Independent oracle: k₁ = 1/√2.
    assert!((values[0] - 0.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn eta_table_satisfies_the_exponential_bounds() {
    let v = json(&["table", "eta", "--K", "2", "--t", "0.1:10:10", "--format", "json"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 10);
    for row in rows {
        let (k, t, value) = (
            row["args"]["K"].as_f64().unwrap(),
            row["args"]["t"].as_f64().unwrap(),
            row["value"].as_f64().unwrap(),
        );
        // t e^{2(K−1)μ(r')} < η_K(t) < t e^{4(K−1)K(r)K'(r)/π}, r = √(t/(1+t)).
        let r = UnitRadius::from_ratio(t).unwrap();
        let mu_c = mu(r.complement()).unwrap();
        let kk = ellint_k(r).unwrap() * ellint_k(r.complement()).unwrap();
        assert!(t * (2.0 * (k - 1.0) * mu_c).exp() < value, "t = {t}");
        assert!(value < t * (4.0 * (k - 1.0) * kk / std::f64::consts::PI).exp(), "t = {t}");
    }
}

#[test]
fn verify_reports_sandwich_endpoints() {
    let text = stdout(&["verify", "--only", "lambda_sandwich", "--K", "1:1:1"]);
    assert!(text.contains("0.99999028"), "{text}");
    assert!(text.contains("1.00259224"), "{text}");
    assert!(text.contains("failed 0"));
}

#[test]
fn verify_json_round_trips_through_the_schema() {
    let v = json(&[
        "verify",
        "--K",
        "1:30:12",
        "--t",
        "0.001:1000:7",
        "--log",
        "--format",
        "json",
        "--full",
    ]);
    let summary: Summary = serde_json::from_value(v["summary"].clone()).unwrap();
    let checks: Vec<BoundCheck> = serde_json::from_value(v["checks"].clone()).unwrap();
    let failures: Vec<BoundCheck> = serde_json::from_value(v["failures"].clone()).unwrap();
    let skipped: Vec<Skip> = serde_json::from_value(v["skipped"].clone()).unwrap();
    assert_eq!(summary.total, checks.len());
    assert_eq!(summary.failed, failures.len());
    assert_eq!(summary.skipped, skipped.len());
    assert_eq!(summary.failed, 0);
    assert!(summary.families.iter().all(|f| f.points > 0 && !f.reference.is_empty()));
    let again = serde_json::json!({
        "summary": summary,
        "failures": failures,
        "skipped": skipped,
        "checks": checks,
    });
    assert_eq!(again, v);
}

#[test]
fn verify_csv_layout() {
    let text = stdout(&["verify", "--only", "lambda_exp", "--K", "1.5:3:4", "--format", "csv"]);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rows.headers().unwrap().iter().collect::<Vec<_>>(),
        ["name", "K", "t", "lhs", "rhs", "margin", "log_domain", "pass"]
    );
    let records: Vec<csv::StringRecord> = rows.records().map(Result::unwrap).collect();
    assert!(!records.is_empty());
    assert!(records.iter().all(|r| &r[7] == "true"));
}

#[test]
fn constants_table() {
    let text = stdout(&["constants"]);
    for name in ["a ", "c_sandwich", "f_one", "g5", "k0_linear"] {
        assert!(text.contains(name), "{name}");
    }
    let v = json(&["constants", "--format", "json"]);
    let rows = v.as_array().unwrap();
    assert!(rows.iter().all(|r| r["within_tolerance"] == true));
    let a = rows.iter().find(|r| r["name"] == "a").unwrap();
    assert!((a["value"].as_f64().unwrap() - 4.3768).abs() < 5e-4);
}
