use std::process::{Command, Output};

use qseries::{poch_infinite, ComplexScalar, ProductConfig, QBase};

fn qseries(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qseries"))
        .args(args)
        .env("QSERIES_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, name: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(name))
        .unwrap_or_else(|| panic!("no {name} in {text}"))
        .trim()
}

#[test]
fn list_text() {
    let out = qseries(&["list"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 16);
    let bailey = text.lines().find(|l| l.starts_with("bailey_6psi6 ")).unwrap();
    assert!(bailey.contains("II. 33"), "{bailey}");
}

#[test]
fn list_json() {
    let out = qseries(&["list", "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 16);
    for e in entries {
        for key in ["id", "name", "slots", "constraint", "citation"] {
            assert!(e.get(key).is_some(), "{key} missing in {e}");
        }
    }
}

#[test]
fn verify_passes() {
    let out = qseries(&["verify", "--identity", "ramanujan_1psi1", "--samples", "100", "--seed", "42"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(field(&stdout(&out), "failed"), "0");
}

#[test]
fn verify_unknown_identity() {
    assert_eq!(code(&qseries(&["verify", "--identity", "nosuch"])), 2);
}

#[test]
fn verify_exhausted_sampler() {
    // margin 2.5 needs |z| < e^-2.5, below the smallest sampled modulus
    let out = qseries(&[
        "verify", "--identity", "ramanujan_1psi1", "--samples", "1", "--margin", "2.5",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn verify_bad_q_range() {
    let out = qseries(&["verify", "--identity", "cor4", "--q-max", "1.2"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = qseries(&[
        "verify",
        "--identity",
        "thm3_8psi8_three_term",
        "--samples",
        "50",
        "--json",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let obj = v.as_object().unwrap();
    let mut keys: Vec<_> = obj.keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, ["config", "identity_id", "samples", "seed", "summary"]);
    assert_eq!(v["samples"].as_array().unwrap().len(), 50);
    let summary = &v["summary"];
    assert_eq!(
        summary["accepted"].as_u64().unwrap() + summary["failed"].as_u64().unwrap(),
        50
    );
    for s in v["samples"].as_array().unwrap() {
        assert_eq!(s["lhs"].as_array().unwrap().len(), 2);
        assert!(s["rel_residual"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn verify_json_to_stdout_is_pure() {
    let out = qseries(&["verify", "--identity", "cor5", "--samples", "3", "--json", "-"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["identity_id"], "cor5");
}

#[test]
fn verify_failures_exit_one() {
    // q this close to 1 exhausts the product factor budget
    let out = qseries(&[
        "verify", "--identity", "bailey_6psi6", "--samples", "2", "--q-min", "0.9999", "--q-max",
        "0.9999",
    ]);
    assert_eq!(code(&out), 1, "{}", stdout(&out));
    assert!(stdout(&out).contains("failed sample 0"));
}

#[test]
fn eval_matches_q_binomial() {
    let out = qseries(&["eval", "--kind", "phi", "--num", "0.3", "--den", "", "--q", "0.4", "--z", "0.5"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let value: Vec<f64> = field(&text, "value")
        .trim_end_matches('i')
        .split_whitespace()
        .map(|s| s.parse().unwrap())
        .collect();
    let q = QBase::real(0.4).unwrap();
    let cfg = ProductConfig::default();
    let expect = poch_infinite(ComplexScalar::new(0.15, 0.0), q, &cfg).unwrap().value
        / poch_infinite(ComplexScalar::new(0.5, 0.0), q, &cfg).unwrap().value;
    let got = ComplexScalar::new(value[0], value[1]);
    assert!((got - expect).norm() <= 1e-13 * expect.norm(), "{got} vs {expect}");
    assert_eq!(field(&text, "status"), "converged");
    // 17 significant digits
    assert_eq!(field(&text, "err").split('e').next().unwrap().len(), 18);
}

#[test]
fn eval_psi_at_zero_argument_diverges() {
    let out = qseries(&["eval", "--kind", "psi", "--num", "0.5", "--den", "0.3", "--q", "0.4", "--z", "0"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn eval_pole_and_budget() {
    let pole = qseries(&["eval", "--kind", "phi", "--num", "0.5", "--den", "2", "--q", "0.5", "--z", "0.3"]);
    assert_eq!(code(&pole), 5, "{}", stdout(&pole));
    let budget = qseries(&[
        "eval", "--kind", "phi", "--num", "0.5,0.2", "--den", "0.3", "--q", "0.5", "--z", "0.97",
    ]);
    assert_eq!(code(&budget), 5, "{}", stdout(&budget));
}

#[test]
fn eval_complex_and_negative_literals() {
    let out = qseries(&["eval", "--kind", "phi", "--num", "-0.3+2i", "--q", "0.4", "--z", "-0.5i"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn eval_parse_and_domain_errors() {
    let base = ["eval", "--kind", "phi", "--num", "0.3", "--den", ""];
    let with = |extra: &[&str]| {
        let args: Vec<&str> = base.iter().chain(extra).copied().collect();
        code(&qseries(&args))
    };
    assert_eq!(with(&["--q", "1.5", "--z", "0.5"]), 2);
    assert_eq!(with(&["--q", "0.4", "--z", "0.5x"]), 2);
    assert_eq!(with(&["--q", "0.4", "--z", "0.5", "--tol", "-1"]), 2);
    assert_eq!(code(&qseries(&["eval", "--kind", "chi", "--q", "0.4", "--z", "0.5"])), 2);
}

#[test]
fn unknown_flags_are_errors() {
    assert_eq!(code(&qseries(&["list", "--verbose"])), 2);
    assert_eq!(code(&qseries(&["frobnicate"])), 2);
}

#[test]
fn check_all_lines_and_determinism() {
    let first = qseries(&["check-all", "--samples", "25", "--seed", "7"]);
    assert_eq!(code(&first), 0, "{}", stdout(&first));
    assert_eq!(stdout(&first).lines().count(), 16 + 12 + 1);
    let second = qseries(&["check-all", "--samples", "25", "--seed", "7"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn check_all_rejects_zero_samples() {
    assert_eq!(code(&qseries(&["check-all", "--samples", "0"])), 2);
}
