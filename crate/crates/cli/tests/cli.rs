use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orthoieq"))
        .args(args)
        .env_remove("ORTHOIEQ_PRECISION")
        .output()
        .expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("json line"))
        .collect()
}

fn re(v: &Value) -> f64 {
    match &v["re"] {
        Value::String(s) => s.parse().unwrap(),
        _ => v["num"].as_str().unwrap().parse::<f64>().unwrap() / v["den"].as_str().unwrap().parse::<f64>().unwrap(),
    }
}

fn im(v: &Value) -> f64 {
    v["im"].as_str().map_or(0.0, |s| s.parse().unwrap())
}

#[test]
fn laguerre_moments() {
    let out = run(&["moments", "--preset", "laguerre", "--gamma", "1", "--count", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = &records(&out)[0]["values"];
    let got: Vec<f64> = v.as_array().unwrap().iter().map(re).collect();
    assert_eq!(got, vec![1.0, 1.0, 2.0, 6.0, 24.0]);
}

#[test]
fn exact_moments_are_rationals() {
    let out = run(&[
        "--mode",
        "exact",
        "moments",
        "--preset",
        "jacobi-add",
        "--p",
        "3",
        "--q",
        "2",
        "--count",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = &records(&out)[0]["values"];
    assert_eq!(v[0], serde_json::json!({"num": "1", "den": "1"}));
    assert!(v[1].get("num").is_some());
}

#[test]
fn contour_moments() {
    let out = run(&["moments", "--contour", "--winding", "0", "--count", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = records(&out)[0]["values"].as_array().unwrap().clone();
    let two_over_pi = 2.0 / std::f64::consts::PI;
    assert!((re(&v[0]) - 1.0).abs() < 1e-15 && im(&v[0]) == 0.0);
    assert!(re(&v[1]).abs() < 1e-15 && (im(&v[1]) + two_over_pi).abs() < 1e-15);
    assert!(re(&v[2]).abs() < 1e-15 && im(&v[2]).abs() < 1e-15);
    assert!((im(&v[3]) + two_over_pi / 3.0).abs() < 1e-15);
}

#[test]
fn expression_moments_match_gamma_values() {
    let out = run(&["moments", "--expr", "exp(-x)", "--interval", "0", "inf", "--count", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let rec = &records(&out)[0];
    assert_eq!(rec["source"], "quadrature");
    // compare at full precision through the decimal strings
    for (k, want) in ["1", "1", "2"].iter().enumerate() {
        let s = rec["values"][k]["re"].as_str().unwrap();
        let got = rug::Float::with_val(200, rug::Float::parse(s).unwrap());
        let want = rug::Float::with_val(200, rug::Float::parse(want).unwrap());
        assert!(rug::Float::with_val(200, got - want).abs() < 1e-40, "m_{k} = {s}");
    }
}

#[test]
fn laguerre_degree_one() {
    let out = run(&["poly", "--preset", "laguerre", "--gamma", "1", "-n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let rec = &records(&out)[0];
    let c: Vec<f64> = rec["coeffs"].as_array().unwrap().iter().map(re).collect();
    assert_eq!(c, vec![2.0, -1.0]);
    assert_eq!(re(&rec["normalization"]), 2.0);
    assert_eq!(rec["verification"]["pass"], true);
    assert_eq!(rec["hankel_valid"], true);
}

#[test]
fn contour_degree_two() {
    let out = run(&["poly", "--contour", "--winding", "0", "-n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let rec = &records(&out)[0];
    let c: Vec<f64> = rec["coeffs"].as_array().unwrap().iter().map(re).collect();
    assert!((c[0] - 1.0).abs() < 1e-15 && c[1].abs() < 1e-15 && (c[2] + 3.0).abs() < 1e-15);
    assert_eq!(rec["verification"]["pass"], true);

    // the moments carry a factor 1/pi, so there is no rational form
    let out = run(&["--mode", "exact", "poly", "--contour", "-n", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shift_agrees_with_multiplicative() {
    // at n = 1 both systems force the x coefficient to zero, so neither has a solution
    let shift = run(&[
        "poly",
        "--preset",
        "laguerre",
        "--gamma",
        "1",
        "-n",
        "1",
        "--variant",
        "shift",
        "--a",
        "1",
        "--b",
        "-1",
    ]);
    let mult = run(&[
        "poly",
        "--preset",
        "laguerre",
        "--gamma",
        "1",
        "-n",
        "1",
        "--variant",
        "multiplicative",
    ]);
    assert_eq!(shift.status.code(), Some(3));
    assert_eq!(mult.status.code(), Some(3));

    let base = ["poly", "--preset", "laguerre", "--gamma", "2", "-n", "2"];
    let shift = run(&[&base[..], &["--variant", "shift", "--a", "1", "--b", "-1"]].concat());
    let mult = run(&[&base[..], &["--variant", "multiplicative"]].concat());
    assert_eq!(shift.status.code(), Some(0));
    let a: Vec<f64> = records(&shift)[0]["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(re)
        .collect();
    let b: Vec<f64> = records(&mult)[0]["coeffs"].as_array().unwrap().iter().map(re).collect();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{a:?} vs {b:?}");
    }
}

#[test]
fn verify_round_trip_and_perturbation() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "poly",
        "--preset",
        "jacobi-add",
        "--p",
        "3",
        "--q",
        "2",
        "-n",
        "1",
        "--to",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let good = dir.path().join("good.jsonl");
    std::fs::write(&good, &out.stdout).unwrap();
    let args = ["verify", "--preset", "jacobi-add", "--p", "3", "--q", "2", "--poly"];
    let checked = run(&[&args[..], &[good.to_str().unwrap()]].concat());
    assert_eq!(checked.status.code(), Some(0));
    let reports = records(&checked);
    assert_eq!(reports.len(), 4);
    assert!(reports.iter().all(|r| r["pass"] == true));

    let mut recs = records(&out);
    recs[2]["coeffs"][0]["re"] = Value::String("0.125".into());
    let text: String = recs.iter().map(|r| format!("{r}\n")).collect();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, text).unwrap();
    let checked = run(&[&args[..], &[bad.to_str().unwrap()]].concat());
    assert_eq!(checked.status.code(), Some(4));
    let reports = records(&checked);
    assert_eq!(reports[2]["pass"], false);
    assert!(reports[2]["max_residual"].as_str().unwrap().parse::<f64>().unwrap() > 0.0);
    assert_eq!(reports[1]["pass"], true);
}

#[test]
fn explicit_samples() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.json");
    std::fs::write(
        &file,
        r#"{"coeffs": [{"num": "2", "den": "1"}, {"num": "-1", "den": "1"}]}"#,
    )
    .unwrap();
    let out = run(&[
        "--mode",
        "exact",
        "verify",
        "--preset",
        "laguerre",
        "--gamma",
        "1",
        "--poly",
        file.to_str().unwrap(),
        "--samples",
        "0,1/2,-3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rec = &records(&out)[0];
    assert_eq!(rec["samples"].as_array().unwrap().len(), 3);
    assert_eq!(rec["exact"], true);
}

#[test]
fn enumeration_table() {
    let out = run(&[
        "verify",
        "--preset",
        "uniform",
        "--variant",
        "multiplicative",
        "--enumerate",
        "-n",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    let rows: Vec<_> = recs.iter().filter(|r| r["kind"] == "pattern").collect();
    assert_eq!(rows.len(), 8);
    let summary = recs.last().unwrap();
    assert_eq!(summary["kind"], "enumeration");
    assert_eq!(summary["patterns"], 8);

    let too_big = run(&[
        "poly",
        "--preset",
        "uniform",
        "--variant",
        "multiplicative",
        "--enumerate",
        "-n",
        "13",
        "--max-degree",
        "20",
    ]);
    assert_eq!(too_big.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["poly", "--preset", "laguerre"]).status.code(), Some(2));
    assert_eq!(run(&["poly", "--preset", "nosuch"]).status.code(), Some(2));
    assert_eq!(
        run(&["moments", "--expr", "exp(-x", "--interval", "0", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["poly", "--preset", "laguerre", "--gamma", "1", "-n", "11"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["--precision", "8", "moments", "--preset", "uniform"])
            .status
            .code(),
        Some(2)
    );
    // uniform weight on a symmetric interval has no odd-degree solution
    assert_eq!(run(&["poly", "--preset", "uniform", "-n", "1"]).status.code(), Some(3));
}

#[test]
fn output_is_deterministic() {
    let args = [
        "--seed",
        "7",
        "poly",
        "--expr",
        "exp(-x)*(1+x^2)",
        "--interval",
        "0",
        "2",
        "-n",
        "1",
        "--to",
        "3",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(records(&a).len(), 3);
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_orthoieq"))
        .args(["moments", "--preset", "uniform", "--count", "1"])
        .env("ORTHOIEQ_PRECISION", "20")
        .output()
        .unwrap();
    assert_eq!(records(&out)[0]["precision"], 20);
}

#[test]
fn csv_and_pretty() {
    let out = run(&[
        "--format", "csv", "moments", "--preset", "laguerre", "--gamma", "1", "--count", "3",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("n,re,im"));
    assert_eq!(text.lines().count(), 4);

    let out = run(&[
        "--format", "pretty", "poly", "--preset", "laguerre", "--gamma", "1", "-n", "1",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("P_1(x) = -1 x + 2\n"), "{text}");
}
