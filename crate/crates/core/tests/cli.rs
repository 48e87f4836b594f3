use std::path::Path;
use std::process::{Command, Output};

fn copt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_copt")).args(args).output().expect("spawn copt")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_column(text: &str, col: usize) -> Vec<f64> {
    text.lines().skip(1).map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn bounds_reproduce_the_sincos_column() {
    let o = copt(&["bounds", "--cost", "sincos", "--n", "2..7", "--mode", "midpoint", "--sense", "max"]);
    assert!(o.status.success());
    let expected = [0.1768, 0.2039, 0.2102, 0.2117, 0.2121, 0.2122];
    for (v, e) in csv_column(&stdout(&o), 1).iter().zip(expected) {
        assert!((v - e).abs() < 1e-3, "{} vs {}", v, e);
    }
}

#[test]
fn bounds_for_sinsin_are_one_half() {
    let o = copt(&["bounds", "--cost", "sinsin", "--n", "2..7", "--mode", "midpoint"]);
    let col = csv_column(&stdout(&o), 1);
    assert_eq!(col.len(), 6);
    assert!(col.iter().all(|v| (v - 0.5).abs() < 1e-9));
}

#[test]
fn bounds_for_an_expression_increase_toward_one_third() {
    let o = copt(&["bounds", "--expr", "x*y", "--n", "1..6", "--sense", "max", "--mode", "midpoint", "--format", "json"]);
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    let rows: Vec<f64> = v["rows"].as_array().unwrap().iter().map(|r| r["midpoint"].as_f64().unwrap()).collect();
    assert!(rows.windows(2).all(|w| w[0] < w[1]));
    assert!(rows.iter().all(|&r| r < 1.0 / 3.0));
    assert!(1.0 / 3.0 - rows[5] < 1e-4);
    assert!(v["rows"][0].get("lower").is_none());
}

#[test]
fn all_three_columns_by_default() {
    let o = copt(&["bounds", "--cost", "sincos", "--n", "3"]);
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "n,lower,midpoint,upper");
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|f| f.parse().unwrap()).collect();
    assert!(row[1] <= row[2] && row[2] <= row[3]);
}

#[test]
fn analytic_sine_is_certified() {
    let o = copt(&["analytic", "--cost", "sin_sum", "--certify-grid", "256"]);
    assert!(o.status.success());
    let v = json(&o);
    assert!((v["beta"].as_f64().unwrap() - 0.7541996008265638).abs() < 1e-12);
    assert_eq!(v["certified"], true);
    assert_eq!(v["certificate"]["pass"], true);
}

#[test]
fn analytic_custom_phi_and_monotone() {
    let o = copt(&["analytic", "--phi", "(z-1)^3 - z", "--inflection", "1"]);
    assert!(o.status.success());
    assert!((json(&o)["beta"].as_f64().unwrap() - 0.75).abs() < 1e-9);

    let o = copt(&["analytic", "--cost", "product", "--monotone"]);
    let v = json(&o);
    assert!((v["max"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-10);
    assert!((v["min"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-10);

    assert_eq!(copt(&["analytic", "--phi", "-(z-1)^2", "--inflection", "1"]).status.code(), Some(2));
    assert_eq!(copt(&["analytic", "--cost", "sincos", "--monotone"]).status.code(), Some(2));
}

#[test]
fn vdc_statistics_and_streams() {
    for (b, limit) in [("2", 0.5), ("3", 4.0 / 9.0)] {
        let o = copt(&["vdc", "--base", b, "--N", "100000", "--stat", "distance"]);
        assert!((csv_column(&stdout(&o), 2)[0] - limit).abs() < 1e-3);
    }
    let o = copt(&["vdc", "--base", "2", "--N", "10", "--emit", "pairs"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 11);
    assert_eq!(csv_column(&text, 0)[0], 0.5);
    assert_eq!(csv_column(&text, 1)[0], 0.25);
    let o = copt(&["vdc", "--base", "2", "--N", "2", "--emit", "values", "--start", "0"]);
    assert_eq!(csv_column(&stdout(&o), 1), vec![0.0, 0.5]);
    assert_eq!(copt(&["vdc", "--base", "0"]).status.code(), Some(2));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn check_exit_status_follows_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let diag = write(dir.path(), "diag.json", r#"{"schema":1,"n":2,"sigma":[1,2,3,4],"value":0}"#);
    let anti = write(dir.path(), "anti.json", r#"{"schema":1,"n":2,"sigma":[4,3,2,1],"value":0}"#);
    assert_eq!(copt(&["check", &diag, "--cost", "product", "--sense", "max"]).status.code(), Some(0));
    let o = copt(&["check", &anti, "--cost", "product", "--sense", "max"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["pass"], false);
    assert_eq!(copt(&["check", &anti, "--cost", "product", "--sense", "min"]).status.code(), Some(0));

    let csv = write(dir.path(), "pts.csv", "x,y\n0.1,0.1\n0.9,0.9\n");
    assert_eq!(copt(&["check", &csv, "--expr", "x*y"]).status.code(), Some(0));
    let bad = write(dir.path(), "bad.json", r#"{"schema":1,"n":1,"sigma":[1,1],"value":0}"#);
    assert_eq!(copt(&["check", &bad, "--cost", "product"]).status.code(), Some(2));
    assert_eq!(copt(&["check", "/nonexistent/file.json", "--cost", "product"]).status.code(), Some(2));
}

#[test]
fn grid_optimizer_output_passes_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sincos6.json");
    let p = path.to_str().unwrap();
    let o = copt(&["plot-support", "--cost", "sincos", "--n", "6", "--format", "json", "--output", p]);
    assert!(o.status.success());
    let o = copt(&["check", p, "--cost", "sincos", "--sense", "max", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(json(&o)["doubly_stochastic"]["pass"], true);
}

#[test]
fn plots_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    for p in [&a, &b] {
        assert!(copt(&["plot-support", "--cost", "sincos", "--n", "7", "--output", p.to_str().unwrap()]).status.success());
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(String::from_utf8(bytes).unwrap().matches("<circle").count(), 128);

    let r1 = copt(&["check", a.to_str().unwrap(), "--cost", "product"]);
    assert_eq!(r1.status.code(), Some(2), "an SVG is not a coupling file");
    let j1 = stdout(&copt(&["bounds", "--cost", "sin_recip_cos", "--n", "2..4", "--format", "json"]));
    let j2 = stdout(&copt(&["bounds", "--cost", "sin_recip_cos", "--n", "2..4", "--format", "json"]));
    assert_eq!(j1, j2);
}

#[test]
fn product_support_at_level_four_is_the_diagonal() {
    let o = copt(&["plot-support", "--cost", "product", "--n", "4", "--format", "csv"]);
    let text = stdout(&o);
    let xs = csv_column(&text, 0);
    let ys = csv_column(&text, 1);
    assert_eq!(xs.len(), 16);
    for (k, (x, y)) in xs.iter().zip(&ys).enumerate() {
        let c = (k as f64 + 0.5) / 16.0;
        assert_eq!((*x, *y), (c, c));
    }
}

#[test]
fn solve_lap_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.csv", "# cost\n4,1,3\n2,0,5\n3,2,2\n");
    let o = copt(&["solve-lap", &m]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["assignment"], serde_json::json!([2, 1, 3]));
    assert_eq!(v["value"], 5.0);
    assert_eq!(v["certificate"]["passed"], true);
    let o = copt(&["solve-lap", &m, "--sense", "max", "--brute-force"]);
    assert_eq!(json(&o)["value"], 11.0);
    let ragged = write(dir.path(), "r.csv", "1,2\n3\n");
    assert_eq!(copt(&["solve-lap", &ragged]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(copt(&[]).status.code(), Some(2));
    assert_eq!(copt(&["bounds", "--cost", "sincos"]).status.code(), Some(2));
    assert_eq!(copt(&["bounds", "--n", "2"]).status.code(), Some(2));
    assert_eq!(copt(&["bounds", "--cost", "sincos", "--n", "11"]).status.code(), Some(2));
    assert!(copt(&["--help"]).status.success());
}
