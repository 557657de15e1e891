use std::process::{Command, Output};

use serde_json::Value;

fn cxgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cxgeom")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const FLAT: &[&str] = &["suite", "--model", "flat1", "--suite", "bilag,connection,cotangent", "--samples", "4"];

#[test]
fn passing_suite_exits_zero_with_report() {
    let out = cxgeom(FLAT);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], Value::Bool(true));
    assert_eq!(v["config"]["model"], "flat1");
    let records = v["records"].as_array().unwrap();
    assert!(records.iter().all(|r| r["anchor"].as_str().is_some_and(|a| !a.is_empty())));
    let names: Vec<&str> = records.iter().map(|r| r["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(records.iter().all(|r| r.get("wall_time_ms").is_none()));
}

#[test]
fn reports_are_byte_identical() {
    let a = cxgeom(FLAT);
    let b = cxgeom(FLAT);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn tolerance_override_fails_with_exit_one() {
    let out = cxgeom(&["suite", "--model", "cp1", "--suite", "connection", "--samples", "3", "--tol", "metricity=1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let rec = v["records"].as_array().unwrap().iter().find(|r| r["name"] == "metricity").unwrap();
    assert_eq!(rec["passed"], Value::Bool(false));
    assert!(rec["max_defect"].as_f64().unwrap() > 1e-30);
    assert!((rec["tolerance"].as_f64().unwrap() / 1e-30 - 1.0).abs() < 1e-12);
}

#[test]
fn configuration_and_domain_errors_exit_two() {
    for args in [
        &["suite", "--model", "nope"][..],
        &["suite", "--model", "flat1", "--suite", "bogus"],
        &["suite", "--model", "flat1", "--samples", "0"],
        &["suite", "--model", "flat1", "--tol", "metricity"],
        &["suite", "--model", "flat1", "--tol", "no-such-check=1"],
        &["christoffel", "--model", "cp1", "--at", "1,-1"],
        &["christoffel", "--model", "cp1", "--at", "1,x"],
        &["eh", "--at", "0.5"],
        &["geodesic", "--model", "cp1", "--start", "0,0", "--vel", "0"],
    ] {
        let out = cxgeom(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn christoffel_matches_closed_form() {
    let out = cxgeom(&["christoffel", "--model", "cp1", "--at", "0.5,0.2i"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let get = |a: usize, b: usize, c: usize| {
        let x = &v["gamma"][a][b][c];
        (x[0].as_f64().unwrap(), x[1].as_f64().unwrap())
    };
    // 1 + zw = 1 + 0.1i; Γᶻ_zz = −2w/(1+zw), Γʷ_ww = −2z/(1+zw)
    let s = (1.0f64, 0.1f64);
    let den = s.0 * s.0 + s.1 * s.1;
    let div = |(a, b): (f64, f64)| ((a * s.0 + b * s.1) / den, (b * s.0 - a * s.1) / den);
    let gz = div((0.0, -0.4));
    let gw = div((-1.0, 0.0));
    for (got, want) in [(get(0, 0, 0), gz), (get(1, 1, 1), gw)] {
        assert!((got.0 - want.0).abs() < 1e-14 && (got.1 - want.1).abs() < 1e-14, "{got:?} vs {want:?}");
    }
    assert_eq!(get(0, 1, 0), (0.0, 0.0));
}

#[test]
fn geodesic_csv_rows() {
    let out = cxgeom(&["geodesic", "--model", "cp1", "--start", "0.3,0.1i", "--vel", "0,0.2", "--t", "0.5", "--emit", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,Re z,Im z,Re w,Im w");
    assert_eq!(lines.len(), 1 + 501);
    assert_eq!(lines[1], "0,0.3,0,0,0.1");
    // vertical geodesics stay in their leaf
    for l in &lines[1..] {
        let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!((f[1], f[2]), (0.3, 0.0));
    }
}

#[test]
fn hh_and_eh_reports() {
    let out = cxgeom(&["hh", "--model", "cp1", "--at", "0.3,0.1i", "--report", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], Value::Bool(true));
    assert!(v["frame"]["eta"].is_array());
    let dj = v["records"].as_array().unwrap().iter().find(|r| r["name"] == "dωJ-nonzero").unwrap();
    assert!(dj["max_defect"].as_f64().unwrap() > 1e-2);

    let out = cxgeom(&["eh", "--at", "0.3,0.2i", "--report", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["pass"], Value::Bool(true));
}

#[test]
fn eh_grid_csv_to_file() {
    let path = std::env::temp_dir().join(format!("cxgeom-grid-{}.csv", std::process::id()));
    let out = cxgeom(&["eh", "--grid", "5", "--emit", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(text.lines().next(), Some("x,y,residual"));
    assert_eq!(text.lines().count(), 26);
    for l in text.lines().skip(1) {
        let r: f64 = l.rsplit(',').next().unwrap().parse().unwrap();
        assert!(r < 1e-10);
    }
}

#[test]
fn eval_prints_a_package_tensor() {
    let out = cxgeom(&["eval", "--model", "flat1", "--at", "0.3,0.1i", "--tensor", "omega"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["value"]["valence"], serde_json::json!(["Down", "Down"]));
    assert_eq!(v["value"]["coeffs"].as_array().unwrap().len(), 16);
    assert_eq!(cxgeom(&["eval", "--model", "flat1", "--at", "0,0", "--tensor", "nope"]).status.code(), Some(2));
}
