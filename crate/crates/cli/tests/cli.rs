use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_discspec")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn values(v: &Value) -> Vec<f64> {
    v["entries"].as_array().unwrap().iter().map(|e| e["value"].as_f64().unwrap()).collect()
}

#[test]
fn neumann_spectrum_starts_at_zero() {
    let v = json(&["spectrum", "--metric", "freitas:1e-3", "--bc", "neumann", "--m", "6"]);
    let first = &v["entries"][0];
    assert_eq!(first["value"].as_f64(), Some(0.0));
    assert_eq!((first["k"].as_u64(), first["j"].as_u64()), (Some(0), Some(1)));
    assert_eq!(v["bc"], "neumann");
    assert_eq!(v["grid"], 4096);
}

#[test]
fn flat_dirichlet_spectrum() {
    let v = json(&["spectrum", "--metric", "flat", "--bc", "dirichlet", "--m", "3"]);
    let got = values(&v);
    for (g, e) in got.iter().zip([5.78319, 14.68197, 14.68197]) {
        assert!((g / e - 1.0).abs() < 1e-5, "{got:?}");
    }
    assert_eq!(v["entries"][1]["multiplicity"], 2);
}

#[test]
fn strongly_peaked_spectrum_opens_with_invariant_values() {
    let v = json(&["spectrum", "--metric", "freitas:5e-5", "--bc", "dirichlet", "--m", "2"]);
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert!(entries.iter().all(|e| e["invariant"] == true));
}

#[test]
fn mode_listing_without_m() {
    let v = json(&["spectrum", "--metric", "flat", "--modes", "2", "--per-mode", "3", "--n", "512"]);
    // 3 entries for k = 0, 6 each for k = 1, 2
    assert_eq!(v["entries"].as_array().unwrap().len(), 15);
    assert_eq!(v["mode_cutoff"], 2);
    assert!(values(&v).windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn verify_exit_codes() {
    for delta in ["freitas:1e-3", "freitas:1"] {
        let out = run(&["verify", "--metric", delta]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["all_satisfied"], true);
        assert!(!v["records"].as_array().unwrap().is_empty());
    }
    assert_eq!(code(&["verify", "--metric", "freitas:abc"]), 2);
    assert_eq!(code(&["verify", "--metric", "freitas:0"]), 2);
    assert_eq!(code(&["verify", "--metric", "flat"]), 2);
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(code(&["spectrum", "--metric", "flat", "--m", "0"]), 2);
    assert_eq!(code(&["spectrum", "--metric", "flat", "--n", "8", "--m", "1"]), 2);
    assert_eq!(code(&["spectrum", "--metric", "flat", "--n", "64", "--m", "17"]), 2);
    assert_eq!(code(&["spectrum", "--metric", "cone:1", "--m", "1"]), 2);
    assert_eq!(code(&["spectrum", "--metric", "custom:/no/such/file.csv", "--m", "1"]), 2);
    assert_eq!(code(&["spectrum", "--bc", "neumann", "--m", "1"]), 2);
    assert_eq!(code(&["nodal", "--metric", "flat", "--j", "0"]), 2);
    assert_eq!(code(&["heat", "--metric", "flat", "--t-end", "-1"]), 2);
    assert_eq!(code(&["crossing", "--range", "1e-3"]), 2);
    assert_eq!(code(&["--threads", "0", "spectrum", "--metric", "flat", "--m", "1"]), 2);
    assert_eq!(code(&["spectrum", "--metric", "flat", "--m", "1", "--output", "/no/such/dir/out.json"]), 2);
}

#[test]
fn crossings() {
    let one = json(&["crossing", "--m", "1", "--bc", "dirichlet"]);
    assert!(one["delta"].as_f64().unwrap() >= 4.5167e-2);
    assert!(one["ratio"].as_f64().unwrap() >= 1.0);
    let two = json(&["crossing", "--m", "2", "--bc", "dirichlet"]);
    let delta = two["delta"].as_f64().unwrap();
    assert!(delta >= 8.07e-5, "{two}");
    assert_eq!(two["bracketed"], true);
    assert!((two["threshold"].as_f64().unwrap() / 8.0706e-5 - 1.0).abs() < 1e-4);
    assert!((two["ratio"].as_f64().unwrap() - delta / two["threshold"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn empty_crossing_range_is_a_numeric_error() {
    let out = run(&["crossing", "--m", "2", "--range", "1e-3:1e-4"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bracket"));
}

#[test]
fn second_neumann_eigenfunction_geometry() {
    let pair = ["--metric", "freitas:1e-3", "--bc", "neumann", "--k", "0", "--j", "2"];
    let nodal = json(&[&["nodal"], &pair[..]].concat());
    assert_eq!(nodal["radii"].as_array().unwrap().len(), 1);
    assert_eq!(nodal["touches_boundary"], false);
    assert_eq!(nodal["domain_count"], 2);
    let hs = json(&[&["hotspot"], &pair[..]].concat());
    assert_eq!(hs["argmax_r"].as_f64(), Some(0.0));
    assert_eq!(hs["interior_max"], true);
}

#[test]
fn flat_heat_hot_spot_reaches_boundary() {
    let out = run(&["heat", "--metric", "flat"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(reader.headers().unwrap(), vec!["t", "r", "theta", "max_value"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 41);
    let last = rows.last().unwrap();
    assert_eq!(last[0].parse::<f64>().unwrap(), 4.0);
    assert!(last[1].parse::<f64>().unwrap() >= 0.99);
}

#[test]
fn heat_methods_agree_on_the_trajectory() {
    let common =
        ["heat", "--metric", "freitas:0.1", "--n", "512", "--outputs", "5", "--t-end", "1", "--format", "json"];
    let spectral = json(&common);
    let cn = json(&[&common[..], &["--method", "cn", "--dt", "2e-3"]].concat());
    assert_eq!(cn["method"], "cn");
    assert!(cn["step_estimate"].as_f64().unwrap() < 1e-4);
    let (a, b) = (spectral["states"].as_array().unwrap(), cn["states"].as_array().unwrap());
    assert_eq!(a.len(), b.len());
    // t = 0 shows the truncated expansion itself, not the flow
    for (x, y) in a.iter().zip(b).skip(1) {
        assert!((x["max_value"].as_f64().unwrap() - y["max_value"].as_f64().unwrap()).abs() < 1e-4);
        assert!((x["r"].as_f64().unwrap() - y["r"].as_f64().unwrap()).abs() < 1e-2, "{x} {y}");
    }
}

#[test]
fn eigenfunction_csv_layout() {
    let out = run(&["eigenfunction", "--metric", "freitas:0.01", "--k", "1", "--j", "2", "--samples", "101"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,z,phi"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 101);
    assert_eq!((rows[0][0], rows[0][1], rows[0][2]), (0.0, 0.0, 0.0));
    assert_eq!((rows[100][0], rows[100][1]), (1.0, 1.0));
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1]));
    assert_eq!(rows.windows(2).filter(|w| w[0][2] * w[1][2] < 0.0).count(), 1);
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap()
}

#[test]
fn file_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["spectrum", "--metric", "freitas:1e-2", "--m", "8", "--n", "1024"],
        &["eigenfunction", "--metric", "freitas:1e-2", "--j", "3", "--n", "1024"],
        &["heat", "--metric", "freitas:1e-2", "--n", "512", "--outputs", "6", "--t-end", "0.5"],
        &["verify", "--metric", "freitas:1e-2", "--n", "1024", "--format", "csv"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let paths = [dir.path().join(format!("{i}a")), dir.path().join(format!("{i}b"))];
        for (p, threads) in paths.iter().zip(["1", "3"]) {
            let p = p.to_str().unwrap();
            assert_eq!(code(&[&["--threads", threads], *args, &["--output", p]].concat()), 0);
        }
        let (a, b) = (read(&paths[0]), read(&paths[1]));
        assert!(!a.is_empty());
        assert_eq!(a, b, "{args:?}");
    }
    // no temporary files left behind
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 8);
}

#[test]
fn csv_headers() {
    let text = |args: &[&str]| String::from_utf8(run(args).stdout).unwrap();
    let spectrum = text(&["spectrum", "--metric", "flat", "--m", "3", "--format", "csv"]);
    assert!(spectrum.starts_with("value,k,j,multiplicity,invariant\n"));
    let verify = text(&["verify", "--metric", "freitas:0.1", "--bc", "neumann", "--format", "csv"]);
    assert!(verify.starts_with("bc,kind,k,j,lhs,rhs,margin,satisfied\n"));
    let crossing = text(&["crossing", "--m", "2", "--format", "csv", "--tol", "1e-4"]);
    assert!(crossing.starts_with("m,bc,delta,threshold,ratio,bracketed,iterations,gap\n"));
}

#[test]
fn custom_density_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("density.csv");
    let delta = 0.05_f64;
    let alpha = 1.0 / (1.0 / delta).ln_1p();
    let rows: String = (0..=2000)
        .map(|i| {
            let r = i as f64 / 2000.0;
            format!("{r},{}\n", alpha / (r * r + delta))
        })
        .collect();
    std::fs::write(&path, format!("r,p\n{rows}")).unwrap();
    let metric = format!("custom:{}", path.display());
    let custom = values(&json(&["spectrum", "--metric", &metric, "--m", "4", "--n", "2048"]));
    let builtin = values(&json(&["spectrum", "--metric", "freitas:0.05", "--m", "4", "--n", "2048"]));
    for (c, b) in custom.iter().zip(&builtin) {
        assert!((c / b - 1.0).abs() < 1e-4, "{custom:?} vs {builtin:?}");
    }
}
