use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use curvhom::cli::render::polyline_coordinates;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_curvhom"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn product_check_reports_signature() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "spec.toml", "[metric]\nf = \"0\"\nh = \"0\"\n");
    let out = run(&["check", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert_eq!(v["passed"], true);
    for p in v["curvature"].as_array().unwrap() {
        let e: Vec<f64> = p["eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert!((e[0] + 1.0).abs() < 1e-6 && (e[1] + 1.0).abs() < 1e-6 && e[2].abs() < 1e-6);
    }
    assert_eq!(v["classify"]["complete"], true);
    assert_eq!(v["classify"]["locally_irreducible"], false);
}

#[test]
fn steep_h_fails_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "steep.toml", "[metric]\nf = \"1\"\nh = \"1.5*1\"\n");
    let out = run(&["check", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["classify"]["complete"], false);
    assert_eq!(v["checks"]["completeness"]["status"], "fail");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.toml", "[metric]\nf = \"sin(\"\nh = \"0\"\n");
    let out = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("syntax error"));
    let missing = dir.path().join("missing.toml");
    assert_eq!(run(&["check", missing.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["gallery", "nope"]).status.code(), Some(2));
}

#[test]
fn lyndon_subcommand() {
    let out = run(&["lyndon", "--max-len", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 violations"));
    let left = run(&["lyndon", "--max-len", "3", "--convention", "left"]);
    assert_eq!(left.status.code(), Some(0));
    let guarded = run(&["lyndon", "--max-len", "9"]);
    assert_eq!(guarded.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&guarded.stderr).contains("exceeds the cap"));
}

#[test]
fn ainv_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sine.toml", "[metric]\nf = \"sin(x)\"\nh = \"0\"\n");
    let out = run(&["ainv", cfg.to_str().unwrap(), "--from", "0", "--to", "3.141592653589793"]);
    assert_eq!(out.status.code(), Some(0));
    let a: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((a - 2.0).abs() < 1e-8);
    let neg = run(&["ainv", cfg.to_str().unwrap(), "--from", "-3.141592653589793", "--to", "0"]);
    let b: f64 = String::from_utf8_lossy(&neg.stdout).trim().parse().unwrap();
    assert!((b - 2.0).abs() < 1e-8);
}

#[test]
fn curve_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "horo.toml",
        "[metric]\nf = \"1\"\nh = \"1\"\n[curve]\nt_range = [0.0, 1.0]\nstep = 1e-3\n",
    );
    let csv = dir.path().join("curve.csv");
    let out = run(&["curve", cfg.to_str().unwrap(), "-o", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x,y,tx,ty"));
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 5);
        assert!((cols[2] - 1.0).abs() < 1e-6);
    }
}

#[test]
fn foliate_svg_structure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p.toml", "[metric]\nf = \"0\"\nh = \"0\"\n[render]\nleaf_count = 9\n");
    let out = run(&["foliate", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let svg = String::from_utf8(out.stdout).unwrap();
    assert_eq!(svg.matches("<circle").count(), 1);
    assert_eq!(svg.matches("<polyline").count(), 10);
}

#[test]
fn gallery_entries_pass_check() {
    for name in ["product", "horocycle", "piecewise_pm1", "cantor", "sine"] {
        let out = run(&["gallery", name]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json_of(&out);
        let skipped = v["skipped_points"].as_u64().unwrap();
        let listed = v["curvature"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|p| p["skipped"] == "near-nonsmooth")
            .count() as u64;
        assert_eq!(skipped, listed, "{name}");
    }
    let list = run(&["gallery", "--list"]);
    assert_eq!(String::from_utf8_lossy(&list.stdout).lines().count(), 5);
}

#[test]
fn gallery_foliations() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["product", "cantor"] {
        let path = dir.path().join(format!("{name}.svg"));
        let out = run(&["gallery", name, "--foliate", "-o", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let svg = std::fs::read_to_string(&path).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert_eq!(svg.matches("<polyline").count(), 42);
        let lines = polyline_coordinates(&svg);
        for l in &lines {
            assert!(l.iter().all(|(x, y)| x.hypot(*y) < 1.0), "{name}");
        }
        // the curve is drawn last
        let curve = lines.last().unwrap();
        let gap = curve
            .windows(2)
            .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
            .fold(0.0, f64::max);
        assert!(gap < 0.05, "{name}: gap {gap}");
    }
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "pw.toml",
        "[metric]\nf = \"builtin:flat_exp()\"\nh = \"builtin:step_pm1()\"\nnonsmooth = [0.0]\n[check]\npoints = [[0.001, 0.5, 0.0], [1.0, 0.5, 0.3]]\n",
    );
    let a = run(&["check", cfg.to_str().unwrap()]);
    let b = run(&["check", cfg.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["skipped_points"], 1);
    let f1 = run(&["foliate", cfg.to_str().unwrap()]);
    let f2 = run(&["foliate", cfg.to_str().unwrap()]);
    assert_eq!(f1.stdout, f2.stdout);
}

#[test]
fn in_process_runner_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = curvhom::cli::run_with(["curvhom", "lyndon", "--max-len", "2"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(out, run(&["lyndon", "--max-len", "2"]).stdout);
}
