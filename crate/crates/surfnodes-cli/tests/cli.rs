//! End-to-end tests of the `surfnodes` binary: documented example runs,
//! output formats, determinism, and flag validation.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_surfnodes"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed:\n{}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Parses a nodes.csv into (header, rows of floats).
fn read_nodes(dir: &Path) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(dir.join("nodes.csv")).expect("nodes.csv exists");
    let mut lines = text.lines();
    let header = lines.next().expect("header line").to_string();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse::<f64>().expect("float cell")).collect())
        .collect();
    (header, rows)
}

#[test]
fn generate_circle_matches_the_documented_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&["generate", "--surface", "circle", "--h", "0.1", "--seed", "1", "--out", out]);
    let (header, rows) = read_nodes(dir.path());
    assert_eq!(header, "x0,x1,xi0,h");
    assert!(
        (61..=65).contains(&rows.len()),
        "circle at h=0.1 should close with 61–65 nodes, got {}",
        rows.len()
    );
    // Every point sits on the unit circle and carries the requested spacing.
    for row in &rows {
        let r = (row[0] * row[0] + row[1] * row[1]).sqrt();
        assert!((r - 1.0).abs() < 1e-12);
        assert_eq!(row[3], 0.1);
    }
}

#[test]
fn supersampled_heart_respects_the_requested_separation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&[
        "generate", "--surface", "heart", "--alg", "sd", "--h", "0.05", "--tau", "5",
        "--seed", "3", "--out", out,
    ]);
    let (_, rows) = read_nodes(dir.path());
    assert!(rows.len() > 1000, "expected a dense set, got {}", rows.len());
    let pts: Vec<[f64; 3]> = rows.iter().map(|r| [r[0], r[1], r[2]]).collect();
    let mut min_sq = f64::INFINITY;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d = (0..3).map(|k| (pts[i][k] - pts[j][k]).powi(2)).sum::<f64>();
            min_sq = min_sq.min(d);
        }
    }
    assert!(
        min_sq.sqrt() >= 0.05,
        "pairwise distance {} under the requested 0.05",
        min_sq.sqrt()
    );
}

#[test]
fn identical_seeds_give_byte_identical_output() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        run_ok(&[
            "generate", "--surface", "torus", "--h", "0.2", "--seed", "9",
            "--out", dir.path().to_str().unwrap(),
        ]);
    }
    let bytes_a = std::fs::read(a.path().join("nodes.csv")).unwrap();
    let bytes_b = std::fs::read(b.path().join("nodes.csv")).unwrap();
    assert_eq!(bytes_a, bytes_b);
}

#[test]
fn replay_reproduces_a_run_from_its_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&["generate", "--surface", "heart", "--h", "0.1", "--seed", "5", "--out", out]);
    let manifest = dir.path().join("manifest.json");
    let replay = run_ok(&["replay", manifest.to_str().unwrap()]);
    let stdout = String::from_utf8_lossy(&replay.stdout);
    assert!(stdout.contains("match    nodes.csv"), "unexpected replay output:\n{stdout}");
}

#[test]
fn compare_writes_reports_and_orders_the_samplers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&[
        "compare", "--surface", "polar_curve", "--alg", "pa,sd,na", "--h", "0.02",
        "--seed", "1", "--out", out,
    ]);
    for name in [
        "compare.json", "hist_pa.csv", "hist_sd.csv", "hist_na.csv", "series_pa.csv",
        "series_sd.csv", "series_na.csv", "manifest.json",
    ] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("compare.json")).unwrap()).unwrap();
    let reports = json.as_array().unwrap();
    assert_eq!(reports.len(), 3);
    let std_of = |alg: &str| -> f64 {
        reports
            .iter()
            .find(|r| r["algorithm"] == alg)
            .unwrap()["metrics"]["std_d_norm"]
            .as_f64()
            .unwrap()
    };
    assert!(std_of("pa") < std_of("sd"));
    assert!(std_of("sd") < std_of("na"));

    // Histogram rows are (bin_left, bin_right, count) with contiguous edges.
    let hist = std::fs::read_to_string(dir.path().join("hist_pa.csv")).unwrap();
    let mut lines = hist.lines();
    assert_eq!(lines.next().unwrap(), "bin_left,bin_right,count");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 32);
    for pair in rows.windows(2) {
        assert_eq!(pair[0][1], pair[1][0]);
    }
}

#[test]
fn compare_rejects_a_single_algorithm() {
    let out = run(&["compare", "--surface", "circle", "--alg", "pa", "--h", "0.1", "--out", "x"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least two"));
}

#[test]
fn bench_flags_a_short_sweep_as_unreliable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&[
        "bench", "--surface", "circle", "--alg", "pa", "--h", "0.1,0.05", "--reps", "2",
        "--seed", "2", "--out", out,
    ]);
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("bench.json")).unwrap()).unwrap();
    // 0.1 → 0.05 spans only a factor two in node count: under one decade.
    assert_eq!(json["slope_reliable"], serde_json::Value::Bool(false));
    assert!(json["decades"].as_f64().unwrap() < 1.0);
    let csv = std::fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "h,node_count");
    assert_eq!(lines.count(), 2);
}

#[test]
fn bounds_writes_conformance_rows_per_h() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&[
        "bounds", "--surface", "torus", "--h", "0.2,0.1", "--seed", "7", "--out", out,
    ]);
    let csv = std::fs::read_to_string(dir.path().join("conformance.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "h,r_min_over_h,bound_over_h");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    for row in &rows {
        // Spacing conformance: normalized minimum distance above the bound.
        assert!(row[1] >= row[2], "row {row:?} violates the lower bound");
    }
}

#[test]
fn bounds_needs_analytic_second_derivatives() {
    let out = run(&["bounds", "--surface", "heart", "--h", "0.1", "--out", "x"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Hessian"));
}

#[test]
fn altitude_grid_drives_a_variable_spacing_run() {
    let dir = tempfile::tempdir().unwrap();
    let topo = dir.path().join("topo.csv");
    // Two latitude bands: low altitude south, high altitude north.
    std::fs::write(
        &topo,
        "nlat,nlon,lat0,lon0,dlat,dlon\n2,2,-90,0,180,180\n0,0\n100,100\n",
    )
    .unwrap();
    let out_dir = dir.path().join("run");
    run_ok(&[
        "generate", "--surface", "sphere", "--h-grid", topo.to_str().unwrap(),
        "--h-min", "0.1", "--h-max", "0.4", "--seed", "2",
        "--out", out_dir.to_str().unwrap(),
    ]);
    let (header, rows) = read_nodes(&out_dir);
    assert_eq!(header, "x0,x1,x2,xi0,xi1,h");
    let south: Vec<&Vec<f64>> = rows.iter().filter(|r| r[2] < -0.5).collect();
    let north: Vec<&Vec<f64>> = rows.iter().filter(|r| r[2] > 0.5).collect();
    assert!(!south.is_empty() && !north.is_empty());
    // All spacings in range, and the low-altitude south is denser.
    for r in &rows {
        assert!((0.1..=0.4).contains(&r[5]), "h {} out of range", r[5]);
    }
    let mean = |v: &[&Vec<f64>]| v.iter().map(|r| r[5]).sum::<f64>() / v.len() as f64;
    assert!(mean(&south) < mean(&north));
    assert!(south.len() > north.len());
}

#[test]
fn start_flag_pins_the_first_node() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&[
        "generate", "--surface", "circle", "--h", "0.1", "--start", "3.0", "--out", out,
    ]);
    let (_, rows) = read_nodes(dir.path());
    assert_eq!(rows[0][2], 3.0);
}

#[test]
fn conflicting_spacing_flags_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let topo = dir.path().join("topo.csv");
    std::fs::write(&topo, "nlat,nlon,lat0,lon0,dlat,dlon\n1,1,0,0,1,1\n5\n").unwrap();
    let out = run(&[
        "generate", "--surface", "sphere", "--h", "0.1", "--h-grid", topo.to_str().unwrap(),
        "--out", "x",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not both"));

    let out = run(&[
        "compare", "--surface", "sphere", "--alg", "pa,sd", "--h-grid", topo.to_str().unwrap(),
        "--out", "x",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("only supported by generate"));
}

#[test]
fn unknown_names_fail_cleanly() {
    let out = run(&["generate", "--surface", "klein", "--h", "0.1", "--out", "x"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown surface"));

    let out = run(&["generate", "--surface", "circle", "--alg", "xx", "--h", "0.1", "--out", "x"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown algorithm"));
}
