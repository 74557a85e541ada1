use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ctp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctp")).args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--out", dir.to_str().unwrap()]);
    ctp(&full)
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn read_csv(path: &Path) -> Csv {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect())
        .collect();
    Csv { header, rows }
}

fn column(csv: &Csv, name: &str) -> Vec<f64> {
    let i = csv.header.iter().position(|h| h == name).unwrap();
    csv.rows.iter().map(|r| r[i]).collect()
}

fn scale(csv: &Csv) -> f64 {
    column(csv, "direct").into_iter().fold(0.0, f64::max)
}

#[test]
fn exp1_has_interference() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["run", "--preset", "exp1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read_csv(&dir.path().join("pattern.csv"));
    assert_eq!(
        csv.header,
        ["x", "total", "direct", "interference_re", "interference_im", "slit1", "slit2"]
    );
    assert_eq!(csv.rows.len(), 64);
    let s = scale(&csv);
    let max = column(&csv, "interference_re").iter().map(|v| v.abs()).fold(0.0, f64::max);
    assert!(max > 1e-3 * s);
}

#[test]
fn exp2_has_no_interference() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["run", "--preset", "exp2"]);
    assert!(out.status.success());
    let csv = read_csv(&dir.path().join("pattern.csv"));
    let s = scale(&csv);
    for name in ["interference_re", "interference_im"] {
        assert!(column(&csv, name).iter().all(|v| v.abs() <= 1e-12 * s));
    }
    // Measuring slit 2 makes the pattern equal the classical baseline.
    let baseline = read_csv(&dir.path().join("baseline.csv"));
    assert_eq!(column(&csv, "total"), column(&baseline, "total"));
}

#[test]
fn baseline_is_sum_of_slits() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_in(dir.path(), &["run", "--preset", "nslit3m1"]).status.success());
    let csv = read_csv(&dir.path().join("baseline.csv"));
    let (a, b, c) = (column(&csv, "slit1"), column(&csv, "slit2"), column(&csv, "slit3"));
    for (i, total) in column(&csv, "total").iter().enumerate() {
        assert_eq!(*total, a[i] + b[i] + c[i]);
    }
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_in(dir.path(), &["run", "--preset", "nslit3m1"]).status.success());
    let csv = read_csv(&dir.path().join("pattern.csv"));
    let slit_cols: Vec<usize> = (5..csv.header.len()).collect();
    for row in &csv.rows {
        let direct: f64 = slit_cols.iter().map(|&i| row[i]).sum();
        assert_eq!(direct.to_bits(), row[2].to_bits());
        assert_eq!((row[2] + row[3]).to_bits(), row[1].to_bits());
    }
}

#[test]
fn json_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["run", "--preset", "exp1", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("pattern.json")).unwrap()).unwrap();
    let csv_dir = tempfile::tempdir().unwrap();
    assert!(run_in(csv_dir.path(), &["run", "--preset", "exp1"]).status.success());
    let csv = read_csv(&csv_dir.path().join("pattern.csv"));
    for (row, json) in csv.rows.iter().zip(doc["rows"].as_array().unwrap()) {
        let direct: f64 = json["slit_probs"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
        assert_eq!(direct.to_bits(), json["direct"].as_f64().unwrap().to_bits());
        assert_eq!(row[1].to_bits(), json["total"].as_f64().unwrap().to_bits());
    }
}

#[test]
fn identical_runs_give_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = run_in(dir.path(), &["run", "--preset", "exp1", "--samples", "5000", "--seed", "11"]);
        assert!(out.status.success());
    }
    for name in ["pattern.csv", "baseline.csv", "frequencies.json"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
    }
}

#[test]
fn frequency_report_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["run", "--preset", "exp1", "--samples", "20000", "--seed", "1"]);
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("frequencies.json")).unwrap()).unwrap();
    for field in ["n", "seed", "bins", "counts", "probs", "deviations", "bounds", "pass"] {
        assert!(doc.get(field).is_some(), "missing {field}");
    }
    let total: u64 = doc["counts"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(total, 20000);
}

#[test]
fn verify_axioms_passes() {
    let out = ctp(&["verify-axioms", "--omega-size", "200", "--trials", "1000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("axioms: pass"));
}

#[test]
fn capacity_guard_exit_code() {
    let out = ctp(&["verify-axioms", "--omega-size", "2000", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn invalid_config_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["run", "--preset", "nope"],
        vec!["run", "--preset", "exp1", "--measured", "3"],
        vec!["run", "--preset", "exp1", "--slits", "70"],
        vec!["run", "--preset", "exp1", "--alpha", "NaN"],
        vec!["density", "--preset", "exp1", "--t", "9"],
    ] {
        let out = run_in(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"lattice\": {}}").unwrap();
    assert_eq!(ctp(&["run", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{
  "lattice": {"sites": 64, "steps": 8, "alpha": 0.5, "hop_range": "all"},
  "experiment": {"source": 32, "barrier_t": 4, "slits": [28, 36], "measured": [2]},
  "output": {"format": "csv"}
}"#,
    )
    .unwrap();
    let from_file = dir.path().join("file");
    let from_preset = dir.path().join("preset");
    assert!(run_in(&from_file, &["run", "--config", cfg.to_str().unwrap()]).status.success());
    assert!(run_in(&from_preset, &["run", "--preset", "exp2"]).status.success());
    assert_eq!(
        fs::read(from_file.join("pattern.csv")).unwrap(),
        fs::read(from_preset.join("pattern.csv")).unwrap()
    );
}

fn density_report(dir: &Path, args: &[&str]) -> serde_json::Value {
    let out = run_in(dir, args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.to_string_lossy().ends_with("_report.json"))
        .unwrap();
    serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap()
}

#[test]
fn density_rank_reports() {
    let one = tempfile::tempdir().unwrap();
    let r = density_report(one.path(), &["density", "--preset", "exp1", "--slits", "32"]);
    assert_eq!(r["rank_estimate"], 1);
    let two = tempfile::tempdir().unwrap();
    let r = density_report(two.path(), &["density", "--preset", "exp2"]);
    assert_eq!(r["rank_estimate"], 2);
}

#[test]
fn density_hermitian_on_presets() {
    for preset in ["exp1", "exp2", "nslit3m1"] {
        let dir = tempfile::tempdir().unwrap();
        let r = density_report(dir.path(), &["density", "--preset", preset]);
        assert!(r["hermiticity_residual"].as_f64().unwrap() <= 1e-12, "{preset}");
    }
}

#[test]
fn density_dump_is_row_major() {
    let dir = tempfile::tempdir().unwrap();
    density_report(dir.path(), &["density", "--preset", "exp2", "--t", "6"]);
    let csv = read_csv(&dir.path().join("density_t6.csv"));
    assert_eq!(csv.header, ["row", "col", "re", "im"]);
    assert_eq!(csv.rows.len(), 64 * 64);
    assert_eq!((csv.rows[1][0], csv.rows[1][1]), (0.0, 1.0));
    let at = |i: usize, j: usize| &csv.rows[i * 64 + j];
    for (i, j) in [(3, 40), (30, 31), (10, 60)] {
        assert_eq!(at(i, j)[2], at(j, i)[2]);
        assert_eq!(at(i, j)[3], -at(j, i)[3]);
    }
}
