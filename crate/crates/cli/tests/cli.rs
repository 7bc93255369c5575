use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qdcascade(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdcascade"))
        .args(args)
        .arg("--output-dir")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn ldos_writes_one_row_per_frequency() {
    let tmp = TempDir::new().unwrap();
    let o = qdcascade(
        &[
            "ldos",
            "--radius-nm",
            "7",
            "--distance-nm",
            "10",
            "--omega-ev",
            "2:4:1001",
        ],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = rows(&tmp.path().join("ldos.csv"));
    assert_eq!(t[0], ["omega_ev", "scaled_ldos"]);
    assert_eq!(t.len(), 1002);
    for row in &t[1..] {
        for field in row {
            let v = num(field);
            assert_eq!(&format!("{v:.16e}"), field);
        }
    }
    let m = manifest(tmp.path());
    assert_eq!(m["subcommand"], "ldos");
    assert_eq!(m["status"], "ok");
    assert_eq!(m["settings"]["radius_nm"], 7.0);
    let listed: Vec<&str> = m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(listed, ["ldos.csv", "ldos_peaks.csv", "manifest.json"]);
    for f in listed {
        assert!(tmp.path().join(f).exists(), "{f}");
    }
    let peaks = rows(&tmp.path().join("ldos_peaks.csv"));
    assert_eq!(peaks.len(), 3);
    assert_eq!(peaks[1][0], "dipole");
}

#[test]
fn usage_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(qdcascade(&["ldos", "--bogus"], tmp.path()).status.code(), Some(2));
    assert_eq!(qdcascade(&["nonsense"], tmp.path()).status.code(), Some(2));
    assert_eq!(
        qdcascade(&["reproduce-figure", "9z"], tmp.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        qdcascade(&["spectrum", "--window-mode", "both"], tmp.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn validation_errors_exit_2_and_leave_a_manifest() {
    let tmp = TempDir::new().unwrap();
    let o = qdcascade(&["ldos", "--radius-nm", "-1"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let m = manifest(tmp.path());
    assert_eq!(m["status"], "error");
    assert!(m["error"].as_str().unwrap().contains("radius_nm"));

    let missing = tmp.path().join("absent.cfg");
    let o = qdcascade(&["spectrum", "--config", missing.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(2));

    let bad = tmp.path().join("bad.cfg");
    fs::write(&bad, "eps_b = 2\nfilter_width = 3\n").unwrap();
    let o = qdcascade(&["spectrum", "--config", bad.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("filter_width"));

    let o = qdcascade(&["concurrence", "--filter-width-mev", "0"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let o = qdcascade(&["ldos", "--workers", "0"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_errors_exit_3() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("far.cfg");
    fs::write(&cfg, "omega0_ev = 1e200\n").unwrap();
    let o = qdcascade(&["spectrum", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(manifest(tmp.path())["status"], "error");
}

#[test]
fn sweep_rows_follow_radius_then_distance() {
    let tmp = TempDir::new().unwrap();
    let spec = tmp.path().join("sweep.cfg");
    fs::write(&spec, "radius_nm = 7, 10.5, 14\ndistance_nm = 14:30:5\n").unwrap();
    let o = qdcascade(&["sweep", "--spec", spec.to_str().unwrap()], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = rows(&tmp.path().join("sweep.csv"));
    assert_eq!(
        t[0],
        [
            "r_nm",
            "h_nm",
            "h_over_r",
            "w_mev",
            "gamma_prime_abs",
            "concurrence",
            "t_weight",
            "h_weight"
        ]
    );
    assert_eq!(t.len(), 16);
    let keys: Vec<(f64, f64)> = t[1..].iter().map(|r| (num(&r[0]), num(&r[1]))).collect();
    let mut expected = Vec::new();
    for r in [7.0, 10.5, 14.0] {
        for h in [14.0, 18.0, 22.0, 26.0, 30.0] {
            expected.push((r, h));
        }
    }
    assert_eq!(keys, expected);
    for r in &t[1..] {
        let (g, c) = (num(&r[4]), num(&r[5]));
        assert!((0.0..=0.5).contains(&g));
        assert_eq!(c, 2.0 * g);
    }
}

#[test]
fn report_flag_selects_columns() {
    let tmp = TempDir::new().unwrap();
    let o = qdcascade(
        &["concurrence", "--report", "concurrence", "--radius-nm", "7,14"],
        tmp.path(),
    );
    assert!(o.status.success());
    let t = rows(&tmp.path().join("concurrence.csv"));
    assert_eq!(
        t[0],
        [
            "r_nm",
            "h_nm",
            "h_over_r",
            "w_mev",
            "concurrence",
            "t_weight",
            "h_weight"
        ]
    );
    assert_eq!(t.len(), 3);
}

#[test]
fn output_is_identical_across_worker_counts() {
    let args = [
        "concurrence",
        "--radius-nm",
        "7:14:8",
        "--h-over-r",
        "1.5,2.5",
        "--filter-width-mev",
        "0.05,1",
    ];
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let mut one = args.to_vec();
    one.extend(["--workers", "1"]);
    let mut four = args.to_vec();
    four.extend(["--workers", "4"]);
    assert!(qdcascade(&one, a.path()).status.success());
    assert!(qdcascade(&four, b.path()).status.success());
    let x = fs::read(a.path().join("concurrence.csv")).unwrap();
    let y = fs::read(b.path().join("concurrence.csv")).unwrap();
    assert_eq!(x, y);
}

#[test]
fn manifest_snapshot_reproduces_csv() {
    let first = TempDir::new().unwrap();
    let o = qdcascade(
        &[
            "spectrum",
            "--radius-nm",
            "9",
            "--distance-nm",
            "15",
            "--paper-literal-kappa",
            "--window-mode",
            "single",
        ],
        first.path(),
    );
    assert!(o.status.success());
    let m = manifest(first.path());
    assert_eq!(m["settings"]["paper_literal_kappa"], true);
    let cfg = first.path().join("snapshot.cfg");
    fs::write(&cfg, m["config_text"].as_str().unwrap()).unwrap();

    let second = TempDir::new().unwrap();
    let o = qdcascade(&["spectrum", "--config", cfg.to_str().unwrap()], second.path());
    assert!(o.status.success());
    for f in ["spectrum.csv", "spectrum_peaks.csv"] {
        assert_eq!(
            fs::read(first.path().join(f)).unwrap(),
            fs::read(second.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn amplitudes_csv_and_json_agree() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("small.cfg");
    fs::write(&cfg, "grid_points = 21\n").unwrap();
    let c = cfg.to_str().unwrap();
    assert!(qdcascade(&["amplitudes", "--config", c], tmp.path()).status.success());
    assert!(
        qdcascade(&["amplitudes", "--config", c, "--format", "json"], tmp.path())
            .status
            .success()
    );
    let t = rows(&tmp.path().join("amplitudes.csv"));
    assert_eq!(t.len(), 21 * 21 + 1);
    let j: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("amplitudes.json")).unwrap()).unwrap();
    assert_eq!(j["exciton_axis"]["points"], 21);
    // row k of the CSV is (i, j) = (k / 21, k % 21)
    let k = 7 * 21 + 13;
    let re = j["c_y"]["re"][7][13].as_f64().unwrap();
    assert_eq!(num(&t[k + 1][4]), re);
}

#[test]
fn figure_8a_is_a_radius_scan_at_fixed_distance() {
    let tmp = TempDir::new().unwrap();
    let o = qdcascade(&["reproduce-figure", "8a"], tmp.path());
    assert!(o.status.success());
    let t = rows(&tmp.path().join("fig8a.csv"));
    assert_eq!(t.len(), 16);
    let radii: Vec<f64> = t[1..].iter().map(|r| num(&r[0])).collect();
    let expected: Vec<f64> = (0..15).map(|k| 7.0 + 0.5 * k as f64).collect();
    assert_eq!(radii, expected);
    assert!(t[1..].iter().all(|r| num(&r[1]) == 14.0 && num(&r[3]) == 1.0));
    let side = fs::read_to_string(tmp.path().join("fig8a.txt")).unwrap();
    assert!(side.starts_with("figure 8a"));
    assert!(side.contains("h = 14 nm"));
}

#[test]
fn figure_4_writes_one_spectrum_per_distance() {
    let tmp = TempDir::new().unwrap();
    assert!(qdcascade(&["reproduce-figure", "4"], tmp.path()).status.success());
    let m = manifest(tmp.path());
    let spectra: Vec<&str> = m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .filter(|f| f.ends_with("nm.csv"))
        .collect();
    assert_eq!(
        spectra,
        ["fig4_h10nm.csv", "fig4_h12nm.csv", "fig4_h14nm.csv", "fig4_h16nm.csv"]
    );
    let t = rows(&tmp.path().join("fig4_h16nm.csv"));
    assert_eq!(
        t[0],
        [
            "omega_minus_omega0_mev",
            "sx_exciton",
            "sy_exciton",
            "sx_biexciton",
            "sy_biexciton"
        ]
    );
    assert_eq!(t.len(), 402);
}

#[test]
fn figure_3b_covers_the_ratio_range() {
    let tmp = TempDir::new().unwrap();
    assert!(qdcascade(&["reproduce-figure", "3b"], tmp.path()).status.success());
    let t = rows(&tmp.path().join("fig3b.csv"));
    assert_eq!(t[0], ["h_over_r", "g_mev", "gamma_ex_mev", "kappa_mev"]);
    assert_eq!(num(&t[1][0]), 1.0);
    assert_eq!(num(&t[t.len() - 1][0]), 4.0);
    let g: Vec<f64> = t[1..].iter().map(|r| num(&r[1])).collect();
    assert!(g.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn oracle_check_reports_json_and_honours_threshold() {
    let tmp = TempDir::new().unwrap();
    let o = qdcascade(&["oracle-check", "--modes", "100"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["modes"], 100);
    assert_eq!(report["probes"].as_array().unwrap().len(), 50);
    assert!(report["mean_rel_error"].as_f64().unwrap() < 0.05);
    assert!(tmp.path().join("oracle_report.json").exists());

    let o = qdcascade(&["oracle-check", "--modes", "100", "--threshold", "1e-12"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    let o = qdcascade(&["oracle-check", "--modes", "10"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}
