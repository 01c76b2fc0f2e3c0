//! Black-box tests of the binary: exit codes, file formats, reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn ptaho(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptaho"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn spectrum_csv_shape_and_values() {
    let out = ptaho(&["spectrum", "--n-trunc", "25", "--levels", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,energy,imag_flag"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0");
    let e0: f64 = first[1].parse().unwrap();
    assert!((e0 - 1.691_579).abs() < 1e-4);
}

#[test]
fn spectrum_json_contains_config_echo() {
    let out = ptaho(&["spectrum", "--format", "json", "--n-trunc", "25", "--beta", "0.5"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["params"]["beta"], serde_json::json!(0.5));
    assert_eq!(report["solver"]["n_trunc"], serde_json::json!(25));
    assert!(report["levels"].as_array().unwrap().len() <= 8);
}

#[test]
fn identical_configs_give_byte_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let path_a = dir.path().join("a.json");
    let path_b = dir.path().join("b.json");
    for path in [&path_a, &path_b] {
        let out = ptaho(&[
            "spectrum",
            "--format",
            "json",
            "--n-trunc",
            "20",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let a = std::fs::read(&path_a).unwrap();
    let b = std::fs::read(&path_b).unwrap();
    assert_eq!(a, b, "outputs must be reproducible byte for byte");
    // atomic write leaves no temporary behind
    assert!(!dir.path().join("a.json.tmp").exists());
}

#[test]
fn json_output_reingests_as_config() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("run.json");
    let out = ptaho(&[
        "spectrum",
        "--format",
        "json",
        "--n-trunc",
        "20",
        "--s",
        "2.5",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rerun = ptaho(&[
        "spectrum",
        "--format",
        "json",
        "--config",
        first.to_str().unwrap(),
    ]);
    assert!(rerun.status.success());
    let a: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();
    let b: serde_json::Value = serde_json::from_str(&stdout(&rerun)).unwrap();
    assert_eq!(a, b, "a rerun from the emitted config reproduces the result");
}

#[test]
fn flat_config_file_is_honored_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "[params]\nbeta = 0.25\n[solver]\nn_trunc = 22\n").unwrap();
    let out = ptaho(&[
        "spectrum",
        "--format",
        "json",
        "--config",
        cfg.to_str().unwrap(),
        "--beta",
        "0.75",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["params"]["beta"], serde_json::json!(0.75));
    assert_eq!(report["solver"]["n_trunc"], serde_json::json!(22));
}

#[test]
fn bad_config_and_bad_parameters_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "nonsense = 1\n").unwrap();
    let out = ptaho(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = ptaho(&["spectrum", "--a", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("positive"));

    let out = ptaho(&["spectrum", "--n-trunc", "3"]);
    assert_eq!(out.status.code(), Some(2));

    // unknown flags are a usage error, also exit 2
    let out = ptaho(&["spectrum", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn level_out_of_range_exits_two() {
    let out = ptaho(&["wavefunction", "--level", "30", "--n-trunc", "20"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn wavefunction_truncates_grid_with_warning() {
    let out = ptaho(&[
        "wavefunction",
        "--format",
        "json",
        "--x-max",
        "3.0",
        "--samples",
        "11",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let usable = report["usable_x_max"].as_f64().unwrap();
    assert!(usable < 3.0);
    assert!(report["warning"].as_str().unwrap().contains("truncated"));
    assert!(report["pt_defect"].as_f64().unwrap() < 1e-12);
    assert!(report["ode_residual"].as_f64().unwrap() < 1e-6);
    let samples = report["samples"].as_array().unwrap();
    let last = samples.last().unwrap();
    assert!(last["x"].as_f64().unwrap() <= usable + 1e-9);
}

#[test]
fn wavefunction_csv_writes_sidecar_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.csv");
    let coeffs = dir.path().join("coeffs.csv");
    let out = ptaho(&[
        "wavefunction",
        "--out",
        path.to_str().unwrap(),
        "--coefficients-out",
        coeffs.to_str().unwrap(),
        "--samples",
        "5",
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("x,re_psi,im_psi,abs_psi\n"));
    assert_eq!(csv.lines().count(), 6);
    let header: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path.with_extension("meta.json")).unwrap())
            .unwrap();
    assert!(header["zeta"].as_f64().is_some());

    let coeff_text = std::fs::read_to_string(&coeffs).unwrap();
    assert!(coeff_text.starts_with("n,mantissa,exponent10\n"));
    assert_eq!(coeff_text.lines().count(), 36); // header + 35 entries
}

#[test]
fn spectrum_matrix_dump_lists_band_triples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("matrix.csv");
    let out = ptaho(&[
        "spectrum",
        "--n-trunc",
        "6",
        "--dump-matrix",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("row,col,value"));
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let (i, j): (i64, i64) = (cols[0].parse().unwrap(), cols[1].parse().unwrap());
        let d = j - i;
        assert!((-4..=2).contains(&d));
        assert_ne!(d, 1, "first superdiagonal is identically zero");
        assert!(cols[2].parse::<f64>().unwrap() != 0.0);
    }
}

#[test]
fn converge_single_order_degenerates_to_spectrum() {
    let sweep = ptaho(&["converge", "--n-list", "25", "--levels", "2"]);
    assert!(sweep.status.success());
    let direct = ptaho(&["spectrum", "--n-trunc", "25", "--levels", "2"]);
    assert!(direct.status.success());
    // same energies in both outputs
    let sweep_text = stdout(&sweep);
    let row = sweep_text.lines().nth(1).unwrap();
    let direct_text = stdout(&direct);
    let e0_direct: f64 = direct_text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    let e0_sweep: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((e0_direct - e0_sweep).abs() < 1e-12);
}

#[test]
fn converge_records_per_order_failures_inline() {
    // order 3 is below the full-band minimum; the sweep keeps going
    let out = ptaho(&["converge", "--n-list", "3,25", "--levels", "2", "--format", "json"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["error"].as_str().unwrap().contains("dimension"));
    assert!(rows[1]["error"].is_null());
}

#[test]
fn verify_at_tiny_truncation_reports_spread_and_exits_four() {
    let out = ptaho(&[
        "verify",
        "--n-trunc",
        "8",
        "--fd-grid-points",
        "200",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(4), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["pass"], serde_json::json!(false));
    // the spread between methods is visible and far beyond the bound
    let worst = report["levels"]
        .as_array()
        .unwrap()
        .iter()
        .filter_map(|l| l["delta_hill_fd"].as_f64())
        .fold(0.0f64, f64::max);
    assert!(worst > 1e-2, "spread {worst}");
}

#[test]
fn verify_real_potential_against_reference() {
    // purely real potential (no odd couplings): all three routes agree
    let out = ptaho(&[
        "verify",
        "--beta",
        "0",
        "--delta",
        "0",
        "--fd-grid-points",
        "400",
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn determinants_reports_agreement() {
    let out = ptaho(&["determinants", "--energy", "0.7", "--n-max", "20", "--format", "json"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let worst = report["max_relative_deviation"].as_f64().unwrap();
    assert!(worst < 1e-10, "deviation {worst}");
    let out = ptaho(&["determinants", "--n-max", "100"]);
    assert_eq!(out.status.code(), Some(2), "determinant order cap maps to exit 2");
}

#[test]
fn asymptotics_csv_has_growth_table() {
    let out = ptaho(&["asymptotics", "--n-hi", "200", "--n-lo", "80"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("n,log10_abs,corrected,fitted"));
    let data_lines = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(data_lines, 1 + (200 - 80 + 1));
}

#[test]
fn paper_style_rounds_to_seven_significant_digits() {
    let out = ptaho(&["spectrum", "--n-trunc", "35", "--levels", "1", "--paper-style"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let e0 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap();
    assert_eq!(e0, "1.691590");
}

#[test]
fn paper_style_convergence_table_matches_golden_output() {
    // the whole point of --paper-style is byte-for-byte comparison against a
    // frozen table; the computation is strict IEEE f64 plus a pure-Rust math
    // library, so the text is platform-independent
    let out = ptaho(&[
        "converge",
        "--n-list",
        "15,20,25,30,35",
        "--levels",
        "8",
        "--paper-style",
    ]);
    assert!(out.status.success());
    let golden = "\
n_trunc,E_0,E_1,E_2,E_3,E_4,E_5,E_6,E_7
15,1.693469,5.106182,9.151705,13.04333,17.81734,23.89313,31.26074,41.55168
20,1.691638,5.125589,9.280040,14.04972,19.24383,-,32.34575,-
25,1.691579,5.123441,9.258118,13.86894,18.79250,24.26521,30.03868,37.96785
30,1.691590,5.123614,9.261737,13.88262,18.89221,24.26197,29.72570,34.66583
35,1.691590,5.123579,9.261514,13.87932,18.88383,24.22000,29.86022,35.85320
";
    assert_eq!(stdout(&out), golden);
}

fn _assert_path_is_file(p: &Path) {
    assert!(p.is_file());
}
