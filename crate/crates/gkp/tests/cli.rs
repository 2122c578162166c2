use std::process::{Command, Output};

use serde_json::Value;

fn gkp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gkp")).args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = gkp(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["inputs", "outputs", "version"]);
    v
}

fn ok_csv(args: &[&str]) -> (Vec<String>, Vec<Vec<f64>>) {
    let out = gkp(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr.records().map(|r| r.unwrap().iter().map(|c| c.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn code(args: &[&str]) -> i32 {
    gkp(args).status.code().unwrap()
}

#[test]
fn bad_usage_exits_with_two() {
    assert_eq!(code(&[]), 2);
    assert_eq!(code(&["nonsense"]), 2);
    assert_eq!(code(&["misid", "--delta", "-1"]), 2);
    assert_eq!(code(&["misid", "--delta", "0.3", "--label", "2"]), 2);
    assert_eq!(code(&["wavefunction", "--points", "0"]), 2);
    assert_eq!(code(&["wavefunction", "--xmin", "1", "--xmax", "-1"]), 2);
    assert_eq!(code(&["pnoerror", "--delta-range", "0.1"]), 2);
    assert_eq!(code(&["verify-bound", "--t-over-threshold", "-0.5"]), 2);
    assert_eq!(code(&["oracle-check", "--grid-n", "1000", "--trials", "1"]), 2);
}

#[test]
fn numerical_failures_exit_with_one() {
    let out = gkp(&["find-delta", "--target", "1.0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn wavefunction_peaks_sit_on_the_codeword_lattice() {
    let root_pi = std::f64::consts::PI.sqrt();
    for (label, first) in [("0", 0.0), ("1", root_pi)] {
        let (header, rows) = ok_csv(&[
            "wavefunction",
            "--delta",
            "0.2",
            "--label",
            label,
            "--xmin",
            "-6",
            "--xmax",
            "6",
            "--points",
            "4001",
        ]);
        assert_eq!(header, ["x[1]", "amplitude[1]"]);
        assert_eq!(rows.len(), 4001);
        let peaks: Vec<f64> = rows
            .windows(3)
            .filter(|w| w[1][1] > w[0][1] && w[1][1] >= w[2][1] && w[1][1] > 0.05)
            .map(|w| w[1][0])
            .collect();
        assert!(peaks.len() >= 3, "{peaks:?}");
        for x in peaks {
            let n = ((x - first) / (2.0 * root_pi)).round();
            assert!((x - first - 2.0 * root_pi * n).abs() < 0.01, "label {label}: peak at {x}");
        }
    }
}

#[test]
fn misid_reports_exact_and_approximate_values() {
    let v = ok_json(&["misid", "--delta", "0.5"]);
    let exact = v["outputs"]["exact"].as_f64().unwrap();
    let approx = v["outputs"]["approx"].as_f64().unwrap();
    assert!((exact - 0.012191).abs() < 2e-6, "{exact}");
    assert!((approx - exact).abs() < 1e-5);
    assert_eq!(v["inputs"]["state"]["kappa"], 0.5);

    let v = ok_json(&["misid", "--delta", "0.5", "--approx"]);
    assert!(v["outputs"]["exact"].is_null());
    assert_eq!(v["outputs"]["approx"].as_f64().unwrap(), approx);

    let small = ok_json(&["misid", "--delta", "0.25"])["outputs"]["exact"].as_f64().unwrap();
    assert!(small > 2e-7 && small < 5e-6, "{small}");
}

#[test]
fn shift_distribution_carries_unit_mass() {
    let (header, rows) = ok_csv(&["puv", "--delta", "0.3", "--nu", "64", "--nv", "32"]);
    assert_eq!(header, ["u[1]", "v[1]", "density[1/area]"]);
    assert_eq!(rows.len(), 64 * 32);
    let area = 2.0 * std::f64::consts::PI.sqrt() / 64.0 * (std::f64::consts::PI.sqrt() / 32.0);
    let mass: f64 = rows.iter().map(|r| r[2]).sum::<f64>() * area;
    assert!((mass - 1.0).abs() < 1e-6, "{mass}");

    let v = ok_json(&["puv", "--delta", "0.3", "--nu", "32", "--nv", "16", "--format", "json"]);
    let d = gkp::formats::distribution_from_json(&v["outputs"].to_string()).unwrap();
    assert_eq!((d.nu, d.nv), (32, 16));
}

#[test]
fn quality_curve_and_inverse_agree() {
    let (header, rows) = ok_csv(&["pnoerror", "--delta-range", "0.1,0.5", "--steps", "9"]);
    assert_eq!(header, ["delta[1]", "p_no_error[probability]"]);
    assert!(rows.windows(2).all(|w| w[1][1] < w[0][1]));

    for (target, delta) in [("0.9", 0.214), ("0.99", 0.149)] {
        let v = ok_json(&["find-delta", "--target", target]);
        let got = v["outputs"]["delta"].as_f64().unwrap();
        assert!((got - delta).abs() < 0.003, "{target}: {got}");
        let p = v["outputs"]["p_no_error"].as_f64().unwrap();
        assert!((p - target.parse::<f64>().unwrap()).abs() < 1e-5);
    }
}

#[test]
fn photon_table_has_both_estimates() {
    let (header, rows) = ok_csv(&["photons", "--pnoerror-range", "0.9,0.99", "--steps", "2"]);
    assert_eq!(header, ["p_error[probability]", "n_exact[photons]", "n_crude[photons]", "delta[1]"]);
    let expected = [(0.1, 10.4, 0.3), (0.01, 22.1, 0.6)];
    for (row, (p_err, n, tol)) in rows.iter().zip(expected) {
        assert!((row[0] - p_err).abs() < 1e-12);
        assert!((row[1] - n).abs() < tol, "{row:?}");
        let crude = 1.0 / (4.0 * row[3] * row[3]) + 1.0 / (4.0 * row[3] * row[3]);
        assert_eq!(row[2], crude);
    }
}

#[test]
fn bound_verification_finds_witnesses_only_past_the_threshold() {
    for (t, safe) in [("0", true), ("0.999", true), ("1.02", false)] {
        let v = ok_json(&["verify-bound", "--t-over-threshold", t, "--rounds", "50"]);
        assert_eq!(v["outputs"]["safe"], safe, "t = {t}");
        assert_eq!(v["outputs"]["witness"].is_null(), safe);
    }
}

#[test]
fn simulation_is_reproducible_and_seeded() {
    let args = ["simulate", "--delta", "0.3", "--rounds", "2", "--trials", "3000"];
    let a = ok_json(&args);
    let b = ok_json(&args);
    assert_eq!(a, b);
    let stats = &a["outputs"]["stats"];
    assert_eq!(stats["config"]["trials"], 3000);
    assert_eq!(stats["inside_threshold_flips"], 0);

    let mut seeded = args.to_vec();
    seeded.extend(["--seed", "7"]);
    assert_ne!(ok_json(&seeded)["outputs"]["stats"], *stats);

    let (header, rows) = ok_csv(&["simulate", "--delta", "0.3", "--trials", "500", "--format", "csv"]);
    assert_eq!(header, ["residual_low[1]", "residual_high[1]", "count[steps]"]);
    assert_eq!(rows.iter().map(|r| r[2]).sum::<f64>(), 1000.0);
}

#[test]
fn excellent_states_never_flip() {
    let v = ok_json(&["simulate", "--delta", "0.05", "--rounds", "3", "--trials", "2000"]);
    assert_eq!(v["outputs"]["stats"]["any_flip_trials"], 0);
}

#[test]
fn oracle_check_runs_and_dumps_state() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("state.bin");
    let out_file = dir.path().join("report.json");
    let out = gkp(&[
        "oracle-check",
        "--delta",
        "0.5",
        "--grid-n",
        "256",
        "--trials",
        "3",
        "--circuit",
        "x",
        "--details",
        "--dump-state",
        dump.to_str().unwrap(),
        "-o",
        out_file.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&out_file).unwrap()).unwrap();
    let reports = v["outputs"]["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["circuit"], "X");
    assert_eq!(reports[0]["details"].as_array().unwrap().len(), 3);
    let grid = gkp::formats::read_grid_binary(std::fs::File::open(&dump).unwrap()).unwrap();
    assert_eq!(grid.amplitudes().len(), 256);
    assert!((grid.norm_sqr() - 1.0).abs() < 1e-3, "{}", grid.norm_sqr());
}
