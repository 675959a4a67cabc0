use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn geophase(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geophase"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn flip_point_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = geophase(&["simulate-single"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&dir.path().join("single_report.json"));
    assert!((num(&r["results"]["p_up"]) - 1.0).abs() < 1e-9);
    assert_eq!(r["config"]["e_ch"], 50.0);
    assert_eq!(r["config"]["delta_coupling"], 1.0);
    assert_eq!(r["warnings"].as_array().unwrap().len(), 0);

    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,re_up,im_up,re_down,im_down,bloch_x1,bloch_y1,bloch_z1");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 2001);
    let last = rows.last().unwrap();
    assert!((last[7] - 1.0).abs() < 1e-9);
}

#[test]
fn zero_offset_returns_to_start() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&geophase(&["simulate-single", "--delta", "0"], dir.path())), 0);
    let r = json(&dir.path().join("single_report.json"));
    assert!(num(&r["results"]["gamma_measured"]).abs() < 1e-12);
    assert!(num(&r["results"]["cyclicity_defect"]).abs() < 1e-12);
    assert!((num(&r["results"]["p_down"]) - 1.0).abs() < 1e-12);
}

#[test]
fn literal_mode_warns_but_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = geophase(&["simulate-single", "--mode", "literal", "--samples", "101"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning: sigma_y eigenstate loop does not close"));
    let r = json(&dir.path().join("single_report.json"));
    assert_eq!(r["results"]["loop_closed"], false);
    assert!(r["warnings"][0].as_str().unwrap().contains("does not close"));
    assert_eq!(r["config"]["step3_mode"], "literal");
}

#[test]
fn calibration_targets() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&geophase(&["calibrate"], dir.path())), 0);
    let r = json(&dir.path().join("calibration.json"));
    assert!((num(&r["results"]["delta"]) - 0.04).abs() < 1e-12);
    assert!((num(&r["results"]["tau_predicted"]) - PI / 8f64.sqrt()).abs() < 1e-12);

    assert_eq!(code(&geophase(&["calibrate", "--target-gamma", "pi/4"], dir.path())), 0);
    let r = json(&dir.path().join("calibration.json"));
    assert!((num(&r["results"]["delta"]) - 2.0 / 50.0 * (PI / 8.0).tan()).abs() < 1e-12);

    let o = geophase(&["calibrate", "--target-gamma", "0"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn conditional_gate_reports() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&geophase(&["simulate-cnot"], dir.path())), 0);
    let r = json(&dir.path().join("cnot_report.json"));
    let res = &r["results"];
    assert!((num(&res["gamma_measured"]).abs() - PI / 4.0).abs() < 1e-9);
    assert!((num(&res["fidelity_vs_target"]) - 1.0).abs() < 1e-9);
    assert!(num(&res["leakage"]) < 1e-10);
    assert_eq!(res["unitary"]["re"].as_array().unwrap().len(), 4);
    let instantaneous = num(&res["cnot_fidelity"]);

    assert_eq!(code(&geophase(&["simulate-cnot", "--theta", "0"], dir.path())), 0);
    let r = json(&dir.path().join("cnot_report.json"));
    assert!(num(&r["results"]["conditional_identity_defect"]) < 1e-9);
    assert!(num(&r["results"]["block_phase_error"]) < 1e-9);

    let cfg = dir.path().join("finite.cfg");
    fs::write(&cfg, "e_j0 = 5\ne_ch = 50\ndelta_coupling = 1\nrotation_mode = finite\n").unwrap();
    let o = geophase(&["simulate-cnot", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0);
    let f = num(&json(&dir.path().join("cnot_report.json"))["results"]["cnot_fidelity"]);
    assert!(f > 0.0 && f < instantaneous, "{f} vs {instantaneous}");
}

#[test]
fn zero_coupling_is_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    fs::write(&cfg, "delta_coupling = 0\n").unwrap();
    let o = geophase(&["simulate-cnot", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no coupling"));
}

#[test]
fn single_point_sweep_matches_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.cfg");
    fs::write(&cfg, "sweep_values = 0.03\n").unwrap();
    assert_eq!(code(&geophase(&["sweep", "--config", cfg.to_str().unwrap()], dir.path())), 0);
    assert_eq!(code(&geophase(&["simulate-single", "--delta", "0.03"], dir.path())), 0);
    let sweep = json(&dir.path().join("sweep_report.json"));
    let single = json(&dir.path().join("single_report.json"));
    let row = &sweep["results"]["rows"][0];
    for key in ["gamma_measured", "gamma_predicted", "p_up", "prediction_fidelity", "cyclicity_defect", "tau"] {
        assert_eq!(row[key], single["results"][key], "{key}");
    }
}

#[test]
fn delta_sweep_gamma_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.cfg");
    fs::write(&cfg, "sweep_start = 0\nsweep_stop = 0.2\nsweep_points = 6\nsamples = 201\n").unwrap();
    assert_eq!(code(&geophase(&["sweep", "--config", cfg.to_str().unwrap()], dir.path())), 0);
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let gamma: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(gamma.len(), 6);
    assert!(gamma.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn theta_sweep_contains_quarter_turn() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.cfg");
    fs::write(&cfg, "sweep_kind = theta\nsweep_values = 0, pi/16, pi/8\n").unwrap();
    assert_eq!(code(&geophase(&["sweep", "--config", cfg.to_str().unwrap()], dir.path())), 0);
    let r = json(&dir.path().join("sweep_report.json"));
    let rows = r["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!((num(&rows[2]["gamma_measured"]).abs() - PI / 4.0).abs() < 1e-9);
}

#[test]
fn empty_sweep_is_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.cfg");
    fs::write(&cfg, "sweep_values =\n").unwrap();
    assert_eq!(code(&geophase(&["sweep", "--config", cfg.to_str().unwrap()], dir.path())), 2);
}

#[test]
fn validation_passes_and_rejects_bad_windows() {
    let dir = tempfile::tempdir().unwrap();
    let o = geophase(&["validate"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&dir.path().join("validate_report.json"));
    assert_eq!(r["results"]["discrepancy_monotone"], true);
    assert_eq!(r["results"]["levels"], 6);

    let cfg = dir.path().join("w.cfg");
    fs::write(&cfg, "n_min = 1\nn_max = 3\n").unwrap();
    assert_eq!(code(&geophase(&["validate", "--config", cfg.to_str().unwrap()], dir.path())), 2);
}

#[test]
fn non_monotone_validation_is_an_assertion_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("r.cfg");
    fs::write(&cfg, "ratios = 0.025, 0.05\n").unwrap();
    assert_eq!(code(&geophase(&["validate", "--config", cfg.to_str().unwrap()], dir.path())), 1);
}

#[test]
fn undersampling_is_a_contract_violation() {
    let dir = tempfile::tempdir().unwrap();
    let o = geophase(&["simulate-single", "--samples", "2"], dir.path());
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn bad_input_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&geophase(&["simulate-single", "--method", "euler"], dir.path())), 2);
    assert_eq!(code(&geophase(&["simulate-single", "--delta", "1.5"], dir.path())), 2);
    assert_eq!(code(&geophase(&["simulate-single", "--config", "/nonexistent/x.cfg"], dir.path())), 2);
    assert_eq!(code(&geophase(&["simulate-single", "--bogus"], dir.path())), 2);
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "e_ch = -1\n").unwrap();
    assert_eq!(code(&geophase(&["simulate-single", "--config", cfg.to_str().unwrap()], dir.path())), 2);
}

#[test]
fn reports_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for args in [&["simulate-single", "--samples", "201"][..], &["simulate-cnot"][..]] {
        assert_eq!(code(&geophase(args, a.path())), 0);
        assert_eq!(code(&geophase(args, b.path())), 0);
    }
    for file in ["single_report.json", "trajectory.csv", "cnot_report.json"] {
        let x = fs::read_to_string(a.path().join(file)).unwrap();
        // the echoed output directory is the only difference
        let y = fs::read_to_string(b.path().join(file)).unwrap().replace(b.path().to_str().unwrap(), a.path().to_str().unwrap());
        assert_eq!(x, y, "{file}");
    }
}

#[test]
fn csv_fields_round_trip_at_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&geophase(&["simulate-single", "--samples", "21"], dir.path())), 0);
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let field = csv.lines().nth(2).unwrap().split(',').next().unwrap().to_string();
    let value: f64 = field.parse().unwrap();
    assert_eq!(format!("{value:.16e}"), field);
    let r = json(&dir.path().join("single_report.json"));
    assert_eq!(num(&r["results"]["tau"]) / 20.0, value);
}
