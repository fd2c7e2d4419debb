use std::path::Path;
use std::process::{Command, Output};

use purichaos::fano::{self, FanoVector};
use purichaos::qstate::{self, DensityMatrix2Q, PureState2Q};
use serde_json::Value;

fn purichaos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_purichaos"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn iterate_bell_fixed_point() {
    let recs = json(&purichaos(&["iterate", "--zeta", "1+0i", "--steps", "3"]));
    let recs = recs.as_array().unwrap();
    assert_eq!(recs.len(), 3);
    for (k, r) in recs.iter().enumerate() {
        assert_eq!(r["step"], k + 1);
        assert!((r["entropy"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r["representation"], "amplitudes");
        assert_eq!(floats(&r["state"]).len(), 8);
    }
}

#[test]
fn iterate_separable_cycle_alternates() {
    let recs = json(&purichaos(&["iterate", "--zeta", "0+0i", "--steps", "2"]));
    let recs = recs.as_array().unwrap();
    assert!(recs.iter().all(|r| r["entropy"].as_f64().unwrap().abs() < 1e-12));
    let (a, b) = (floats(&recs[0]["state"]), floats(&recs[1]["state"]));
    assert_ne!(a, b);
    // |++⟩ after one round, |00⟩ after two.
    assert!(a.iter().step_by(2).all(|x| (x - 0.5).abs() < 1e-15));
    assert_eq!(b[0], 1.0);
}

#[test]
fn iterate_noisy_state_reaches_an_attractor() {
    let recs = json(&purichaos(&["iterate", "--zeta", "0.5+0i", "--lambda", "0.75", "--steps", "50"]));
    let last = recs.as_array().unwrap().last().unwrap();
    assert_eq!(last["representation"], "fano");
    let v: [f64; 16] = floats(&last["state"]).try_into().unwrap();
    let rho = fano::from_fano(&FanoVector(v)).unwrap();
    let rho1 = fano::correlated_mixture();
    let partner = purichaos::protocol::protocol_step(&rho1, &Default::default()).unwrap().state;
    let candidates: Vec<DensityMatrix2Q> = vec![
        rho1,
        partner,
        PureState2Q::phi_plus().density(),
        PureState2Q::basis(0).density(),
        PureState2Q::plus_plus().density(),
    ];
    let best = candidates
        .iter()
        .map(|c| qstate::trace_distance(c, &rho))
        .fold(f64::INFINITY, f64::min);
    assert!(best < 1e-3, "closest attractor member at {best}");
}

#[test]
fn basin_single_cell_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let ppm = dir.path().join("one.ppm");
    let csv = dir.path().join("one.csv");
    let o = purichaos(&[
        "basin",
        "--viewport",
        "0.5,1.5,-0.5,0.5",
        "--width",
        "1",
        "--height",
        "1",
        "--out-ppm",
        ppm.to_str().unwrap(),
        "--out-csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "cells=1 bell=1 separable=0 mixed=0 unresolved=0");
    assert_eq!(std::fs::read(&ppm).unwrap(), b"P6\n1 1\n255\n\x00\x00\xff");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text, "re,im,label,steps\n1.00000000e0,0.00000000e0,bell,0\n");
}

fn basin_files(dir: &Path, tag: &str, threads: &str) -> (String, Vec<u8>, Vec<u8>) {
    let ppm = dir.join(format!("{tag}.ppm"));
    let csv = dir.join(format!("{tag}.csv"));
    let o = purichaos(&[
        "basin",
        "--width",
        "48",
        "--height",
        "40",
        "--threads",
        threads,
        "--dimension",
        "--out-ppm",
        ppm.to_str().unwrap(),
        "--out-csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    (stdout(&o), std::fs::read(ppm).unwrap(), std::fs::read(csv).unwrap())
}

#[test]
fn basin_outputs_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let one = basin_files(dir.path(), "a", "1");
    let three = basin_files(dir.path(), "b", "3");
    assert_eq!(one, three);
    assert!(one.0.contains("mixed=0 unresolved=0"));
    assert!(one.0.contains("boundary_dimension="));
    assert_eq!(one.2.iter().filter(|&&b| b == b'\n').count(), 48 * 40 + 1);
}

#[test]
fn cycles_for_pure_seeds() {
    let v = json(&purichaos(&["cycles", "--lambda", "1", "--seeds", "36"]));
    let cycles = v["cycles"].as_array().unwrap();
    let labels: Vec<&str> = cycles.iter().map(|c| c["label"].as_str().unwrap()).collect();
    assert!(labels.contains(&"bell") && labels.contains(&"separable"), "{labels:?}");
    assert!(cycles.iter().all(|c| c["stable"] == true));
    assert_eq!(v["stable_mixed_cycles"], 0);
}

#[test]
fn cycles_report_the_mixed_cycle_and_its_reference_comparison() {
    let args = ["cycles", "--lambda", "0.5,0.75", "--seeds", "25", "--include-unstable"];
    let first = purichaos(&args);
    let v = json(&first);
    let cycles = v["cycles"].as_array().unwrap();
    let mixed = cycles.iter().find(|c| c["label"] == "mixed").expect("mixed cycle");
    assert_eq!(mixed["period"], 2);
    assert_eq!(mixed["stable"], true);
    let r = &mixed["reference"];
    assert!(r["distance_to_correlated_mixture"].as_f64().unwrap() < 1e-8);
    assert!((r["partner_distance_to_tabulated"].as_f64().unwrap() - 0.25).abs() < 1e-8);
    assert!((r["partner_coherence_00_11"].as_f64().unwrap() - 0.25).abs() < 1e-8);
    assert!(cycles.iter().any(|c| c["label"] == "maximally_mixed"));
    assert!(cycles.iter().any(|c| c["stable"] == false));
    assert_eq!(purichaos(&args).stdout, first.stdout);
}

#[test]
fn constants_json() {
    let v = json(&purichaos(&["constants"]));
    assert!((v["zeta_A"].as_f64().unwrap() - 0.5436890127).abs() < 1e-9);
    assert!((v["zeta_B"].as_f64().unwrap() - 1.8392867552).abs() < 1e-9);
    assert!((v["zeta_C"].as_f64().unwrap() - 0.475).abs() < 0.005);
    assert!(v["residuals"]["zeta_a_cubic"].as_f64().unwrap() < 1e-12);
    let text = stdout(&purichaos(&["constants"]));
    assert!(text.contains("\"zeta_A\": 5.4368901269207637e-1"), "{text}");
}

#[test]
fn oracle_check_exit_codes() {
    let o = purichaos(&["oracle-check", "--samples", "200", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().ends_with("PASS"));
    assert_eq!(purichaos(&["oracle-check", "--samples", "0"]).status.code(), Some(2));
}

#[test]
fn probe_is_reproducible_for_a_seed() {
    let args = ["probe", "--center", "0.5436890126920764", "--radius", "1e-3", "--samples", "64", "--seed", "5"];
    let a = purichaos(&args);
    let v = json(&a);
    assert!(v["distinct_labels"].as_u64().unwrap() >= 2);
    assert_eq!(purichaos(&args).stdout, a.stdout);
}

#[test]
fn error_exit_codes() {
    assert_eq!(purichaos(&[]).status.code(), Some(2));
    assert_eq!(purichaos(&["iterate", "--zeta", "x"]).status.code(), Some(2));
    assert_eq!(purichaos(&["basin", "--width", "0"]).status.code(), Some(2));
    assert_eq!(purichaos(&["iterate", "--zeta", "-1-2i", "--steps", "1"]).status.code(), Some(0));
    let o = purichaos(&["constants", "--out", "/nonexistent-dir/c.json"]);
    assert_eq!(o.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let o = purichaos(&["basin", "--width", "2", "--height", "2", "--out-ppm", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
