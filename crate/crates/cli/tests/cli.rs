use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nnls(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nnls"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

fn rows(dir: &Path, stem: &str) -> Vec<BTreeMap<String, String>> {
    let mut rdr = csv::Reader::from_path(dir.join(format!("{stem}.csv"))).unwrap();
    let head = rdr.headers().unwrap().clone();
    rdr.records().map(|r| head.iter().zip(r.unwrap().iter()).map(|(h, v)| (h.into(), v.into())).collect()).collect()
}

fn header(dir: &Path, stem: &str) -> Value {
    serde_json::from_slice(&fs::read(dir.join(format!("{stem}.header.json"))).unwrap()).unwrap()
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn spectrum_full_grid() {
    let d = tempfile::tempdir().unwrap();
    let o = nnls(d.path(), &["spectrum", "--A", "1", "--R", "1", "--k-min", "-10", "--k-max", "10", "--samples", "2001"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = rows(d.path(), "spectrum");
    assert_eq!(r.len(), 2001);
    assert_eq!(r[1000]["status"], "punctured");
    let h = header(d.path(), "spectrum");
    assert_eq!(h["schema"], 1);
    assert!(h["determinant_max_residual"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn validation_failures_exit_2_without_files() {
    for args in [
        &["spectrum", "--A", "1", "--R", "1", "--samples", "1"][..],
        &["spectrum", "--A", "0", "--R", "1"],
        &["zeros", "--A", "1"],
        &["asymptote", "--A", "1", "--R", "1", "--xi", "1"],
        &["evolve", "--A", "1", "--R", "1", "--N", "7"],
        &["evolve", "--A", "1", "--R", "1", "--scheme", "leapfrog"],
        &["compare", "--A", "1", "--R", "1", "--xi", "1", "--profile", "plane-wave"],
        &["delta", "--A", "1", "--R", "1", "--xi", "-1"],
    ] {
        let d = tempfile::tempdir().unwrap();
        let o = nnls(d.path(), args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
        assert!(files(d.path()).is_empty(), "{args:?} left files behind");
    }
}

#[test]
fn zeros_examples() {
    let d = tempfile::tempdir().unwrap();
    let o = nnls(d.path(), &["zeros", "--A", "1", "--R", "1"]);
    assert_eq!(code(&o), 0);
    let r = rows(d.path(), "zeros");
    assert_eq!(r.len(), 1);
    assert_eq!(r[0]["n"], "0");
    assert!(!r[0].contains_key("re_p_1"));
    assert!(f(&r[0]["k0"]) > 0.0);

    let o = nnls(d.path(), &["zeros", "--A", "1", "--R", &std::f64::consts::PI.to_string()]);
    assert_eq!(code(&o), 0);
    let r = rows(d.path(), "zeros");
    assert_eq!(r[0]["n"], "1");
    let re = f(&r[0]["re_p_1"]);
    assert!(-0.5 < re && re < -0.25, "{re}");

    let e = tempfile::tempdir().unwrap();
    let o = nnls(e.path(), &["zeros", "--A", "1", "--R", &std::f64::consts::FRAC_PI_2.to_string()]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("boundary"), "{}", stderr(&o));
    assert!(files(e.path()).is_empty());
}

#[test]
fn zeros_sweep_marks_each_row() {
    let d = tempfile::tempdir().unwrap();
    let o = nnls(d.path(), &["zeros", "--A", "1", "--r-min", "0.5", "--r-max", "8", "--r-samples", "16", "--format", "svg"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = rows(d.path(), "zeros");
    assert_eq!(r.len(), 16);
    assert_eq!(r.last().unwrap()["n"], "3");
    assert!(d.path().join("zeros.svg").exists());
}

#[test]
fn sector_counts() {
    for (r, want) in [(1.0, 2), (std::f64::consts::PI, 6), (2.0 * std::f64::consts::PI, 10)] {
        let d = tempfile::tempdir().unwrap();
        let o = nnls(d.path(), &["sectors", "--A", "1", "--R", &r.to_string(), "--format", "svg"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert_eq!(rows(d.path(), "sectors").len(), want);
        let svg = fs::read_to_string(d.path().join("sectors.svg")).unwrap();
        assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    }
}

#[test]
fn asymptote_boundary_point_does_not_stop_run() {
    let d = tempfile::tempdir().unwrap();
    let sec = nnls(d.path(), &["sectors", "--A", "1", "--R", &std::f64::consts::PI.to_string()]);
    assert_eq!(code(&sec), 0);
    // the ray between the m = 1 and m = 0 right sectors is omega_1
    let omega = rows(d.path(), "sectors").iter().find(|r| r["case"] == "iii").unwrap()["lo"].clone();
    let xi = format!("1,{omega},-0.27");
    let o = nnls(
        d.path(),
        &["asymptote", "--A", "1", "--R", &std::f64::consts::PI.to_string(), "--xi", &xi, "--t", "10,40", "--format", "json"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&fs::read(d.path().join("asymptote.json")).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    let data = v["data"].as_array().unwrap();
    assert_eq!(data.len(), 6);
    let status: Vec<&str> = data.iter().map(|r| r["status"].as_str().unwrap()).collect();
    assert_eq!(status[0], "ok");
    assert!(status[2].starts_with("error") && status[3].starts_with("error"), "{status:?}");
    assert_eq!(status[4], "ok");
    assert_eq!(data[0]["case"], "i");
    assert_eq!(data[4]["case"], "iv");
    assert!(data[4]["subcase"].as_u64().unwrap() >= 1);
    assert_eq!(v["failed_points"], 2);
}

#[test]
fn json_round_trips() {
    let d = tempfile::tempdir().unwrap();
    let o = nnls(d.path(), &["asymptote", "--A", "1", "--R", "1", "--xi=-1,1", "--t", "20", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(d.path().join("asymptote.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(v, again);
    // complex values are [re, im] and match the CSV emission bit for bit
    let o = nnls(d.path(), &["asymptote", "--A", "1", "--R", "1", "--xi=-1,1", "--t", "20"]);
    assert_eq!(code(&o), 0);
    let r = rows(d.path(), "asymptote");
    for (row, j) in r.iter().zip(v["data"].as_array().unwrap()) {
        let z = j["value"].as_array().unwrap();
        assert_eq!(f(&row["re_value"]), z[0].as_f64().unwrap());
        assert_eq!(f(&row["im_value"]), z[1].as_f64().unwrap());
    }
}

#[test]
fn delta_boundary_ray_exits_3() {
    let d = tempfile::tempdir().unwrap();
    let o = nnls(d.path(), &["delta", "--A", "1", "--R", "1", "--xi", "0.5", "--samples", "9"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(rows(d.path(), "delta").len(), 9);
    // n = 1 with xi = omega_1 up to the ray tolerance
    let pi = std::f64::consts::PI.to_string();
    let s = nnls(d.path(), &["sectors", "--A", "1", "--R", &pi]);
    assert_eq!(code(&s), 0);
    let omega = rows(d.path(), "sectors").iter().find(|r| r["case"] == "iii").unwrap()["lo"].clone();
    let e = tempfile::tempdir().unwrap();
    let o = nnls(e.path(), &["delta", "--A", "1", "--R", &pi, "--xi", &omega]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn plane_wave_regression() {
    let d = tempfile::tempdir().unwrap();
    let o = nnls(
        d.path(),
        &["evolve", "--A", "1", "--R", "1", "--profile", "plane-wave", "--L", "20", "--N", "256", "--dt", "1e-3", "--t-end", "1"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let exact = (2.0f64.cos(), 2.0f64.sin());
    for r in rows(d.path(), "snapshot_t1") {
        let err = ((f(&r["re_q"]) - exact.0).powi(2) + (f(&r["im_q"]) - exact.1).powi(2)).sqrt();
        assert!(err < 1e-4, "{err}");
        assert!((f(&r["abs_q"]) - 1.0).abs() < 1e-4);
    }
}

#[test]
fn blow_up_exits_4_with_diagnostics() {
    let d = tempfile::tempdir().unwrap();
    let o = nnls(
        d.path(),
        &[
            "evolve", "--A", "2", "--R", "0.5", "--L", "20", "--N", "512", "--dt", "1e-3", "--t-end", "3", "--snapshots",
            "0.5,3",
        ],
    );
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(stderr(&o).contains("blew up"), "{}", stderr(&o));
    let h = header(d.path(), "evolve");
    assert!(h["blowup"]["t"].as_f64().unwrap() < 3.0);
    assert_eq!(rows(d.path(), "evolve").len(), 1);
    assert!(d.path().join("snapshot_t0.5.csv").exists());
}

#[test]
fn compare_reports_window_and_fit() {
    let d = tempfile::tempdir().unwrap();
    let o = nnls(
        d.path(),
        &[
            "compare", "--A", "1", "--R", "1", "--L", "40", "--N", "1024", "--dt", "2e-3", "--t-end", "1.5", "--snapshots",
            "0.5,1,1.5", "--xi=-1,1,8",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = rows(d.path(), "compare");
    assert_eq!(r.len(), 9);
    let by = |xi: &str| r.iter().filter(|x| x["xi"] == xi).collect::<Vec<_>>();
    assert!(by("1.0").iter().all(|x| x["status"] == "ok"));
    assert!(by("8.0").iter().any(|x| x["status"].contains("window")));
    let h = header(d.path(), "compare");
    assert!(h["power_law_fits"]["1"]["exponent"].is_number());
}

#[test]
fn config_file_and_override() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.cfg");
    fs::write(&cfg, "# spectrum run\nA = 1\nR = 2\nsamples = 5\nsamples = 7\nk_min = -2\nk_max = 2\n").unwrap();
    let out = d.path().join("out");
    let o = nnls(&out, &["--config", cfg.to_str().unwrap(), "spectrum"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(rows(&out, "spectrum").len(), 7);
    let o = nnls(&out, &["--config", cfg.to_str().unwrap(), "spectrum", "--samples", "3"]);
    assert_eq!(code(&o), 0);
    let r = rows(&out, "spectrum");
    assert_eq!(r.len(), 3);
    assert_eq!(header(&out, "spectrum")["R"], 2.0);
}

#[test]
fn validate_passes() {
    let d = tempfile::tempdir().unwrap();
    let o = nnls(d.path(), &["--seed", "11", "validate", "--cases", "12"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(rows(d.path(), "validate").iter().all(|r| r["pass"] == "true"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let pi = std::f64::consts::PI.to_string();
    let runs: [Vec<&str>; 6] = [
        vec!["--seed", "5", "validate", "--cases", "8"],
        vec!["spectrum", "--A", "1", "--R", &pi, "--samples", "301", "--format", "svg"],
        vec!["zeros", "--A", "1", "--r-min", "0.3", "--r-max", "7", "--r-samples", "9", "--format", "json"],
        vec!["sectors", "--A", "1", "--R", &pi, "--format", "svg"],
        vec!["asymptote", "--A", "1", "--R", &pi, "--xi=-1,-0.27,0.1,1", "--t", "5,50"],
        vec!["evolve", "--A", "1", "--R", "1", "--L", "20", "--N", "256", "--dt", "2e-3", "--t-end", "1", "--snapshots", "0.5,1"],
    ];
    for args in &runs {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        assert_eq!(code(&nnls(a.path(), args)), 0, "{args:?}");
        assert_eq!(code(&nnls(b.path(), args)), 0, "{args:?}");
        let (fa, fb) = (files(a.path()), files(b.path()));
        assert!(!fa.is_empty());
        assert_eq!(fa, fb, "{args:?} differs between runs");
    }
}
