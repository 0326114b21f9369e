use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BASE: &str = "grid.n = 16\ntime.t = 0.0025\ntime.dt = 2.5e-4\n";

fn write_cfg(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn oldroyd(args: &[&str], seed: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_oldroyd"));
    c.args(args);
    match seed {
        Some(s) => c.env("OLDROYD_SEED", s),
        None => c.env_remove("OLDROYD_SEED"),
    };
    c.output().unwrap()
}

fn run_cmd(cmd: &str, cfg: &Path, out: &Path) -> Output {
    oldroyd(&[cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], None)
}

fn summary(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

#[test]
fn zero_preset_gives_zero_ledgers() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("zero");
    let o = run_cmd("run", &configs().join("zero.cfg"), &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rd = csv::Reader::from_path(out.join("energy.csv")).unwrap();
    let headers = rd.headers().unwrap().clone();
    let mut rows = 0;
    for rec in rd.records() {
        let rec = rec.unwrap();
        for (h, v) in headers.iter().zip(rec.iter()) {
            if h == "t" || h.starts_with("density_m") {
                continue;
            }
            assert_eq!(v.parse::<f64>().unwrap(), 0.0, "column {h}");
        }
        rows += 1;
    }
    assert_eq!(rows, 11);
    assert_eq!(summary(&out)["status"], "ok");
    assert!(out.join("snapshots/u_final.txt").exists());
}

#[test]
fn small_data_run_reports_contraction_and_slack() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "s.cfg", BASE);
    let out = tmp.path().join("out");
    let o = run_cmd("run", &cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    let ratio = s["metrics"]["contraction_ratio"].as_f64().unwrap();
    assert!(ratio > 0.0 && ratio < 0.9, "{ratio}");
    assert!(s["metrics"]["slack_4_6"].as_f64().unwrap() > 0.0);
    assert!(s["invariants"].as_array().unwrap().iter().all(|c| c["pass"] == true));

    // time column is increasing with one row per level
    let mut rd = csv::Reader::from_path(out.join("energy.csv")).unwrap();
    let t: Vec<f64> = rd.records().map(|r| r.unwrap()[0].parse().unwrap()).collect();
    assert_eq!(t.len(), 11);
    assert!(t.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn runs_are_bitwise_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "s.cfg", BASE);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(run_cmd("run", &cfg, &a).status.code(), Some(0));
    assert_eq!(run_cmd("run", &cfg, &b).status.code(), Some(0));
    for f in ["energy.csv", "convergence.csv", "snapshots/tau_final.txt", "summary.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn band_violation_exits_2_naming_the_hypothesis() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("band");
    let o = run_cmd("run", &configs().join("band_violation.cfg"), &out);
    assert_eq!(o.status.code(), Some(2));
    let s = summary(&out);
    assert_eq!(s["error"]["kind"], "initial-data-hypothesis");
    assert!(s["error"]["message"].as_str().unwrap().contains("m1 <= alpha + eps^2 sigma0 <= M1"));
}

#[test]
fn bad_config_exits_2_with_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "bad.cfg", "grid.n = 16\ngrid.colour = blue\n");
    let out = tmp.path().join("out");
    let o = run_cmd("run", &cfg, &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.cfg:2"));
    assert_eq!(summary(&out)["error"]["kind"], "config-syntax");

    let cfg = write_cfg(tmp.path(), "omega.cfg", "params.omega = 1.5\n");
    assert_eq!(run_cmd("run", &cfg, &out).status.code(), Some(2));
}

#[test]
fn non_convergence_exits_3_keeping_the_history() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "nc.cfg", &format!("{BASE}solver.max_iter = 2\n"));
    let out = tmp.path().join("out");
    let o = run_cmd("run", &cfg, &out);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(summary(&out)["error"]["kind"], "fixed-point-convergence");
    let rows = csv::Reader::from_path(out.join("convergence.csv")).unwrap().records().count();
    assert_eq!(rows, 2);
}

#[test]
fn violated_invariant_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "tight.cfg", &format!("{BASE}budget.b1 = 1e-12\nbudget.b2 = 1e-12\n"));
    let out = tmp.path().join("out");
    let o = run_cmd("run", &cfg, &out);
    assert_eq!(o.status.code(), Some(4));
    let s = summary(&out);
    assert_eq!(s["status"], "invariant-violation");
    assert!(s["violated"].as_array().unwrap().iter().any(|v| v == "invariant-set-membership"));
}

#[test]
fn uniqueness_with_zero_amplitude_reports_zero_energy() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "u.cfg", &format!("{BASE}uniqueness.amplitude = 0\n"));
    let out = tmp.path().join("out");
    let o = oldroyd(
        &["uniqueness", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--jobs", "3"],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rd = csv::Reader::from_path(out.join("gronwall.csv")).unwrap();
    for rec in rd.records() {
        assert_eq!(rec.unwrap()[1].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn uniqueness_envelope_holds_for_small_perturbation() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "u.cfg", &format!("{BASE}uniqueness.amplitude = 1e-4\n"));
    let out = tmp.path().join("out");
    let o = run_cmd("uniqueness", &cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    assert!(s["metrics"]["energy_initial"].as_f64().unwrap() > 0.0);
}

#[test]
fn uniqueness_refuses_delta_above_threshold() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "u.cfg", &format!("{BASE}uniqueness.delta = 100\n"));
    let out = tmp.path().join("out");
    let o = run_cmd("uniqueness", &cfg, &out);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("6.66"), "{err}");
    assert_eq!(summary(&out)["error"]["kind"], "delta-threshold");
}

#[test]
fn probe_is_seeded_and_near_linear() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "p.cfg", BASE);
    let args = |o: &Path| {
        vec![
            "probe".to_string(),
            "--config".into(),
            cfg.to_str().unwrap().into(),
            "--out".into(),
            o.to_str().unwrap().into(),
        ]
    };
    let run = |o: &Path, seed: &str| {
        let a = args(o);
        let a: Vec<&str> = a.iter().map(String::as_str).collect();
        oldroyd(&a, Some(seed))
    };
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    assert_eq!(run(&a, "7").status.code(), Some(0));
    assert_eq!(run(&b, "7").status.code(), Some(0));
    assert_eq!(run(&c, "8").status.code(), Some(0));
    let read = |d: &Path| std::fs::read(d.join("probe.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    assert_eq!(summary(&a)["metrics"]["seed"], 7);
    assert_eq!(run(&a, "x").status.code(), Some(2));
}

#[test]
fn mms_orders_meet_thresholds() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("mms");
    let o = oldroyd(
        &[
            "mms",
            "--config",
            configs().join("smalldata2d.cfg").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--jobs",
            "3",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let table = String::from_utf8_lossy(&o.stdout);
    assert!(table.contains("exact"));
    let m = &summary(&out)["metrics"];
    assert!(m["velocity-space_min_order"].as_f64().unwrap() >= 1.8);
    assert!(m["stress-relaxation-backward-euler_min_order"].as_f64().unwrap() >= 0.9);
    assert_eq!(m["density-rest_exact"], true);
}
