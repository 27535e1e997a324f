use std::path::Path;
use std::process::Command;

fn stratflow(args: &[&str], root: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_stratflow"))
        .args(args)
        .env("STRATFLOW_OUTPUT", root)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn dns_writes_artifacts_and_restarts_from_checkpoint() {
    let root = tempfile::tempdir().unwrap();
    let small = ["--nx", "8", "--ny", "8", "--nz", "8", "--dt", "0.05", "--t-end", "0.5", "--checkpoint-every", "0.25"];
    let mut args = vec!["dns"];
    args.extend(small);
    let out = stratflow(&args, root.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let dir = root.path().join("dns");
    for f in ["metadata.json", "summary.json", "dns.csv", "duhamel.csv", "final_state.ckpt"] {
        assert!(dir.join(f).exists(), "missing {f}");
    }
    let meta = json(&dir.join("metadata.json"));
    assert_eq!(meta["mode"], "dns");
    assert_eq!(meta["config"]["grid"]["nx"], 8);
    let summary = json(&dir.join("summary.json"));
    assert!((summary["final_time"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let mut rows = csv::Reader::from_path(dir.join("dns.csv")).unwrap();
    assert_eq!(rows.headers().unwrap().len(), 19);
    assert_eq!(rows.records().count(), 3);

    let ckpt = dir.join("final_state.ckpt");
    let restart = root.path().join("restart");
    let mut args = vec!["dns", "--from-checkpoint", ckpt.to_str().unwrap(), "--output-dir", restart.to_str().unwrap()];
    args.extend(small);
    let out = stratflow(&args, root.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&restart.join("summary.json"));
    assert!((summary["final_time"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(summary["initial_h_norm"].is_null());
}

#[test]
fn bad_input_exits_nonzero() {
    let root = tempfile::tempdir().unwrap();
    let cfg = root.path().join("bad.json");
    std::fs::write(&cfg, "{ not json").unwrap();
    let out = stratflow(&["dns", "--config", cfg.to_str().unwrap()], root.path());
    assert_eq!(out.status.code(), Some(2));

    let out = stratflow(&["dns", "--nu=-1"], root.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nu"));

    let out = stratflow(&["linear", "--from-checkpoint", "x.ckpt", "--nx", "8", "--ny", "8", "--nz", "8"], root.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn multiplier_scan_summary() {
    let root = tempfile::tempdir().unwrap();
    let out = stratflow(&["verify-multipliers", "--scan-samples", "2000"], root.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = root.path().join("verify-multipliers");
    assert!(dir.join("summary.json").exists());
    let meta = json(&dir.join("metadata.json"));
    assert_eq!(meta["config"]["scan_samples"], 2000);
}
