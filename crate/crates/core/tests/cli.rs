use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superlens")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn forward_measure_reconstruct_chain() {
    let dir = tempfile::tempdir().unwrap();
    let fwd = dir.path().join("fwd");
    ok(&[
        "forward", "--eps-re", "16", "--mu-re", "1", "--profile", "smooth", "--delta", "0.01", "--grid-nx", "64",
        "--grid-ny", "33", "--field", "--out", s(&fwd),
    ]);
    assert!(fwd.join("trace.csv").exists() && fwd.join("field.bin").exists());
    let meas = dir.path().join("m.csv");
    ok(&["measure", "--trace", s(&fwd.join("trace.csv")), "--m", "100", "--noise", "0.05", "--seed", "3", "--out", s(&meas)]);
    let text = std::fs::read_to_string(&meas).unwrap();
    assert!(text.contains("# seed = 3"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 102);
    let rec = dir.path().join("rec");
    let o = ok(&["reconstruct", "--input", s(&meas), "--cutoff", "3", "--profile", "smooth", "--delta", "0.01", "--out", s(&rec)]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("rel_l2"));
    for f in ["modes.csv", "reconstruction.csv", "profile.svg", "metrics.json"] {
        assert!(rec.join(f).exists(), "{f}");
    }
}

#[test]
fn upsilon_and_validate() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["upsilon", "--n-max", "20", "--out", s(dir.path())]);
    let t = std::fs::read_to_string(dir.path().join("upsilon.csv")).unwrap();
    assert_eq!(t.lines().count(), 22);
    let o = ok(&["validate", "--draws", "1000"]);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.lines().count() >= 7 && out.lines().all(|l| l.starts_with("PASS")), "{out}");
}

#[test]
fn experiment_with_overrides_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        vec![
            "experiment".to_string(),
            "--builtin".into(),
            "smooth-row2".into(),
            "--grid-nx".into(),
            "32".into(),
            "--grid-ny".into(),
            "17".into(),
            "--seed".into(),
            "11".into(),
            "--cutoff".into(),
            "1,3".into(),
            "--out".into(),
            out.into(),
        ]
    };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let v = args(s(d));
        ok(&v.iter().map(String::as_str).collect::<Vec<_>>());
    }
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 11);
    assert_eq!(manifest["config"]["grid"]["nx"], 32);
    let files = manifest["files"].as_array().unwrap();
    assert!(files.iter().any(|f| f.as_str().unwrap().ends_with("N3/modes.csv")));
    for f in files {
        let f = f.as_str().unwrap();
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // config errors
    assert_eq!(run(&["experiment", "--builtin", "nope", "--out", s(dir.path())]).status.code(), Some(2));
    assert_eq!(run(&["forward", "--profile", "wavy", "--out", s(dir.path())]).status.code(), Some(2));
    assert_eq!(
        run(&["forward", "--eps-re", "16", "--mu-re", "1", "--delta", "0.5", "--grid-nx", "16", "--grid-ny", "9", "--out", s(dir.path())])
            .status
            .code(),
        Some(2)
    );
    // missing input
    let missing = dir.path().join("missing.csv");
    assert_eq!(run(&["reconstruct", "--input", s(&missing), "--cutoff", "3", "--out", s(dir.path())]).status.code(), Some(4));
    // aliasing: 2N + 1 > M
    let fwd = dir.path().join("f");
    ok(&["forward", "--eps-re", "1", "--mu-re", "1", "--grid-nx", "16", "--grid-ny", "9", "--out", s(&fwd)]);
    let meas = dir.path().join("m.csv");
    ok(&["measure", "--trace", s(&fwd.join("trace.csv")), "--m", "10", "--noise", "0", "--out", s(&meas)]);
    assert_eq!(run(&["reconstruct", "--input", s(&meas), "--cutoff", "5", "--out", s(dir.path())]).status.code(), Some(2));
    // unknown config keys are rejected
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"base": "smooth-row3", "grid_size": 4}"#).unwrap();
    assert_eq!(run(&["experiment", "--config", s(&cfg), "--out", s(&dir.path().join("e"))]).status.code(), Some(2));
    std::fs::write(&cfg, r#"{"base": "smooth-row3", "grid": {"nx": 16, "ny_omega": 9, "ny_slab": 9}}"#).unwrap();
    ok(&["experiment", "--config", s(&cfg), "--out", s(&dir.path().join("e"))]);
    assert!(dir.path().join("e/manifest.json").exists());
}
