use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.toml"))
}

fn valdef(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_valdef"));
    cmd.args(args).env_remove("VALDEF_CACHE_DIR");
    if let Some(c) = cache {
        cmd.env("VALDEF_CACHE_DIR", c);
    }
    cmd.output().expect("valdef runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_exit_codes_and_files() {
    let out = tempfile::tempdir().unwrap();
    let o = valdef(
        &["classify", "--config", s(&fixture("as_independent_p2")), "--config", s(&fixture("as_dependent")), "--out", s(out.path()), "--jobs", "2"],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.lines().next().unwrap().starts_with("as_independent_p2: independent"));
    assert!(stdout.contains("as_dependent: dependent"));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.path().join("as_dependent.classify.json")).unwrap()).unwrap();
    assert_eq!(v["verdict"], "dependent");
    assert_eq!(v["I1"], serde_json::json!([]));
    assert_eq!(v["gamma"]["bound"], "-1/1");
    let svg = fs::read_to_string(out.path().join("as_dependent.polygon.svg")).unwrap();
    assert!(svg.contains("stroke=\"red\""));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("p4.toml");
    fs::write(&bad, fs::read_to_string(fixture("as_independent_p2")).unwrap().replace("prime = 2", "prime = 4")).unwrap();
    let o = valdef(&["classify", "--config", s(&bad), "--out", s(dir.path())], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not prime"));

    let o = valdef(&["analyze", "--config", s(&dir.path().join("missing.toml"))], None);
    assert_eq!(o.status.code(), Some(2));

    let o = valdef(&["frobnicate"], None);
    assert_eq!(o.status.code(), Some(2));

    let nostage = dir.path().join("nostage.toml");
    fs::write(&nostage, "prime = 2\nbackend = \"equal-char\"\ncase = \"artin_schreier\"\na = \"t^(-1)\"\n").unwrap();
    let o = valdef(&["analyze", "--config", s(&nostage), "--out", s(dir.path())], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn math_failure_exits_3_and_polygon_needs_cache() {
    let out = tempfile::tempdir().unwrap();
    let o = valdef(&["analyze", "--config", s(&fixture("tower_staged")), "--out", s(out.path())], None);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("stage 1"));

    let o = valdef(&["polygon", "--config", s(&fixture("as_dependent")), "--out", s(out.path())], None);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn outputs_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = valdef(&["analyze", "--config", s(&fixture("as_independent_p3")), "--out", s(d.path())], None);
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["as_independent_p3.report.json", "as_independent_p3.stage1.rho2.svg", "as_independent_p3.stage1.rho2.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn resumed_run_matches_cold_run() {
    let work = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(fixture("as_dependent")).unwrap();
    let short = work.path().join("short").join("as_dependent.toml");
    fs::create_dir_all(short.parent().unwrap()).unwrap();
    fs::write(&short, text.replace("steps = 12", "steps = 8")).unwrap();
    let cache = work.path().join("cache");
    let (warm, cold) = (work.path().join("warm"), work.path().join("cold"));

    let o = valdef(&["analyze", "--config", s(&short), "--out", s(&warm)], Some(&cache));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = valdef(&["analyze", "--config", s(&fixture("as_dependent")), "--out", s(&warm)], Some(&cache));
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("9 verified, 4 new"), "{err}");
    let o = valdef(&["analyze", "--config", s(&fixture("as_dependent")), "--out", s(&cold)], None);
    assert_eq!(o.status.code(), Some(0));
    let f = "as_dependent.report.json";
    assert_eq!(fs::read(warm.join(f)).unwrap(), fs::read(cold.join(f)).unwrap());

    // the cache now serves the polygon command
    let o = valdef(&["polygon", "--config", s(&fixture("as_dependent")), "--rho", "5", "--out", s(&warm)], Some(&cache));
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("(0, -65/32)"));
}

#[test]
fn tampered_cache_is_rejected() {
    let work = tempfile::tempdir().unwrap();
    let cache = work.path().join("cache");
    let o = valdef(&["analyze", "--config", s(&fixture("as_independent_p2")), "--out", s(work.path())], Some(&cache));
    assert_eq!(o.status.code(), Some(0));
    let file = fs::read_dir(&cache).unwrap().next().unwrap().unwrap().path();
    let text = fs::read_to_string(&file).unwrap().replacen("\"gamma\":\"-1/4\"", "\"gamma\":\"-1/3\"", 1);
    fs::write(&file, text).unwrap();
    let o = valdef(&["analyze", "--config", s(&fixture("as_independent_p2")), "--out", s(work.path())], Some(&cache));
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn expand_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ex.toml");
    let text = fs::read_to_string(fixture("as_independent_p2")).unwrap();
    fs::write(&cfg, format!("{text}\n[expand]\nf = \"x^2 + x + t^(-1)\"\nq = \"x + t^(-1/2)\"\n")).unwrap();
    let o = valdef(&["expand", "--config", s(&cfg), "--out", s(dir.path())], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["nu_q"], "-1/2");
    assert_eq!(v["argmin"], serde_json::json!([0, 2]));
    assert_eq!(v["deg_q"], 2);

    fs::write(&cfg, format!("{text}\n[expand]\nf = \"x^^2\"\nq = \"x\"\n")).unwrap();
    let o = valdef(&["expand", "--config", s(&cfg), "--out", s(dir.path())], None);
    assert_eq!(o.status.code(), Some(2));
}
