use std::path::Path;
use std::process::{Command, Output};

fn geoflow(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geoflow"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("GEOFLOW_OUT")
        .output()
        .expect("binary runs")
}

#[test]
fn polygon_square_reports_embedded_loop() {
    let dir = tempfile::tempdir().unwrap();
    let o = geoflow(&["polygon", "--set", "polygon=square"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("polygon.json")).unwrap()).unwrap();
    assert_eq!(v["embedded"], true);
    assert!(v["y0"].as_f64().unwrap() > 0.0 && v["length"].as_f64().unwrap() > 0.0);
}

#[test]
fn periods_csv_is_byte_identical_and_has_limits() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = geoflow(&["periods", "--set", "f=r*sqrt(1-r^2)", "--set", "samples=16"], d.path());
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let ca = std::fs::read(a.path().join("periods.csv")).unwrap();
    let cb = std::fs::read(b.path().join("periods.csv")).unwrap();
    assert_eq!(ca, cb);
    let text = String::from_utf8(ca).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("c,omega,r1,r2"));
    let first = lines.next().unwrap().split(',').next().unwrap();
    assert_eq!(first.split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.path().join("periods.json")).unwrap()).unwrap();
    let lim = v["limits"].as_array().unwrap();
    assert!((lim[0].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-9);
    assert!((lim[1].as_f64().unwrap() - std::f64::consts::PI * 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn json_key_order_is_stable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        assert_eq!(geoflow(&["sweepout-triangle", "--set", "steps=3"], d.path()).status.code(), Some(0));
    }
    let ja = std::fs::read(a.path().join("sweepout_triangle.json")).unwrap();
    let jb = std::fs::read(b.path().join("sweepout_triangle.json")).unwrap();
    assert_eq!(ja, jb);
    let text = String::from_utf8(ja).unwrap();
    assert!(text.find("\"experiment\"").unwrap() < text.find("\"formula_maxima\"").unwrap());
}

#[test]
fn validation_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = geoflow(&["periods", "--set", "f=r*"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("column 3"));
    assert_eq!(geoflow(&["periods", "--set", "bogus=1"], dir.path()).status.code(), Some(1));
    assert_eq!(geoflow(&["periods", "--tol=-1"], dir.path()).status.code(), Some(1));
    assert_eq!(geoflow(&["no-such-experiment"], dir.path()).status.code(), Some(1));
    assert_eq!(geoflow(&["flow", "--set", "center=[5,5]"], dir.path()).status.code(), Some(1));
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"experiment": "polygon"}"#).unwrap();
    assert_eq!(geoflow(&["periods", "--config", cfg.to_str().unwrap()], dir.path()).status.code(), Some(1));
}

#[test]
fn computation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = geoflow(&["toric", "--set", r#"toric={"name": "cp2", "h": "-10*x^2"}"#], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn config_file_and_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let env_out = dir.path().join("from_env");
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"experiment": "paper-numbers", "criteria": [1, 3], "seed": 5}"#).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_geoflow"))
        .args(["paper-numbers", "--config", cfg.to_str().unwrap(), "--out"])
        .arg(dir.path().join("ignored"))
        .env("GEOFLOW_OUT", &env_out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("criterion")).count(), 2);
    assert!(env_out.join("acceptance.csv").exists());
    assert!(!dir.path().join("ignored").exists());
}

#[test]
fn flow_writes_numbered_frames() {
    let dir = tempfile::tempdir().unwrap();
    let o = geoflow(&["flow", "--frames", "10", "--set", "max_time=2", "--set", "center=[0.3,0.1]"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let frames = dir.path().join("frames");
    assert!(frames.join("frame_0000.csv").exists());
    assert!(frames.join("frame_0005.csv").exists());
    let index = std::fs::read_to_string(frames.join("index.csv")).unwrap();
    assert!(index.starts_with("frame,t,file\n"));
}
