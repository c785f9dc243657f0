use std::fs;
use std::process::Command;

fn gsqg(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gsqg"))
        .args(args)
        .output()
        .unwrap()
}

fn setup(body: &str) -> (tempfile::TempDir, String, String) {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.json");
    fs::write(&cfg, body).unwrap();
    let out = tmp.path().join("out");
    let (c, o) = (
        cfg.to_str().unwrap().to_owned(),
        out.to_str().unwrap().to_owned(),
    );
    (tmp, c, o)
}

const CONSTANTS: &str = r#"{"kind":"constants","alpha":0.3,"beta":0.4,"sigma":0.5}"#;

#[test]
fn constants_succeeds() {
    let (_t, cfg, out) = setup(CONSTANTS);
    let r = gsqg(&[
        "constants",
        "--config",
        &cfg,
        "--out",
        &out,
        "--threads",
        "1",
    ]);
    assert_eq!(
        r.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&r.stderr)
    );
    assert!(std::path::Path::new(&out).join("manifest.json").exists());
    assert!(String::from_utf8_lossy(&r.stdout).contains("exit 0"));
}

#[test]
fn kind_mismatch_is_a_config_error() {
    let (_t, cfg, out) = setup(CONSTANTS);
    assert_eq!(
        gsqg(&["simulate", "--config", &cfg, "--out", &out])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn malformed_config_is_a_config_error() {
    let (_t, cfg, out) = setup(r#"{"kind":"constants","alpha":"x"}"#);
    let r = gsqg(&["constants", "--config", &cfg, "--out", &out]);
    assert_eq!(r.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&r.stderr).contains("expected f64"));
}

#[test]
fn blow_up_exits_5() {
    let (_t, cfg, out) = setup(
        r#"{"kind":"simulate","n":32,"beta":0.6,"nu":0,"multiplier":{"kind":"power","a":0.3},
        "dt":1.0,"t_end":200,"initial_data":{"type":"random_band","j_lo":1,"j_hi":2,"seed":1,"amp":1e4}}"#,
    );
    let r = gsqg(&["simulate", "--config", &cfg, "--out", &out]);
    assert_eq!(
        r.status.code(),
        Some(5),
        "{}",
        String::from_utf8_lossy(&r.stdout)
    );
    let m = fs::read_to_string(std::path::Path::new(&out).join("manifest.json")).unwrap();
    assert!(m.contains("\"complete\": false"), "{m}");
}

#[test]
fn missing_arguments_are_rejected() {
    assert_ne!(gsqg(&["certify"]).status.code(), Some(0));
}
