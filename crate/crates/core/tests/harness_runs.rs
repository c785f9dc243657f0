use std::fs;
use std::path::Path;

use gsqg_core::harness::{
    run_config, RunManifest, RunOptions, EXIT_CONFIG, EXIT_NOT_GUARANTEED, EXIT_OK, MANIFEST_FILE,
};
use gsqg_core::Error;
use serde_json::Value;

fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(body: &str) -> (tempfile::TempDir, gsqg_core::harness::RunOutcome) {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.json", body);
    let out = run_config(&cfg, &tmp.path().join("out"), &RunOptions::default()).unwrap();
    (tmp, out)
}

const SIM: &str = r#"{"kind":"simulate","n":32,"beta":0.6,"nu":0.5,"multiplier":{"kind":"power","a":0.3},
    "dt":0.005,"t_end":0.05,"output_every":5,"snapshots":true,"modulus_radii":[0.1,0.5,1.0],
    "initial_data":{"type":"random_band","j_lo":1,"j_hi":2,"seed":4,"amp":1}}"#;

#[test]
fn simulate_writes_verified_outputs() {
    let (_tmp, out) = run(SIM);
    assert_eq!(out.exit_code, EXIT_OK);
    for f in [
        "diagnostics.csv",
        "modulus.csv",
        "final.bin",
        "final.bin.json",
        "energy_report.json",
        MANIFEST_FILE,
    ] {
        assert!(out.dir.join(f).exists(), "{f} missing");
    }
    let m = RunManifest::read(&out.dir).unwrap();
    assert!(m.complete);
    assert_eq!(m.kind, "simulate");
    m.verify(&out.dir).unwrap();

    fs::write(out.dir.join("diagnostics.csv"), "tampered").unwrap();
    assert!(matches!(m.verify(&out.dir), Err(Error::Precondition(_))));
}

#[test]
fn simulate_is_reproducible() {
    let (_a, x) = run(SIM);
    let (_b, y) = run(SIM);
    for f in ["diagnostics.csv", "modulus.csv", "final.bin"] {
        assert_eq!(
            fs::read(x.dir.join(f)).unwrap(),
            fs::read(y.dir.join(f)).unwrap(),
            "{f} differs"
        );
    }
}

#[test]
fn seed_override_changes_data() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.json", SIM);
    let a = run_config(&cfg, &tmp.path().join("a"), &RunOptions::default()).unwrap();
    let opts = RunOptions {
        seed: Some(99),
        threads: Some(1),
    };
    let b = run_config(&cfg, &tmp.path().join("b"), &opts).unwrap();
    assert_eq!(b.manifest.seed, Some(99));
    assert_ne!(
        fs::read(a.dir.join("final.bin")).unwrap(),
        fs::read(b.dir.join("final.bin")).unwrap()
    );
}

#[test]
fn schema_errors_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "bad.json",
        r#"{"kind":"constants","alpha":0.3,"beta":0.4,"sigma":0.5,"sigmaa":1}"#,
    );
    match run_config(&cfg, &tmp.path().join("out"), &RunOptions::default()) {
        Err(Error::Config(msg)) => assert!(msg.contains("sigmaa"), "{msg}"),
        other => panic!("expected a config error, got {other:?}"),
    }
    let cfg = write(
        tmp.path(),
        "bad2.json",
        r#"{"kind":"simulate","n":32,"beta":0.6,"nu":-1,
        "multiplier":{"kind":"power","a":0.3},"dt":0.01,"t_end":0.1,
        "initial_data":{"type":"single_mode","k":[1,0],"amp":1}}"#,
    );
    assert!(matches!(
        run_config(&cfg, &tmp.path().join("out2"), &RunOptions::default()),
        Err(Error::Config(_))
    ));
}

#[test]
fn constants_and_eventual_time() {
    let (_t, out) = run(r#"{"kind":"constants","alpha":0.3,"beta":0.4,"sigma":0.5}"#);
    assert_eq!(out.exit_code, EXIT_OK);
    let v: Value =
        serde_json::from_slice(&fs::read(out.dir.join("constants.json")).unwrap()).unwrap();
    assert!(v.to_string().contains("kappa"));

    let (_t, out) = run(r#"{"kind":"eventual-time",
        "alpha_sweep":{"alphas":[0.2,0.1],"beta":0.5,"t_prime":1,"theta0_l2":0.01,"gamma":0.1,"rho":1},
        "beta_sweep":{"betas":[0.8,0.9],"theta0_linf":0.1}}"#);
    assert_eq!(out.exit_code, EXIT_OK);
    let csv = fs::read_to_string(out.dir.join("eventual_time.csv")).unwrap();
    assert!(csv.lines().count() >= 5, "{csv}");
}

#[test]
fn certificates_run() {
    let (_t, out) = run(r#"{"kind":"certify","certificate":{"type":"stationary",
        "constants":{"alpha":0.3,"beta":0.4,"sigma":0.5},"multiplier":{"kind":"power","a":0.3},
        "modulus":{"variant":"holder_log","delta":0.01},"grid":{"lo":1e-4,"hi":100,"points":30}}}"#);
    assert_eq!(out.exit_code, EXIT_OK, "{}", out.summary);
    assert!(out.dir.join("certificate.json").exists() && out.dir.join("margins.csv").exists());

    // γ far above its admissible bound: the verdict is at best unguaranteed
    let (_t, out) = run(r#"{"kind":"certify","certificate":{"type":"stationary",
        "constants":{"alpha":0.3,"beta":0.4,"sigma":0.5},"multiplier":{"kind":"power","a":0.3},
        "modulus":{"variant":"holder_log","delta":0.01,"kappa":0.001,"gamma":10},
        "grid":{"lo":1e-4,"hi":100,"points":30}}}"#);
    assert_ne!(out.exit_code, EXIT_OK);

    let (_t, out) = run(
        r#"{"kind":"certify","certificate":{"type":"appendix","delta":0.1,"alpha":0.2,
        "beta":0.3,"epsilon":1,"multiplier":{"kind":"power","a":0.2},"points":40,"search_delta":true}}"#,
    );
    assert_eq!(out.exit_code, EXIT_OK, "{}", out.summary);
    assert!(out.dir.join("delta_search.json").exists());
}

#[test]
fn moduli_eval_and_bernstein() {
    let (_t, out) = run(
        r#"{"kind":"moduli-eval","modulus":{"type":"appendix","delta":0.25,"lambda":1,
        "alpha":0.3,"beta":0.4},"xi":[0.01,0.1,0.2]}"#,
    );
    assert_eq!(out.exit_code, EXIT_OK);
    let csv = fs::read_to_string(out.dir.join("moduli.csv")).unwrap();
    assert!(csv.starts_with("xi,omega,slope_left,slope_right,curvature"));
    assert_eq!(csv.lines().count(), 4);

    let (_t, out) = run(
        r#"{"kind":"bernstein","multipliers":[{"kind":"power","a":0.3}],"j_lo":1,"j_hi":3,
        "n":64,"samples":2,"seeds":[1,2]}"#,
    );
    assert_eq!(out.exit_code, EXIT_OK);
    assert!(out.dir.join("bernstein.json").exists());
}

fn track(amp: f64) -> String {
    format!(
        r#"{{"kind":"modulus-track","t_offset":0.01,"radii":[0.05,0.2,0.8],
        "simulation":{{"n":32,"beta":0.6,"nu":1,"multiplier":{{"kind":"power","a":0.3}},"dt":0.005,"t_end":0.05,
            "output_every":2,"initial_data":{{"type":"single_mode","k":[1,1],"amp":{amp}}}}},
        "constants":{{"alpha":0.3,"beta":0.6,"sigma":0.5}},
        "family":{{"variant":"eventual","a0":1.0}}}}"#
    )
}

#[test]
fn track_zero_data_is_preserved() {
    let (_t, out) = run(&track(0.0));
    assert_eq!(out.exit_code, EXIT_OK, "{}", out.summary);
    let v: Value = serde_json::from_slice(&fs::read(out.dir.join("track.json")).unwrap()).unwrap();
    assert_eq!(v["outcome"]["status"], "preserved");
}

#[test]
fn track_refuses_large_data() {
    let (_t, out) = run(&track(1e6));
    assert_eq!(out.exit_code, EXIT_NOT_GUARANTEED, "{}", out.summary);
    let v: Value = serde_json::from_slice(&fs::read(out.dir.join("track.json")).unwrap()).unwrap();
    assert_eq!(v["outcome"]["status"], "refused");
}

#[test]
fn missing_config_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let e = run_config(
        &tmp.path().join("nope.json"),
        tmp.path(),
        &RunOptions::default(),
    )
    .unwrap_err();
    assert_eq!(gsqg_core::harness::exit_code_for(&e), EXIT_CONFIG);
}
