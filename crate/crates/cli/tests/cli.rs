use std::path::Path;
use std::process::{Command, Output};

use kobayashi_cli::report::*;
use kobayashi_core::format::to_json_pretty;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kobayashi")).args(args).env_remove("KOBAYASHI_THREADS").output().expect("spawn")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Parses a JSON document and checks that writing it back gives the same bytes.
fn round_trip<T: Serialize + DeserializeOwned>(args: &[&str]) -> Envelope<T> {
    let text = stdout(args);
    let doc: Envelope<T> = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{args:?}: {e}\n{text}"));
    assert_eq!(format!("{}\n", to_json_pretty(&doc)), text, "{args:?}");
    doc
}

fn failure(args: &[&str], code: i32) -> ErrorDoc {
    let out = run(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    let doc: ErrorDoc = serde_json::from_str(&err).unwrap();
    assert_eq!(doc.exit_code, code);
    doc
}

/// Column line of a CSV document, after the `#` header lines.
fn csv_columns(text: &str) -> &str {
    text.lines().find(|l| !l.starts_with('#')).unwrap()
}

#[test]
fn delta_examples() {
    let doc: Envelope<DeltaResult> = round_trip(&["delta", "--domain", &data("ball.json"), "--point", "0,0"]);
    assert!((doc.result.delta - 1.0).abs() < 1e-12);
    assert_eq!(doc.header.command, "delta");
    let doc: Envelope<DeltaResult> = round_trip(&["delta", "--domain", &data("siegel2.json"), "--point", "i*e1@r=2", "--dir", "e2"]);
    assert!((doc.result.delta - 1f64.exp()).abs() < 1e-6, "{}", doc.result.delta);
}

#[test]
fn lyapunov_transverse_pair() {
    let doc: Envelope<LyapunovResult> = round_trip(&["lyapunov", "--model", "siegel", "--d", "2", "--v", "e2", "--trange", "2:8"]);
    assert!((doc.result.exponent + 1.0).abs() < 0.05, "{}", doc.result.exponent);
    let doc: Envelope<LyapunovResult> = round_trip(&["lyapunov", "--model", "ball", "--d", "2", "--v", "0.6,0.8", "--shift", "auto"]);
    // radial rays towards different boundary points drift apart
    assert!(doc.result.exponent > 0.0, "{}", doc.result.exponent);
}

#[test]
fn spc_scan_of_the_ball() {
    let doc: Envelope<ScanDoc> = round_trip(&["spc", "--domain", &data("ball.json"), "--samples", "16"]);
    assert_eq!(doc.result.rows.len(), 16);
    assert!(doc.result.rows.iter().all(|r| r.verdict == "ConsistentWithSPC"));
    let doc: Envelope<VerdictDoc> = round_trip(&["spc", "--domain", &data("power2.json"), "--xi", "0,0", "--v", "e2"]);
    assert!((doc.result.exponent - 0.25).abs() < 0.02);
    assert_ne!(doc.result.verdict, "ConsistentWithSPC");
}

#[test]
fn hausdorff_of_nested_balls() {
    let doc: Envelope<HausdorffResult> = round_trip(&["hausdorff", "--a", &data("ball.json"), "--b", &data("ball2.json"), "--R", "10"]);
    assert!((doc.result.distance - 1.0).abs() < 1e-6);
}

#[test]
fn remaining_subcommands_round_trip() {
    let dist: Envelope<DistResult> = round_trip(&["dist", "--domain", &data("ball.json"), "--z1", "0,0", "--z2", "0.5,0"]);
    assert!((dist.result.exact.unwrap() - 0.5f64.atanh()).abs() < 1e-12);
    let steps: Envelope<Vec<RescaleStep>> = round_trip(&["rescale", "--domain", &data("ball.json"), "--xi", "e1", "--v", "e2", "--steps", "2"]);
    assert_eq!(steps.result.len(), 2);
    assert!(steps.result[0].dh.r4.is_none() && steps.result[1].dh.r4.is_some());
    let norm: Envelope<NormalizeResult> = round_trip(&["normalize", "--domain", &data("ball.json"), "--point", "0.9*e1"]);
    assert!(norm.result.kd.passes);
    let berg: Envelope<BergmanResult> = round_trip(&["bergman", "--d", "2", "--z", "0.1,0.2", "--v", "e1"]);
    assert!((berg.result.curvature + 4.0 / 3.0).abs() < 1e-3);
    let sq: Envelope<SqueezeResult> = round_trip(&["squeeze", "--domain", &data("ball.json"), "--point", "0.5*e1"]);
    assert!((sq.result.lower_bound - 1.0 / 3.0).abs() < 1e-6);
}

#[test]
fn csv_columns_per_subcommand() {
    let cases: [(&[&str], &str); 9] = [
        (&["delta", "--domain", &data("ball.json"), "--point", "0,0"], "delta,theta"),
        (&["dist", "--domain", &data("ball.json"), "--z1", "0,0", "--z2", "0.5,0"], "lower,upper,exact"),
        (&["lyapunov", "--model", "siegel", "--d", "2", "--v", "e2"], "t,distance,path"),
        (&["rescale", "--domain", &data("ball.json"), "--xi", "e1", "--v", "e2", "--steps", "2"], "n,r,kd_passes,dH1,dH4,dH16"),
        (&["spc", "--domain", &data("ball.json"), "--samples", "4"], "xi_index,dir_index,exponent,half_width"),
        (&["hausdorff", "--a", &data("ball.json"), "--b", &data("ball2.json"), "--R", "4", "--samples", "256"], "R,samples,distance"),
        (&["bergman", "--d", "1", "--z", "0", "--v", "1"], "d,curvature,klembeck_constant"),
        (&["squeeze", "--domain", &data("ball.json"), "--point", "0,0"], "lower_bound"),
        (&["spc", "--domain", &data("ball.json"), "--xi", "e1", "--v", "e2"], "xi_index,dir_index,exponent,half_width"),
    ];
    for (args, columns) in cases {
        let mut full = vec!["--format", "csv"];
        full.extend_from_slice(args);
        let text = stdout(&full);
        assert!(text.starts_with("# tool=kobayashi "), "{text}");
        assert_eq!(csv_columns(&text), columns);
        let width = columns.split(',').count();
        for row in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
            assert_eq!(row.split(',').count(), width, "{row}");
        }
    }
}

#[test]
fn exit_codes() {
    let doc = failure(&["delta", "--domain", &data("malformed.json"), "--point", "0,0"], 2);
    assert!(!doc.message.is_empty());
    failure(&["delta", "--domain", &data("ball.json"), "--point", "2,0"], 2);
    failure(&["delta", "--domain", &data("ball.json"), "--point", "e3"], 2);
    failure(&["delta", "--domain", "/nonexistent/domain.json", "--point", "0,0"], 2);
    failure(&["frobnicate"], 2);
    failure(&["rescale", "--domain", &data("ball.json"), "--xi", "e1", "--v", "e1"], 2);
    let doc = failure(&["squeeze", "--domain", &data("siegel2.json"), "--point", "i*e1"], 3);
    assert_eq!(doc.error, "UnboundedDomain");
}

#[test]
fn config_is_strict_and_hashed() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"seed": 1, "tolerance": {}}"#).unwrap();
    let bad = bad.display().to_string();
    let doc = failure(&["--config", &bad, "delta", "--domain", &data("ball.json"), "--point", "0,0"], 2);
    assert!(doc.message.contains("tolerance"), "{}", doc.message);

    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"seed": 7}"#).unwrap();
    let good = good.display().to_string();
    let with: Envelope<DeltaResult> = round_trip(&["--config", &good, "delta", "--domain", &data("ball.json"), "--point", "0,0"]);
    let without: Envelope<DeltaResult> = round_trip(&["delta", "--domain", &data("ball.json"), "--point", "0,0"]);
    assert_eq!(with.header.seed, 7);
    assert_ne!(with.header.config_sha256, without.header.config_sha256);
    assert_eq!(without.header.config_sha256, RunConfig::default().sha256());
}

#[test]
fn thread_override_must_be_positive() {
    let out = Command::new(env!("CARGO_BIN_EXE_kobayashi"))
        .args(["bergman", "--d", "1", "--z", "0", "--v", "1"])
        .env("KOBAYASHI_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
