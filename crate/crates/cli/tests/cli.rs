use std::path::{Path, PathBuf};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tempfile::TempDir;

use vessel_cli::{emit, run, Format, EXIT_FAIL, EXIT_INPUT, EXIT_OK};
use vessel_core::io::{canonical_json, Document, Payload, VesselRecord};
use vessel_core::synth;
use vessel_core::vessel::check_vessel;
use vessel_core::Vessel;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).to_string_lossy().into_owned()
}

fn vessel(args: &[&str]) -> (i32, String) {
    let out = run(std::iter::once("vessel").chain(args.iter().copied()));
    (out.code, out.stdout)
}

fn json_of(stdout: &str) -> Value {
    serde_json::from_str(stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {stdout}"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn write_vessel(dir: &TempDir, name: &str, v: &Vessel) -> String {
    let doc = Document::new(Payload::Vessel(VesselRecord::from_vessel(v)));
    write(dir, name, &canonical_json(&doc.to_json())).to_string_lossy().into_owned()
}

#[test]
fn example_checks_clean() {
    let (code, out) = vessel(&["check-vessel", &data("example1.json")]);
    assert_eq!(code, EXIT_OK, "{out}");
    let r = json_of(&out);
    for key in ["commutator", "colligation1", "colligation2", "input", "output", "linkage"] {
        assert!(r[key].as_f64().unwrap() <= 1e-10, "{key}: {out}");
    }
    assert_eq!(r["pass"], json!(true));
}

#[test]
fn corrupted_gamma_tilde_fails_linkage() {
    let (code, out) = vessel(&["check-vessel", &data("corrupted.json")]);
    assert_eq!(code, EXIT_FAIL, "{out}");
    assert!(json_of(&out)["linkage"].as_f64().unwrap() > 0.0);
}

#[test]
fn discriminant_of_example() {
    let (code, out) = vessel(&["discriminant", &data("example1.json")]);
    assert_eq!(code, EXIT_OK);
    let r = json_of(&out);
    let obj = r.as_object().unwrap();
    assert_eq!(obj.len(), 3, "{out}");
    for (key, want) in [("(0,1)", 1.0), ("(1,1)", -1.0), ("(0,0)", -0.25)] {
        let c = &r[key];
        assert!((c[0].as_f64().unwrap() - want).abs() < 1e-12, "{key}: {out}");
        assert!(c[1].as_f64().unwrap().abs() < 1e-12, "{key}: {out}");
    }
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let text = std::fs::read_to_string(data("example1.json")).unwrap();
    let nan = write(&dir, "nan.json", &text.replacen("[[[1, 0.5]]]", "[[[1e999, 0.5]]]", 1));
    let garbage = write(&dir, "garbage.json", "{not json");
    let version = write(&dir, "version.json", &text.replace("\"1.0\"", "\"0.3\""));
    let ragged = write(&dir, "ragged.json", &text.replace("[[[1, 0]], [[1, 0]]]", "[[[1, 0]], []]"));
    for p in [&nan, &garbage, &version, &ragged] {
        let (code, out) = vessel(&["check-vessel", p.to_str().unwrap()]);
        assert_eq!(code, EXIT_INPUT, "{}: {out}", p.display());
        let r = json_of(&out);
        assert!(r["error"].is_string() && r["detail"].is_string(), "{out}");
    }
    let (code, out) = vessel(&["check-vessel", "/nonexistent/file.json"]);
    assert_eq!(code, EXIT_INPUT);
    assert_eq!(json_of(&out)["error"], json!("SchemaError"));
    let (code, out) = vessel(&["ccf-eval", &data("example1.json"), "--xi1", "1", "--xi2", "0", "--z", "nan,1"]);
    assert_eq!(code, EXIT_INPUT, "{out}");
    let (code, _) = vessel(&["no-such-command"]);
    assert_eq!(code, EXIT_INPUT);
    let (code, out) = vessel(&["--format", "xml", "check-vessel", &data("example1.json")]);
    assert_eq!(code, EXIT_INPUT);
    assert_eq!(json_of(&out)["error"], json!("UnsupportedFormat"));
}

#[test]
fn reports_are_byte_identical() {
    let (coll, ex) = (data("colligation.json"), data("example1.json"));
    let runs: [&[&str]; 3] = [
        &["neg-squares", "--seed", "7", &coll],
        &["simulate", "--seed", "3", &ex],
        &["restore", &ex, "--xi1", "1", "--xi2", "0.5", "--z", "0.3,1"],
    ];
    for args in runs {
        let a = vessel(args);
        assert_eq!(a.0, EXIT_OK, "{args:?}: {}", a.1);
        assert_eq!(a, vessel(args), "{args:?}");
    }
}

#[test]
fn simulate_csv_table() {
    let (code, out) = vessel(&["simulate", &data("example1.json"), "--steps", "4"]);
    assert_eq!(code, EXIT_OK, "{out}");
    let mut rd = csv::Reader::from_reader(out.as_bytes());
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["t1", "t2", "v0_re", "v0_im", "v1_re", "v1_im", "pde_residual"]);
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 16);
    for r in &rows {
        assert!(r[6].parse::<f64>().unwrap() <= 1e-9);
    }
    let (_, json_out) = vessel(&["--format", "json", "simulate", &data("example1.json"), "--steps", "4"]);
    assert_eq!(json_of(&json_out)["rows"].as_array().unwrap().len(), 16);
}

#[test]
fn restore_sweep_csv() {
    let args = ["--csv", "restore", &data("example1.json"), "--xi1", "1", "--xi2", "0.5", "--z", "0.3,1", "--to", "1,2", "--steps", "3"];
    let (code, out) = vessel(&args);
    assert_eq!(code, EXIT_OK, "{out}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], "z_re,z_im,defect,rcond");
}

#[test]
fn realize_then_check_colligation() {
    let (code, out) = vessel(&["realize", &data("realize_input.json")]);
    assert_eq!(code, EXIT_OK, "{out}");
    let r = json_of(&out);
    assert_eq!(r["report"]["negIndex"], json!(2));
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "coll.json", &canonical_json(&r["colligation"]));
    let (code, out) = vessel(&["check-colligation", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{out}");
    let (code, out) = vessel(&["neg-squares", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(json_of(&out)["estimate"], json!(2));
}

#[test]
fn couple_and_decompose_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (parts, whole) = synth::random_chain_vessel(&mut rng, 2, 1, 1, 0).unwrap();
    let dir = TempDir::new().unwrap();
    let a = write_vessel(&dir, "a.json", &parts[0]);
    let b = write_vessel(&dir, "b.json", &parts[1]);
    let (code, out) = vessel(&["couple", &a, &b]);
    assert_eq!(code, EXIT_OK, "{out}");
    let coupled = Document::parse(&out).unwrap().vessel().unwrap();
    assert!(vessel_core::linalg::norm(&(&coupled.a1 - &whole.a1)) < 1e-12);
    let c = write(&dir, "c.json", &out);
    let (code, out) = vessel(&["check-vessel", c.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{out}");

    let (code, out) = vessel(&["decompose", c.to_str().unwrap(), "--trailing", "1"]);
    assert_eq!(code, EXIT_OK, "{out}");
    let r = json_of(&out);
    for key in ["v1", "v2"] {
        let v = Document::parse(&canonical_json(&r[key])).unwrap().vessel().unwrap();
        assert!(check_vessel(&v, 1e-9).pass, "{key}");
    }
    let (code, out) = vessel(&["decompose", c.to_str().unwrap(), "--trailing", "0"]);
    assert_eq!(code, EXIT_INPUT, "{out}");
}

#[test]
fn evaluations_on_example() {
    let (code, out) = vessel(&["jcf-eval", &data("example1.json"), "--l1", "2,0", "--l2", "-0.25,0"]);
    assert_eq!(code, EXIT_OK, "{out}");
    let m = &json_of(&out)["matrix"][0][0];
    let (re, im) = (m[0].as_f64().unwrap(), m[1].as_f64().unwrap());
    assert!((re * re + im * im - 1.0).abs() < 1e-12, "{out}");
    let (code, out) = vessel(&["jcf-eval", &data("example1.json"), "--l1", "2,0", "--l2", "1,0"]);
    assert_eq!(code, EXIT_INPUT);
    assert_eq!(json_of(&out)["error"], json!("NotOnCurve"));
    let (code, out) = vessel(&["ccf-eval", &data("example1.json"), "--xi1", "1", "--xi2", "0", "--z", "0,1"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(json_of(&out)["W"].as_array().unwrap().len(), 2);
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(vessel(&["--help"]).0, EXIT_OK);
    assert_eq!(vessel(&["--version"]).0, EXIT_OK);
}

fn leaf() -> impl Strategy<Value = Value> {
    prop_oneof![
        any::<bool>().prop_map(Value::from),
        any::<i64>().prop_map(Value::from),
        any::<f64>().prop_filter("finite", |x| x.is_finite()).prop_map(Value::from),
        "[a-z ,\"]{0,8}".prop_map(Value::from),
        Just(Value::Null),
    ]
}

fn report() -> impl Strategy<Value = Value> {
    leaf().prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..4).prop_map(Value::from),
            prop::collection::btree_map("[a-zA-Z]{1,6}", inner, 0..4)
                .prop_map(|m| Value::Object(m.into_iter().collect())),
        ]
    })
}

proptest! {
    #[test]
    fn emit_then_parse_is_identity(x in report()) {
        let text = emit(&x, Format::Json).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &x);
        prop_assert_eq!(emit(&back, Format::Json).unwrap(), text);
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_vessel");
    let status = |args: &[&str]| std::process::Command::new(bin).args(args).output().unwrap();
    let ok = status(&["check-vessel", &data("example1.json")]);
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert_eq!(String::from_utf8(ok.stdout).unwrap(), vessel(&["check-vessel", &data("example1.json")]).1);
    assert_eq!(status(&["check-vessel", &data("corrupted.json")]).status.code(), Some(EXIT_FAIL));
    assert_eq!(status(&["check-vessel", "/nonexistent.json"]).status.code(), Some(EXIT_INPUT));
}
