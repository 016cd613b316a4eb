use std::path::PathBuf;
use std::process::Command;

use kosmann_core::clifford::GammaRep;
use kosmann_core::liealg::Signature;
use nalgebra::{Complex, DVector};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout)
            .unwrap_or_else(|e| panic!("bad JSON ({e}):\n{}\n{}", self.stdout, self.stderr))
    }
}

fn kosmann(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_kosmann")).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).to_string_lossy().into_owned()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn spinor_of(v: &Value) -> Vec<Complex<f64>> {
    v.as_array().unwrap().iter().map(|z| Complex::new(f(&z[0]), f(&z[1]))).collect()
}

#[test]
fn decompose_matches_golden_file() {
    let run = kosmann(&["decompose", "--matrix", "1,2;3,4", "--signature", "1,1"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let golden = std::fs::read_to_string(fixture("decompose_1_1.json")).unwrap();
    assert_eq!(run.stdout, golden);
}

#[test]
fn decompose_identity() {
    let report = kosmann(&["decompose", "--matrix", "1,0;0,1", "--signature", "2,0"]).json();
    assert_eq!(f(&report["trace_coefficient"]), 1.0);
    assert_eq!(f(&report["reconstruction_residual"]), 0.0);
    assert_eq!(report["antisymmetric"], serde_json::json!([[0.0, 0.0], [0.0, 0.0]]));
    assert_eq!(report["pass"], Value::Bool(true));
}

#[test]
fn malformed_matrix_is_an_input_error() {
    for bad in ["1,2;3", "1,a;3,4", ""] {
        let run = kosmann(&["decompose", "--matrix", bad, "--signature", "1,1"]);
        assert_eq!(run.code, 2, "{bad}");
        assert!(run.stderr.starts_with("error:"), "{}", run.stderr);
        assert!(run.stdout.is_empty());
    }
}

#[test]
fn rotation_on_constant_spinor() {
    let run = kosmann(&[
        "lie",
        "--file",
        &fixture("euclidean2.geom"),
        "--flavour",
        "spinor-kosmann",
        "--field",
        "rotation",
        "--object",
        "constant",
        "--point",
        "0.3,-0.7",
        "--cross-check",
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let report = run.json();
    let rep = GammaRep::new(Signature::euclidean(2));
    let psi = DVector::from_vec(vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)]);
    let expected = (rep.gamma(0) * rep.gamma(1)) * &psi * Complex::new(-0.5, 0.0);
    let got = spinor_of(&report["result"]);
    for (g, e) in got.iter().zip(expected.iter()) {
        assert!((g - e).norm() <= 1e-12, "{got:?} vs {expected:?}");
    }
    assert_eq!(report["cross_check"]["against"], "spinor-covariant");
    assert!(f(&report["cross_check"]["residual"]) <= 1e-12);
}

#[test]
fn reductive_metric_vanishes_on_every_fixture() {
    let cases = [
        ("euclidean2.geom", "shear", "0.2,0.4"),
        ("polar.geom", "xi", "1.5,0.3"),
        ("minkowski2.geom", "dilation", "0.3,-0.2"),
        ("minkowski4.geom", "boost", "0.1,0.2,0.3,0.4"),
    ];
    for (file, field, point) in cases {
        let run = kosmann(&[
            "lie",
            "--file",
            &fixture(file),
            "--flavour",
            "reductive-metric",
            "--field",
            field,
            "--point",
            point,
        ]);
        assert_eq!(run.code, 0, "{file}: {}", run.stderr);
        let report = run.json();
        assert_eq!(report["pass"], Value::Bool(true), "{file}");
        assert!(f(&report["max_abs"]) <= 1e-8, "{file}");
        let natural =
            kosmann(&["lie", "--file", &fixture(file), "--flavour", "natural", "--field", field, "--point", point])
                .json();
        assert_eq!(natural["inputs"]["object"], "metric");
    }
}

#[test]
fn natural_metric_derivative_of_non_killing_field_is_nonzero() {
    let report = kosmann(&[
        "lie",
        "--file",
        &fixture("polar.geom"),
        "--flavour",
        "natural",
        "--field",
        "xi",
        "--point",
        "1.5,0.3",
    ])
    .json();
    let comps = report["result"]["components"].as_array().unwrap();
    assert!(comps.iter().map(f).fold(0.0_f64, |a, b| a.max(b.abs())) >= 1e-3);
}

#[test]
fn lichnerowicz_needs_a_killing_field() {
    let file = fixture("minkowski2.geom");
    let run = kosmann(&[
        "lie",
        "--file",
        &file,
        "--flavour",
        "lichnerowicz",
        "--field",
        "dilation",
        "--object",
        "psi",
        "--point",
        "0.3,0.4",
    ]);
    assert_eq!(run.code, 3);
    assert!(run.stderr.contains("residual"), "{}", run.stderr);

    let killing = kosmann(&[
        "lie",
        "--file",
        &file,
        "--flavour",
        "lichnerowicz",
        "--field",
        "boost",
        "--object",
        "psi",
        "--point",
        "0.3,0.4",
    ]);
    let kosmann_form = kosmann(&[
        "lie",
        "--file",
        &file,
        "--flavour",
        "spinor-kosmann",
        "--field",
        "boost",
        "--object",
        "psi",
        "--point",
        "0.3,0.4",
    ]);
    assert_eq!(killing.code, 0);
    for (a, b) in spinor_of(&killing.json()["result"]).iter().zip(spinor_of(&kosmann_form.json()["result"])) {
        assert!((a - b).norm() <= 1e-9);
    }
}

#[test]
fn precondition_errors_exit_three() {
    let file = fixture("minkowski2.geom");
    let unknown = kosmann(&["lie", "--file", &file, "--flavour", "natural", "--field", "missing", "--point", "0,0"]);
    assert_eq!(unknown.code, 3);
    assert!(unknown.stderr.contains("missing"));
    let outside = kosmann(&["lie", "--file", &file, "--flavour", "natural", "--field", "boost", "--point", "5,0"]);
    assert_eq!(outside.code, 3);
    let wrong_dim = kosmann(&["lie", "--file", &file, "--flavour", "natural", "--field", "boost", "--point", "0,0,0"]);
    assert_eq!(wrong_dim.code, 2);
}

#[test]
fn cross_checks_against_oracles() {
    let density = kosmann(&[
        "lie",
        "--file",
        &fixture("minkowski2.geom"),
        "--flavour",
        "density",
        "--field",
        "boost",
        "--object",
        "rho",
        "--point",
        "0.3,0.4",
        "--cross-check",
    ])
    .json();
    assert_eq!(density["cross_check"]["against"], "flow-oracle");
    assert!(f(&density["cross_check"]["residual"]) <= 1e-4);

    let flow = kosmann(&[
        "lie",
        "--file",
        &fixture("polar.geom"),
        "--flavour",
        "flow-oracle",
        "--field",
        "xi",
        "--object",
        "psi",
        "--point",
        "1.5,0.3",
        "--cross-check",
    ])
    .json();
    assert_eq!(flow["cross_check"]["against"], "spinor-kosmann");
    assert!(f(&flow["cross_check"]["residual"]) <= 1e-3);
}

#[test]
fn gauge_natural_with_pure_vertical_part() {
    let run = kosmann(&[
        "lie",
        "--file",
        &fixture("euclidean2.geom"),
        "--flavour",
        "spinor-gauge",
        "--object",
        "constant",
        "--xi-frame",
        "0,0",
        "--vertical",
        "0,1;-1,0",
        "--point",
        "0.3,0.4",
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let got = spinor_of(&run.json()["result"]);
    assert!(got.iter().any(|z| z.norm() > 0.1));
    let missing = kosmann(&[
        "lie",
        "--file",
        &fixture("euclidean2.geom"),
        "--flavour",
        "spinor-gauge",
        "--object",
        "constant",
        "--point",
        "0,0",
    ]);
    assert_eq!(missing.code, 2);
}

#[test]
fn verify_with_zero_samples_is_an_empty_pass() {
    let run = kosmann(&["verify", "--samples", "0"]);
    assert_eq!(run.code, 0);
    let report = run.json();
    assert_eq!(report["suites"], serde_json::json!([]));
    assert_eq!(report["pass"], Value::Bool(true));
}

#[test]
fn verify_is_deterministic_and_passes() {
    let args = ["verify", "--file", &fixture("polar.geom"), "--seed", "3", "--samples", "6"];
    let (a, b) = (kosmann(&args), kosmann(&args));
    assert_eq!(a.code, 0, "{}", a.stdout);
    assert_eq!(a.stdout, b.stdout);
    let other_seed = kosmann(&["verify", "--file", &fixture("polar.geom"), "--seed", "4", "--samples", "6"]);
    assert_ne!(a.stdout, other_seed.stdout);
}

#[test]
fn builtin_verify_passes_on_default_seed() {
    let run = kosmann(&["verify", "--samples", "20"]);
    assert_eq!(run.code, 0, "{}", run.stdout);
    assert!(run.json()["suites"].as_array().unwrap().len() > 20);
}

#[test]
fn corrupted_metric_is_a_load_error() {
    let dir = std::env::temp_dir().join(format!("kosmann-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.geom");
    let text = std::fs::read_to_string(fixture("euclidean2.geom")).unwrap().replacen("1 0\n", "\"1 +* y\" 0\n", 1);
    std::fs::write(&path, text).unwrap();
    let path = path.to_string_lossy().into_owned();
    let run = kosmann(&["verify", "--file", &path]);
    assert_eq!(run.code, 2, "{}", run.stderr);
    assert!(run.stderr.contains("broken.geom"), "{}", run.stderr);
    let lie = kosmann(&["lie", "--file", &path, "--flavour", "natural", "--field", "rotation", "--point", "0,0"]);
    assert_eq!(lie.code, 2);
    let missing = kosmann(&["verify", "--file", "/nonexistent/file.geom"]);
    assert_eq!(missing.code, 2);
}

const GENERIC_A: &str = r#"{"alpha":[[1.2,0.1],[-0.3,0.9]],"a":[[1.1,0.2],[0.0,0.8]],"theta":[[[0.1,0.2],[0.3,-0.1]],[[0.0,0.5],[-0.2,0.1]]]}"#;
const GENERIC_B: &str = r#"{"alpha":[[0.8,-0.2],[0.4,1.1]],"a":[[0.9,-0.1],[0.3,1.2]],"theta":[[[-0.2,0.1],[0.0,0.3]],[[0.4,0.0],[0.1,-0.3]]]}"#;

#[test]
fn jet_identity_product_is_identity() {
    let report = kosmann(&["jet", "--group", "so:1,1", "--op", "mul", "--g1", "identity", "--g2", "identity"]).json();
    assert_eq!(report["result"]["alpha"], serde_json::json!([[1.0, 0.0], [0.0, 1.0]]));
    assert_eq!(report["result"]["a"], serde_json::json!([[1.0, 0.0], [0.0, 1.0]]));
    assert!(report.get("oracle_residual").is_none());
}

#[test]
fn jet_generic_product_against_oracle() {
    let run = kosmann(&["jet", "--group", "gl:2", "--op", "mul", "--g1", GENERIC_A, "--g2", GENERIC_B, "--oracle"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(f(&run.json()["oracle_residual"]) <= 1e-6);
    let inv = kosmann(&["jet", "--group", "gl:2", "--op", "inv", "--g1", GENERIC_A]).json();
    assert!(f(&inv["check_residual"]) <= 1e-12);
}

#[test]
fn jet_actions() {
    let tau =
        kosmann(&["jet", "--group", "gl:2", "--op", "act-tau", "--g1", GENERIC_A, "--nu", "1,0", "--v", "0,1;0,0"]);
    assert_eq!(tau.code, 3);

    let kernel =
        r#"{"alpha":[[1.2,0.1],[-0.3,0.9]],"a":[[1,0],[0,1]],"theta":[[[0.1,0.2],[0.3,-0.1]],[[0.0,0.5],[-0.2,0.1]]]}"#;
    let args =
        |op: &'static str| ["jet", "--group", "gl:2", "--op", op, "--g1", kernel, "--nu", "1,-2", "--v", "0,1;0.5,0"];
    let (v, t) = (kosmann(&args("act-v")).json(), kosmann(&args("act-tau")).json());
    assert_eq!(v["result"], t["result"]);

    let vert = kosmann(&["jet", "--group", "gl:2", "--op", "act-vert", "--g1", GENERIC_A, "--v", "0,1;0.5,0"]);
    assert_eq!(vert.code, 0, "{}", vert.stderr);

    let not_member = kosmann(&["jet", "--group", "so:2", "--op", "inv", "--g1", GENERIC_A]);
    assert_eq!(not_member.code, 3);
    let bad_group = kosmann(&["jet", "--group", "u:2", "--op", "inv", "--g1", "identity"]);
    assert_eq!(bad_group.code, 2);
}
