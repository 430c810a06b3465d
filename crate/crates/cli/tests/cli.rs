//! End-to-end checks of the CLI surface: subcommands, formats, exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_atoric"))
}

fn instances() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn atoric")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn newton_prints_the_six_vertices() {
    let file = instances().join("surface-n3.json");
    let out = run(&["newton", file.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    for v in [
        "(0, 4, 16, 2, 0)",
        "(2, 8, 8, 0, 4)",
        "(3, 8, 6, 0, 5)",
        "(7, 6, 0, 1, 8)",
        "(8, 4, 0, 2, 8)",
        "(4, 0, 12, 4, 2)",
    ] {
        assert!(text.contains(v), "missing vertex {} in:\n{}", v, text);
    }
    assert!(text.contains("almost_toric"));
}

#[test]
fn newton_json_is_schema_stable() {
    let file = instances().join("surface-n2.json");
    let out = run(&["newton", file.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["classification"], "almost_toric");
    assert_eq!(v["vertices"].as_array().unwrap().len(), 6);
    assert_eq!(v["lattice_points"].as_array().unwrap().len(), 20);
    // integers serialized as decimal strings
    assert!(v["vertices"][0][0].is_string());
}

#[test]
fn constants_instance_exits_two() {
    let file = instances().join("constants-n1.json");
    for sub in ["newton", "implicitize"] {
        let out = run(&[sub, file.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{} exit code", sub);
        assert!(stdout(&out).contains("not a hypersurface"));
    }
}

#[test]
fn malformed_instance_exits_one() {
    let dir = std::env::temp_dir();
    let path = dir.join("atoric-malformed.json");
    std::fs::write(&path, "{ \"A\": [[1, 2
").unwrap();
    let out = run(&["newton", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    // well-formed JSON, invalid matrix (column sums differ)
    let path2 = dir.join("atoric-badsum.json");
    std::fs::write(&path2, r#"{"A": [[1, 2, 1]], "f": ["1", "1", "x"]}"#).unwrap();
    let out = run(&["newton", path2.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn implicitize_quartic_text() {
    let file = instances().join("surface-n2.json");
    let out = run(&["implicitize", file.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("8*u0^6*u3^6 + 52*u0^5*u1*u2*u3^5"));
    assert!(text.contains("degree: 12"));
    assert!(text.contains("terms: 20"));
    assert!(text.contains("wall time:"));
}

#[test]
fn implicitize_hexagon_has_degree_22_and_24_terms() {
    let file = instances().join("surface-n3.json");
    let out = run(&["implicitize", file.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["degree"], "22");
    assert_eq!(v["terms"], 24);
    assert_eq!(v["orientation_flipped"], false);
}

#[test]
fn implicitize_segment() {
    let file = instances().join("segment-n1.json");
    let out = run(&["implicitize", file.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("u0 - u1"));
}

#[test]
fn degree_all_agree() {
    for (name, want) in [("surface-n3.json", "22 22 22 agree"), ("surface-n2.json", "12 12 12 agree")] {
        let file = instances().join(name);
        let out = run(&["degree", file.to_str().unwrap(), "--method", "all"]);
        assert!(out.status.success(), "{}", name);
        assert!(stdout(&out).contains(want), "{}: {}", name, stdout(&out));
    }
}

#[test]
fn verify_computed_polynomial_passes() {
    let file = instances().join("surface-n2.json");
    let out = run(&["verify", file.to_str().unwrap(), "--trials", "20", "--seed", "5"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("pass"));
}

#[test]
fn verify_tampered_polynomial_exits_four() {
    // The segment's polynomial with the wrong sign does not vanish.
    let dir = std::env::temp_dir();
    let poly_path = dir.join("atoric-tampered.json");
    std::fs::write(
        &poly_path,
        r#"{"terms": [{"coeff": "1", "exps": [1, 0, 0]}, {"coeff": "1", "exps": [0, 1, 0]}]}"#,
    )
    .unwrap();
    let file = instances().join("segment-n1.json");
    let out = run(&[
        "verify",
        file.to_str().unwrap(),
        "--trials",
        "10",
        "--polynomial",
        poly_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn gen_is_deterministic_and_round_trips() {
    let a = run(&["gen", "--n", "3", "--d", "3", "--k", "2", "--seed", "9"]);
    let b = run(&["gen", "--n", "3", "--d", "3", "--k", "2", "--seed", "9"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    // Output parses and validates through the pipeline entry point.
    let dir = std::env::temp_dir();
    let path = dir.join("atoric-gen.json");
    std::fs::write(&path, stdout(&a)).unwrap();
    let out = run(&["degree", path.to_str().unwrap(), "--method", "polygon"]);
    assert!(
        out.status.code() == Some(0) || out.status.code() == Some(2),
        "generated instance should classify cleanly"
    );
}

#[test]
fn gen_impossible_parameters_exit_one() {
    let out = run(&["gen", "--n", "2", "--d", "2", "--k", "1"]);
    assert_eq!(out.status.code(), Some(1));
}
