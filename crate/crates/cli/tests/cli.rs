use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn toric_nl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toric-nl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("toric-nl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn cohomology_of_canonical_on_p3() {
    let out = toric_nl(&["cohomology", "--fan", "catalog:p3", "--divisor", "-4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["command"], "cohomology");
    assert_eq!(r["results"]["h"], serde_json::json!([0, 0, 0, 1]));
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["provenance"][0]["entry"], "p3");
}

#[test]
fn nl_bounds_on_p3() {
    let out = toric_nl(&["nl-bounds", "--fan", "catalog:p3", "--eta", "1", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["results"]["lower_bound"]["value"], 2);
    assert_eq!(r["results"]["upper_bound"]["value"], 4);
    assert_eq!(r["inputs"]["n"], 1);
}

#[test]
fn verify_catalog_exits_zero() {
    let out = toric_nl(&["verify-catalog"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = json(&out);
    assert_eq!(r["results"]["failed"], 0);
    assert!(r["results"]["checks"].as_u64().unwrap() > 50);
}

#[test]
fn hypothesis_failures_exit_two() {
    // 2H is not primitive
    let out = toric_nl(&["nl-bounds", "--fan", "catalog:p3", "--eta", "2", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hypothesis"));
    // eta_0 on P[1,1,2,2] is not Cartier
    let out = toric_nl(&["regularity", "--fan", "catalog:wp1122", "--eta", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn errors_exit_one() {
    assert_eq!(
        toric_nl(&["classgroup", "--fan", "catalog:p4"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        toric_nl(&["cohomology", "--fan", "catalog:p3", "--divisor", "x"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        toric_nl(&["cohomology", "--fan", "catalog:p3", "--divisor", "1,2"])
            .status
            .code(),
        Some(1)
    );
    let missing = toric_nl(&["classgroup", "--fan", "/nonexistent/fan.json"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn fan_files_and_validation() {
    let good = scratch(
        "p1xp1xp1.json",
        r#"{"dim": 3, "rays": [[1,0,0],[-1,0,0],[0,1,0],[0,-1,0],[0,0,1],[0,0,-1]],
            "max_cones": [[0,2,4],[0,2,5],[0,3,4],[0,3,5],[1,2,4],[1,2,5],[1,3,4],[1,3,5]]}"#,
    );
    let out = toric_nl(&["classgroup", "--fan", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["results"]["picard_rank"], 3);
    assert_eq!(r["results"]["fano"], true);
    assert_eq!(r["provenance"], serde_json::json!([]));

    // O(-2,-2,-2) is the canonical class: h^3 = 1
    let out = toric_nl(&[
        "cohomology",
        "--fan",
        good.to_str().unwrap(),
        "--basis",
        "rays",
        "--divisor",
        "-1,-1,-1,-1,-1,-1",
    ]);
    assert_eq!(json(&out)["results"]["h"], serde_json::json!([0, 0, 0, 1]));

    let bad = scratch(
        "half.json",
        r#"{"dim": 3, "rays": [[1,0,0],[0,1,0],[0,0,1],[-1,-1,-1]], "max_cones": [[0,1,2],[0,1,3]]}"#,
    );
    let out = toric_nl(&["validate", "--fan", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["results"]["validation"]["valid"], false);
}

#[test]
fn reports_are_reproducible() {
    let args = [
        "multmap",
        "--fan",
        "catalog:p3",
        "--divisor",
        "5",
        "--eta",
        "1",
        "--section",
        "random",
        "--seed",
        "11",
    ];
    let a = toric_nl(&args);
    let b = toric_nl(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    assert_eq!(r["seed"], 11);
    assert_eq!(r["results"]["surjective"], true);
    assert_eq!(r["results"]["note"], "quasi-smoothness assumed (generic)");
}

#[test]
fn lines_and_loci() {
    let out = toric_nl(&["lines", "--fan", "catalog:blowup-p3-line", "--eta", "1,1"]);
    let r = json(&out);
    let classes = r["results"]["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 2);

    let out = toric_nl(&[
        "line-locus",
        "--fan",
        "catalog:wp1122",
        "--eta",
        "2",
        "--n",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    for row in r["results"]["loci"].as_array().unwrap() {
        assert_eq!(row["locus"]["codim"], 4);
        assert_eq!(row["locus"]["hilb_dim"], 3);
    }
    let out = toric_nl(&[
        "syzygy-check",
        "--fan",
        "catalog:p1xp2",
        "--eta",
        "1,1",
        "--n",
        "2",
    ]);
    assert_eq!(json(&out)["results"]["vanishing_asserted"], true);
}

#[test]
fn pretty_output_and_thread_cap() {
    let out = Command::new(env!("CARGO_BIN_EXE_toric-nl"))
        .args(["oda", "--fan", "catalog:p1xp2", "--bound", "2", "--pretty"])
        .env("NL_TORIC_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("command: oda"));
    assert!(text.contains("failures: []"));

    let out = Command::new(env!("CARGO_BIN_EXE_toric-nl"))
        .args(["classgroup", "--fan", "catalog:p3"])
        .env("NL_TORIC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
