use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const REFERENCE_FAMILY: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures/fig5_family.json");

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_braidcomplex"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("stdout is not json ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

fn theta(dir: &TempDir, m: usize) -> PathBuf {
    let p = dir.path().join(format!("theta{m}.json"));
    let o = run(&["gen", "theta", "--m", &m.to_string(), "-o", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_stats() {
    let dir = TempDir::new().unwrap();
    let g = theta(&dir, 5);
    let o = run(&["build", "--graph", s(&g), "--strands", "3", "--stats"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), r#"{"chi":-5,"f":[35,100,60]}"#);
}

#[test]
fn verify_reference_family() {
    let dir = TempDir::new().unwrap();
    let g = theta(&dir, 5);
    let o = run(&["lasheras", "verify", "--graph", s(&g), "--strands", "3", "--family", REFERENCE_FAMILY]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["zero"], true);
    assert_eq!(r["xprime"]["edges"], 40);
}

#[test]
fn flipped_family_is_nonzero() {
    let dir = TempDir::new().unwrap();
    let g = theta(&dir, 5);
    let mut fam: Value = serde_json::from_str(&std::fs::read_to_string(REFERENCE_FAMILY).unwrap()).unwrap();
    fam["families"]["ab1"]["orientation"] = "ccw".into();
    let p = dir.path().join("flipped.json");
    std::fs::write(&p, fam.to_string()).unwrap();
    let o = run(&["lasheras", "verify", "--graph", s(&g), "--strands", "3", "--family", s(&p)]);
    assert_eq!(code(&o), 1);
    let r = json(&o);
    assert_eq!((r["zero"].clone(), r["coboundary"].clone(), r["nonzero"].clone()), (false.into(), true.into(), 8.into()));
    assert_eq!(r["flip_certificate"], serde_json::json!(["ab1"]));
}

#[test]
fn incomplete_family_is_a_precondition_failure() {
    let dir = TempDir::new().unwrap();
    let g = theta(&dir, 5);
    let mut fam: Value = serde_json::from_str(&std::fs::read_to_string(REFERENCE_FAMILY).unwrap()).unwrap();
    fam["families"].as_object_mut().unwrap().remove("b34");
    let p = dir.path().join("partial.json");
    std::fs::write(&p, fam.to_string()).unwrap();
    let o = run(&["lasheras", "verify", "--graph", s(&g), "--strands", "3", "--family", s(&p)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("b34"));
}

#[test]
fn non_planar_links() {
    let dir = TempDir::new().unwrap();
    let g = theta(&dir, 6);
    let o = run(&["lasheras", "verify", "--graph", s(&g), "--strands", "3", "--family", REFERENCE_FAMILY]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["witness"]["kind"], "K33");
    let o = run(&["links", "--graph", s(&g), "--strands", "3", "--check-planar"]);
    assert_eq!(code(&o), 1);
    assert!(json(&o).as_array().unwrap().iter().any(|r| r["planar"] == false));
}

#[test]
fn search_outcomes() {
    let dir = TempDir::new().unwrap();
    let g = theta(&dir, 5);
    let out = dir.path().join("found.json");
    let o = run(&["lasheras", "search", "--graph", s(&g), "--strands", "3", "--seed", "11", "-o", s(&out)]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["outcome"], "found");
    let o = run(&["lasheras", "verify", "--graph", s(&g), "--strands", "3", "--family", s(&out)]);
    assert_eq!(code(&o), 0);
    let o = run(&["lasheras", "search", "--graph", s(&g), "--strands", "3", "--budget-ms", "0"]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["outcome"], "timeout");
}

#[test]
fn same_seed_same_output() {
    let dir = TempDir::new().unwrap();
    let g = theta(&dir, 5);
    let args = ["lasheras", "search", "--graph", s(&g), "--strands", "3", "--seed", "5"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn subcomplex_check() {
    let dir = TempDir::new().unwrap();
    let g = theta(&dir, 7);
    let o = run(&["sub", "check", "--ambient", s(&g), "--sub", "a,b,1,2,3,4", "--strands", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["full"], true);
    let o = run(&["sub", "check", "--ambient", s(&g), "--sub", "a,1", "--strands", "3"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn homology_and_xprime() {
    let dir = TempDir::new().unwrap();
    let g = theta(&dir, 4);
    let o = run(&["homology", "--graph", s(&g), "--strands", "3", "--coeff", "z"]);
    assert_eq!(
        String::from_utf8_lossy(&o.stdout).trim(),
        r#"{"H":[{"rank":1,"torsion":[]},{"rank":6,"torsion":[]},{"rank":1,"torsion":[]}],"coeff":"Z"}"#
    );
    let o = run(&["lasheras", "xprime", "--graph", s(&g), "--strands", "3"]);
    assert_eq!(json(&o)["edges"].as_array().unwrap().len(), 0);
}

#[test]
fn dot_exports_are_stable() {
    let dir = TempDir::new().unwrap();
    let g = theta(&dir, 5);
    let link = ["export", "dot", "--graph", s(&g), "--strands", "3", "--object", "link", "--vertex", "ab1"];
    let a = run(&link);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, run(&link).stdout);
    let text = String::from_utf8_lossy(&a.stdout);
    assert_eq!(text.lines().filter(|l| l.ends_with(';') && !l.contains("--")).count(), 8);
    let xp = run(&["export", "dot", "--graph", s(&g), "--strands", "3", "--object", "xprime"]);
    assert_eq!(String::from_utf8_lossy(&xp.stdout).matches(" -- ").count(), 40);
    let j = run(&["export", "json", "--graph", s(&g), "--strands", "3"]);
    assert_eq!(json(&j)["cells"]["2"].as_array().unwrap().len(), 60);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["build", "--strands", "3"])), 64);
    assert_eq!(code(&run(&["homology", "--graph", "x.json", "--strands", "3", "--coeff", "z5"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn missing_file() {
    let o = run(&["build", "--graph", "/nonexistent/graph.json", "--strands", "3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("nonexistent"));
}
