use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn spancat(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_spancat"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn spancat");
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn on_file(args: &[&str], file: &str) -> (i32, String) {
    let path = data(file);
    let mut all = args.to_vec();
    all.push(path.to_str().unwrap());
    let out = spancat(&all, None);
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn json(args: &[&str], file: &str) -> (i32, serde_json::Value) {
    let mut all = vec!["--output", "json"];
    all.extend_from_slice(args);
    let (code, out) = on_file(&all, file);
    (code, serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}")))
}

#[test]
fn classify_reports_flags_and_witnesses() {
    let (code, out) = on_file(&["classify"], "arrows.cat");
    assert_eq!(code, 0);
    assert!(out.contains("bifib: true"));
    assert!(out.contains("gray: false"));
    let (code, v) = json(&["classify"], "arrows.cat");
    assert_eq!(code, 0);
    assert_eq!(v["bifib"], true);
    assert_eq!(v["witnesses"]["gray"][0], "no lift of (id_0,u) at a00");
}

#[test]
fn dualize_output_feeds_classify() {
    let (code, dual) = on_file(&["dualize"], "arrows.cat");
    assert_eq!(code, 0);
    let out = spancat(&["classify", "-"], Some(&dual));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("cocartesianFibration: true"), "{text}");
    assert!(text.contains("bifib: false"));
}

#[test]
fn straighten_then_unstraighten() {
    let (code, diagram) = on_file(&["straighten"], "arrows.cat");
    assert_eq!(code, 0);
    let out = spancat(&["unstraighten", "-"], Some(&diagram));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn span_of_the_square() {
    let (code, v) = json(&["--seed", "7", "span"], "square.cat");
    assert_eq!(code, 0);
    assert_eq!((v["objects"].as_u64(), v["morphisms"].as_u64()), (Some(4), Some(9)));
    assert_eq!(v["seed"], 7);
    let doc = v["document"].as_str().unwrap();
    let out = spancat(&["validate", "-"], Some(doc));
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn mates_of_the_galois_transformation() {
    let (code, v) = json(&["mate"], "galois.cat");
    assert_eq!(code, 0);
    assert_eq!(v["agrees_with_dualization"], true);
    assert_eq!(v["round_trip"], true);
    assert_eq!(v["mate_cells"][0], "f 0 u");
}

#[test]
fn monoidal_mate_of_the_collapse() {
    let (code, v) = json(&["monoidal-mate"], "collapse.cat");
    assert_eq!(code, 0);
    assert_eq!(v["lax_strong"], true);
    assert_eq!(v["oplax_strong"], false);
    assert_eq!(v["delta0"], "u");
}

#[test]
fn parse_errors_exit_with_usage() {
    let text = "CATEGORY Z\nOBJECTS\nx\nMORPHISMS\ng x x\nCOMPOSE\ng g\nEND\n";
    let out = spancat(&["validate", "-"], Some(text));
    assert_eq!(out.status.code(), Some(2));
    let all = format!("{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr));
    assert!(all.contains("line 7, column 1"), "{all}");
    let out = spancat(&["classify", "/nonexistent/doc.cat"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn wrong_kind_of_document_is_a_usage_error() {
    let (code, _) = on_file(&["classify"], "square.cat");
    assert_eq!(code, 2);
}

#[test]
fn budget_exhaustion_has_its_own_exit_code() {
    let (code, v) = json(&["--budget", "1", "straighten"], "arrows.cat");
    assert_eq!(code, 3);
    assert_eq!(v["error"], "BudgetExceeded");
}

#[test]
fn selftest_single_criterion() {
    let out = spancat(&["selftest", "--only", "1"], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("criterion 1: PASS"));
}
