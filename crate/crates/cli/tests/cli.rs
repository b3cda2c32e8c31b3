use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn folcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_folcat")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn translate_prints_the_image() {
    let o = folcat(&[
        "translate",
        "--morphism",
        &data("h.fol"),
        "--formula",
        "exists x1 . f(x1) = x0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "exists x1 . g(x1, c()) = x0\n");
}

#[test]
fn translate_rejects_formula_outside_source() {
    let o = folcat(&["translate", "--morphism", &data("h.fol"), "--formula", "Q(x0, x0)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn check_laws_reports_seed_and_no_failures() {
    let o = folcat(&["check-laws", "--seed", "42", "--cases", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("seed 42:"), "{text}");
    assert!(text.contains("0 failures"), "{text}");
}

#[test]
fn check_laws_default_seed_is_printed() {
    let o = folcat(&["check-laws", "--cases", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("seed 42:"));
}

#[test]
fn check_laws_is_deterministic() {
    let args = [
        "check-laws",
        "--seed",
        "9",
        "--cases",
        "20",
        "--variant",
        "ordered",
        "--json",
    ];
    let (a, b) = (folcat(&args), folcat(&args));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 9);
    assert_eq!(v["variant"], "ordered");
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn check_laws_unknown_variant() {
    assert_eq!(folcat(&["check-laws", "--variant", "nope"]).status.code(), Some(2));
}

#[test]
fn decompose_half_positive() {
    let o = folcat(&[
        "decompose",
        "--theory",
        "odag",
        "--formula",
        "exists x1 . (x1 + x1 = x0 & zero() < x1)",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "(0, +inf)\n");
}

#[test]
fn decompose_with_parameter_json() {
    let o = folcat(&[
        "decompose",
        "--theory",
        "odag",
        "--formula",
        "x0 = zero() | x1 < x0 + x0",
        "--param",
        "x1=1",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["text"], "{0} ∪ (1/2, +inf)");
    assert_eq!(v["set"][1]["open"][0]["num"], "1");
    assert_eq!(v["set"][1]["open"][0]["den"], "2");
}

#[test]
fn decompose_through_a_morphism() {
    let o = folcat(&[
        "decompose",
        "--theory",
        "odag",
        "--morphism",
        &data("odag_view.fol"),
        "--formula",
        "dbl(x0) < x1",
        "--param",
        "x1=3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "(-inf, 3/2)\n");
}

#[test]
fn decompose_over_quantifier_limit_is_a_resource_error() {
    let o = folcat(&[
        "decompose",
        "--theory",
        "dlo",
        "--formula",
        "exists x1 . exists x2 . exists x3 . exists x4 . x1 < x0",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resource"));
}

#[test]
fn decompose_missing_parameter() {
    let o = folcat(&["decompose", "--theory", "dlo", "--formula", "x1 < x0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reduct_and_transfer() {
    let h = data("h.fol");
    let m = data("m.fol");
    let o = folcat(&["reduct", "-f", &h, "--morphism", &h, "--structure", &m]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "structure M_H : L {\n  domain 2;\n  fun f := table [1, 0];\n  rel P := {(0)};\n}\n"
    );
    let o = folcat(&[
        "check-transfer",
        "-f",
        &h,
        "--morphism",
        &h,
        "--structure",
        &m,
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["formulas"].as_u64().unwrap() > 100);
    assert_eq!(v["counterexamples"].as_array().unwrap().len(), 0);
}

#[test]
fn eval_lists_satisfying_valuations() {
    let h = data("h.fol");
    let m = data("m.fol");
    let o = folcat(&["eval", "-f", &h, "--structure", &m, "--formula", "Q(x0, x1)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "{x0=0, x1=0}\n{x0=1, x1=0}\n");
    let o = folcat(&[
        "eval",
        "-f",
        &h,
        "--structure",
        &m,
        "--formula",
        "Q(x0, c())",
        "--assign",
        "x0=0",
    ]);
    assert_eq!(stdout(&o), "false\n");
}

#[test]
fn validate_language_morphisms() {
    assert_eq!(folcat(&["validate-morphism", &data("h.fol")]).status.code(), Some(0));
    let o = folcat(&["validate-morphism", &data("bad_morphism.fol")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("invalid"));
}

#[test]
fn validate_structure_morphisms() {
    let path = data("str.fol");
    let o = folcat(&["validate-morphism", &path, "--name", "F", "--variant", "omin"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "F: valid in omin\n");
    let o = folcat(&["validate-morphism", &path, "--name", "Fbad", "--variant", "ordered"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("homomorphism"));
}

#[test]
fn str_compose_identity_reading() {
    let path = data("str.fol");
    let o = folcat(&[
        "str-compose",
        "-f",
        &path,
        "--first",
        "F",
        "--second",
        "F",
        "--variant",
        "e",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("alpha := [0, 1, 2];"), "{text}");
    assert!(text.ends_with("valid in e\n"), "{text}");
}

#[test]
fn parse_round_trips_through_the_printer() {
    let o = folcat(&["parse", &data("h.fol"), &data("m.fol")]);
    assert_eq!(o.status.code(), Some(0));
    let dir = std::env::temp_dir().join(format!("folcat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let printed = dir.join("all.fol");
    std::fs::write(&printed, &o.stdout).unwrap();
    let again = folcat(&["parse", printed.to_str().unwrap()]);
    assert_eq!(again.stdout, o.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn parse_error_exits_two_with_position() {
    let dir = std::env::temp_dir().join(format!("folcat-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.fol");
    std::fs::write(&bad, "sig L { fun f/1 }").unwrap();
    let o = folcat(&["parse", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn unknown_command_exits_two() {
    let o = folcat(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn run_examples_all_pass() {
    let o = folcat(&["run-examples"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("ok ")).count(), 4);
    assert_eq!(folcat(&["run-examples", "no-such-bundle"]).status.code(), Some(2));
}
