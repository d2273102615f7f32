use std::fs;
use std::path::{Path, PathBuf};

use mirrorext::{load_bundle, run_command, CommandOutput, Payload};
use mirrorext_core::Tolerances;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> CommandOutput {
    let mut argv = vec!["mirrorext"];
    argv.extend_from_slice(args);
    run_command(argv)
}

fn temp_path(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn generated_data_checks_clean() {
    let dir = tempfile::tempdir().unwrap();
    let out = temp_path(&dir, "k2.json");
    let gen = run(&["gen-affine", "--algebra", "sl2", "--level", "2", "-o", out.to_str().unwrap()]);
    assert_eq!(gen.code, 0, "{}", gen.output);
    let check = run(&["check-modular", out.to_str().unwrap()]);
    assert_eq!(check.code, 0, "{}", check.output);
    assert!(check.output.ends_with("check-modular: PASS\n"));
}

#[test]
fn sln_generation_needs_a_rank() {
    assert_eq!(run(&["gen-affine", "--algebra", "sln", "--level", "1"]).code, 2);
    assert_eq!(run(&["gen-affine", "--algebra", "sln", "--rank", "12", "--level", "1"]).code, 2);
    assert_eq!(run(&["gen-affine", "--algebra", "sl2", "--level", "0"]).code, 2);
    let out = run(&["gen-affine", "--algebra", "sln", "--rank", "3", "--level", "1"]);
    assert_eq!(out.code, 0);
    assert!(out.output.contains("\"(1,0)\""), "{}", out.output);
}

#[test]
fn mirror_rejects_l2_extension() {
    let out = run(&["mirror", &fixture("gko_ising_branching.json"), &fixture("ext_with_l2.json")]);
    assert_eq!(out.code, 1, "{}", out.output);
    assert!(out.output.contains("FAIL extension.c"));
    assert!(out.output.contains("trivial twist"));
    assert!(out.output.contains("h_l2 = 1/2"));
}

#[test]
fn mirror_of_trivial_extension_is_trivial() {
    let dir = tempfile::tempdir().unwrap();
    let target = temp_path(&dir, "mirror.json");
    let out = run(&[
        "mirror",
        &fixture("gko_ising_branching.json"),
        &fixture("trivial_ext.json"),
        "-o",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0, "{}", out.output);
    assert!(out.output.contains("m' (side 2) = {1:1}"));
    let bundle = load_bundle(&target, &Tolerances::DEFAULT).unwrap();
    let Payload::Extension(e) = bundle.payload else { panic!("not an extension") };
    assert_eq!(e.side.number(), 2);
    assert_eq!(e.m.len(), 1);
    assert_eq!(e.category.name(*e.m.keys().next().unwrap()), "1");
}

#[test]
fn level_rank_mirror_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let there = temp_path(&dir, "there.json");
    let out = run(&["mirror", &fixture("levelrank_2_4.json"), &fixture("levelrank_ext.json"), "-o", there.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.output);
    assert!(out.output.contains("(0,2,0):1"));
    let back = run(&["mirror", &fixture("levelrank_2_4.json"), there.to_str().unwrap()]);
    assert_eq!(back.code, 0, "{}", back.output);
    assert!(back.output.contains("m' (side 1) = {l0:1, l4:1}"), "{}", back.output);
}

#[test]
fn check_extension_reports_without_mirroring() {
    let out = run(&["check-extension", &fixture("levelrank_2_4.json"), &fixture("levelrank_ext.json")]);
    assert_eq!(out.code, 0, "{}", out.output);
    assert!(!out.output.contains("mirror.p1"));
    let out = run(&["check-extension", &fixture("gko_ising_branching.json"), &fixture("ext_with_l2.json")]);
    assert_eq!(out.code, 1);
}

#[test]
fn extension_on_the_wrong_category_is_unresolved() {
    let out = run(&["check-extension", &fixture("gko_ising_branching.json"), &fixture("levelrank_ext.json")]);
    assert_eq!(out.code, 2, "{}", out.output);
    assert!(out.output.contains("ResolutionError"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&[]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&["check-ring"]).code, 2);
    assert_eq!(run(&["--format", "xml", "check-ring", "x.json"]).code, 2);
    let help = run(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.output.contains("search-branchings"));
}

#[test]
fn input_errors_are_classified() {
    let dir = tempfile::tempdir().unwrap();
    let empty = temp_path(&dir, "empty.json");
    fs::write(&empty, "").unwrap();
    let out = run(&["check-modular", empty.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.output.contains("ParseError"), "{}", out.output);

    let bad_unit = temp_path(&dir, "unit.json");
    fs::write(&bad_unit, r#"{"labels":["1"],"S":[[[1.0,0.0]]],"h":["1/3"],"c":"0"}"#).unwrap();
    let out = run(&["check-modular", bad_unit.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.output.contains("SchemaError") && out.output.contains("h = 0"), "{}", out.output);

    let dangling = temp_path(&dir, "z.json");
    fs::write(&dangling, r#"{"cat1":"missing.json","cat2":"missing.json","pairs":[[0,0,1]]}"#).unwrap();
    let out = run(&["check-branching", dangling.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.output.contains("ResolutionError"));

    let out = run(&["check-ring", &fixture("ising.json")]);
    assert_eq!(out.code, 2);
    assert!(out.output.contains("expected a ring file"));
}

#[test]
fn invalid_referenced_category_is_a_math_failure() {
    let dir = tempfile::tempdir().unwrap();
    // symmetric, unitary-looking data with a broken unit row
    fs::write(
        dir.path().join("bad.json"),
        r#"{"labels":["1","x"],"S":[[[0.5,0.0],[0.5,0.0]],[[0.5,0.0],[-0.5,0.0]]],"h":["0","1/2"],"c":"1"}"#,
    )
    .unwrap();
    let z = dir.path().join("z.json");
    fs::write(&z, r#"{"cat1":"bad.json","cat2":"bad.json","pairs":[[0,0,1]]}"#).unwrap();
    let out = run(&["check-branching", z.to_str().unwrap()]);
    assert_eq!(out.code, 1, "{}", out.output);
    assert!(out.output.contains("FAIL modular.unitarity"));
}

#[test]
fn failing_branching_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["sl2_k2.json", "ising.json"] {
        fs::copy(fixture(f), dir.path().join(f)).unwrap();
    }
    let z = dir.path().join("z.json");
    fs::write(&z, r#"{"cat1":"sl2_k2.json","cat2":"ising.json","pairs":[[0,0,1],[1,2,1]]}"#).unwrap();
    let out = run(&["check-branching", z.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(out.output.contains("FAIL branching.e"));
    assert!(out.output.contains("no hypotheses declared"));
}

#[test]
fn check_ring_reports_bad_duals() {
    let dir = tempfile::tempdir().unwrap();
    let ring = dir.path().join("r.json");
    fs::write(&ring, r#"{"labels":["1","a"],"unit":0,"N":[[0,0,0,1],[0,1,1,1],[1,0,1,1],[1,1,1,1]]}"#).unwrap();
    let out = run(&["check-ring", ring.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(out.output.contains("FAIL ring.unit_channel"));
    assert!(out.output.contains("duals could not be inferred"));
}

#[test]
fn verlinde_writes_a_valid_ring() {
    let dir = tempfile::tempdir().unwrap();
    let ring = dir.path().join("ising_ring.json");
    let out = run(&["verlinde", &fixture("ising.json"), "-o", ring.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.output);
    let out = run(&["check-ring", ring.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.output);
    let out = run(&["check-ring", &fixture("sl2_k3_ring.json")]);
    assert_eq!(out.code, 0);
}

#[test]
fn search_lists_gko_and_emits_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "search-branchings",
        &fixture("sl2_k2.json"),
        &fixture("ising.json"),
        "--max-support",
        "4",
        "--emit-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0, "{}", out.output);
    assert!(out.output.contains("#0 support {(l0,1)}"));
    assert!(out.output.contains("#1 support {(l0,1), (l2,eps)}"));
    let emitted = dir.path().join("branching_1.json");
    let check = run(&["check-branching", emitted.to_str().unwrap()]);
    assert_eq!(check.code, 0, "{}", check.output);
}

#[test]
fn search_budget_exhaustion_is_reported() {
    let out = run(&["search-branchings", &fixture("sl2_k4.json"), &fixture("sl4_k2.json"), "--budget", "1"]);
    assert_eq!(out.code, 1);
    assert!(out.output.contains("FAIL search.budget"));
}

#[test]
fn machine_output_is_deterministic_json() {
    let args = ["--format", "machine", "check-branching", &fixture("levelrank_2_4.json")];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a.output).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 9);
    assert_eq!(v["tau"], serde_json::Value::Null);
    assert_eq!(v["result"]["tau"]["l4"], "(0,2,0)");

    let err = run(&["--format", "machine", "check-modular", "/no/such/file.json"]);
    assert_eq!(err.code, 2);
    let v: serde_json::Value = serde_json::from_str(&err.output).unwrap();
    assert_eq!(v["error"]["class"], "IoError");
}

#[test]
fn quiet_prints_only_the_verdict() {
    let out = run(&["--quiet", "check-modular", &fixture("sl4_k2.json")]);
    assert_eq!(out.output, "check-modular: PASS\n");
}

#[test]
fn tolerance_flag_is_honoured() {
    // S entries are only accurate to ~1e-16, so a zero tolerance fails unitarity
    let out = run(&["--tol", "0", "check-modular", &fixture("sl2_k3.json")]);
    assert_eq!(out.code, 1, "{}", out.output);
    let out = run(&["--tol", "1e-6", "check-modular", &fixture("sl2_k3.json")]);
    assert_eq!(out.code, 0);
}
