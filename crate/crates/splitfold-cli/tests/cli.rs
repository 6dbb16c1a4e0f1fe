//! Fixture parsing edge cases and the command surface.

use splitfold_cli::fixture;
use std::process::Command;

#[test]
fn empty_file_parses_to_an_empty_fixture() {
    let fx = fixture::parse("").unwrap();
    assert!(fx.items.is_empty());
    assert!(fx.splittings.is_empty());
    assert_eq!(fixture::emit(&fx), "");
}

#[test]
fn comments_and_blank_lines_are_skipped() {
    let fx = fixture::parse("# a comment\n\nsubgroup H in F2: a b\n").unwrap();
    assert_eq!(fx.subgroups.len(), 1);
}

#[test]
fn dangling_path_reference_is_an_error() {
    let err = fixture::parse("path p in nowhere: a b\n").unwrap_err();
    assert!(err.to_string().contains("unknown splitting"));
}

#[test]
fn malformed_path_encoding_is_rejected() {
    // A path beginning with a collapsed edge violates the canonical
    // lift convention.
    let text = "splitting S\nvertices: v\nedge a: v -> v\nedge b: v -> v\ncollapsed: b\nbasis: a b\n\npath p in S: b a\n";
    let err = fixture::parse(text).unwrap_err();
    assert!(err.to_string().contains("uncollapsed"), "{err:#}");
}

#[test]
fn marking_must_cover_the_basis() {
    let text =
        "splitting S\nvertices: v\nedge a: v -> v\nedge b: v -> v\nbasis: a b\nmarking: a=a\n";
    assert!(fixture::parse(text).is_err());
}

#[test]
fn collapsed_tree_components_need_unmarked_edges() {
    // With an explicit marking that forces the bridge to carry a
    // letter, collapsing it is rejected; the automatic marking routes
    // the tree through the collapsed edge instead.
    let bad = "splitting S\nvertices: p q\nedge a: p -> p\nedge t: p -> q\nedge u: p -> q\ncollapsed: t\nbasis: a b\nmarking: a=a t=b\n";
    assert!(fixture::parse(bad).is_err());
    let good = "splitting S\nvertices: p q\nedge a: p -> p\nedge t: p -> q\nedge u: p -> q\ncollapsed: t\nbasis: a b\n";
    assert!(fixture::parse(good).is_ok());
}

#[test]
fn envelope_env_var_is_honored() {
    let bin = env!("CARGO_BIN_EXE_splitfold");
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    // A tiny envelope turns the four-rose filling check into a
    // resource-limit failure (exit 3).
    let out = Command::new(bin)
        .args([
            "fill-check",
            "fixtures/new_example.sfd",
            "--path",
            "alpha",
            "--json",
        ])
        .env("SPLITFOLD_MAX_EDGES", "2")
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn fold_factorize_output_reparses() {
    let bin = env!("CARGO_BIN_EXE_splitfold");
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let out = Command::new(bin)
        .args(["fold-factorize", "fixtures/fibonacci.sfd", "--map", "fib", "--json"])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let emitted = v["result"]["fixture"].as_str().unwrap();
    let fx = fixture::parse(emitted).unwrap();
    assert!(!fx.splittings.is_empty());
    assert_eq!(fx.maps.len(), v["result"]["folds"].as_u64().unwrap() as usize);
}

#[test]
fn tt_improve_output_reparses_and_validates() {
    let bin = env!("CARGO_BIN_EXE_splitfold");
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let out = Command::new(bin)
        .args([
            "tt-improve",
            "fixtures/subdivided_fibonacci.sfd",
            "--map",
            "fib2",
            "--json",
        ])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let emitted = v["result"]["fixture"].as_str().unwrap();
    let fx = fixture::parse(emitted).unwrap();
    assert_eq!(fx.maps.len(), 1);
    assert_eq!(v["result"]["final_edges"].as_u64(), Some(2));
}

#[test]
fn subgroup_reports() {
    let bin = env!("CARGO_BIN_EXE_splitfold");
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let out = Command::new(bin)
        .args([
            "filling-support",
            "fixtures/subgroups.sfd",
            "--subgroup",
            "square",
            "--json",
        ])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["rank"].as_u64(), Some(1));
    assert_eq!(v["result"]["is_proper"].as_bool(), Some(true));
}
