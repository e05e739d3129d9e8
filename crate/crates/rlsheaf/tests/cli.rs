//! Integration tests for the command-line surface: file formats, exit
//! codes, JSON reports, DOT artifacts, and byte determinism.

use rlsheaf::cli;
use rlsheaf::json::{AlgebraJson, PresheafJson, TopologyJson};
use std::collections::BTreeMap;

fn run(args: &[&str]) -> (i32, String) {
    let mut buf = Vec::new();
    let code = cli::run(
        &args.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        &mut buf,
    );
    (code, String::from_utf8(buf).unwrap())
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("rlsheaf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn a4_json() -> AlgebraJson {
    AlgebraJson::from_algebra(&rlsheaf::fixtures::a4())
}

#[test]
fn validate_algebra_from_file() {
    let dir = tempdir();
    let path = dir.join("a4.json");
    std::fs::write(&path, serde_json::to_string(&a4_json()).unwrap()).unwrap();
    let (code, text) = run(&["validate-algebra", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("adjunction over all triples"));
}

#[test]
fn broken_algebra_file_exits_one_with_witness() {
    let dir = tempdir();
    let mut j = a4_json();
    // Break the product so the table stops being residuable.
    j.prod[1][2] = "a".into();
    j.prod[2][1] = "a".into();
    j.imp = None;
    let path = dir.join("a4-broken.json");
    std::fs::write(&path, serde_json::to_string(&j).unwrap()).unwrap();
    let (code, text) = run(&["validate-algebra", path.to_str().unwrap()]);
    assert_eq!(code, 1, "{text}");
    assert!(text.contains("witness") || text.contains("fail"), "{text}");
}

#[test]
fn malformed_file_exits_two() {
    let dir = tempdir();
    let path = dir.join("garbage.json");
    std::fs::write(&path, "{ not json").unwrap();
    let (code, _) = run(&["validate-algebra", path.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn budget_exhaustion_exits_three() {
    // The 51-element chain is over the filter-enumeration guard.
    let (code, text) = run(&["filters", "lukasiewicz(50)"]);
    assert_eq!(code, 3, "{text}");
    assert!(text.contains("budget"));
    // Raising the guard makes it pass; chains have exactly two filters.
    let (code, text) = run(&["filters", "lukasiewicz(50)", "--budget-filters", "64"]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("F2"));
    assert!(!text.contains("F3"));
}

#[test]
fn presheaf_file_roundtrip_through_the_cli() {
    let dir = tempdir();
    // Skyscraper at y over the Sierpinski space, written by hand with
    // cover-relation restrictions only.
    let a4 = a4_json();
    let one = AlgebraJson {
        name: "one".into(),
        elements: vec!["1".into()],
        order: vec![],
        prod: vec![vec!["1".into()]],
        imp: None,
        bottom: "1".into(),
        top: "1".into(),
    };
    let mut algebras = BTreeMap::new();
    algebras.insert("A4".to_string(), a4);
    algebras.insert("one".to_string(), one);
    let mut values = BTreeMap::new();
    values.insert("".to_string(), "one".to_string());
    values.insert("x".to_string(), "one".to_string());
    values.insert("x,y".to_string(), "A4".to_string());
    let mut restrictions = BTreeMap::new();
    restrictions.insert("x->".to_string(), vec!["1".to_string()]);
    restrictions.insert(
        "x,y->x".to_string(),
        vec!["1".into(), "1".into(), "1".into(), "1".into()],
    );
    let j = PresheafJson {
        name: "file-skyscraper".into(),
        space: TopologyJson {
            points: vec!["x".into(), "y".into()],
            opens: vec![vec![], vec!["x".into()], vec!["x".into(), "y".into()]],
        },
        algebras,
        values,
        restrictions,
    };
    let path = dir.join("sky.json");
    std::fs::write(&path, serde_json::to_string(&j).unwrap()).unwrap();
    let (code, text) = run(&["validate-presheaf", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{text}");
    let (code, text) = run(&["sheaf-check", "--mode", "strict", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("sheaf"));
}

#[test]
fn dot_exports_are_written_and_deterministic() {
    let dir = tempdir();
    let out1 = dir.join("a6-1.dot");
    let out2 = dir.join("a6-2.dot");
    let (code, _) = run(&["filters", "a6", "--out", out1.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, _) = run(&["filters", "a6", "--out", out2.to_str().unwrap()]);
    assert_eq!(code, 0);
    let d1 = std::fs::read(&out1).unwrap();
    let d2 = std::fs::read(&out2).unwrap();
    assert!(!d1.is_empty());
    assert_eq!(d1, d2, "byte-identical DOT output");
    let text = String::from_utf8(d1).unwrap();
    assert!(text.contains("F5"));
}

#[test]
fn etale_dot_export() {
    let dir = tempdir();
    let out = dir.join("etale.dot");
    let (code, text) = run(&[
        "etale",
        "--export",
        "dot",
        "--out",
        out.to_str().unwrap(),
        "sierpinski_fuzzy(1)",
    ]);
    assert_eq!(code, 0, "{text}");
    let dot = std::fs::read_to_string(&out).unwrap();
    assert!(dot.contains("cluster_0") && dot.contains("cluster_1"));
}

#[test]
fn json_reports_parse() {
    for args in [
        vec!["filters", "a4", "--json"],
        vec!["classify", "a8", "--json"],
        vec![
            "spectrum",
            "--kind",
            "hull",
            "--carrier",
            "spec",
            "a4",
            "--json",
        ],
        vec!["sheaf-check", "--mode", "paper", "one_point(a4)", "--json"],
        vec!["stalk", "--point", "x", "sierpinski_fuzzy(2)", "--json"],
        vec!["theorem", "subcategory", "--json"],
    ] {
        let (code, text) = run(&args);
        assert_eq!(code, 0, "{args:?}: {text}");
        let line = text.lines().last().unwrap();
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["schema"], "rlsheaf-report/v1", "{args:?}");
    }
}

#[test]
fn spectrum_closed_basis_variant_runs() {
    let (code, text) = run(&[
        "spectrum",
        "--kind",
        "hull",
        "--carrier",
        "spec",
        "--closed-basis",
        "a4",
    ]);
    assert_eq!(code, 0, "{text}");
}

#[test]
fn sheafify_reports_iota() {
    let (code, text) = run(&["sheafify", "constant(a4,discrete2)"]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("NOT an isomorphism"));
    assert!(text.contains("4 -> 16 sections"));
    let (code, text) = run(&["sheafify", "skyscraper(sierpinski,y,a4)"]);
    assert_eq!(code, 0, "{text}");
    assert!(!text.contains("NOT an isomorphism"));
}

#[test]
fn demo_exsirsheanot_exits_one_with_erratum_note() {
    let (code, text) = run(&["demo", "exsirsheanot", "--chain", "2"]);
    assert_eq!(code, 1);
    assert!(text.contains("erratum note"));
    assert!(text.contains("preserves ->"));
}

#[test]
fn unknown_subcommand_exits_two() {
    let (code, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
}

#[test]
fn every_demo_runs_with_its_documented_exit_code() {
    // Demos reproducing failure scenarios exit 1; everything else exits 0.
    let expect: Vec<(&str, i32)> = vec![
        ("a4", 0),
        ("a6", 0),
        ("a8", 0),
        ("lukas", 0),
        ("filterexa", 0),
        ("maxminex", 0),
        ("spectrumofex", 0),
        ("mora6a4", 0),
        ("prsresexa4", 0),
        ("prsresexa6", 0),
        ("prsresexa8", 0),
        ("sirpshe", 0),
        ("onepointshe", 0),
        ("stalkgermex", 0),
        ("sheafify", 0),
        ("equivalence", 0),
        ("reflection", 0),
        ("exsheanot", 1),
        ("exsirsheanot", 1),
    ];
    for (id, want) in expect {
        let (code, text) = run(&["demo", id, "--chain", "3"]);
        assert_eq!(code, want, "demo {id}: {text}");
    }
}

#[test]
fn values_are_safe_to_share_across_threads() {
    let a = rlsheaf::fixtures::a8();
    let p = rlsheaf::fixtures::prsresexa4(&rlsheaf::report::Budget::default()).unwrap();
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let a = a.clone();
            let p = p.clone();
            std::thread::spawn(move || {
                assert!(rlsheaf::algebra::revalidate(&a).is_valid());
                assert!(rlsheaf::presheaf::validate_presheaf(&p).is_valid());
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
}
