use std::path::PathBuf;

use serde_json::Value;
use tracer::cli::run;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn tracer(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("tracer").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

const RL: [(&str, &str, &str); 5] = [
    ("conflicts", "r6", "r4"),
    ("requires", "r1", "r5"),
    ("conflicts", "r6", "r1"),
    ("requires", "r2", "r5"),
    ("conflicts", "r2", "r6"),
];

#[test]
fn check_table1_is_consistent() {
    let (code, out, _) = tracer(&["check", &data("sidp.forl"), &data("table1.trace.json")]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "Consistent");
}

#[test]
fn check_reports_violated_facts() {
    let (code, out, _) = tracer(&["check", &data("sidp.forl"), &data("contains-chain.trace.json")]);
    assert_eq!(code, 1);
    assert!(out.starts_with("Inconsistent"));
    assert!(out.contains("violated: ContainsTransitive"), "{out}");
    assert!(out.contains("violated: ContainsLeftUnique"), "{out}");
}

#[test]
fn check_accepts_named_flags() {
    let spec = data("sidp.forl");
    let ws = data("table1.trace.json");
    let (code, out, _) = tracer(&["check", "--spec", &spec, "--workspace", &ws, "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "consistent");
    assert_eq!(v["mode"], "consistency");
}

#[test]
fn infer_json_contains_rl_rows() {
    let (code, out, _) = tracer(&["infer", &data("sidp.forl"), &data("table1.trace.json"), "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "solutions");
    let rows: Vec<(String, Vec<String>, String)> = v["inferred"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| serde_json::from_value(serde_json::json!([t["relation"], t["tuple"], t["provenance"]])).unwrap())
        .collect();
    for (r, a, b) in RL {
        assert!(
            rows.iter().any(|(rel, t, p)| rel == r && t == &[a, b] && p == "RL"),
            "missing {r}({a},{b})"
        );
    }
}

#[test]
fn infer_output_is_byte_deterministic() {
    let args = ["infer", &data("sidp.forl"), &data("table1.trace.json"), "--json"];
    let first = tracer(&args);
    for _ in 0..3 {
        assert_eq!(tracer(&args), first);
    }
}

#[test]
fn infer_engines_agree() {
    let spec = data("sidp.forl");
    let ws = data("table1.trace.json");
    let (_, sat, _) = tracer(&["infer", &spec, &ws, "--engine", "sat"]);
    let (_, horn, _) = tracer(&["infer", &spec, &ws, "--engine", "horn"]);
    assert_eq!(sat, horn);
}

#[test]
fn infer_on_inconsistent_premises_exits_negative() {
    let (code, out, _) = tracer(&["infer", &data("sidp.forl"), &data("contains-chain.trace.json")]);
    assert_eq!(code, 1);
    assert!(out.contains("ContainsTransitive"), "{out}");
}

#[test]
fn infer_unknown_target_is_a_usage_error() {
    let (code, _, err) = tracer(&["infer", &data("sidp.forl"), &data("table1.trace.json"), "--target", "nope"]);
    assert_eq!(code, 2);
    assert!(err.contains("nope"), "{err}");
}

#[test]
fn dl_trace_prints_kernel_traces() {
    let (code, out, _) = tracer(&[
        "dl-trace",
        &data("table1.sentences.txt"),
        "--lexicon",
        &data("sidp.lexicon.json"),
        "--ontology",
        &data("sidp.ontology"),
    ]);
    assert_eq!(code, 0);
    for line in [
        "refines(r1, r4)  DL",
        "refines(r3, r2)  DL",
        "refines(r2, r4)  DL",
        "requires(r4, r5)  DL",
        "conflicts(r5, r6)  DL",
    ] {
        assert!(out.lines().any(|l| l == line), "missing {line}\n{out}");
    }
}

#[test]
fn dl_trace_json_links_are_workspace_links() {
    let (code, out, _) = tracer(&[
        "dl-trace",
        &data("table1.sentences.txt"),
        "--lexicon",
        &data("sidp.lexicon.json"),
        "--ontology",
        &data("sidp.ontology"),
        "--json",
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["axioms"].as_array().unwrap().len(), 6);
    assert!(v["links"].as_array().unwrap().iter().all(|l| l["origin"] == "DL"));
}

#[test]
fn parse_prints_and_summarizes_specs() {
    let (code, out, _) = tracer(&["parse", &data("sidp.forl")]);
    assert_eq!(code, 0);
    assert!(out.contains("abstract sig Artifact"), "{out}");
    let (code, out, _) = tracer(&["parse", &data("sidp.forl"), "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["relations"].as_array().unwrap().iter().any(|r| r["name"] == "requires"));
}

#[test]
fn parse_with_lexicon_parses_sentences() {
    let (code, out, _) = tracer(&["parse", &data("table1.sentences.txt"), "--lexicon", &data("sidp.lexicon.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("r6: [NP:Bracket][V:install][P:in][NP:FuelTank]  full"), "{out}");
}

#[test]
fn spec_errors_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.forl");
    std::fs::write(&bad, "sig A {\n  r: set B\n}\n").unwrap();
    let (code, _, err) = tracer(&["check", bad.to_str().unwrap(), &data("table1.trace.json")]);
    assert_eq!(code, 2);
    assert!(err.contains("bad.forl"), "{err}");
}

#[test]
fn unknown_subcommand_exits_with_usage_code() {
    let (code, _, err) = tracer(&["bogus"]);
    assert_eq!(code, 2);
    assert!(err.contains("bogus"));
}

#[test]
fn export_dimacs_is_deterministic_and_parseable() {
    let dir = tempfile::tempdir().unwrap();
    let spec = data("sidp.forl");
    let ws = data("table1.trace.json");
    let mut texts = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("p{i}.cnf"));
        let (code, _, _) = tracer(&["export-dimacs", &spec, &ws, "--target", "requires", "--out", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        texts.push(std::fs::read_to_string(path).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    assert!(texts[0].lines().any(|l| l.starts_with("c ") && l.contains("requires(r1,r5)")));
    let cnf = tracer_core::sat::parse_dimacs(&texts[0]).unwrap();
    assert!(cnf.num_vars() > 0);
    let (_, pg, _) = tracer(&["export-dimacs", &spec, &ws, "--target", "requires", "--polarity", "pg"]);
    assert!(pg.lines().any(|l| l.starts_with("p cnf")));
}

#[test]
fn discover_suggests_fresh_atoms() {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path().join("ws.json");
    std::fs::write(
        &ws,
        r#"{"version":1,"revision":0,"locations":[{"id":"r","kind":"File","path":"r.txt"}],"links":[],"types":{"r":"ContractRequirement"}}"#,
    )
    .unwrap();
    let (code, out, err) = tracer(&["discover", &data("alm.forl"), ws.to_str().unwrap(), "--fresh", "1", "--link-fresh", "--json"]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["mode"], "discover");
    assert!(out.contains("$fresh0"), "{out}");
}
