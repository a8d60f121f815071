use std::process::Command;

use serde_json::Value;

use bairestar::{CatalogFunction, Point};

fn run(args: &[&str]) -> (Value, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_bairestar")).args(args).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let doc = serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("{args:?}: {e}: {text}"));
    (doc, out.status.code().unwrap())
}

fn ok(args: &[&str]) -> Value {
    let (doc, code) = run(args);
    assert_eq!(code, 0, "{args:?}: {doc}");
    doc
}

fn raw(args: &[&str]) -> Vec<u8> {
    Command::new(env!("CARGO_BIN_EXE_bairestar")).args(args).output().unwrap().stdout
}

#[test]
fn documented_examples() {
    let d = ok(&["dist", "--a", r#"{"kind":"finite","seq":[]}"#, "--b", r#"{"kind":"finite","seq":[0]}"#]);
    assert_eq!(d, serde_json::json!({ "exact": "1" }));
    assert_eq!(ok(&["catalog", "list", "--set", "b"])["count"], 27);
    assert_eq!(ok(&["catalog", "list", "--set", "a"])["count"], 24);
    let v = ok(&["embed", "check", "--pi", r#"{"kind":"prefix","s":[0]}"#, "--depth", "3", "--branch", "3"]);
    assert_eq!(v["valid"], true);
}

#[test]
fn exit_codes() {
    let (e, code) = run(&["dist", "--a", "nope", "--b", "{}"]);
    assert_eq!((code, e["error"]["kind"].as_str()), (2, Some("parse")));
    let (e, code) = run(&["catalog", "eval", "--fn", "0", "--point", r#"{"kind":"finite","seq":[1]}"#]);
    assert_eq!((code, e["error"]["kind"].as_str()), (3, Some("domain_mismatch")));
    let (e, code) = run(&["construct", "disjointify", "--fn", "constant", "--depth", "2"]);
    assert_eq!((code, e["error"]["kind"].as_str()), (4, Some("budget_exceeded")));
    let (_, code) = run(&["no-such-command"]);
    assert_eq!(code, 2);
}

#[test]
fn point_queries() {
    let m = ok(&["meet", "--s", "[0,1,2]", "--t", "[0,1,5]"]);
    assert_eq!(m["meet"], serde_json::json!([0, 1]));
    let s = ok(&[
        "meet",
        "--a",
        r#"{"kind":"augmented","seq":[0]}"#,
        "--b",
        r#"{"kind":"infinite","head":[],"period":[0]}"#,
    ]);
    assert_eq!(s["split_index"], 2);
    assert_eq!(ok(&["eps", "--t", "[]"])["epsilon"], "1");
    assert_eq!(ok(&["eps", "--level", "2"])["level"], 2);
    let member = ok(&["member", "--point", r#"{"kind":"finite","seq":[0,3]}"#, "--set", r#"{"kind":"cone","t":[0]}"#]);
    assert_eq!(member["member"], true);
    let nb = ok(&["member", "--point", r#"{"kind":"augmented","seq":[]}"#, "--radius", "1/8"]);
    assert_eq!(nb["neighborhood"]["kind"], "cone_minus");
}

#[test]
fn covers_and_descent() {
    let full = r#"[{"kind":"singleton","t":[]},{"kind":"cone_minus","t":[],"i":3},{"kind":"cone","t":[0]},{"kind":"cone","t":[1]},{"kind":"cone","t":[2]}]"#;
    let gap = r#"[{"kind":"singleton","t":[]},{"kind":"cone_minus","t":[],"i":3},{"kind":"cone","t":[0]},{"kind":"cone","t":[2]}]"#;
    let c = ok(&["cover-check", "--family", full, "--samples", "2000"]);
    assert_eq!(c["result"], "covers");
    assert_eq!(c["contradictions"], serde_json::json!([]));
    let c = ok(&["cover-check", "--family", gap]);
    assert_eq!(c["result"], "counterexample");
    let p: Point = serde_json::from_value(c["point"].clone()).unwrap();
    assert_eq!(p, Point::Finite(vec![1].into()));
    let d = ok(&["descent", "--family", gap]);
    // Round trip: the emitted point is accepted back as input.
    let point = d["point"].to_string();
    let member = ok(&["member", "--point", &point, "--set", r#"{"kind":"cone","t":[1]}"#]);
    assert_eq!(member["member"], true);
}

#[test]
fn embedding_commands() {
    let pi = r#"{"kind":"child_word","root":[1],"word_rule":[[0,1],[2]]}"#;
    assert_eq!(ok(&["embed", "eval", "--pi", pi, "--t", "[1,0]"])["image"], serde_json::json!([1, 2, 0, 1]));
    let imgs = ok(&["embed", "eval", "--pi", pi, "--depth", "2", "--branch", "2"]);
    assert_eq!(imgs["images"].as_array().unwrap().len(), 3);
    let e = ok(&["embed", "extend", "--pi", pi, "--point", r#"{"kind":"augmented","seq":[0]}"#]);
    assert_eq!(e["point"], serde_json::json!({ "kind": "augmented", "seq": [1, 0, 1] }));
    let c = ok(&["embed", "compose", "--outer", pi, "--inner", r#"{"kind":"prefix","s":[1]}"#, "--depth", "1"]);
    assert_eq!(c["images"], serde_json::json!([[[], [1, 2]]]));
    let pre = ok(&["embed", "preimage", "--pi", pi, "--t", "[1,2]"]);
    assert_eq!(pre["preimage"], serde_json::json!({ "Cone": [1] }));
    let bad = ok(&["embed", "check", "--pi", r#"{"kind":"child_word","root":[],"word_rule":[[0],[0,1]]}"#]);
    assert_eq!(bad["valid"], false);
}

#[test]
fn catalog_commands() {
    let list = ok(&["catalog", "list", "--set", "b"]);
    for entry in list["functions"].as_array().unwrap() {
        let f: CatalogFunction = serde_json::from_value(entry["descriptor"].clone()).unwrap();
        f.check().unwrap();
    }
    let v = ok(&["catalog", "eval", "--fn", "26", "--point", r#"{"kind":"augmented","seq":[2]}"#]);
    assert_eq!(v["value"]["space"], "tree");
    let pi = r#"{"kind":"prefix","s":[0,1]}"#;
    for index in ["0", "7", "13", "26"] {
        let r = ok(&["catalog", "check-embed", "--fn", index, "--pi", pi, "--samples", "20"]);
        assert_eq!(r["result"]["result"], "certified_pairing", "{index}: {r}");
    }
}

#[test]
fn constructions_emit_recheckable_traces() {
    let cases: &[&[&str]] = &[
        &["construct", "ramsey", "--set", "even-sum"],
        &["construct", "category", "--family", "ends-in-zero"],
        &["construct", "continuity", "--fn", "identity-star", "--family", "all-levels"],
        &["construct", "shrink", "--fn", "prefix0"],
        &["construct", "stabilize", "--fn", "aug-last-pow"],
        &["construct", "disjointify", "--fn", "identity-star", "--depth", "2"],
        &["construct", "limit", "--fn", "baire0-aug1"],
        &["construct", "eps-split", "--fn", "aug-sum", "--eps", "1"],
        &["construct", "shrink-or-discrete", "--fn", "aug-weight-pow"],
        &["construct", "avoid", "--fn", "aug-sum", "--x", "0"],
        &["construct", "finite-avoid", "--fn", "aug-weight-pow", "--set", r#"["0","1"]"#],
        &["construct", "discrete-refine", "--fn", "aug-rank"],
        &[
            "construct",
            "disjoint-refine",
            "--fn",
            "baire0-aug1",
            "--b",
            r#"{"kind":"infinite","head":[],"period":[0]}"#,
            "--delta",
            "1",
        ],
        &["construct", "classify", "--fn", "identity-baire"],
    ];
    for args in cases {
        let out = ok(args);
        assert!(out["certificates"].is_array(), "{args:?}");
        let trace = out["trace"].to_string();
        let r = ok(&["recheck", &trace]);
        assert_eq!(r["ok"], true, "{args:?}: {r}");
        let whole = out.to_string();
        assert_eq!(ok(&["construct", "recheck", &whole])["ok"], true);
    }
    let c = ok(&["construct", "classify", "--fn", "identity-star"]);
    assert_eq!(c["result"]["shape"], "embeds_into_baire_star");
}

#[test]
fn tampered_trace_is_rejected() {
    let out = ok(&["construct", "shrink", "--fn", "prefix0"]);
    let mut trace = out["trace"].clone();
    trace["certificates"][0]["lhs"][0]["recorded"] = Value::from("0");
    let r = ok(&["recheck", &trace.to_string()]);
    assert_eq!(r["ok"], false);
}

#[test]
fn seeded_output_is_deterministic() {
    let full = r#"[{"kind":"cone","t":[]}]"#;
    let a = raw(&["cover-check", "--family", full, "--samples", "500", "--seed", "7"]);
    assert_eq!(a, raw(&["cover-check", "--family", full, "--samples", "500", "--seed", "7"]));
    let pi = r#"{"kind":"prefix","s":[2]}"#;
    let args = ["catalog", "check-embed", "--fn", "3", "--pi", pi, "--samples", "10", "--seed", "3"];
    assert_eq!(raw(&args), raw(&args));
    let c = ["construct", "classify", "--fn", "identity-star"];
    assert_eq!(raw(&c), raw(&c));
}

#[test]
fn registry_listing() {
    let r = ok(&["construct", "registry"]);
    let names: Vec<&str> = r["functions"].as_array().unwrap().iter().map(|f| f["name"].as_str().unwrap()).collect();
    for n in ["constant", "identity-baire", "identity-star", "aug-weight-pow", "split-identity"] {
        assert!(names.contains(&n), "{n}");
    }
}
