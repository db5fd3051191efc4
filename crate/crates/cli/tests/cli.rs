use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn hexctx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hexctx"))
        .args(args)
        .env_remove("HEXCTX_OUT")
        .output()
        .expect("run hexctx")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn manifest_digests_match(dir: &Path) -> usize {
    let m = read_json(&dir.join("manifest.json"));
    let files = m["files"].as_array().unwrap();
    for f in files {
        let bytes = fs::read(dir.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
    }
    files.len()
}

#[test]
fn space_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w52");
    let o = hexctx(&["space", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let s = read_json(&out.join("summary.json"));
    assert_eq!((s["points"].as_u64(), s["lines"].as_u64()), (Some(63), Some(315)));
    assert_eq!((s["negative_lines"].as_u64(), s["planes"].as_u64()), (Some(90), Some(135)));
    let lines = fs::read_to_string(out.join("lines.csv")).unwrap();
    assert_eq!(lines.lines().count(), 316);
    assert_eq!(manifest_digests_match(&out), 4);

    let s2 = stdout_json(&hexctx(&["space", "2"]));
    assert_eq!((s2["points"].as_u64(), s2["lines"].as_u64()), (Some(15), Some(15)));
    let s4 = stdout_json(&hexctx(&["space", "4"]));
    assert_eq!(s4["points"].as_u64(), Some(255));
    assert!(s4["lines"].as_u64().unwrap() > 0);

    let o = hexctx(&["space", "5"]);
    assert_eq!(code(&o), 7);
}

#[test]
fn space_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let o = hexctx(&["space", "2", "--format", "json", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let points = read_json(&dir.path().join("points.json"));
    assert_eq!(points.as_array().unwrap().len(), 15);
    assert!(!dir.path().join("planes.json").exists());
}

#[test]
fn degree_of_named_targets() {
    for (target, d) in [("doily", 3), ("grid", 1), ("pentagram", 1), ("elliptic:YYY", 9)] {
        let o = hexctx(&["degree", target]);
        assert_eq!(code(&o), 0, "{target}");
        let c = stdout_json(&o);
        assert_eq!(c["upper"].as_u64(), Some(d), "{target}");
        assert_eq!(c["lower"].as_u64(), Some(d), "{target}");
        assert_eq!(c["exact"], Value::Bool(true));
        assert_eq!(c["violated_line_ids"].as_array().unwrap().len() as u64, d);
    }
    let c = stdout_json(&hexctx(&["degree", "elliptic:YYY"]));
    assert!(c["matched_hexagon_id"].is_u64());
}

#[test]
fn w52_certificate_written_to_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_hexctx"))
        .args(["degree", "w52"])
        .env("HEXCTX_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let c = read_json(&dir.path().join("certificate.json"));
    assert_eq!((c["upper"].as_u64(), c["lower"].as_u64()), (Some(63), Some(63)));
    assert_eq!(c["method"].as_str(), Some("achievability+tiling"));
    assert_eq!(c["lower_method"]["multiplicity"].as_u64(), Some(48));
    assert_eq!(manifest_digests_match(dir.path()), 1);
}

#[test]
fn inexact_degree_exits_3() {
    let o = hexctx(&["--rank-limit", "5", "--budget", "0", "degree", "elliptic:YYY"]);
    assert_eq!(code(&o), 3);
    let c = stdout_json(&o);
    assert_eq!(c["exact"], Value::Bool(false));
    assert!(c["upper"].as_u64() >= Some(9));
}

#[test]
fn error_exit_codes() {
    assert_eq!(code(&hexctx(&["degree", "nonsense"])), 5);
    assert_eq!(code(&hexctx(&["degree", "elliptic:III"])), 5);
    assert_eq!(code(&hexctx(&["degree", "--lines", "/nonexistent/contexts.txt"])), 6);
    assert_eq!(code(&hexctx(&["verify", "nonsense"])), 5);
    assert_eq!(code(&hexctx(&["frobnicate"])), 2);
    assert_eq!(code(&hexctx(&["hexagon", "skew:99999"])), 5);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "XQZ-ZIX-YYY\n").unwrap();
    assert_eq!(code(&hexctx(&["degree", "--lines", bad.to_str().unwrap()])), 7);
}

#[test]
fn degree_from_contexts_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.txt");
    fs::write(&path, "# rows\nIZ ZI ZZ\nXI IX XX\nXZ ZX YY\n# columns\nIZ XI XZ\nZI IX ZX\nZZ XX YY\n").unwrap();
    let o = hexctx(&["degree", "--lines", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let c = stdout_json(&o);
    assert_eq!(c["config_id"].as_str(), Some("square"));
    assert_eq!((c["p"].as_u64(), c["l"].as_u64(), c["upper"].as_u64()), (Some(9), Some(6), Some(1)));
}

#[test]
fn degree_csv_format() {
    let o = hexctx(&["degree", "grid", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rows = text.lines();
    assert!(rows.next().unwrap().starts_with("config_id,p,l,upper,lower,exact"));
    assert!(rows.next().unwrap().starts_with("grid,9,6,1,1,true"));
}

#[test]
fn verify_fast_suites() {
    for suite in ["catalogs", "planes", "spreads", "quadrics"] {
        let o = hexctx(&["verify", suite]);
        let text = String::from_utf8_lossy(&o.stdout);
        assert_eq!(code(&o), 0, "{suite}: {text}");
        assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
    }
}

#[test]
fn cabello_emit_one_file_per_context() {
    let dir = tempfile::tempdir().unwrap();
    let o = hexctx(&["cabello", "emit", "doily", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let qasm: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "qasm"))
        .collect();
    assert_eq!(qasm.len(), 15);
    let text = fs::read_to_string(dir.path().join("doily_0.qasm")).unwrap();
    assert!(text.starts_with("OPENQASM 2.0;"));
    assert_eq!(manifest_digests_match(dir.path()), 15);
}

#[test]
fn cabello_simulate_exact_bounds() {
    let o = hexctx(&["cabello", "simulate", "elliptic:YYY", "--exact"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["chi"].as_f64(), Some(45.0));
    assert_eq!((r["quantum_bound"].as_i64(), r["hv_bound"].as_i64()), (Some(45), Some(27)));
    assert_eq!(r["violates_hv"], Value::Bool(true));
    assert_eq!(r["contexts"].as_array().unwrap().len(), 45);
}

#[test]
fn cabello_needs_a_degree() {
    let args = ["--rank-limit", "5", "--budget", "0", "cabello", "simulate", "elliptic:YYY"];
    assert_eq!(code(&hexctx(&args)), 9);
    let mut with_d = args.to_vec();
    with_d.extend(["--degree", "9"]);
    let o = hexctx(&with_d);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["hv_bound"].as_i64(), Some(27));
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let args = ["--seed", seed, "--out", out.to_str().unwrap(), "cabello", "simulate", "doily", "--shots", "64", "--state", "10"];
        assert_eq!(code(&hexctx(&args)), 0);
        let m = read_json(&out.join("manifest.json"));
        m["files"].clone()
    };
    let a = run("a", "7");
    let b = run("b", "7");
    assert_eq!(a, b);
    assert_eq!(a.as_array().unwrap().len(), 1);

    // local search is the only randomized step of a degree run
    let search = |name: &str| {
        let out = dir.path().join(name);
        let args = ["--seed", "11", "--rank-limit", "5", "--budget", "30", "--out", out.to_str().unwrap(), "degree", "hyperbolic:III"];
        assert_eq!(code(&hexctx(&args)), 3);
        let cert = read_json(&out.join("certificate.json"));
        assert_eq!(cert["upper_method"]["method"].as_str(), Some("localsearch"));
        read_json(&out.join("manifest.json"))["files"].clone()
    };
    assert_eq!(search("c"), search("d"));
}

#[test]
fn cabello_score_counts_directory() {
    let dir = tempfile::tempdir().unwrap();
    let counts = dir.path().join("counts");
    fs::create_dir(&counts).unwrap();
    // every context measured perfectly: its sign, 100 shots each
    let sim = stdout_json(&hexctx(&["cabello", "simulate", "doily"]));
    for ctx in sim["contexts"].as_array().unwrap() {
        let id = ctx["line_id"].as_u64().unwrap();
        let key = if ctx["expectation"].as_f64().unwrap() > 0.0 { "000" } else { "001" };
        let h = serde_json::json!({ "line_id": id, "shots": 100, "counts": { key: 100 } });
        fs::write(counts.join(format!("ctx_{id}.json")), h.to_string()).unwrap();
    }
    let o = hexctx(&["cabello", "score", "doily", "--counts", counts.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&o);
    assert_eq!(r["chi"].as_f64(), Some(15.0));
    assert_eq!(r["hv_bound"].as_i64(), Some(9));

    fs::remove_file(counts.join("ctx_0.json")).unwrap();
    assert_eq!(code(&hexctx(&["cabello", "score", "doily", "--counts", counts.to_str().unwrap()])), 10);
    let missing = dir.path().join("absent");
    assert_eq!(code(&hexctx(&["cabello", "score", "doily", "--counts", missing.to_str().unwrap()])), 10);
    fs::write(counts.join("broken.json"), "{").unwrap();
    assert_eq!(code(&hexctx(&["cabello", "score", "doily", "--counts", counts.to_str().unwrap()])), 7);
}

#[test]
fn hexagon_export() {
    let o = hexctx(&["hexagon", "skew"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["lines"].as_array().unwrap().len(), 63);
    assert!(r["axis"].is_string());
    let o = hexctx(&["hexagon", "classical", "--dot"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("graph hexagon {"));
}
