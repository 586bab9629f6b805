use std::fs;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_cluster");
const SEEDS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../seeds");

fn seed(name: &str) -> String {
    format!("{SEEDS}/{name}.json")
}

fn cluster(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("CLUSTER_CACHE_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> std::path::PathBuf {
    let p = std::env::temp_dir().join(format!("cluster-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&p);
    p
}

#[test]
fn expand_example() {
    let o = cluster(&["expand", "--word", "1", "--var", "1", &seed("example4")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "x^(-1,0) + x^(-1,1)\n");
}

#[test]
fn normalized_expansion_matches_classical() {
    let args = ["expand", "--word", "1,2", "--var", "2", &seed("A2")];
    let q = stdout(&cluster(&args));
    let c = stdout(&cluster(&[&args[..], &["--classical"]].concat()));
    assert_eq!(c.trim(), "x^(-1,-1) + x^(-1,0) + x^(0,-1)");
    assert_eq!(q, c);
}

#[test]
fn mutate_twice_is_identity() {
    let once: serde_json::Value = serde_json::from_slice(&cluster(&["mutate", "--word", "2", &seed("A2")]).stdout).unwrap();
    assert_eq!(once["B"], serde_json::json!([["0", "-1"], ["1", "0"]]));
    let back: serde_json::Value = serde_json::from_slice(&cluster(&["mutate", "--word", "2,2", &seed("A2")]).stdout).unwrap();
    let orig: serde_json::Value = serde_json::from_str(&fs::read_to_string(seed("A2")).unwrap()).unwrap();
    for key in ["n", "unfrozen", "B", "d", "Lambda", "labels"] {
        assert_eq!(back[key], orig[key], "{key}");
    }
}

#[test]
fn vectors_and_fpoly() {
    let g = stdout(&cluster(&["gvec", "--word", "1", &seed("A2")]));
    assert_eq!(g, "x1: (-1,1)\nx2: (0,1)\n");
    let c = stdout(&cluster(&["cvec", "--word", "1", "--format", "json", &seed("A2")]));
    let c: Vec<Vec<i64>> = serde_json::from_str(&c).unwrap();
    assert_eq!(c, vec![vec![-1, 0], vec![1, 1]]);
    let f = stdout(&cluster(&["fpoly", "--word", "1,2", "--var", "2", &seed("A2")]));
    assert_eq!(f.trim(), "1 + y^(1,0) + y^(1,1)");
}

#[test]
fn graph_formats() {
    let dot = stdout(&cluster(&["graph", "--depth", "6", &seed("A2")]));
    assert!(dot.starts_with("graph exchange {"));
    assert_eq!(dot.matches(" -- ").count(), 5);
    let js: serde_json::Value = serde_json::from_slice(&cluster(&["graph", "--format", "json", &seed("A3")]).stdout).unwrap();
    assert_eq!(js["nodes"].as_array().unwrap().len(), 14);
    assert_eq!(js["complete"], true);
}

#[test]
fn freeze_seed_and_variable() {
    let f: serde_json::Value = serde_json::from_slice(&cluster(&["freeze", "--freeze", "1", &seed("A3")]).stdout).unwrap();
    assert_eq!(f["unfrozen"], serde_json::json!([2, 3]));
    let o = cluster(&["freeze", "--freeze", "1", "--word", "1", "--var", "1", &seed("example4")]);
    assert_eq!(stdout(&o), "x^(-1,0)\n");
}

#[test]
fn scatter_svg_and_pushforward() {
    let svg = stdout(&cluster(&["scatter", "--order", "4", "--format", "svg", &seed("kronecker")]));
    assert!(svg.starts_with("<svg"));
    let p: serde_json::Value =
        serde_json::from_slice(&cluster(&["scatter", "--order", "4", "--freeze", "1", &seed("kronecker")]).stdout).unwrap();
    assert_eq!(p["walls"].as_array().unwrap().len(), 1);
}

#[test]
fn theta_text_and_lines() {
    let t = stdout(&cluster(&["theta", "--m=-1,1", "--order", "6", &seed("A2")]));
    let x = stdout(&cluster(&["expand", "--word", "1", "--var", "1", "--classical", &seed("A2")]));
    assert_eq!(t, x);
    let js: serde_json::Value =
        serde_json::from_slice(&cluster(&["theta", "--m=-1,1", "--format", "json", &seed("A2")]).stdout).unwrap();
    assert_eq!(js["broken_lines"].as_array().unwrap().len(), 2);
    let a3 = cluster(&["theta", "--m=-1,0,0,0", &seed("A3")]);
    assert!(a3.status.success(), "{}", stderr(&a3));
}

#[test]
fn verify_example_and_exit_codes() {
    let o = cluster(&["verify", "freeze-cluster-monomial", "--freeze", "2", "--depth", "6", &seed("A3")]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r[0]["status"], "verified");
    assert_eq!(r[0]["theorem"], "freeze-cluster-monomial");

    // completion is only available in rank 2
    let o = cluster(&["verify", "scattering-consistency", &seed("A3")]);
    assert_eq!(o.status.code(), Some(2));
    let o = cluster(&["verify", "theta-positive", &seed("A3")]);
    assert_eq!(o.status.code(), Some(2));

    let o = cluster(&["verify", "no-such-harness", &seed("A2")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown theorem id"));
}

#[test]
fn list_ids() {
    let o = stdout(&cluster(&["verify", "list"]));
    assert!(o.lines().count() >= 20);
    assert!(o.contains("freeze-cluster-monomial"));
}

#[test]
fn parse_error_has_location() {
    let dir = scratch("parse");
    fs::create_dir_all(&dir).unwrap();
    let p = dir.join("bad.json");
    fs::write(&p, "{\n  \"n\": 2,\n  \"unfrozen\": [1,\n}").unwrap();
    let o = cluster(&["gvec", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.contains("bad.json") && e.contains("line 4"), "{e}");
}

#[test]
fn invariant_errors() {
    let o = cluster(&["expand", "--word", "2", "--var", "1", &seed("example4")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("frozen"), "{}", stderr(&o));
    let o = cluster(&["freeze", "--freeze", "2", &seed("example4")]);
    assert_eq!(o.status.code(), Some(1));
    let o = cluster(&["graph", "--depth", "0", &seed("A2")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("strictly positive"));

    let dir = scratch("skew");
    fs::create_dir_all(&dir).unwrap();
    let p = dir.join("skew.json");
    fs::write(&p, r#"{"n":2,"unfrozen":[1,2],"B":[[0,1],[1,0]],"d":[1,1]}"#).unwrap();
    let o = cluster(&["gvec", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("skew"), "{}", stderr(&o));
}

#[test]
fn output_file() {
    let dir = scratch("out");
    fs::create_dir_all(&dir).unwrap();
    let p = dir.join("g.txt");
    let o = cluster(&["gvec", "-o", p.to_str().unwrap(), &seed("A2")]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(fs::read_to_string(&p).unwrap(), "x1: (1,0)\nx2: (0,1)\n");
}

#[test]
fn cache_dir_memoizes() {
    let dir = scratch("cache");
    let run = || {
        Command::new(BIN)
            .args(["expand", "--word", "1,2,1", "--var", "2", &seed("A3")])
            .env("CLUSTER_CACHE_DIR", &dir)
            .output()
            .unwrap()
    };
    let a = run();
    assert!(a.status.success());
    let files: Vec<_> = fs::read_dir(&dir).unwrap().collect();
    assert_eq!(files.len(), 1);
    let b = run();
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a), stdout(&cluster(&["expand", "--word", "1,2,1", "--var", "2", &seed("A3")])));
}
