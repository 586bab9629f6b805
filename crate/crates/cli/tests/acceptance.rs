//! End-to-end acceptance run through the `cluster` binary. Prints one
//! PASS/FAIL line per criterion and fails if any criterion fails.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_cluster");
const SEEDS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../seeds");

type Outcome = Result<String, String>;

#[derive(Default)]
struct Ctx {
    /// every command run so far with its stdout, replayed for determinism
    artifacts: Vec<(Vec<String>, Vec<u8>)>,
}

fn seed(name: &str) -> String {
    format!("{SEEDS}/{name}.json")
}

fn exec(args: &[String], threads: usize) -> (i32, Vec<u8>, String) {
    let out = Command::new(BIN)
        .args(args)
        .arg("--threads")
        .arg(threads.to_string())
        .env_remove("CLUSTER_CACHE_DIR")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout, String::from_utf8_lossy(&out.stderr).into_owned())
}

impl Ctx {
    fn run(&mut self, args: &[&str]) -> Result<(i32, String), String> {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let (code, stdout, stderr) = exec(&args, 1);
        if code == 1 {
            return Err(format!("`{}` failed: {}", args.join(" "), stderr.trim()));
        }
        let text = String::from_utf8(stdout.clone()).map_err(|e| e.to_string())?;
        self.artifacts.push((args, stdout));
        Ok((code, text))
    }

    fn text(&mut self, args: &[&str]) -> Result<String, String> {
        Ok(self.run(args)?.1.trim_end().to_string())
    }

    /// Runs a harness and requires every report to be verified.
    fn verified(&mut self, args: &[&str]) -> Result<Vec<Value>, String> {
        let (code, text) = self.run(args)?;
        let reports: Vec<Value> = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        if reports.is_empty() {
            return Err(format!("`{}` produced no reports", args.join(" ")));
        }
        for r in &reports {
            if r["status"] != "verified" {
                return Err(format!("{} {}: {}", r["theorem"], r["instance"], r["status"]));
            }
        }
        if code != 0 {
            return Err(format!("`{}` exited with {code}", args.join(" ")));
        }
        Ok(reports)
    }
}

fn expect(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn worked_example(cx: &mut Ctx) -> Outcome {
    let ex4 = seed("example4");
    let x1p = cx.text(&["expand", "--word", "1", "--var", "1", &ex4])?;
    expect(x1p == "x^(-1,0) + x^(-1,1)", format!("x1' = {x1p}"))?;
    let frozen = cx.text(&["freeze", "--freeze", "1", "--word", "1", "--var", "1", &ex4])?;
    expect(frozen == "x^(-1,0)", format!("frozen x1' = {frozen}"))?;
    let reports = cx.verified(&["verify", "example-freezing", "--classical", "--samples", "10", &ex4])?;
    let ids: Vec<&str> = reports.iter().filter_map(|r| r["theorem"].as_str()).collect();
    expect(ids == ["example-freezing", "freeze-multiplicative", "transport-not-multiplicative"], format!("{ids:?}"))?;
    let w = &reports[2]["witness"];
    expect(w["transport_of_product"] == "x^(0,0) + x^(0,1)", format!("transport of x1*x1' = {}", w["transport_of_product"]))?;
    expect(w["product_of_transports"] == "x^(0,0)", format!("product of transports = {}", w["product_of_transports"]))?;
    Ok("x1' and its frozen image exact; 10 sampled products multiplicative; 1 + x2 != 1".into())
}

fn positivity(cx: &mut Ctx) -> Outcome {
    let mut words = Vec::new();
    for s in ["A2", "A3", "kronecker"] {
        let r = cx.verified(&["verify", "laurent-positivity", "--word-len", "8", &seed(s)])?;
        words.push(format!("{s}:{}", r[0]["witness"]["words"]));
    }
    Ok(format!("words checked {}", words.join(" ")))
}

fn quantum(cx: &mut Ctx) -> Outcome {
    let mut vars = Vec::new();
    for s in ["A2", "A3"] {
        let r = cx.verified(&["verify", "quantum-consistency", "--word-len", "8", &seed(s)])?;
        let n = r[0]["witness"]["variables"].as_u64().unwrap_or(0);
        expect(n > 0, format!("{s}: no quantum variables checked"))?;
        vars.push(format!("{s}:{n}"));
    }
    Ok(format!("variables {}", vars.join(" ")))
}

fn exchange_graphs(cx: &mut Ctx) -> Outcome {
    let a2 = cx.verified(&["verify", "exchange-graph", &seed("A2")])?;
    let w = &a2[0]["witness"];
    expect(w["seeds"] == 5 && w["cycle"] == true && w["complete"] == true, format!("A2 graph {w}"))?;
    let a3 = cx.verified(&["verify", "exchange-graph", &seed("A3")])?;
    let w = &a3[0]["witness"];
    expect(w["seeds"] == 14 && w["complete"] == true, format!("A3 graph {w}"))?;
    for (s, freezings) in [("A2", 3), ("A3", 7)] {
        let r = cx.verified(&["verify", "injective-reachable", &seed(s)])?;
        expect(r.len() == 1 + freezings, format!("{s}: {} injective-reachable reports", r.len()))?;
    }
    Ok("A2 5-cycle, A3 14 seeds, injective-reachable under all freezings".into())
}

fn freeze_monomials(cx: &mut Ctx) -> Outcome {
    let a3 = seed("A3");
    for f in ["1", "2", "3", "1,3"] {
        let r = cx.verified(&["verify", "freeze-cluster-monomial", "--freeze", f, "--depth", "8", "--box", "2", &a3])?;
        let w = &r[0]["witness"];
        expect(w["identified"] == 625, format!("F={{{f}}}: {w}"))?;
    }
    Ok("625 degrees identified for each F".into())
}

fn consistency(cx: &mut Ctx) -> Outcome {
    let a2 = seed("A2");
    let d: Value = serde_json::from_str(&cx.text(&["scatter", "--order", "8", &a2])?).map_err(|e| e.to_string())?;
    let out: Vec<&Value> = d["walls"].as_array().ok_or("no walls")?.iter().filter(|w| w["incoming"] == false).collect();
    expect(out.len() == 1, format!("{} outgoing walls", out.len()))?;
    expect(out[0]["normal"] == serde_json::json!([1, 1]), format!("normal {}", out[0]["normal"]))?;
    expect(out[0]["fn"] == serde_json::json!({"1": "1"}), format!("function {}", out[0]["fn"]))?;
    cx.verified(&["verify", "scattering-consistency", "--order", "8", "--loops", "20", &a2])?;
    let kr = cx.verified(&["verify", "scattering-consistency", "--order", "6", "--loops", "20", &seed("kronecker")])?;
    let loops = kr[0]["witness"]["loops"].as_u64().unwrap_or(0);
    expect(loops >= 20, format!("{loops} loops"))?;
    Ok(format!("A2 outgoing wall (1,1) with 1+t; Kronecker {loops} loops trivial"))
}

fn pushforward(cx: &mut Ctx) -> Outcome {
    for (s, freezings) in [("A2", 3), ("kronecker", 3)] {
        let r = cx.verified(&["verify", "pushforward", "--order", "6", &seed(s)])?;
        expect(r.len() == freezings, format!("{s}: {} reports", r.len()))?;
    }
    Ok("p_D agrees for every F on A2 and Kronecker".into())
}

fn theta_functions(cx: &mut Ctx) -> Outcome {
    for s in ["A2", "kronecker"] {
        let r = cx.verified(&["verify", "theta-positive", "--order", "6", "--samples", "10", &seed(s)])?;
        let n = r[0]["witness"]["m"].as_array().map_or(0, |a| a.len());
        expect(n == 10, format!("{s}: {n} positive m"))?;
    }
    let r = cx.verified(&["verify", "theta-cluster", "--order", "6", &seed("A2")])?;
    expect(r[0]["witness"]["variables"] == 10, format!("theta-cluster {}", r[0]["witness"]))?;
    for s in ["A2", "kronecker"] {
        for r in cx.verified(&["verify", "freeze-theta", "--order", "6", "--samples", "10", &seed(s)])? {
            let n = r["witness"]["m"].as_array().map_or(0, |a| a.len());
            expect(n == 10, format!("{}: {n} frozen m", r["instance"]))?;
        }
    }
    Ok("positive chamber, 10 A2 cluster variables, frozen theta functions".into())
}

fn bases_suite(cx: &mut Ctx) -> Outcome {
    let a2 = seed("A2");
    let cluster = cx.verified(&["bases", "verify", "--box", "2", "--basis", "cluster", &a2])?;
    let theta = cx.verified(&["bases", "verify", "--box", "2", "--basis", "theta", "--order", "12", &a2])?;
    let mut ids: Vec<&str> = cluster.iter().chain(&theta).filter_map(|r| r["theorem"].as_str()).collect();
    ids.sort();
    ids.dedup();
    let want = ["basis-independence", "induced-basis", "local-support", "local-transition", "property-s", "shift-product"];
    expect(ids == want, format!("harnesses run {ids:?}"))?;
    Ok(format!("{} reports verified", cluster.len() + theta.len()))
}

fn determinism(cx: &mut Ctx) -> Outcome {
    for (args, first) in &cx.artifacts {
        for threads in [1, 4] {
            let (_, again, _) = exec(args, threads);
            expect(&again == first, format!("`{}` differs with --threads {threads}", args.join(" ")))?;
        }
    }
    Ok(format!("{} artifacts identical across reruns and --threads 1/4", cx.artifacts.len()))
}

/// Written to the process stdout so the lines survive test output capture.
fn report(line: String) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").unwrap();
    out.flush().unwrap();
}

#[test]
fn acceptance() {
    let criteria: [(&str, u64, fn(&mut Ctx) -> Outcome); 10] = [
        ("1 worked freezing example", 1, worked_example),
        ("2 Laurent positivity", 30, positivity),
        ("3 quantum consistency", 30, quantum),
        ("4 exchange graphs", 60, exchange_graphs),
        ("5 freezing cluster monomials", 300, freeze_monomials),
        ("6 scattering consistency", 120, consistency),
        ("7 pushforward", 120, pushforward),
        ("8 theta functions", 120, theta_functions),
        ("9 bases on boxes", 300, bases_suite),
        ("10 determinism", 600, determinism),
    ];
    let mut cx = Ctx::default();
    let mut failed = Vec::new();
    for (name, budget, check) in criteria {
        let t = Instant::now();
        let res = check(&mut cx);
        let dt = t.elapsed();
        let res = res.and_then(|d| {
            if dt <= Duration::from_secs(budget) {
                Ok(d)
            } else {
                Err(format!("took {dt:.1?}, budget {budget}s"))
            }
        });
        match res {
            Ok(d) => report(format!("PASS criterion {name} ({dt:.2?}): {d}")),
            Err(e) => {
                report(format!("FAIL criterion {name} ({dt:.2?}): {e}"));
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
