use std::path::PathBuf;
use std::process::{Command, Output};

use richpoint::harness::ExperimentReport;
use richpoint::io::{from_json, to_json, InstanceFile};
use serde_json::Value;

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Scratch {
        let dir = std::env::temp_dir().join(format!("richpoint-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }

    fn write(&self, name: &str, body: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, body).unwrap();
        p
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_richpoint"))
        .args(args)
        .env("RAYON_NUM_THREADS", "2")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn gen(dir: &Scratch, name: &str, args: &[&str]) -> PathBuf {
    let p = dir.path(name);
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", p.to_str().unwrap()]);
    let o = run(&all);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    p
}

/// Parses a report and checks that writing it back gives the same text.
fn report(o: &Output) -> ExperimentReport {
    let text = stdout(o);
    let rep: ExperimentReport = from_json(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    assert_eq!(to_json(&rep).unwrap(), text);
    floats_only_under_approx(&serde_json::from_str(&text).unwrap(), false, "$");
    rep
}

fn floats_only_under_approx(v: &Value, approx: bool, at: &str) {
    match v {
        Value::Number(n) => assert!(!n.is_f64() || approx, "float at {at}"),
        Value::Array(xs) => xs
            .iter()
            .enumerate()
            .for_each(|(i, x)| floats_only_under_approx(x, approx, &format!("{at}[{i}]"))),
        Value::Object(m) => m
            .iter()
            .for_each(|(k, x)| floats_only_under_approx(x, approx || k.ends_with("_approx"), &format!("{at}.{k}"))),
        _ => {}
    }
}

fn holds(rep: &ExperimentReport, name: &str) -> bool {
    rep.assertions
        .iter()
        .find(|a| a.name == name)
        .unwrap_or_else(|| panic!("no assertion {name:?}"))
        .holds
}

#[test]
fn gen_writes_instance_files() {
    let d = Scratch::new("gen");
    let g = gen(&d, "g.json", &["--kind", "grid2d", "--n", "2", "--m", "3"]);
    let text = std::fs::read_to_string(&g).unwrap();
    match from_json::<InstanceFile>(&text).unwrap() {
        InstanceFile::Points { points } => assert_eq!(points.len(), 6),
        other => panic!("{other:?}"),
    }
    let es = run(&["gen", "--kind", "grid2d", "--n", "2", "--es"]);
    match from_json::<InstanceFile>(&stdout(&es)).unwrap() {
        InstanceFile::Lines { lines } => assert_eq!(lines.len(), 16),
        other => panic!("{other:?}"),
    }
    let a = run(&["gen", "--kind", "random-lines3d", "--n", "10", "--seed", "5"]);
    let b = run(&["gen", "--kind", "random-lines3d", "--n", "10", "--seed", "5"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn quads_on_the_unit_square() {
    let d = Scratch::new("quads");
    let g = gen(&d, "g.json", &["--kind", "grid2d", "--n", "2"]);
    let o = run(&["quads", "--input", g.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let rep = report(&o);
    assert_eq!(rep.census.len(), 2);
    for c in &rep.census {
        assert_eq!((c.total, c.parallel, c.intersecting), (80, 20, 60));
    }
}

#[test]
fn rich_on_a_pencil() {
    let d = Scratch::new("rich");
    let p = gen(&d, "p.json", &["--kind", "pencil", "--n", "6"]);
    let rep = report(&run(&["rich", "--input", p.to_str().unwrap(), "--r", "6"]));
    let rows: Vec<_> = rep.rich[0].rows.iter().map(|r| (r.r, r.count)).collect();
    assert_eq!(rows, [(2, 1), (3, 1), (4, 1), (5, 1), (6, 1)]);
    assert_eq!(rep.details["p_r"]["points"][0]["point"], serde_json::json!(["0", "0", "0"]));
    assert_eq!(rep.details["skew_pairs"], 0);
}

#[test]
fn ddbound_and_verify_hold_on_a_grid() {
    let d = Scratch::new("verify");
    let g = gen(&d, "g.json", &["--kind", "grid2d", "--n", "3"]);
    let dd = run(&["ddbound", "--input", g.to_str().unwrap()]);
    assert_eq!(code(&dd), 0);
    let rep = report(&dd);
    assert_eq!(rep.details["quadruples"], 1248);
    let v = run(&["verify", "--input", g.to_str().unwrap(), "--samples", "10"]);
    assert_eq!(code(&v), 0, "{}", stdout(&v));
    let rep = report(&v);
    assert!(rep.assertions.len() >= 8);
    assert_eq!(rep.details["skipped"], serde_json::json!([]));
    assert!(rep.passed());
}

#[test]
fn partition_exit_code_follows_the_ratio_assertion() {
    let ok = run(&["partition", "--points", "300", "--degree", "2", "--seed", "3"]);
    assert_eq!(code(&ok), 0);
    let rep = report(&ok);
    assert_eq!(rep.partition[0].points, 300);
    let strict = run(&["partition", "--points", "300", "--degree", "2", "--seed", "3", "--max-ratio", "1/100"]);
    assert_eq!(code(&strict), 1);
    assert!(!report(&strict).passed());
}

#[test]
fn cluster_on_an_es_family() {
    let d = Scratch::new("cluster");
    let es = gen(&d, "es.json", &["--kind", "grid2d", "--n", "3", "--es"]);
    let o = run(&["cluster", "--input", es.to_str().unwrap(), "--r", "3", "--trace"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let rep = report(&o);
    assert!(holds(&rep, "residual recomputed independently"));
    assert!(holds(&rep, "recursion checks"));
}

#[test]
fn scale_then_plot() {
    let d = Scratch::new("scale");
    let s = d.path("scale.json");
    let o = run(&["scale", "--sizes", "9,16,25,36", "--out", s.to_str().unwrap()]);
    let text = std::fs::read_to_string(&s).unwrap();
    let rep: ExperimentReport = from_json(&text).unwrap();
    assert_eq!(to_json(&rep).unwrap(), text);
    floats_only_under_approx(&serde_json::from_str(&text).unwrap(), false, "$");
    assert_eq!(code(&o), if rep.passed() { 0 } else { 1 });
    assert!(holds(&rep, "unit square has 80 quadruples"));
    let outdir = d.path("plots");
    let p = run(&["plot", "--report", s.to_str().unwrap(), "--outdir", outdir.to_str().unwrap()]);
    assert_eq!(code(&p), 0);
    for f in ["scaling.svg", "scaling.csv", "assertions.csv"] {
        assert!(outdir.join(f).is_file(), "{f}");
    }
}

#[test]
fn small_grids_fail_the_slope_assertion() {
    let o = run(&["scale", "--sizes", "4,9,16"]);
    assert_eq!(code(&o), 1);
    let rep = report(&o);
    assert!(!rep.scaling.unwrap().slope_holds);
}

#[test]
fn config_supplies_defaults_and_flags_win() {
    let d = Scratch::new("config");
    let cfg = d.write("cfg.json", r#"{"kind": "grid2d", "n": 3, "m": 2}"#);
    let c = cfg.to_str().unwrap();
    let from_cfg = from_json::<InstanceFile>(&stdout(&run(&["gen", "--config", c]))).unwrap();
    let overridden = from_json::<InstanceFile>(&stdout(&run(&["gen", "--config", c, "--n", "4"]))).unwrap();
    let len = |f: &InstanceFile| match f {
        InstanceFile::Points { points } => points.len(),
        other => panic!("{other:?}"),
    };
    assert_eq!(len(&from_cfg), 6);
    assert_eq!(len(&overridden), 8);
    let pcfg = d.write("p.json", r#"{"points": 100, "degree": 2, "max-ratio": "1/100"}"#);
    let p = pcfg.to_str().unwrap();
    assert_eq!(code(&run(&["partition", "--config", p])), 1);
    assert_eq!(code(&run(&["partition", "--config", p, "--max-ratio", "100"])), 0);
}

#[test]
fn errors_exit_with_two() {
    let d = Scratch::new("errors");
    let missing = d.path("missing.json");
    let o = run(&["rich", "--input", missing.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    let bad = d.write("bad.json", "{\"kind\": \"points\", \"points\": [[\"1/0\", \"0\"]]}");
    assert_eq!(code(&run(&["quads", "--input", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["gen", "--kind", "no-such-kind", "--n", "3"])), 2);
    let lines = gen(&d, "l.json", &["--kind", "pencil", "--n", "3"]);
    assert_eq!(code(&run(&["quads", "--input", lines.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["partition"])), 2);
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}
