use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ks(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ks")).args(args).output().expect("ks runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn vertices(svg_path: &str) -> Vec<(f64, f64)> {
    let text = std::fs::read_to_string(svg_path).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    doc.descendants()
        .filter(|n| n.attribute("class") == Some("vertex"))
        .filter_map(|n| Some((n.attribute("data-u")?.parse().ok()?, n.attribute("data-v")?.parse().ok()?)))
        .collect()
}

#[test]
fn reach_then_verify_for_seeded_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let o = ks(&["--json", "selfcheck", "--pairs", "100", "--seed", "11"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["accepted"], 100);

    for (i, (from, to)) in [
        ("0,0.7071067811865475,0.7071067811865475", "0.5,-0.3,0.4"),
        ("0.1,0.2,0.97", "-0.5,0.3,0.4"),
        ("-0.3,-0.3,0.9", "0.9,0.1,0.1"),
    ]
    .iter()
    .enumerate()
    {
        let file = path(dir.path(), &format!("c{i}.json"));
        assert_eq!(code(&ks(&["reach", "--from", from, "--to", to, "-o", &file])), 0);
        let v = ks(&["--json", "verify", &file]);
        assert_eq!(code(&v), 0);
        assert_eq!(json(&v)["accepted"], true);
    }
}

#[test]
fn reach_errors_have_their_codes() {
    assert_eq!(code(&ks(&["reach", "--from", "0.5,0,0.4", "--to", "0,0.7,0.7"])), 24);
    assert_eq!(code(&ks(&["reach", "--from", "0,0,1", "--to", "0.5,0,0.4"])), 11);
    assert_eq!(code(&ks(&["reach", "--from", "0,0,1", "--to", "0.5,0"])), 4);
    assert_eq!(code(&ks(&["reach", "--from", "0,0,1"])), 2);
    assert_eq!(code(&ks(&["--eps", "0.5", "reach", "--from", "0,0.7,0.7", "--to", "0.5,0,0.4"])), 13);
    let o = ks(&["--json", "reach", "--from", "0,0,1", "--to", "0.5,0,0.4"]);
    assert_eq!(json(&o)["error"], "at_pole");
}

#[test]
fn tampered_certificate_names_the_link() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "c.json");
    assert_eq!(code(&ks(&["reach", "--from", "0.1,0.2,0.97", "--to", "-0.5,0.3,0.4", "-o", &file])), 0);
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    let z = doc["points"][2][2].as_f64().unwrap();
    doc["points"][2][2] = Value::from(-z);
    std::fs::write(&file, doc.to_string()).unwrap();
    let o = ks(&["--json", "verify", &file]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["first_bad_link"], 2);

    std::fs::write(&file, r#"{"eps":1e-9,"shell_n":null,"points":[],"residuals":[]}"#).unwrap();
    assert_eq!(code(&ks(&["verify", &file])), 1);
    std::fs::write(&file, "{not json").unwrap();
    assert_eq!(code(&ks(&["verify", &file])), 4);
    assert_eq!(code(&ks(&["verify", &path(dir.path(), "missing.json")])), 3);
}

#[test]
fn shell_drawing() {
    let dir = tempfile::tempdir().unwrap();
    let svg = path(dir.path(), "shell.svg");
    let o = ks(&["--json", "shell", "--point", "0.3,0.1,0.9", "--n", "16", "--svg", &svg]);
    assert_eq!(code(&o), 0);
    let v = vertices(&svg);
    assert_eq!(v.len(), 17);
    let ratio = 1.0 / (std::f64::consts::PI / 8.0).cos();
    for w in v.windows(2) {
        let (d0, d1) = (w[0].0.hypot(w[0].1), w[1].0.hypot(w[1].1));
        assert!((d1 / d0 - ratio).abs() < 1e-9);
    }
    assert!((json(&o)["growth"].as_f64().unwrap() - 3.549_396_079_493_484).abs() < 1e-12);
    assert_eq!(code(&ks(&["shell", "--point", "0.3,0.1,0.9", "--n", "4"])), 21);
}

#[test]
fn render_figures() {
    let dir = tempfile::tempdir().unwrap();
    let svg = path(dir.path(), "f.svg");
    // h(q) = (1,0), h(p) = (2,0).
    let o = ks(&["render", "step1", "--q", "1,0,1", "--p", "2,0,1", "--svg", &svg]);
    assert_eq!(code(&o), 0);
    assert!(vertices(&svg).iter().any(|&(u, v)| (u - 1.0).abs() < 1e-12 && (v - 1.0).abs() < 1e-12));
    for fig in ["circle", "projection", "shell"] {
        assert_eq!(code(&ks(&["render", fig, "--q", "0.2,0.5,0.8", "--p", "0.9,0,0.3", "--svg", &svg])), 0);
        roxmltree::Document::parse(&std::fs::read_to_string(&svg).unwrap()).unwrap();
    }
    assert_eq!(code(&ks(&["render", "circle", "--q", "0,0,1", "--svg", &svg])), 11);
}

#[test]
fn second_demo_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = ks(&["--json", "demo", "second", "-o", out]);
    assert_eq!(code(&o), 0);
    let s = json(&o);
    assert_eq!(s["closed"], true);
    assert_eq!(s["count"], 0);
    let system = path(dir.path(), "system.json");
    let v = ks(&["--json", "verify", &system]);
    assert_eq!(code(&v), 0);
    let c = ks(&["--json", "color", &system, "--mode", "prove-none"]);
    assert_eq!(code(&c), 0);
    assert_eq!(json(&c)["count"], 0);
    assert_eq!(code(&ks(&["color", &system, "--mode", "witness"])), 1);
    let trace: Value = serde_json::from_str(&std::fs::read_to_string(path(dir.path(), "trace.json")).unwrap()).unwrap();
    assert!(trace["facts"].as_array().unwrap().len() > 10);
}

#[test]
fn first_demo_pipeline() {
    let o = ks(&["--json", "demo", "first", "--pole", "0,sqrt(1-0.96^2),0.96"]);
    assert_eq!(code(&o), 0);
    let s = json(&o);
    assert_eq!(s["count"], 0);
    for w in s["witnesses"].as_array().unwrap() {
        assert!(w["facts"].is_array());
    }
    assert_eq!(code(&ks(&["demo", "first", "--pole", "0,sqrt(0.75),0.5"])), 35);
}

#[test]
fn colour_small_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "s.json");
    std::fs::write(&file, r#"{"eps":1e-9,"rays":[[0,0,1],[1,0,0],[0,1,0]],"triads":[[0,1,2]],"pairs":[]}"#).unwrap();
    let o = ks(&["--json", "color", &file]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["count"], 3);
    assert_eq!(code(&ks(&["color", &file, "--mode", "prove-none"])), 1);
    assert_eq!(code(&ks(&["color", &file, "--mode", "witness"])), 0);
    std::fs::write(&file, r#"{"eps":1e-9,"rays":[[0,0,1]],"triads":[[0,1,2]]"#).unwrap();
    assert_eq!(code(&ks(&["color", &file])), 4);
    std::fs::write(&file, r#"{"eps":1e-9,"rays":[[0,0,1],[0.6,0.8,0],[1,0,0]],"triads":[[0,1,2]],"pairs":[]}"#).unwrap();
    assert_eq!(code(&ks(&["color", &file])), 5);
}

#[test]
fn human_and_json_carry_the_same_numbers() {
    let args = ["shell", "--point", "0.3,0.1,0.9", "--n", "8"];
    let h = String::from_utf8(ks(&args).stdout).unwrap();
    let mut with_json = vec!["--json"];
    with_json.extend(args);
    let j = json(&ks(&with_json));
    let mut want = Vec::new();
    fn numbers(v: &Value, out: &mut Vec<String>) {
        match v {
            Value::Number(n) => out.push(n.to_string()),
            Value::Array(a) => a.iter().for_each(|x| numbers(x, out)),
            Value::Object(m) => m.values().for_each(|x| numbers(x, out)),
            _ => {}
        }
    }
    numbers(&j, &mut want);
    let got: Vec<String> = h
        .lines()
        .filter_map(|l| l.split_once(": ").map(|(_, v)| v.to_string()))
        .flat_map(|v| {
            v.trim_matches(|c| c == '[' || c == ']')
                .split(',')
                .map(str::to_string)
                .collect::<Vec<_>>()
        })
        .collect();
    assert_eq!(got, want);
}

#[test]
fn output_is_deterministic() {
    let a = ks(&["--json", "demo", "second"]);
    let b = ks(&["--json", "demo", "second"]);
    assert_eq!(a.stdout, b.stdout);
    let a = ks(&["selfcheck", "--pairs", "20", "--seed", "3"]);
    let b = ks(&["selfcheck", "--pairs", "20", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
}
