use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use tupa::io::read_graphs;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn tupa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tupa"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = tupa(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ucca2bilex_matches_figure() {
    let dir = TempDir::new().unwrap();
    let first_two = dir.path().join("ab.jsonl");
    let text = fs::read_to_string(data("fig1.jsonl")).unwrap();
    fs::write(
        &first_two,
        text.lines().take(2).map(|l| format!("{l}\n")).collect::<String>(),
    )
    .unwrap();
    let out = ok(&["convert", "ucca2bilex", s(&first_two)]);
    assert_eq!(out, fs::read_to_string(data("fig3.bilex")).unwrap());
}

#[test]
fn bilex2ucca_and_back() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("home.jsonl");
    ok(&["convert", "bilex2ucca", s(&data("fig3_home.bilex")), "-o", s(&g)]);
    let graphs = read_graphs(&fs::read_to_string(&g).unwrap()).unwrap();
    assert_eq!(graphs.len(), 1);
    let back = ok(&["convert", "ucca2bilex", s(&g)]);
    assert_eq!(back, fs::read_to_string(data("fig3_home.bilex")).unwrap());
}

#[test]
fn tree_and_upper_bound() {
    let dir = TempDir::new().unwrap();
    let t = dir.path().join("t.jsonl");
    ok(&["convert", "ucca2tree", s(&data("fig1.jsonl")), "-o", s(&t)]);
    let trees = read_graphs(&fs::read_to_string(&t).unwrap()).unwrap();
    assert!(trees.iter().all(|g| g.edges.iter().all(|e| !e.remote)));
    let report = ok(&["convert", "upper-bound", s(&data("fig1.jsonl"))]);
    assert!(report.contains("LF"), "{report}");
}

#[test]
fn stats_on_figure_corpus() {
    let out = ok(&["stats", s(&data("fig1.jsonl"))]);
    assert!(out.contains("sentences\t3"), "{out}");
    assert!(out.contains("reentrant\t1\t"), "{out}");
    assert!(out.contains("discontinuous\t1\t"), "{out}");
}

#[test]
fn evaluate_identity() {
    let out = ok(&["evaluate", s(&data("fig1.jsonl")), s(&data("fig1.jsonl"))]);
    let row = out.lines().nth(1).unwrap();
    assert_eq!(row.matches("100.0").count(), 6, "{out}");
}

#[test]
fn oracle_sequences() {
    let out = ok(&["oracle", s(&data("fig1.jsonl"))]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| l.ends_with("FINISH")));
    assert!(lines[1].starts_with("gave_up\tSHIFT"));
}

#[test]
fn train_parse_evaluate() {
    let dir = TempDir::new().unwrap();
    let (m1, m2) = (dir.path().join("a.model"), dir.path().join("b.model"));
    let common = ["--epochs", "30", "--decay", "1", "--min-update", "1", "--seed", "7"];
    let gold = data("fig1.jsonl");
    for m in [&m1, &m2] {
        let mut args = vec!["train", s(&gold), "--model", s(m)];
        args.extend(common);
        ok(&args);
    }
    assert_eq!(fs::read(&m1).unwrap(), fs::read(&m2).unwrap());
    let (p1, p2) = (dir.path().join("p1.jsonl"), dir.path().join("p2.jsonl"));
    let dump = dir.path().join("features.txt");
    ok(&[
        "parse",
        s(&data("fig1.tok")),
        "--model",
        s(&m1),
        "-o",
        s(&p1),
        "--jobs",
        "2",
        "--dump-features",
        s(&dump),
    ]);
    ok(&[
        "parse",
        s(&data("fig1.tok")),
        "--model",
        s(&m1),
        "-o",
        s(&p2),
        "--jobs",
        "1",
    ]);
    assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    let dumped = fs::read_to_string(&dump).unwrap();
    assert!(dumped.lines().next().unwrap().starts_with("graduation\t0\tSHIFT\t"));
    assert!(dumped.contains(" b0wP=John|0|"), "{dumped}");
    assert!(!dumped.contains("b0wtd="), "untagged input: POS templates stay silent");
    let report = ok(&["evaluate", s(&p1), s(&data("fig1.jsonl"))]);
    let row = report.lines().nth(1).unwrap();
    assert!(row.trim_start().starts_with("100.0"), "{report}");
}

#[test]
fn zero_epochs_still_parses() {
    let dir = TempDir::new().unwrap();
    let m = dir.path().join("m");
    ok(&["train", s(&data("fig1.jsonl")), "--model", s(&m), "--epochs", "0"]);
    let out = ok(&["parse", s(&data("fig1.tok")), "--model", s(&m)]);
    assert_eq!(read_graphs(&out).unwrap().len(), 3);
}

#[test]
fn empty_and_single_token_input() {
    let dir = TempDir::new().unwrap();
    let m = dir.path().join("m");
    ok(&["train", s(&data("fig1.jsonl")), "--model", s(&m), "--epochs", "1"]);
    let empty = dir.path().join("empty.tok");
    fs::write(&empty, "").unwrap();
    assert_eq!(ok(&["parse", s(&empty), "--model", s(&m)]), "");
    let one = dir.path().join("one.tok");
    fs::write(&one, "1 Hello _ _\n").unwrap();
    let g = read_graphs(&ok(&["parse", s(&one), "--model", s(&m)])).unwrap();
    assert_eq!(g[0].tokens.len(), 1);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(tupa(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(tupa(&["train"]).status.code(), Some(1));
    assert_eq!(tupa(&["--help"]).status.code(), Some(0));
    let bad = dir.path().join("bad.jsonl");
    let good = fs::read_to_string(data("fig1.jsonl")).unwrap();
    fs::write(&bad, format!("{}{{oops\n", good)).unwrap();
    let out = tupa(&["train", s(&bad), "--model", s(&dir.path().join("m"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
    let junk = dir.path().join("junk.model");
    fs::write(&junk, b"not a model").unwrap();
    let out = tupa(&["parse", s(&data("fig1.tok")), "--model", s(&junk)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("magic"));
    assert_eq!(tupa(&["stats", "/nonexistent/file"]).status.code(), Some(2));
}
