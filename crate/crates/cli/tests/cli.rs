use std::path::PathBuf;
use std::process::{Command, Output};

use mgg::grammar::parse_grammar;
use mgg::oracle::pascal_mod2;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn mgg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mgg")).args(args).output().expect("binary runs")
}

fn with_examples(args: &[&str]) -> Output {
    let path = fixture("examples.mgg");
    let mut all = vec!["--grammar", path.to_str().unwrap()];
    all.extend_from_slice(args);
    mgg(&all)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn coherence_failure_reports_both_matrices() {
    let o = with_examples(&["analyze", "--sequence", "bad", "--check", "coherence"]);
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert!(text.contains("display order: p5;p4\n"));
    assert!(text.contains("ok: false\n"));
    assert!(text.contains("result certainty edges: [[0,0,0],[0,0,1],[0,0,1]]\n"), "{text}");
    assert!(text.contains("result nihil edges: [[0,0,1],[0,0,1],[0,0,0]]\n"), "{text}");
    assert!(text.contains("witness: certainty edge 3->3 rule 2 (p5): needed but deleted by an earlier rule\n"));
}

#[test]
fn initial_digraph_of_coherent_sequence() {
    let o = with_examples(&["analyze", "--sequence", "good", "--check", "initial"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("result certainty edges: [[1,1,0],[0,1,0],[1,1,0]]\n"), "{text}");
    assert!(text.contains("result nihil edges: [[0,0,1],[1,0,1],[0,0,1]]\n"), "{text}");
    assert!(text.contains("display order: q2;q1\n"));
}

#[test]
fn remaining_checks_run() {
    let image = with_examples(&["analyze", "--sequence", "good", "--check", "image"]);
    assert_eq!(code(&image), 0);
    assert!(stdout(&image).contains("initial certainty edges: [[1,1,0],[0,1,0],[1,1,0]]\n"));
    let compat = with_examples(&["analyze", "--sequence", "good", "--check", "compatibility"]);
    assert_eq!(code(&compat), 0);
    let advance = with_examples(&["analyze", "--sequence", "toggle", "--check", "congruence"]);
    assert_eq!(code(&advance), 1);
    assert!(stdout(&advance).contains("witness: nihil edge 1->2 rule 2 (join): forbidden by the moved rule\n"));
    let delay = with_examples(&["analyze", "--sequence", "toggle", "--check", "congruence", "--mode", "delay"]);
    assert_eq!(code(&delay), 1);
    let short = with_examples(&["analyze", "--sequence", "single", "--check", "congruence"]);
    assert_eq!(code(&short), 2);
}

#[test]
fn encode_term_example() {
    let path = fixture("term.mgg");
    let o = mgg(&["-g", path.to_str().unwrap(), "encode", "--production", "loop"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("lhs term: re=0.011b (3/8), im=0.1b (1/2)\n"));
    let g = mgg(&["-g", path.to_str().unwrap(), "encode", "--graph", "cross"]);
    assert!(stdout(&g).contains("ell: re=0.011b (3/8), im=0.0b (0/1)\n"));
    let both = mgg(&["-g", path.to_str().unwrap(), "encode", "--graph", "cross", "--production", "loop"]);
    assert_eq!(code(&both), 2);
}

#[test]
fn gasket_file_matches_pascal_triangle() {
    let out = std::env::temp_dir().join(format!("mgg-gasket-{}.pbm", std::process::id()));
    let o = mgg(&["gasket", "--bits", "8", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let written = std::fs::read(&out).unwrap();
    std::fs::remove_file(&out).unwrap();
    assert!(written.starts_with(b"P1 256 256\n"));
    assert_eq!(written, pascal_mod2(8).unwrap().to_pbm().into_bytes());
    assert!(stdout(&o).contains("size: 256x256\n"));
}

#[test]
fn census_report() {
    let o = mgg(&["census", "--nodes", "2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("productions: 256\nclasses: 16\nhistogram: 1 4 6 4 1\n"));
    assert_eq!(text.matches(" size 16\n").count(), 16);
    assert_eq!(stdout(&mgg(&["--sequential", "census", "--nodes", "2"])), text);
    assert_eq!(code(&mgg(&["census", "--nodes", "3"])), 2);
}

#[test]
fn derivation_outcomes() {
    let ok = with_examples(&["derive", "--host", "G", "--sequence", "good"]);
    assert_eq!(code(&ok), 0);
    let text = stdout(&ok);
    assert!(text.contains("step 1 match: 1=a 2=b 3=c\n"));
    assert!(text.contains("completed: true\n"));

    let all = with_examples(&["derive", "--host", "G", "--sequence", "good", "--select", "all"]);
    assert!(stdout(&all).contains("step 1 candidate 0: 1=a 2=b 3=c\n"));

    let missing = with_examples(&["derive", "--host", "H", "--sequence", "good"]);
    assert_eq!(code(&missing), 1);
    assert!(stdout(&missing).contains("failure: step 1 (q1): no match, m_L fails\n"));

    let index = with_examples(&["derive", "--host", "G", "--sequence", "good", "--select", "4"]);
    assert_eq!(code(&index), 1);
    assert!(stdout(&index).contains("match index 4 out of range (1 available)"));
}

#[test]
fn unknown_names_and_bad_input_exit_2() {
    for args in [
        &["analyze", "--sequence", "nope", "--check", "image"][..],
        &["derive", "--host", "nope", "--sequence", "good"],
        &["encode", "--production", "nope"],
        &["analyze", "--sequence", "good", "--check", "sideways"],
        &["derive", "--host", "G", "--sequence", "good", "--select", "some"],
    ] {
        assert_eq!(code(&with_examples(args)), 2, "{args:?}");
    }
    assert_eq!(code(&mgg(&["analyze", "--sequence", "good", "--check", "image"])), 2);

    let broken = std::env::temp_dir().join(format!("mgg-broken-{}.mgg", std::process::id()));
    std::fs::write(&broken, "universe: 1 2\nhost G: nodes 1; edges 1->2\n").unwrap();
    let o = mgg(&["-g", broken.to_str().unwrap(), "encode", "--graph", "G"]);
    std::fs::remove_file(&broken).unwrap();
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn reports_are_deterministic() {
    let args = ["derive", "--host", "G", "--sequence", "good", "--select", "all"];
    assert_eq!(stdout(&with_examples(&args)), stdout(&with_examples(&args)));
}

#[test]
fn fixtures_round_trip() {
    for name in ["examples.mgg", "term.mgg"] {
        let g = parse_grammar(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap();
        assert_eq!(parse_grammar(&g.to_text()).unwrap(), g);
    }
}
