use std::io::Write;
use std::process::{Command, Output, Stdio};

use dyn_densest::bounds::additive_slack;
use dyn_densest::Rational;
use dyn_densest_cli::{parse_stream, run, Answer, EventKind, RunMode, RunOptions, RunReport};
use num_bigint::BigInt;
use num_rational::BigRational;

const TRIANGLE: &str = "dsg 3\n+ 0 1\n+ 1 2\n+ 2 0\nqv\n";

fn exec(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dyn-densest"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn without_time(mut r: RunReport) -> RunReport {
    r.metrics.wall_time_us = 0;
    r
}

#[test]
fn parses_format_examples() {
    let s = parse_stream(TRIANGLE).unwrap();
    assert_eq!(s.events.iter().filter(|e| e.kind == EventKind::Insert).count(), 3);
    assert_eq!(s.events.last().unwrap().kind, EventKind::QueryValue);

    let h = parse_stream("dsg 4 rank 3\n+ 0 1 2\nqv\n").unwrap();
    assert_eq!(h.rank, Some(3));
    assert_eq!(h.events[0].endpoints, vec![0, 1, 2]);

    assert_eq!(parse_stream("dsg 3\n+ 0 9\n").unwrap_err().line, 2);
}

#[test]
fn triangle_value_is_bracketed() {
    let opts = RunOptions {
        dup_k: Some(8),
        eps: Some(Rational::new(1, 4)),
        ..Default::default()
    };
    let report = run(&parse_stream(TRIANGLE).unwrap(), &opts).unwrap();
    let [Answer::Value(v)] = report.answers.as_slice() else {
        panic!("expected one value answer, got {:?}", report.answers);
    };
    // OPT(K3) = 1
    let big = |r: Rational| BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()));
    let upper = big(Rational::new(5, 4)) + additive_slack(4, 3, &Rational::new(1, 4), 8);
    assert!(*v >= Rational::from_integer(1));
    assert!(big(*v) <= upper, "{v} above {upper}");
}

#[test]
fn runs_are_deterministic() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/corpus/10_random_n10.dsg")).unwrap();
    let stream = parse_stream(&text).unwrap();
    for mode in [
        RunMode::Amortized,
        RunMode::WorstCase,
        RunMode::Combined,
        RunMode::Hypergraph,
    ] {
        let opts = RunOptions {
            mode: Some(mode),
            ..Default::default()
        };
        let a = without_time(run(&stream, &opts).unwrap());
        let b = without_time(run(&stream, &opts).unwrap());
        assert_eq!(a, b, "{mode:?}");
    }
}

#[test]
fn output_lines() {
    let out = exec(&["--dup-k", "8"], "dsg 3\n+ 0 1\n+ 1 2\n+ 2 0\nqv\nqs\n");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4, "{text}");
    assert!(lines[0].starts_with("value ") && lines[0].contains('/'));
    assert_eq!(lines[1], "subgraph 0 1 2");
    assert_eq!(lines[2], "density 1/1");
    assert!(lines[3].starts_with("metrics {"));
    let json: serde_json::Value = serde_json::from_str(&lines[3]["metrics ".len()..]).unwrap();
    assert_eq!(json["config"]["mode"], "worstcase");
    assert_eq!(json["config"]["dup_k"], 8);
    assert_eq!(json["inserts"], 3);
    assert!(json["arcs_processed"].as_u64().unwrap() > 0);

    let only = exec(&["--metrics-only"], TRIANGLE);
    let text = String::from_utf8(only.stdout).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("metrics "));
}

#[test]
fn empty_graph_answers() {
    let out = exec(&[], "dsg 4\nqv\nqs\n");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("value 0/1\nsubgraph\ndensity 0/1\n"), "{text}");
}

#[test]
fn exit_codes() {
    assert_eq!(exec(&["--verify"], TRIANGLE).status.code(), Some(0));
    assert_eq!(exec(&["--help"], "").status.code(), Some(0));
    assert_eq!(exec(&["--version"], "").status.code(), Some(0));
    assert_eq!(exec(&["--no-such-flag"], TRIANGLE).status.code(), Some(1));
    assert_eq!(exec(&["--eps", "3/2"], TRIANGLE).status.code(), Some(1));
    assert_eq!(exec(&["--mode", "sideways"], TRIANGLE).status.code(), Some(1));
    assert_eq!(
        exec(&["--mode", "amortized"], "dsg 4 rank 3\n+ 0 1 2\n").status.code(),
        Some(1)
    );
    assert_eq!(exec(&["--threshold-t", "2"], TRIANGLE).status.code(), Some(1));

    let bad = exec(&[], "dsg 3\n+ 0 9\n");
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 2"));
    assert_eq!(exec(&[], "dsg 3\n- 0 1\n").status.code(), Some(2));
    assert_eq!(exec(&["/nonexistent/stream.dsg"], "").status.code(), Some(2));
}
