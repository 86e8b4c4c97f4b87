use std::io::Write;
use std::process::{Command, Output, Stdio};

use qfsplit::certificate::Report;

fn qfsplit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfsplit")).args(args).output().expect("binary runs")
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qfsplit"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_report(args: &[&str]) -> (String, Report) {
    let mut a = args.to_vec();
    a.push("--json");
    let o = qfsplit(&a);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let r: Report = serde_json::from_str(&text).unwrap();
    (text, r)
}

#[test]
fn height_examples() {
    let (_, k3) = json_report(&["height", "--p", "3", "--vars", "x,y,z,w", "--poly", "x^4+y^4+z^4+2w^4+x^2yw+yz^2w"]);
    assert_eq!(k3.height(), Some(1));
    let (_, e6) = json_report(&["height", "--p", "2", "--vars", "x,y,z", "--poly", "z^2+x^3+y^2z", "--mode", "local"]);
    assert_eq!(e6.height(), Some(2));
    let (_, line) = json_report(&["height", "--p", "2", "--vars", "x", "--poly", "x"]);
    assert_eq!(line.height(), Some(1));
}

#[test]
fn exit_codes() {
    let ok = qfsplit(&["height", "--p", "2", "--vars", "x,y,z", "--poly", "x^3+y^3+z^3"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("height of the graded ring: 2"));
    let lower = qfsplit(&["height", "--p", "2", "--vars", "x,y,z", "--poly", "x^3+y^3+z^3", "--mode", "cy", "--max-iter", "1"]);
    assert_eq!(lower.status.code(), Some(2));
    assert!(stdout(&lower).contains("≥ 2"));
    let bad_p = qfsplit(&["height", "--p", "4", "--vars", "x", "--poly", "x"]);
    assert_eq!(bad_p.status.code(), Some(1));
    let undeclared = qfsplit(&["height", "--p", "2", "--vars", "x", "--poly", "x+q"]);
    assert_eq!(undeclared.status.code(), Some(1));
    let err = String::from_utf8(undeclared.stderr).unwrap();
    assert!(err.contains("position") && err.contains("\"q\""), "{err}");
}

#[test]
fn subject_wording() {
    let args = ["height", "--p", "2", "--vars", "x,y,z", "--poly", "x^3+y^3+z^3"];
    assert!(!stdout(&qfsplit(&args)).contains("projective"));
    let mut declared = args.to_vec();
    declared.push("--regular-sequence");
    assert!(stdout(&qfsplit(&declared)).contains("height of the projective variety: 2"));
    let local = qfsplit(&["height", "--p", "2", "--vars", "x,y,z", "--poly", "z^2+x^3+y^2z"]);
    assert!(stdout(&local).contains("local ring at the origin"));
    let refused = qfsplit(&["height", "--p", "2", "--vars", "x,y,z", "--poly", "z^2+x^3+y^2z", "--regular-sequence"]);
    assert_eq!(refused.status.code(), Some(1));
}

#[test]
fn job_file_and_determinism() {
    let job = r#"{"p": 2, "vars": ["x","y","z"], "gens": ["z^2+x^3+y^2z"], "mode": "local", "output": "json"}"#;
    let strip = |s: &str| {
        let mut v: serde_json::Value = serde_json::from_str(s).unwrap();
        v.as_object_mut().unwrap().remove("elapsed_ms");
        serde_json::to_string(&v).unwrap()
    };
    let a = with_stdin(&["height", "--job", "-"], job);
    let b = with_stdin(&["height", "--job", "-"], job);
    assert!(a.status.success());
    assert_eq!(strip(&stdout(&a)), strip(&stdout(&b)));
    let r: Report = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(r.height(), Some(2));
    let typo = with_stdin(&["height", "--job", "-"], r#"{"p": 2, "vars": ["x"], "gen": ["x"]}"#);
    assert_eq!(typo.status.code(), Some(1));
}

#[test]
fn weights_flag() {
    let (_, r) = json_report(&[
        "height",
        "--p",
        "2",
        "--vars",
        "x0,x1,x2,y0,y1,y2",
        "--weights",
        "1,1,1,0,0,0;0,0,0,1,1,1",
        "--poly",
        "x0*y0^2+x1*y1^2+x2*y2^2",
    ]);
    assert_eq!(r.height(), Some(2));
}

#[test]
fn trace_degrees() {
    let o = qfsplit(&["height", "--p", "2", "--vars", "x,y,z", "--poly", "x^3+y^3+z^3", "--mode", "graded", "--trace-degrees"]);
    assert!(stdout(&o).contains("trace     I_1"));
}

#[test]
fn verify_roundtrip_and_tamper() {
    let dir = std::env::temp_dir().join(format!("qfsplit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (text, _) = json_report(&["height", "--p", "2", "--vars", "x,y,z", "--poly", "z^2+x^3+y^5", "--mode", "local"]);
    let good = dir.join("e8.json");
    std::fs::write(&good, &text).unwrap();
    let o = qfsplit(&["verify", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verified: height"));

    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let chain = v["certificate"]["chain"].as_array_mut().unwrap();
    let last = chain.len() - 1;
    chain[last] = serde_json::Value::String("x^2*y*z".into());
    let bad = dir.join("e8-tampered.json");
    std::fs::write(&bad, v.to_string()).unwrap();
    assert_eq!(qfsplit(&["verify", bad.to_str().unwrap()]).status.code(), Some(1));

    // An infinite orbit replays to its recorded cycle point.
    let (text, r) = json_report(&["height", "--p", "2", "--vars", "x,y,z,w", "--poly", "x^4+y^4+z^4+w^4"]);
    assert!(r.is_infinite());
    let o = with_stdin(&["verify", "-"], &text);
    assert!(stdout(&o).contains("verified: height ∞"));
    assert!(qfsplit(&["verify", "/nonexistent/report.json"]).status.code() == Some(1));
    assert_eq!(with_stdin(&["verify", "-"], "{not json").status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn scan_examples() {
    let o = qfsplit(&["scan", "--p", "2", "--vars", "x,y,z", "--template", "x^3+y^3+z^3+c*x*y*z", "--params", "c"]);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("0\tc=0\t2\t"));

    // Second K3 row with its xyw coefficient left free.
    let o = qfsplit(&[
        "scan",
        "--p",
        "3",
        "--vars",
        "x,y,z,w",
        "--template",
        "x^4+2y^4+2z^4+2w^4+c*xyz^2",
        "--params",
        "c",
        "--target",
        "2",
        "--json",
    ]);
    assert!(o.status.success());
    let hits: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(!hits.is_empty());

    let zero = qfsplit(&["scan", "--p", "2", "--vars", "x,y", "--template", "a*x^2+b*y^2", "--params", "a,b", "--limit", "1"]);
    assert!(stdout(&zero).contains("rejected: zero polynomial"));

    let params: Vec<String> = (0..13).map(|i| format!("c{i}")).collect();
    let guard = qfsplit(&["scan", "--p", "2", "--vars", "x", "--template", "x", "--params", &params.join(",")]);
    assert_eq!(guard.status.code(), Some(1));
}

#[test]
fn scan_resume_matches_full_run() {
    let base = ["scan", "--p", "3", "--vars", "x,y,z", "--template", "x^3+y^3+z^3+a*x^2*y+b*x*y*z", "--params", "a,b", "--jobs", "3"];
    let full = stdout(&qfsplit(&base));
    let mut tail_args = base.to_vec();
    tail_args.extend(["--start", "4"]);
    let tail = stdout(&qfsplit(&tail_args));
    let full_tail: Vec<&str> = full.lines().skip(4).collect();
    assert_eq!(tail.lines().collect::<Vec<_>>(), full_tail);
    assert_eq!(full.lines().count(), 9);
}

#[test]
fn corpus_reports() {
    let o = qfsplit(&["corpus", "unbounded", "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("corpus unbounded: 3/3 rows match"));
    let o = qfsplit(&["corpus", "k3-f3", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["cases"].as_array().unwrap().len(), 11);
    let text = stdout(&qfsplit(&["corpus", "k3-f3"]));
    for line in text.lines().filter(|l| l.trim_start().starts_with("FAIL")) {
        let after = text.split(line).nth(1).unwrap();
        assert!(after.contains("source: table"), "mismatch without citation: {line}");
    }
    assert_eq!(qfsplit(&["corpus", "nope"]).status.code(), Some(1));
}

#[test]
fn debug_subcommands() {
    let o = qfsplit(&["delta1", "--p", "2", "--vars", "x,y", "x+y"]);
    assert_eq!(stdout(&o).trim(), "x*y");
    let o = qfsplit(&["delta1", "--p", "3", "--vars", "x,y", "x+y"]);
    assert_eq!(stdout(&o).trim(), "x^2*y + x*y^2");
    let o = qfsplit(&["witt", "--p", "2", "--vars", "x,y", "--len", "2", "x", "y"]);
    let out = stdout(&o);
    assert!(out.contains("[a]+[b]") && out.contains("a_1 = x*y"), "{out}");
    assert!(out.contains("w_1 = x^2 + 4*x*y + y^2"));
}
