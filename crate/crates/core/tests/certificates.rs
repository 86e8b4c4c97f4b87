//! Every decided corpus case produces a report that survives JSON and replays.

use qfsplit::certificate::{verify_report, Outcome, Replayed, Report};
use qfsplit::corpus::{cases, run_case, Task};

fn roundtrip(r: &Report) -> Report {
    serde_json::from_str(&serde_json::to_string_pretty(r).unwrap()).unwrap()
}

#[test]
fn corpus_reports_replay() {
    let mut replayed = 0;
    for name in ["rdp", "k3-f3", "quintic60", "fermat", "unbounded", "fixed-points"] {
        for case in cases(name).unwrap() {
            if !matches!(case.task, Task::Height { .. }) {
                continue;
            }
            let res = run_case(&case);
            let report = res.report.expect("height cases always report");
            let back = roundtrip(&report);
            assert_eq!(back, report);
            let replay = verify_report(&back).unwrap_or_else(|e| panic!("{}: {e}", case.label));
            match replay {
                Replayed::Height(h) => assert_eq!(Some(h), report.height()),
                Replayed::Infinite => assert!(report.is_infinite()),
                Replayed::AtLeast(_) => assert!(!report.is_decided()),
            }
            replayed += 1;
        }
    }
    assert!(replayed > 100);
}

#[test]
fn tampered_reports_fail() {
    let case = cases("quintic60").unwrap().remove(0);
    let report = run_case(&case).report.unwrap();
    assert_eq!(verify_report(&report), Ok(Replayed::Height(60)));

    let mut bad = report.clone();
    if let Outcome::Cy { certificate, .. } = &mut bad.outcome {
        certificate.chain_hashes.swap(10, 11);
    }
    assert!(verify_report(&bad).is_err());

    let mut bad = report.clone();
    bad.problem.gens[0].push_str("+xyzwu");
    assert!(verify_report(&bad).is_err());

    let mut bad = report.clone();
    bad.schema = 2;
    assert!(verify_report(&bad).is_err());

    let e8 = cases("rdp").unwrap().into_iter().find(|c| c.label == "p=2 E_8^1").unwrap();
    let report = run_case(&e8).report.unwrap();
    let mut bad = report.clone();
    if let Outcome::Ci { certificate: Some(c), .. } = &mut bad.outcome {
        c.cofactors[0][0].push_str(" + x");
    }
    assert!(verify_report(&bad).is_err());
}
