//! Plain-text output.

use std::fmt::Write;

use qfsplit::certificate::{Outcome, Replayed, Report, Subject};
use qfsplit::corpus::CaseResult;
use qfsplit::qfs_ci::{CiVerdict, Mode, NonsplitCheck};
use qfsplit::qfs_cy::CyVerdict;

use crate::scan::{ScanOutcome, ScanRow};

fn subject(s: Subject) -> &'static str {
    match s {
        Subject::LocalRing => "local ring at the origin",
        Subject::GradedRing => "graded ring",
        Subject::ProjectiveVariety => "projective variety",
    }
}

fn ring_text(r: &Report) -> String {
    let pr = &r.problem;
    format!("F_{}[{}] / ({})", pr.p, pr.vars.join(","), pr.gens.join(", "))
}

pub fn report(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ring      {}", ring_text(r));
    if let Some(w) = &r.problem.weights {
        let rows: Vec<String> = w.iter().map(|row| row.iter().map(u64::to_string).collect::<Vec<_>>().join(",")).collect();
        let _ = writeln!(out, "weights   {}", rows.join("; "));
    }
    match &r.outcome {
        Outcome::Cy { verdict, certificate } => {
            let _ = writeln!(out, "engine    calabi-yau (orbit of f^(p-1))");
            let h = match verdict {
                CyVerdict::Finite { height } => height.to_string(),
                CyVerdict::Infinite { cycle_start, cycle_len } => {
                    format!("∞ (g_{} = g_{} with every u-image zero)", cycle_start + cycle_len, cycle_start)
                }
                CyVerdict::LowerBoundAtCap { at_least, max_iter } => {
                    format!("≥ {at_least} (undecided after {max_iter} iterations)")
                }
            };
            let _ = writeln!(out, "height of the {}: {h}", subject(r.subject));
            let _ = writeln!(out, "orbit     {} elements hashed; use --json for the certificate", certificate.chain_hashes.len());
        }
        Outcome::Ci { mode, cap, verdict, closure_stable, leading_terms_coprime, certificate, trace } => {
            let m = match mode {
                Mode::Graded => "graded",
                Mode::Local => "local",
            };
            let _ = writeln!(out, "engine    complete intersection, {m}, degree cap {cap}");
            let h = match verdict {
                CiVerdict::Exact { height } => height.to_string(),
                CiVerdict::InfiniteByCheck { check } => match check {
                    NonsplitCheck::FPowerInBracket => "∞ (f^(p-2) lies in m^[p])".to_string(),
                    NonsplitCheck::DeltaInBracket => "∞ (f^(p-1) and the Δ₁ term lie in the bracket powers)".to_string(),
                },
                CiVerdict::LowerBoundAtCap { at_least, cap } => {
                    format!("≥ {at_least} (undecided at degree cap {cap})")
                }
            };
            let _ = writeln!(out, "height of the {}: {h}", subject(r.subject));
            if *closure_stable {
                let _ = writeln!(out, "note      the chain stopped growing below the cap without escaping");
            }
            if !leading_terms_coprime {
                let _ = writeln!(
                    out,
                    "note      leading terms are not coprime; if the generators are not a regular sequence the value is formula-level only"
                );
            }
            if let Some(c) = certificate {
                let _ = writeln!(
                    out,
                    "chain     {} elements over {} generators of I_1; use --json for the certificate",
                    c.chain.len(),
                    c.i1.len()
                );
            }
            for st in trace {
                let mut dims: Vec<String> = st.dims.iter().map(|(d, n)| format!("{d}:{n}")).collect();
                if dims.is_empty() {
                    dims.push("(no pieces computed)".into());
                }
                let _ = writeln!(out, "trace     I_{} dims by degree  {}", st.stage, dims.join(" "));
            }
        }
    }
    if r.subject == Subject::ProjectiveVariety {
        let _ = writeln!(
            out,
            "note      generators declared a homogeneous regular sequence, so the graded ring and the variety have the same height"
        );
    }
    if let Some(ms) = r.elapsed_ms {
        let _ = writeln!(out, "time      {ms:.1} ms");
    }
    out
}

pub fn replayed(r: Replayed) -> String {
    match r {
        Replayed::Height(n) => format!("verified: height {n}"),
        Replayed::Infinite => "verified: height ∞".to_string(),
        Replayed::AtLeast(n) => format!("verified: height ≥ {n}"),
    }
}

/// One line per row, then the failing cases with their source.
pub fn corpus(name: &str, results: &[CaseResult]) -> String {
    let rows = qfsplit::corpus::rows(results);
    let ok = rows.iter().filter(|(_, p)| *p).count();
    let mut out = String::new();
    let _ = writeln!(out, "corpus {name}: {ok}/{} rows match", rows.len());
    for (row, pass) in &rows {
        let cases: Vec<&CaseResult> = results.iter().filter(|c| &c.row == row).collect();
        let ms: f64 = cases.iter().map(|c| c.elapsed_ms).sum();
        let tag = if *pass { "ok  " } else { "FAIL" };
        let _ = writeln!(out, "  {tag}  {row}  ({ms:.0} ms)");
        for c in cases.iter().filter(|c| !c.pass) {
            let _ = writeln!(out, "        {}: expected {}, got {}", c.label, c.expected, c.got);
            let _ = writeln!(out, "        source: {}", c.citation);
        }
    }
    out
}

pub fn scan_row(r: &ScanRow) -> String {
    let asg: Vec<String> = r.assignment.iter().map(|(n, v)| format!("{n}={v}")).collect();
    let res = match &r.outcome {
        ScanOutcome::Height { verdict } => match verdict {
            CyVerdict::Finite { height } => height.to_string(),
            CyVerdict::Infinite { .. } => "∞".to_string(),
            CyVerdict::LowerBoundAtCap { at_least, .. } => format!("≥ {at_least}"),
        },
        ScanOutcome::Zero => "rejected: zero polynomial".to_string(),
        ScanOutcome::Error { message } => format!("error: {message}"),
    };
    format!("{}\t{}\t{}\t{}", r.index, asg.join(" "), res, r.poly)
}
