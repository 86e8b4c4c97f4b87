//! Bundled examples with their expected values and where they come from.
//!
//! Each [`Case`] belongs to a row; a row with a parameter (the `D` families)
//! expands into several cases and matches when all of them do.

use std::time::Instant;

use serde::Serialize;

use crate::certificate::{Problem, Report};
use crate::polyring::VarSet;
use crate::qfs_ci::{verify_fixed_point, CIInput, FixedPointOutcome, Mode};
use crate::qfs_cy::{fermat_height, fermat_poly, unbounded_family_p2};
use crate::run::{run_height, Engine, Limits};

pub const CORPORA: [&str; 6] = ["rdp", "k3-f3", "quintic60", "fermat", "fixed-points", "unbounded"];

const RDP: &str = "table \"quasi-F-split heights of non-taut RDPs\"";
const K3: &str = "table \"Artin-Mazur heights of K3 surfaces over F_3\"";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expect {
    Height {
        height: u32,
    },
    Infinite,
    /// `J ⊇ θ(F_*J ∩ ker u) + I_1` and `J ⊆ m^{[p]}` up to the cap.
    FixedPoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum Task {
    Height { engine: Engine },
    FixedPoint { mode: Mode, j: Vec<String>, cap: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct Case {
    pub corpus: &'static str,
    pub row: String,
    pub label: String,
    pub citation: String,
    pub problem: Problem,
    pub task: Task,
    pub expect: Expect,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Got {
    Height { height: u32 },
    Infinite,
    LowerBound { at_least: u32 },
    FixedPoint { cap: u64 },
    Refuted { witness: String },
    Error { message: String },
}

impl std::fmt::Display for Got {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Got::Height { height } => write!(f, "{height}"),
            Got::Infinite => write!(f, "∞"),
            Got::LowerBound { at_least } => write!(f, "≥ {at_least}"),
            Got::FixedPoint { cap } => write!(f, "closed up to degree {cap}"),
            Got::Refuted { witness } => write!(f, "not closed: {witness}"),
            Got::Error { message } => write!(f, "error: {message}"),
        }
    }
}

impl std::fmt::Display for Expect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expect::Height { height } => write!(f, "{height}"),
            Expect::Infinite => write!(f, "∞"),
            Expect::FixedPoint => write!(f, "closed"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    pub label: String,
    pub row: String,
    pub citation: String,
    pub expected: Expect,
    pub got: Got,
    pub pass: bool,
    pub elapsed_ms: f64,
    #[serde(skip)]
    pub report: Option<Report>,
}

fn problem(p: u64, vars: &str, gens: &[&str]) -> Problem {
    Problem { p, vars: vars.split(',').map(String::from).collect(), weights: None, gens: gens.iter().map(|s| s.to_string()).collect() }
}

fn height_case(corpus: &'static str, row: &str, label: String, citation: String, problem: Problem, engine: Engine, expect: Expect) -> Case {
    Case { corpus, row: row.to_string(), label, citation, problem, task: Task::Height { engine }, expect }
}

fn ceil_log2(n: u32) -> u32 {
    32 - (n - 1).leading_zeros()
}

fn rdp() -> Vec<Case> {
    let mut out = Vec::new();
    let mut push = |row: &str, label: String, p: u64, f: String, h: u32| {
        let citation = format!("{RDP}, row {row}");
        out.push(height_case("rdp", row, label, citation, problem(p, "x,y,z", &[&f]), Engine::Local, Expect::Height { height: h }));
    };
    // Families, spot-checked at n ≤ 8 and r ∈ {1, n-1}.
    for n in 2..=8u32 {
        let h0 = ceil_log2(n) + 1;
        push("p=2 D_{2n}^0", format!("p=2 D_{}^0", 2 * n), 2, format!("z^2+x^2y+xy^{n}"), h0);
        push("p=2 D_{2n+1}^0", format!("p=2 D_{}^0", 2 * n + 1), 2, format!("z^2+x^2y+y^{n}z"), h0);
        let mut rs = vec![1, n - 1];
        rs.dedup();
        for r in rs {
            let h = ceil_log2(n - r) + 1;
            push("p=2 D_{2n}^r", format!("p=2 D_{}^{r}", 2 * n), 2, format!("z^2+x^2y+xy^{n}+xy^{}z", n - r), h);
            push("p=2 D_{2n+1}^r", format!("p=2 D_{}^{r}", 2 * n + 1), 2, format!("z^2+x^2y+y^{n}z+xy^{}z", n - r), h);
        }
    }
    let rows: [(&str, u64, &str, u32); 20] = [
        ("E_6^0", 2, "z^2+x^3+y^2z", 2),
        ("E_6^1", 2, "z^2+x^3+y^2z+xyz", 1),
        ("E_7^0", 2, "z^2+x^3+xy^3", 4),
        ("E_7^1", 2, "z^2+x^3+xy^3+x^2yz", 3),
        ("E_7^2", 2, "z^2+x^3+xy^3+y^3z", 2),
        ("E_7^3", 2, "z^2+x^3+xy^3+xyz", 1),
        ("E_8^0", 2, "z^2+x^3+y^5", 4),
        ("E_8^1", 2, "z^2+x^3+y^5+xy^3z", 4),
        ("E_8^2", 2, "z^2+x^3+y^5+xy^2z", 3),
        ("E_8^3", 2, "z^2+x^3+y^5+y^3z", 2),
        ("E_8^4", 2, "z^2+x^3+y^5+xyz", 1),
        ("E_6^0", 3, "z^2+x^3+y^4", 2),
        ("E_6^1", 3, "z^2+x^3+y^4+x^2y^2", 1),
        ("E_7^0", 3, "z^2+x^3+xy^3", 2),
        ("E_7^1", 3, "z^2+x^3+xy^3+x^2y^2", 1),
        ("E_8^0", 3, "z^2+x^3+y^5", 3),
        ("E_8^1", 3, "z^2+x^3+y^5+x^2y^3", 2),
        ("E_8^2", 3, "z^2+x^3+y^5+x^2y^2", 1),
        ("E_8^0", 5, "z^2+x^3+y^5", 2),
        ("E_8^1", 5, "z^2+x^3+y^5+xy^4", 1),
    ];
    for (t, p, f, h) in rows {
        let row = format!("p={p} {t}");
        push(&row, row.clone(), p, f.to_string(), h);
    }
    out
}

/// The eleven quartics, in table order.
pub const K3_ROWS: [(&str, Option<u32>); 11] = [
    ("x^4+y^4+z^4+2w^4+x^2yw+yz^2w", Some(1)),
    ("x^4+2y^4+2z^4+2w^4+xyz^2", Some(2)),
    ("x^4+y^4+z^4+w^4+x^2z^2+xyz^2+z^3w", Some(3)),
    ("x^4+y^4+z^4+w^4+x^2z^2+xyz^2", Some(4)),
    ("x^4+y^4+z^4+w^4+x^3z+z^3w+yz^2w+yzw^2", Some(5)),
    ("x^4+y^4+z^4+w^4+x^2z^2+x^2yz", Some(6)),
    ("x^4+y^4+z^4+w^4+xy^2z+xz^2w+yzw^2+y^2zw", Some(7)),
    ("x^4+x^2yz+x^2yw+2x^2z^2+xyw^2+2y^4+y^3w+z^4+w^4", Some(8)),
    ("x^4+y^4+z^4+w^4+xy^3+y^3w+z^2w^2+2xyz^2+yzw^2", Some(9)),
    ("x^4+2x^2yz+x^2yw+xy^2w+y^4+y^3w+y^2z^2+2y^2zw+y^2w^2+yz^3+yz^2w+yzw^2+z^4+zw^3", Some(10)),
    ("x^4+y^4+z^4+w^4", None),
];

fn expect_of(h: Option<u32>) -> Expect {
    h.map_or(Expect::Infinite, |height| Expect::Height { height })
}

fn k3() -> Vec<Case> {
    K3_ROWS
        .iter()
        .map(|&(f, h)| {
            let row = format!("ht {}", h.map_or("∞".to_string(), |h| h.to_string()));
            height_case("k3-f3", &row, row.clone(), format!("{K3}, row {row}"), problem(3, "x,y,z,w", &[f]), Engine::Cy, expect_of(h))
        })
        .collect()
}

pub const QUINTIC: &str = "x^5+y^5+z^5+w^5+u^5+xz^3w+yzw^3+x^2zu^2+y^2z^2w+xy^2wu+yzwu^2";

fn quintic60() -> Vec<Case> {
    vec![height_case(
        "quintic60",
        "quintic",
        "quintic threefold over F_2".into(),
        "example \"Calabi-Yau threefolds\": Artin-Mazur height 60".into(),
        problem(2, "x,y,z,w,u", &[QUINTIC]),
        Engine::Cy,
        Expect::Height { height: 60 },
    )]
}

fn fermat() -> Vec<Case> {
    let mut out = Vec::new();
    for n in 4..=7usize {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let vars = VarSet::indexed(n);
            let f = vars.format(&fermat_poly(n, p));
            let label = format!("N={n} p={p}");
            let pr = Problem { p, vars: vars.names().to_vec(), weights: None, gens: vec![f] };
            let cite = "example \"Fermat type\": height 1 iff p ≡ 1 mod N, otherwise ∞".to_string();
            out.push(height_case("fermat", &label, label.clone(), cite, pr, Engine::Cy, expect_of(fermat_height(n as u32, p))));
        }
    }
    out
}

fn fixed_point(row: &str, citation: &str, pr: Problem, mode: Mode, j: &[&str], cap: u64) -> Case {
    Case {
        corpus: "fixed-points",
        row: row.into(),
        label: row.into(),
        citation: citation.into(),
        problem: pr,
        task: Task::FixedPoint { mode, j: j.iter().map(|s| s.to_string()).collect(), cap },
        expect: Expect::FixedPoint,
    }
}

fn fixed_points() -> Vec<Case> {
    let g = "x^3+y^3+z^3+xyzw^2";
    let j_inf = ["x^2y", "xy^2", "y^2z", "yz^2", "x^2z", "xz^2", "x^4w", "y^4w", "z^4w", g];
    let cite_inf = "example \"height infty\"";
    let cex = "xys^2+zwu^2+y^3w+x^3z";
    let cite_cex = "example \"counterexample to inversion of adjunction\"";
    let dp = "w^2+x^2yz+xy^2z+xyz^2";
    let j_dp = [dp, "x^2y^2z+xy^2z^2", "x^2y^2z+x^2yz^2", "x^2y^2z+xw^2", "x^2y^2z+yw^2", "x^2y^2z+zw^2", "x^2yzw+xy^2zw", "x^2yzw+xyz^2w"];
    let mut dp_problem = problem(2, "x,y,z,w", &[dp]);
    dp_problem.weights = Some(vec![vec![1, 1, 1, 2]]);
    let mut conic = problem(2, "x0,x1,x2,y0,y1,y2", &["x0y0^2+x1y1^2+x2y2^2"]);
    conic.weights = Some(vec![vec![1, 1, 1, 0, 0, 0], vec![0, 0, 0, 1, 1, 1]]);
    vec![
        fixed_point("g: J closed", &format!("{cite_inf}: J ⊇ θ(F_*J ∩ v^⊥)+(g)"), problem(2, "x,y,z,w", &[g]), Mode::Local, &j_inf, 20),
        fixed_point(
            "gw: J closed",
            &format!("{cite_inf}: the same J works for gw"),
            problem(2, "x,y,z,w", &["x^3w+y^3w+z^3w+xyzw^3"]),
            Mode::Local,
            &j_inf,
            20,
        ),
        height_case(
            "fixed-points",
            "(g,w)",
            "(g,w)".into(),
            format!("{cite_inf}: R/(g,w) has height 2"),
            problem(2, "x,y,z,w", &[g, "w"]),
            Engine::Local,
            Expect::Height { height: 2 },
        ),
        fixed_point(
            "g: J=(ys^2+x^2z, zu^2+y^3) closed",
            &format!("{cite_cex}: J ⊇ θ_g(F_*J ∩ v^⊥)+(g)"),
            problem(2, "x,y,z,w,u,s", &[cex]),
            Mode::Graded,
            &["ys^2+x^2z", "zu^2+y^3"],
            20,
        ),
        height_case(
            "fixed-points",
            "(s,g)",
            "(s,g)".into(),
            format!("{cite_cex}: sht(S/(s,g)) = 2"),
            problem(2, "x,y,z,w,u,s", &["s", cex]),
            Engine::Graded,
            Expect::Height { height: 2 },
        ),
        fixed_point(
            "del Pezzo: I_∞ closed",
            "example \"Non-quasi-F-split del Pezzo surface with RDPs\": the listed I_∞(f)",
            dp_problem,
            Mode::Graded,
            &j_dp,
            20,
        ),
        height_case(
            "fixed-points",
            "Fano p=3",
            "Fano p=3".into(),
            "example \"Non-quasi-F-split Fano varieties\": f^{p-2} ∈ m^[p]".into(),
            problem(3, "x0,x1,x2,x3,x4", &["x0^4+x1^4+x2^4+x3^4+x4^4"]),
            Engine::Graded,
            Expect::Infinite,
        ),
        height_case(
            "fixed-points",
            "wild conic bundle",
            "wild conic bundle".into(),
            "example \"Quasi-F-split wild conic bundle\": sht(X) = 2".into(),
            conic,
            Engine::Graded,
            Expect::Height { height: 2 },
        ),
    ]
}

fn unbounded() -> Vec<Case> {
    (1..=3u32)
        .map(|h| {
            let (f, vars) = unbounded_family_p2(h);
            let pr = Problem { p: 2, vars: vars.names().to_vec(), weights: None, gens: vec![vars.format(&f)] };
            let label = format!("h={h}");
            let cite = "example \"Unboundedness of height for Calabi-Yau varieties in p=2\": height 2h".to_string();
            height_case("unbounded", &label, label.clone(), cite, pr, Engine::Cy, Expect::Height { height: 2 * h })
        })
        .collect()
}

/// The cases of a named corpus, or `None` for an unknown name.
pub fn cases(name: &str) -> Option<Vec<Case>> {
    Some(match name {
        "rdp" => rdp(),
        "k3-f3" => k3(),
        "quintic60" => quintic60(),
        "fermat" => fermat(),
        "fixed-points" => fixed_points(),
        "unbounded" => unbounded(),
        _ => return None,
    })
}

pub fn run_case(case: &Case) -> CaseResult {
    let start = Instant::now();
    let (got, report) = match &case.task {
        Task::Height { engine } => match run_height(&case.problem, *engine, Limits::default()) {
            Ok(r) => {
                let got = if let Some(height) = r.height() {
                    Got::Height { height }
                } else if r.is_infinite() {
                    Got::Infinite
                } else {
                    Got::LowerBound { at_least: lower_bound(&r) }
                };
                (got, Some(r))
            }
            Err(e) => (Got::Error { message: e.to_string() }, None),
        },
        Task::FixedPoint { mode, j, cap } => (fixed_point_outcome(&case.problem, *mode, j, *cap), None),
    };
    let pass = matches!(
        (&case.expect, &got),
        (Expect::Height { height: a }, Got::Height { height: b }) if a == b
    ) || matches!((&case.expect, &got), (Expect::Infinite, Got::Infinite) | (Expect::FixedPoint, Got::FixedPoint { .. }));
    CaseResult {
        label: case.label.clone(),
        row: case.row.clone(),
        citation: case.citation.clone(),
        expected: case.expect.clone(),
        got,
        pass,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        report,
    }
}

fn lower_bound(r: &Report) -> u32 {
    use crate::certificate::Outcome;
    use crate::qfs_ci::CiVerdict;
    use crate::qfs_cy::CyVerdict;
    match &r.outcome {
        Outcome::Cy { verdict: CyVerdict::LowerBoundAtCap { at_least, .. }, .. } => *at_least,
        Outcome::Ci { verdict: CiVerdict::LowerBoundAtCap { at_least, .. }, .. } => *at_least,
        _ => 0,
    }
}

fn fixed_point_outcome(pr: &Problem, mode: Mode, j: &[String], cap: u64) -> Got {
    let run = || -> Result<Got, String> {
        let ring = pr.parse().map_err(|e| e.to_string())?;
        let m = ring.gens[0].modulus();
        let j = j.iter().map(|s| ring.vars.parse_poly(s, m).map_err(|e| e.to_string())).collect::<Result<Vec<_>, _>>()?;
        let input = CIInput::new(ring.gens.clone(), ring.grading.clone(), mode).map_err(|e| e.to_string())?;
        Ok(match verify_fixed_point(&input, &j, cap).map_err(|e| e.to_string())? {
            FixedPointOutcome::VerifiedUpToCap { cap } => Got::FixedPoint { cap },
            FixedPointOutcome::Refuted { witness, .. } => Got::Refuted { witness: ring.vars.format(&witness) },
        })
    };
    run().unwrap_or_else(|message| Got::Error { message })
}

/// Rows in first-appearance order with whether every case of the row passed.
pub fn rows(results: &[CaseResult]) -> Vec<(String, bool)> {
    let mut out: Vec<(String, bool)> = Vec::new();
    for r in results {
        match out.iter_mut().find(|(row, _)| row == &r.row) {
            Some((_, ok)) => *ok &= r.pass,
            None => out.push((r.row.clone(), r.pass)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_shapes() {
        assert!(cases("nope").is_none());
        let rdp = cases("rdp").unwrap();
        let names: std::collections::HashSet<&str> = rdp.iter().map(|c| c.row.as_str()).collect();
        assert_eq!(names.len(), 24);
        assert_eq!(cases("k3-f3").unwrap().len(), 11);
        assert_eq!(cases("fermat").unwrap().len(), 24);
        for name in CORPORA {
            for c in cases(name).unwrap() {
                assert!(c.problem.parse().is_ok(), "{}", c.label);
            }
        }
    }

    #[test]
    fn ceil_log() {
        assert_eq!((1..=9).map(ceil_log2).collect::<Vec<_>>(), vec![0, 1, 2, 2, 3, 3, 3, 3, 4]);
    }

    #[test]
    fn small_cases_pass() {
        for c in cases("rdp").unwrap().iter().filter(|c| c.label == "p=2 E_6^0" || c.label == "p=3 E_8^0") {
            let r = run_case(c);
            assert!(r.pass, "{} got {}", c.label, r.got);
        }
        let r = run_case(&cases("k3-f3").unwrap()[1]);
        assert!(r.pass);
    }
}
