//! The `qfsplit` command line.
//!
//! Exit codes: 0 for a decided answer, 2 when only a lower bound was
//! reached, 1 for errors (and for certificates that fail to verify).

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qfsplit::certificate::{verify_report, Report};
use qfsplit::corpus::{self, CaseResult, CORPORA};
use qfsplit::delta::{delta1, delta_n_rep};
use qfsplit::polyring::{Modulus, SparsePoly, VarSet};
use qfsplit::run::Engine;
use qfsplit::wittlab::{delta_vector, WittVector};
use rayon::prelude::*;
use serde::Serialize;

pub mod job;
pub mod render;
pub mod scan;

use job::{cmd_height, parse_vars, parse_weights, JobSpec, Output};
use scan::{parse_targets, Template};

pub const EXIT_DECIDED: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_LOWER_BOUND: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "qfsplit", version, about = "Quasi-F-split heights over F_p with checkable certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Height of F_p[vars]/(gens), or of its localization at the origin.
    Height(HeightArgs),
    /// Run a bundled example set against its published values.
    Corpus(CorpusArgs),
    /// Heights of every F_p specialization of a Calabi-Yau template.
    Scan(ScanArgs),
    /// Replay the certificate in a JSON height report.
    Verify(VerifyArgs),
    /// Print a representative of Δ₁(f) (or Δ_n) modulo p-th powers.
    Delta1(Delta1Args),
    /// Print Witt vector components and ghost components.
    Witt(WittArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RingArgs {
    #[arg(long)]
    pub p: Option<u64>,
    /// Comma-separated variable names.
    #[arg(long)]
    pub vars: Option<String>,
    /// Grading rows separated by `;`, e.g. "1,1,1,0,0,0;0,0,0,1,1,1".
    #[arg(long)]
    pub weights: Option<String>,
}

#[derive(Args, Debug)]
pub struct HeightArgs {
    /// JSON job file; `-` reads standard input.
    #[arg(long, conflicts_with_all = ["poly", "p", "vars", "weights"])]
    pub job: Option<PathBuf>,
    #[command(flatten)]
    pub ring: RingArgs,
    /// A generator; repeat for a complete intersection.
    #[arg(long)]
    pub poly: Vec<String>,
    /// auto, cy, graded or local.
    #[arg(long)]
    pub mode: Option<Engine>,
    /// Filtration-degree cap of the complete-intersection engine.
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long)]
    pub max_iter: Option<u32>,
    /// Declare the generators a homogeneous regular sequence, so the answer
    /// is also reported for the projective variety.
    #[arg(long)]
    pub regular_sequence: bool,
    #[arg(long)]
    pub json: bool,
    /// Include per-degree dimensions of each I_n.
    #[arg(long)]
    pub trace_degrees: bool,
}

#[derive(Args, Debug)]
pub struct CorpusArgs {
    /// One of rdp, k3-f3, quintic60, fermat, fixed-points, unbounded, or all.
    pub name: String,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    /// Polynomial in the variables and the placeholders.
    #[arg(long)]
    pub template: String,
    /// Comma-separated placeholder names.
    #[arg(long)]
    pub params: String,
    /// Only print members of these heights, e.g. "2,3,inf".
    #[arg(long)]
    pub target: Option<String>,
    /// First member index, for resuming.
    #[arg(long, default_value_t = 0)]
    pub start: u64,
    #[arg(long)]
    pub limit: Option<u64>,
    #[arg(long)]
    pub max_iter: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Report file written by `height --json`; `-` reads standard input.
    pub file: PathBuf,
}

#[derive(Args, Debug)]
pub struct Delta1Args {
    #[command(flatten)]
    pub ring: RingArgs,
    pub poly: String,
    /// Print Δ_n instead, as f^(p^n-p) Δ₁(f).
    #[arg(long)]
    pub n: Option<u32>,
}

#[derive(Args, Debug)]
pub struct WittArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    /// Witt vector length.
    #[arg(long, default_value_t = 3)]
    pub len: usize,
    pub a: String,
    /// With a second element, print [a]+[b] and [a]·[b] as well.
    pub b: Option<String>,
}

fn fail(err: &mut dyn Write, msg: impl std::fmt::Display) -> i32 {
    let _ = writeln!(err, "error: {msg}");
    EXIT_ERROR
}

fn read_input(path: &PathBuf) -> std::io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, String> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| e.to_string())
}

impl RingArgs {
    fn require(&self) -> Result<(u64, Vec<String>, Option<Vec<Vec<u64>>>), String> {
        let p = self.p.ok_or("--p is required")?;
        let vars = parse_vars(self.vars.as_deref().ok_or("--vars is required")?);
        let weights = self.weights.as_deref().map(parse_weights).transpose().map_err(|e| e.to_string())?;
        Ok((p, vars, weights))
    }

    fn parse_one(&self, s: &str) -> Result<(VarSet, SparsePoly), String> {
        let (p, vars, _) = self.require()?;
        let m = Modulus::field(p).map_err(|_| format!("p = {p} is not prime"))?;
        let vs = VarSet::new(&vars).map_err(|e| e.to_string())?;
        let f = vs.parse_poly(s, m).map_err(|e| e.to_string())?;
        Ok((vs, f))
    }
}

pub fn height_job(a: &HeightArgs) -> Result<JobSpec, String> {
    let mut job = match &a.job {
        Some(path) => {
            let text = read_input(path).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_str::<JobSpec>(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => {
            let (p, vars, weights) = a.ring.require()?;
            if a.poly.is_empty() {
                return Err("give --poly at least once, or --job".into());
            }
            JobSpec {
                p,
                vars,
                weights,
                gens: a.poly.clone(),
                mode: Engine::Auto,
                degree_cap: None,
                max_iter: None,
                output: Output::Text,
                regular_sequence: false,
                trace_degrees: false,
            }
        }
    };
    if let Some(m) = a.mode {
        job.mode = m;
    }
    job.degree_cap = a.cap.or(job.degree_cap);
    job.max_iter = a.max_iter.or(job.max_iter);
    job.regular_sequence |= a.regular_sequence;
    job.trace_degrees |= a.trace_degrees;
    if a.json {
        job.output = Output::Json;
    }
    Ok(job)
}

fn height(a: &HeightArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let job = match height_job(a) {
        Ok(j) => j,
        Err(e) => return fail(err, e),
    };
    let report = match cmd_height(&job) {
        Ok(r) => r,
        Err(e) => return fail(err, e),
    };
    let text = match job.output {
        Output::Json => serde_json::to_string_pretty(&report).expect("reports serialize") + "\n",
        Output::Text => render::report(&report),
    };
    let _ = out.write_all(text.as_bytes());
    if report.is_decided() {
        EXIT_DECIDED
    } else {
        EXIT_LOWER_BOUND
    }
}

#[derive(Serialize)]
struct CorpusJson<'a> {
    corpus: &'a str,
    rows: Vec<(String, bool)>,
    cases: &'a [CaseResult],
}

/// Mismatches are report content, not errors: the exit code is 0 unless the
/// corpus name is unknown.
fn corpus_cmd(a: &CorpusArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let names: Vec<&str> = if a.name == "all" { CORPORA.to_vec() } else { vec![a.name.as_str()] };
    let mut sets = Vec::new();
    for n in &names {
        match corpus::cases(n) {
            Some(c) => sets.push((*n, c)),
            None => return fail(err, format!("unknown corpus {n:?}; expected one of {} or all", CORPORA.join(", "))),
        }
    }
    let workers = match pool(a.jobs) {
        Ok(w) => w,
        Err(e) => return fail(err, e),
    };
    let results: Vec<(&str, Vec<CaseResult>)> =
        workers.install(|| sets.iter().map(|(n, cs)| (*n, cs.par_iter().map(corpus::run_case).collect())).collect());
    if a.json {
        let docs: Vec<CorpusJson> = results.iter().map(|(n, r)| CorpusJson { corpus: n, rows: corpus::rows(r), cases: r }).collect();
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&docs).expect("results serialize"));
    } else {
        for (n, r) in &results {
            let _ = out.write_all(render::corpus(n, r).as_bytes());
        }
    }
    EXIT_DECIDED
}

fn scan_cmd(a: &ScanArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (p, vars, weights) = match a.ring.require() {
        Ok(x) => x,
        Err(e) => return fail(err, e),
    };
    let params = parse_vars(&a.params);
    let template = match Template::new(p, &vars, weights.as_deref(), &params, &a.template) {
        Ok(t) => t,
        Err(e) => return fail(err, e),
    };
    let targets = match a.target.as_deref().map(parse_targets).transpose() {
        Ok(t) => t,
        Err(e) => return fail(err, e),
    };
    let workers = match pool(a.jobs) {
        Ok(w) => w,
        Err(e) => return fail(err, e),
    };
    let json = a.json;
    let res = template.run(&workers, a.start, a.limit, a.max_iter, |row| {
        if let Some(t) = &targets {
            match row.height() {
                Some(h) if t.contains(&h) => {}
                _ => return,
            }
        }
        let line = if json { serde_json::to_string(row).expect("rows serialize") } else { render::scan_row(row) };
        let _ = writeln!(out, "{line}");
    });
    match res {
        Ok(()) => EXIT_DECIDED,
        Err(e) => fail(err, e),
    }
}

fn verify_cmd(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let text = match read_input(&a.file) {
        Ok(t) => t,
        Err(e) => return fail(err, format!("{}: {e}", a.file.display())),
    };
    let report: Report = match serde_json::from_str(&text) {
        Ok(r) => r,
        Err(e) => return fail(err, format!("malformed report: {e}")),
    };
    match verify_report(&report) {
        Ok(r) => {
            let _ = writeln!(out, "{}", render::replayed(r));
            EXIT_DECIDED
        }
        Err(e) => {
            let _ = writeln!(out, "rejected: {e}");
            EXIT_ERROR
        }
    }
}

fn delta1_cmd(a: &Delta1Args, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (vs, f) = match a.ring.parse_one(&a.poly) {
        Ok(x) => x,
        Err(e) => return fail(err, e),
    };
    let rep = match a.n {
        None => delta1(&f),
        Some(n) => delta_n_rep(&f, n),
    };
    match rep {
        Ok(d) => {
            let _ = writeln!(out, "{}", vs.format(&d.value));
            EXIT_DECIDED
        }
        Err(e) => fail(err, e),
    }
}

fn witt_cmd(a: &WittArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let run = || -> Result<String, String> {
        let (vs, x) = a.ring.parse_one(&a.a)?;
        let mut s = String::new();
        let mut show = |name: &str, w: &WittVector| {
            s.push_str(&format!("{name}\n"));
            for (i, c) in w.components().iter().enumerate() {
                s.push_str(&format!("  a_{i} = {}\n", vs.format(c)));
            }
            for (i, g) in w.ghost().iter().enumerate() {
                s.push_str(&format!("  w_{i} = {}   (mod {}^{})\n", vs.format(g), g.modulus().p(), g.modulus().e()));
            }
        };
        let ta = WittVector::teichmuller(&x, a.len);
        show("[a]", &ta);
        if a.len > 1 {
            show("Δ(a)", &delta_vector(&x, a.len - 1).map_err(|e| e.to_string())?);
        }
        if let Some(b) = &a.b {
            let (_, y) = a.ring.parse_one(b)?;
            let tb = WittVector::teichmuller(&y, a.len);
            show("[a]+[b]", &ta.add(&tb).map_err(|e| e.to_string())?);
            show("[a]·[b]", &ta.mul(&tb).map_err(|e| e.to_string())?);
        }
        Ok(s)
    };
    match run() {
        Ok(s) => {
            let _ = out.write_all(s.as_bytes());
            EXIT_DECIDED
        }
        Err(e) => fail(err, e),
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match &cli.command {
        Command::Height(a) => height(a, out, err),
        Command::Corpus(a) => corpus_cmd(a, out, err),
        Command::Scan(a) => scan_cmd(a, out, err),
        Command::Verify(a) => verify_cmd(a, out, err),
        Command::Delta1(a) => delta1_cmd(a, out, err),
        Command::Witt(a) => witt_cmd(a, out, err),
    }
}
