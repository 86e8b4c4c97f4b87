//! Height reports and their replay.
//!
//! A [`Report`] stores the problem as text in the canonical polynomial
//! grammar together with a certificate. [`verify_report`] re-derives every
//! claim from the problem using only ring arithmetic, `Δ₁` and `u`; it never
//! looks at engine state.
//!
//! Calabi-Yau certificates keep the first and the deciding element of the
//! orbit in full and the rest as SHA-256 digests of their canonical text.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::delta::delta1;
use crate::frobenius::{escaping_term, u_top, UProduct};
use crate::polyring::{Grading, Modulus, SparsePoly, VarSet};
use crate::qfs_ci::{
    delta_in_bracket, f_power_in_bracket, CIHeightResult, CIInput, CiCertificate, CiVerdict, Mode, NonsplitCheck, StageTrace,
};
use crate::qfs_cy::{CyHeightResult, CyVerdict};

pub const SCHEMA: u32 = 1;

/// Ring data as text. Integer coefficients are reduced mod `p` when parsed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Problem {
    pub p: u64,
    pub vars: Vec<String>,
    /// One row per grading component; `None` means all ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<u64>>>,
    pub gens: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProblemError {
    #[error("p = {0} is not prime")]
    Modulus(u64),
    #[error("variables: {0}")]
    Vars(String),
    #[error("weights: {0}")]
    Weights(String),
    #[error("generator {index}: {msg}")]
    Gen { index: usize, msg: String },
    #[error("no generators")]
    Empty,
}

/// A parsed [`Problem`].
#[derive(Clone, Debug)]
pub struct Ring {
    pub vars: VarSet,
    pub grading: Grading,
    pub gens: Vec<SparsePoly>,
}

impl Problem {
    pub fn parse(&self) -> Result<Ring, ProblemError> {
        let m = Modulus::field(self.p).map_err(|_| ProblemError::Modulus(self.p))?;
        let vars = VarSet::new(&self.vars).map_err(|e| ProblemError::Vars(e.to_string()))?;
        let grading = match &self.weights {
            None => Grading::standard(vars.len()),
            Some(rows) => {
                if rows.iter().any(|r| r.len() != vars.len()) {
                    return Err(ProblemError::Weights(format!("each row needs {} entries", vars.len())));
                }
                let per_var = (0..vars.len()).map(|i| rows.iter().map(|r| r[i]).collect()).collect();
                Grading::new(per_var).map_err(|e| ProblemError::Weights(e.to_string()))?
            }
        };
        if self.gens.is_empty() {
            return Err(ProblemError::Empty);
        }
        let gens = self
            .gens
            .iter()
            .enumerate()
            .map(|(index, s)| vars.parse_poly(s, m).map_err(|e| ProblemError::Gen { index, msg: e.to_string() }))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Ring { vars, grading, gens })
    }
}

/// Hex SHA-256 of the canonical text of `a`.
pub fn poly_hash(vars: &VarSet, a: &SparsePoly) -> String {
    hex::encode(Sha256::digest(vars.format(a).as_bytes()))
}

/// The orbit `g_1 = f^{p-1}, g_{i+1} = θ(g_i)` in compressed form.
///
/// `final` is `g_n` for a finite height, the cycle entry point
/// `g_{cycle_start}` for an infinite one, and the last computed element
/// under a cap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyCertificate {
    pub g1: String,
    pub chain_hashes: Vec<String>,
    #[serde(rename = "final")]
    pub last: String,
    pub verdict: CyVerdict,
}

impl CyCertificate {
    pub fn new(vars: &VarSet, res: &CyHeightResult) -> Self {
        let last = match res.verdict {
            CyVerdict::Infinite { cycle_start, .. } => &res.chain[cycle_start - 1],
            _ => res.chain.last().expect("orbit is never empty"),
        };
        CyCertificate {
            g1: vars.format(&res.chain[0]),
            chain_hashes: res.chain.iter().map(|g| poly_hash(vars, g)).collect(),
            last: vars.format(last),
            verdict: res.verdict.clone(),
        }
    }
}

/// [`CiCertificate`] as text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CiCertificateText {
    pub i1: Vec<String>,
    pub chain: Vec<String>,
    pub cofactors: Vec<Vec<String>>,
}

impl CiCertificateText {
    pub fn new(vars: &VarSet, c: &CiCertificate) -> Self {
        let fmt = |v: &[SparsePoly]| v.iter().map(|a| vars.format(a)).collect::<Vec<_>>();
        CiCertificateText { i1: fmt(&c.i1), chain: fmt(&c.chain), cofactors: c.cofactors.iter().map(|r| fmt(r)).collect() }
    }
}

/// Which object the height belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subject {
    /// Localization at the origin.
    LocalRing,
    GradedRing,
    /// Only claimed when the user declares the generators a homogeneous
    /// regular sequence.
    ProjectiveVariety,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "engine", rename_all = "snake_case")]
pub enum Outcome {
    Cy {
        verdict: CyVerdict,
        certificate: CyCertificate,
    },
    Ci {
        mode: Mode,
        cap: u64,
        verdict: CiVerdict,
        closure_stable: bool,
        /// Cheap sufficient test for a regular sequence; when false the
        /// chain is still computed but its meaning is formula-level only.
        leading_terms_coprime: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        certificate: Option<CiCertificateText>,
        /// Per-degree dimensions of each stage, when requested.
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        trace: Vec<StageTrace>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub problem: Problem,
    pub subject: Subject,
    #[serde(flatten)]
    pub outcome: Outcome,
    /// Wall-clock milliseconds; the only field that varies between runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl Report {
    pub fn from_cy(problem: Problem, vars: &VarSet, res: &CyHeightResult) -> Self {
        Report {
            schema: SCHEMA,
            problem,
            subject: Subject::GradedRing,
            outcome: Outcome::Cy { verdict: res.verdict.clone(), certificate: CyCertificate::new(vars, res) },
            elapsed_ms: None,
        }
    }

    pub fn from_ci(problem: Problem, vars: &VarSet, input: &CIInput, res: &CIHeightResult) -> Self {
        let subject = match input.mode() {
            Mode::Graded => Subject::GradedRing,
            Mode::Local => Subject::LocalRing,
        };
        Report {
            schema: SCHEMA,
            problem,
            subject,
            outcome: Outcome::Ci {
                mode: input.mode(),
                cap: input.degree_cap(),
                verdict: res.verdict.clone(),
                closure_stable: res.closure_stable,
                leading_terms_coprime: res.leading_terms_coprime,
                certificate: res.certificate.as_ref().map(|c| CiCertificateText::new(vars, c)),
                trace: res.trace.clone(),
            },
            elapsed_ms: None,
        }
    }

    /// `Some(n)` for a decided finite height, `None` otherwise.
    pub fn height(&self) -> Option<u32> {
        match &self.outcome {
            Outcome::Cy { verdict: CyVerdict::Finite { height }, .. } => Some(*height),
            Outcome::Ci { verdict: CiVerdict::Exact { height }, .. } => Some(*height),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(
            &self.outcome,
            Outcome::Cy { verdict: CyVerdict::Infinite { .. }, .. } | Outcome::Ci { verdict: CiVerdict::InfiniteByCheck { .. }, .. }
        )
    }

    pub fn is_decided(&self) -> bool {
        self.height().is_some() || self.is_infinite()
    }
}

/// What a successful replay established.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Replayed {
    Height(u32),
    Infinite,
    /// The first `n - 1` steps were confirmed; nothing is claimed beyond.
    AtLeast(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("schema {0} is not supported")]
    Schema(u32),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("replay disagrees: {0}")]
    Mismatch(String),
}

fn mismatch(s: impl Into<String>) -> VerifyError {
    VerifyError::Mismatch(s.into())
}

/// `θ` on `ker u`, as `a ↦ (p-1) f^{p-2} u(Δ₁(f) a)`.
///
/// This uses the representative `(p-1) f^{p(p-2)} Δ₁(f)` of `Δ₁(f^{p-1})`;
/// callers only apply it to elements whose `u`-image they have checked to be zero.
struct ReplayTheta {
    f_pm2: SparsePoly,
    delta: UProduct,
}

impl ReplayTheta {
    fn new(f: &SparsePoly) -> Result<Self, VerifyError> {
        let p = f.modulus().p();
        let d = delta1(f).map_err(|e| VerifyError::Malformed(e.to_string()))?;
        Ok(ReplayTheta { f_pm2: f.pow(p - 2).scale(p - 1), delta: UProduct::new(&d.value) })
    }

    fn apply(&self, a: &SparsePoly) -> SparsePoly {
        self.f_pm2.mul(&self.delta.apply(a))
    }
}

fn product(gens: &[SparsePoly]) -> SparsePoly {
    gens.iter().skip(1).fold(gens[0].clone(), |acc, g| acc.mul(g))
}

/// Recomputes everything the report claims from its problem.
pub fn verify_report(report: &Report) -> Result<Replayed, VerifyError> {
    if report.schema != SCHEMA {
        return Err(VerifyError::Schema(report.schema));
    }
    let ring = report.problem.parse()?;
    match &report.outcome {
        Outcome::Cy { verdict, certificate } => {
            if verdict != &certificate.verdict {
                return Err(VerifyError::Malformed("verdict differs from the certificate's".into()));
            }
            verify_cy(&ring, certificate)
        }
        Outcome::Ci { mode, verdict, certificate, .. } => verify_ci(&ring, *mode, verdict, certificate.as_ref()),
    }
}

fn verify_cy(ring: &Ring, cert: &CyCertificate) -> Result<Replayed, VerifyError> {
    if ring.gens.len() != 1 {
        return Err(VerifyError::Malformed("a Calabi-Yau certificate needs exactly one generator".into()));
    }
    let f = &ring.gens[0];
    if !ring.grading.is_homogeneous(f) || ring.grading.degree(f).homogeneous().map(|d| d.to_vec()) != Some(ring.grading.mu()) {
        return Err(mismatch("f is not homogeneous of degree μ"));
    }
    let p = f.modulus().p();
    let theta = ReplayTheta::new(f)?;
    let m = f.modulus();
    let parse = |s: &str| ring.vars.parse_poly(s, m).map_err(|e| VerifyError::Malformed(e.to_string()));
    let mut g = f.pow(p - 1);
    if parse(&cert.g1)? != g {
        return Err(mismatch("g1 is not f^(p-1)"));
    }
    let n = cert.chain_hashes.len();
    if n == 0 {
        return Err(VerifyError::Malformed("empty chain".into()));
    }
    let mut orbit = Vec::with_capacity(n);
    for (i, h) in cert.chain_hashes.iter().enumerate() {
        if i > 0 {
            if !u_top(&g).is_zero() {
                return Err(mismatch(format!("u(g_{i}) is nonzero before the end of the chain")));
            }
            g = theta.apply(&g);
        }
        if &poly_hash(&ring.vars, &g) != h {
            return Err(mismatch(format!("hash of g_{} differs", i + 1)));
        }
        orbit.push(g.clone());
    }
    let zero_before = |k: usize| orbit[..k].iter().position(|g| !u_top(g).is_zero());
    match cert.verdict {
        CyVerdict::Finite { height } => {
            if height as usize != n {
                return Err(VerifyError::Malformed("height differs from chain length".into()));
            }
            if let Some(i) = zero_before(n - 1) {
                return Err(mismatch(format!("u(g_{}) is already nonzero", i + 1)));
            }
            if parse(&cert.last)? != orbit[n - 1] || u_top(&orbit[n - 1]).is_zero() {
                return Err(mismatch("final element has zero u-image"));
            }
            Ok(Replayed::Height(height))
        }
        CyVerdict::Infinite { cycle_start, cycle_len } => {
            if cycle_start == 0 || cycle_len == 0 || cycle_start + cycle_len - 1 != n {
                return Err(VerifyError::Malformed("cycle does not match chain length".into()));
            }
            if let Some(i) = zero_before(n) {
                return Err(mismatch(format!("u(g_{}) is nonzero", i + 1)));
            }
            let next = theta.apply(&orbit[n - 1]);
            if next != orbit[cycle_start - 1] || parse(&cert.last)? != next {
                return Err(mismatch("orbit does not return to the recorded cycle point"));
            }
            Ok(Replayed::Infinite)
        }
        CyVerdict::LowerBoundAtCap { at_least, .. } => {
            if at_least as usize != n + 1 {
                return Err(VerifyError::Malformed("bound differs from chain length".into()));
            }
            if let Some(i) = zero_before(n) {
                return Err(mismatch(format!("u(g_{}) is nonzero", i + 1)));
            }
            Ok(Replayed::AtLeast(at_least))
        }
    }
}

fn verify_ci(ring: &Ring, mode: Mode, verdict: &CiVerdict, cert: Option<&CiCertificateText>) -> Result<Replayed, VerifyError> {
    let m = ring.gens[0].modulus();
    let p = m.p();
    match verdict {
        CiVerdict::Exact { height } => {
            let cert = cert.ok_or_else(|| VerifyError::Malformed("exact verdict without certificate".into()))?;
            let parse_all = |v: &[String]| {
                v.iter()
                    .map(|s| ring.vars.parse_poly(s, m).map_err(|e| VerifyError::Malformed(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()
            };
            let i1 = parse_all(&cert.i1)?;
            let chain = parse_all(&cert.chain)?;
            let cofactors = cert.cofactors.iter().map(|r| parse_all(r)).collect::<Result<Vec<_>, _>>()?;
            let n = chain.len();
            if n == 0 || n != *height as usize || cofactors.len() != n {
                return Err(VerifyError::Malformed("chain, cofactors and height disagree".into()));
            }
            // I_1 = (f^{p-1}) + (f_j^p).
            let f = product(&ring.gens);
            let mut want = vec![f.pow(p - 1)];
            want.extend(ring.gens.iter().map(|g| g.frobenius(1)));
            if i1 != want {
                return Err(mismatch("I_1 generators do not match the problem"));
            }
            let theta = ReplayTheta::new(&f)?;
            for i in 0..n {
                let rel = if i == 0 { chain[0].clone() } else { chain[i].sub(&theta.apply(&chain[i - 1])) };
                if cofactors[i].len() != i1.len() {
                    return Err(VerifyError::Malformed(format!("relation {} has the wrong number of cofactors", i + 1)));
                }
                let sum = cofactors[i].iter().zip(&i1).fold(SparsePoly::zero(m, f.nvars()), |acc, (a, g)| acc.add(&a.mul(g)));
                if sum != rel {
                    return Err(mismatch(format!("relation {} is not the stated combination of I_1", i + 1)));
                }
                if i + 1 < n && !u_top(&chain[i]).is_zero() {
                    return Err(mismatch(format!("h_{} is not in ker u", i + 1)));
                }
            }
            if escaping_term(&chain[n - 1], p).is_none() {
                return Err(mismatch("final element lies in m^[p]"));
            }
            Ok(Replayed::Height(*height))
        }
        CiVerdict::InfiniteByCheck { check } => {
            let input = CIInput::new(ring.gens.clone(), ring.grading.clone(), mode).map_err(|e| VerifyError::Malformed(e.to_string()))?;
            let holds = match check {
                NonsplitCheck::FPowerInBracket => f_power_in_bracket(&input),
                NonsplitCheck::DeltaInBracket => delta_in_bracket(&input).map_err(|e| VerifyError::Malformed(e.to_string()))?,
            };
            if !holds {
                return Err(mismatch("the recorded non-splitting check does not hold"));
            }
            Ok(Replayed::Infinite)
        }
        CiVerdict::LowerBoundAtCap { at_least, .. } => Ok(Replayed::AtLeast(*at_least)),
    }
}
