//! Heights of complete intersections `S/(f_1, …, f_m)` through the chain
//! `I_1 = (I^{[p]} : I)`, `I_{s+1} = θ(F_*I_s ∩ ker u) + I_1`, with
//! `θ(a) = u(Δ₁(f^{p-1}) a)` and `f = f_1⋯f_m`. The height is the first `n`
//! with `I_n ⊄ m^{[p]}`.
//!
//! Everything is computed in pieces of a fine grading (see [`crate::ideal`]).
//! In graded mode pieces are finite and exact up to the degree cap. In local
//! mode the chain is bracketed from both sides: genuine elements of bounded
//! degree (to find an escape) and an over-approximation modulo powers of `m`
//! (to prove `I_n ⊆ m^{[p]}`).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::delta::{delta1, delta_n_rep, DeltaError};
use crate::frobenius::{escaping_term, in_bracket_power, top_index, u_top, u_top_iter};
use crate::ideal::{
    cofactor_tag, cofactors, colon_bracket, key_add, key_div, key_scale, key_sub, unit_tag, FineGrading, IdealSpan, Key, MonomialIndex,
};
use crate::linalg::{kernel, Echelon};
use crate::polyring::{ExponentVector, Grading, SparsePoly};
use crate::qfs_cy::ThetaOperator;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CiError {
    #[error("coefficients must lie in a prime field F_p; larger perfect fields give the same height after base change")]
    NotPrimeField,
    #[error("no generators")]
    Empty,
    #[error("generator {0} is zero")]
    ZeroGenerator(usize),
    #[error("generators live in different rings")]
    Mismatch,
    #[error("grading has {0} variables but the generators have {1}")]
    Arity(usize, usize),
    #[error("generator {0} is not homogeneous")]
    NotHomogeneous(usize),
    #[error("generator {0} does not vanish at the origin")]
    NotLocal(usize),
    #[error("degree cap {cap} is below deg f^(p-1) = {required}")]
    CapTooSmall { cap: u64, required: u64 },
    #[error(transparent)]
    Delta(#[from] DeltaError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Graded,
    Local,
}

#[derive(Clone, Debug)]
pub struct CIInput {
    gens: Vec<SparsePoly>,
    f: SparsePoly,
    grading: Grading,
    mode: Mode,
    degree_cap: u64,
    max_iter: u32,
    trace_degrees: bool,
}

fn default_cap(gens: &[SparsePoly], f: &SparsePoly, grading: &Grading, mode: Mode) -> u64 {
    let p = f.modulus().p();
    match mode {
        Mode::Graded => {
            let t = grading.total_weights();
            let deg = |a: &SparsePoly| a.terms().first().map(|(e, _)| filt(e, &t)).unwrap_or(0);
            let mu: u64 = t.iter().sum();
            ((p - 1) * deg(f)).max(p * (p - 1) * mu) + 2 * gens.iter().map(deg).max().unwrap_or(0)
        }
        Mode::Local => 4 * p * f.total_degree().unwrap_or(0),
    }
}

fn filt(e: &ExponentVector, t: &[u64]) -> u64 {
    e.as_slice().iter().zip(t).map(|(&a, &w)| a as u64 * w).sum()
}

impl CIInput {
    pub fn new(gens: Vec<SparsePoly>, grading: Grading, mode: Mode) -> Result<Self, CiError> {
        let first = gens.first().ok_or(CiError::Empty)?;
        let (m, n) = (first.modulus(), first.nvars());
        if !m.is_field() {
            return Err(CiError::NotPrimeField);
        }
        if grading.nvars() != n {
            return Err(CiError::Arity(grading.nvars(), n));
        }
        for (i, g) in gens.iter().enumerate() {
            if g.modulus() != m || g.nvars() != n {
                return Err(CiError::Mismatch);
            }
            if g.is_zero() {
                return Err(CiError::ZeroGenerator(i));
            }
            match mode {
                Mode::Graded if !grading.is_homogeneous(g) => return Err(CiError::NotHomogeneous(i)),
                Mode::Local if g.coeff(&ExponentVector::zero(n)) != 0 => return Err(CiError::NotLocal(i)),
                _ => {}
            }
        }
        let f = gens.iter().skip(1).fold(gens[0].clone(), |acc, g| acc.mul(g));
        let degree_cap = default_cap(&gens, &f, &grading, mode);
        Ok(CIInput { gens, f, grading, mode, degree_cap, max_iter: 64, trace_degrees: false })
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.degree_cap = cap;
        self
    }

    pub fn with_max_iter(mut self, n: u32) -> Self {
        self.max_iter = n.max(1);
        self
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.trace_degrees = on;
        self
    }

    pub fn gens(&self) -> &[SparsePoly] {
        &self.gens
    }

    /// The product of the generators.
    pub fn f(&self) -> &SparsePoly {
        &self.f
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn degree_cap(&self) -> u64 {
        self.degree_cap
    }

    pub fn max_iter(&self) -> u32 {
        self.max_iter
    }

    pub fn p(&self) -> u64 {
        self.f.modulus().p()
    }

    pub fn nvars(&self) -> usize {
        self.f.nvars()
    }

    /// Weights of the degree filtration: total weights when graded, all ones when local.
    pub fn filtration_weights(&self) -> Vec<u64> {
        match self.mode {
            Mode::Graded => self.grading.total_weights(),
            Mode::Local => vec![1; self.nvars()],
        }
    }

    fn filtration(&self, a: &SparsePoly) -> u64 {
        let t = self.filtration_weights();
        a.terms().iter().map(|(e, _)| filt(e, &t)).max().unwrap_or(0)
    }

    /// Pairwise coprime leading monomials, which forces a regular sequence
    /// for homogeneous generators. Failing it says nothing.
    pub fn leading_terms_coprime(&self) -> bool {
        let leads: Vec<&ExponentVector> = self.gens.iter().filter_map(|g| g.leading().map(|(e, _)| e)).collect();
        leads
            .iter()
            .enumerate()
            .all(|(i, a)| leads[i + 1..].iter().all(|b| a.as_slice().iter().zip(b.as_slice()).all(|(&x, &y)| x == 0 || y == 0)))
    }
}

/// Which finite non-splitting condition held.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonsplitCheck {
    /// `f^{p-2} ∈ m^{[p]}`.
    FPowerInBracket,
    /// `f^{p-1} ∈ m^{[p]}` and `(f^{p-2}, I^{[p]}) f^{p(p-2)} Δ₁(f) ⊆ m^{[p²]}`.
    DeltaInBracket,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CiVerdict {
    Exact {
        height: u32,
    },
    /// `I_{at_least - 1} ⊆ m^{[p]}` is proven; nothing more at this cap.
    LowerBoundAtCap {
        at_least: u32,
        cap: u64,
    },
    InfiniteByCheck {
        check: NonsplitCheck,
    },
}

/// `h_1 ∈ I_1`, `h_{i+1} - θ(h_i) ∈ I_1`, `u(h_i) = 0` for `i < n`, and
/// `h_n ∉ m^{[p]}`. `cofactors[i]` writes the `i`-th of these `I_1` elements
/// in the generators `i1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CiCertificate {
    pub i1: Vec<SparsePoly>,
    pub chain: Vec<SparsePoly>,
    pub cofactors: Vec<Vec<SparsePoly>>,
}

/// Dimensions of the computed pieces of `I_stage`, summed by degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTrace {
    pub stage: u32,
    pub dims: BTreeMap<u64, usize>,
}

#[derive(Clone, Debug)]
pub struct CIHeightResult {
    pub verdict: CiVerdict,
    pub certificate: Option<CiCertificate>,
    pub trace: Vec<StageTrace>,
    /// Graded mode: the pieces feeding the escape window stopped growing, so
    /// no later stage can escape either.
    pub closure_stable: bool,
    pub leading_terms_coprime: bool,
}

impl CIHeightResult {
    pub fn exact(&self) -> Option<u32> {
        match self.verdict {
            CiVerdict::Exact { height } => Some(height),
            _ => None,
        }
    }
}

/// Data shared by the engines.
struct Setup {
    p: u64,
    nvars: usize,
    i1: Vec<SparsePoly>,
    theta: ThetaOperator,
    grading: FineGrading,
    /// `key(top) - key(Δ')`, so the source of key `k` is `p·k + shift`.
    shift: Key,
    /// Order of `Δ' = (p-1) f^{p(p-2)} Δ₁(f)`; `None` when `Δ₁(f) = 0`.
    ord_delta: Option<u64>,
    weights: Vec<u64>,
}

impl Setup {
    fn new(input: &CIInput) -> Result<Self, CiError> {
        let p = input.p();
        let n = input.nvars();
        let extra = match input.mode {
            Mode::Graded => vec![input.grading.total_weights().iter().map(|&w| w as i64).collect()],
            Mode::Local => Vec::new(),
        };
        let grading = FineGrading::for_polys(n, input.gens.iter(), &extra);
        let theta = ThetaOperator::new(&input.f, &input.grading).map_err(|e| match e {
            crate::qfs_cy::CyError::Delta(d) => CiError::Delta(d),
            _ => CiError::NotPrimeField,
        })?;
        let kf = grading.key_of(&input.f).expect("product of homogeneous generators");
        let kdelta = key_scale(&kf, (p * (p - 1)) as i64);
        let shift = key_sub(&grading.key(&top_index(n, p as u32)), &kdelta);
        let d1 = delta1(&input.f)?.value;
        let ord_delta = d1.order().map(|o| o + p * (p - 2) * input.f.order().unwrap_or(0));
        Ok(Setup { p, nvars: n, i1: colon_bracket(&input.gens, p), theta, grading, shift, ord_delta, weights: input.filtration_weights() })
    }

    fn source(&self, k: &Key) -> Key {
        key_add(&key_scale(k, self.p as i64), &self.shift)
    }

    fn escape_keys(&self) -> Vec<Key> {
        let n = self.nvars;
        let mut keys = HashSet::new();
        let mut cur = vec![0u32; n];
        loop {
            keys.insert(self.grading.key(&ExponentVector::new(&cur)));
            let mut i = 0;
            while i < n && cur[i] as u64 == self.p - 1 {
                cur[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
            cur[i] += 1;
        }
        let mut keys: Vec<Key> = keys.into_iter().collect();
        keys.sort();
        keys
    }

    fn index(&self, bound: u64) -> Rc<MonomialIndex> {
        Rc::new(MonomialIndex::new(self.grading.clone(), self.weights.clone(), bound))
    }
}

type Chain = Vec<SparsePoly>;

struct Slice {
    ech: Echelon<Chain>,
    exact: bool,
}

/// Genuine elements of `I_s`, piece by piece, built from `x^α g` of
/// filtration degree at most `bound`.
struct ChainEngine<'a> {
    setup: &'a Setup,
    i1: IdealSpan<()>,
    bound: u64,
    graded: bool,
    memo: Vec<HashMap<Key, Rc<Slice>>>,
}

impl<'a> ChainEngine<'a> {
    fn new(setup: &'a Setup, bound: u64, graded: bool) -> Self {
        let index = setup.index(bound);
        let i1 = IdealSpan::new(setup.i1.clone(), index, bound, unit_tag());
        ChainEngine { setup, i1, bound, graded, memo: Vec::new() }
    }

    fn degree_of(&self, k: &Key) -> i64 {
        *k.last().unwrap_or(&0)
    }

    fn slice(&mut self, s: usize, k: &Key) -> Rc<Slice> {
        while self.memo.len() < s {
            self.memo.push(HashMap::new());
        }
        if let Some(sl) = self.memo[s - 1].get(k) {
            return sl.clone();
        }
        let mut ech: Echelon<Chain> = Echelon::new();
        let deg = self.degree_of(k);
        let mut exact = self.graded && deg <= self.bound as i64;
        if deg >= 0 || !self.graded {
            for (row, ()) in self.i1.piece(k).rows() {
                ech.insert(row.clone(), Vec::new());
            }
        }
        if s >= 2 && (deg >= 0 || !self.graded) {
            let src = self.setup.source(k);
            let sub = self.slice(s - 1, &src);
            exact &= sub.exact;
            let items = sub.ech.rows().map(|(row, chain)| (u_top(row), (row.clone(), chain.clone())));
            for (a, chain) in kernel(items) {
                let img = self.setup.theta.theta_kernel(&a);
                let mut c = Vec::with_capacity(chain.len() + 1);
                c.push(a);
                c.extend(chain);
                ech.insert(img, c);
            }
        }
        let sl = Rc::new(Slice { ech, exact });
        self.memo[s - 1].insert(k.clone(), sl.clone());
        sl
    }

    /// An escaping row of `I_s` in the given pieces, as the chain `h_1..h_s`.
    fn escape(&mut self, s: usize, keys: &[Key]) -> Option<Chain> {
        let p = self.setup.p;
        for k in keys {
            let sl = self.slice(s, k);
            for (row, chain) in sl.ech.rows() {
                if escaping_term(row, p).is_some() {
                    let zero = SparsePoly::zero(row.modulus(), row.nvars());
                    let mut h: Chain = chain.iter().rev().cloned().collect();
                    while h.len() < s - 1 {
                        h.insert(0, zero.clone());
                    }
                    h.push(row.clone());
                    return Some(h);
                }
            }
        }
        None
    }

    fn trace(&self, s: usize) -> StageTrace {
        let mut dims = BTreeMap::new();
        if let Some(m) = self.memo.get(s - 1) {
            for sl in m.values() {
                for (row, _) in sl.ech.rows() {
                    let (e, _) = row.leading().expect("rows are nonzero");
                    *dims.entry(filt(e, &self.setup.weights)).or_insert(0) += 1;
                }
            }
        }
        StageTrace { stage: s as u32, dims }
    }
}

/// `(I_s + m^{K_s}) / m^{K_s}` enlarged: kernels are taken modulo the
/// precision that truncation leaves trustworthy.
struct OverEngine<'a> {
    setup: &'a Setup,
    ks: Vec<u64>,
    ls: Vec<u64>,
    index: Rc<MonomialIndex>,
    i1_keys: Vec<(Key, u64)>,
    memo: Vec<HashMap<Key, Rc<Echelon<()>>>>,
}

impl<'a> OverEngine<'a> {
    /// Precisions for proving `I_t ⊆ m^{[p]}`, ending at `N(p-1) + 1 + slack`.
    fn precisions(setup: &Setup, t: usize, slack: u64) -> Vec<u64> {
        let (p, n) = (setup.p as i64, setup.nvars as i64);
        let mut ks = vec![0i64; t];
        ks[t - 1] = n * (p - 1) + 1 + slack as i64;
        for s in (0..t - 1).rev() {
            ks[s] = match setup.ord_delta {
                Some(o) => (p * ks[s + 1] - p + 1 - o as i64 + n * (p - 1)).max(0),
                None => 0,
            };
        }
        ks.into_iter().map(|k| k as u64).collect()
    }

    fn new(setup: &'a Setup, ks: Vec<u64>) -> Self {
        let (p, n) = (setup.p as i64, setup.nvars as i64);
        let ls = ks.iter().map(|&k| ((k as i64 - n * (p - 1) + p - 1) / p).max(0) as u64).collect();
        let bound = ks.iter().copied().max().unwrap_or(1).saturating_sub(1);
        let index = setup.index(bound);
        let i1_keys =
            setup.i1.iter().map(|g| (setup.grading.key_of(g).expect("homogeneous for the fine grading"), g.order().unwrap_or(0))).collect();
        OverEngine { setup, ks, ls, index, i1_keys, memo: Vec::new() }
    }

    fn piece(&mut self, s: usize, k: &Key) -> Rc<Echelon<()>> {
        while self.memo.len() < s {
            self.memo.push(HashMap::new());
        }
        if let Some(e) = self.memo[s - 1].get(k) {
            return e.clone();
        }
        let prec = self.ks[s - 1];
        let mut ech = Echelon::new();
        for (l, g) in self.setup.i1.iter().enumerate() {
            let (gk, ord) = &self.i1_keys[l];
            for (alpha, t) in self.index.with_key(&key_sub(k, gk)) {
                if t + ord < prec {
                    ech.push(g.mul_term(alpha, 1).truncate(prec));
                }
            }
        }
        if s >= 2 && self.setup.ord_delta.is_some() {
            let src = self.setup.source(k);
            let sub = self.piece(s - 1, &src);
            let l = self.ls[s - 2];
            let items = sub.rows().map(|(row, ())| (u_top(row).truncate(l), row.clone()));
            for a in kernel(items) {
                ech.push(self.setup.theta.theta_kernel(&a).truncate(prec));
            }
        }
        let e = Rc::new(ech);
        self.memo[s - 1].insert(k.clone(), e.clone());
        e
    }

    fn proves_contained(&mut self, keys: &[Key]) -> bool {
        let t = self.ks.len();
        let p = self.setup.p;
        keys.iter().all(|k| self.piece(t, k).rows().all(|(row, ())| escaping_term(row, p).is_none()))
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// First finite check: `f^{p-2} ∈ m^{[p]}` (only possible for `p ≥ 3`).
pub fn f_power_in_bracket(input: &CIInput) -> bool {
    let p = input.p();
    p >= 3 && in_bracket_power(&input.f.pow(p - 2), p)
}

/// Second finite check: `f^{p-1} ∈ m^{[p]}` and every product of
/// `f^{p-2}, f_j^p` with `f^{p(p-2)} Δ₁(f)` lies in `m^{[p²]}`.
pub fn delta_in_bracket(input: &CIInput) -> Result<bool, CiError> {
    let p = input.p();
    let f = &input.f;
    if !in_bracket_power(&f.pow(p - 1), p) {
        return Ok(false);
    }
    let d = f.pow(p * (p - 2)).mul(&delta1(f)?.value);
    let mut factors = vec![f.pow(p - 2)];
    factors.extend(input.gens.iter().map(|g| g.frobenius(1)));
    Ok(factors.iter().all(|a| in_bracket_power(&a.mul(&d), p * p)))
}

/// Runs the finite checks for `sht = ∞`, cheapest first.
pub fn nonsplit_checks(input: &CIInput) -> Result<Option<NonsplitCheck>, CiError> {
    if f_power_in_bracket(input) {
        return Ok(Some(NonsplitCheck::FPowerInBracket));
    }
    if delta_in_bracket(input)? {
        return Ok(Some(NonsplitCheck::DeltaInBracket));
    }
    Ok(None)
}

/// The quasi-F-split height of `S/I` (graded) or of its localization at the origin.
pub fn ci_height(input: &CIInput) -> Result<CIHeightResult, CiError> {
    let p = input.p();
    let need = (p - 1) * input.filtration(&input.f);
    if input.degree_cap < need {
        return Err(CiError::CapTooSmall { cap: input.degree_cap, required: need });
    }
    let coprime = input.leading_terms_coprime();
    if let Some(check) = nonsplit_checks(input)? {
        return Ok(CIHeightResult {
            verdict: CiVerdict::InfiniteByCheck { check },
            certificate: None,
            trace: Vec::new(),
            closure_stable: false,
            leading_terms_coprime: coprime,
        });
    }
    let setup = Setup::new(input)?;
    let mut res = match input.mode {
        Mode::Graded => run_graded(input, &setup),
        Mode::Local => run_local(input, &setup),
    };
    res.leading_terms_coprime = coprime;
    Ok(res)
}

fn result(verdict: CiVerdict, certificate: Option<CiCertificate>, trace: Vec<StageTrace>) -> CIHeightResult {
    CIHeightResult { verdict, certificate, trace, closure_stable: false, leading_terms_coprime: false }
}

fn run_graded(input: &CIInput, setup: &Setup) -> CIHeightResult {
    let cap = input.degree_cap;
    let mut engine = ChainEngine::new(setup, cap, true);
    let window = setup.escape_keys();
    // Keys reachable from the window through `k ↦ source(k)`. Keys without
    // monomials have empty pieces and end a path.
    let mut closure: Vec<Key> = Vec::new();
    let mut bounded = true;
    {
        let index = setup.index(cap);
        let live: HashSet<&Key> = index.keys().collect();
        let mut seen: HashSet<Key> = HashSet::new();
        let mut stack = window.clone();
        while let Some(k) = stack.pop() {
            let d = *k.last().unwrap();
            if d < 0 || !seen.insert(k.clone()) {
                continue;
            }
            if d > cap as i64 {
                bounded = false;
                break;
            }
            if !live.contains(&k) {
                continue;
            }
            closure.push(k.clone());
            stack.push(setup.source(&k));
        }
    }
    let mut trace = Vec::new();
    let mut prev_dims: Option<Vec<usize>> = None;
    for s in 1..=input.max_iter as usize {
        if let Some(chain) = engine.escape(s, &window) {
            if input.trace_degrees {
                trace.push(engine.trace(s));
            }
            let cert = certify(input, setup, chain, cap);
            return result(CiVerdict::Exact { height: s as u32 }, Some(cert), trace);
        }
        let exact = window.iter().all(|k| engine.slice(s, k).exact);
        if bounded {
            let dims: Vec<usize> = closure.iter().map(|k| engine.slice(s, k).ech.rank()).collect();
            if prev_dims.as_ref() == Some(&dims) && exact {
                if input.trace_degrees {
                    trace.push(engine.trace(s));
                }
                let mut r = result(CiVerdict::LowerBoundAtCap { at_least: s as u32 + 1, cap }, None, trace);
                r.closure_stable = true;
                return r;
            }
            prev_dims = Some(dims);
        }
        if input.trace_degrees {
            trace.push(engine.trace(s));
        }
        if !exact {
            return result(CiVerdict::LowerBoundAtCap { at_least: s as u32, cap }, None, trace);
        }
    }
    result(CiVerdict::LowerBoundAtCap { at_least: input.max_iter + 1, cap }, None, trace)
}

const OVER_INDEX_BUDGET: u64 = 400_000;

fn run_local(input: &CIInput, setup: &Setup) -> CIHeightResult {
    let cap = input.degree_cap;
    let window = setup.escape_keys();
    let n = setup.nvars as u64;
    let start = (setup.i1.iter().map(|g| input.filtration(g)).max().unwrap_or(0) + n * (setup.p - 1)).min(cap);
    let mut bounds = vec![start];
    while *bounds.last().unwrap() < cap {
        let next = (bounds.last().unwrap() * 2).min(cap);
        bounds.push(next);
    }
    let mut engines: Vec<ChainEngine> = Vec::new();
    let mut trace = Vec::new();
    for s in 1..=input.max_iter as usize {
        let mut tried = 0;
        // A cheap search first, then the containment proof, then the rest.
        for (i, &b) in bounds.iter().enumerate().take(1) {
            if engines.len() <= i {
                engines.push(ChainEngine::new(setup, b, false));
            }
            tried = i + 1;
            if let Some(chain) = engines[i].escape(s, &window) {
                if input.trace_degrees {
                    trace.push(engines[i].trace(s));
                }
                let cert = certify(input, setup, chain, b);
                return result(CiVerdict::Exact { height: s as u32 }, Some(cert), trace);
            }
        }
        if proves_contained(setup, s, &window) {
            if input.trace_degrees {
                trace.push(engines[0].trace(s));
            }
            continue;
        }
        for (i, &b) in bounds.iter().enumerate().skip(tried) {
            if engines.len() <= i {
                engines.push(ChainEngine::new(setup, b, false));
            }
            if let Some(chain) = engines[i].escape(s, &window) {
                if input.trace_degrees {
                    trace.push(engines[i].trace(s));
                }
                let cert = certify(input, setup, chain, b);
                return result(CiVerdict::Exact { height: s as u32 }, Some(cert), trace);
            }
        }
        return result(CiVerdict::LowerBoundAtCap { at_least: s as u32, cap }, None, trace);
    }
    result(CiVerdict::LowerBoundAtCap { at_least: input.max_iter + 1, cap }, None, trace)
}

fn proves_contained(setup: &Setup, t: usize, window: &[Key]) -> bool {
    let n = setup.nvars as u64;
    for slack in [0u64, 1, 2, 4, 8, 16, 32] {
        let ks = OverEngine::precisions(setup, t, slack);
        let bound = ks.iter().copied().max().unwrap_or(0);
        if binomial(bound + n, n) > OVER_INDEX_BUDGET {
            return false;
        }
        if OverEngine::new(setup, ks).proves_contained(window) {
            return true;
        }
    }
    false
}

/// Adds the `I_1` cofactors to a chain found by an engine.
fn certify(input: &CIInput, setup: &Setup, chain: Chain, bound: u64) -> CiCertificate {
    let rel = relations(&setup.theta, &chain);
    let top = rel.iter().map(|r| input.filtration(r)).max().unwrap_or(0).max(bound);
    let index = setup.index(top);
    let mut span = IdealSpan::new(setup.i1.clone(), index, top, cofactor_tag(&input.f, setup.i1.len()));
    let cofactors = rel.iter().map(|r| cofactors(&mut span, r).expect("chain relations lie in I_1 by construction")).collect();
    CiCertificate { i1: setup.i1.clone(), chain, cofactors }
}

/// `h_1, h_2 - θ(h_1), …, h_n - θ(h_{n-1})`.
fn relations(theta: &ThetaOperator, chain: &[SparsePoly]) -> Vec<SparsePoly> {
    let mut out = vec![chain[0].clone()];
    for w in chain.windows(2) {
        out.push(w[1].sub(&theta.theta(&w[0])));
    }
    out
}

/// Replays a certificate with the full `Δ₁(f^{p-1})` and plain arithmetic.
pub fn verify_ci_certificate(input: &CIInput, cert: &CiCertificate) -> Result<u32, String> {
    let p = input.p();
    if cert.i1 != colon_bracket(&input.gens, p) {
        return Err("I_1 generators do not match the input".into());
    }
    let n = cert.chain.len();
    if n == 0 || cert.cofactors.len() != n {
        return Err("chain and cofactor lengths differ".into());
    }
    let theta = ThetaOperator::new(&input.f, &input.grading).map_err(|e| e.to_string())?;
    let rel = relations(&theta, &cert.chain);
    for (i, (r, c)) in rel.iter().zip(&cert.cofactors).enumerate() {
        if c.len() != cert.i1.len() {
            return Err(format!("relation {} has {} cofactors", i + 1, c.len()));
        }
        let sum = c.iter().zip(&cert.i1).fold(SparsePoly::zero(r.modulus(), r.nvars()), |acc, (a, g)| acc.add(&a.mul(g)));
        if &sum != r {
            return Err(format!("relation {} is not the stated combination of I_1", i + 1));
        }
    }
    for (i, h) in cert.chain[..n - 1].iter().enumerate() {
        if !u_top(h).is_zero() {
            return Err(format!("h_{} is not in ker u", i + 1));
        }
    }
    if escaping_term(&cert.chain[n - 1], p).is_none() {
        return Err("final element lies in m^[p]".into());
    }
    Ok(n as u32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefutedBy {
    /// A generator of `J` has a term outside `m^{[p]}`.
    NotInBracket,
    /// A generator of `(I^{[p]} : I)` is not in `J`.
    MissingColonGenerator,
    /// `θ(a) ∉ J` for some `a ∈ J ∩ ker u`.
    ThetaImage,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixedPointOutcome {
    /// Every piece of filtration degree at most `cap` passed; evidence, not proof.
    VerifiedUpToCap { cap: u64 },
    /// `exact` is false when the failure might disappear at a larger cap.
    Refuted { witness: SparsePoly, by: RefutedBy, exact: bool },
}

/// Checks `J ⊇ θ(F_*J ∩ ker u) + (I^{[p]} : I)` and `J ⊆ m^{[p]}` piecewise up to `cap`.
pub fn verify_fixed_point(input: &CIInput, j_gens: &[SparsePoly], cap: u64) -> Result<FixedPointOutcome, CiError> {
    let graded = input.mode == Mode::Graded;
    let mut fails = fixed_point_failures(input, j_gens, cap, 1)?;
    Ok(match fails.pop() {
        None => FixedPointOutcome::VerifiedUpToCap { cap },
        Some((witness, by)) => FixedPointOutcome::Refuted { witness, by, exact: graded || by == RefutedBy::NotInBracket },
    })
}

/// Up to `limit` elements that `J` would have to contain but does not
/// (independent modulo `J` within each piece).
fn fixed_point_failures(input: &CIInput, j_gens: &[SparsePoly], cap: u64, limit: usize) -> Result<Vec<(SparsePoly, RefutedBy)>, CiError> {
    let p = input.p();
    let mut out = Vec::new();
    for j in j_gens {
        if !in_bracket_power(j, p) {
            out.push((j.clone(), RefutedBy::NotInBracket));
            return Ok(out);
        }
    }
    let setup = Setup::new(input)?;
    let extra = match input.mode {
        Mode::Graded => vec![input.grading.total_weights().iter().map(|&w| w as i64).collect()],
        Mode::Local => Vec::new(),
    };
    let fg = FineGrading::for_polys(input.nvars(), input.gens.iter().chain(j_gens), &extra);
    let index = Rc::new(MonomialIndex::new(fg.clone(), setup.weights.clone(), cap));
    let mut span = IdealSpan::new(j_gens.to_vec(), index.clone(), cap, unit_tag());
    for g in &setup.i1 {
        if input.filtration(g) <= cap && !span.contains(g) {
            out.push((g.clone(), RefutedBy::MissingColonGenerator));
            if out.len() >= limit {
                return Ok(out);
            }
        }
    }
    let kf = fg.key_of(&input.f).expect("homogeneous");
    let kdelta = key_scale(&kf, (p * (p - 1)) as i64);
    let ktop = fg.key(&top_index(input.nvars(), p as u32));
    let mut keys: Vec<Key> = index.keys().cloned().collect();
    keys.sort();
    let mut enlarged: HashMap<Key, Echelon<()>> = HashMap::new();
    for k in keys {
        let Some(target) = key_div(&key_sub(&key_add(&k, &kdelta), &ktop), p as i64) else { continue };
        let rows: Vec<SparsePoly> = span.piece(&k).rows().map(|(r, ())| r.clone()).collect();
        if rows.is_empty() {
            continue;
        }
        for a in kernel(rows.into_iter().map(|r| (u_top(&r), r))) {
            let img = setup.theta.theta_kernel(&a);
            if img.is_zero() || input.filtration(&img) > cap {
                continue;
            }
            let inside = match enlarged.get(&target) {
                Some(e) => e.contains(&img),
                None => span.piece(&target).contains(&img),
            };
            if !inside {
                let e = enlarged.entry(target.clone()).or_insert_with(|| span.piece(&target).clone());
                e.push(img.clone());
                out.push((img, RefutedBy::ThetaImage));
                if out.len() >= limit {
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

/// Result of [`extend_to_fixed_point`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extension {
    /// The enlarged generator list passes [`verify_fixed_point`] up to the cap.
    Closed {
        gens: Vec<SparsePoly>,
        added: usize,
    },
    /// Some element forced into `J` has a term outside `m^{[p]}`.
    Escaped {
        witness: SparsePoly,
    },
    GaveUp {
        gens: Vec<SparsePoly>,
    },
}

/// Adds refuting `θ`-images (and missing colon generators) to `J` until it
/// is closed up to `cap`, in at most `max_steps` rounds.
pub fn extend_to_fixed_point(input: &CIInput, j_gens: &[SparsePoly], cap: u64, max_steps: usize) -> Result<Extension, CiError> {
    let mut gens = j_gens.to_vec();
    for _ in 0..=max_steps {
        let fails = fixed_point_failures(input, &gens, cap, usize::MAX)?;
        if fails.is_empty() {
            let added = gens.len() - j_gens.len();
            return Ok(Extension::Closed { gens, added });
        }
        // Low-degree additions generate most of the higher failures.
        let low = fails.iter().map(|(w, _)| input.filtration(w)).min().unwrap_or(0);
        for (witness, by) in fails {
            if by == RefutedBy::NotInBracket || escaping_term(&witness, input.p()).is_some() {
                return Ok(Extension::Escaped { witness });
            }
            if input.filtration(&witness) == low {
                gens.push(witness);
            }
        }
    }
    Ok(Extension::GaveUp { gens })
}

/// Outcome of [`verify_splitting_tuple`], with the first failing condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleReport {
    pub holds: bool,
    pub failure: Option<String>,
}

/// Checks the conditions for `g_1..g_n` to split: `g_1 ∉ m^{[p]}`,
/// `u(g_i) = 0` for `i ≥ 2`, and for each `s` and generator `f_j`
/// `Σ_{r=0}^{n-s} u^r(g_{r+s} Δ_r(f_j)) ∈ I^{[p^s]}`, with membership
/// tested piecewise up to `cap`.
pub fn verify_splitting_tuple(input: &CIInput, tuple: &[SparsePoly], cap: u64) -> Result<TupleReport, CiError> {
    let p = input.p();
    let fail = |m: String| Ok(TupleReport { holds: false, failure: Some(m) });
    let Some(g1) = tuple.first() else { return fail("empty tuple".into()) };
    if escaping_term(g1, p).is_none() {
        return fail("g_1 lies in m^[p]".into());
    }
    for (i, g) in tuple.iter().enumerate().skip(1) {
        if !u_top(g).is_zero() {
            return fail(format!("u(g_{}) is not zero", i + 1));
        }
    }
    let n = tuple.len();
    let extra = match input.mode {
        Mode::Graded => vec![input.grading.total_weights().iter().map(|&w| w as i64).collect()],
        Mode::Local => Vec::new(),
    };
    let fg = FineGrading::for_polys(input.nvars(), input.gens.iter(), &extra);
    let weights = input.filtration_weights();
    // Δ_r(f_j) for r = 1..n-1.
    let mut deltas: Vec<Vec<SparsePoly>> = Vec::new();
    for fj in &input.gens {
        let mut row = vec![fj.clone()];
        for r in 1..n as u32 {
            row.push(delta_n_rep(fj, r)?.value);
        }
        deltas.push(row);
    }
    for s in 1..=n {
        let q = p.pow(s as u32);
        let bracket: Vec<SparsePoly> = input.gens.iter().map(|g| g.frobenius(s as u32)).collect();
        let mut sums = Vec::new();
        for (j, dj) in deltas.iter().enumerate() {
            let mut acc = SparsePoly::zero(input.f.modulus(), input.nvars());
            for r in 0..=(n - s) {
                let term = tuple[r + s - 1].mul(&dj[r]);
                acc = acc.add(&u_top_iter(&term, r as u32));
            }
            sums.push((j, acc));
        }
        let top = sums.iter().map(|(_, a)| a.terms().iter().map(|(e, _)| filt(e, &weights)).max().unwrap_or(0)).max().unwrap_or(0);
        if top > cap {
            return fail(format!("cap {cap} is below the degree {top} reached at s = {s}"));
        }
        let index = Rc::new(MonomialIndex::new(fg.clone(), weights.clone(), top));
        let mut span = IdealSpan::new(bracket, index, top, unit_tag());
        for (j, a) in sums {
            if !span.contains(&a) {
                return fail(format!("condition fails for s = {s}, generator {} (not in I^[{q}])", j + 1));
            }
        }
    }
    Ok(TupleReport { holds: true, failure: None })
}

/// The tuple `g_i = f^{p^i - p} h_{n+1-i}` built from a certificate chain.
pub fn splitting_tuple_from_certificate(input: &CIInput, cert: &CiCertificate) -> Vec<SparsePoly> {
    let p = input.p();
    let n = cert.chain.len();
    (1..=n).map(|i| input.f.pow(p.pow(i as u32) - p).mul(&cert.chain[n - i])).collect()
}

/// Compares `sht(S/I)` with `sht(S/f)` for `f = f_1⋯f_m`: false only when the
/// computed results contradict `sht(S/I) ≤ sht(S/f)`.
pub fn ci_le_hypersurface_check(input: &CIInput) -> Result<bool, CiError> {
    let lhs = ci_height(input)?;
    let hyper = CIInput {
        gens: vec![input.f.clone()],
        f: input.f.clone(),
        grading: input.grading.clone(),
        mode: input.mode,
        degree_cap: input.degree_cap.max(default_cap(std::slice::from_ref(&input.f), &input.f, &input.grading, input.mode)),
        max_iter: input.max_iter,
        trace_degrees: false,
    };
    let rhs = ci_height(&hyper)?;
    Ok(consistent_le(&lhs.verdict, &rhs.verdict))
}

/// Whether `a ≤ b` is possible given the two verdicts.
pub fn consistent_le(a: &CiVerdict, b: &CiVerdict) -> bool {
    let lower = |v: &CiVerdict| match v {
        CiVerdict::Exact { height } => Some(*height),
        CiVerdict::LowerBoundAtCap { at_least, .. } => Some(*at_least),
        CiVerdict::InfiniteByCheck { .. } => None,
    };
    let upper = |v: &CiVerdict| match v {
        CiVerdict::Exact { height } => Some(*height),
        _ => None,
    };
    match (lower(a), upper(b)) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(la), Some(ub)) => la <= ub,
    }
}
