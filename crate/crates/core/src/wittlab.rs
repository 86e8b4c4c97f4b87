//! Truncated Witt vectors `W_n(S)` over `S = F_p[x]`, computed through ghost
//! components of integer lifts in `Z/p^{2n}`. Slow and exact; an oracle for
//! the production `delta` module.
//!
//! Back-solving uses `s_m = (w_m - Σ_{i<m} p^i s_i^{p^{m-i}}) / p^m`. Any lift
//! of `s_i` gives the same value mod `p^{m+1}`, so the termwise lift is fine.

use crate::frobenius::mod_frobenius;
use crate::polyring::{Modulus, SparsePoly};

/// Input size above which the oracle refuses to work.
pub const TERM_GUARD: usize = 64;
/// Longest Witt vector the oracle handles.
pub const MAX_LENGTH: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WittError {
    #[error("oracle guard: {0} terms exceeds {TERM_GUARD}")]
    Guard(usize),
    #[error("length {0} outside 1..={MAX_LENGTH}")]
    Length(usize),
    #[error("internal error: ghost component {0} not divisible by p^{0}")]
    Divisibility(usize),
    #[error("Witt vectors of different shapes")]
    Shape,
}

/// `(a_0, ..., a_{n-1})` with entries over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVector {
    comps: Vec<SparsePoly>,
}

impl WittVector {
    pub fn new(comps: Vec<SparsePoly>) -> Result<Self, WittError> {
        let n = comps.len();
        if n == 0 || n > MAX_LENGTH {
            return Err(WittError::Length(n));
        }
        let (m, k) = (comps[0].modulus(), comps[0].nvars());
        if !m.is_field() || comps.iter().any(|c| c.modulus() != m || c.nvars() != k) {
            return Err(WittError::Shape);
        }
        Ok(WittVector { comps })
    }

    pub fn zero(modulus: Modulus, nvars: usize, n: usize) -> Self {
        WittVector { comps: vec![SparsePoly::zero(modulus, nvars); n] }
    }

    /// `[a] = (a, 0, ..., 0)`.
    pub fn teichmuller(a: &SparsePoly, n: usize) -> Self {
        let mut comps = vec![SparsePoly::zero(a.modulus(), a.nvars()); n];
        comps[0] = a.clone();
        WittVector { comps }
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn components(&self) -> &[SparsePoly] {
        &self.comps
    }

    fn field(&self) -> Modulus {
        self.comps[0].modulus()
    }

    fn nvars(&self) -> usize {
        self.comps[0].nvars()
    }

    /// Ring housing the lifts.
    pub fn lift_modulus(&self) -> Modulus {
        lift_modulus(self.field(), self.len())
    }

    /// `w_m = Σ_{i<=m} p^i ã_i^{p^{m-i}}` over `Z/p^{2n}`.
    pub fn ghost(&self) -> Vec<SparsePoly> {
        let lm = self.lift_modulus();
        let lifts: Vec<SparsePoly> = self.comps.iter().map(|c| c.lift_terms(lm.e())).collect();
        ghost_of_lifts(&lifts, lm)
    }

    /// Inverse of [`ghost`](Self::ghost) on vectors that are ghosts of something.
    pub fn from_ghost(ghost: &[SparsePoly], field: Modulus) -> Result<Self, WittError> {
        let n = ghost.len();
        if n == 0 || n > MAX_LENGTH {
            return Err(WittError::Length(n));
        }
        let lm = ghost[0].modulus();
        let p = field.p();
        let mut lifts: Vec<SparsePoly> = Vec::with_capacity(n);
        let mut comps = Vec::with_capacity(n);
        for m in 0..n {
            let mut rest = ghost[m].clone();
            for (i, s) in lifts.iter().enumerate() {
                let term = s.pow(p.pow((m - i) as u32)).times_p_power(i as u32);
                rest = rest.sub(&term);
            }
            let s = if m == 0 {
                rest.reduce_mod_p()
            } else {
                rest.divide_by_p_power(m as u32).ok_or(WittError::Divisibility(m))?.reduce_mod_p()
            };
            lifts.push(s.lift_terms(lm.e()));
            comps.push(s);
        }
        Ok(WittVector { comps })
    }

    fn check(&self, other: &Self) -> Result<(), WittError> {
        if self.len() != other.len() || self.field() != other.field() || self.nvars() != other.nvars() {
            return Err(WittError::Shape);
        }
        Ok(())
    }

    fn ghostwise<F: Fn(&SparsePoly, &SparsePoly) -> SparsePoly>(&self, other: &Self, op: F) -> Result<Self, WittError> {
        self.check(other)?;
        let (a, b) = (self.ghost(), other.ghost());
        let g: Vec<SparsePoly> = a.iter().zip(&b).map(|(x, y)| op(x, y)).collect();
        Self::from_ghost(&g, self.field())
    }

    pub fn add(&self, other: &Self) -> Result<Self, WittError> {
        self.ghostwise(other, |x, y| x.add(y))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, WittError> {
        self.ghostwise(other, |x, y| x.sub(y))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, WittError> {
        self.ghostwise(other, |x, y| x.mul(y))
    }

    pub fn neg(&self) -> Result<Self, WittError> {
        let g: Vec<SparsePoly> = self.ghost().iter().map(|x| x.neg()).collect();
        Self::from_ghost(&g, self.field())
    }

    /// Multiplication by the integer `k`.
    pub fn scale(&self, k: u64) -> Result<Self, WittError> {
        let g: Vec<SparsePoly> = self.ghost().iter().map(|x| x.scale(k)).collect();
        Self::from_ghost(&g, self.field())
    }

    /// Verschiebung `(a_0, ...) ↦ (0, a_0, ...)`, truncated to the same length.
    pub fn v(&self) -> Self {
        let mut comps = vec![SparsePoly::zero(self.field(), self.nvars())];
        comps.extend(self.comps[..self.len() - 1].iter().cloned());
        WittVector { comps }
    }

    /// Frobenius; over `F_p` it raises each entry to the `p`-th power.
    pub fn f(&self) -> Self {
        WittVector { comps: self.comps.iter().map(|c| c.frobenius(1)).collect() }
    }

    /// Restriction `W_n → W_{n-1}`.
    pub fn r(&self) -> Result<Self, WittError> {
        Self::new(self.comps[..self.len() - 1].to_vec())
    }
}

fn lift_modulus(field: Modulus, n: usize) -> Modulus {
    field.with_precision(2 * n as u32).expect("oracle precision fits")
}

fn ghost_of_lifts(lifts: &[SparsePoly], lm: Modulus) -> Vec<SparsePoly> {
    let p = lm.p();
    (0..lifts.len())
        .map(|m| {
            let mut w = SparsePoly::zero(lm, lifts[0].nvars());
            for (i, a) in lifts[..=m].iter().enumerate() {
                w = w.add(&a.pow(p.pow((m - i) as u32)).times_p_power(i as u32));
            }
            w
        })
        .collect()
}

fn guard(a: &SparsePoly) -> Result<(), WittError> {
    if a.len() > TERM_GUARD {
        return Err(WittError::Guard(a.len()));
    }
    Ok(())
}

/// `Δ(a) = (δ_1(a), ..., δ_k(a))`, defined by `[a] = Σ [t_i] + V Δ(a)` for the
/// terms `t_i` of `a`.
pub fn delta_vector(a: &SparsePoly, k: usize) -> Result<WittVector, WittError> {
    guard(a)?;
    if k == 0 || k >= MAX_LENGTH {
        return Err(WittError::Length(k));
    }
    let lm = lift_modulus(a.modulus(), k + 1);
    let p = lm.p();
    let lift = a.lift_terms(lm.e());
    let ghost: Vec<SparsePoly> = (0..=k)
        .map(|m| {
            let q = p.pow(m as u32);
            let mut w = lift.pow(q);
            for (e, c) in lift.terms() {
                let t = SparsePoly::monomial(lm, e.scale(q as u32), lm.pow(*c, q));
                w = w.sub(&t);
            }
            w
        })
        .collect();
    let full = WittVector::from_ghost(&ghost, a.modulus())?;
    debug_assert!(full.comps[0].is_zero());
    Ok(WittVector { comps: full.comps[1..].to_vec() })
}

/// `Δ_W(a_0, a_1, ...) = Δ(a_0) + (a_1, a_2, ...)`, one entry shorter.
pub fn delta_w(alpha: &WittVector) -> Result<WittVector, WittError> {
    let k = alpha.len() - 1;
    if k == 0 {
        return Err(WittError::Length(0));
    }
    let d = delta_vector(&alpha.comps[0], k)?;
    let rest = WittVector { comps: alpha.comps[1..].to_vec() };
    d.add(&rest)
}

/// `δ_r(a)` modulo `F(S)`.
pub fn small_delta(a: &SparsePoly, r: usize) -> Result<SparsePoly, WittError> {
    if r == 0 {
        return Ok(mod_frobenius(a));
    }
    let d = delta_vector(a, r)?;
    Ok(mod_frobenius(&d.comps[r - 1]))
}

/// `Δ_r(a)`: the 0-th entry of `Δ_W^r([a])`, modulo `F(S)`. `Δ_0` is the identity.
pub fn big_delta(a: &SparsePoly, r: usize) -> Result<SparsePoly, WittError> {
    guard(a)?;
    if r + 1 > MAX_LENGTH {
        return Err(WittError::Length(r + 1));
    }
    let mut w = WittVector::teichmuller(a, r + 1);
    for _ in 0..r {
        w = delta_w(&w)?;
    }
    Ok(mod_frobenius(&w.comps[0]))
}

/// `σ_n(a_0, ..., a_{n-1}) = Σ_i Δ_{n-1-i}(a_i)` modulo `F(S)`.
pub fn sigma_n(w: &WittVector) -> Result<SparsePoly, WittError> {
    let n = w.len();
    if n > 4 {
        return Err(WittError::Length(n));
    }
    let mut acc = SparsePoly::zero(w.field(), w.nvars());
    for (i, a) in w.comps.iter().enumerate() {
        acc = acc.add(&big_delta(a, n - 1 - i)?);
    }
    Ok(mod_frobenius(&acc))
}
