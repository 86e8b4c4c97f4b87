//! Sparse multivariate polynomials over `Z/p^e`.
//!
//! Terms are kept in descending graded-lex order with no zero coefficients,
//! so two polynomials are equal exactly when their term lists are.

mod grading;
mod modulus;
mod parse;

use std::cmp::Ordering;
use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

pub use grading::{Degree, Grading};
pub use modulus::Modulus;
pub use parse::{ParseError, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("{0} is not a prime in the supported range 2..=2^31")]
    NotPrime(u64),
    #[error("precision p^e with p = {p}, e = {e} is out of range")]
    Precision { p: u64, e: u32 },
    #[error("modulus mismatch: {0:?} vs {1:?}")]
    ModulusMismatch(Modulus, Modulus),
    #[error("arity mismatch: {0} vs {1} variables")]
    ArityMismatch(usize, usize),
    #[error("{q} is not a power of {p}")]
    NotPowerOfP { q: u64, p: u64 },
    #[error("invalid grading: {0}")]
    Grading(String),
}

/// Inline storage covers every ring in the worked examples without allocating.
pub type Exps = SmallVec<[u32; 10]>;

/// Exponents of a monomial, one entry per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExponentVector(Exps);

impl ExponentVector {
    pub fn new(exps: &[u32]) -> Self {
        ExponentVector(SmallVec::from_slice(exps))
    }

    pub fn zero(n: usize) -> Self {
        ExponentVector(SmallVec::from_elem(0, n))
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        v.0[i] = 1;
        v
    }

    /// The all-`k` vector, e.g. `(p-1, ..., p-1)`.
    pub fn constant(n: usize, k: u32) -> Self {
        ExponentVector(SmallVec::from_elem(k, n))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` when `other` divides `self`.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let mut out = Exps::with_capacity(self.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(ExponentVector(out))
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn scale(&self, k: u32) -> Self {
        ExponentVector(self.0.iter().map(|&a| a * k).collect())
    }

    pub fn lcm(&self, other: &Self) -> Self {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    /// Componentwise residues mod `p`.
    pub fn residue(&self, p: u32) -> Self {
        ExponentVector(self.0.iter().map(|&a| a % p).collect())
    }

    /// `(self - e) / p` when `self ≡ e (mod p)` componentwise and `self >= e`.
    pub fn frobenius_quotient(&self, e: &Self, p: u32) -> Option<Self> {
        let mut out = Exps::with_capacity(self.len());
        for (a, b) in self.0.iter().zip(&e.0) {
            if a < b || (a - b) % p != 0 {
                return None;
            }
            out.push((a - b) / p);
        }
        Some(ExponentVector(out))
    }

    /// True iff every exponent is at most `bound`.
    pub fn all_at_most(&self, bound: u32) -> bool {
        self.0.iter().all(|&a| a <= bound)
    }

    /// True iff every exponent is divisible by `p`.
    pub fn all_divisible(&self, p: u32) -> bool {
        self.0.iter().all(|&a| a % p == 0)
    }
}

impl Ord for ExponentVector {
    /// Graded-lex: total degree first, then the earlier variable wins.
    fn cmp(&self, other: &Self) -> Ordering {
        self.total().cmp(&other.total()).then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub type Term = (ExponentVector, u64);

/// A polynomial in `nvars` variables with coefficients in `Z/p^e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    modulus: Modulus,
    nvars: usize,
    terms: Vec<Term>,
}

pub(crate) type Accumulator = FxHashMap<ExponentVector, u64>;

impl SparsePoly {
    pub fn zero(modulus: Modulus, nvars: usize) -> Self {
        SparsePoly { modulus, nvars, terms: Vec::new() }
    }

    pub fn one(modulus: Modulus, nvars: usize) -> Self {
        Self::constant(modulus, nvars, 1)
    }

    pub fn constant(modulus: Modulus, nvars: usize, c: u64) -> Self {
        Self::monomial(modulus, ExponentVector::zero(nvars), c)
    }

    pub fn monomial(modulus: Modulus, exps: ExponentVector, c: u64) -> Self {
        let nvars = exps.len();
        let c = modulus.reduce(c);
        let terms = if c == 0 { Vec::new() } else { vec![(exps, c)] };
        SparsePoly { modulus, nvars, terms }
    }

    /// The `i`-th variable.
    pub fn var(modulus: Modulus, nvars: usize, i: usize) -> Self {
        Self::monomial(modulus, ExponentVector::unit(nvars, i), 1)
    }

    /// Build from arbitrary terms; duplicates are combined and zeros dropped.
    pub fn from_terms<I: IntoIterator<Item = Term>>(modulus: Modulus, nvars: usize, terms: I) -> Self {
        let mut acc = Accumulator::default();
        for (e, c) in terms {
            debug_assert_eq!(e.len(), nvars);
            let slot = acc.entry(e).or_insert(0);
            *slot = modulus.add(*slot, modulus.reduce(c));
        }
        Self::from_accumulator(modulus, nvars, acc)
    }

    pub(crate) fn from_accumulator(modulus: Modulus, nvars: usize, acc: Accumulator) -> Self {
        let mut terms: Vec<Term> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        SparsePoly { modulus, nvars, terms }
    }

    /// Terms must already be distinct, nonzero and in descending order.
    pub(crate) fn from_sorted(modulus: Modulus, nvars: usize, terms: Vec<Term>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| *c != 0 && *c < modulus.order()));
        SparsePoly { modulus, nvars, terms }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Term> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].1 == 1 && self.terms[0].0.is_zero()
    }

    /// Largest term in graded-lex order.
    pub fn leading(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn coeff(&self, e: &ExponentVector) -> u64 {
        self.terms.binary_search_by(|(t, _)| e.cmp(t)).map(|i| self.terms[i].1).unwrap_or(0)
    }

    /// Maximal total (unweighted) degree; `None` for zero.
    pub fn total_degree(&self) -> Option<u64> {
        self.terms.first().map(|(e, _)| e.total())
    }

    /// Minimal total degree of a term (the m-adic order); `None` for zero.
    pub fn order(&self) -> Option<u64> {
        self.terms.last().map(|(e, _)| e.total())
    }

    pub fn check_compatible(&self, other: &Self) -> Result<(), PolyError> {
        if self.modulus != other.modulus {
            return Err(PolyError::ModulusMismatch(self.modulus, other.modulus));
        }
        if self.nvars != other.nvars {
            return Err(PolyError::ArityMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    /// `self + c * other` by merging the sorted term lists.
    pub fn add_scaled(&self, other: &Self, c: u64) -> Self {
        debug_assert!(self.check_compatible(other).is_ok());
        let m = self.modulus;
        let c = m.reduce(c);
        if c == 0 || other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let v = m.mul(c, b[j].1);
                    if v != 0 {
                        out.push((b[j].0.clone(), v));
                    }
                    j += 1;
                }
                Ordering::Equal => {
                    let v = m.add(a[i].1, m.mul(c, b[j].1));
                    if v != 0 {
                        out.push((a[i].0.clone(), v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        for (e, v) in &b[j..] {
            let v = m.mul(c, *v);
            if v != 0 {
                out.push((e.clone(), v));
            }
        }
        SparsePoly { modulus: m, nvars: self.nvars, terms: out }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, self.modulus.neg(1))
    }

    pub fn neg(&self) -> Self {
        self.scale(self.modulus.neg(1))
    }

    pub fn scale(&self, c: u64) -> Self {
        let m = self.modulus;
        let terms = self
            .terms
            .iter()
            .filter_map(|(e, v)| {
                let w = m.mul(*v, c);
                (w != 0).then(|| (e.clone(), w))
            })
            .collect();
        SparsePoly { modulus: m, nvars: self.nvars, terms }
    }

    /// Multiply by `c * x^exps`.
    pub fn mul_term(&self, exps: &ExponentVector, c: u64) -> Self {
        let m = self.modulus;
        let terms = self
            .terms
            .iter()
            .filter_map(|(e, v)| {
                let w = m.mul(*v, c);
                (w != 0).then(|| (e.add(exps), w))
            })
            .collect();
        // Multiplying by a monomial preserves graded-lex order.
        SparsePoly { modulus: m, nvars: self.nvars, terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert!(self.check_compatible(other).is_ok());
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.modulus, self.nvars);
        }
        if other.terms.len() == 1 {
            let (e, c) = &other.terms[0];
            return self.mul_term(e, *c);
        }
        if self.terms.len() == 1 {
            let (e, c) = &self.terms[0];
            return other.mul_term(e, *c);
        }
        let m = self.modulus;
        let mut acc = Accumulator::default();
        acc.reserve(self.terms.len().max(other.terms.len()) * 2);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let slot = acc.entry(ea.add(eb)).or_insert(0);
                *slot = m.add(*slot, m.mul(*ca, *cb));
            }
        }
        Self::from_accumulator(m, self.nvars, acc)
    }

    /// Product keeping only terms accepted by `keep`; exact for any filter
    /// that is closed under the support of the discarded terms.
    pub fn mul_filtered<F: Fn(&ExponentVector) -> bool>(&self, other: &Self, keep: F) -> Self {
        let m = self.modulus;
        let mut acc = Accumulator::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.add(eb);
                if keep(&e) {
                    let slot = acc.entry(e).or_insert(0);
                    *slot = m.add(*slot, m.mul(*ca, *cb));
                }
            }
        }
        Self::from_accumulator(m, self.nvars, acc)
    }

    /// `self^k`; over a prime field the base-`p` digits of `k` are handled
    /// with the termwise Frobenius.
    pub fn pow(&self, k: u64) -> Self {
        if k == 0 {
            return Self::one(self.modulus, self.nvars);
        }
        if self.modulus.is_field() && self.terms.len() > 1 {
            let p = self.modulus.p();
            let mut result = Self::one(self.modulus, self.nvars);
            let mut base = self.clone();
            let mut k = k;
            while k > 0 {
                let digit = k % p;
                if digit > 0 {
                    result = result.mul(&base.pow_binary(digit));
                }
                k /= p;
                if k > 0 {
                    base = base.frobenius(1);
                }
            }
            return result;
        }
        self.pow_binary(k)
    }

    fn pow_binary(&self, mut k: u64) -> Self {
        let mut result = Self::one(self.modulus, self.nvars);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// The termwise map `x^m ↦ x^{p^k m}`, which is `a ↦ a^{p^k}` over `F_p`.
    pub fn frobenius(&self, k: u32) -> Self {
        assert!(self.modulus.is_field(), "termwise Frobenius needs a prime field");
        let q = (self.modulus.p() as u32).pow(k);
        let terms = self.terms.iter().map(|(e, c)| (e.scale(q), *c)).collect();
        SparsePoly { modulus: self.modulus, nvars: self.nvars, terms }
    }

    pub fn retain<F: FnMut(&ExponentVector, u64) -> bool>(&self, mut keep: F) -> Self {
        let terms = self.terms.iter().filter(|(e, c)| keep(e, *c)).cloned().collect();
        SparsePoly { modulus: self.modulus, nvars: self.nvars, terms }
    }

    /// Drop every term of total degree at least `k` (work modulo `m^k`).
    pub fn truncate(&self, k: u64) -> Self {
        self.retain(|e, _| e.total() < k)
    }

    pub fn degree(&self, g: &Grading) -> Degree {
        g.degree(self)
    }

    /// Coefficientwise reduction `Z/p^e -> F_p`.
    pub fn reduce_mod_p(&self) -> Self {
        self.change_modulus(Modulus::field(self.modulus.p()).expect("prime already validated"))
    }

    /// Reinterpret canonical representatives in another precision of the same prime.
    pub fn change_modulus(&self, target: Modulus) -> Self {
        assert_eq!(target.p(), self.modulus.p());
        let terms = self
            .terms
            .iter()
            .filter_map(|(e, c)| {
                let v = target.reduce(*c);
                (v != 0).then(|| (e.clone(), v))
            })
            .collect();
        SparsePoly { modulus: target, nvars: self.nvars, terms }
    }

    /// Lift an `F_p` polynomial to `Z/p^e` using representatives in `0..p`.
    pub fn lift_terms(&self, e: u32) -> Self {
        let target = self.modulus.with_precision(e).expect("precision in range");
        let p = self.modulus.p();
        let terms = self.terms.iter().map(|(x, c)| (x.clone(), c % p)).filter(|(_, c)| *c != 0).collect();
        SparsePoly { modulus: target, nvars: self.nvars, terms }
    }

    /// Divide every coefficient by `p^k`, failing if one is not divisible;
    /// the result lives in `Z/p^{e-k}`.
    pub fn divide_by_p_power(&self, k: u32) -> Option<Self> {
        let m = self.modulus;
        assert!(k < m.e());
        let target = m.with_precision(m.e() - k).expect("precision in range");
        let pk = m.p().pow(k);
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            if c % pk != 0 {
                return None;
            }
            let v = c / pk;
            let v = target.reduce(v);
            if v != 0 {
                terms.push((e.clone(), v));
            }
        }
        Some(SparsePoly { modulus: target, nvars: self.nvars, terms })
    }

    /// Multiply coefficients by `p^k` inside the same ring.
    pub fn times_p_power(&self, k: u32) -> Self {
        let m = self.modulus;
        self.scale(m.pow(m.p(), k as u64))
    }

    pub fn display<'a>(&'a self, vars: &'a VarSet) -> impl fmt::Display + 'a {
        PolyDisplay { poly: self, vars }
    }
}

struct PolyDisplay<'a> {
    poly: &'a SparsePoly,
    vars: &'a VarSet,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.vars.format(self.poly))
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&VarSet::indexed(self.nvars).format(self))
    }
}

/// `{g^q : g ∈ gens}`, generators of `I^{[q]}`.
pub fn bracket_power_ideal_gens(gens: &[SparsePoly], q: u64) -> Result<Vec<SparsePoly>, PolyError> {
    let Some(first) = gens.first() else {
        return Ok(Vec::new());
    };
    let p = first.modulus().p();
    let mut r = q;
    let mut k = 0u32;
    while r > 1 && r.is_multiple_of(p) {
        r /= p;
        k += 1;
    }
    if r != 1 {
        return Err(PolyError::NotPowerOfP { q, p });
    }
    Ok(gens.iter().map(|g| if g.modulus().is_field() { g.frobenius(k) } else { g.pow(q) }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64) -> Modulus {
        Modulus::field(p).unwrap()
    }

    fn parse(p: u64, vars: &str, s: &str) -> SparsePoly {
        VarSet::parse_list(vars).unwrap().parse_poly(s, f(p)).unwrap()
    }

    #[test]
    fn addition_examples() {
        assert!(parse(2, "x,y", "x+y").add(&parse(2, "x,y", "x+y")).is_zero());
        assert_eq!(parse(3, "x,y,z", "x^3+y^3").add(&parse(3, "x,y,z", "z^3")), parse(3, "x,y,z", "x^3+y^3+z^3"));
        assert_eq!(parse(3, "x", "2x").add(&parse(3, "x", "2x")), parse(3, "x", "x"));
    }

    #[test]
    fn multiplication_examples() {
        let a = parse(2, "x,y", "x+y");
        assert_eq!(a.mul(&a), parse(2, "x,y", "x^2+y^2"));
        assert_eq!(parse(3, "x,y", "x+2y").mul(&parse(3, "x,y", "x+y")), parse(3, "x,y", "x^2+2y^2"));
        let fx = parse(2, "x,y,z", "x^3+y^3+z^3");
        let d = parse(2, "x,y,z", "x^3y^3+y^3z^3+x^3z^3");
        assert_eq!(fx.mul(&d).coeff(&ExponentVector::new(&[3, 3, 3])), 1);
    }

    #[test]
    fn power_examples() {
        assert_eq!(parse(2, "x,y", "x+y").pow(2), parse(2, "x,y", "x^2+y^2"));
        let fx = parse(2, "x,y,z", "x^3+y^3+z^3");
        assert_eq!(fx.pow(1), fx);
        let q = parse(3, "x,y,z,w", "x^4+y^4+z^4+w^4").pow(2);
        assert_eq!(q.coeff(&ExponentVector::new(&[4, 4, 0, 0])), 2);
        assert!(fx.pow(0).is_one());
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let a = parse(3, "x,y", "x+2y+1");
        let mut r = SparsePoly::one(f(3), 2);
        for k in 0..12 {
            assert_eq!(a.pow(k), r, "k = {k}");
            r = r.mul(&a);
        }
    }

    #[test]
    fn bracket_powers() {
        let m = f(2);
        let gens: Vec<_> = (0..3).map(|i| SparsePoly::var(m, 3, i)).collect();
        let sq = bracket_power_ideal_gens(&gens, 2).unwrap();
        assert_eq!(sq[1], parse(2, "x,y,z", "y^2"));
        let m3 = f(3);
        let gens: Vec<_> = (0..4).map(|i| SparsePoly::var(m3, 4, i)).collect();
        let nine = bracket_power_ideal_gens(&gens, 9).unwrap();
        assert_eq!(nine[3], parse(3, "x,y,z,w", "w^9"));
        let g = parse(3, "x,y", "x+y^2");
        assert_eq!(bracket_power_ideal_gens(std::slice::from_ref(&g), 3).unwrap()[0], g.pow(3));
        assert!(bracket_power_ideal_gens(&[g], 6).is_err());
    }

    #[test]
    fn lift_and_reduce() {
        let a = parse(3, "x,y,z", "x^3+y^3+2z^3");
        assert_eq!(a.lift_terms(2).reduce_mod_p(), a);
        let m9 = Modulus::new(3, 2).unwrap();
        let px = SparsePoly::monomial(m9, ExponentVector::new(&[1]), 3);
        assert!(px.reduce_mod_p().is_zero());
        let b = parse(2, "x,y,z", "x^3+y^3+z^3").lift_terms(2);
        assert_eq!(b.modulus().order(), 4);
        assert!(b.terms().iter().all(|(_, c)| *c == 1));
    }

    #[test]
    fn graded_lex_order() {
        let a = parse(5, "x,y,z", "z + y^2 + x*y + x^2 + 3");
        let order: Vec<_> = a.terms().iter().map(|(e, _)| e.as_slice().to_vec()).collect();
        assert_eq!(order, vec![vec![2, 0, 0], vec![1, 1, 0], vec![0, 2, 0], vec![0, 0, 1], vec![0, 0, 0]]);
        assert_eq!(a.order(), Some(0));
        assert_eq!(a.total_degree(), Some(2));
    }

    #[test]
    fn p_power_division() {
        let m = Modulus::new(2, 3).unwrap();
        let a = SparsePoly::from_terms(m, 1, vec![(ExponentVector::new(&[1]), 4), (ExponentVector::new(&[0]), 2)]);
        let b = a.divide_by_p_power(1).unwrap();
        assert_eq!(b.modulus().order(), 4);
        assert_eq!(b.coeff(&ExponentVector::new(&[1])), 2);
        assert!(a.divide_by_p_power(2).is_none());
    }

    fn arb_poly(p: u64, nvars: usize) -> impl Strategy<Value = SparsePoly> {
        prop::collection::vec((prop::collection::vec(0u32..4, nvars), 0u64..p), 0..6)
            .prop_map(move |ts| SparsePoly::from_terms(f(p), nvars, ts.into_iter().map(|(e, c)| (ExponentVector::new(&e), c))))
    }

    fn arb_triple() -> impl Strategy<Value = (SparsePoly, SparsePoly, SparsePoly)> {
        prop_oneof![Just(2u64), Just(3), Just(5)].prop_flat_map(|p| (arb_poly(p, 3), arb_poly(p, 3), arb_poly(p, 3)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn ring_axioms((a, b, c) in arb_triple()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert!(a.sub(&a).is_zero());
        }

        #[test]
        fn freshman_dream((a, _b, _c) in arb_triple()) {
            let p = a.modulus().p();
            prop_assert_eq!(a.pow(p), a.frobenius(1));
            prop_assert_eq!(a.pow_binary(p * p + 1), a.pow(p * p + 1));
        }

        #[test]
        fn graded_degree_additive((a, b, _c) in arb_triple()) {
            let g = Grading::standard(3);
            let ha = a.retain(|e, _| e.total() == 2);
            let hb = b.retain(|e, _| e.total() == 3);
            let prod = ha.mul(&hb);
            if !prod.is_zero() {
                prop_assert_eq!(g.degree(&prod), Degree::Homogeneous(vec![5]));
            }
            if !ha.is_zero() {
                let q = ha.modulus().p();
                let br = bracket_power_ideal_gens(std::slice::from_ref(&ha), q).unwrap();
                prop_assert_eq!(g.degree(&br[0]), Degree::Homogeneous(vec![2 * q]));
            }
        }
    }
}
