//! Decomposition `a = Σ_e a_e^p x^e` over `e ∈ {0..p-1}^N` and the dual maps.
//!
//! Over `F_p` the coefficient `p`-th root is the identity, so `a_e` is read
//! off directly from the monomials `x^m` with `m ≡ e (mod p)`.

use rustc_hash::FxHashMap;

use crate::polyring::{Accumulator, ExponentVector, SparsePoly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrobeniusError {
    #[error("component index {0:?} has an entry outside 0..p")]
    IndexOutOfRange(Vec<u32>),
    #[error("component index has {got} entries, expected {expected}")]
    IndexArity { got: usize, expected: usize },
}

fn prime_of(a: &SparsePoly) -> u32 {
    assert!(a.modulus().is_field(), "Frobenius components are defined over F_p");
    a.modulus().p() as u32
}

/// `a_e`: every term `c x^m` with `m ≡ e` contributes `c x^{(m-e)/p}`.
pub fn component(a: &SparsePoly, e: &ExponentVector) -> Result<SparsePoly, FrobeniusError> {
    let p = prime_of(a);
    if e.len() != a.nvars() {
        return Err(FrobeniusError::IndexArity { got: e.len(), expected: a.nvars() });
    }
    if !e.all_at_most(p - 1) {
        return Err(FrobeniusError::IndexOutOfRange(e.as_slice().to_vec()));
    }
    Ok(component_unchecked(a, e, p))
}

fn component_unchecked(a: &SparsePoly, e: &ExponentVector, p: u32) -> SparsePoly {
    // (m - e)/p is order preserving on the selected terms.
    let terms = a.terms().iter().filter_map(|(m, c)| m.frobenius_quotient(e, p).map(|q| (q, *c))).collect();
    SparsePoly::from_sorted(a.modulus(), a.nvars(), terms)
}

/// The distinguished index `(p-1, ..., p-1)`.
pub fn top_index(nvars: usize, p: u32) -> ExponentVector {
    ExponentVector::constant(nvars, p - 1)
}

/// `u(a)`, the coefficient of `(x_1⋯x_N)^{p-1}`.
pub fn u_top(a: &SparsePoly) -> SparsePoly {
    let p = prime_of(a);
    component_unchecked(a, &top_index(a.nvars(), p), p)
}

/// `u^l(a)`; `u^0` is the identity.
pub fn u_top_iter(a: &SparsePoly, l: u32) -> SparsePoly {
    let mut r = a.clone();
    for _ in 0..l {
        r = u_top(&r);
    }
    r
}

/// True iff some term has every exponent `≡ p-1`.
pub fn has_top_component(a: &SparsePoly) -> bool {
    let p = prime_of(a);
    a.terms().iter().any(|(m, _)| m.as_slice().iter().all(|&x| x % p == p - 1))
}

/// Membership in `ker u`.
pub fn in_ker_u(a: &SparsePoly) -> bool {
    !has_top_component(a)
}

/// All nonzero components keyed by their index.
pub fn decompose(a: &SparsePoly) -> FxHashMap<ExponentVector, SparsePoly> {
    let p = prime_of(a);
    let mut buckets: FxHashMap<ExponentVector, Vec<(ExponentVector, u64)>> = FxHashMap::default();
    for (m, c) in a.terms() {
        let e = m.residue(p);
        let q = m.frobenius_quotient(&e, p).expect("residue divides");
        buckets.entry(e).or_default().push((q, *c));
    }
    buckets.into_iter().map(|(e, ts)| (e, SparsePoly::from_sorted(a.modulus(), a.nvars(), ts))).collect()
}

/// `Σ_e comp_e^p x^e`.
pub fn reassemble<'a, I>(components: I, template: &SparsePoly) -> SparsePoly
where
    I: IntoIterator<Item = (&'a ExponentVector, &'a SparsePoly)>,
{
    let p = prime_of(template);
    let m = template.modulus();
    let n = template.nvars();
    let mut acc = Accumulator::default();
    for (e, comp) in components {
        for (q, c) in comp.terms() {
            let x = q.scale(p).add(e);
            let slot = acc.entry(x).or_insert(0);
            *slot = m.add(*slot, *c);
        }
    }
    SparsePoly::from_accumulator(m, n, acc)
}

/// Normal form modulo `F(S)`: drop every term whose exponents are all `≡ 0 (mod p)`.
pub fn mod_frobenius(a: &SparsePoly) -> SparsePoly {
    let p = prime_of(a);
    a.retain(|m, _| !m.all_divisible(p))
}

/// True iff `a ∈ F(S)`, i.e. `a` is a `p`-th power.
pub fn is_frobenius_image(a: &SparsePoly) -> bool {
    mod_frobenius(a).is_zero()
}

/// True iff `a ∈ m^{[q]}`: every term has some exponent at least `q`.
pub fn in_bracket_power(a: &SparsePoly, q: u64) -> bool {
    a.terms().iter().all(|(m, _)| m.as_slice().iter().any(|&x| x as u64 >= q))
}

/// A term of `a` outside `m^{[q]}`, if any.
pub fn escaping_term(a: &SparsePoly, q: u64) -> Option<&ExponentVector> {
    a.terms().iter().map(|(m, _)| m).find(|m| m.as_slice().iter().all(|&x| (x as u64) < q))
}

/// Precomputed decomposition for repeated evaluation of `b ↦ u(a·b)`.
///
/// Only index pairs with `e + e' = (p-1, ..., p-1)` contribute, so
/// `u(a·b) = Σ_e a_e · b_{(p-1)-e}` and the full product is never formed.
#[derive(Clone, Debug)]
pub struct UProduct {
    p: u32,
    nvars: usize,
    parts: FxHashMap<ExponentVector, SparsePoly>,
}

impl UProduct {
    pub fn new(a: &SparsePoly) -> Self {
        UProduct { p: prime_of(a), nvars: a.nvars(), parts: decompose(a) }
    }

    pub fn apply(&self, b: &SparsePoly) -> SparsePoly {
        let m = b.modulus();
        let mut acc = Accumulator::default();
        let top = self.p - 1;
        let mut groups: FxHashMap<ExponentVector, Vec<(ExponentVector, u64)>> = FxHashMap::default();
        for (x, c) in b.terms() {
            let r = x.residue(self.p);
            let q = x.frobenius_quotient(&r, self.p).expect("residue divides");
            let comp = ExponentVector::new(&r.as_slice().iter().map(|&v| top - v).collect::<Vec<_>>());
            groups.entry(comp).or_default().push((q, *c));
        }
        for (e, bq) in groups {
            let Some(ae) = self.parts.get(&e) else { continue };
            for (xa, ca) in ae.terms() {
                for (xb, cb) in &bq {
                    let slot = acc.entry(xa.add(xb)).or_insert(0);
                    *slot = m.add(*slot, m.mul(*ca, *cb));
                }
            }
        }
        SparsePoly::from_accumulator(m, self.nvars, acc)
    }
}
