//! Row echelon forms over `F_p` whose rows are polynomials, pivoted on the
//! leading monomial. Each row carries a payload that follows it through
//! elimination, which is how kernels and provenance are tracked.

use std::collections::BTreeMap;

use crate::polyring::{ExponentVector, SparsePoly};

/// Data carried alongside a row and combined linearly with it.
pub trait Payload: Clone {
    /// `self + c * other`.
    fn add_scaled(&self, other: &Self, c: u64) -> Self;
    fn scale(&self, c: u64) -> Self;
}

impl Payload for () {
    fn add_scaled(&self, _: &Self, _: u64) -> Self {}
    fn scale(&self, _: u64) -> Self {}
}

impl Payload for SparsePoly {
    fn add_scaled(&self, other: &Self, c: u64) -> Self {
        SparsePoly::add_scaled(self, other, c)
    }
    fn scale(&self, c: u64) -> Self {
        SparsePoly::scale(self, c)
    }
}

/// Componentwise; the shorter list is padded with zeros of the same ring.
impl Payload for Vec<SparsePoly> {
    fn add_scaled(&self, other: &Self, c: u64) -> Self {
        let mut out = self.clone();
        for (i, o) in other.iter().enumerate() {
            if i < out.len() {
                out[i] = out[i].add_scaled(o, c);
            } else {
                out.push(o.scale(c));
            }
        }
        out
    }
    fn scale(&self, c: u64) -> Self {
        self.iter().map(|a| a.scale(c)).collect()
    }
}

impl<A: Payload, B: Payload> Payload for (A, B) {
    fn add_scaled(&self, other: &Self, c: u64) -> Self {
        (self.0.add_scaled(&other.0, c), self.1.add_scaled(&other.1, c))
    }
    fn scale(&self, c: u64) -> Self {
        (self.0.scale(c), self.1.scale(c))
    }
}

/// Sparse coordinates `Σ c_i e_i` over generator indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Combination {
    pub p: u64,
    pub coeffs: BTreeMap<usize, u64>,
}

impl Combination {
    pub fn unit(p: u64, i: usize) -> Self {
        Combination { p, coeffs: BTreeMap::from([(i, 1)]) }
    }
}

impl Payload for Combination {
    fn add_scaled(&self, other: &Self, c: u64) -> Self {
        let p = self.p.max(other.p);
        let mut coeffs = self.coeffs.clone();
        for (&i, &v) in &other.coeffs {
            let slot = coeffs.entry(i).or_insert(0);
            *slot = (*slot + v * c % p) % p;
            if *slot == 0 {
                coeffs.remove(&i);
            }
        }
        Combination { p, coeffs }
    }
    fn scale(&self, c: u64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .filter_map(|(&i, &v)| {
                let w = v * c % self.p;
                (w != 0).then_some((i, w))
            })
            .collect();
        Combination { p: self.p, coeffs }
    }
}

/// Outcome of [`Echelon::insert`].
#[derive(Clone, Debug)]
pub enum Inserted<P> {
    /// The row was independent and is now a pivot row.
    Added,
    /// The row reduced to zero; this is the accumulated payload of the relation.
    Dependent(P),
}

/// Rows with distinct leading monomials, each normalized to leading coefficient 1.
#[derive(Clone, Debug)]
pub struct Echelon<P: Payload> {
    rows: BTreeMap<ExponentVector, (SparsePoly, P)>,
}

impl<P: Payload> Default for Echelon<P> {
    fn default() -> Self {
        Echelon { rows: BTreeMap::new() }
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let (mut b, mut k) = (a % p, p - 2);
    while k > 0 {
        if k & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        k >>= 1;
    }
    r
}

impl<P: Payload> Echelon<P> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = &(SparsePoly, P)> {
        self.rows.values()
    }

    pub fn into_rows(self) -> impl Iterator<Item = (SparsePoly, P)> {
        self.rows.into_values()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &ExponentVector> {
        self.rows.keys()
    }

    /// Head-reduce until the leading monomial is not a pivot (or the row is zero).
    pub fn reduce(&self, mut v: SparsePoly, mut payload: P) -> (SparsePoly, P) {
        let p = v.modulus().p();
        while let Some((lm, c)) = v.leading().map(|(e, c)| (e.clone(), *c)) {
            let Some((row, rp)) = self.rows.get(&lm) else { break };
            let k = p - c;
            v = v.add_scaled(row, k);
            payload = payload.add_scaled(rp, k);
        }
        (v, payload)
    }

    /// Reduce every term, not only the head.
    pub fn reduce_full(&self, v: SparsePoly, payload: P) -> (SparsePoly, P) {
        let p = v.modulus().p();
        let (mut v, mut payload) = self.reduce(v, payload);
        let mut idx = 1;
        while idx < v.len() {
            let (e, c) = v.terms()[idx].clone();
            if let Some((row, rp)) = self.rows.get(&e) {
                let k = p - c;
                v = v.add_scaled(row, k);
                payload = payload.add_scaled(rp, k);
            } else {
                idx += 1;
            }
        }
        (v, payload)
    }

    /// Head reduction without touching payloads.
    pub fn remainder(&self, v: &SparsePoly) -> SparsePoly {
        let p = v.modulus().p();
        let mut v = v.clone();
        while let Some((lm, c)) = v.leading().map(|(e, c)| (e.clone(), *c)) {
            let Some((row, _)) = self.rows.get(&lm) else { break };
            v = v.add_scaled(row, p - c);
        }
        v
    }

    pub fn contains(&self, v: &SparsePoly) -> bool {
        self.remainder(v).is_zero()
    }

    pub fn insert(&mut self, v: SparsePoly, payload: P) -> Inserted<P> {
        let (v, payload) = self.reduce(v, payload);
        match v.leading().map(|(e, c)| (e.clone(), *c)) {
            None => Inserted::Dependent(payload),
            Some((lm, c)) => {
                let inv = inv_mod(c, v.modulus().p());
                self.rows.insert(lm, (v.scale(inv), payload.scale(inv)));
                Inserted::Added
            }
        }
    }
}

impl Echelon<()> {
    /// Insert without a payload; true when the row was new.
    pub fn push(&mut self, v: SparsePoly) -> bool {
        matches!(self.insert(v, ()), Inserted::Added)
    }
}

/// Kernel of a linear map given on a spanning set: `image_i = L(source_i)`.
/// Returns a basis of `{Σ c_i source_i : Σ c_i image_i = 0}`, each tagged
/// with its combined payload.
pub fn kernel<P: Payload>(items: impl IntoIterator<Item = (SparsePoly, P)>) -> Vec<P> {
    let mut ech = Echelon::new();
    let mut out = Vec::new();
    for (img, payload) in items {
        if let Inserted::Dependent(k) = ech.insert(img, payload) {
            out.push(k);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{Modulus, VarSet};
    use proptest::prelude::*;

    fn parse(p: u64, s: &str) -> SparsePoly {
        VarSet::parse_list("x,y,z").unwrap().parse_poly(s, Modulus::field(p).unwrap()).unwrap()
    }

    #[test]
    fn membership_and_rank() {
        let mut e = Echelon::new();
        assert!(e.push(parse(3, "x+y")));
        assert!(e.push(parse(3, "y+z")));
        assert!(!e.push(parse(3, "x+2z")));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&parse(3, "x+2y+z")));
        assert!(!e.contains(&parse(3, "x")));
    }

    #[test]
    fn dependent_payload_is_a_relation() {
        let gens = [parse(2, "x+y"), parse(2, "y+z"), parse(2, "x+z"), parse(2, "x")];
        let ker = kernel(gens.iter().enumerate().map(|(i, g)| (g.clone(), Combination::unit(2, i))));
        assert_eq!(ker.len(), 1);
        let rel = &ker[0];
        let mut s = SparsePoly::zero(gens[0].modulus(), 3);
        for (&i, &c) in &rel.coeffs {
            s = s.add_scaled(&gens[i], c);
        }
        assert!(s.is_zero());
        assert_eq!(rel.coeffs.keys().copied().collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn full_reduction_clears_pivots() {
        let mut e = Echelon::new();
        e.push(parse(5, "y"));
        e.push(parse(5, "z"));
        let (r, ()) = e.reduce_full(parse(5, "x+3y+z"), ());
        assert_eq!(r, parse(5, "x"));
    }

    proptest! {
        #[test]
        fn payload_tracks_combinations(cs in prop::collection::vec((0u32..3, 0u32..3, 0u32..3, 1u64..5), 1..12)) {
            let m = Modulus::field(5).unwrap();
            let gens: Vec<SparsePoly> = cs
                .chunks(2)
                .map(|ch| SparsePoly::from_terms(m, 3, ch.iter().map(|&(a, b, c, k)| (ExponentVector::new(&[a, b, c]), k))))
                .collect();
            let mut e = Echelon::new();
            for (i, g) in gens.iter().enumerate() {
                e.insert(g.clone(), Combination::unit(5, i));
            }
            for (row, comb) in e.rows() {
                let mut s = SparsePoly::zero(m, 3);
                for (&i, &c) in &comb.coeffs {
                    s = s.add_scaled(&gens[i], c);
                }
                prop_assert_eq!(&s, row);
            }
        }
    }
}
