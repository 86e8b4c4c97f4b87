//! Ideals represented by finite pieces of a fine grading.
//!
//! A [`FineGrading`] is an integer weight matrix `W` for which every input
//! polynomial is homogeneous. Pieces of an ideal are the spans of `x^α g`
//! with a fixed key `W·(α + deg g)`, optionally bounded by a filtration degree.

use std::collections::HashMap;
use std::rc::Rc;

use smallvec::SmallVec;

use crate::linalg::{Echelon, Payload};
use crate::polyring::{ExponentVector, SparsePoly};

pub type Key = SmallVec<[i64; 4]>;

/// Integer weights making a set of polynomials homogeneous.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FineGrading {
    nvars: usize,
    rows: Vec<Vec<i64>>,
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn normalize(row: &mut [i128]) {
    let g = row.iter().fold(0, |g, &v| gcd(g, v));
    if g > 1 {
        row.iter_mut().for_each(|v| *v /= g);
    }
}

/// Integer basis of `{w : A w = 0}`.
fn integer_nullspace(a: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(pr) = (row..m.len()).find(|&r| m[r][col] != 0) else { continue };
        m.swap(row, pr);
        for r in 0..m.len() {
            if r != row && m[r][col] != 0 {
                let (a, b) = (m[row][col], m[r][col]);
                let pivot_row = m[row].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot_row) {
                    *x = *x * a - *y * b;
                }
                normalize(&mut m[r]);
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivot_cols.contains(c)) {
        let l = pivots.iter().fold(1i128, |l, &(r, c)| {
            let v = m[r][c].abs();
            l / gcd(l, v) * v
        });
        let mut w = vec![0i128; ncols];
        w[free] = l;
        for &(r, c) in &pivots {
            w[c] = -m[r][free] * l / m[r][c];
        }
        normalize(&mut w);
        out.push(w.into_iter().map(|v| v as i64).collect());
    }
    out
}

impl FineGrading {
    /// The finest grading for which every polynomial in `polys` is homogeneous,
    /// followed by the `extra` rows (which must also make them homogeneous).
    pub fn for_polys<'a, I>(nvars: usize, polys: I, extra: &[Vec<i64>]) -> Self
    where
        I: IntoIterator<Item = &'a SparsePoly>,
    {
        let mut diffs = Vec::new();
        for a in polys {
            let mut it = a.terms().iter();
            let Some((e0, _)) = it.next() else { continue };
            for (e, _) in it {
                diffs.push(e.as_slice().iter().zip(e0.as_slice()).map(|(&x, &y)| x as i64 - y as i64).collect());
            }
        }
        let mut rows = integer_nullspace(&diffs, nvars);
        rows.extend(extra.iter().cloned());
        FineGrading { nvars, rows }
    }

    pub fn trivial(nvars: usize) -> Self {
        FineGrading { nvars, rows: Vec::new() }
    }

    pub fn from_rows(nvars: usize, rows: Vec<Vec<i64>>) -> Self {
        assert!(rows.iter().all(|r| r.len() == nvars));
        FineGrading { nvars, rows }
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn key(&self, e: &ExponentVector) -> Key {
        self.rows.iter().map(|w| w.iter().zip(e.as_slice()).map(|(a, &b)| a * b as i64).sum()).collect()
    }

    /// Key of a homogeneous polynomial (`None` for zero or inhomogeneous input).
    pub fn key_of(&self, a: &SparsePoly) -> Option<Key> {
        let mut it = a.terms().iter();
        let k = self.key(&it.next()?.0);
        it.all(|(e, _)| self.key(e) == k).then_some(k)
    }

    /// Split into homogeneous pieces.
    pub fn split(&self, a: &SparsePoly) -> HashMap<Key, SparsePoly> {
        let mut parts: HashMap<Key, Vec<(ExponentVector, u64)>> = HashMap::new();
        for (e, c) in a.terms() {
            parts.entry(self.key(e)).or_default().push((e.clone(), *c));
        }
        parts.into_iter().map(|(k, t)| (k, SparsePoly::from_terms(a.modulus(), a.nvars(), t))).collect()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
}

pub fn key_add(a: &Key, b: &Key) -> Key {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn key_sub(a: &Key, b: &Key) -> Key {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn key_scale(a: &Key, k: i64) -> Key {
    a.iter().map(|x| x * k).collect()
}

/// `(a - b) / p` when exact componentwise.
pub fn key_div(a: &Key, p: i64) -> Option<Key> {
    a.iter().map(|&x| (x % p == 0).then_some(x / p)).collect()
}

/// All monomials with filtration degree `t·m <= bound`, bucketed by key.
#[derive(Debug)]
pub struct MonomialIndex {
    grading: FineGrading,
    weights: Vec<u64>,
    bound: u64,
    buckets: HashMap<Key, Vec<(ExponentVector, u64)>>,
}

impl MonomialIndex {
    pub fn new(grading: FineGrading, weights: Vec<u64>, bound: u64) -> Self {
        assert_eq!(weights.len(), grading.nvars());
        assert!(weights.iter().all(|&w| w > 0));
        let n = weights.len();
        let mut buckets: HashMap<Key, Vec<(ExponentVector, u64)>> = HashMap::new();
        let mut cur = vec![0u32; n];
        fn rec(
            i: usize,
            used: u64,
            bound: u64,
            w: &[u64],
            cur: &mut Vec<u32>,
            g: &FineGrading,
            out: &mut HashMap<Key, Vec<(ExponentVector, u64)>>,
        ) {
            if i == w.len() {
                let e = ExponentVector::new(cur);
                out.entry(g.key(&e)).or_default().push((e, used));
                return;
            }
            let mut k = 0u32;
            while used + k as u64 * w[i] <= bound {
                cur[i] = k;
                rec(i + 1, used + k as u64 * w[i], bound, w, cur, g, out);
                k += 1;
            }
            cur[i] = 0;
        }
        rec(0, 0, bound, &weights, &mut cur, &grading, &mut buckets);
        MonomialIndex { grading, weights, bound, buckets }
    }

    pub fn grading(&self) -> &FineGrading {
        &self.grading
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Monomials of the given key with their filtration degree.
    pub fn with_key(&self, k: &Key) -> &[(ExponentVector, u64)] {
        self.buckets.get(k).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn keys(&self) -> impl Iterator<Item = &Key> {
        self.buckets.keys()
    }

    pub fn filtration(&self, e: &ExponentVector) -> u64 {
        e.as_slice().iter().zip(&self.weights).map(|(&a, &w)| a as u64 * w).sum()
    }

    /// Largest filtration degree among the terms.
    pub fn filtration_of(&self, a: &SparsePoly) -> u64 {
        a.terms().iter().map(|(e, _)| self.filtration(e)).max().unwrap_or(0)
    }
}

/// Builds the payload for the row `x^α · gens[l]`.
pub type RowTag<P> = Rc<dyn Fn(&ExponentVector, usize) -> P>;

/// Pieces of the ideal `(gens)`, each the span of `x^α g` of filtration
/// degree at most `cap`, built on demand.
pub struct IdealSpan<P: Payload> {
    gens: Vec<SparsePoly>,
    gen_keys: Vec<Key>,
    gen_filt: Vec<u64>,
    index: Rc<MonomialIndex>,
    cap: u64,
    tag: RowTag<P>,
    pieces: HashMap<Key, Echelon<P>>,
}

impl<P: Payload> IdealSpan<P> {
    /// Every generator must be homogeneous for the index's grading.
    pub fn new(gens: Vec<SparsePoly>, index: Rc<MonomialIndex>, cap: u64, tag: RowTag<P>) -> Self {
        let gens: Vec<SparsePoly> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        let gen_keys = gens.iter().map(|g| index.grading().key_of(g).expect("generator homogeneous for the fine grading")).collect();
        let gen_filt = gens.iter().map(|g| index.filtration_of(g)).collect();
        let cap = cap.min(index.bound());
        IdealSpan { gens, gen_keys, gen_filt, index, cap, tag, pieces: HashMap::new() }
    }

    pub fn gens(&self) -> &[SparsePoly] {
        &self.gens
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn piece(&mut self, k: &Key) -> &Echelon<P> {
        if !self.pieces.contains_key(k) {
            let mut ech = Echelon::new();
            for (l, g) in self.gens.iter().enumerate() {
                let want = key_sub(k, &self.gen_keys[l]);
                for (alpha, t) in self.index.with_key(&want) {
                    if t + self.gen_filt[l] <= self.cap {
                        let row = g.mul_term(alpha, 1);
                        ech.insert(row, (self.tag)(alpha, l));
                    }
                }
            }
            self.pieces.insert(k.clone(), ech);
        }
        &self.pieces[k]
    }

    /// Reduce a homogeneous element against its piece; the payload of a
    /// zero remainder expresses `-a` (so negate it for cofactors of `a`).
    pub fn reduce(&mut self, a: &SparsePoly, zero: P) -> Option<(SparsePoly, P)> {
        let k = self.index.grading().key_of(a)?;
        Some(self.piece(&k).reduce(a.clone(), zero))
    }

    /// Membership, piece by piece.
    pub fn contains(&mut self, a: &SparsePoly) -> bool {
        let parts = self.index.grading().split(a);
        parts.iter().all(|(k, part)| self.piece(k).contains(part))
    }
}

/// Cofactor payload: entry `l` multiplies generator `l`.
pub fn cofactor_tag(template: &SparsePoly, ngens: usize) -> RowTag<Vec<SparsePoly>> {
    let (m, n) = (template.modulus(), template.nvars());
    Rc::new(move |alpha: &ExponentVector, l: usize| {
        let mut v = vec![SparsePoly::zero(m, n); ngens];
        v[l] = SparsePoly::monomial(m, alpha.clone(), 1);
        v
    })
}

pub fn unit_tag() -> RowTag<()> {
    Rc::new(|_: &ExponentVector, _: usize| ())
}

/// Cofactors `c` with `a = Σ c_l gens_l`, searched up to the span's cap.
pub fn cofactors(span: &mut IdealSpan<Vec<SparsePoly>>, a: &SparsePoly) -> Option<Vec<SparsePoly>> {
    let m = a.modulus();
    let ngens = span.gens().len();
    let mut total = vec![SparsePoly::zero(m, a.nvars()); ngens];
    let parts = span.index.grading().split(a);
    for (k, part) in parts {
        let zero = vec![SparsePoly::zero(m, a.nvars()); ngens];
        let (rem, pay) = span.piece(&k).reduce(part, zero);
        if !rem.is_zero() {
            return None;
        }
        for (t, c) in total.iter_mut().zip(&pay) {
            *t = t.sub(c);
        }
    }
    Some(total)
}

/// `{f^{s-1}} ∪ {f_j^s}` with `f = Π f_j`, generators of `(I^{[s]} : I)`
/// for a regular sequence.
pub fn colon_bracket(gens: &[SparsePoly], s: u64) -> Vec<SparsePoly> {
    assert!(s >= 1 && !gens.is_empty());
    let f = gens.iter().skip(1).fold(gens[0].clone(), |acc, g| acc.mul(g));
    let mut out = vec![f.pow(s - 1)];
    out.extend(gens.iter().map(|g| if g.modulus().is_field() && s == g.modulus().p() { g.frobenius(1) } else { g.pow(s) }));
    out
}
