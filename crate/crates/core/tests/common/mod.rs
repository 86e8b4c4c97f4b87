#![allow(dead_code)]

use qfsplit::polyring::{ExponentVector, Grading, Modulus, SparsePoly, VarSet};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn parse(p: u64, vars: &str, s: &str) -> SparsePoly {
    VarSet::parse_list(vars).unwrap().parse_poly(s, Modulus::field(p).unwrap()).unwrap()
}

/// A random nonzero form of total degree `d` in `n` variables.
pub fn random_form(rng: &mut ChaCha8Rng, p: u64, n: usize, d: u32, nterms: usize) -> SparsePoly {
    let m = Modulus::field(p).unwrap();
    let monos = Grading::standard(n).monomials_of_total_degree(d as u64);
    loop {
        let terms = (0..nterms).map(|_| (monos[rng.gen_range(0..monos.len())].clone(), rng.gen_range(1..p)));
        let f = SparsePoly::from_terms(m, n, terms);
        if !f.is_zero() {
            return f;
        }
    }
}

/// A random polynomial with zero constant term and total degree in `2..=maxdeg`.
pub fn random_local(rng: &mut ChaCha8Rng, p: u64, n: usize, maxdeg: u32, nterms: usize) -> SparsePoly {
    let m = Modulus::field(p).unwrap();
    loop {
        let terms = (0..nterms).map(|_| {
            let d = rng.gen_range(2..=maxdeg);
            let mut e = vec![0u32; n];
            for _ in 0..d {
                e[rng.gen_range(0..n)] += 1;
            }
            (ExponentVector::new(&e), rng.gen_range(1..p))
        });
        let f = SparsePoly::from_terms(m, n, terms);
        if !f.is_zero() {
            return f;
        }
    }
}
