//! Representatives of `Δ₁` and `Δ_n`, well defined modulo `p`-th powers.
//!
//! The production route lifts termwise to `Z/p²`: with `L` the lift and
//! `P = Σ (lift c_i)^p x^{p m_i}`, every coefficient of `L^p - P` is
//! divisible by `p` and `Δ₁(a) = (L^p - P)/p mod p`.

use crate::polyring::{Accumulator, Grading, SparsePoly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeltaError {
    #[error("internal error: L^p - P has a coefficient not divisible by p")]
    Divisibility,
    #[error("multinomial expansion needs {0} compositions, above the guard of 1000000")]
    Guard(u128),
    #[error("multinomial expansion supports p <= 31, got {0}")]
    PrimeTooLarge(u64),
}

/// A chosen representative of a class in `S/F(S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaRepresentative {
    pub value: SparsePoly,
}

impl DeltaRepresentative {
    /// Degree of the representative, when homogeneous.
    pub fn homogeneous_degree(&self, g: &Grading) -> Option<Vec<u64>> {
        g.degree(&self.value).homogeneous().map(|d| d.to_vec())
    }
}

/// `Δ₁(a)` via the mod-`p²` lift identity.
pub fn delta1(a: &SparsePoly) -> Result<DeltaRepresentative, DeltaError> {
    assert!(a.modulus().is_field());
    let p = a.modulus().p();
    let lift = a.lift_terms(2);
    let m2 = lift.modulus();
    let lp = lift.pow(p);
    let mut acc = Accumulator::default();
    for (e, c) in lift.terms() {
        acc.insert(e.scale(p as u32), m2.pow(*c, p));
    }
    let powers = SparsePoly::from_accumulator(m2, a.nvars(), acc);
    let diff = lp.sub(&powers);
    let value = diff.divide_by_p_power(1).ok_or(DeltaError::Divisibility)?;
    Ok(DeltaRepresentative { value })
}

/// Same as [`delta1`] but with every lifted coefficient shifted by `p`.
/// Used to check that the result does not depend on the lift.
pub fn delta1_with_shifted_lift(a: &SparsePoly) -> Result<DeltaRepresentative, DeltaError> {
    let p = a.modulus().p();
    let lift = a.lift_terms(2);
    let m2 = lift.modulus();
    let shifted = SparsePoly::from_terms(m2, a.nvars(), lift.terms().iter().map(|(e, c)| (e.clone(), c + p)));
    let lp = shifted.pow(p);
    let powers = SparsePoly::from_terms(m2, a.nvars(), shifted.terms().iter().map(|(e, c)| (e.scale(p as u32), m2.pow(*c, p))));
    let value = lp.sub(&powers).divide_by_p_power(1).ok_or(DeltaError::Divisibility)?;
    Ok(DeltaRepresentative { value })
}

const COMPOSITION_GUARD: u128 = 1_000_000;

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of `(α_1..α_m)` with `0 <= α_i <= p-1` and `Σ α_i = p`.
fn composition_count(m: usize, p: u64) -> u128 {
    // Inclusion-exclusion over parts that reach p; at most one part can.
    let p = p as u128;
    let m = m as u128;
    if m == 0 {
        return 0;
    }
    binomial(p + m - 1, m - 1) - m
}

/// `Δ₁(a)` from the multinomial sum
/// `Σ (1/p) binom(p; α) Π (c_i M_i)^{α_i}` over `0 <= α_i <= p-1`, `Σ α_i = p`.
pub fn delta1_multinomial(a: &SparsePoly) -> Result<DeltaRepresentative, DeltaError> {
    assert!(a.modulus().is_field());
    let p = a.modulus().p();
    if p > 31 {
        return Err(DeltaError::PrimeTooLarge(p));
    }
    let terms: Vec<SparsePoly> = a.terms().iter().map(|(e, c)| SparsePoly::monomial(a.modulus(), e.clone(), *c)).collect();
    let count = composition_count(terms.len(), p);
    if count > COMPOSITION_GUARD {
        return Err(DeltaError::Guard(count));
    }
    let fact: Vec<u128> = (0..=p as u128)
        .scan(1u128, |acc, i| {
            if i > 0 {
                *acc *= i;
            }
            Some(*acc)
        })
        .collect();
    // powers[i][k] = (c_i M_i)^k
    let powers: Vec<Vec<SparsePoly>> = terms
        .iter()
        .map(|t| {
            (0..p)
                .scan(SparsePoly::one(a.modulus(), a.nvars()), |acc, k| {
                    if k > 0 {
                        *acc = acc.mul(t);
                    }
                    Some(acc.clone())
                })
                .collect()
        })
        .collect();
    let mut total = SparsePoly::zero(a.modulus(), a.nvars());
    let mut alpha = vec![0u64; terms.len()];
    fn rec(i: usize, left: u64, p: u64, alpha: &mut Vec<u64>, fact: &[u128], powers: &[Vec<SparsePoly>], total: &mut SparsePoly) {
        if i == alpha.len() {
            if left != 0 {
                return;
            }
            let denom: u128 = alpha.iter().map(|&k| fact[k as usize]).product();
            let coeff = fact[p as usize] / denom / p as u128;
            let c = (coeff % p as u128) as u64;
            if c == 0 {
                return;
            }
            let mut prod = SparsePoly::one(total.modulus(), total.nvars());
            for (k, pw) in alpha.iter().zip(powers) {
                if *k > 0 {
                    prod = prod.mul(&pw[*k as usize]);
                }
            }
            *total = total.add_scaled(&prod, c);
            return;
        }
        let remaining_slots = (alpha.len() - i - 1) as u64;
        for k in 0..=left.min(p - 1) {
            if left - k > remaining_slots * (p - 1) {
                continue;
            }
            alpha[i] = k;
            rec(i + 1, left - k, p, alpha, fact, powers, total);
        }
        alpha[i] = 0;
    }
    rec(0, p, p, &mut alpha, &fact, &powers, &mut total);
    Ok(DeltaRepresentative { value: total })
}

/// `a^{p^n - p} · Δ₁(a)`, a representative of `Δ_n(a)`.
pub fn delta_n_rep(a: &SparsePoly, n: u32) -> Result<DeltaRepresentative, DeltaError> {
    assert!(n >= 1);
    let d1 = delta1(a)?;
    if n == 1 {
        return Ok(d1);
    }
    let p = a.modulus().p();
    let value = a.pow(p.pow(n) - p).mul(&d1.value);
    Ok(DeltaRepresentative { value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::mod_frobenius;
    use crate::polyring::{ExponentVector, Modulus, VarSet};
    use proptest::prelude::*;

    fn parse(p: u64, vars: &str, s: &str) -> SparsePoly {
        VarSet::parse_list(vars).unwrap().parse_poly(s, Modulus::field(p).unwrap()).unwrap()
    }

    #[test]
    fn worked_values() {
        let f = parse(2, "x,y,z", "x^3+y^3+z^3");
        assert_eq!(delta1(&f).unwrap().value, parse(2, "x,y,z", "x^3y^3+x^3z^3+y^3z^3"));
        let g = parse(2, "x,y,z", "x^2+y^3+z^5");
        assert_eq!(delta1(&g).unwrap().value, parse(2, "x,y,z", "x^2y^3+x^2z^5+y^3z^5"));
        for n in 2..=8 {
            let h = parse(2, "x,y,z", &format!("z^2+x^2y+xy^{n}"));
            let want = parse(2, "x,y,z", &format!("x^2yz^2+xy^{n}z^2+x^3y^{}", n + 1));
            assert_eq!(delta1(&h).unwrap().value, want, "n = {n}");
        }
        assert!(delta1(&parse(5, "x,y", "3x^2y")).unwrap().value.is_zero());
    }

    #[test]
    fn multinomial_values() {
        assert_eq!(delta1_multinomial(&parse(2, "x,y", "x+y")).unwrap().value, parse(2, "x,y", "xy"));
        let want = parse(3, "x,y,z", "x^2y+x^2z+xy^2+y^2z+xz^2+yz^2+2xyz");
        assert_eq!(delta1_multinomial(&parse(3, "x,y,z", "x+y+z")).unwrap().value, want);
        assert_eq!(delta1(&parse(3, "x,y,z", "x+y+z")).unwrap().value, want);
        assert_eq!(composition_count(3, 3), 7);
        assert_eq!(composition_count(2, 2), 1);
    }

    #[test]
    fn multinomial_guard() {
        let vars = "a,b,c,d,e,f,g,h,i,j,k,l";
        let a = parse(13, vars, "a+b+c+d+e+f+g+h+i+j+k+l");
        assert!(matches!(delta1_multinomial(&a), Err(DeltaError::Guard(_))));
    }

    #[test]
    fn delta_n_examples() {
        let f = parse(2, "x,y,z", "x^3+y^3+z^3");
        assert_eq!(delta_n_rep(&f, 1).unwrap(), delta1(&f).unwrap());
        let want = f.pow(2).mul(&delta1(&f).unwrap().value);
        assert_eq!(delta_n_rep(&f, 2).unwrap().value, want);
        assert_eq!(want.total_degree(), Some(12));
    }

    #[test]
    fn homogeneous_degree() {
        let g = Grading::weighted(&[1, 1, 1, 2]).unwrap();
        let f = parse(3, "x,y,z,w", "w^2+x^2yz+xy^2z+xyz^2");
        assert_eq!(delta1(&f).unwrap().homogeneous_degree(&g), Some(vec![12]));
    }

    /// `Σ_{0<i<p} (1/p) binom(p, i) a^i b^{p-i}`, the first Witt carry of `a + b`.
    fn carry(a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
        let p = a.modulus().p();
        let mut out = SparsePoly::zero(a.modulus(), a.nvars());
        for i in 1..p {
            let c = (binomial(p as u128, i as u128) / p as u128 % p as u128) as u64;
            out = out.add_scaled(&a.pow(i).mul(&b.pow(p - i)), c);
        }
        out
    }

    fn arb(p: u64, nterms: usize) -> impl Strategy<Value = SparsePoly> {
        prop::collection::vec((prop::collection::vec(0u32..4, 3), 1u64..p), 1..=nterms).prop_map(move |ts| {
            SparsePoly::from_terms(Modulus::field(p).unwrap(), 3, ts.into_iter().map(|(e, c)| (ExponentVector::new(&e), c)))
        })
    }

    fn arb_small() -> impl Strategy<Value = (SparsePoly, SparsePoly)> {
        prop_oneof![Just(2u64), Just(3), Just(5)].prop_flat_map(|p| (arb(p, 5), arb(p, 4)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(600))]

        #[test]
        fn production_matches_multinomial((a, _b) in arb_small()) {
            let x = delta1(&a).unwrap().value;
            let y = delta1_multinomial(&a).unwrap().value;
            prop_assert_eq!(mod_frobenius(&x), mod_frobenius(&y));
        }

        #[test]
        fn leibniz((a, b) in arb_small()) {
            let p = a.modulus().p();
            let lhs = delta1(&a.mul(&b)).unwrap().value;
            let rhs = a.pow(p).mul(&delta1(&b).unwrap().value).add(&b.pow(p).mul(&delta1(&a).unwrap().value));
            prop_assert_eq!(mod_frobenius(&lhs), mod_frobenius(&rhs));
        }

        #[test]
        fn pth_power_absorption((a, g) in arb_small()) {
            let p = a.modulus().p();
            let gp = g.pow(p);
            // Pure p-th powers carry nothing.
            prop_assert!(mod_frobenius(&delta1(&gp).unwrap().value).is_zero());
            // Witt-level absorption: [a + g^p] = [a] + [g^p] + V(-carry), so the
            // first component of Δ_W([a] + [g^p]) is Δ₁(a + g^p) minus the carry.
            let lhs = delta1(&a.add(&gp)).unwrap().value.sub(&carry(&a, &gp));
            prop_assert_eq!(mod_frobenius(&lhs), mod_frobenius(&delta1(&a).unwrap().value));
            prop_assert_eq!(mod_frobenius(&delta1(&gp.mul(&a)).unwrap().value),
                mod_frobenius(&gp.pow(p).mul(&delta1(&a).unwrap().value)));
        }

        #[test]
        fn lift_independence((a, _b) in arb_small()) {
            prop_assert_eq!(delta1(&a).unwrap(), delta1_with_shifted_lift(&a).unwrap());
        }

        #[test]
        fn homogeneity((a, _b) in arb_small()) {
            let g = Grading::standard(3);
            let h = a.retain(|e, _| e.total() == 4);
            let d = delta1(&h).unwrap();
            if !d.value.is_zero() {
                let p = a.modulus().p();
                prop_assert_eq!(d.homogeneous_degree(&g), Some(vec![4 * p]));
            }
        }
    }
}
