//! Heights of Calabi-Yau hypersurfaces: `f` homogeneous with `deg f = μ`.
//!
//! The orbit `g_1 = f^{p-1}`, `g_{i+1} = θ(g_i)` lives in the finite slice of
//! degree `(p-1)μ`, so it either leaves `ker u` or revisits a state.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::delta::{delta1, DeltaError};
use crate::frobenius::{u_top, UProduct};
use crate::polyring::{ExponentVector, Grading, Modulus, SparsePoly, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CyError {
    #[error("coefficients must lie in a prime field F_p; larger perfect fields give the same height after base change")]
    NotPrimeField,
    #[error("f is not homogeneous for the given weights")]
    NotHomogeneous,
    #[error("deg f = {deg:?} differs from the weight sum {mu:?}; use the complete-intersection engine")]
    DegreeMismatch { deg: Vec<u64>, mu: Vec<u64> },
    #[error("grading has {0} variables but f has {1}")]
    Arity(usize, usize),
    #[error("f is zero")]
    Zero,
    #[error("n_max = {0} is above the oracle guard of 5")]
    OracleGuard(u32),
    #[error(transparent)]
    Delta(#[from] DeltaError),
}

/// `θ(a) = u(Δ₁(f^{p-1}) · a)`.
///
/// On `ker u` this equals `(p-1) f^{p-2} u(Δ₁(f) · a)`, since
/// `Δ₁(f^{p-1}) ≡ (p-1) f^{p(p-2)} Δ₁(f)` modulo `p`-th powers.
#[derive(Debug)]
pub struct ThetaOperator {
    f: SparsePoly,
    grading: Grading,
    f_pm2: SparsePoly,
    delta_f: UProduct,
    full: OnceLock<(SparsePoly, UProduct)>,
}

impl ThetaOperator {
    pub fn new(f: &SparsePoly, grading: &Grading) -> Result<Self, CyError> {
        if !f.modulus().is_field() {
            return Err(CyError::NotPrimeField);
        }
        let p = f.modulus().p();
        let d = delta1(f)?.value;
        Ok(ThetaOperator {
            f: f.clone(),
            grading: grading.clone(),
            f_pm2: f.pow(p - 2).scale(p - 1),
            delta_f: UProduct::new(&d),
            full: OnceLock::new(),
        })
    }

    pub fn f(&self) -> &SparsePoly {
        &self.f
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    fn full(&self) -> &(SparsePoly, UProduct) {
        self.full.get_or_init(|| {
            let p = self.f.modulus().p();
            let d = delta1(&self.f.pow(p - 1)).expect("lift is exact").value;
            let u = UProduct::new(&d);
            (d, u)
        })
    }

    /// The representative `Δ₁(f^{p-1})`, computed on first use.
    pub fn delta_rep(&self) -> &SparsePoly {
        &self.full().0
    }

    /// `u(Δ₁(f^{p-1}) · a)` for any `a`.
    pub fn theta(&self, a: &SparsePoly) -> SparsePoly {
        self.full().1.apply(a)
    }

    /// The factored form; agrees with [`theta`](Self::theta) when `u(a) = 0`.
    pub fn theta_kernel(&self, a: &SparsePoly) -> SparsePoly {
        self.f_pm2.mul(&self.delta_f.apply(a))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CyVerdict {
    Finite {
        height: u32,
    },
    /// `g_{start+len} = g_start`, 1-based, with every `u(g_i)` zero.
    Infinite {
        cycle_start: usize,
        cycle_len: usize,
    },
    LowerBoundAtCap {
        at_least: u32,
        max_iter: u32,
    },
}

#[derive(Clone, Debug)]
pub struct CyHeightResult {
    pub verdict: CyVerdict,
    /// `g_1, g_2, ...` up to the deciding element.
    pub chain: Vec<SparsePoly>,
}

impl CyHeightResult {
    pub fn finite(&self) -> Option<u32> {
        match self.verdict {
            CyVerdict::Finite { height } => Some(height),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.verdict, CyVerdict::Infinite { .. })
    }
}

/// Checks the Calabi-Yau hypotheses and returns the common degree.
pub fn check_cy(f: &SparsePoly, g: &Grading) -> Result<Vec<u64>, CyError> {
    if !f.modulus().is_field() {
        return Err(CyError::NotPrimeField);
    }
    if g.nvars() != f.nvars() {
        return Err(CyError::Arity(g.nvars(), f.nvars()));
    }
    if f.is_zero() {
        return Err(CyError::Zero);
    }
    let deg = g.degree(f).homogeneous().map(|d| d.to_vec()).ok_or(CyError::NotHomogeneous)?;
    let mu = g.mu();
    if deg != mu {
        return Err(CyError::DegreeMismatch { deg, mu });
    }
    Ok(deg)
}

/// Iterate `θ` from `f^{p-1}` until the `u`-image is nonzero or a state repeats.
pub fn cy_height(f: &SparsePoly, g: &Grading, max_iter: Option<u32>) -> Result<CyHeightResult, CyError> {
    check_cy(f, g)?;
    let op = ThetaOperator::new(f, g)?;
    Ok(cy_height_with(&op, max_iter))
}

pub fn cy_height_with(op: &ThetaOperator, max_iter: Option<u32>) -> CyHeightResult {
    let p = op.f.modulus().p();
    let mut cur = op.f.pow(p - 1);
    let mut seen: HashMap<SparsePoly, usize> = HashMap::new();
    let mut chain = Vec::new();
    loop {
        let i = chain.len() + 1;
        chain.push(cur.clone());
        if !u_top(&cur).is_zero() {
            return CyHeightResult { verdict: CyVerdict::Finite { height: i as u32 }, chain };
        }
        if let Some(&j) = seen.get(&cur) {
            chain.pop();
            return CyHeightResult { verdict: CyVerdict::Infinite { cycle_start: j, cycle_len: i - j }, chain };
        }
        if max_iter.is_some_and(|m| i as u32 >= m) {
            return CyHeightResult { verdict: CyVerdict::LowerBoundAtCap { at_least: i as u32 + 1, max_iter: i as u32 }, chain };
        }
        let next = op.theta_kernel(&cur);
        seen.insert(cur, i);
        cur = next;
    }
}

/// For `n = 1..=n_max`: is the coefficient of `(x_1⋯x_N)^{p^n-1}` in
/// `f_n = f^{p-1} Δ₁(f^{p-1})^{1+p+⋯+p^{n-2}}` nonzero?
pub fn cy_height_fn_oracle(f: &SparsePoly, g: &Grading, n_max: u32) -> Result<Vec<bool>, CyError> {
    if n_max > 5 {
        return Err(CyError::OracleGuard(n_max));
    }
    check_cy(f, g)?;
    let p = f.modulus().p();
    let fp1 = f.pow(p - 1);
    let d = if n_max >= 2 { delta1(&fp1)?.value } else { SparsePoly::zero(f.modulus(), f.nvars()) };
    let n = f.nvars();
    let mut out = Vec::new();
    for k in 1..=n_max {
        let q = p.pow(k) as u32;
        let bound = q - 1;
        let keep = |e: &ExponentVector| e.all_at_most(bound);
        let mut acc = fp1.retain(|e, _| keep(e));
        for i in 0..k.saturating_sub(1) {
            let factor = d.frobenius(i).retain(|e, _| keep(e));
            acc = acc.mul_filtered(&factor, keep);
        }
        out.push(acc.coeff(&ExponentVector::constant(n, bound)) != 0);
    }
    Ok(out)
}

/// `1` when `p ≡ 1 mod N`, otherwise `∞` (`None`), for `N >= 4`.
pub fn fermat_height(n: u32, p: u64) -> Option<u32> {
    assert!(n >= 4, "the rule needs N >= 4");
    (p % n as u64 == 1).then_some(1)
}

/// `x_1^N + ⋯ + x_N^N` over `F_p`.
pub fn fermat_poly(n: usize, p: u64) -> SparsePoly {
    let m = Modulus::field(p).expect("prime");
    let terms = (0..n).map(|i| (ExponentVector::unit(n, i).scale(n as u32), 1));
    SparsePoly::from_terms(m, n, terms)
}

/// The `p = 2` family of height `2h` in `N = 2^h + 1` variables
/// `a, b, c, x1, ..., x_{N-3}`.
///
/// `g = c² x_1⋯x_{N-3} + Σ_{i=1}^{h-1} Π_{j=N_i}^{N_{i-1}-1} x_j^{2^i}` with
/// `N_0 = N - 2` and block lengths `N_{i-1} - N_i = 2^{h-i}`, so each block
/// has degree `2^h`.
pub fn unbounded_family_p2(h: u32) -> (SparsePoly, VarSet) {
    assert!(h >= 1);
    let n = (1usize << h) + 1;
    let mut names = vec!["a".to_string(), "b".to_string(), "c".to_string()];
    names.extend((1..=n - 3).map(|i| format!("x{i}")));
    let vars = VarSet::new(&names).expect("valid names");
    let m = Modulus::field(2).expect("prime");
    let x = |j: usize| 2 + j; // index of x_j
    let mut f = SparsePoly::zero(m, n);
    for i in 0..n {
        f = f.add(&SparsePoly::monomial(m, ExponentVector::unit(n, i).scale(n as u32), 1));
    }
    if h >= 2 {
        let mut e = vec![0u32; n];
        e[2] = 2;
        for j in 1..=n - 3 {
            e[x(j)] = 1;
        }
        let mut g = SparsePoly::monomial(m, ExponentVector::new(&e), 1);
        let mut upper = n - 2; // N_0
        for i in 1..h {
            let lower = upper - (1usize << (h - i));
            let mut e = vec![0u32; n];
            for j in lower..upper {
                e[x(j)] = 1 << i;
            }
            g = g.add(&SparsePoly::monomial(m, ExponentVector::new(&e), 1));
            upper = lower;
        }
        debug_assert_eq!(upper, 1);
        let bc = SparsePoly::var(m, n, 1).add(&SparsePoly::var(m, n, 2));
        f = f.add(&bc.mul(&g));
    }
    (f, vars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::in_ker_u;
    use proptest::prelude::*;

    fn parse(p: u64, vars: &str, s: &str) -> SparsePoly {
        VarSet::parse_list(vars).unwrap().parse_poly(s, Modulus::field(p).unwrap()).unwrap()
    }

    #[test]
    fn theta_of_cubic() {
        let f = parse(2, "x,y,z", "x^3+y^3+z^3");
        let op = ThetaOperator::new(&f, &Grading::standard(3)).unwrap();
        // Brute force: u of the full degree-9 product f·Δ₁(f).
        let d = delta1(&f).unwrap().value;
        assert_eq!(u_top(&f.mul(&d)), parse(2, "x,y,z", "xyz"));
        assert_eq!(op.theta(&f), parse(2, "x,y,z", "xyz"));
        assert_eq!(op.theta_kernel(&f), parse(2, "x,y,z", "xyz"));
        assert!(op.theta(&SparsePoly::zero(f.modulus(), 3)).is_zero());
    }

    #[test]
    fn small_heights() {
        let s3 = Grading::standard(3);
        let r = cy_height(&parse(2, "x,y,z", "x^3+y^3+z^3"), &s3, None).unwrap();
        assert_eq!(r.finite(), Some(2));
        assert_eq!(r.chain, vec![parse(2, "x,y,z", "x^3+y^3+z^3"), parse(2, "x,y,z", "xyz")]);
        assert_eq!(cy_height(&parse(2, "x,y,z", "xyz"), &s3, None).unwrap().finite(), Some(1));
        let s4 = Grading::standard(4);
        let k3 = cy_height(&parse(3, "x,y,z,w", "x^4+y^4+z^4+w^4"), &s4, None).unwrap();
        assert!(k3.is_infinite());
        let r2 = cy_height(&parse(3, "x,y,z,w", "x^4+2y^4+2z^4+2w^4+xyz^2"), &s4, None).unwrap();
        assert_eq!(r2.finite(), Some(2));
    }

    #[test]
    fn input_errors() {
        let s3 = Grading::standard(3);
        assert!(matches!(cy_height(&parse(2, "x,y,z", "x^2+y^3"), &s3, None), Err(CyError::NotHomogeneous)));
        assert!(matches!(cy_height(&parse(2, "x,y,z", "x^2+y^2"), &s3, None), Err(CyError::DegreeMismatch { .. })));
        let lifted = parse(2, "x,y,z", "xyz").lift_terms(2);
        assert!(matches!(cy_height(&lifted, &s3, None), Err(CyError::NotPrimeField)));
    }

    #[test]
    fn cap_gives_lower_bound() {
        let f = parse(3, "x,y,z,w", "x^4+y^4+z^4+w^4");
        let r = cy_height(&f, &Grading::standard(4), Some(1)).unwrap();
        assert_eq!(r.verdict, CyVerdict::LowerBoundAtCap { at_least: 2, max_iter: 1 });
    }

    #[test]
    fn fn_oracle_values() {
        let s3 = Grading::standard(3);
        assert_eq!(cy_height_fn_oracle(&parse(2, "x,y,z", "x^3+y^3+z^3"), &s3, 2).unwrap(), vec![false, true]);
        assert_eq!(cy_height_fn_oracle(&parse(2, "x,y,z", "xyz"), &s3, 1).unwrap(), vec![true]);
        let q = parse(3, "x,y,z,w", "x^4+y^4+z^4+w^4");
        assert_eq!(cy_height_fn_oracle(&q, &Grading::standard(4), 2).unwrap(), vec![false, false]);
        assert!(cy_height_fn_oracle(&q, &Grading::standard(4), 6).is_err());
    }

    #[test]
    fn fermat_rule() {
        assert_eq!(fermat_height(4, 5), Some(1));
        assert_eq!(fermat_height(4, 3), None);
        assert_eq!(fermat_height(6, 7), Some(1));
        let f = fermat_poly(4, 5);
        assert_eq!(cy_height(&f, &Grading::standard(4), None).unwrap().finite(), Some(1));
    }

    #[test]
    fn unbounded_family_shape() {
        let (f1, v1) = unbounded_family_p2(1);
        assert_eq!(v1.format(&f1), "a^3 + b^3 + c^3");
        let (f2, v2) = unbounded_family_p2(2);
        let want = v2.parse_poly("a^5+b^5+c^5+x1^5+x2^5+(b+c)", Modulus::field(2).unwrap());
        assert!(want.is_err());
        let g = v2.parse_poly("c^2x1x2+x1^2x2^2", Modulus::field(2).unwrap()).unwrap();
        let bc = v2.parse_poly("b+c", Modulus::field(2).unwrap()).unwrap();
        let base = v2.parse_poly("a^5+b^5+c^5+x1^5+x2^5", Modulus::field(2).unwrap()).unwrap();
        assert_eq!(f2, base.add(&bc.mul(&g)));
        let (f3, v3) = unbounded_family_p2(3);
        let g3 = v3.parse_poly("c^2x1x2x3x4x5x6+x3^2x4^2x5^2x6^2+x1^4x2^4", Modulus::field(2).unwrap()).unwrap();
        let bc3 = v3.parse_poly("b+c", Modulus::field(2).unwrap()).unwrap();
        assert_eq!(f3.sub(&bc3.mul(&g3)), fermat_poly(9, 2));
        for (h, f) in [(1, &f1), (2, &f2), (3, &f3)] {
            assert_eq!(Grading::standard(f.nvars()).total_degree(f), Some((1 << h) + 1));
        }
    }

    #[test]
    fn unbounded_family_small_heights() {
        for h in 1..=2 {
            let (f, _) = unbounded_family_p2(h);
            let r = cy_height(&f, &Grading::standard(f.nvars()), None).unwrap();
            assert_eq!(r.finite(), Some(2 * h), "h = {h}");
        }
    }

    fn arb_form(p: u64) -> impl Strategy<Value = SparsePoly> {
        prop::collection::vec((0u32..4, 0u32..4, 0u64..p), 1..8).prop_map(move |ts| {
            let m = Modulus::field(p).unwrap();
            // Degree-(p-1)μ forms in three variables, μ = 3.
            let d = 3 * (p as u32 - 1);
            SparsePoly::from_terms(
                m,
                3,
                ts.into_iter().filter(|(a, b, _)| a + b <= d).map(|(a, b, c)| (ExponentVector::new(&[a, b, d - a - b]), c)),
            )
        })
    }

    proptest! {
        #[test]
        fn theta_is_linear(a in arb_form(3), b in arb_form(3), c in 0u64..3) {
            let f = parse(3, "x,y,z", "x^3+y^3+z^3+2xyz");
            let op = ThetaOperator::new(&f, &Grading::standard(3)).unwrap();
            prop_assert_eq!(op.theta(&a.add(&b)), op.theta(&a).add(&op.theta(&b)));
            prop_assert_eq!(op.theta(&a.scale(c)), op.theta(&a).scale(c));
        }

        #[test]
        fn factored_theta_on_kernel(a in arb_form(3), g in arb_form(3)) {
            let f = parse(3, "x,y,z", "x^3+2y^3+z^3+xy^2");
            let op = ThetaOperator::new(&f, &Grading::standard(3)).unwrap();
            let a = a.sub(&u_top(&a).frobenius(1).mul(&SparsePoly::monomial(a.modulus(), ExponentVector::constant(3, 2), 1)));
            prop_assert!(in_ker_u(&a));
            prop_assert_eq!(op.theta(&a), op.theta_kernel(&a));
            // Perturbing the representative by a p-th power does not change θ on ker u.
            let shifted = UProduct::new(&op.delta_rep().add(&g.frobenius(1)));
            prop_assert_eq!(shifted.apply(&a), op.theta(&a));
        }
    }
}
