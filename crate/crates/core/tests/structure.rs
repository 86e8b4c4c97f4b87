//! Inequalities and structural properties across the two engines.

mod common;

use common::{parse, random_form, random_local};
use qfsplit::corpus::K3_ROWS;
use qfsplit::polyring::{Grading, SparsePoly};
use qfsplit::qfs_ci::{ci_height, verify_ci_certificate, CIInput, CiVerdict, Mode};
use qfsplit::qfs_cy::{cy_height, CyVerdict};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `(lower bound, exact value)`; `u32::MAX` stands for ∞.
fn ci_bounds(v: &CiVerdict) -> (u32, Option<u32>) {
    match v {
        CiVerdict::Exact { height } => (*height, Some(*height)),
        CiVerdict::LowerBoundAtCap { at_least, .. } => (*at_least, None),
        CiVerdict::InfiniteByCheck { .. } => (u32::MAX, Some(u32::MAX)),
    }
}

fn cy_value(v: &CyVerdict) -> u32 {
    match v {
        CyVerdict::Finite { height } => *height,
        CyVerdict::Infinite { .. } => u32::MAX,
        CyVerdict::LowerBoundAtCap { .. } => panic!("no iteration cap was set"),
    }
}

fn graded(gens: Vec<SparsePoly>) -> CIInput {
    let n = gens[0].nvars();
    CIInput::new(gens, Grading::standard(n), Mode::Graded).unwrap()
}

#[test]
fn complete_intersection_at_most_hypersurface() {
    // Pairs of forms with deg g1 + deg g2 = N, so the product is Calabi-Yau
    // and its height is decided exactly.
    let mut checked = 0;
    let mut decided = 0;
    for (p, seed) in [(2u64, 1u64), (3, 2)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut done = 0;
        while done < 60 {
            let n = if done % 3 == 0 { 4 } else { 3 };
            let d1 = if n == 4 && done % 2 == 0 { 2 } else { 1 };
            let g1 = random_form(&mut rng, p, n, d1, 3);
            let g2 = random_form(&mut rng, p, n, n as u32 - d1, 4);
            let input = graded(vec![g1, g2]);
            if !input.leading_terms_coprime() {
                continue;
            }
            done += 1;
            let lhs = ci_height(&input).unwrap();
            let rhs = cy_height(input.f(), input.grading(), None).unwrap();
            let (lo, exact) = ci_bounds(&lhs.verdict);
            assert!(lo <= cy_value(&rhs.verdict), "p={p} f={} {:?} vs {:?}", input.f(), lhs.verdict, rhs.verdict);
            if let (Some(c), Some(_)) = (&lhs.certificate, exact) {
                assert!(verify_ci_certificate(&input, c).is_ok());
            }
            decided += exact.is_some() as usize;
            checked += 1;
        }
    }
    assert_eq!(checked, 120);
    assert!(decided >= 80, "only {decided} decided");
}

#[test]
fn special_inversion_monotone() {
    // sht(S/(g·x_N)) ≥ sht(S/(g, x_N)) for g of degree N - 1.
    let mut checked = 0;
    for (p, seed) in [(2u64, 11u64), (3, 12)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut done = 0;
        while done < 60 {
            let n = if done % 4 == 0 { 4 } else { 3 };
            let g = random_form(&mut rng, p, n, n as u32 - 1, 4);
            let x = SparsePoly::var(g.modulus(), n, n - 1);
            let input = graded(vec![g.clone(), x.clone()]);
            if !input.leading_terms_coprime() {
                continue;
            }
            done += 1;
            let pair = ci_height(&input).unwrap();
            let hyper = cy_height(&g.mul(&x), &Grading::standard(n), None).unwrap();
            let (lo, _) = ci_bounds(&pair.verdict);
            assert!(lo <= cy_value(&hyper.verdict), "p={p} g={g}: {:?} vs {:?}", pair.verdict, hyper.verdict);
            checked += 1;
        }
    }
    assert_eq!(checked, 120);
}

#[test]
fn local_pairs_at_most_hypersurface() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    while done < 20 {
        let g1 = random_local(&mut rng, 2, 3, 3, 3);
        let g2 = random_local(&mut rng, 2, 3, 3, 3);
        let Ok(input) = CIInput::new(vec![g1, g2], Grading::standard(3), Mode::Local) else { continue };
        if !input.leading_terms_coprime() {
            continue;
        }
        done += 1;
        assert!(qfsplit::qfs_ci::ci_le_hypersurface_check(&input).unwrap(), "{}", input.f());
    }
}

#[test]
fn fiber_products() {
    let v = "x,y,z,a,b,c";
    let cubic = parse(2, v, "x^3+y^3+z^3");
    let other = parse(2, v, "a^3+b^3+c^3");
    let s6 = Grading::standard(6);
    assert!(cy_height(&cubic.mul(&other), &s6, None).unwrap().is_infinite());
    let split = parse(2, v, "abc");
    assert_eq!(cy_height(&cubic.mul(&split), &s6, None).unwrap().finite(), Some(2));
    // Factors on their own.
    let s3 = Grading::standard(3);
    assert_eq!(cy_height(&parse(2, "x,y,z", "x^3+y^3+z^3"), &s3, None).unwrap().finite(), Some(2));
    assert_eq!(cy_height(&parse(2, "a,b,c", "abc"), &s3, None).unwrap().finite(), Some(1));
}

#[test]
fn graded_chain_agrees_with_calabi_yau_on_k3_rows() {
    for (f, h) in K3_ROWS.iter().filter(|(_, h)| h.is_some_and(|h| h <= 4)) {
        let f = parse(3, "x,y,z,w", f);
        let input = graded(vec![f.clone()]);
        let r = ci_height(&input).unwrap();
        assert_eq!(r.exact(), *h, "{f}");
        assert_eq!(verify_ci_certificate(&input, r.certificate.as_ref().unwrap()), Ok(h.unwrap()));
        assert_eq!(cy_height(&f, input.grading(), None).unwrap().finite(), *h);
    }
}

#[test]
fn cap_monotonicity() {
    let cases: [(u64, &str, Mode); 5] = [
        (2, "z^2+x^3+y^5", Mode::Local),
        (2, "z^2+x^3+xy^3+x^2yz", Mode::Local),
        (3, "z^2+x^3+y^5", Mode::Local),
        (2, "z^2+x^2y+xy^5", Mode::Local),
        (2, "x^3+y^3+z^3", Mode::Graded),
    ];
    for (p, f, mode) in cases {
        let f = parse(p, "x,y,z", f);
        let base = CIInput::new(vec![f.clone()], Grading::standard(3), mode).unwrap();
        let c0 = base.degree_cap();
        let mut last: Option<u32> = None;
        for extra in [0, 4, 12] {
            let r = ci_height(&base.clone().with_cap(c0 + extra)).unwrap();
            match (last, r.exact()) {
                (Some(a), Some(b)) => assert!(b <= a, "{f}: {a} then {b}"),
                (Some(_), None) => panic!("{f}: exact turned into {:?}", r.verdict),
                _ => {}
            }
            last = r.exact().or(last);
        }
        assert!(last.is_some(), "{f} never decided");
    }
}

#[test]
fn chain_pieces_grow() {
    let input = graded(vec![parse(2, "x,y,z", "x^3+y^3+z^3")]).with_trace(true);
    let r = ci_height(&input).unwrap();
    assert!(r.trace.len() >= 2);
    for w in r.trace.windows(2) {
        for (deg, dim) in &w[0].dims {
            assert!(w[1].dims.get(deg).copied().unwrap_or(0) >= *dim, "degree {deg}");
        }
    }
}
