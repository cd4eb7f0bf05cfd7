use std::collections::BTreeMap;

use coadjoint::expr::parse;
use coadjoint::invariants::{apply_operator, apply_operator_poly, semi_invariant_weights};
use coadjoint::lie::generic_rank;
use coadjoint::rational::ratio;
use coadjoint::{Expr, Monomial, Polynomial, StructureConstants};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

const NVARS: usize = 4;

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
}

fn poly(nvars: usize, max_terms: usize, max_exp: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, nvars), small_rational()), 0..=max_terms)
        .prop_map(move |terms| Polynomial::from_terms(nvars, terms.into_iter().map(|(e, c)| (Monomial(e), c))))
}

fn vector(n: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec(small_rational(), n)
}

/// Structure constants with random entries; the Jacobi identity is not
/// imposed, since the properties below only need the antisymmetric tensor.
fn tensor(n: usize) -> impl Strategy<Value = StructureConstants> {
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
    let len = pairs.len() * n;
    prop::collection::vec(prop_oneof![3 => Just(0i64), 1 => -3i64..=3], len).prop_map(move |cs| {
        let mut sc = StructureConstants::new(n);
        let mut it = cs.into_iter();
        for &(i, j) in &pairs {
            for k in 1..=n {
                let c = it.next().unwrap();
                if c != 0 {
                    sc.add(i, j, k, BigRational::from_integer(c.into())).unwrap();
                }
            }
        }
        sc
    })
}

fn sl2() -> StructureConstants {
    StructureConstants::new(3)
        .with(1, 2, 2, ratio(2, 1))
        .unwrap()
        .with(1, 3, 3, ratio(-2, 1))
        .unwrap()
        .with(2, 3, 1, ratio(1, 1))
        .unwrap()
}

fn axpy(u: &[BigRational], b: &BigRational, v: &[BigRational]) -> Vec<BigRational> {
    u.iter().zip(v).map(|(x, y)| x + b * y).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ring_axioms(a in poly(NVARS, 5, 3), b in poly(NVARS, 5, 3), c in poly(NVARS, 5, 3)) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Polynomial::one(NVARS), a.clone());
    }

    #[test]
    fn canonical_form_has_no_zero_terms(a in poly(NVARS, 6, 3), b in poly(NVARS, 6, 3)) {
        let s = &(&a * &b) - &(&b * &a);
        prop_assert_eq!(s.num_terms(), 0);
        prop_assert!((&a + &b).terms().all(|(_, c)| !c.is_zero()));
    }

    #[test]
    fn derivation_rule(sc in tensor(NVARS), f in poly(NVARS, 4, 2), g in poly(NVARS, 4, 2), i in 1..=NVARS) {
        let m = sc.coadjoint_matrix();
        let lhs = apply_operator_poly(&m, i, &(&f * &g));
        let rhs = &(&apply_operator_poly(&m, i, &f) * &g) + &(&f * &apply_operator_poly(&m, i, &g));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn operator_linearity(
        sc in tensor(NVARS),
        f in poly(NVARS, 4, 3),
        g in poly(NVARS, 4, 3),
        a in small_rational(),
        b in small_rational(),
        i in 1..=NVARS,
    ) {
        let m = sc.coadjoint_matrix();
        let lhs = apply_operator_poly(&m, i, &(&f.scale(&a) + &g.scale(&b)));
        let rhs = &apply_operator_poly(&m, i, &f).scale(&a) + &apply_operator_poly(&m, i, &g).scale(&b);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn expression_and_polynomial_operators_agree(sc in tensor(NVARS), f in poly(NVARS, 4, 3), i in 1..=NVARS) {
        let viaexpr = apply_operator(&sc, i, &Expr::from_polynomial(&f)).as_polynomial(NVARS).unwrap();
        prop_assert_eq!(viaexpr, apply_operator_poly(&sc.coadjoint_matrix(), i, &f));
    }

    #[test]
    fn coadjoint_matrix_matches_operator_coefficients(sc in tensor(NVARS), x in vector(NVARS), i in 1..=NVARS) {
        // X̂_i x_j has the constant-free part M_ij, so its value at x is row i of M(x).
        let m = sc.coadjoint_matrix();
        let mx = m.eval_exact(&x).unwrap();
        for j in 1..=NVARS {
            let image = apply_operator_poly(&m, i, &Polynomial::var(NVARS, j));
            prop_assert_eq!(image.eval_exact(&x).unwrap(), mx[i - 1][j - 1].clone());
        }
    }

    #[test]
    fn bracket_bilinear_antisymmetric(
        sc in tensor(NVARS),
        u in vector(NVARS),
        v in vector(NVARS),
        w in vector(NVARS),
        a in small_rational(),
    ) {
        let uv = sc.bracket(&u, &v).unwrap();
        let vu = sc.bracket(&v, &u).unwrap();
        prop_assert!(uv.iter().zip(&vu).all(|(p, q)| (p + q).is_zero()));
        prop_assert!(sc.bracket(&u, &u).unwrap().iter().all(Zero::is_zero));
        let left = sc.bracket(&axpy(&u, &a, &w), &v).unwrap();
        let wv = sc.bracket(&w, &v).unwrap();
        prop_assert_eq!(left, axpy(&uv, &a, &wv));
    }

    #[test]
    fn generic_rank_even_and_monotone(sc in tensor(5), seed in 0u64..1000) {
        let m = sc.coadjoint_matrix();
        let mut last = 0;
        for trials in 1..=4 {
            let r = generic_rank(&m, trials, seed);
            prop_assert_eq!(r % 2, 0);
            prop_assert!(r >= last);
            last = r;
        }
        prop_assert_eq!((5 - last) % 2, 1);
    }

    #[test]
    fn print_parse_round_trip(f in poly(NVARS, 5, 3)) {
        let e = Expr::from_polynomial(&f);
        let back = parse(&e.to_string(), NVARS, &BTreeMap::new()).unwrap();
        prop_assert_eq!(back.as_polynomial(NVARS).unwrap(), f);
    }

    #[test]
    fn weight_additivity(a in 0u32..3, b in 0u32..3, c in 0u32..3, k in 1u32..4) {
        // Monomials in sl(2) coordinates are semi-invariants of X̂_1 with
        // weight 2·(deg_x2 − deg_x3).
        let sc = sl2();
        let mono = |e2: u32, e3: u32| Polynomial::from_terms(3, [(Monomial(vec![0, e2, e3]), ratio(1, 1))]);
        let f = mono(a, b);
        let g = mono(c, 1);
        let wf = semi_invariant_weights(&sc, &Expr::from_polynomial(&f), &[1]).unwrap().weights[&1].clone();
        let wg = semi_invariant_weights(&sc, &Expr::from_polynomial(&g), &[1]).unwrap().weights[&1].clone();
        let wfg = semi_invariant_weights(&sc, &Expr::from_polynomial(&(&f * &g)), &[1]).unwrap().weights[&1].clone();
        prop_assert_eq!(wfg, &wf + &wg);
        let wk = semi_invariant_weights(&sc, &Expr::from_polynomial(&f.pow(k)), &[1]).unwrap().weights[&1].clone();
        prop_assert_eq!(wk, &wf * ratio(k as i64, 1));
        prop_assert_eq!(wf, ratio(2 * (a as i64 - b as i64), 1));
    }
}
