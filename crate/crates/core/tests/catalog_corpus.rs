use std::collections::BTreeMap;

use coadjoint::catalog::{instantiate, load_catalog, print_catalog, verify_catalog, AlgebraRecord, SHIPPED_TABLES};
use coadjoint::expr::parse;
use coadjoint::invariants::{
    combine_and_check, functional_independence_rank, heisenberg_pfaffian, heisenberg_invariant,
    is_invariant_symbolic, polynomial_invariant_search, semi_invariant_weights, ReportStatus, VerifyOptions,
};
use coadjoint::lie::DEFAULT_RANK_TRIALS;
use coadjoint::rational::to_f64;
use coadjoint::{Expr, StructureConstants};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn records() -> Vec<AlgebraRecord> {
    load_catalog(SHIPPED_TABLES).unwrap()
}

fn defaults(rec: &AlgebraRecord) -> (StructureConstants, Vec<Expr>) {
    instantiate(rec, &BTreeMap::new()).unwrap()
}

fn num_invariants(sc: &StructureConstants) -> usize {
    sc.num_invariants(DEFAULT_RANK_TRIALS, 1)
}

#[test]
fn shipped_catalog_covers_the_range() {
    let recs = records();
    assert!(recs.len() >= 30);
    assert_eq!(recs.first().unwrap().name, "L_5,1");
    assert!(recs.iter().any(|r| r.name == "L_8,22"));
}

#[test]
fn round_trip_is_identity() {
    let recs = records();
    let printed = print_catalog(&recs);
    assert_eq!(load_catalog(&printed).unwrap(), recs);
    assert_eq!(print_catalog(&load_catalog(&printed).unwrap()), printed);
}

#[test]
fn rank_parity_and_center_bound() {
    for rec in records() {
        let (sc, _) = defaults(&rec);
        let m = sc.coadjoint_matrix();
        let rank = coadjoint::lie::generic_rank(&m, DEFAULT_RANK_TRIALS, 1);
        assert_eq!(rank % 2, 0, "{}", rec.name);
        let n = sc.dim() - rank;
        assert_eq!(n % 2, sc.dim() % 2, "{}", rec.name);
        assert!(n >= sc.center_dim(), "{}", rec.name);
    }
}

#[test]
fn unflagged_records_pass() {
    let recs = records();
    let reports = verify_catalog(&recs, &VerifyOptions::default());
    assert_eq!(reports.len(), recs.len());
    for (rec, rep) in recs.iter().zip(&reports) {
        assert_eq!(rep.algebra, rec.name);
        assert_ne!(rep.status(), ReportStatus::UnexpectedFailure, "{}: {:?}", rec.name, rep);
        if !rec.suspected_typo() {
            assert!(rep.jacobi_ok, "{}", rec.name);
            assert!(rep.n_invariants >= rec.invariants.len(), "{}", rec.name);
            assert_eq!(rep.independence_rank, rec.invariants.len(), "{}", rec.name);
        }
        if rec.expect_jacobi_fail() {
            assert!(!rep.jacobi_ok, "{}", rec.name);
        }
    }
}

#[test]
fn small_dimension_records_pass() {
    let recs = records();
    let low: Vec<_> = recs.into_iter().filter(|r| r.dim <= 7 && !r.expect_jacobi_fail()).collect();
    assert!(low.len() >= 10);
    for rep in verify_catalog(&low, &VerifyOptions::default()) {
        assert!(rep.jacobi_ok && rep.passed(), "{}", rep.algebra);
    }
}

/// Points in `[1, 2]^n` where `e` evaluates; complex powers are fine.
fn sample_points(e: &Expr, n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..count * 50 {
        if out.len() == count {
            break;
        }
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..2.0)).collect();
        if e.eval_real(&x).is_ok() {
            out.push(x);
        }
    }
    assert_eq!(out.len(), count, "{e}");
    out
}

#[test]
fn derivatives_match_finite_differences() {
    let h = 1e-6;
    for rec in records() {
        let (sc, exprs) = defaults(&rec);
        let n = sc.dim();
        for e in &exprs {
            for x in sample_points(e, n, 20, 7) {
                for v in 1..=n {
                    let d = e.differentiate(v);
                    let Ok(sym) = d.eval_real(&x) else { continue };
                    let mut hi = x.clone();
                    let mut lo = x.clone();
                    hi[v - 1] += h;
                    lo[v - 1] -= h;
                    let (Ok(a), Ok(b)) = (e.eval_real(&hi), e.eval_real(&lo)) else { continue };
                    let num: Complex64 = (a - b) / (2.0 * h);
                    let scale = 1.0 + sym.norm().max(e.eval_real(&x).unwrap().norm());
                    assert!(
                        (sym - num).norm() <= 1e-6 * scale,
                        "{}: d/dx{v} of {e} at {x:?}: {sym} vs {num}",
                        rec.name
                    );
                }
            }
        }
    }
}

#[test]
fn exact_and_float_evaluation_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for rec in records() {
        let (sc, exprs) = defaults(&rec);
        let n = sc.dim();
        for e in exprs {
            let Some(p) = e.as_polynomial(n) else { continue };
            for _ in 0..5 {
                let q: Vec<BigRational> = (0..n)
                    .map(|_| BigRational::new(rng.gen_range(-50i64..50).into(), rng.gen_range(1i64..9).into()))
                    .collect();
                let x: Vec<f64> = q.iter().map(to_f64).collect();
                let exact = to_f64(&p.eval_exact(&q).unwrap());
                let float = e.eval_real(&x).unwrap();
                assert!(float.im.abs() < 1e-12);
                assert!((exact - float.re).abs() <= 1e-9 * (1.0 + exact.abs()), "{}: {e}", rec.name);
            }
        }
    }
}

#[test]
fn print_parse_is_identity_on_catalog_expressions() {
    for rec in records() {
        let (sc, exprs) = defaults(&rec);
        for e in exprs {
            let back = parse(&e.to_string(), sc.dim(), &BTreeMap::new()).unwrap();
            assert_eq!(back, e, "{}", rec.name);
        }
    }
}

#[test]
fn perfect_algebras_have_polynomial_invariants() {
    let mut seen = 0;
    for rec in records() {
        let (sc, exprs) = defaults(&rec);
        if !sc.is_perfect() || rec.expect_jacobi_fail() {
            continue;
        }
        seen += 1;
        let n = sc.dim();
        let polys: Vec<_> = exprs.iter().map(|e| e.as_polynomial(n).expect("perfect records list polynomials")).collect();
        let max_degree = polys.iter().filter_map(|p| p.degree()).max().unwrap_or(1);
        let basis = polynomial_invariant_search(&sc, max_degree).unwrap();
        let big_n = num_invariants(&sc);
        let found = functional_independence_rank(
            &basis.elements().iter().map(Expr::from_polynomial).collect::<Vec<_>>(),
            n,
            20,
            1,
        )
        .unwrap();
        assert!(found >= big_n, "{}: found {found}, N = {big_n}", rec.name);
        if !rec.suspected_typo() {
            for p in &polys {
                assert!(basis.contains(p), "{}: {p}", rec.name);
            }
            let listed = functional_independence_rank(&exprs, n, 20, 1).unwrap();
            assert_eq!(listed, exprs.len().min(big_n), "{}", rec.name);
        }
    }
    assert!(seen >= 10);
}

#[test]
fn records_without_invariants_have_none_up_to_degree_four() {
    let recs = records();
    let empty: Vec<_> = recs.iter().filter(|r| r.invariants.is_empty()).collect();
    let names: Vec<&str> = empty.iter().map(|r| r.name.as_str()).collect();
    for expected in ["L_6,3", "L_8,3", "L_8,16", "L_8,17", "L_8,20"] {
        assert!(names.contains(&expected), "{expected}");
    }
    for rec in empty {
        let (sc, _) = defaults(rec);
        let big_n = num_invariants(&sc);
        assert!(rec.notes.iter().any(|n| n.contains(&format!("N = {big_n}"))), "{}", rec.name);
        let basis = polynomial_invariant_search(&sc, 4).unwrap();
        assert!(basis.len() <= big_n, "{}", rec.name);
        for p in basis.elements() {
            assert!(is_invariant_symbolic(&sc, p));
        }
    }
}

#[test]
fn heisenberg_extensions_square_to_the_determinant() {
    let mut seen = Vec::new();
    for rec in records() {
        let (sc, _) = defaults(&rec);
        let Ok(c) = heisenberg_invariant(&sc, 3) else { continue };
        let (root, det) = heisenberg_pfaffian(&sc, 3).unwrap();
        assert_eq!(&root * &root, det, "{}", rec.name);
        let p = c.as_polynomial(sc.dim()).unwrap();
        assert!(is_invariant_symbolic(&sc, &p), "{}", rec.name);
        assert!(p.is_homogeneous());
        seen.push(rec.name.clone());
    }
    for expected in ["L_6,2", "L_8,2", "L_8,13", "L_8,19"] {
        assert!(seen.iter().any(|s| s == expected), "{expected} not recognised: {seen:?}");
    }
    assert!(!seen.iter().any(|s| s == "L_7,2" || s == "L_8,1"));
}

#[test]
fn combined_products_are_invariants() {
    // Semi-invariants of the derivation X8 that are invariants of the
    // ideal spanned by X1..X7.
    let cases: [(&str, &[&str]); 3] = [
        ("L_8,1", &["x4^2 + x5^2 + x6^2", "x1*x4 + x2*x5 + x3*x6", "x7"]),
        ("L_8,7", &["x3*x4^2 - x1*x4*x5 - x2*x5^2", "x6", "x7"]),
        ("L_8,12 corrected", &["x5^2 - 4*x4*x6", "x1*x5 - 2*x3*x4 + 2*x2*x6", "x7"]),
    ];
    let recs = records();
    for (name, texts) in cases {
        let rec = recs.iter().find(|r| r.name == name).unwrap();
        let (sc, _) = defaults(rec);
        let n = sc.dim();
        let items: Vec<_> = texts
            .iter()
            .map(|t| semi_invariant_weights(&sc, &parse(t, n, &BTreeMap::new()).unwrap(), &[n]).unwrap())
            .collect();
        let out = combine_and_check(&sc, &items, &[n]).unwrap();
        assert_eq!(out.len(), 2, "{name}");
        for e in &out {
            let (num, den) = e.as_rational_function(n).unwrap();
            let m = sc.coadjoint_matrix();
            for i in 1..=n {
                let lhs = &coadjoint::invariants::apply_operator_poly(&m, i, &num) * &den;
                let rhs = &num * &coadjoint::invariants::apply_operator_poly(&m, i, &den);
                assert_eq!(lhs, rhs, "{name}: {e} under X{i}");
            }
        }
        assert_eq!(functional_independence_rank(&out, n, 20, 1).unwrap(), 2);
    }
}
