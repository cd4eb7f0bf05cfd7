use num_traits::Zero;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::lie::StructureConstants;
use crate::linalg::rank;
use crate::poly::Polynomial;
use crate::rational::ratio;

/// The skew matrix whose Pfaffian is the non-central invariant of
/// `s ⋉ h_m`: the coadjoint block on generators `1..n-1`, bordered by the
/// column `(x_1, .., x_l, ½x_{l+1}, .., ½x_{n-1})` and its negated row,
/// with a zero corner. `l` is `levi_dim`.
pub fn bordered_matrix(sc: &StructureConstants, levi_dim: usize) -> Vec<Vec<Polynomial>> {
    let n = sc.dim();
    let m = sc.coadjoint_matrix();
    let half = ratio(1, 2);
    let border: Vec<Polynomial> = (1..n)
        .map(|k| {
            let x = Polynomial::var(n, k);
            if k <= levi_dim {
                x
            } else {
                x.scale(&half)
            }
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for i in 1..n {
        let mut row: Vec<Polynomial> = (1..n).map(|j| m.entry(i, j).clone()).collect();
        row.push(border[i - 1].clone());
        out.push(row);
    }
    let mut last: Vec<Polynomial> = border.iter().map(|b| -b).collect();
    last.push(Polynomial::zero(n));
    out.push(last);
    out
}

/// Exact determinant by expansion over column subsets (`O(2^k·k)` products).
pub fn determinant(a: &[Vec<Polynomial>], nvars: usize) -> Polynomial {
    let k = a.len();
    if k == 0 {
        return Polynomial::one(nvars);
    }
    // dp[mask]: signed sum over assignments of the first |mask| rows to the
    // columns in mask.
    let mut dp: Vec<Option<Polynomial>> = vec![None; 1 << k];
    dp[0] = Some(Polynomial::one(nvars));
    for mask in 0usize..(1 << k) {
        let Some(acc) = dp[mask].take() else { continue };
        let row = mask.count_ones() as usize;
        if row == k {
            dp[mask] = Some(acc);
            continue;
        }
        for c in 0..k {
            if mask & (1 << c) != 0 || a[row][c].is_zero() {
                continue;
            }
            let term = &acc * &a[row][c];
            let inversions = (mask >> (c + 1)).count_ones();
            let term = if inversions % 2 == 1 { -&term } else { term };
            let next = mask | (1 << c);
            dp[next] = Some(match dp[next].take() {
                Some(p) => &p + &term,
                None => term,
            });
        }
    }
    dp[(1 << k) - 1].take().unwrap_or_else(|| Polynomial::zero(nvars))
}

/// `(C, det)` with `C² = det` for the bordered matrix, without checking the
/// shape of the algebra.
pub fn heisenberg_pfaffian(sc: &StructureConstants, levi_dim: usize) -> Result<(Polynomial, Polynomial)> {
    let n = sc.dim();
    let det = determinant(&bordered_matrix(sc, levi_dim), n);
    if det.is_zero() {
        return Err(Error::Structure("bordered determinant vanishes identically".into()));
    }
    let root = det
        .sqrt()
        .ok_or_else(|| Error::Structure("bordered determinant is not a perfect square".into()))?;
    Ok((root, det))
}

/// Non-central invariant of `s ⋉ h_m`, with the Levi factor on generators
/// `1..=levi_dim`, the Heisenberg generators next and the center last.
pub fn heisenberg_invariant(sc: &StructureConstants, levi_dim: usize) -> Result<Expr> {
    check_shape(sc, levi_dim)?;
    let (root, _) = heisenberg_pfaffian(sc, levi_dim)?;
    Ok(Expr::from_polynomial(&root))
}

fn check_shape(sc: &StructureConstants, l: usize) -> Result<()> {
    let n = sc.dim();
    let fail = |msg: String| Err(Error::Structure(msg));
    if l == 0 || n < l + 3 || (n - l - 1) % 2 != 0 {
        return fail(format!("dimension {n} does not split as {l} + 2m + 1"));
    }
    if !sc.is_lie_algebra() {
        return fail("structure constants violate the Jacobi identity".into());
    }
    let levi = 1..=l;
    let heis = l + 1..n;
    for i in 1..=n {
        if (1..=n).any(|k| !sc.get(i, n, k).is_zero()) {
            return fail(format!("X{n} does not commute with X{i}"));
        }
    }
    for i in levi.clone() {
        for j in 1..=n {
            let out_of = |k: usize| !sc.get(i, j, k).is_zero() && !(if j <= l { k <= l } else { k > l });
            if let Some(k) = (1..=n).find(|&k| out_of(k)) {
                return fail(format!("[X{i},X{j}] has a component on X{k}"));
            }
        }
    }
    let levi_brackets: Vec<Vec<_>> = levi
        .clone()
        .flat_map(|i| levi.clone().map(move |j| (i, j)))
        .filter(|(i, j)| i < j)
        .map(|(i, j)| (1..=l).map(|k| sc.get(i, j, k)).collect())
        .collect();
    if rank(&levi_brackets) != l {
        return fail(format!("generators 1..{l} do not span a perfect subalgebra"));
    }
    let mut form = Vec::new();
    for i in heis.clone() {
        let mut row = Vec::new();
        for j in heis.clone() {
            if let Some(k) = (1..n).find(|&k| !sc.get(i, j, k).is_zero()) {
                return fail(format!("[X{i},X{j}] has a component on X{k}"));
            }
            row.push(sc.get(i, j, n));
        }
        form.push(row);
    }
    if rank(&form) != n - l - 1 {
        return fail("Heisenberg form is degenerate".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::is_invariant_symbolic;
    use crate::rational::{rat, ratio};
    use num_rational::BigRational;

    /// Pfaffian by expansion along the first row.
    fn pfaffian(a: &[Vec<Polynomial>], nvars: usize) -> Polynomial {
        let k = a.len();
        if k == 0 {
            return Polynomial::one(nvars);
        }
        let mut out = Polynomial::zero(nvars);
        for j in 1..k {
            if a[0][j].is_zero() {
                continue;
            }
            let keep: Vec<usize> = (1..k).filter(|&r| r != j).collect();
            let minor: Vec<Vec<Polynomial>> = keep
                .iter()
                .map(|&r| keep.iter().map(|&c| a[r][c].clone()).collect())
                .collect();
            let t = &a[0][j] * &pfaffian(&minor, nvars);
            out = if j % 2 == 1 { &out + &t } else { &out - &t };
        }
        out
    }

    fn so3_h2() -> StructureConstants {
        let h = ratio(1, 2);
        let mut sc = StructureConstants::new(8);
        for (i, j, k, c) in [
            (2, 3, 1, rat(1)),
            (1, 2, 3, rat(1)),
            (1, 3, 2, rat(-1)),
            (1, 4, 7, h.clone()),
            (1, 5, 6, h.clone()),
            (1, 6, 5, -h.clone()),
            (1, 7, 4, -h.clone()),
            (2, 4, 5, h.clone()),
            (2, 5, 4, -h.clone()),
            (2, 6, 7, h.clone()),
            (2, 7, 6, -h.clone()),
            (3, 4, 6, h.clone()),
            (3, 5, 7, -h.clone()),
            (3, 6, 4, -h.clone()),
            (3, 7, 5, h.clone()),
            (4, 5, 8, rat(1)),
            (6, 7, 8, rat(-1)),
        ] {
            sc.add(i, j, k, c).unwrap();
        }
        sc
    }

    fn sl2_h1() -> StructureConstants {
        let mut sc = StructureConstants::new(6);
        for (i, j, k, c) in [
            (1, 2, 2, 2),
            (1, 3, 3, -2),
            (2, 3, 1, 1),
            (1, 4, 4, 1),
            (1, 5, 5, -1),
            (2, 5, 4, 1),
            (3, 4, 5, 1),
            (4, 5, 6, 1),
        ] {
            sc.add(i, j, k, rat(c)).unwrap();
        }
        sc
    }

    fn small_matrix(vals: &[&[i64]]) -> Vec<Vec<Polynomial>> {
        vals.iter()
            .map(|r| r.iter().map(|&v| Polynomial::constant(1, rat(v))).collect())
            .collect()
    }

    #[test]
    fn determinant_of_constants() {
        let a = small_matrix(&[&[2, 1, 0], &[1, 3, 4], &[0, 5, 6]]);
        assert_eq!(determinant(&a, 1), Polynomial::constant(1, rat(-10)));
        let id = small_matrix(&[&[0, 1], &[1, 0]]);
        assert_eq!(determinant(&id, 1), Polynomial::constant(1, rat(-1)));
    }

    #[test]
    fn invariant_of_so3_extension() {
        let sc = so3_h2();
        assert!(sc.is_lie_algebra());
        let c = heisenberg_invariant(&sc, 3).unwrap();
        let p = c.as_polynomial(8).unwrap();
        assert_eq!(p.degree(), Some(4));
        assert!(p.is_homogeneous());
        assert!(is_invariant_symbolic(&sc, &p));
        let (root, det) = heisenberg_pfaffian(&sc, 3).unwrap();
        assert_eq!(&root * &root, det);
        let pf = pfaffian(&bordered_matrix(&sc, 3), 8);
        assert!(pf == root || pf == -&root);
    }

    #[test]
    fn invariant_of_sl2_extension() {
        let sc = sl2_h1();
        assert!(sc.is_lie_algebra());
        let p = heisenberg_invariant(&sc, 3).unwrap().as_polynomial(6).unwrap();
        assert!(is_invariant_symbolic(&sc, &p));
        assert_eq!(p.degree(), Some(3));
        let pf = pfaffian(&bordered_matrix(&sc, 3), 6);
        assert!(pf == p || pf == -&p);
    }

    #[test]
    fn homogeneous_scaling() {
        let p = heisenberg_invariant(&so3_h2(), 3).unwrap().as_polynomial(8).unwrap();
        let x: Vec<BigRational> = (1..=8).map(|k| ratio(k * 3 - 7, 5)).collect();
        let t = ratio(-7, 3);
        let tx: Vec<BigRational> = x.iter().map(|v| v * &t).collect();
        let lhs = p.eval_exact(&tx).unwrap();
        let rhs = p.eval_exact(&x).unwrap() * t.pow(4);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let mut sc = StructureConstants::new(8);
        for (i, j, k, c) in [(1, 2, 3, 1), (1, 3, 2, -1), (2, 3, 1, 1), (4, 8, 4, 1), (7, 8, 7, 2)] {
            sc.add(i, j, k, rat(c)).unwrap();
        }
        assert!(matches!(heisenberg_invariant(&sc, 3), Err(Error::Structure(_))));
        assert!(heisenberg_invariant(&StructureConstants::abelian(7), 3).is_err());
        let mut broken = so3_h2();
        broken.add(2, 5, 4, rat(1)).unwrap();
        assert!(matches!(heisenberg_invariant(&broken, 3), Err(Error::Structure(_))));
    }
}
