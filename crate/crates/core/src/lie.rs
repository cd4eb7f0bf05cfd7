//! Lie algebras given by structure constants, and their coadjoint matrix.
//!
//! All indices are 1-based: `[X_i, X_j] = sum_k C_ij^k X_k`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::Polynomial;

/// Half-width of the integer box sampled by [`generic_rank`].
pub const RANK_SAMPLE_BOUND: i64 = 1_000_000;

/// Default number of evaluation points for [`generic_rank`].
pub const DEFAULT_RANK_TRIALS: usize = 5;

/// Antisymmetric structure tensor. Only `i < j` entries are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureConstants {
    dim: usize,
    entries: BTreeMap<(usize, usize, usize), BigRational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub residual: BigRational,
}

impl StructureConstants {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: BTreeMap::new(),
        }
    }

    /// Abelian algebra of the given dimension.
    pub fn abelian(dim: usize) -> Self {
        Self::new(dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check(&self, index: usize) -> Result<()> {
        if index == 0 || index > self.dim {
            Err(Error::IndexOutOfRange {
                index,
                dim: self.dim,
            })
        } else {
            Ok(())
        }
    }

    /// Adds `c` to `C_ij^k`. Setting with `i > j` stores `-c` at `(j, i, k)`;
    /// `i == j` is rejected.
    pub fn add(&mut self, i: usize, j: usize, k: usize, c: BigRational) -> Result<()> {
        self.check(i)?;
        self.check(j)?;
        self.check(k)?;
        if i == j {
            return Err(Error::Invalid(format!("bracket [X{i}, X{i}] must vanish")));
        }
        let (key, c) = if i < j { ((i, j, k), c) } else { ((j, i, k), -c) };
        let slot = self.entries.entry(key).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.entries.remove(&key);
        }
        Ok(())
    }

    pub fn with(mut self, i: usize, j: usize, k: usize, c: BigRational) -> Result<Self> {
        self.add(i, j, k, c)?;
        Ok(self)
    }

    /// `C_ij^k` for any ordering of `i, j`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> BigRational {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.entries.get(&(i, j, k)).cloned().unwrap_or_default(),
            Greater => -self.entries.get(&(j, i, k)).cloned().unwrap_or_default(),
            Equal => BigRational::zero(),
        }
    }

    /// Stored entries `(i, j, k) -> C_ij^k` with `i < j`.
    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, usize), &BigRational)> {
        self.entries.iter()
    }

    /// Coefficient vector of `[X_i, X_j]` (0-based positions).
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec<BigRational> {
        (1..=self.dim).map(|k| self.get(i, j, k)).collect()
    }

    pub fn bracket(&self, u: &[BigRational], v: &[BigRational]) -> Result<Vec<BigRational>> {
        for w in [u, v] {
            if w.len() != self.dim {
                return Err(Error::Dimension {
                    expected: self.dim,
                    found: w.len(),
                });
            }
        }
        let mut out = vec![BigRational::zero(); self.dim];
        for (&(i, j, k), c) in &self.entries {
            let coeff = &u[i - 1] * &v[j - 1] - &u[j - 1] * &v[i - 1];
            if !coeff.is_zero() {
                out[k - 1] += c * coeff;
            }
        }
        Ok(out)
    }

    /// Every `(i<j<k, l)` where the Jacobi identity fails, with its residual.
    pub fn jacobi_defect(&self) -> Vec<JacobiViolation> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                for k in j + 1..=n {
                    for l in 1..=n {
                        let mut r = BigRational::zero();
                        for m in 1..=n {
                            r += self.get(i, j, m) * self.get(m, k, l)
                                + self.get(j, k, m) * self.get(m, i, l)
                                + self.get(k, i, m) * self.get(m, j, l);
                        }
                        if !r.is_zero() {
                            out.push(JacobiViolation {
                                i,
                                j,
                                k,
                                l,
                                residual: r,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn is_lie_algebra(&self) -> bool {
        self.jacobi_defect().is_empty()
    }

    /// Dimension of `[g, g]`.
    pub fn derived_algebra_dim(&self) -> usize {
        let n = self.dim;
        let rows: Vec<Vec<BigRational>> = (1..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .map(|(i, j)| self.bracket_basis(i, j))
            .collect();
        linalg::rank(&rows)
    }

    pub fn is_perfect(&self) -> bool {
        self.derived_algebra_dim() == self.dim
    }

    /// Generators that commute with every generator.
    pub fn center_dim(&self) -> usize {
        // Kernel of x -> ([x, X_1], ..., [x, X_n]) as a linear map on g.
        let n = self.dim;
        let mut rows = Vec::new();
        for j in 1..=n {
            for k in 1..=n {
                rows.push((1..=n).map(|i| self.get(i, j, k)).collect::<Vec<_>>());
            }
        }
        n - linalg::rank(&rows)
    }

    pub fn coadjoint_matrix(&self) -> CoadjointMatrix {
        let n = self.dim;
        let mut entries = vec![vec![Polynomial::zero(n); n]; n];
        for (&(i, j, k), c) in &self.entries {
            let term = Polynomial::var(n, k).scale(c);
            entries[i - 1][j - 1] = &entries[i - 1][j - 1] + &term;
            entries[j - 1][i - 1] = &entries[j - 1][i - 1] - &term;
        }
        CoadjointMatrix { dim: n, entries }
    }

    /// `N(g) = dim g - generic rank of (C_ij^k x_k)`.
    pub fn num_invariants(&self, trials: usize, seed: u64) -> usize {
        self.dim - generic_rank(&self.coadjoint_matrix(), trials, seed)
    }
}

/// Skew matrix `M_ij = sum_k C_ij^k x_k` of linear forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoadjointMatrix {
    dim: usize,
    entries: Vec<Vec<Polynomial>>,
}

impl CoadjointMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(i, j)`, 1-based.
    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i - 1][j - 1]
    }

    pub fn rows(&self) -> &[Vec<Polynomial>] {
        &self.entries
    }

    pub fn eval_exact(&self, point: &[BigRational]) -> Result<Vec<Vec<BigRational>>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|p| p.eval_exact(point)).collect())
            .collect()
    }

    pub fn eval_f64(&self, point: &[f64]) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|p| p.eval_f64(point)).collect())
            .collect()
    }
}

/// Integer point with coordinates uniform in `[-bound, bound]`.
pub fn random_integer_point(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Vec<BigRational> {
    (0..n)
        .map(|_| BigRational::from_integer(BigInt::from(rng.gen_range(-bound..=bound))))
        .collect()
}

/// Maximum exact rank of `m` over `trials` random integer points.
pub fn generic_rank(m: &CoadjointMatrix, trials: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..trials.max(1) {
        let pt = random_integer_point(&mut rng, m.dim, RANK_SAMPLE_BOUND);
        let values = m.eval_exact(&pt).expect("point has matrix dimension");
        best = best.max(linalg::rank(&values));
        if best == m.dim {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use num_traits::Signed;

    fn sl2() -> StructureConstants {
        StructureConstants::new(3)
            .with(1, 2, 2, rat(2))
            .unwrap()
            .with(1, 3, 3, rat(-2))
            .unwrap()
            .with(2, 3, 1, rat(1))
            .unwrap()
    }

    fn heisenberg() -> StructureConstants {
        StructureConstants::new(3).with(1, 2, 3, rat(1)).unwrap()
    }

    fn e(n: usize, i: usize) -> Vec<BigRational> {
        (1..=n).map(|k| rat(i64::from(k == i))).collect()
    }

    #[test]
    fn antisymmetry_is_structural() {
        let sc = sl2();
        assert_eq!(sc.get(2, 1, 2), rat(-2));
        assert_eq!(sc.get(1, 1, 1), rat(0));
        let sc2 = StructureConstants::new(3).with(2, 1, 2, rat(-2)).unwrap();
        assert_eq!(sc2.get(1, 2, 2), rat(2));
        assert!(StructureConstants::new(3).with(1, 4, 1, rat(1)).is_err());
        assert!(StructureConstants::new(3).with(2, 2, 1, rat(1)).is_err());
    }

    #[test]
    fn jacobi_examples() {
        assert!(StructureConstants::abelian(4).jacobi_defect().is_empty());
        assert!(sl2().jacobi_defect().is_empty());
        // [X1,X2]=X3, [X1,X3]=X3, [X2,X3]=X3 spans an ideal; it is a Lie algebra.
        let ideal = StructureConstants::new(3)
            .with(1, 2, 3, rat(1))
            .unwrap()
            .with(1, 3, 3, rat(1))
            .unwrap()
            .with(2, 3, 3, rat(1))
            .unwrap();
        assert!(ideal.jacobi_defect().is_empty());
        // [X1,X2]=X3, [X1,X3]=X1 breaks Jacobi: the cyclic sum equals X3.
        let broken = StructureConstants::new(3)
            .with(1, 2, 3, rat(1))
            .unwrap()
            .with(1, 3, 1, rat(1))
            .unwrap();
        let defect = broken.jacobi_defect();
        assert_eq!(defect.len(), 1);
        assert_eq!((defect[0].i, defect[0].j, defect[0].k, defect[0].l), (1, 2, 3, 3));
        assert_eq!(defect[0].residual.clone().abs(), rat(1));
    }

    #[test]
    fn bracket_examples() {
        let sc = sl2();
        assert!(sc.bracket(&e(3, 1), &e(3, 1)).unwrap().iter().all(Zero::is_zero));
        assert_eq!(sc.bracket(&e(3, 2), &e(3, 3)).unwrap(), e(3, 1));
        let two_e2: Vec<BigRational> = e(3, 2).into_iter().map(|x| x * rat(2)).collect();
        assert_eq!(sc.bracket(&e(3, 1), &e(3, 2)).unwrap(), two_e2);
        assert_eq!(
            sc.bracket(&e(3, 1), &e(2, 1)),
            Err(Error::Dimension { expected: 3, found: 2 })
        );
    }

    #[test]
    fn derived_algebra_and_perfectness() {
        assert_eq!(StructureConstants::abelian(5).derived_algebra_dim(), 0);
        assert!(!StructureConstants::abelian(5).is_perfect());
        assert_eq!(sl2().derived_algebra_dim(), 3);
        assert!(sl2().is_perfect());
        assert_eq!(heisenberg().derived_algebra_dim(), 1);
        assert_eq!(heisenberg().center_dim(), 1);
        assert_eq!(sl2().center_dim(), 0);
    }

    #[test]
    fn coadjoint_matrix_examples() {
        let n = 3;
        let z = StructureConstants::abelian(n).coadjoint_matrix();
        assert!(z.rows().iter().flatten().all(Polynomial::is_zero));

        let h = heisenberg().coadjoint_matrix();
        assert_eq!(h.entry(1, 2), &Polynomial::var(3, 3));
        assert_eq!(h.entry(2, 1), &-&Polynomial::var(3, 3));
        assert!(h.entry(1, 3).is_zero() && h.entry(2, 3).is_zero());

        let s = sl2().coadjoint_matrix();
        assert_eq!(s.entry(1, 2), &Polynomial::var(3, 2).scale(&rat(2)));
        assert_eq!(s.entry(1, 3), &Polynomial::var(3, 3).scale(&rat(-2)));
        assert_eq!(s.entry(2, 3), &Polynomial::var(3, 1));
        for i in 1..=3 {
            assert!(s.entry(i, i).is_zero());
        }
    }

    #[test]
    fn rank_and_invariant_count() {
        let a3 = StructureConstants::abelian(3).coadjoint_matrix();
        assert_eq!(generic_rank(&a3, 5, 1), 0);
        assert_eq!(generic_rank(&heisenberg().coadjoint_matrix(), 5, 1), 2);
        assert_eq!(StructureConstants::abelian(4).num_invariants(5, 1), 4);
        assert_eq!(sl2().num_invariants(5, 1), 1);
    }
}
