//! Coadjoint operators `X̂_i = C_ij^k x_k ∂_j` and everything built on them:
//! annihilation checks, Casimir search, semi-invariants, the bordered
//! Pfaffian for Heisenberg extensions, functional independence and the
//! missing-label count.

mod heisenberg;
mod independence;
mod search;
mod semi;
mod verify;

use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::lie::{CoadjointMatrix, StructureConstants};
use crate::poly::Polynomial;
use crate::rational::rat;

pub use heisenberg::{bordered_matrix, determinant, heisenberg_invariant, heisenberg_pfaffian};
pub use independence::functional_independence_rank;
pub use search::{polynomial_invariant_search, InvariantBasis, MONOMIAL_CAP};
pub use semi::{combine_and_check, combine_semi_invariants, semi_invariant_weights, SemiInvariant};
pub use verify::{
    check_invariant, verify_algebra, InvariantResult, InvariantStatus, ReportStatus, VerificationReport,
    VerifyOptions,
};

/// Default tolerance for numeric annihilation checks.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default number of sample points for numeric checks.
pub const DEFAULT_TRIALS: usize = 100;

/// `X̂_i p` for a polynomial `p`, computed exactly.
pub fn apply_operator_poly(m: &CoadjointMatrix, i: usize, p: &Polynomial) -> Polynomial {
    let n = m.dim();
    let mut out = Polynomial::zero(n);
    for j in 1..=n {
        let coeff = m.entry(i, j);
        if coeff.is_zero() || !p.depends_on(j) {
            continue;
        }
        out = &out + &(coeff * &p.derivative(j));
    }
    out
}

/// `X̂_i e = sum_j (sum_k C_ij^k x_k) ∂e/∂x_j`, normalized to canonical
/// polynomial form when the result is polynomial.
pub fn apply_operator(sc: &StructureConstants, i: usize, e: &Expr) -> Expr {
    let n = sc.dim();
    let m = sc.coadjoint_matrix();
    if let Some(p) = e.as_polynomial(n) {
        return Expr::from_polynomial(&apply_operator_poly(&m, i, &p));
    }
    let terms = (1..=n)
        .filter(|&j| !m.entry(i, j).is_zero() && e.depends_on(j))
        .map(|j| Expr::product(vec![Expr::from_polynomial(m.entry(i, j)), e.differentiate(j)]))
        .collect();
    Expr::sum(terms).normalize_polynomial(n)
}

/// Whether every `X̂_i` annihilates `p`.
pub fn is_invariant_symbolic(sc: &StructureConstants, p: &Polynomial) -> bool {
    failing_operators_poly(sc, p).is_empty()
}

pub(crate) fn failing_operators_poly(sc: &StructureConstants, p: &Polynomial) -> Vec<usize> {
    let m = sc.coadjoint_matrix();
    (1..=sc.dim())
        .filter(|&i| !apply_operator_poly(&m, i, p).is_zero())
        .collect()
}

/// Operators failing to annihilate `num / den`, decided exactly from
/// `X̂(num)·den - num·X̂(den) = 0`.
pub(crate) fn failing_operators_rational(
    sc: &StructureConstants,
    num: &Polynomial,
    den: &Polynomial,
) -> Vec<usize> {
    let m = sc.coadjoint_matrix();
    (1..=sc.dim())
        .filter(|&i| {
            let lhs = &apply_operator_poly(&m, i, num) * den;
            let rhs = num * &apply_operator_poly(&m, i, den);
            lhs != rhs
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericCheck {
    pub pass: bool,
    pub max_residual: f64,
    pub points: usize,
}

/// Numeric annihilation test for any expression, over all operators.
pub fn is_invariant_numeric(
    sc: &StructureConstants,
    e: &Expr,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<NumericCheck> {
    let ops: Vec<usize> = (1..=sc.dim()).collect();
    is_invariant_numeric_ops(sc, e, &ops, trials, tol, seed)
}

/// Numeric annihilation test restricted to the operators in `ops`.
///
/// At each point of `[1, 2]^n` the residual `|X̂_i e|` is normalized by
/// `1 + sum_j |M_ij(x)|·|∂_j e(x)|`; the check passes when the largest
/// normalized residual is below `tol`.
pub fn is_invariant_numeric_ops(
    sc: &StructureConstants,
    e: &Expr,
    ops: &[usize],
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<NumericCheck> {
    if trials == 0 || !(tol > 0.0) {
        return Err(Error::Invalid("trials must be >= 1 and tol > 0".into()));
    }
    let n = sc.dim();
    let m = sc.coadjoint_matrix();
    let grads = gradient(e, n);
    let mut sampler = PointSampler::new(n, seed);
    let mut max_residual = 0.0f64;
    let mut points = 0;
    while points < trials {
        let Some((x, g)) = sampler.next_nonsingular(&grads, trials)? else {
            break;
        };
        let mx = m.eval_f64(&x);
        for &i in ops {
            let (r, scale) = operator_residual(&mx[i - 1], &g);
            max_residual = max_residual.max(r.norm() / scale);
        }
        points += 1;
    }
    if points == 0 {
        return Err(Error::Sampling(sampler.attempts));
    }
    Ok(NumericCheck {
        pass: max_residual < tol,
        max_residual,
        points,
    })
}

/// `(sum_j M_ij ∂_j e, 1 + sum_j |M_ij|·|∂_j e|)` for one row of the matrix.
fn operator_residual(row: &[f64], grad: &[Option<Complex64>]) -> (Complex64, f64) {
    let mut r = Complex64::new(0.0, 0.0);
    let mut scale = 1.0;
    for (mij, g) in row.iter().zip(grad) {
        if let Some(g) = g {
            r += g * *mij;
            scale += mij.abs() * g.norm();
        }
    }
    (r, scale)
}

/// Symbolic partial derivatives; `None` marks an identically zero one.
pub(crate) fn gradient(e: &Expr, n: usize) -> Vec<Option<Expr>> {
    (1..=n)
        .map(|j| {
            if !e.depends_on(j) {
                return None;
            }
            let d = e.differentiate(j);
            (!d.is_zero()).then_some(d)
        })
        .collect()
}

/// Deterministic sampler of points in `[1, 2]^n` that skips singularities.
pub(crate) struct PointSampler {
    rng: ChaCha8Rng,
    n: usize,
    pub(crate) attempts: usize,
}

impl PointSampler {
    pub(crate) fn new(n: usize, seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            n,
            attempts: 0,
        }
    }

    pub(crate) fn point(&mut self) -> Vec<f64> {
        (0..self.n).map(|_| self.rng.gen_range(1.0..2.0)).collect()
    }

    /// Next point where every gradient entry evaluates; `None` once the
    /// attempt budget (`10 * budget`) is spent.
    pub(crate) fn next_nonsingular(
        &mut self,
        grads: &[Option<Expr>],
        budget: usize,
    ) -> Result<Option<(Vec<f64>, Vec<Option<Complex64>>)>> {
        while self.attempts < budget.saturating_mul(10).max(10) {
            self.attempts += 1;
            let x = self.point();
            let values: Result<Vec<Option<Complex64>>> = grads
                .iter()
                .map(|g| g.as_ref().map(|g| g.eval_real(&x)).transpose())
                .collect();
            if let Ok(v) = values {
                return Ok(Some((x, v)));
            }
        }
        Ok(None)
    }
}

/// Number of missing labels for the reduction `g ⊂ ĝ`:
/// `½(dim ĝ − N(ĝ) − dim g − N(g)) + l'`.
pub fn missing_label_count(
    dim_big: u64,
    n_big: u64,
    dim_sub: u64,
    n_sub: u64,
    l_common: u64,
) -> BigRational {
    let inner = dim_big as i128 - n_big as i128 - dim_sub as i128 - n_sub as i128;
    BigRational::new(inner.into(), 2.into()) + rat(l_common as i64)
}
