use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{apply_operator_poly, gradient, operator_residual, PointSampler};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::lie::{CoadjointMatrix, StructureConstants};
use crate::linalg::nullspace_trailing_pivots;
use crate::poly::Polynomial;
use crate::rational::{primitive_integer_vector, rationalize, to_f64};

const WEIGHT_POINTS: usize = 10;
const WEIGHT_TOL: f64 = 1e-9;
const MAX_DENOMINATOR: u64 = 1_000_000;
const SAMPLE_SEED: u64 = 1;
const CONFIRM_SEED: u64 = 2;

/// An expression with `X̂_i e = λ_i e` for each operator index in `weights`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiInvariant {
    pub expr: Expr,
    pub weights: BTreeMap<usize, BigRational>,
}

/// Weights of `e` under the operators `ops`, or `None` if `e` is not a
/// semi-invariant for one of them.
///
/// Polynomials and rational functions are decided exactly. Other
/// expressions use the ratio `X̂_i e / e` at sample points, rounded to a
/// rational and re-checked at fresh points.
pub fn semi_invariant_weights(sc: &StructureConstants, e: &Expr, ops: &[usize]) -> Option<SemiInvariant> {
    let n = sc.dim();
    if e.is_zero() || ops.iter().any(|&i| i == 0 || i > n) {
        return None;
    }
    let m = sc.coadjoint_matrix();
    let weights = if let Some(p) = e.as_polynomial(n) {
        ops.iter()
            .map(|&i| Some((i, eigen_ratio(&apply_operator_poly(&m, i, &p), &p)?)))
            .collect::<Option<BTreeMap<_, _>>>()?
    } else if let Some((num, den)) = e.as_rational_function(n) {
        // X̂(N/D) = λ N/D  <=>  X̂(N)·D − N·X̂(D) = λ·N·D
        let nd = &num * &den;
        ops.iter()
            .map(|&i| {
                let lhs = &(&apply_operator_poly(&m, i, &num) * &den) - &(&num * &apply_operator_poly(&m, i, &den));
                Some((i, eigen_ratio(&lhs, &nd)?))
            })
            .collect::<Option<BTreeMap<_, _>>>()?
    } else {
        numeric_weights(&m, e, ops)?
    };
    Some(SemiInvariant {
        expr: e.clone(),
        weights,
    })
}

/// `λ` with `image = λ·p`, if it exists.
fn eigen_ratio(image: &Polynomial, p: &Polynomial) -> Option<BigRational> {
    if image.is_zero() {
        return Some(BigRational::zero());
    }
    let (mi, ci) = image.leading_term()?;
    let (mp, cp) = p.leading_term()?;
    if mi != mp {
        return None;
    }
    let lambda = ci / cp;
    (p.scale(&lambda) == *image).then_some(lambda)
}

fn numeric_weights(m: &CoadjointMatrix, e: &Expr, ops: &[usize]) -> Option<BTreeMap<usize, BigRational>> {
    let n = m.dim();
    let grads = gradient(e, n);
    let samples = sample(m, e, &grads, SAMPLE_SEED)?;
    let mut weights = BTreeMap::new();
    for &i in ops {
        let ratios: Vec<Complex64> = samples.iter().map(|s| s.image(i) / s.value).collect();
        let r0 = ratios[0];
        if ratios.iter().any(|r| (r - r0).norm() > WEIGHT_TOL * (1.0 + r0.norm())) {
            return None;
        }
        if r0.im.abs() > WEIGHT_TOL * (1.0 + r0.norm()) {
            return None;
        }
        weights.insert(i, rationalize(r0.re, MAX_DENOMINATOR)?);
    }
    // Confirm the rounded weights at fresh points.
    for s in sample(m, e, &grads, CONFIRM_SEED)? {
        for (&i, lambda) in &weights {
            let l = to_f64(lambda);
            let (r, scale) = operator_residual(&s.matrix[i - 1], &s.grad);
            if (r - s.value * l).norm() > WEIGHT_TOL * (scale + l.abs() * s.value.norm()) {
                return None;
            }
        }
    }
    Some(weights)
}

struct Sample {
    matrix: Vec<Vec<f64>>,
    grad: Vec<Option<Complex64>>,
    value: Complex64,
}

impl Sample {
    fn image(&self, i: usize) -> Complex64 {
        operator_residual(&self.matrix[i - 1], &self.grad).0
    }
}

/// `WEIGHT_POINTS` points where `e` and its gradient evaluate and `e ≠ 0`.
fn sample(m: &CoadjointMatrix, e: &Expr, grads: &[Option<Expr>], seed: u64) -> Option<Vec<Sample>> {
    let mut sampler = PointSampler::new(m.dim(), seed);
    let mut out = Vec::with_capacity(WEIGHT_POINTS);
    while out.len() < WEIGHT_POINTS {
        let (x, grad) = sampler.next_nonsingular(grads, WEIGHT_POINTS).ok()??;
        let Ok(value) = e.eval_real(&x) else { continue };
        if value.norm() < 1e-300 {
            continue;
        }
        out.push(Sample {
            matrix: m.eval_f64(&x),
            grad,
            value,
        });
    }
    Some(out)
}

/// Zero-weight products `Π F_j^{a_j}` built from semi-invariants.
///
/// The exponent vectors span the integer kernel of the weight matrix
/// (rows `ops`, columns `items`). Pivots are taken from the trailing
/// columns and each vector is scaled to coprime integers with its first
/// nonzero entry positive.
pub fn combine_semi_invariants(items: &[SemiInvariant], ops: &[usize]) -> Result<Vec<Expr>> {
    let mut w = Vec::with_capacity(ops.len());
    for &i in ops {
        let row = items
            .iter()
            .enumerate()
            .map(|(j, it)| {
                it.weights
                    .get(&i)
                    .cloned()
                    .ok_or_else(|| Error::Invalid(format!("item {} has no weight for operator {i}", j + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        w.push(row);
    }
    let mut out = Vec::new();
    for v in nullspace_trailing_pivots(&w, items.len()) {
        let a = primitive_integer_vector(&v);
        let factors = items
            .iter()
            .zip(&a)
            .filter(|(_, k)| !k.is_zero())
            .map(|(it, k)| {
                let k = k
                    .to_i64()
                    .ok_or_else(|| Error::Invalid(format!("exponent {k} out of range")))?;
                Ok(Expr::powi(it.expr.clone(), k))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(Expr::product(factors));
    }
    Ok(out)
}

/// Like [`combine_semi_invariants`], additionally confirming that every
/// product has zero weight under `ops` in the algebra `sc`.
pub fn combine_and_check(sc: &StructureConstants, items: &[SemiInvariant], ops: &[usize]) -> Result<Vec<Expr>> {
    let out = combine_semi_invariants(items, ops)?;
    for e in &out {
        let ok = semi_invariant_weights(sc, e, ops)
            .map(|s| s.weights.values().all(Zero::is_zero))
            .unwrap_or(false);
        if !ok {
            return Err(Error::Structure(format!("combined product {e} does not have zero weight")));
        }
    }
    Ok(out)
}
