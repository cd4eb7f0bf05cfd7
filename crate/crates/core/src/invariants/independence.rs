use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{gradient, PointSampler};
use crate::error::{Error, Result};
use crate::expr::Expr;

const SINGULAR_CUTOFF: f64 = 1e-8;

/// Largest numeric rank of the Jacobian `[∂F_a/∂x_j]` over `trials` random
/// points of `[1, 2]^n`. Singular values below `1e-8·σ_max` count as zero.
pub fn functional_independence_rank(exprs: &[Expr], n: usize, trials: usize, seed: u64) -> Result<usize> {
    if exprs.is_empty() || n == 0 {
        return Ok(0);
    }
    if trials == 0 {
        return Err(Error::Invalid("trials must be >= 1".into()));
    }
    if let Some(e) = exprs.iter().find(|e| e.max_var() > n) {
        return Err(Error::VariableOutOfRange {
            index: e.max_var(),
            nvars: n,
        });
    }
    let grads: Vec<Option<Expr>> = exprs.iter().flat_map(|e| gradient(e, n)).collect();
    let full = exprs.len().min(n);
    let mut sampler = PointSampler::new(n, seed);
    let mut best = 0;
    let mut points = 0;
    while points < trials && best < full {
        let Some((_, values)) = sampler.next_nonsingular(&grads, trials)? else {
            break;
        };
        points += 1;
        let jac = DMatrix::from_fn(exprs.len(), n, |a, j| values[a * n + j].unwrap_or(Complex64::new(0.0, 0.0)));
        best = best.max(numeric_rank(jac));
    }
    if points == 0 {
        return Err(Error::Sampling(sampler.attempts));
    }
    Ok(best)
}

fn numeric_rank(m: DMatrix<Complex64>) -> usize {
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if !(max > 0.0) || !max.is_finite() {
        return 0;
    }
    sv.iter().filter(|&&s| s > SINGULAR_CUTOFF * max).count()
}
