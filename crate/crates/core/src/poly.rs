//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Variables are addressed 1-based (`x1..xN`) at every public entry point;
//! exponent vectors are stored 0-based internally.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, rat};

/// Exponent vector, ordered graded-lexicographically with `x1 > x2 > ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    /// The monomial `x_var` (1-based).
    pub fn var(nvars: usize, var: usize) -> Self {
        let mut e = vec![0; nvars];
        e[var - 1] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    /// All exponent vectors of total degree `degree` in `nvars` variables,
    /// in decreasing graded-lex order.
    pub fn all_of_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
        fn rec(prefix: &mut Vec<u32>, nvars: usize, left: u32, out: &mut Vec<Monomial>) {
            if prefix.len() + 1 == nvars {
                prefix.push(left);
                out.push(Monomial(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in (0..=left).rev() {
                prefix.push(e);
                rec(prefix, nvars, left - e, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if nvars == 0 {
            if degree == 0 {
                out.push(Monomial(vec![]));
            }
            return out;
        }
        rec(&mut Vec::with_capacity(nvars), nvars, degree, &mut out);
        out
    }

    pub fn count_of_degree(nvars: usize, degree: u32) -> usize {
        // C(degree + nvars - 1, nvars - 1)
        if nvars == 0 {
            return usize::from(degree == 0);
        }
        let (n, k) = (degree as u128 + nvars as u128 - 1, nvars as u128 - 1);
        let mut c: u128 = 1;
        for i in 0..k {
            c = c * (n - i) / (i + 1);
        }
        c.min(usize::MAX as u128) as usize
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    /// The polynomial `x_var` (1-based).
    pub fn var(nvars: usize, var: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(nvars, var), BigRational::one());
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, BigRational)>,
    {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.leading_term().map(|(m, _)| m.degree())
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(m, _)| m.is_one())
                .map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        debug_assert_eq!(m.0.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Partial derivative with respect to `x_var` (1-based).
    pub fn derivative(&self, var: usize) -> Self {
        let idx = var - 1;
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[idx] -= 1;
            out.add_term(dm, c * rat(e as i64));
        }
        out
    }

    /// Exact evaluation at a rational point.
    pub fn eval_exact(&self, point: &[BigRational]) -> Result<BigRational> {
        if point.len() != self.nvars {
            return Err(Error::Dimension {
                expected: self.nvars,
                found: point.len(),
            });
        }
        // Cached powers per variable.
        let max_exp: Vec<u32> = (0..self.nvars)
            .map(|i| self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<BigRational>> = point
            .iter()
            .zip(&max_exp)
            .map(|(x, &e)| {
                let mut v = Vec::with_capacity(e as usize + 1);
                v.push(BigRational::one());
                for k in 1..=e as usize {
                    let next = &v[k - 1] * x;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= &powers[i][e as usize];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            Some(d) => degs.all(|e| e == d),
            None => true,
        }
    }

    /// Whether `x_var` occurs in any term.
    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var - 1] > 0)
    }

    /// Polynomial square root, when `self` is the square of a polynomial
    /// with rational coefficients. The root is returned with a positive
    /// leading coefficient.
    pub fn sqrt(&self) -> Option<Polynomial> {
        let Some((lead_m, lead_c)) = self.leading_term() else {
            return Some(self.clone());
        };
        if lead_m.0.iter().any(|e| e % 2 == 1) {
            return None;
        }
        let root_c = rational_sqrt(lead_c)?;
        let root_m = Monomial(lead_m.0.iter().map(|e| e / 2).collect());
        let two_lead = &root_c * rat(2);
        let mut root = Polynomial::zero(self.nvars);
        root.add_term(root_m.clone(), root_c);
        let mut last = root_m.clone();
        let bound = (0..=root_m.degree())
            .map(|d| Monomial::count_of_degree(self.nvars, d))
            .sum::<usize>()
            + 1;
        for _ in 0..bound {
            let rem = self - &(&root * &root);
            let Some((m, c)) = rem.leading_term() else {
                return Some(root);
            };
            let t = m.checked_div(&root_m)?;
            if t >= last {
                return None;
            }
            root.add_term(t.clone(), c / &two_lead);
            last = t;
        }
        None
    }

    /// Numeric evaluation in double precision.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .zip(point)
                    .fold(crate::rational::to_f64(c), |acc, (&e, &x)| acc * x.powi(e as i32))
            })
            .sum()
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = int_sqrt(r.numer())?;
    let d = int_sqrt(r.denom())?;
    Some(BigRational::new(n, d))
}

fn int_sqrt(n: &BigInt) -> Option<BigInt> {
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&rat(-1))
    }
}

impl fmt::Display for Polynomial {
    /// Terms in decreasing graded-lex order, e.g. `x1^2 + 4*x2*x3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, e)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    #[test]
    fn graded_lex_order() {
        let a = Monomial(vec![2, 0]);
        let b = Monomial(vec![1, 1]);
        let c = Monomial(vec![0, 3]);
        assert!(a > b);
        assert!(c > a);
        assert!(Monomial(vec![1, 0]) > Monomial(vec![0, 1]));
    }

    #[test]
    fn monomial_enumeration_counts() {
        assert_eq!(Monomial::all_of_degree(8, 4).len(), 330);
        assert_eq!(Monomial::count_of_degree(8, 4), 330);
        assert_eq!(Monomial::all_of_degree(3, 0), vec![Monomial(vec![0, 0, 0])]);
    }

    #[test]
    fn eval_exact_examples() {
        let n = 6;
        let p = &(&(&x(n, 1) * &x(n, 4)) + &(&x(n, 2) * &x(n, 5))) + &(&x(n, 3) * &x(n, 6));
        let pt: Vec<BigRational> = (1..=6).map(rat).collect();
        assert_eq!(p.eval_exact(&pt).unwrap(), rat(32));
        assert_eq!(Polynomial::zero(2).eval_exact(&[rat(1), rat(2)]).unwrap(), rat(0));
        let q = &(&x(7, 4).pow(2) + &x(7, 5).pow(2)) + &x(7, 6).pow(2);
        let pt: Vec<BigRational> = [0, 0, 0, 3, 4, 12, 0].iter().map(|&v| rat(v)).collect();
        assert_eq!(q.eval_exact(&pt).unwrap(), rat(169));
        assert!(q.eval_exact(&pt[..3]).is_err());
    }

    #[test]
    fn derivative_power_rule() {
        let n = 5;
        let p = &(&(&x(n, 3) * &x(n, 4).pow(2)) - &(&(&x(n, 1) * &x(n, 4)) * &x(n, 5)))
            - &(&x(n, 2) * &x(n, 5).pow(2));
        let d = p.derivative(4);
        let expected = &(&x(n, 3) * &x(n, 4)).scale(&rat(2)) - &(&x(n, 1) * &x(n, 5));
        assert_eq!(d, expected);
    }

    #[test]
    fn sqrt_of_square_and_non_square() {
        let n = 3;
        let r = &(&x(n, 1).scale(&ratio(1, 2)) - &x(n, 2)) + &(&x(n, 3) * &x(n, 3));
        let sq = &r * &r;
        let root = sq.sqrt().unwrap();
        assert!(root == r || root == -&r);
        assert_eq!(&root * &root, sq);
        let not_square = &sq + &x(n, 1);
        assert!(not_square.sqrt().is_none());
        assert!(x(n, 1).scale(&rat(-1)).pow(2).scale(&rat(-1)).sqrt().is_none());
    }

    #[test]
    fn display_is_readable() {
        let p = &x(3, 1).pow(2) + &(&x(3, 2) * &x(3, 3)).scale(&rat(4));
        assert_eq!(p.to_string(), "x1^2 + 4*x2*x3");
        let q = &x(2, 2).scale(&ratio(-1, 2)) + &Polynomial::constant(2, rat(3));
        assert_eq!(q.to_string(), "-1/2*x2 + 3");
        assert_eq!(Polynomial::zero(2).to_string(), "0");
    }
}
