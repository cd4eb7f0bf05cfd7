//! Exact symbolic expressions over `x1..xN`.
//!
//! Trees are kept in a light normal form by the smart constructors
//! ([`Expr::sum`], [`Expr::product`], [`Expr::pow`]): nested sums and products
//! are flattened, constants are folded (collected last in sums, first in
//! products), equal bases in a product are merged, and `u^0`, `u^1` collapse.
//! Nothing else is simplified.

mod parse;

use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial};
use crate::rational::{as_small_int, creal, fmt_rational, is_real, rat, to_f64, CRational};

pub use parse::{parse, parse_with_prefix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(CRational),
    /// 1-based variable index.
    Var(usize),
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    Pow(Box<Expr>, CRational),
    Ln(Box<Expr>),
}

/// How an expression can be certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExprClass {
    Polynomial,
    /// Quotient of polynomials (only integer powers, real rational constants).
    Rational,
    /// Logarithms, non-integer or complex powers, or complex constants.
    Transcendental,
}

impl Expr {
    pub fn constant(c: CRational) -> Expr {
        Expr::Const(c)
    }

    pub fn real(r: BigRational) -> Expr {
        Expr::Const(creal(r))
    }

    pub fn int(n: i64) -> Expr {
        Expr::real(rat(n))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn imaginary_unit() -> Expr {
        Expr::Const(CRational::new(BigRational::zero(), BigRational::one()))
    }

    pub fn var(index: usize) -> Expr {
        Expr::Var(index)
    }

    pub fn as_const(&self) -> Option<&CRational> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_one())
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(terms.len());
        let mut constant = CRational::zero();
        for t in terms {
            match t {
                Expr::Sum(inner) => {
                    for u in inner {
                        match u {
                            Expr::Const(c) => constant += c,
                            other => flat.push(other),
                        }
                    }
                }
                Expr::Const(c) => constant += c,
                other => flat.push(other),
            }
        }
        if !constant.is_zero() {
            flat.push(Expr::Const(constant));
        }
        match flat.len() {
            0 => Expr::zero(),
            1 => flat.pop().unwrap(),
            _ => Expr::Sum(flat),
        }
    }

    pub fn product(factors: Vec<Expr>) -> Expr {
        let mut constant = CRational::one();
        // (base, exponent) pairs, merged on structurally equal bases.
        let mut parts: Vec<(Expr, CRational)> = Vec::new();
        let push = |base: Expr, exp: CRational, parts: &mut Vec<(Expr, CRational)>| {
            if let Some(slot) = parts.iter_mut().find(|(b, _)| *b == base) {
                slot.1 += exp;
            } else {
                parts.push((base, exp));
            }
        };
        let mut pending: Vec<Expr> = factors;
        pending.reverse();
        while let Some(f) = pending.pop() {
            match f {
                Expr::Prod(inner) => pending.extend(inner.into_iter().rev()),
                Expr::Const(c) => constant *= c,
                Expr::Pow(base, exp) => push(*base, exp, &mut parts),
                other => push(other, CRational::one(), &mut parts),
            }
        }
        if constant.is_zero() {
            return Expr::zero();
        }
        let mut out = Vec::with_capacity(parts.len() + 1);
        for (base, exp) in parts {
            match Expr::pow(base, exp) {
                Expr::Const(c) => constant *= c,
                Expr::Prod(inner) => {
                    for g in inner {
                        match g {
                            Expr::Const(c) => constant *= c,
                            other => out.push(other),
                        }
                    }
                }
                other => out.push(other),
            }
        }
        if constant.is_zero() {
            return Expr::zero();
        }
        if !constant.is_one() {
            out.insert(0, Expr::Const(constant));
        }
        match out.len() {
            0 => Expr::one(),
            1 => out.pop().unwrap(),
            _ => Expr::Prod(out),
        }
    }

    pub fn pow(base: Expr, exp: CRational) -> Expr {
        if exp.is_zero() {
            return Expr::one();
        }
        if exp.is_one() {
            return base;
        }
        let int_exp = is_real(&exp).then(|| as_small_int(&exp.re)).flatten();
        match (base, int_exp) {
            (Expr::Const(c), _) if c.is_one() => Expr::one(),
            (Expr::Const(c), Some(k)) if !(c.is_zero() && k < 0) => Expr::Const(const_powi(&c, k)),
            (Expr::Pow(inner, a), Some(_)) => Expr::pow(*inner, a * exp),
            (base, _) => Expr::Pow(Box::new(base), exp),
        }
    }

    pub fn powi(base: Expr, k: i64) -> Expr {
        Expr::pow(base, creal(rat(k)))
    }

    pub fn ln(arg: Expr) -> Expr {
        if arg.is_one() {
            return Expr::zero();
        }
        Expr::Ln(Box::new(arg))
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::product(vec![Expr::int(-1), e])
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::sum(vec![a, Expr::neg(b)])
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::product(vec![a, Expr::powi(b, -1)])
    }

    /// Largest variable index occurring in the tree (0 if none).
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => *i,
            Expr::Sum(v) | Expr::Prod(v) => v.iter().map(Expr::max_var).max().unwrap_or(0),
            Expr::Pow(b, _) | Expr::Ln(b) => b.max_var(),
        }
    }

    pub fn depends_on(&self, var: usize) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(i) => *i == var,
            Expr::Sum(v) | Expr::Prod(v) => v.iter().any(|e| e.depends_on(var)),
            Expr::Pow(b, _) | Expr::Ln(b) => b.depends_on(var),
        }
    }

    /// Exact partial derivative with respect to `x_var`.
    pub fn differentiate(&self, var: usize) -> Expr {
        let raw = self.derivative_tree(var);
        raw.normalize_polynomial(self.max_var().max(var))
    }

    fn derivative_tree(&self, var: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var(i) => {
                if *i == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Sum(terms) => Expr::sum(terms.iter().map(|t| t.derivative_tree(var)).collect()),
            Expr::Prod(factors) => {
                let mut terms = Vec::new();
                for (k, f) in factors.iter().enumerate() {
                    let df = f.derivative_tree(var);
                    if df.is_zero() {
                        continue;
                    }
                    let mut fs = factors.clone();
                    fs[k] = df;
                    terms.push(Expr::product(fs));
                }
                Expr::sum(terms)
            }
            Expr::Pow(base, exp) => {
                let db = base.derivative_tree(var);
                if db.is_zero() {
                    return Expr::zero();
                }
                let lowered = exp - CRational::one();
                Expr::product(vec![
                    Expr::Const(exp.clone()),
                    Expr::pow((**base).clone(), lowered),
                    db,
                ])
            }
            Expr::Ln(arg) => {
                let da = arg.derivative_tree(var);
                if da.is_zero() {
                    return Expr::zero();
                }
                Expr::product(vec![da, Expr::powi((**arg).clone(), -1)])
            }
        }
    }

    /// Replaces the tree by its canonical polynomial form when it denotes a
    /// polynomial in `nvars` variables.
    pub fn normalize_polynomial(self, nvars: usize) -> Expr {
        match self.as_polynomial(nvars) {
            Some(p) => Expr::from_polynomial(&p),
            None => self,
        }
    }

    /// Double-precision complex evaluation with principal branches.
    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        let v = match self {
            Expr::Const(c) => Complex64::new(to_f64(&c.re), to_f64(&c.im)),
            Expr::Var(i) => *point.get(i - 1).ok_or(Error::VariableOutOfRange {
                index: *i,
                nvars: point.len(),
            })?,
            Expr::Sum(terms) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in terms {
                    acc += t.eval(point)?;
                }
                acc
            }
            Expr::Prod(factors) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for f in factors {
                    acc *= f.eval(point)?;
                }
                acc
            }
            Expr::Pow(base, exp) => {
                let b = base.eval(point)?;
                let int_exp = is_real(exp).then(|| as_small_int(&exp.re)).flatten();
                match int_exp {
                    Some(k) => {
                        if b == Complex64::new(0.0, 0.0) && k < 0 {
                            return Err(Error::Singular(self.to_string()));
                        }
                        b.powi(k as i32)
                    }
                    None => {
                        let e = Complex64::new(to_f64(&exp.re), to_f64(&exp.im));
                        if b == Complex64::new(0.0, 0.0) {
                            if e.re > 0.0 {
                                Complex64::new(0.0, 0.0)
                            } else {
                                return Err(Error::Singular(self.to_string()));
                            }
                        } else {
                            b.powc(e)
                        }
                    }
                }
            }
            Expr::Ln(arg) => {
                let a = arg.eval(point)?;
                if a == Complex64::new(0.0, 0.0) {
                    return Err(Error::Singular(self.to_string()));
                }
                a.ln()
            }
        };
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Singular(self.to_string()))
        }
    }

    pub fn eval_real(&self, point: &[f64]) -> Result<Complex64> {
        let pt: Vec<Complex64> = point.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.eval(&pt)
    }

    /// Canonical polynomial, if the tree denotes one (integer powers are
    /// expanded); `None` otherwise.
    pub fn as_polynomial(&self, nvars: usize) -> Option<Polynomial> {
        match self {
            Expr::Const(c) => is_real(c).then(|| Polynomial::constant(nvars, c.re.clone())),
            Expr::Var(i) => (*i >= 1 && *i <= nvars).then(|| Polynomial::var(nvars, *i)),
            Expr::Sum(terms) => {
                let mut acc = Polynomial::zero(nvars);
                for t in terms {
                    acc = &acc + &t.as_polynomial(nvars)?;
                }
                Some(acc)
            }
            Expr::Prod(factors) => {
                let mut acc = Polynomial::one(nvars);
                for f in factors {
                    acc = &acc * &f.as_polynomial(nvars)?;
                }
                Some(acc)
            }
            Expr::Pow(base, exp) => {
                let k = is_real(exp).then(|| as_small_int(&exp.re)).flatten()?;
                let b = base.as_polynomial(nvars)?;
                if k >= 0 {
                    Some(b.pow(k as u32))
                } else {
                    // A negative power of a nonzero constant is still polynomial.
                    let c = b.as_constant().filter(|c| !c.is_zero())?;
                    Some(Polynomial::constant(nvars, pow_rational(&c, k)))
                }
            }
            Expr::Ln(_) => None,
        }
    }

    /// Numerator and denominator polynomials, if the tree is a quotient of
    /// polynomials.
    pub fn as_rational_function(&self, nvars: usize) -> Option<(Polynomial, Polynomial)> {
        if let Some(p) = self.as_polynomial(nvars) {
            return Some((p, Polynomial::one(nvars)));
        }
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Ln(_) => None,
            Expr::Sum(terms) => {
                let mut num = Polynomial::zero(nvars);
                let mut den = Polynomial::one(nvars);
                for t in terms {
                    let (n, d) = t.as_rational_function(nvars)?;
                    if d == den {
                        num = &num + &n;
                    } else {
                        num = &(&num * &d) + &(&n * &den);
                        den = &den * &d;
                    }
                }
                Some((num, den))
            }
            Expr::Prod(factors) => {
                let mut num = Polynomial::one(nvars);
                let mut den = Polynomial::one(nvars);
                for f in factors {
                    let (n, d) = f.as_rational_function(nvars)?;
                    num = &num * &n;
                    den = &den * &d;
                }
                Some((num, den))
            }
            Expr::Pow(base, exp) => {
                let k = is_real(exp).then(|| as_small_int(&exp.re)).flatten()?;
                let (n, d) = base.as_rational_function(nvars)?;
                if n.is_zero() && k < 0 {
                    return None;
                }
                let m = k.unsigned_abs() as u32;
                if k >= 0 {
                    Some((n.pow(m), d.pow(m)))
                } else {
                    Some((d.pow(m), n.pow(m)))
                }
            }
        }
    }

    pub fn classify(&self, nvars: usize) -> ExprClass {
        if self.as_polynomial(nvars).is_some() {
            ExprClass::Polynomial
        } else if self.as_rational_function(nvars).is_some() {
            ExprClass::Rational
        } else {
            ExprClass::Transcendental
        }
    }

    /// Tree form of a polynomial, terms in decreasing graded-lex order.
    pub fn from_polynomial(p: &Polynomial) -> Expr {
        let terms = p
            .terms()
            .rev()
            .map(|(m, c)| {
                let mut factors = vec![Expr::real(c.clone())];
                factors.extend(monomial_factors(m));
                Expr::product(factors)
            })
            .collect();
        Expr::sum(terms)
    }
}

fn monomial_factors(m: &Monomial) -> Vec<Expr> {
    m.0.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| Expr::powi(Expr::Var(i + 1), e as i64))
        .collect()
}

fn pow_rational(c: &BigRational, k: i64) -> BigRational {
    let base = if k < 0 { c.recip() } else { c.clone() };
    let mut acc = BigRational::one();
    for _ in 0..k.unsigned_abs() {
        acc *= &base;
    }
    acc
}

fn const_powi(c: &CRational, k: i64) -> CRational {
    let base = if k < 0 { c.inv() } else { c.clone() };
    let mut acc = CRational::one();
    for _ in 0..k.unsigned_abs() {
        acc = acc * base.clone();
    }
    acc
}

/// Formats a complex rational without surrounding parentheses.
fn fmt_complex(c: &CRational) -> String {
    let (re, im) = (&c.re, &c.im);
    if im.is_zero() {
        return fmt_rational(re);
    }
    let imag = |v: &BigRational| -> String {
        if v.abs().is_one() {
            "i".to_string()
        } else {
            format!("{}*i", fmt_rational(&v.abs()))
        }
    };
    if re.is_zero() {
        let sign = if im.is_negative() { "-" } else { "" };
        return format!("{sign}{}", imag(im));
    }
    let sign = if im.is_negative() { "-" } else { "+" };
    format!("{} {sign} {}", fmt_rational(re), imag(im))
}

fn is_nonneg_real(c: &CRational) -> bool {
    is_real(c) && !c.re.is_negative()
}

/// Splits a sum term into (is_negative, magnitude) for printing.
fn split_sign(e: &Expr) -> (bool, Expr) {
    match e {
        Expr::Const(c) if is_real(c) && c.re.is_negative() => (true, Expr::Const(-c.clone())),
        Expr::Prod(fs) => match fs.first() {
            Some(Expr::Const(c)) if is_real(c) && c.re.is_negative() => {
                let mut rest = fs.clone();
                rest[0] = Expr::Const(-c.clone());
                (true, Expr::product(rest))
            }
            _ => (false, e.clone()),
        },
        _ => (false, e.clone()),
    }
}

impl Expr {
    fn fmt_sum_level(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Sum(terms) => {
                for (k, t) in terms.iter().enumerate() {
                    let (neg, mag) = split_sign(t);
                    match (k, neg) {
                        (0, true) => write!(f, "-")?,
                        (0, false) => {}
                        (_, true) => write!(f, " - ")?,
                        (_, false) => write!(f, " + ")?,
                    }
                    mag.fmt_product_level(f)?;
                }
                Ok(())
            }
            other => {
                let (neg, mag) = split_sign(other);
                if neg {
                    write!(f, "-")?;
                }
                mag.fmt_product_level(f)
            }
        }
    }

    fn fmt_product_level(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Prod(factors) => {
                for (k, g) in factors.iter().enumerate() {
                    if k > 0 {
                        write!(f, "*")?;
                    }
                    g.fmt_factor_level(f)?;
                }
                Ok(())
            }
            Expr::Const(c) if is_nonneg_real(c) => write!(f, "{}", fmt_complex(c)),
            other => other.fmt_factor_level(f),
        }
    }

    fn fmt_factor_level(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if is_nonneg_real(c) => write!(f, "{}", fmt_complex(c)),
            Expr::Const(c) => write!(f, "({})", fmt_complex(c)),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Ln(arg) => {
                write!(f, "ln(")?;
                arg.fmt_sum_level(f)?;
                write!(f, ")")
            }
            Expr::Pow(base, exp) => {
                match **base {
                    Expr::Var(i) => write!(f, "x{i}")?,
                    Expr::Ln(_) => base.fmt_factor_level(f)?,
                    _ => {
                        write!(f, "(")?;
                        base.fmt_sum_level(f)?;
                        write!(f, ")")?;
                    }
                }
                let int_exp = is_real(exp).then(|| as_small_int(&exp.re)).flatten();
                match int_exp {
                    Some(k) => write!(f, "^{k}"),
                    None => write!(f, "^({})", fmt_complex(exp)),
                }
            }
            Expr::Sum(_) | Expr::Prod(_) => {
                write!(f, "(")?;
                self.fmt_sum_level(f)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Expr {
    /// Prints in the grammar accepted by [`parse`]; `parse` of the output
    /// reproduces the tree exactly.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_sum_level(f)
    }
}
