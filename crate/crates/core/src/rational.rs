//! Small helpers around arbitrary-precision rationals.

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Complex number with exact rational parts.
pub type CRational = Complex<BigRational>;

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn creal(r: BigRational) -> CRational {
    Complex::new(r, BigRational::zero())
}

pub fn is_real(c: &CRational) -> bool {
    c.im.is_zero()
}

/// Returns the value as a machine integer when it is an integer that fits.
pub fn as_small_int(r: &BigRational) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Formats a rational as `n` or `n/d`.
pub fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `n`, `-n`, `n/d` or `-n/d`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let v = match body.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            BigRational::new(n.trim().parse().ok()?, d)
        }
        None => BigRational::from_integer(body.trim().parse().ok()?),
    };
    Some(if neg { -v } else { v })
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// from the continued-fraction convergents of `x`.
pub fn rationalize(x: f64, max_den: u64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let negative = x < 0.0;
    let mut rest = x.abs();
    // Convergents h/k, seeded with h_{-2}/k_{-2} = 0/1 and h_{-1}/k_{-1} = 1/0.
    let (mut hm2, mut hm1) = (0i128, 1i128);
    let (mut km2, mut km1) = (1i128, 0i128);
    for _ in 0..64 {
        let a = rest.floor();
        if a > 1e15 {
            break;
        }
        let a_i = a as i128;
        let hn = a_i * hm1 + hm2;
        let kn = a_i * km1 + km2;
        if kn > max_den as i128 {
            break;
        }
        hm2 = hm1;
        hm1 = hn;
        km2 = km1;
        km1 = kn;
        let frac = rest - a;
        if frac < 1e-12 {
            break;
        }
        rest = 1.0 / frac;
    }
    if km1 == 0 {
        return None;
    }
    let value = BigRational::new(BigInt::from(hm1), BigInt::from(km1));
    Some(if negative { -value } else { value })
}

/// Scales a rational vector to coprime integers with the first nonzero entry
/// positive. The zero vector is returned unchanged (as zeros).
pub fn primitive_integer_vector(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return ints;
    }
    let flip = ints
        .iter()
        .find(|x| !x.is_zero())
        .map(|x| x.is_negative())
        .unwrap_or(false);
    for x in ints.iter_mut() {
        *x = &*x / &gcd;
        if flip {
            *x = -&*x;
        }
    }
    ints
}
