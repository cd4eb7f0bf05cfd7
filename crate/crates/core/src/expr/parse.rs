//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr     := ['+'|'-'] term (('+'|'-') term)*
//! term     := factor (('*'|'/') factor)*
//! factor   := atom ['^' exponent]
//! atom     := integer | 'i' | var | param | 'ln' '(' expr ')'
//!           | 'sqrt' '(' expr ')' | '(' expr ')'
//! exponent := ['+'|'-'] (integer ['/' integer] | param | 'i' | '(' expr ')')
//! ```
//!
//! Rationals such as `1/2` fall out of division plus constant folding. An
//! exponent must fold to a constant (real or complex rational).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::Expr;
use crate::error::{Error, Result};
use crate::rational::{creal, ratio};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Var(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str, prefix: char) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let (pos, c) = chars[k];
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((pos, t));
            k += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].1.is_ascii_digit() {
                k += 1;
            }
            let digits: String = chars[start..k].iter().map(|(_, c)| c).collect();
            out.push((pos, Tok::Int(digits.parse().expect("digits"))));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].1.is_alphanumeric() || chars[k].1 == '_') {
                k += 1;
            }
            let word: String = chars[start..k].iter().map(|(_, c)| c).collect();
            let rest = &word[c.len_utf8()..];
            if c == prefix && !rest.is_empty() && rest.chars().all(|d| d.is_ascii_digit()) {
                let index: usize = rest.parse().map_err(|_| Error::Syntax {
                    pos,
                    msg: format!("variable index too large in `{word}`"),
                })?;
                out.push((pos, Tok::Var(index)));
            } else {
                out.push((pos, Tok::Ident(word)));
            }
            continue;
        }
        return Err(Error::Syntax {
            pos,
            msg: format!("unexpected character `{c}`"),
        });
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    nvars: usize,
    params: &'a BTreeMap<String, BigRational>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = Vec::new();
        let first_negative = match self.peek() {
            Some(Tok::Minus) => {
                self.at += 1;
                true
            }
            Some(Tok::Plus) => {
                self.at += 1;
                false
            }
            _ => false,
        };
        let t = self.term()?;
        terms.push(if first_negative { Expr::neg(t) } else { t });
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    terms.push(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    let t = self.term()?;
                    terms.push(Expr::neg(t));
                }
                _ => break,
            }
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.factor()?];
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.at += 1;
                    factors.push(self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.at += 1;
                    let f = self.factor()?;
                    if f.is_zero() {
                        return self.err("division by zero constant");
                    }
                    factors.push(Expr::powi(f, -1));
                }
                _ => break,
            }
        }
        Ok(Expr::product(factors))
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.at += 1;
            let exp = self.exponent()?;
            if base.is_zero() && exp.re <= BigRational::from_integer(0.into()) {
                return self.err("zero raised to a non-positive power");
            }
            return Ok(Expr::pow(base, exp));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<crate::rational::CRational> {
        let negative = match self.peek() {
            Some(Tok::Minus) => {
                self.at += 1;
                true
            }
            Some(Tok::Plus) => {
                self.at += 1;
                false
            }
            _ => false,
        };
        let start = self.pos();
        let value = match self.bump() {
            Some(Tok::Int(n)) => {
                if self.peek() == Some(&Tok::Slash)
                    && matches!(self.toks.get(self.at + 1), Some((_, Tok::Int(_))))
                {
                    self.at += 1;
                    let Some(Tok::Int(d)) = self.bump() else { unreachable!() };
                    if d == BigInt::from(0) {
                        return Err(Error::Syntax {
                            pos: start,
                            msg: "zero denominator".into(),
                        });
                    }
                    creal(BigRational::new(n, d))
                } else {
                    creal(BigRational::from_integer(n))
                }
            }
            Some(Tok::Ident(name)) if name == "i" => {
                crate::rational::CRational::new(ratio(0, 1), BigRational::one())
            }
            Some(Tok::Ident(name)) => creal(self.param(&name)?),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                match inner {
                    Expr::Const(c) => c,
                    _ => {
                        return Err(Error::Syntax {
                            pos: start,
                            msg: "exponent must be constant".into(),
                        })
                    }
                }
            }
            _ => {
                return Err(Error::Syntax {
                    pos: start,
                    msg: "expected exponent".into(),
                })
            }
        };
        Ok(if negative { -value } else { value })
    }

    fn param(&self, name: &str) -> Result<BigRational> {
        self.params
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnboundParameter(name.to_string()))
    }

    fn atom(&mut self) -> Result<Expr> {
        let start = self.pos();
        match self.bump() {
            Some(Tok::Int(n)) => Ok(Expr::real(BigRational::from_integer(n))),
            Some(Tok::Var(index)) => {
                if index == 0 || index > self.nvars {
                    Err(Error::VariableOutOfRange {
                        index,
                        nvars: self.nvars,
                    })
                } else {
                    Ok(Expr::var(index))
                }
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "i" => Ok(Expr::imaginary_unit()),
                "ln" | "sqrt" => {
                    self.expect(Tok::LParen, "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    if name == "ln" {
                        Ok(Expr::ln(arg))
                    } else {
                        Ok(Expr::pow(arg, creal(ratio(1, 2))))
                    }
                }
                _ => Ok(Expr::real(self.param(&name)?)),
            },
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(_) => Err(Error::Syntax {
                pos: start,
                msg: "unexpected token".into(),
            }),
            None => Err(Error::Syntax {
                pos: start,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parses an expression over `x1..x{nvars}`, substituting parameters.
pub fn parse(text: &str, nvars: usize, params: &BTreeMap<String, BigRational>) -> Result<Expr> {
    parse_with_prefix(text, nvars, params, 'x')
}

/// As [`parse`], with variables spelled `<prefix><digits>` (the catalog uses
/// `X` for generators on the right-hand side of brackets).
pub fn parse_with_prefix(
    text: &str,
    nvars: usize,
    params: &BTreeMap<String, BigRational>,
    prefix: char,
) -> Result<Expr> {
    let toks = lex(text, prefix)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
        nvars,
        params,
    };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn params(pairs: &[(&str, i64)]) -> BTreeMap<String, BigRational> {
        pairs.iter().map(|(k, v)| (k.to_string(), rat(*v))).collect()
    }

    #[test]
    fn parses_table_formulas() {
        let e = parse("x3*x4^2 - x1*x4*x5 - x2*x5^2", 5, &BTreeMap::new()).unwrap();
        let expected = Expr::sum(vec![
            Expr::product(vec![Expr::var(3), Expr::powi(Expr::var(4), 2)]),
            Expr::product(vec![Expr::int(-1), Expr::var(1), Expr::var(4), Expr::var(5)]),
            Expr::product(vec![Expr::int(-1), Expr::var(2), Expr::powi(Expr::var(5), 2)]),
        ]);
        assert_eq!(e, expected);
        assert_eq!(parse("x1", 1, &BTreeMap::new()).unwrap(), Expr::Var(1));
    }

    #[test]
    fn parameters_are_substituted() {
        let e = parse("(x4^2+x5^2+x6^2)^p / x7^2", 8, &params(&[("p", 2)])).unwrap();
        let base = parse("x4^2+x5^2+x6^2", 8, &BTreeMap::new()).unwrap();
        assert_eq!(e, Expr::Prod(vec![Expr::powi(base, 2), Expr::powi(Expr::var(7), -2)]));
        let c = parse("(x7 - i*x6)^(p - q*i)", 8, &params(&[("p", 2), ("q", 3)])).unwrap();
        match c {
            Expr::Pow(_, exp) => {
                assert_eq!(exp.re, rat(2));
                assert_eq!(exp.im, rat(-3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(
            parse("x1 + * x2", 2, &BTreeMap::new()),
            Err(Error::Syntax { pos: 5, .. })
        ));
        assert!(matches!(parse("x1 x2", 2, &BTreeMap::new()), Err(Error::Syntax { pos: 3, .. })));
        assert_eq!(
            parse("x1^p", 1, &BTreeMap::new()),
            Err(Error::UnboundParameter("p".into()))
        );
        assert_eq!(
            parse("x9", 8, &BTreeMap::new()),
            Err(Error::VariableOutOfRange { index: 9, nvars: 8 })
        );
        assert!(parse("", 1, &BTreeMap::new()).is_err());
        assert!(parse("x1^(x2)", 2, &BTreeMap::new()).is_err());
        assert!(parse("(x1", 1, &BTreeMap::new()).is_err());
    }

    #[test]
    fn bracket_prefix() {
        let e = parse_with_prefix("p*X7 - 1/2*X4", 8, &params(&[("p", 3)]), 'X').unwrap();
        let poly = e.as_polynomial(8).unwrap();
        assert_eq!(poly.coeff(&crate::poly::Monomial::var(8, 7)), rat(3));
        assert_eq!(poly.coeff(&crate::poly::Monomial::var(8, 4)), ratio(-1, 2));
    }

    #[test]
    fn sqrt_is_half_power() {
        let e = parse("sqrt(x1)", 1, &BTreeMap::new()).unwrap();
        assert_eq!(e, Expr::pow(Expr::var(1), creal(ratio(1, 2))));
    }
}
