//! Line-oriented catalog of Lie algebras with their tabulated invariants.
//!
//! ```text
//! [algebra]
//! name = "L_8,1"
//! dim = 8
//! param p = 2 ; nonzero
//! bracket [1,2] = X3
//! bracket [7,8] = p*X7
//! invariant "(x4^2 + x5^2 + x6^2)^p*x7^-2"
//! note "free text"
//! ```
//!
//! Constraints are `any`, `nonzero`, `in{a, b, ..}` and `not{a, b, ..}`.
//! Notes containing `suspected-typo` or `expect-jacobi-fail` change how a
//! failing verification is classified.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::{parse, parse_with_prefix, Expr};
use crate::invariants::{verify_algebra, VerificationReport, VerifyOptions};
use crate::lie::StructureConstants;
use crate::rational::{fmt_rational, parse_rational};

/// The tables shipped with the crate.
pub const SHIPPED_TABLES: &str = include_str!("../../../data/tables.lie");

pub const SUSPECTED_TYPO: &str = "suspected-typo";
pub const EXPECT_JACOBI_FAIL: &str = "expect-jacobi-fail";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    Any,
    Nonzero,
    In(Vec<BigRational>),
    Not(Vec<BigRational>),
}

impl Constraint {
    pub fn admits(&self, v: &BigRational) -> bool {
        match self {
            Self::Any => true,
            Self::Nonzero => !v.is_zero(),
            Self::In(vals) => vals.contains(v),
            Self::Not(vals) => !vals.contains(v),
        }
    }

    fn parse(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        match s {
            "any" => return Ok(Self::Any),
            "nonzero" => return Ok(Self::Nonzero),
            _ => {}
        }
        let list = |body: &str| -> std::result::Result<Vec<BigRational>, String> {
            body.split(',')
                .map(|v| parse_rational(v.trim()).ok_or_else(|| format!("bad value `{}` in constraint", v.trim())))
                .collect()
        };
        if let Some(body) = s.strip_prefix("in{").and_then(|r| r.strip_suffix('}')) {
            return Ok(Self::In(list(body)?));
        }
        if let Some(body) = s.strip_prefix("not{").and_then(|r| r.strip_suffix('}')) {
            return Ok(Self::Not(list(body)?));
        }
        Err(format!("unknown constraint `{s}`"))
    }
}

impl std::fmt::Display for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let join = |v: &[BigRational]| v.iter().map(fmt_rational).collect::<Vec<_>>().join(", ");
        match self {
            Self::Any => f.write_str("any"),
            Self::Nonzero => f.write_str("nonzero"),
            Self::In(v) => write!(f, "in{{{}}}", join(v)),
            Self::Not(v) => write!(f, "not{{{}}}", join(v)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: String,
    pub default: BigRational,
    pub constraint: Constraint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketSpec {
    pub i: usize,
    pub j: usize,
    /// Linear combination of generators `X1..Xn`, possibly with parameters.
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraRecord {
    pub name: String,
    pub dim: usize,
    pub params: Vec<ParamSpec>,
    pub brackets: Vec<BracketSpec>,
    pub invariants: Vec<String>,
    pub notes: Vec<String>,
}

impl AlgebraRecord {
    pub fn suspected_typo(&self) -> bool {
        self.notes.iter().any(|n| n.contains(SUSPECTED_TYPO))
    }

    pub fn expect_jacobi_fail(&self) -> bool {
        self.notes.iter().any(|n| n.contains(EXPECT_JACOBI_FAIL))
    }

    pub fn defaults(&self) -> BTreeMap<String, BigRational> {
        self.params.iter().map(|p| (p.name.clone(), p.default.clone())).collect()
    }

    /// Defaults overridden by `values`, after checking names and constraints.
    pub fn resolve(&self, values: &BTreeMap<String, BigRational>) -> Result<BTreeMap<String, BigRational>> {
        if let Some(k) = values.keys().find(|k| !self.params.iter().any(|p| &p.name == *k)) {
            return Err(Error::Invalid(format!("{} has no parameter `{k}`", self.name)));
        }
        let mut out = BTreeMap::new();
        for p in &self.params {
            let v = values.get(&p.name).unwrap_or(&p.default).clone();
            if !p.constraint.admits(&v) {
                return Err(Error::Constraint {
                    name: p.name.clone(),
                    value: fmt_rational(&v),
                    constraint: p.constraint.to_string(),
                });
            }
            out.insert(p.name.clone(), v);
        }
        Ok(out)
    }
}

fn quoted(s: &str) -> std::result::Result<String, String> {
    let s = s.trim();
    let inner = s
        .strip_prefix('"')
        .and_then(|r| r.strip_suffix('"'))
        .ok_or_else(|| format!("expected a quoted string, found `{s}`"))?;
    if inner.contains('"') {
        return Err("quotes are not allowed inside strings".into());
    }
    Ok(inner.to_string())
}

#[derive(Default)]
struct Draft {
    start: usize,
    name: Option<String>,
    dim: Option<usize>,
    params: Vec<ParamSpec>,
    brackets: Vec<(usize, BracketSpec)>,
    invariants: Vec<(usize, String)>,
    notes: Vec<String>,
}

impl Draft {
    fn finish(self) -> Result<AlgebraRecord> {
        let err = |line: usize, msg: String| Error::Catalog { line, msg };
        let name = self.name.ok_or_else(|| err(self.start, "record has no name".into()))?;
        let dim = self
            .dim
            .ok_or_else(|| err(self.start, format!("{name}: record has no dim")))?;
        let rec = AlgebraRecord {
            name: name.clone(),
            dim,
            params: self.params,
            brackets: self.brackets.iter().map(|(_, b)| b.clone()).collect(),
            invariants: self.invariants.iter().map(|(_, s)| s.clone()).collect(),
            notes: self.notes,
        };
        let values = rec.resolve(&BTreeMap::new()).map_err(|e| err(self.start, format!("{name}: {e}")))?;
        let mut seen = BTreeSet::new();
        for (line, b) in &self.brackets {
            if b.j > dim {
                return Err(err(*line, format!("{name}: generator X{} exceeds dim {dim}", b.j)));
            }
            if !seen.insert((b.i, b.j)) {
                return Err(err(*line, format!("{name}: bracket [{},{}] given twice", b.i, b.j)));
            }
            bracket_coefficients(b, dim, &values).map_err(|e| err(*line, format!("{name}: {e}")))?;
        }
        for (line, inv) in &self.invariants {
            parse(inv, dim, &values).map_err(|e| err(*line, format!("{name}: {e}")))?;
        }
        Ok(rec)
    }
}

/// Parse a catalog. Records come back in file order.
pub fn load_catalog(source: &str) -> Result<Vec<AlgebraRecord>> {
    let mut out: Vec<AlgebraRecord> = Vec::new();
    let mut names = BTreeSet::new();
    let mut draft: Option<Draft> = None;
    let mut push = |d: Draft, out: &mut Vec<AlgebraRecord>| -> Result<()> {
        let start = d.start;
        let rec = d.finish()?;
        if !names.insert(rec.name.clone()) {
            return Err(Error::Catalog {
                line: start,
                msg: format!("duplicate algebra name `{}`", rec.name),
            });
        }
        out.push(rec);
        Ok(())
    };
    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let text = strip_comment(raw).trim();
        if text.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Catalog { line, msg };
        if text == "[algebra]" {
            if let Some(d) = draft.take() {
                push(d, &mut out)?;
            }
            draft = Some(Draft {
                start: line,
                ..Default::default()
            });
            continue;
        }
        let d = draft
            .as_mut()
            .ok_or_else(|| err("content before the first [algebra] section".into()))?;
        let (key, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        let rest = rest.trim();
        match key {
            "name" => d.name = Some(quoted(value_after_eq(rest).map_err(err)?).map_err(err)?),
            "dim" => {
                let v = value_after_eq(rest).map_err(err)?;
                let n: usize = v.parse().map_err(|_| err(format!("bad dim `{v}`")))?;
                if n == 0 {
                    return Err(err("dim must be positive".into()));
                }
                d.dim = Some(n);
            }
            "param" => {
                let (name, spec) = rest.split_once('=').ok_or_else(|| err("expected `param NAME = VALUE ; CONSTRAINT`".into()))?;
                let name = name.trim();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphabetic()) || name == "i" {
                    return Err(err(format!("bad parameter name `{name}`")));
                }
                let (value, constraint) = spec.split_once(';').unwrap_or((spec, "any"));
                let default =
                    parse_rational(value.trim()).ok_or_else(|| err(format!("bad default `{}`", value.trim())))?;
                let constraint = Constraint::parse(constraint).map_err(err)?;
                if d.params.iter().any(|p| p.name == name) {
                    return Err(err(format!("parameter `{name}` declared twice")));
                }
                d.params.push(ParamSpec {
                    name: name.to_string(),
                    default,
                    constraint,
                });
            }
            "bracket" => {
                let (lhs, rhs) = rest.split_once('=').ok_or_else(|| err("expected `bracket [i,j] = RHS`".into()))?;
                let (i, j) = parse_pair(lhs.trim()).map_err(err)?;
                if i >= j {
                    return Err(err(format!("bracket [{i},{j}] must have i < j")));
                }
                d.brackets.push((
                    line,
                    BracketSpec {
                        i,
                        j,
                        rhs: rhs.trim().to_string(),
                    },
                ));
            }
            "invariant" => d.invariants.push((line, quoted(rest).map_err(err)?)),
            "note" => d.notes.push(quoted(rest).map_err(err)?),
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }
    if let Some(d) = draft.take() {
        push(d, &mut out)?;
    }
    Ok(out)
}

fn strip_comment(line: &str) -> &str {
    // `#` inside a quoted string is kept.
    let mut in_quote = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quote = !in_quote,
            '#' if !in_quote => return &line[..i],
            _ => {}
        }
    }
    line
}

fn value_after_eq(rest: &str) -> std::result::Result<&str, String> {
    rest.strip_prefix('=')
        .map(str::trim)
        .ok_or_else(|| format!("expected `= VALUE`, found `{rest}`"))
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let inner = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| format!("expected `[i,j]`, found `{s}`"))?;
    let (a, b) = inner.split_once(',').ok_or_else(|| format!("expected `[i,j]`, found `{s}`"))?;
    let idx = |t: &str| -> std::result::Result<usize, String> {
        match t.trim().parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v),
            _ => Err(format!("bad generator index `{}`", t.trim())),
        }
    };
    Ok((idx(a)?, idx(b)?))
}

/// Coefficients `(k, C_ij^k)` of one bracket under the given parameter values.
fn bracket_coefficients(
    b: &BracketSpec,
    dim: usize,
    values: &BTreeMap<String, BigRational>,
) -> Result<Vec<(usize, BigRational)>> {
    let e = parse_with_prefix(&b.rhs, dim, values, 'X')?;
    let p = e
        .as_polynomial(dim)
        .ok_or_else(|| Error::Invalid(format!("bracket [{},{}] is not a linear combination", b.i, b.j)))?;
    let mut out = Vec::new();
    for (m, c) in p.terms() {
        if m.degree() != 1 {
            return Err(Error::Invalid(format!(
                "bracket [{},{}] = {} is not a linear combination of generators",
                b.i, b.j, b.rhs
            )));
        }
        let k = m.0.iter().position(|&e| e == 1).expect("degree-one monomial") + 1;
        out.push((k, c.clone()));
    }
    Ok(out)
}

/// Structure constants and invariants with parameters substituted; missing
/// values take their defaults.
pub fn instantiate(
    rec: &AlgebraRecord,
    values: &BTreeMap<String, BigRational>,
) -> Result<(StructureConstants, Vec<Expr>)> {
    let values = rec.resolve(values)?;
    let mut sc = StructureConstants::new(rec.dim);
    for b in &rec.brackets {
        for (k, c) in bracket_coefficients(b, rec.dim, &values)? {
            sc.add(b.i, b.j, k, c)?;
        }
    }
    let invariants = rec
        .invariants
        .iter()
        .map(|s| parse(s, rec.dim, &values))
        .collect::<Result<Vec<_>>>()?;
    Ok((sc, invariants))
}

/// Render records in the catalog format; `load_catalog` reads it back to
/// the same records.
pub fn print_catalog(records: &[AlgebraRecord]) -> String {
    let mut s = String::new();
    for (idx, r) in records.iter().enumerate() {
        if idx > 0 {
            s.push('\n');
        }
        let _ = writeln!(s, "[algebra]");
        let _ = writeln!(s, "name = \"{}\"", r.name);
        let _ = writeln!(s, "dim = {}", r.dim);
        for p in &r.params {
            let _ = writeln!(s, "param {} = {} ; {}", p.name, fmt_rational(&p.default), p.constraint);
        }
        for b in &r.brackets {
            let _ = writeln!(s, "bracket [{},{}] = {}", b.i, b.j, b.rhs);
        }
        for inv in &r.invariants {
            let _ = writeln!(s, "invariant \"{inv}\"");
        }
        for n in &r.notes {
            let _ = writeln!(s, "note \"{n}\"");
        }
    }
    s
}

/// Verify one record under the given parameter values.
pub fn verify_record(
    rec: &AlgebraRecord,
    values: &BTreeMap<String, BigRational>,
    options: &VerifyOptions,
) -> Result<VerificationReport> {
    let (sc, invariants) = instantiate(rec, values)?;
    let mut report = verify_algebra(&sc, &invariants, options);
    report.algebra = rec.name.clone();
    report.suspected_typo = rec.suspected_typo();
    report.expect_jacobi_fail = rec.expect_jacobi_fail();
    Ok(report)
}

/// One report per record at default parameters, in record order.
pub fn verify_catalog(records: &[AlgebraRecord], options: &VerifyOptions) -> Vec<VerificationReport> {
    records
        .par_iter()
        .map(|rec| {
            verify_record(rec, &BTreeMap::new(), options).unwrap_or_else(|e| {
                VerificationReport::failed(&rec.name, rec.dim, e.to_string(), rec.suspected_typo(), rec.expect_jacobi_fail())
            })
        })
        .collect()
}
