use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use coadjoint::catalog::{instantiate, load_catalog, verify_record, AlgebraRecord, SHIPPED_TABLES};
use coadjoint::expr::parse;
use coadjoint::invariants::{
    check_invariant, combine_and_check, heisenberg_invariant, polynomial_invariant_search, semi_invariant_weights,
    InvariantStatus, ReportStatus, SemiInvariant, VerificationReport, VerifyOptions,
};
use coadjoint::rational::{fmt_rational, parse_rational};
use coadjoint::{Error, Expr, StructureConstants};

const DEFAULT_CATALOG: &str = "data/tables.lie";

/// Verify and compute invariants of the coadjoint representation.
#[derive(Parser, Debug)]
#[command(name = "coadjoint", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Catalog file [default: data/tables.lie, else the built-in copy]
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Algebra name, e.g. "L_8,1"
    #[arg(long, global = true)]
    algebra: Option<String>,
    /// Parameter override NAME=VALUE (repeatable)
    #[arg(long = "set", global = true, value_parser = parse_assignment)]
    set: Vec<(String, BigRational)>,
    /// Sample points for numeric checks
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,
    /// Tolerance for numeric checks
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Jsonl,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify catalog records (all, or the one named by --algebra)
    Check,
    /// Print dim, generic rank and number of invariants
    Rank,
    /// Basis of polynomial invariants up to a degree
    Search {
        #[arg(long)]
        degree: u32,
    },
    /// Weights of expressions under a set of operators
    Weights(ExprArgs),
    /// Zero-weight products of semi-invariants
    Combine(ExprArgs),
    /// Non-central invariant of a Heisenberg extension
    Heisenberg {
        #[arg(long, default_value_t = 3)]
        levi_dim: usize,
    },
    /// List record names
    List,
}

#[derive(Args, Debug)]
struct ExprArgs {
    /// Expression in x1..xn (repeatable)
    #[arg(long = "expr", required = true)]
    exprs: Vec<String>,
    /// Operator indices, e.g. 8 or 1,2,3 [default: all]
    #[arg(long, value_delimiter = ',')]
    ops: Vec<usize>,
}

fn parse_assignment(s: &str) -> Result<(String, BigRational), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let v = parse_rational(v.trim()).ok_or_else(|| format!("`{}` is not a rational number", v.trim()))?;
    Ok((k.trim().to_string(), v))
}

/// Outcome of a command: exit code 1 for usage, IO or input errors, 2 for
/// failed verifications.
enum Failure {
    Usage(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

struct Ctx {
    global: Global,
    records: Vec<AlgebraRecord>,
    out: std::io::StdoutLock<'static>,
}

impl Ctx {
    fn options(&self) -> VerifyOptions {
        VerifyOptions {
            trials: self.global.trials,
            tol: self.global.tol,
            seed: self.global.seed,
            ..VerifyOptions::default()
        }
    }

    fn overrides(&self) -> BTreeMap<String, BigRational> {
        self.global.set.iter().cloned().collect()
    }

    fn record(&self) -> Result<&AlgebraRecord, Failure> {
        let name = self
            .global
            .algebra
            .as_deref()
            .ok_or_else(|| Failure::Usage("this command needs --algebra".into()))?;
        self.records
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Failure::Usage(format!("unknown algebra `{name}`")))
    }

    /// The named record, or every record when no name is given.
    fn selection(&self) -> Result<Vec<&AlgebraRecord>, Failure> {
        match self.global.algebra {
            Some(_) => Ok(vec![self.record()?]),
            None if !self.global.set.is_empty() => Err(Failure::Usage("--set needs --algebra".into())),
            None => Ok(self.records.iter().collect()),
        }
    }

    fn algebra(&self) -> Result<(&AlgebraRecord, StructureConstants, BTreeMap<String, BigRational>), Failure> {
        let rec = self.record()?;
        let values = rec.resolve(&self.overrides())?;
        let (sc, _) = instantiate(rec, &values)?;
        Ok((rec, sc, values))
    }

    fn text(&self) -> bool {
        self.global.format == Format::Text
    }

    fn emit(&mut self, line: &str) {
        let _ = writeln!(self.out, "{line}");
    }

    fn emit_json<T: Serialize>(&mut self, value: &T) {
        let line = serde_json::to_string(value).expect("serializable record");
        self.emit(&line);
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification) => ExitCode::from(2),
    }
}

fn run(cli: Cli) -> CmdResult {
    let g = &cli.global;
    if g.trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    if !(g.tol > 0.0) {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    let source = match &g.catalog {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?,
        None => std::fs::read_to_string(DEFAULT_CATALOG).unwrap_or_else(|_| SHIPPED_TABLES.to_string()),
    };
    let records = load_catalog(&source)?;
    let mut ctx = Ctx {
        global: cli.global,
        records,
        out: std::io::stdout().lock(),
    };
    match cli.command {
        Command::Check => cmd_check(&mut ctx),
        Command::Rank => cmd_rank(&mut ctx),
        Command::Search { degree } => cmd_search(&mut ctx, degree),
        Command::Weights(args) => cmd_weights(&mut ctx, &args),
        Command::Combine(args) => cmd_combine(&mut ctx, &args),
        Command::Heisenberg { levi_dim } => cmd_heisenberg(&mut ctx, levi_dim),
        Command::List => {
            let names: Vec<String> = ctx.records.iter().map(|r| r.name.clone()).collect();
            for n in names {
                ctx.emit(&n);
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CheckLine<'a> {
    #[serde(flatten)]
    report: &'a VerificationReport,
    status: ReportStatus,
    notes: &'a [String],
}

fn cmd_check(ctx: &mut Ctx) -> CmdResult {
    let selection = ctx.selection()?;
    let overrides = ctx.overrides();
    let options = ctx.options();
    let reports: Vec<(VerificationReport, &AlgebraRecord)> = selection
        .par_iter()
        .map(|rec| {
            let report = verify_record(rec, &overrides, &options).unwrap_or_else(|e| {
                VerificationReport::failed(&rec.name, rec.dim, e.to_string(), rec.suspected_typo(), rec.expect_jacobi_fail())
            });
            (report, *rec)
        })
        .collect();
    let mut unexpected = 0;
    let mut lines = Vec::new();
    for (report, rec) in &reports {
        let status = report.status();
        if status == ReportStatus::UnexpectedFailure {
            unexpected += 1;
        }
        if ctx.text() {
            lines.extend(render_report(report, status, &rec.notes));
        } else {
            lines.push(
                serde_json::to_string(&CheckLine {
                    report,
                    status,
                    notes: &rec.notes,
                })
                .expect("serializable report"),
            );
        }
    }
    if ctx.text() && reports.len() > 1 {
        let count = |s: ReportStatus| reports.iter().filter(|(r, _)| r.status() == s).count();
        lines.push(format!(
            "summary: {} records, {} pass, {} flagged-pass, {} expected-failure, {} unexpected-failure",
            reports.len(),
            count(ReportStatus::Pass),
            count(ReportStatus::FlaggedPass),
            count(ReportStatus::ExpectedFailure),
            count(ReportStatus::UnexpectedFailure)
        ));
    }
    for l in lines {
        ctx.emit(&l);
    }
    if unexpected > 0 {
        Err(Failure::Verification)
    } else {
        Ok(())
    }
}

fn render_report(r: &VerificationReport, status: ReportStatus, notes: &[String]) -> Vec<String> {
    let mut out = vec![format!(
        "{}: {}  dim={} rank={} N={} jacobi={} perfect={} independent={}/{}",
        r.algebra,
        status.label(),
        r.dim,
        r.generic_rank,
        r.n_invariants,
        if r.jacobi_ok { "ok" } else { "FAIL" },
        if r.perfect { "yes" } else { "no" },
        r.independence_rank,
        r.invariants.len()
    )];
    if let Some(e) = &r.error {
        out.push(format!("  error: {e}"));
    }
    for v in &r.jacobi_violations {
        out.push(format!("  jacobi violation {v}"));
    }
    for (k, inv) in r.invariants.iter().enumerate() {
        out.push(format!("  I{} = {}", k + 1, inv.expr));
        out.push(format!("     {}", inv.status));
    }
    if let Some(e) = &r.independence_error {
        out.push(format!("  independence: {e}"));
    }
    if status != ReportStatus::Pass {
        for n in notes {
            out.push(format!("  note: {n}"));
        }
    }
    out
}

#[derive(Serialize)]
struct RankLine<'a> {
    algebra: &'a str,
    dim: usize,
    rank: usize,
    n: usize,
}

fn cmd_rank(ctx: &mut Ctx) -> CmdResult {
    let overrides = ctx.overrides();
    let mut rows = Vec::new();
    for rec in ctx.selection()? {
        let values = rec.resolve(&overrides)?;
        let (sc, _) = instantiate(rec, &values)?;
        let n = sc.num_invariants(VerifyOptions::default().rank_trials, ctx.global.seed);
        rows.push((rec.name.clone(), sc.dim(), sc.dim() - n, n));
    }
    for (name, dim, rank, n) in rows {
        if ctx.text() {
            ctx.emit(&format!("{name}: dim={dim} rank={rank} N={n}"));
        } else {
            ctx.emit_json(&RankLine {
                algebra: &name,
                dim,
                rank,
                n,
            });
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SearchLine<'a> {
    algebra: &'a str,
    degree: u32,
    invariant: String,
}

fn cmd_search(ctx: &mut Ctx, degree: u32) -> CmdResult {
    if !(1..=8).contains(&degree) {
        return Err(Failure::Usage("--degree must be between 1 and 8".into()));
    }
    let (rec, sc, _) = ctx.algebra()?;
    let name = rec.name.clone();
    let basis = match polynomial_invariant_search(&sc, degree) {
        Ok(b) => b,
        Err(e @ Error::AnsatzCap { .. }) => {
            return Err(Failure::Usage(format!("search not attempted: {e}")));
        }
        Err(e) => return Err(e.into()),
    };
    if ctx.text() {
        ctx.emit(&format!("{name}: {} invariant(s) of degree <= {degree}", basis.len()));
    }
    for p in basis.elements() {
        let line = Expr::from_polynomial(p).to_string();
        if ctx.text() {
            ctx.emit(&format!("  [{}] {line}", p.degree().unwrap_or(0)));
        } else {
            ctx.emit_json(&SearchLine {
                algebra: &name,
                degree: p.degree().unwrap_or(0),
                invariant: line,
            });
        }
    }
    Ok(())
}

fn parse_exprs(
    args: &ExprArgs,
    dim: usize,
    values: &BTreeMap<String, BigRational>,
) -> Result<(Vec<Expr>, Vec<usize>), Failure> {
    let exprs = args
        .exprs
        .iter()
        .map(|t| parse(t, dim, values).map_err(|e| Failure::Usage(format!("`{t}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let ops = if args.ops.is_empty() {
        (1..=dim).collect()
    } else {
        args.ops.clone()
    };
    if let Some(&i) = ops.iter().find(|&&i| i == 0 || i > dim) {
        return Err(Failure::Usage(format!("operator index {i} outside 1..={dim}")));
    }
    Ok((exprs, ops))
}

#[derive(Serialize)]
struct WeightLine<'a> {
    algebra: &'a str,
    expr: String,
    semi_invariant: bool,
    weights: BTreeMap<usize, String>,
}

/// Weights of every expression; `None` entries are not semi-invariants.
fn weights_of(ctx: &mut Ctx, args: &ExprArgs) -> Result<(String, StructureConstants, Vec<Option<SemiInvariant>>, Vec<usize>), Failure> {
    let (rec, sc, values) = ctx.algebra()?;
    let name = rec.name.clone();
    let (exprs, ops) = parse_exprs(args, sc.dim(), &values)?;
    let items: Vec<Option<SemiInvariant>> = exprs.iter().map(|e| semi_invariant_weights(&sc, e, &ops)).collect();
    for (e, item) in exprs.iter().zip(&items) {
        let weights: BTreeMap<usize, String> = item
            .as_ref()
            .map(|s| s.weights.iter().map(|(i, w)| (*i, fmt_rational(w))).collect())
            .unwrap_or_default();
        if ctx.text() {
            let body = match item {
                Some(_) => weights
                    .iter()
                    .map(|(i, w)| format!("X{i}:{w}"))
                    .collect::<Vec<_>>()
                    .join(" "),
                None => "not a semi-invariant".to_string(),
            };
            ctx.emit(&format!("{e}  {body}"));
        } else {
            ctx.emit_json(&WeightLine {
                algebra: &name,
                expr: e.to_string(),
                semi_invariant: item.is_some(),
                weights,
            });
        }
    }
    Ok((name, sc, items, ops))
}

fn cmd_weights(ctx: &mut Ctx, args: &ExprArgs) -> CmdResult {
    let (_, _, items, _) = weights_of(ctx, args)?;
    if items.iter().any(Option::is_none) {
        return Err(Failure::Verification);
    }
    Ok(())
}

#[derive(Serialize)]
struct CombineLine<'a> {
    algebra: &'a str,
    product: String,
    status: &'a InvariantStatus,
}

fn cmd_combine(ctx: &mut Ctx, args: &ExprArgs) -> CmdResult {
    let (name, sc, items, ops) = weights_of(ctx, args)?;
    let Some(items) = items.into_iter().collect::<Option<Vec<_>>>() else {
        return Err(Failure::Verification);
    };
    let products = combine_and_check(&sc, &items, &ops)?;
    let options = ctx.options();
    // Zero weight under `ops` does not imply annihilation by the other
    // operators, so the full check is reported rather than enforced.
    for p in products {
        let status = check_invariant(&sc, &p, &options);
        if ctx.text() {
            ctx.emit(&format!("product {p}  full check: {status}"));
        } else {
            ctx.emit_json(&CombineLine {
                algebra: &name,
                product: p.to_string(),
                status: &status,
            });
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct HeisenbergLine<'a> {
    algebra: &'a str,
    invariant: String,
    status: &'a InvariantStatus,
}

fn cmd_heisenberg(ctx: &mut Ctx, levi_dim: usize) -> CmdResult {
    let (rec, sc, _) = ctx.algebra()?;
    let name = rec.name.clone();
    let c = heisenberg_invariant(&sc, levi_dim)?;
    let status = check_invariant(&sc, &c, &ctx.options());
    if ctx.text() {
        ctx.emit(&format!("{name}: C = {c}"));
        ctx.emit(&format!("  {status}"));
    } else {
        ctx.emit_json(&HeisenbergLine {
            algebra: &name,
            invariant: c.to_string(),
            status: &status,
        });
    }
    if status.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
