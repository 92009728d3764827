//! Command-line front end. [`run`] parses arguments, runs one command and
//! returns the exit status: 0 when every check passes, 1 when a check fails,
//! 2 for usage or parse errors.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::acceptance::{run_criterion, CriterionResult, COUNT, DEFAULT_SEED};
use crate::catalog::{catalog, lookup, CatalogEntry, TransformOf};
use crate::distrib::{build, render};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::func_model::PiecewiseFunction;
use crate::gauge::step_demo;
use crate::inversion::{invert_pointwise_with, local_inversion_with, InversionReport};
use crate::oscillatory::{pv_transform_with, transform_with, TransformOptions};
use crate::parser::parse_function;
use crate::spectrum::{ClosedForm, Spectrum};

/// Overrides the default tolerance of 1e-6.
pub const TOL_ENV: &str = "BVFOURIER_TOL";
pub const DEFAULT_TOL: f64 = 1e-6;
/// Below this the engines cannot settle in double precision.
pub const MIN_TOL: f64 = 1e-14;

#[derive(Debug, Parser)]
#[command(name = "bvfourier", version, about = "Fourier transforms and pointwise inversion for locally BV functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample f̂ (or ĝ for polynomial tails) on an s-grid.
    Transform(TransformArgs),
    /// Recover midpoint values at a list of points.
    Invert(InvertArgs),
    /// Seeded property suites: parts, product rule, regulated identity, is·f̂.
    Identity(IdentityArgs),
    /// Distributional transform as JSON.
    Distrib(DistribArgs),
    /// The acceptance criteria.
    Selfcheck(SelfcheckArgs),
    /// Gauge versus mesh sums for the unit step.
    GaugeDemo(GaugeArgs),
    /// List the catalog.
    Catalog(OutputArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct InputArgs {
    /// Catalog entry name.
    #[arg(long)]
    pub catalog: Option<String>,
    /// File holding a function definition.
    #[arg(long)]
    pub define: Option<PathBuf>,
    /// Function definition in the grammar.
    #[arg(long)]
    pub expr: Option<String>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Comma list, or a range `start:stop:count`.
    #[arg(long = "s", allow_hyphen_values = true)]
    pub s: String,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Transform the residual after subtracting polynomial tails.
    #[arg(long)]
    pub residual: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Comma list or range; defaults to the catalog test points.
    #[arg(long = "x", allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistribArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelfcheckArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Run only these criteria (comma list of ids).
    #[arg(long)]
    pub only: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GaugeArgs {
    /// Value of the step at its jump.
    #[arg(long, default_value_t = 7.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 9)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// One output row; CSV columns are input, re, im, err_estimate,
/// expected_re, expected_im, pass.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub input: f64,
    pub re: f64,
    pub im: f64,
    pub err_estimate: f64,
    pub expected_re: Option<f64>,
    pub expected_im: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Row {
    fn failed(input: f64, e: &Error) -> Row {
        Row {
            input,
            re: f64::NAN,
            im: f64::NAN,
            err_estimate: f64::NAN,
            expected_re: None,
            expected_im: None,
            pass: false,
            error: Some(e.to_string()),
        }
    }
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn rows_csv(rows: &[Row]) -> String {
    let mut out = String::from("input,re,im,err_estimate,expected_re,expected_im,pass\n");
    for r in rows {
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            num(r.input),
            num(r.re),
            num(r.im),
            num(r.err_estimate),
            opt(r.expected_re),
            opt(r.expected_im),
            r.pass
        );
    }
    out
}

fn rows_text(rows: &[Row], format: Format) -> String {
    match format {
        Format::Csv => rows_csv(rows),
        Format::Json => json(&rows),
    }
}

fn json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_default();
    s.push('\n');
    s
}

/// Comma list `a,b,c` or range `start:stop:count` (inclusive, evenly spaced).
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |m: &str| Error::Validation(format!("grid {text:?}: {m}"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let a: f64 = parts[0].trim().parse().map_err(|_| bad("bad start"))?;
        let b: f64 = parts[1].trim().parse().map_err(|_| bad("bad stop"))?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad("bad count"))?;
        return Ok(match n {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
        });
    }
    if parts.len() != 1 {
        return Err(bad("expected a list or start:stop:count"));
    }
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<f64>().map_err(|_| bad(&format!("bad number {t:?}"))))
        .collect()
}

/// `--tol`, then the environment variable, then the default.
pub fn resolve_tol(flag: Option<f64>) -> Result<f64> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| Error::Validation(format!("{TOL_ENV}={v:?} is not a number")))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    if !(MIN_TOL..1.0).contains(&tol) {
        return Err(Error::Validation(format!("tolerance {tol} is outside [{MIN_TOL}, 1)")));
    }
    Ok(tol)
}

fn explicit_tol(flag: Option<f64>) -> Result<Option<f64>> {
    if flag.is_some() || std::env::var_os(TOL_ENV).is_some() {
        resolve_tol(flag).map(Some)
    } else {
        Ok(None)
    }
}

struct Source {
    f: PiecewiseFunction,
    entry: Option<CatalogEntry>,
}

fn load(input: &InputArgs) -> Result<Source> {
    if let Some(name) = &input.catalog {
        let entry = lookup(name)?;
        return Ok(Source {
            f: entry.function()?,
            entry: Some(entry),
        });
    }
    let text = match (&input.define, &input.expr) {
        (Some(path), _) => std::fs::read_to_string(path).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?,
        (None, Some(e)) => e.clone(),
        (None, None) => return Err(Error::Validation("no input function".into())),
    };
    Ok(Source {
        f: parse_function(&text)?,
        entry: None,
    })
}

fn emit(text: &str, out: &Option<PathBuf>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Validation(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Error::Validation(e.to_string())),
    }
}

fn status(all_pass: bool) -> i32 {
    if all_pass {
        0
    } else {
        1
    }
}

fn transform_rows(src: &Source, args: &TransformArgs) -> Result<Vec<Row>> {
    let tol = resolve_tol(args.tol)?;
    let closed = src.entry.as_ref().and_then(|e| e.transform);
    let residual = args.residual || closed.is_some_and(|c| c.of == TransformOf::Residual);
    let f = if residual { src.f.subtract_asymptote()?.0 } else { src.f.clone() };
    let opts = TransformOptions::with_tol(tol);
    let check = closed.map_or(tol, |c| c.tol.max(tol));
    let mut rows = Vec::new();
    for s in parse_grid(&args.s)? {
        let r = if f.odd_symmetry().is_some() {
            pv_transform_with(&f, s, &opts)
        } else {
            transform_with(&f, s, &opts)
        };
        let r = match r {
            Ok(r) => r,
            Err(e) => {
                rows.push(Row::failed(s, &e));
                continue;
            }
        };
        let expected = closed.map(|c| (c.eval)(s));
        let pass = r.converged && expected.is_none_or(|e| (r.value - e).norm() <= check);
        rows.push(Row {
            input: s,
            re: r.value.re,
            im: r.value.im,
            err_estimate: r.abs_error,
            expected_re: expected.map(|e| e.re),
            expected_im: expected.map(|e| e.im),
            pass,
            error: None,
        });
    }
    Ok(rows)
}

/// Closed form of the whole function when it vanishes outside [lo, hi].
fn local_closed_form<'a>(f: &PiecewiseFunction, hat: Option<&'a (TransformOf, ClosedForm)>, lo: f64, hi: f64) -> Option<&'a ClosedForm> {
    let (of, cf) = hat?;
    let zero = Expr::Const(0.0);
    let outside_zero = f.pieces().iter().all(|p| (p.lo >= lo && p.hi <= hi) || p.expr == zero);
    (*of == TransformOf::Function && outside_zero).then_some(cf)
}

fn invert_one(f: &PiecewiseFunction, hat: Option<&(TransformOf, ClosedForm)>, x: f64, tol: f64) -> Result<InversionReport> {
    let spectrum = hat.map(|(_, cf)| cf as &dyn Spectrum);
    match invert_pointwise_with(f, spectrum, x, tol) {
        Err(Error::NonConvergence(msg)) => {
            // retry on the finite piece around x
            let Some(p) = f.pieces().iter().find(|p| p.lo < x && x < p.hi && p.lo.is_finite() && p.hi.is_finite()) else {
                return Err(Error::NonConvergence(msg));
            };
            let local = local_closed_form(f, hat, p.lo, p.hi);
            local_inversion_with(f, p.lo, p.hi, local.map(|c| c as &dyn Spectrum), x, tol)
        }
        r => r,
    }
}

fn invert_rows(src: &Source, args: &InvertArgs) -> Result<Vec<Row>> {
    let tol = explicit_tol(args.tol)?;
    let points: Vec<(f64, Option<f64>, f64)> = match (&args.x, &src.entry) {
        (Some(list), entry) => parse_grid(list)?
            .into_iter()
            .map(|x| {
                let known = entry.as_ref().and_then(|e| e.points.iter().find(|p| p.x == x));
                (x, known.map(|p| p.expected), tol.or(known.map(|p| p.tol)).unwrap_or(DEFAULT_TOL))
            })
            .collect(),
        (None, Some(e)) => e.points.iter().map(|p| (p.x, Some(p.expected), tol.unwrap_or(p.tol))).collect(),
        (None, None) => return Err(Error::Validation("--x is required without --catalog".into())),
    };
    let hat = match &src.entry {
        Some(e) => e.spectrum()?,
        None => None,
    };
    let mut rows = Vec::new();
    for (x, known, tol) in points {
        let expected = match known {
            Some(v) => Ok(v),
            None => src.f.midpoint_value(x),
        };
        let r = expected.and_then(|want| invert_one(&src.f, hat.as_ref(), x, tol).map(|r| (want, r)));
        match r {
            Ok((want, r)) => rows.push(Row {
                input: x,
                re: r.recovered,
                im: 0.0,
                err_estimate: r.error_estimate,
                expected_re: Some(want),
                expected_im: Some(0.0),
                pass: r.converged && (r.recovered - want).abs() <= tol,
                error: None,
            }),
            Err(e) => rows.push(Row::failed(x, &e)),
        }
    }
    Ok(rows)
}

#[derive(Serialize)]
struct SuiteReport {
    seed: u64,
    pass: bool,
    criteria: Vec<CriterionResult>,
}

fn suite(ids: &[usize], seed: u64) -> SuiteReport {
    let criteria: Vec<CriterionResult> = ids.iter().filter_map(|&id| run_criterion(id, seed)).collect();
    SuiteReport {
        seed,
        pass: criteria.iter().all(|c| c.pass),
        criteria,
    }
}

fn parse_ids(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(id) if (1..=COUNT).contains(&id) => Ok(id),
            _ => Err(Error::Validation(format!("unknown criterion {t:?}"))),
        })
        .collect()
}

#[derive(Serialize)]
struct CatalogRow<'a> {
    name: &'a str,
    description: &'a str,
    source: &'a str,
    closed_form: Option<TransformOf>,
    points: usize,
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Transform(args) => {
            let src = load(&args.input)?;
            let rows = transform_rows(&src, &args)?;
            for r in rows.iter().filter_map(|r| r.error.as_ref().map(|e| (r.input, e))) {
                let _ = writeln!(stderr, "s = {}: {}", r.0, r.1);
            }
            emit(&rows_text(&rows, args.output.format), &args.output.out, stdout)?;
            Ok(status(rows.iter().all(|r| r.pass)))
        }
        Command::Invert(args) => {
            let src = load(&args.input)?;
            let rows = invert_rows(&src, &args)?;
            for r in rows.iter().filter_map(|r| r.error.as_ref().map(|e| (r.input, e))) {
                let _ = writeln!(stderr, "x = {}: {}", r.0, r.1);
            }
            emit(&rows_text(&rows, args.output.format), &args.output.out, stdout)?;
            Ok(status(rows.iter().all(|r| r.pass)))
        }
        Command::Identity(args) => {
            let report = suite(&[4, 5, 12], args.seed);
            emit(&json(&report), &args.out, stdout)?;
            Ok(status(report.pass))
        }
        Command::Distrib(args) => {
            let src = load(&args.input)?;
            let d = build(&src.f)?;
            let mut v = serde_json::to_value(&d).map_err(|e| Error::Validation(e.to_string()))?;
            if let Some(obj) = v.as_object_mut() {
                obj.insert("render".into(), render(&d).into());
            }
            emit(&json(&v), &args.out, stdout)?;
            Ok(0)
        }
        Command::Selfcheck(args) => {
            let ids = match &args.only {
                Some(list) => parse_ids(list)?,
                None => (1..=COUNT).collect(),
            };
            let report = suite(&ids, args.seed);
            let text = match args.output.format {
                Format::Csv => report.criteria.iter().map(|c| format!("{c}\n")).collect(),
                Format::Json => json(&report),
            };
            emit(&text, &args.output.out, stdout)?;
            Ok(status(report.pass))
        }
        Command::GaugeDemo(args) => {
            let deltas: Vec<f64> = (1..=6).map(|k| 10f64.powi(-k)).collect();
            let rep = step_demo(args.a, &deltas, args.samples, args.seed)?;
            let pass = rep.rows.iter().all(|r| r.hs_min == 0.5 && r.hs_max == 0.5 && (r.delta > 0.1 || r.rs_gap >= 0.4));
            let text = match args.output.format {
                Format::Csv => {
                    let mut s = String::from("delta,hs_min,hs_max,hs_gap,rs_min,rs_max,rs_gap\n");
                    for r in &rep.rows {
                        let cols = [r.delta, r.hs_min, r.hs_max, r.hs_gap, r.rs_min, r.rs_max, r.rs_gap];
                        let _ = writeln!(s, "{}", cols.map(num).join(","));
                    }
                    s
                }
                Format::Json => json(&rep),
            };
            emit(&text, &args.output.out, stdout)?;
            Ok(status(pass))
        }
        Command::Catalog(args) => {
            let entries = catalog();
            let rows: Vec<CatalogRow> = entries
                .iter()
                .map(|e| CatalogRow {
                    name: e.name,
                    description: e.description,
                    source: e.source,
                    closed_form: e.transform.map(|t| t.of),
                    points: e.points.len(),
                })
                .collect();
            let text = match args.format {
                Format::Csv => rows.iter().map(|r| format!("{}\t{}\n", r.name, r.description)).collect(),
                Format::Json => json(&rows),
            };
            emit(&text, &args.out, stdout)?;
            Ok(0)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // --help and --version also arrive here
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 2;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::Parse { .. } | Error::Validation(_) => 2,
                _ => 1,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["bvfourier"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("-1, 0.5,2").unwrap(), vec![-1.0, 0.5, 2.0]);
        assert_eq!(parse_grid("0:1:5").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("a").is_err());
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&["transform"]).0, 2);
        assert_eq!(call(&["transform", "--expr", "on (0,: x", "--s", "1"]).0, 2);
        assert_eq!(call(&["transform", "--catalog", "nope", "--s", "1"]).0, 2);
        assert_eq!(call(&["selfcheck", "--only", "13"]).0, 2);
    }

    #[test]
    fn arctan_residual_row() {
        let (code, out, _) = call(&["transform", "--catalog", "arctan-residual", "--s", "1"]);
        assert_eq!(code, 0, "{out}");
        let line = out.lines().nth(1).unwrap();
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 7);
        let im: f64 = cols[2].parse().unwrap();
        assert!((im - std::f64::consts::PI * (1.0 - (-1f64).exp())).abs() < 1e-6);
        assert_eq!(cols[6], "true");
    }

    #[test]
    fn invert_arctan() {
        let (code, out, _) = call(&["invert", "--catalog", "arctan", "--x", "-2,0,0.5,3", "--tol", "1e-4"]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(out.lines().count(), 5);
        for line in out.lines().skip(1) {
            let cols: Vec<f64> = line.split(',').take(1).map(|c| c.parse().unwrap()).collect();
            let re: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert!((re - cols[0].atan()).abs() < 1e-4);
        }
    }

    #[test]
    fn gauge_demo_passes() {
        let (code, out, _) = call(&["gauge-demo"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 7);
    }

    #[test]
    fn distrib_json_fields() {
        let (code, out, _) = call(&["distrib", "--catalog", "heaviside"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        for key in ["function_part_ref", "delta_terms", "power_terms", "render"] {
            assert!(v.get(key).is_some(), "{key} missing");
        }
    }
}
