//! Command-line front end: `eval`, `table`, `verify` and `constants`.
//!
//! Exit codes: 0 success, 1 domain error or failed checks, 2 usage or
//! configuration error, 3 I/O error.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{verify_grid_with, Constants, Execution, Family, GridSpec, VerifyReport};
use crate::distortion::{eta, eta_log, lambda, phi, quasisymmetry_margin, schottky_psi, singular_value, Dilatation};
use crate::elliptic::{ellint_e, ellint_k, UnitRadius};
use crate::error::Error;
use crate::modulus::{m_function, mu, mu_inverse};

#[derive(Debug, Parser)]
#[command(name = "qcdist", version, about = "Quasiconformal distortion functions and their bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a function at one point.
    Eval(EvalArgs),
    /// Evaluate a function over a sweep of one or two parameters.
    Table(EvalArgs),
    /// Check every bound over a parameter grid.
    Verify(VerifyArgs),
    /// Print the numerical constants next to their published values.
    Constants(OutputArgs),
}

/// Functions available to `eval` and `table`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Function {
    /// Complete elliptic integral K(r).
    #[value(name = "K")]
    EllipticK,
    /// Complete elliptic integral E(r).
    #[value(name = "E")]
    EllipticE,
    /// Grötzsch ring modulus mu(r).
    Mu,
    /// Inverse modulus mu^{-1}(y).
    MuInv,
    /// m(r) = (2/pi) r'^2 K(r) K(r').
    M,
    /// Distortion function phi_K(r).
    Phi,
    /// lambda(K) = eta_K(1).
    Lambda,
    /// Distortion function eta_K(t).
    Eta,
    /// log eta_K(t).
    EtaLog,
    /// Schottky bound Psi(a, |z|).
    Psi,
    /// Singular value k_p.
    Kp,
    /// Quasisymmetry margin at K.
    QsMargin,
}

impl Function {
    fn name(self) -> &'static str {
        match self {
            Function::EllipticK => "K",
            Function::EllipticE => "E",
            Function::Mu => "mu",
            Function::MuInv => "mu-inv",
            Function::M => "m",
            Function::Phi => "phi",
            Function::Lambda => "lambda",
            Function::Eta => "eta",
            Function::EtaLog => "eta-log",
            Function::Psi => "psi",
            Function::Kp => "kp",
            Function::QsMargin => "qs-margin",
        }
    }

    fn params(self) -> &'static [Param] {
        use Param::*;
        match self {
            Function::EllipticK | Function::EllipticE | Function::Mu | Function::M => &[R],
            Function::MuInv => &[Y],
            Function::Phi => &[K, R],
            Function::Lambda | Function::QsMargin => &[K],
            Function::Eta | Function::EtaLog => &[K, T],
            Function::Psi => &[A, Z],
            Function::Kp => &[P],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    K,
    R,
    T,
    Y,
    A,
    Z,
    P,
}

impl Param {
    fn flag(self) -> &'static str {
        match self {
            Param::K => "K",
            Param::R => "r",
            Param::T => "t",
            Param::Y => "y",
            Param::A => "a",
            Param::Z => "z",
            Param::P => "p",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Plain,
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
    /// Significant digits of plain and CSV values (1 to 17).
    #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u8).range(1..=17))]
    pub digits: u8,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    pub function: Function,
    /// Maximal dilatation K.
    #[arg(long = "K", allow_negative_numbers = true)]
    pub k: Option<Range>,
    /// Radius r in [0, 1].
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<Range>,
    /// Ratio t >= 0.
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<Range>,
    /// Argument y > 0 of mu^{-1}.
    #[arg(long, allow_negative_numbers = true)]
    pub y: Option<Range>,
    /// Point a of the Schottky bound.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<Range>,
    /// Modulus |z| < 1 of the Schottky bound.
    #[arg(long, allow_negative_numbers = true)]
    pub z: Option<Range>,
    /// Positive integer index of a singular value.
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<Range>,
    /// Space swept points logarithmically.
    #[arg(long)]
    pub log: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Comma-separated families to run (default: all).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    /// Dilatations of the grid, as `start:stop:count`.
    #[arg(long = "K", allow_negative_numbers = true)]
    pub k: Option<Range>,
    /// Ratios of the grid, as `start:stop:count`.
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<Range>,
    /// Space the grid ranges logarithmically.
    #[arg(long)]
    pub log: bool,
    /// Include every check in JSON output and list every check in plain output.
    #[arg(long)]
    pub full: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// A value `v`, an inclusive sweep `start:stop:count`, or an integer sweep
/// `start:stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Range {
    Single(f64),
    Sweep { start: f64, stop: f64, count: usize },
    Integers { start: f64, stop: f64 },
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("'{x}' is not a number"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [v] => Ok(Range::Single(num(v)?)),
            [a, b] => Ok(Range::Integers {
                start: num(a)?,
                stop: num(b)?,
            }),
            [a, b, n] => {
                let count = n
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| format!("count '{n}' is not a non-negative integer"))?;
                if count == 0 {
                    return Err("count must be at least 1".into());
                }
                Ok(Range::Sweep {
                    start: num(a)?,
                    stop: num(b)?,
                    count,
                })
            }
            _ => Err(format!("'{s}' is not of the form v, start:stop or start:stop:count")),
        }
    }
}

impl Range {
    /// Points of the range in sweep order.
    pub fn points(self, log: bool) -> Result<Vec<f64>, String> {
        match self {
            Range::Single(v) => Ok(vec![v]),
            Range::Integers { start, stop } => {
                if start.fract() != 0.0 || stop.fract() != 0.0 || start > stop {
                    return Err(format!("integer range {start}:{stop} needs integers with start <= stop"));
                }
                Ok((start as i64..=stop as i64).map(|i| i as f64).collect())
            }
            Range::Sweep { start, stop, count } => {
                if count == 1 {
                    return Ok(vec![start]);
                }
                let (a, b) = if log {
                    if !(start > 0.0 && stop > 0.0) {
                        return Err(format!("log spacing needs positive endpoints, got {start}:{stop}"));
                    }
                    (start.log10(), stop.log10())
                } else {
                    (start, stop)
                };
                let step = (b - a) / (count - 1) as f64;
                Ok((0..count)
                    .map(|i| {
                        if i == 0 {
                            start
                        } else if i + 1 == count {
                            stop
                        } else if log {
                            10f64.powf(a + step * i as f64)
                        } else {
                            a + step * i as f64
                        }
                    })
                    .collect())
            }
        }
    }
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn io(e: io::Error) -> Self {
        Self {
            code: 3,
            message: format!("I/O error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) => 2,
            Error::Domain { .. } | Error::Overflow { .. } => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Formats `v` with `digits` significant digits: positional notation for
/// decimal exponents in `[-5, 16)`, scientific otherwise.
pub fn format_sig(v: f64, digits: u8) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let d = usize::from(digits.clamp(1, 17));
    let sci = format!("{:.*e}", d - 1, v);
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if v == 0.0 || (-5..16).contains(&exp) {
        format!("{:.*}", (d as i32 - 1 - exp).max(0) as usize, v)
    } else {
        sci
    }
}

/// Evaluates `function` at named arguments.
pub fn evaluate(function: Function, args: &[(Param, f64)]) -> crate::error::Result<f64> {
    let get = |p: Param| args.iter().find(|(q, _)| *q == p).map(|(_, v)| *v).expect("arity checked");
    let radius = || UnitRadius::new(get(Param::R));
    let dil = || Dilatation::new(get(Param::K));
    match function {
        Function::EllipticK => ellint_k(radius()?),
        Function::EllipticE => Ok(ellint_e(radius()?)),
        Function::Mu => mu(radius()?),
        Function::MuInv => mu_inverse(get(Param::Y)).map(UnitRadius::r),
        Function::M => m_function(radius()?).map(|m| m.value),
        Function::Phi => phi(dil()?, radius()?).map(UnitRadius::r),
        Function::Lambda => lambda(dil()?),
        Function::Eta => eta(dil()?, get(Param::T)),
        Function::EtaLog => eta_log(dil()?, get(Param::T)),
        Function::Psi => schottky_psi(get(Param::A), get(Param::Z)),
        Function::Kp => {
            let p = get(Param::P);
            if !(p >= 1.0 && p.fract() == 0.0 && p <= f64::from(u32::MAX)) {
                return Err(crate::error::domain(
                    "singular_value",
                    format!("p = {p} must be a positive integer"),
                ));
            }
            singular_value(p as u32).map(|s| s.k_p.r())
        }
        Function::QsMargin => quasisymmetry_margin(dil()?),
    }
}

/// Swept argument lists for `function`, in row-major order of its parameters.
fn sweep(e: &EvalArgs) -> Result<Vec<Vec<(Param, f64)>>, CliError> {
    let given = |p: Param| match p {
        Param::K => e.k,
        Param::R => e.r,
        Param::T => e.t,
        Param::Y => e.y,
        Param::A => e.a,
        Param::Z => e.z,
        Param::P => e.p,
    };
    let needed = e.function.params();
    for p in [Param::K, Param::R, Param::T, Param::Y, Param::A, Param::Z, Param::P] {
        let flag = p.flag();
        match (needed.contains(&p), given(p).is_some()) {
            (true, false) => return Err(CliError::usage(format!("{} needs --{flag}", e.function.name()))),
            (false, true) => return Err(CliError::usage(format!("{} does not take --{flag}", e.function.name()))),
            _ => {}
        }
    }
    let mut rows: Vec<Vec<(Param, f64)>> = vec![Vec::new()];
    for &p in needed {
        let values = given(p).expect("checked").points(e.log).map_err(CliError::usage)?;
        rows = rows
            .into_iter()
            .flat_map(|row| {
                values.iter().map(move |&v| {
                    let mut r = row.clone();
                    r.push((p, v));
                    r
                })
            })
            .collect();
    }
    Ok(rows)
}

#[derive(Serialize)]
struct Row {
    function: &'static str,
    args: serde_json::Map<String, serde_json::Value>,
    value: f64,
}

fn row(function: Function, args: &[(Param, f64)], value: f64) -> Row {
    Row {
        function: function.name(),
        args: args.iter().map(|(p, v)| (p.flag().to_string(), serde_json::json!(v))).collect(),
        value,
    }
}

fn open(out: &OutputArgs) -> Result<Box<dyn Write>, CliError> {
    Ok(match &out.output {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(CliError::io)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Runs a parsed command, writing to its output sink. Returns the exit code
/// for completed runs (0, or 1 when checks fail).
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let out = match &cli.command {
        Command::Eval(a) | Command::Table(a) => &a.out,
        Command::Verify(a) => &a.out,
        Command::Constants(a) => a,
    };
    let mut sink = open(out)?;
    let code = run_to(cli, &mut sink)?;
    sink.flush().map_err(CliError::io)?;
    Ok(code)
}

/// [`run`] with an explicit sink.
pub fn run_to(cli: &Cli, sink: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Eval(a) => run_eval(a, sink, true),
        Command::Table(a) => run_eval(a, sink, false),
        Command::Verify(a) => run_verify(a, sink),
        Command::Constants(a) => run_constants(a, sink),
    }
}

fn run_eval(e: &EvalArgs, sink: &mut dyn Write, single: bool) -> Result<i32, CliError> {
    let rows = sweep(e)?;
    if single && rows.len() != 1 {
        return Err(CliError::usage("eval takes single values; use table for sweeps"));
    }
    let mut values = Vec::with_capacity(rows.len());
    for args in &rows {
        let v = evaluate(e.function, args).map_err(CliError::from)?;
        values.push(row(e.function, args, v));
    }
    let digits = e.out.digits;
    let names: Vec<&str> = e.function.params().iter().map(|p| p.flag()).collect();
    match e.out.format {
        Format::Json => {
            let text = if single {
                serde_json::to_string_pretty(&values[0])
            } else {
                serde_json::to_string_pretty(&values)
            };
            writeln!(sink, "{}", text.expect("rows serialise")).map_err(CliError::io)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *sink);
            let mut header: Vec<&str> = names.clone();
            header.push(e.function.name());
            w.write_record(&header).map_err(|e| CliError::io(e.into()))?;
            for (args, r) in rows.iter().zip(&values) {
                let mut rec: Vec<String> = args.iter().map(|(_, v)| v.to_string()).collect();
                rec.push(format_sig(r.value, digits));
                w.write_record(&rec).map_err(|e| CliError::io(e.into()))?;
            }
            w.flush().map_err(CliError::io)?;
        }
        Format::Plain => {
            if single {
                writeln!(sink, "{}", format_sig(values[0].value, digits)).map_err(CliError::io)?;
            } else {
                let mut header: Vec<String> = names.iter().map(|s| s.to_string()).collect();
                header.push(e.function.name().to_string());
                writeln!(sink, "{}", header.join("\t")).map_err(CliError::io)?;
                for (args, r) in rows.iter().zip(&values) {
                    let mut cols: Vec<String> = args.iter().map(|(_, v)| v.to_string()).collect();
                    cols.push(format_sig(r.value, digits));
                    writeln!(sink, "{}", cols.join("\t")).map_err(CliError::io)?;
                }
            }
        }
    }
    Ok(0)
}

fn grid_from(a: &VerifyArgs) -> Result<GridSpec, CliError> {
    let mut spec = GridSpec::default();
    if let Some(k) = a.k {
        spec.k_values = k.points(a.log).map_err(CliError::usage)?;
    }
    if let Some(t) = a.t {
        spec.t_values = t.points(a.log).map_err(CliError::usage)?;
    }
    if !a.only.is_empty() {
        spec.families = a.only.iter().map(|s| s.trim().parse::<Family>()).collect::<Result<_, _>>()?;
    }
    Ok(spec)
}

fn run_verify(a: &VerifyArgs, sink: &mut dyn Write) -> Result<i32, CliError> {
    let spec = grid_from(a)?;
    let execution = Execution::from_env()?;
    let report = verify_grid_with(&spec, execution)?;
    write_report(&report, a, sink)?;
    Ok(if report.passed() { 0 } else { 1 })
}

fn write_report(report: &VerifyReport, a: &VerifyArgs, sink: &mut dyn Write) -> Result<(), CliError> {
    let d = a.out.digits;
    match a.out.format {
        Format::Json => {
            let text = serde_json::to_string_pretty(&report.to_json(a.full)).expect("report serialises");
            writeln!(sink, "{text}").map_err(CliError::io)
        }
        Format::Csv => report.write_csv(&mut *sink).map_err(|e| CliError::io(e.into())),
        Format::Plain => {
            let s = report.summary();
            let w = |sink: &mut dyn Write, line: String| writeln!(sink, "{line}").map_err(CliError::io);
            for f in &s.families {
                let t = &f.tightest;
                w(
                    sink,
                    format!(
                        "{:<40} {:>6} points  min margin {:>22}  at {}  lhs {}  rhs {}",
                        f.name,
                        f.points,
                        format_sig(f.min_margin, d),
                        point_text(&t.point),
                        format_sig(t.lhs, d),
                        format_sig(t.rhs, d)
                    ),
                )?;
            }
            if a.full {
                for c in &report.checks {
                    w(
                        sink,
                        format!(
                            "{} {} {} lhs {} rhs {} margin {} {:?}",
                            if c.pass { "PASS" } else { "FAIL" },
                            c.name,
                            point_text(&c.point),
                            format_sig(c.lhs, d),
                            format_sig(c.rhs, d),
                            format_sig(c.margin, d),
                            c.domain
                        ),
                    )?;
                }
            }
            for c in report.failures() {
                w(
                    sink,
                    format!(
                        "FAILED {} at {}: lhs {} rhs {} margin {}",
                        c.name,
                        point_text(&c.point),
                        c.lhs,
                        c.rhs,
                        c.margin
                    ),
                )?;
            }
            for k in &report.skipped {
                w(sink, format!("skipped {} at {}: {}", k.family, point_text(&k.point), k.reason))?;
            }
            w(sink, format!("total {}  failed {}  skipped {}", s.total, s.failed, s.skipped))
        }
    }
}

fn point_text(p: &crate::bounds::Point) -> String {
    let parts: Vec<String> = [("K", p.k), ("L", p.l), ("t", p.t), ("p", p.p), ("delta", p.delta)]
        .iter()
        .filter_map(|(n, v)| v.map(|v| format!("{n}={v}")))
        .collect();
    if parts.is_empty() {
        "-".into()
    } else {
        parts.join(",")
    }
}

fn run_constants(out: &OutputArgs, sink: &mut dyn Write) -> Result<i32, CliError> {
    let table = Constants::compute()?.table();
    let d = out.digits;
    match out.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Entry<'a> {
                #[serde(flatten)]
                entry: &'a crate::bounds::ConstantEntry,
                difference: f64,
                within_tolerance: bool,
            }
            let rows: Vec<Entry> = table
                .iter()
                .map(|e| Entry {
                    entry: e,
                    difference: e.difference(),
                    within_tolerance: e.within_tolerance(),
                })
                .collect();
            writeln!(sink, "{}", serde_json::to_string_pretty(&rows).expect("constants serialise")).map_err(CliError::io)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *sink);
            let io = |e: csv::Error| CliError::io(e.into());
            w.write_record(["name", "value", "published", "difference", "tolerance", "ok", "definition"])
                .map_err(io)?;
            for e in &table {
                w.write_record([
                    e.name.to_string(),
                    format_sig(e.value, d),
                    e.published.to_string(),
                    format_sig(e.difference(), 3),
                    e.tolerance.to_string(),
                    e.within_tolerance().to_string(),
                    e.definition.to_string(),
                ])
                .map_err(io)?;
            }
            w.flush().map_err(CliError::io)?;
        }
        Format::Plain => {
            for e in &table {
                writeln!(
                    sink,
                    "{:<13} {:>22}  published {:<8} |diff| {:<9} tol {:<6} {}  {}",
                    e.name,
                    format_sig(e.value, d),
                    e.published,
                    format_sig(e.difference(), 3),
                    e.tolerance,
                    if e.within_tolerance() { "ok" } else { "OUT" },
                    e.definition
                )
                .map_err(CliError::io)?;
            }
        }
    }
    Ok(if table.iter().all(|e| e.within_tolerance()) { 0 } else { 1 })
}
