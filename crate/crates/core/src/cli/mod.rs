//! The `compcov` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 computation error, 3 verification
//! mismatch.

mod output;
mod range;
mod verify;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::Value;

use crate::acceleration::{self, EstimateConfig, SequenceSample, Transform, Variable};
use crate::asymptotics::{self, Status};
use crate::cache::{self, Cache};
use crate::ensemble::{Ensemble, Family};
use crate::real::{round_fixed, Real};
use crate::series;
use crate::statistics::{Engine, Method};

pub use output::{Format, Table};
pub use range::LengthRange;
pub use verify::{verify, Mismatch, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_COMPUTE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "compcov", version, about = "Joint statistics of parts and maximum part of integer compositions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correlation of (number of ones, longest zero run) per ensemble.
    Rho(RhoArgs),
    /// Numerator sequences of E[XY].
    Sequence(SequenceArgs),
    /// Compare every counting path against enumeration.
    Verify(VerifyArgs),
    /// Exact moments of compositions of N.
    Moments(MomentsArgs),
    /// Maximum-part predictions beside the exact values.
    Asymptotics(AsymptoticsArgs),
    /// The sequence rho(n) ln(n+1)^exponent.
    Probe(ProbeArgs),
    /// Extrapolate a sequence read as CSV (n,value).
    Accelerate(AccelerateArgs),
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    /// Cache directory; overrides COMPCOV_CACHE_DIR.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

impl EngineArgs {
    fn engine(&self) -> Engine {
        Engine::with_method(self.method)
    }

    fn cache(&self) -> Option<Cache> {
        Cache::from_flag_or_env(self.cache_dir.as_deref())
    }
}

#[derive(Debug, Args)]
pub struct RhoArgs {
    #[arg(long, value_delimiter = ',', default_values_t = Ensemble::ALL.to_vec())]
    pub ensembles: Vec<Ensemble>,
    /// Lengths: start:stop:step or a comma list.
    #[arg(long)]
    pub n: LengthRange,
    #[arg(long, default_value_t = 6)]
    pub digits: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SequenceKind {
    /// Sum of (ones)(longest zero run) over strings of length n = 1, 2, ...
    ExyBitstring,
    /// Sum of (parts)(maximum part) over compositions of N = 1, 2, ...
    ExyComposition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SequenceFormat {
    List,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SequenceArgs {
    #[arg(value_enum)]
    pub kind: SequenceKind,
    #[arg(long, default_value_t = Ensemble::Unconstrained)]
    pub ensemble: Ensemble,
    #[arg(long, default_value_t = Family::Unrestricted)]
    pub family: Family,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, value_enum, default_value_t = SequenceFormat::List)]
    pub format: SequenceFormat,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 14)]
    pub max_n: usize,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long, default_value_t = Family::Unrestricted)]
    pub family: Family,
    /// Composition sizes (at least 2).
    #[arg(long = "N", visible_alias = "total")]
    pub total: LengthRange,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct AsymptoticsArgs {
    #[arg(long, default_value_t = Family::Unrestricted)]
    pub family: Family,
    /// Composition sizes (at least 2).
    #[arg(long = "N", visible_alias = "total")]
    pub total: LengthRange,
    #[arg(long, default_value_t = 6)]
    pub digits: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long, default_value_t = Ensemble::Unconstrained)]
    pub ensemble: Ensemble,
    #[arg(long)]
    pub n: LengthRange,
    #[arg(long, default_value = "2.5")]
    pub exponent: String,
    #[arg(long, default_value_t = 6)]
    pub digits: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformChoice {
    Richardson,
    WynnEpsilon,
    LevinU,
    All,
}

#[derive(Debug, Args)]
pub struct AccelerateArgs {
    /// CSV file with an `n` column; stdin when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Value column name (default: the second column).
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long, value_enum, default_value_t = TransformChoice::All)]
    pub transform: TransformChoice,
    /// Polynomial order in t for Richardson and Levin.
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    #[arg(long, value_enum, default_value_t = Variable::InverseLog)]
    pub variable: Variable,
    /// Treat the values as correlations and extrapolate
    /// rho(n) ln(n+1)^exponent instead.
    #[arg(long)]
    pub exponent: Option<String>,
    #[arg(long, default_value_t = 6)]
    pub digits: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Compute(_) => EXIT_COMPUTE,
            CliError::Mismatch(_) => EXIT_MISMATCH,
        }
    }
}

fn compute(e: impl std::fmt::Display) -> CliError {
    CliError::Compute(e.to_string())
}

/// Parses `args` (including the program name) and runs the command,
/// returning the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command, &mut std::io::stdin().lock()) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command and returns its standard output.
pub fn execute(command: &Command, stdin: &mut dyn Read) -> Result<String, CliError> {
    match command {
        Command::Rho(a) => cmd_rho(a),
        Command::Sequence(a) => cmd_sequence(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Moments(a) => cmd_moments(a),
        Command::Asymptotics(a) => cmd_asymptotics(a),
        Command::Probe(a) => cmd_probe(a),
        Command::Accelerate(a) => cmd_accelerate(a, stdin),
    }
}

fn check_digits(digits: usize) -> Result<(), CliError> {
    if digits == 0 {
        Err(CliError::Usage("--digits must be at least 1".into()))
    } else {
        Ok(())
    }
}

pub fn cmd_rho(a: &RhoArgs) -> Result<String, CliError> {
    check_digits(a.digits)?;
    if a.ensembles.is_empty() {
        return Err(CliError::Usage("no ensembles selected".into()));
    }
    let engine = a.engine.engine();
    let cache = a.engine.cache();
    let ns = a.n.values();
    let mut columns = Vec::new();
    for &e in &a.ensembles {
        let sums = cache::moment_sums_many(cache.as_ref(), &engine, e, ns).map_err(compute)?;
        let col = sums
            .iter()
            .map(|s| s.summary(e).and_then(|m| m.correlation(a.digits)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(compute)?;
        columns.push(col);
    }
    let mut header = vec!["n"];
    header.extend(a.ensembles.iter().map(|e| e.name()));
    let mut t = Table::new(&header);
    t.meta("command", "rho");
    t.meta("method", method_name(a.engine.method));
    t.meta("digits", a.digits);
    for (i, n) in ns.iter().enumerate() {
        let mut row = vec![n.to_string()];
        row.extend(columns.iter().map(|c| c[i].clone()));
        t.push(row);
    }
    Ok(t.render(a.format))
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Recursion => "recursion",
        Method::Gap => "gap",
        Method::Auto => "auto",
    }
}

pub fn cmd_sequence(a: &SequenceArgs) -> Result<String, CliError> {
    let engine = Engine::default();
    let (label, ensemble) = match a.kind {
        SequenceKind::ExyBitstring => (a.ensemble.name(), a.ensemble),
        SequenceKind::ExyComposition => (a.family.name(), a.family.ensemble()),
    };
    // string length n for term i (1-based): n = i, or n = i - 1 for compositions of i
    let offset = usize::from(a.kind == SequenceKind::ExyComposition);
    let lengths: Vec<usize> = (1..=a.count).map(|i| i - offset).collect();
    let sums = engine.moment_sums_many(ensemble, &lengths).map_err(compute)?;
    let terms: Vec<BigInt> = sums
        .iter()
        .map(|s| match a.kind {
            SequenceKind::ExyBitstring => s.sum_ones_run.clone(),
            SequenceKind::ExyComposition => s.composition_numerator(),
        })
        .collect();
    let text: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
    let index = if offset == 1 { "N" } else { "n" };
    let mut t = Table::new(&[index, "value"]);
    t.meta("command", "sequence");
    t.meta("kind", a.kind.to_possible_value().unwrap().get_name());
    t.meta("selection", label);
    for (i, v) in text.iter().enumerate() {
        t.push(vec![(i + 1).to_string(), v.clone()]);
    }
    Ok(match a.format {
        SequenceFormat::List if text.is_empty() => String::new(),
        SequenceFormat::List => format!("{}\n", text.join(",")),
        SequenceFormat::Csv => t.render(Format::Csv),
        SequenceFormat::Json => t.render(Format::Json),
    })
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<String, CliError> {
    let report = verify(a.max_n).map_err(compute)?;
    if report.ok() {
        Ok(format!("{}\n", report.summary()))
    } else {
        let lines: Vec<String> = report
            .mismatches
            .iter()
            .map(|m| format!("MISMATCH: {} {} n={}", m.check, m.ensemble, m.n))
            .collect();
        Err(CliError::Mismatch(lines.join("\n")))
    }
}

fn rational(r: &BigRational) -> String {
    r.to_string()
}

pub fn cmd_moments(a: &MomentsArgs) -> Result<String, CliError> {
    let totals = a.total.values();
    if totals.contains(&1) {
        return Err(compute("moments need N >= 2"));
    }
    let engine = Engine::default();
    let ns: Vec<usize> = totals.iter().map(|t| t - 1).collect();
    let top = *ns.last().expect("non-empty range");
    let maxes = series::max_part_moments_up_to(a.family, top);
    let sums = engine.moment_sums_many(a.family.ensemble(), &ns).map_err(compute)?;
    let mut t = Table::new(&["N", "n", "m", "s2", "mu", "sigma2", "covariance"]);
    t.meta("command", "moments");
    t.meta("family", a.family.name());
    for (s, &n) in sums.iter().zip(&ns) {
        let parts = series::parts_moments(a.family, n).map_err(compute)?;
        let mp = &maxes[n - 1];
        let summary = s.summary(a.family.ensemble()).map_err(compute)?;
        t.push(vec![
            (n + 1).to_string(),
            n.to_string(),
            rational(&parts.m),
            rational(&parts.s2),
            rational(&mp.mu),
            rational(&mp.sigma2),
            rational(&summary.covariance),
        ]);
    }
    Ok(t.render(a.format))
}

pub fn cmd_asymptotics(a: &AsymptoticsArgs) -> Result<String, CliError> {
    check_digits(a.digits)?;
    let rows = asymptotics::compare(a.family, a.total.values()).map_err(compute)?;
    let status = Status::of(a.family);
    let mut t = Table::new(&[
        "N",
        "status",
        "predicted_mean",
        "exact_mean",
        "mean_residual",
        "predicted_var",
        "exact_var",
        "var_residual",
    ]);
    t.meta("command", "asymptotics");
    t.meta("family", a.family.name());
    t.meta("status", status.name());
    t.meta("quantity", "maximum part of a composition of N");
    let d = a.digits;
    for r in rows {
        t.push(vec![
            r.total.to_string(),
            r.status.name().to_string(),
            r.predicted_mean.to_fixed(d),
            round_fixed(&r.exact_mean, d),
            r.mean_residual().to_fixed(d),
            r.predicted_var.to_fixed(d),
            round_fixed(&r.exact_var, d),
            r.var_residual().to_fixed(d),
        ]);
    }
    Ok(t.render(a.format))
}

fn parse_real(flag: &str, s: &str) -> Result<Real, CliError> {
    Real::parse(s).map_err(|_| CliError::Usage(format!("{flag}: not a decimal number: {s:?}")))
}

pub fn cmd_probe(a: &ProbeArgs) -> Result<String, CliError> {
    check_digits(a.digits)?;
    let exponent = parse_real("--exponent", &a.exponent)?;
    let ns = a.n.values();
    if let Some(n) = ns.iter().find(|&&n| n < 3) {
        return Err(compute(asymptotics::AsymptoticsError::ProbeTooShort(*n)));
    }
    let engine = a.engine.engine();
    let cache = a.engine.cache();
    let sums = cache::moment_sums_many(cache.as_ref(), &engine, a.ensemble, ns).map_err(compute)?;
    let mut t = Table::new(&["n", "rho", "q"]);
    t.meta("command", "probe");
    t.meta("ensemble", a.ensemble.name());
    t.meta("exponent", a.exponent.clone());
    for s in &sums {
        let m = s.summary(a.ensemble).map_err(compute)?;
        let rho = m.correlation(a.digits).map_err(compute)?;
        let p = asymptotics::probe_from_rho(s.n, m.correlation(60).map_err(compute)?, &exponent);
        t.push(vec![s.n.to_string(), rho, p.q.to_fixed(a.digits)]);
    }
    Ok(t.render(a.format))
}

/// Reads `n,value` pairs; a header line, if present, names the columns.
fn read_sample(text: &str, column: Option<&str>) -> Result<(Vec<u64>, Vec<Real>), CliError> {
    let usage = |m: String| CliError::Usage(m);
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty()).peekable();
    let mut col = 1;
    let mut n_col = 0;
    if let Some(first) = lines.peek() {
        let fields: Vec<&str> = first.split(',').map(str::trim).collect();
        if fields[0].parse::<u64>().is_err() {
            n_col = fields.iter().position(|f| *f == "n" || *f == "N").unwrap_or(0);
            col = match column {
                Some(name) => fields
                    .iter()
                    .position(|f| *f == name)
                    .ok_or_else(|| usage(format!("no column named {name:?}")))?,
                None => usize::from(n_col == 0),
            };
            lines.next();
        } else if column.is_some() {
            return Err(usage("--column needs a header line".into()));
        }
    }
    let (mut ns, mut values) = (Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let get = |c: usize| fields.get(c).copied().ok_or_else(|| usage(format!("row {}: missing column", i + 1)));
        let n = get(n_col)?.parse::<u64>().map_err(|_| usage(format!("row {}: bad n", i + 1)))?;
        let v = get(col)?;
        ns.push(n);
        values.push(parse_real("input", v)?);
    }
    Ok((ns, values))
}

pub fn cmd_accelerate(a: &AccelerateArgs, stdin: &mut dyn Read) -> Result<String, CliError> {
    check_digits(a.digits)?;
    let text = match &a.input {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?,
        None => {
            let mut s = String::new();
            stdin.read_to_string(&mut s).map_err(compute)?;
            s
        }
    };
    let (ns, mut values) = read_sample(&text, a.column.as_deref())?;
    if let Some(e) = &a.exponent {
        let e = parse_real("--exponent", e)?;
        values = ns
            .iter()
            .zip(&values)
            .map(|(&n, r)| asymptotics::probe_value(r, n as usize, &e))
            .collect();
    }
    let sample = SequenceSample::new(ns, values).map_err(|e| CliError::Usage(e.to_string()))?;
    let config = EstimateConfig {
        richardson_order: a.order,
        levin_order: a.order,
        variable: a.variable,
    };
    let mut t = Table::new(&["transform", "estimate", "error_estimate"]);
    t.meta("command", "accelerate");
    t.meta("points", sample.len());
    t.meta("variable", a.variable.to_possible_value().unwrap().get_name());
    if let Some(e) = &a.exponent {
        t.meta("exponent", e.clone());
        t.meta("label", "extrapolated, conjecture-conditional");
    }
    let d = a.digits;
    let single = |tr: Transform| -> Result<Vec<String>, CliError> {
        let x = acceleration::apply(tr, &sample, &config).map_err(compute)?;
        Ok(vec![tr.name().into(), x.value.to_fixed(d), x.error_estimate.to_fixed(d)])
    };
    match a.transform {
        TransformChoice::Richardson => t.push(single(Transform::Richardson)?),
        TransformChoice::WynnEpsilon => t.push(single(Transform::WynnEpsilon)?),
        TransformChoice::LevinU => t.push(single(Transform::LevinU)?),
        TransformChoice::All => {
            let est = acceleration::estimate_limit(&sample, &config).map_err(compute)?;
            for x in &est.estimates {
                t.push(vec![x.transform.name().into(), x.value.to_fixed(d), x.error_estimate.to_fixed(d)]);
            }
            t.push(vec!["median".into(), est.median.to_fixed(d), est.spread.to_fixed(d)]);
            t.meta("negative", Value::Bool(est.is_negative()));
        }
    }
    Ok(t.render(a.format))
}
