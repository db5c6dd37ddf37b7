//! Command-line front end: matrix and diagonal export, sampling,
//! expectations, regime queries and verification suites.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use permshape::asymptotics::{regime, RegimeQuery, Theorem};
use permshape::bijections::{sample_avoider, SeededRng};
use permshape::exact::{
    matrix_slice, normalize, ExactCounts, LogCounts, MatrixPattern, NormalizedEntry, SliceEntries,
    SliceMode, LOG_SPACE_THRESHOLD,
};
use permshape::perm::{StatKind, S3};
use permshape::statlab::{
    exp_exact, exp_position_exact, mc_expectation, ExpectationReport, PermClass, Position,
};

mod suites;

pub use suites::Suite;

#[derive(Debug, Parser)]
#[command(name = "permshape", version, about = "Position statistics of pattern-avoiding permutations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Export a block of P_n (123) or Q_n (132) as CSV `j,k,value`.
    Matrix(MatrixArgs),
    /// Export the diagonal or anti-diagonal profile as CSV.
    Diag(DiagArgs),
    /// Draw uniform avoiders, one per line.
    Sample(SampleArgs),
    /// Expectation of a statistic over a class, exact or Monte Carlo.
    Stats(StatsArgs),
    /// Exponent, limit constant and decay class of a regime query.
    Limit(LimitArgs),
    /// Run a verification suite; exits 1 if any check fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Normalized,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[arg(long)]
    pub pattern: MatrixPattern,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    /// Row range `a:b` (1-based, inclusive); defaults to all rows.
    #[arg(long, value_parser = parse_range)]
    pub rows: Option<RangeInclusive<usize>>,
    #[arg(long, value_parser = parse_range)]
    pub cols: Option<RangeInclusive<usize>>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagPattern {
    One(MatrixPattern),
    Both,
}

impl std::str::FromStr for DiagPattern {
    type Err = permshape::Error;

    fn from_str(s: &str) -> permshape::Result<Self> {
        if s == "both" {
            Ok(DiagPattern::Both)
        } else {
            s.parse().map(DiagPattern::One)
        }
    }
}

#[derive(Debug, Args)]
pub struct DiagArgs {
    /// 123, 132, or both (columns `k,p123,q132`).
    #[arg(long)]
    pub pattern: DiagPattern,
    #[arg(long)]
    pub n: usize,
    /// Use cells (k, n+1-k).
    #[arg(long)]
    pub anti: bool,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    /// Only rows with k in `a:b`.
    #[arg(long, value_parser = parse_range)]
    pub range: Option<RangeInclusive<usize>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// 123, 132, 321 or 231.
    #[arg(long)]
    pub pattern: S3,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatName {
    Fp,
    Afp,
    First,
    Last,
    Lis,
    Rank,
    Chi2,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long, value_enum)]
    pub stat: StatName,
    /// λ for `rank`; defaults to 1.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// 123, 132, 321, 231 or uniform.
    #[arg(long)]
    pub pattern: PermClass,
    #[arg(long)]
    pub n: usize,
    #[arg(long, conflicts_with = "mc", required_unless_present = "mc")]
    pub exact: bool,
    #[arg(long, requires_all = ["samples", "seed"])]
    pub mc: bool,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[arg(long)]
    pub theorem: Theorem,
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Largest size exercised; each suite has its own default.
    #[arg(long)]
    pub max_n: Option<usize>,
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected a:b, got {s:?}"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad range start {a:?}"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad range end {b:?}"))?;
    Ok(a..=b)
}

/// Failure of a subcommand, with its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad input; exit 2.
    Usage(String),
    /// A violated internal invariant; exit 3.
    Internal(String),
    /// A verification suite ran but some checks failed; exit 1.
    Failed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
            CliError::Failed(k) => write!(f, "{k} check(s) failed"),
        }
    }
}

impl From<permshape::Error> for CliError {
    fn from(e: permshape::Error) -> Self {
        if e.is_internal() {
            CliError::Internal(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Internal(format!("i/o: {e}"))
    }
}

type CliResult<T = ()> = Result<T, CliError>;

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command, out: &mut dyn Write) -> CliResult {
    match command {
        Command::Matrix(a) => with_output(a.out.clone(), out, |w| matrix(&a, w)),
        Command::Diag(a) => with_output(a.out.clone(), out, |w| diag(&a, w)),
        Command::Sample(a) => sample(&a, out),
        Command::Stats(a) => stats(&a, out),
        Command::Limit(a) => limit(&a, out),
        Command::Verify(a) => suites::verify(a.suite, a.max_n, out),
    }
}

fn with_output(
    path: Option<PathBuf>,
    out: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> CliResult,
) -> CliResult {
    match path {
        None => body(out),
        Some(p) => {
            let file = File::create(&p)
                .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", p.display())))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}

/// A ratio in 12-significant-digit scientific notation. Ratios below the
/// `f64` range are rebuilt from their logarithm.
pub fn format_ratio(e: NormalizedEntry) -> String {
    if e.ratio.is_normal() {
        return format!("{:.11e}", e.ratio);
    }
    if !e.log_ratio.is_finite() {
        return format!("{:.11e}", 0.0);
    }
    let l10 = e.log_ratio / std::f64::consts::LN_10;
    let mut exp = l10.floor();
    let mut mant = format!("{:.11}", 10f64.powf(l10 - exp));
    if mant.starts_with("10") {
        exp += 1.0;
        mant = format!("{:.11}", 1.0);
    }
    format!("{mant}e{}", exp as i64)
}

fn matrix(a: &MatrixArgs, w: &mut dyn Write) -> CliResult {
    let all = 1..=a.n;
    let rows = a.rows.clone().unwrap_or_else(|| all.clone());
    let cols = a.cols.clone().unwrap_or(all);
    let mode = match a.mode {
        Mode::Exact => SliceMode::Exact,
        Mode::Normalized => SliceMode::Normalized,
    };
    let slice = matrix_slice(a.pattern, a.n, rows, cols, mode)?;
    writeln!(w, "j,k,value")?;
    match &slice.entries {
        SliceEntries::Exact(v) => {
            for ((j, k), c) in slice.cells().zip(v) {
                writeln!(w, "{j},{k},{c}")?;
            }
        }
        SliceEntries::Normalized(v) => {
            for ((j, k), e) in slice.cells().zip(v) {
                writeln!(w, "{j},{k},{}", format_ratio(*e))?;
            }
        }
    }
    Ok(())
}

/// Diagonal values of one matrix as CSV fields.
fn diagonal_column(pattern: MatrixPattern, n: usize, anti: bool, mode: Mode) -> CliResult<Vec<String>> {
    let cell = |k: usize| (k, if anti { n + 1 - k } else { k });
    Ok(match mode {
        Mode::Exact => ExactCounts::new(pattern, n)
            .diagonal(anti)
            .into_iter()
            .map(|c| c.to_string())
            .collect(),
        Mode::Normalized if n > LOG_SPACE_THRESHOLD => {
            let logs = LogCounts::new(pattern, n);
            (1..=n)
                .map(|k| {
                    let (j, kk) = cell(k);
                    format_ratio(logs.entry(j, kk))
                })
                .collect()
        }
        Mode::Normalized => ExactCounts::new(pattern, n)
            .diagonal(anti)
            .iter()
            .map(|c| normalize(c, n).map(format_ratio))
            .collect::<permshape::Result<_>>()?,
    })
}

fn diag(a: &DiagArgs, w: &mut dyn Write) -> CliResult {
    let n = a.n;
    if n == 0 {
        return Err(CliError::Usage("diag needs n >= 1".into()));
    }
    let range = a.range.clone().unwrap_or(1..=n);
    if range.is_empty() || *range.start() < 1 || *range.end() > n {
        return Err(CliError::Usage(format!(
            "range {}:{} not within [1,{n}]",
            range.start(),
            range.end()
        )));
    }
    let patterns: Vec<MatrixPattern> = match a.pattern {
        DiagPattern::One(p) => vec![p],
        DiagPattern::Both => vec![MatrixPattern::P123, MatrixPattern::Q132],
    };
    let columns = patterns
        .iter()
        .map(|&p| diagonal_column(p, n, a.anti, a.mode))
        .collect::<CliResult<Vec<_>>>()?;
    match a.pattern {
        DiagPattern::One(_) => writeln!(w, "k,value")?,
        DiagPattern::Both => writeln!(w, "k,p123,q132")?,
    }
    for k in range {
        let fields: Vec<&str> = columns.iter().map(|c| c[k - 1].as_str()).collect();
        writeln!(w, "{k},{}", fields.join(","))?;
    }
    Ok(())
}

fn sample(a: &SampleArgs, w: &mut dyn Write) -> CliResult {
    if a.n == 0 {
        return Err(CliError::Usage("sample needs n >= 1".into()));
    }
    let mut rng = SeededRng::new(a.seed);
    for _ in 0..a.count {
        writeln!(w, "{}", sample_avoider(a.n, a.pattern, &mut rng)?)?;
    }
    Ok(())
}

fn stat_kind(a: &StatsArgs) -> CliResult<StatKind> {
    if a.lambda.is_some() && a.stat != StatName::Rank {
        return Err(CliError::Usage("--lambda applies only to --stat rank".into()));
    }
    let name = match a.stat {
        StatName::Fp => "fp".to_string(),
        StatName::Afp => "afp".to_string(),
        StatName::First => "first".to_string(),
        StatName::Last => "last".to_string(),
        StatName::Lis => "lis".to_string(),
        StatName::Chi2 => "chi2".to_string(),
        StatName::Rank => format!("rank:{}", a.lambda.unwrap_or(1.0)),
    };
    Ok(name.parse()?)
}

fn stats(a: &StatsArgs, w: &mut dyn Write) -> CliResult {
    let kind = stat_kind(a)?;
    let report: ExpectationReport = if a.mc {
        let samples = a.samples.ok_or_else(|| CliError::Usage("--mc needs --samples".into()))?;
        let seed = a.seed.ok_or_else(|| CliError::Usage("--mc needs --seed".into()))?;
        mc_expectation(kind, a.pattern, a.n, samples, seed)?
    } else {
        let position = match (kind, a.pattern) {
            (StatKind::First, PermClass::Avoid123) => Some(Position::First123),
            (StatKind::First, PermClass::Avoid132) => Some(Position::First132),
            (StatKind::Last, PermClass::Avoid132) => Some(Position::Last132),
            _ => None,
        };
        match position {
            Some(p) => exp_position_exact(a.n, p)?,
            None => exp_exact(kind, a.pattern, a.n)?,
        }
    };
    writeln!(w, "{}", report.to_line())?;
    Ok(())
}

fn limit(a: &LimitArgs, w: &mut dyn Write) -> CliResult {
    let q = RegimeQuery::new(a.a, a.b, a.c, a.alpha)?;
    let r = regime(a.theorem, &q)?;
    let constant = r
        .limit_constant
        .map(|v| format!("{v:.15e}"))
        .unwrap_or_else(|| "none".into());
    let exponent = if r.exponent.is_infinite() {
        "inf".to_string()
    } else {
        r.exponent.to_string()
    };
    writeln!(w, "theorem: {}", a.theorem)?;
    writeln!(w, "query: {q}")?;
    writeln!(w, "exponent: {exponent}")?;
    writeln!(w, "limit_constant: {constant}")?;
    writeln!(w, "decay: {}", r.decay)?;
    writeln!(w, "offset: {}", r.offset)?;
    writeln!(w, "branch: {}", r.branch)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3:7").unwrap(), 3..=7);
        assert!(parse_range("3-7").is_err());
        assert!(parse_range("a:7").is_err());
    }

    #[test]
    fn ratio_formatting() {
        let e = NormalizedEntry::from_log(0.25f64.ln());
        assert_eq!(format_ratio(e), "2.50000000000e-1");
        let tiny = NormalizedEntry::from_log(-1000.0);
        assert_eq!(format_ratio(tiny), "5.07595889755e-435");
        let zero = NormalizedEntry::from_log(f64::NEG_INFINITY);
        assert_eq!(format_ratio(zero), "0.00000000000e0");
    }

    #[test]
    fn error_codes() {
        let internal: CliError = permshape::Error::Consistency("x".into()).into();
        assert_eq!(internal.exit_code(), 3);
        let domain: CliError = permshape::Error::Domain("x".into()).into();
        assert_eq!(domain.exit_code(), 2);
        assert_eq!(CliError::Failed(2).exit_code(), 1);
    }
}
