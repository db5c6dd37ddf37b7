//! Expectations of permutation statistics over the avoider classes, exactly
//! (from the position matrices) or by Monte Carlo, and log-log slope fits.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::bijections::{sample_avoider, sample_uniform, SeededRng};
use crate::error::{Error, Result};
use crate::exact::{catalan, catalans, ExactCounts, LogCounts, MatrixPattern};
use crate::perm::{
    all_permutations, enumerate_avoiders, stat, Permutation, StatKind, S3,
};

/// A family of permutations to average over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PermClass {
    Avoid123,
    Avoid132,
    Avoid321,
    Avoid231,
    /// All of `S_n`.
    Uniform,
}

impl PermClass {
    pub const ALL: [PermClass; 5] = [
        PermClass::Avoid123,
        PermClass::Avoid132,
        PermClass::Avoid321,
        PermClass::Avoid231,
        PermClass::Uniform,
    ];

    pub fn pattern(self) -> Option<S3> {
        match self {
            PermClass::Avoid123 => Some(S3::P123),
            PermClass::Avoid132 => Some(S3::P132),
            PermClass::Avoid321 => Some(S3::P321),
            PermClass::Avoid231 => Some(S3::P231),
            PermClass::Uniform => None,
        }
    }

    /// Position matrix and whether rows are read reversed: the 321 and
    /// 231 classes are reversals of the 123 and 132 classes.
    fn matrix(self) -> Option<(MatrixPattern, bool)> {
        match self {
            PermClass::Avoid123 => Some((MatrixPattern::P123, false)),
            PermClass::Avoid132 => Some((MatrixPattern::Q132, false)),
            PermClass::Avoid321 => Some((MatrixPattern::P123, true)),
            PermClass::Avoid231 => Some((MatrixPattern::Q132, true)),
            PermClass::Uniform => None,
        }
    }

    pub fn sample(self, n: usize, rng: &mut SeededRng) -> Result<Permutation> {
        match self.pattern() {
            Some(p) => sample_avoider(n, p, rng),
            None => Ok(sample_uniform(n, rng)),
        }
    }
}

impl fmt::Display for PermClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pattern() {
            Some(p) => write!(f, "{p}"),
            None => f.write_str("uniform"),
        }
    }
}

impl FromStr for PermClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "123" => Ok(PermClass::Avoid123),
            "132" => Ok(PermClass::Avoid132),
            "321" => Ok(PermClass::Avoid321),
            "231" => Ok(PermClass::Avoid231),
            "uniform" | "all" => Ok(PermClass::Uniform),
            other => Err(Error::domain(format!(
                "class must be 123, 132, 321, 231 or uniform, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Mc { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReportValue {
    /// Exact rational from bignum counts.
    Rational(BigRational),
    /// Double-precision value; `stderr` is set for Monte Carlo estimates.
    Real { value: f64, stderr: Option<f64> },
}

impl ReportValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            ReportValue::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            ReportValue::Real { value, .. } => *value,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ReportValue::Rational(r) => Some(r),
            ReportValue::Real { .. } => None,
        }
    }

    pub fn stderr(&self) -> Option<f64> {
        match self {
            ReportValue::Real { stderr, .. } => *stderr,
            ReportValue::Rational(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationReport {
    pub stat: StatKind,
    pub class: PermClass,
    pub n: usize,
    pub method: Method,
    pub value: ReportValue,
}

impl ExpectationReport {
    pub fn value_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// `stat class n method value stderr seed`, space separated; `stderr`
    /// and `seed` are empty for exact reports.
    pub fn to_line(&self) -> String {
        let value = match &self.value {
            ReportValue::Rational(r) => r.to_string(),
            ReportValue::Real { value, .. } => format!("{value:.15e}"),
        };
        let stderr = self
            .value
            .stderr()
            .map(|s| format!("{s:.6e}"))
            .unwrap_or_default();
        let (method, seed) = match self.method {
            Method::Exact => ("exact".to_string(), String::new()),
            Method::Mc { samples, seed } => (format!("mc({samples})"), seed.to_string()),
        };
        format!(
            "{} {} {} {} {} {} {}",
            self.stat, self.class, self.n, method, value, stderr, seed
        )
    }
}

/// Largest `n` for bignum exact expectations of single-row or diagonal
/// statistics (`fp`, `afp`, `first`, `last`).
pub const BIGNUM_MAX_N: usize = 500;
/// Largest `n` for the log-space float path of the same statistics.
pub const LOGSPACE_MAX_N: usize = 5000;
/// Whole-matrix statistics (`chi2`) cost `O(n^3)` on the 132 matrix.
pub const FULL_MATRIX_BIGNUM_MAX_N: usize = 120;
pub const FULL_MATRIX_LOGSPACE_MAX_N: usize = 2000;

fn bounds(kind: StatKind) -> (usize, usize) {
    match kind {
        StatKind::Chi2 => (FULL_MATRIX_BIGNUM_MAX_N, FULL_MATRIX_LOGSPACE_MAX_N),
        _ => (BIGNUM_MAX_N, LOGSPACE_MAX_N),
    }
}

/// Cells `(i, v)` where the weight of `kind` can be nonzero.
fn support(kind: StatKind, n: usize) -> Box<dyn Iterator<Item = (usize, usize)>> {
    match kind {
        StatKind::Fp => Box::new((1..=n).map(|i| (i, i))),
        StatKind::Afp => Box::new((1..=n).map(move |i| (i, n + 1 - i))),
        StatKind::First => Box::new((1..=n).map(|v| (1, v))),
        StatKind::Last => Box::new((1..=n).map(move |v| (n, v))),
        _ => Box::new((1..=n).flat_map(move |i| (1..=n).map(move |v| (i, v)))),
    }
}

/// Neumaier-compensated running sum; the order of additions is fixed, so
/// results are reproducible bit for bit.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `E[kind]` over `class` in `S_n`, exact, for cell-additive statistics
/// (`fp`, `afp`, `first`, `last`, `chi2`).
///
/// Bignum rationals up to [`BIGNUM_MAX_N`] (or [`FULL_MATRIX_BIGNUM_MAX_N`]
/// for `chi2`), log-space doubles beyond that, refusal past
/// [`LOGSPACE_MAX_N`] (or [`FULL_MATRIX_LOGSPACE_MAX_N`]).
///
/// Other statistics are averaged over an enumeration of the class, for
/// `n` up to [`crate::perm::MAX_ENUMERATION_N`] (10 for the uniform class).
pub fn exp_exact(kind: StatKind, class: PermClass, n: usize) -> Result<ExpectationReport> {
    if !kind.is_cell_additive() {
        return exp_enumerated(kind, class, n);
    }
    let (big_max, float_max) = bounds(kind);
    if n <= big_max {
        exp_exact_rational(kind, class, n)
    } else if n <= float_max {
        exp_exact_float(kind, class, n)
    } else {
        Err(Error::TooLarge {
            what: "exact expectation size n",
            requested: n,
            bound: float_max,
        })
    }
}

fn check_exact_args(kind: StatKind, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("expectations need n >= 1"));
    }
    if !kind.is_cell_additive() {
        return Err(Error::domain(format!(
            "{kind} is not a sum over cells; use the Monte Carlo estimator"
        )));
    }
    Ok(())
}

/// Exact mean of any statistic by enumerating the class.
pub fn exp_enumerated(kind: StatKind, class: PermClass, n: usize) -> Result<ExpectationReport> {
    if n == 0 {
        return Err(Error::domain("expectations need n >= 1"));
    }
    let mut total = 0u64;
    let mut size = 0u64;
    let mut add = |s: &Permutation| -> Result<()> {
        total += stat(s, kind)?.value;
        size += 1;
        Ok(())
    };
    match class.pattern() {
        Some(p) => {
            for s in enumerate_avoiders(n, &p.into())? {
                add(&s)?;
            }
        }
        None => {
            for s in all_permutations(n)? {
                add(&s)?;
            }
        }
    }
    Ok(ExpectationReport {
        stat: kind,
        class,
        n,
        method: Method::Exact,
        value: ReportValue::Rational(BigRational::new(BigInt::from(total), BigInt::from(size))),
    })
}

/// Bignum path of [`exp_exact`], available for any `n` the caller can wait for.
pub fn exp_exact_rational(kind: StatKind, class: PermClass, n: usize) -> Result<ExpectationReport> {
    check_exact_args(kind, n)?;
    let weight = |i: usize, v: usize| kind.cell_weight(n, i, v).unwrap_or(0.0) as u64;
    let value = match class.matrix() {
        None => {
            let total: u64 = support(kind, n).map(|(i, v)| weight(i, v)).sum();
            BigRational::new(BigInt::from(total), BigInt::from(n))
        }
        Some((pattern, reversed)) => {
            let counts = ExactCounts::new(pattern, n);
            let mut num = BigUint::zero();
            for (i, v) in support(kind, n) {
                let w = weight(i, v);
                if w == 0 {
                    continue;
                }
                let row = if reversed { n + 1 - i } else { i };
                num += counts.count(row, v) * w;
            }
            BigRational::new(BigInt::from(num), BigInt::from(counts.total().clone()))
        }
    };
    Ok(ExpectationReport {
        stat: kind,
        class,
        n,
        method: Method::Exact,
        value: ReportValue::Rational(value),
    })
}

/// Log-space path of [`exp_exact`].
pub fn exp_exact_float(kind: StatKind, class: PermClass, n: usize) -> Result<ExpectationReport> {
    check_exact_args(kind, n)?;
    let mut sum = CompensatedSum::default();
    match class.matrix() {
        None => {
            for (i, v) in support(kind, n) {
                sum.add(kind.cell_weight(n, i, v).unwrap_or(0.0) / n as f64);
            }
        }
        Some((pattern, reversed)) => {
            let logs = LogCounts::new(pattern, n);
            for (i, v) in support(kind, n) {
                let w = kind.cell_weight(n, i, v).unwrap_or(0.0);
                if w == 0.0 {
                    continue;
                }
                let row = if reversed { n + 1 - i } else { i };
                sum.add(w * logs.ratio(row, v));
            }
        }
    }
    Ok(ExpectationReport {
        stat: kind,
        class,
        n,
        method: Method::Exact,
        value: ReportValue::Real {
            value: sum.value(),
            stderr: None,
        },
    })
}

/// `E[fp]` over an avoider class: the diagonal of `P_n` or `Q_n` for 123
/// and 132, the anti-diagonal for 321 and 231.
pub fn exp_fp_exact(n: usize, class: PermClass) -> Result<ExpectationReport> {
    exp_exact(StatKind::Fp, class, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    First123,
    First132,
    Last132,
}

impl FromStr for Position {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "first_123" => Ok(Position::First123),
            "first_132" => Ok(Position::First132),
            "last_132" => Ok(Position::Last132),
            other => Err(Error::domain(format!(
                "position must be first_123, first_132 or last_132, got {other:?}"
            ))),
        }
    }
}

/// `E[σ(1)]` or `E[σ(n)]` exactly, for any `n >= 1`, in `O(n)` bignum
/// operations: `first = Σ k b(n,k) / C_n`, `last_132 = Σ k C_{k-1} C_{n-k} / C_n`.
pub fn exp_position_exact(n: usize, which: Position) -> Result<ExpectationReport> {
    if n == 0 {
        return Err(Error::domain("expectations need n >= 1"));
    }
    let mut num = BigUint::zero();
    let (stat, class) = match which {
        Position::First123 | Position::First132 => {
            // b(n,k) = b(n,k-1) (n+k-2)(n-k+1) / ((n-k+2)(k-1)), exact at each step.
            let mut b = BigUint::from(1u8);
            num += &b;
            for k in 2..=n {
                b = b * BigUint::from((n + k - 2) * (n - k + 1)) / BigUint::from((n - k + 2) * (k - 1));
                num += &b * k;
            }
            let class = if which == Position::First123 {
                PermClass::Avoid123
            } else {
                PermClass::Avoid132
            };
            (StatKind::First, class)
        }
        Position::Last132 => {
            let cats = catalans(n);
            for k in 1..=n {
                num += &cats[k - 1] * &cats[n - k] * k;
            }
            (StatKind::Last, PermClass::Avoid132)
        }
    };
    Ok(ExpectationReport {
        stat,
        class,
        n,
        method: Method::Exact,
        value: ReportValue::Rational(BigRational::new(
            BigInt::from(num),
            BigInt::from(catalan(n)),
        )),
    })
}

/// Sample mean of `kind` over `samples` draws from `class`, with standard
/// error `s / √samples`. Draws come from `SeededRng::new(seed)` in order.
pub fn mc_expectation(
    kind: StatKind,
    class: PermClass,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<ExpectationReport> {
    if samples < 2 {
        return Err(Error::domain("Monte Carlo needs at least 2 samples"));
    }
    if n == 0 {
        return Err(Error::domain("expectations need n >= 1"));
    }
    let mut rng = SeededRng::new(seed);
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    for t in 1..=samples {
        let x = stat(&class.sample(n, &mut rng)?, kind)?.value as f64;
        let d = x - mean;
        mean += d / t as f64;
        m2 += d * (x - mean);
    }
    let var = m2 / (samples - 1) as f64;
    Ok(ExpectationReport {
        stat: kind,
        class,
        n,
        method: Method::Mc { samples, seed },
        value: ReportValue::Real {
            value: mean,
            stderr: Some((var / samples as f64).sqrt()),
        },
    })
}

/// Least-squares line through `(ln n, ln value)` or `(n, value)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub n_schedule: Vec<usize>,
    /// The fitted ordinates: `ln value` for log-log fits, `value` for
    /// linear ones.
    pub values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Sum of squared residuals.
    pub residual: f64,
}

fn fit(ns: &[usize], xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::domain(format!(
            "slope fits need at least 3 points with matching lengths, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if ys.iter().chain(xs).any(|v| !v.is_finite()) {
        return Err(Error::domain("slope fit values must be finite"));
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("slope fit needs at least two distinct abscissae"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(SlopeFit {
        n_schedule: ns.to_vec(),
        values: ys.to_vec(),
        slope,
        intercept,
        residual,
    })
}

/// Slope of `ln value` against `ln n`. Nonpositive values are an error.
pub fn fit_loglog(ns: &[usize], values: &[f64]) -> Result<SlopeFit> {
    if let Some(v) = values.iter().find(|&&v| v.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::domain(format!("log-log fit needs positive values, got {v}")));
    }
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    fit_loglog_logs(ns, &logs)
}

/// As [`fit_loglog`] with the logarithms supplied directly.
pub fn fit_loglog_logs(ns: &[usize], ln_values: &[f64]) -> Result<SlopeFit> {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    fit(ns, &xs, ln_values)
}

/// Slope of `value` against `n`.
pub fn fit_linear(ns: &[usize], values: &[f64]) -> Result<SlopeFit> {
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    fit(ns, &xs, values)
}

/// Evaluates `quantity` along `ns` and fits `ln value` against `ln n`.
pub fn slope_probe(
    ns: &[usize],
    mut quantity: impl FnMut(usize) -> Result<f64>,
) -> Result<SlopeFit> {
    let values = ns.iter().map(|&n| quantity(n)).collect::<Result<Vec<_>>>()?;
    fit_loglog(ns, &values)
}
