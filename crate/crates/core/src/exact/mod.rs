//! Exact counting: Catalan and ballot numbers, the position-count matrices
//! `P_n(j,k)` (123-avoiders) and `Q_n(j,k)` (132-avoiders), and their
//! normalization by `C_n`.
//!
//! Index convention: `(j, k)` always means "position `j` holds value `k`",
//! i.e. the number of avoiders `σ` with `σ(j) = k`. Both matrices are
//! symmetric, so the transposed reading counts the same set.

mod logspace;
mod matrix;
mod memo;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use logspace::LogCounts;
pub use matrix::{matrix_slice, MatrixSlice, SliceEntries, SliceMode, LOG_SPACE_THRESHOLD};

/// Arbitrary-precision nonnegative count.
pub type BigCount = BigUint;

/// Which position-count matrix a computation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixPattern {
    /// `P_n`: 123-avoiding permutations.
    P123,
    /// `Q_n`: 132-avoiding permutations.
    Q132,
}

impl fmt::Display for MatrixPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixPattern::P123 => "123",
            MatrixPattern::Q132 => "132",
        })
    }
}

impl FromStr for MatrixPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "123" => Ok(MatrixPattern::P123),
            "132" => Ok(MatrixPattern::Q132),
            other => Err(Error::domain(format!(
                "matrix pattern must be 123 or 132, got {other:?}"
            ))),
        }
    }
}

/// The `n`-th Catalan number. Memoized for the process lifetime.
pub fn catalan(n: usize) -> BigCount {
    memo::with_catalans(n, |table| table[n].clone())
}

/// `C_0..=C_upto` as an owned vector.
pub fn catalans(upto: usize) -> Vec<BigCount> {
    memo::with_catalans(upto, |table| table[..=upto].to_vec())
}

/// Ballot number `b(n,k) = (n-k+1)/(n+k-1) * binom(n+k-1, n)`: the number of
/// 123-avoiders (equivalently 132-avoiders) of size `n` starting with `k`.
pub fn ballot(n: usize, k: usize) -> Result<BigCount> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::domain(format!(
            "ballot number needs 1 <= k <= n, got n={n}, k={k}"
        )));
    }
    let top = n + k - 1;
    let binom = memo::with_factorials(top, |f| &f[top] / (&f[n] * &f[k - 1]));
    let (quotient, remainder) = (binom * BigUint::from(n - k + 1)).div_rem(&BigUint::from(top));
    if !remainder.is_zero() {
        return Err(Error::consistency(format!(
            "ballot number b({n},{k}) is not integral"
        )));
    }
    Ok(quotient)
}

fn check_cell(n: usize, j: usize, k: usize) -> Result<()> {
    if j == 0 || k == 0 || j > n || k > n {
        return Err(Error::domain(format!(
            "cell ({j},{k}) lies outside [1,{n}]^2"
        )));
    }
    Ok(())
}

/// `P_n(j,k)`: number of 123-avoiders `σ` of size `n` with `σ(j) = k`.
pub fn exact_p(n: usize, j: usize, k: usize) -> Result<BigCount> {
    check_cell(n, j, k)?;
    if j + k <= n + 1 {
        Ok(ballot(n - k + 1, j)? * ballot(n - j + 1, k)?)
    } else {
        Ok(ballot(j, n - k + 1)? * ballot(k, n - j + 1)?)
    }
}

/// One summand of `Q_n(j,k)`: the avoiders with exactly `r` smaller values
/// ahead of position `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QTerm {
    pub r: usize,
    pub count: BigCount,
}

/// Summation range of `r` in the `Q_n(j,k)` decomposition.
pub(crate) fn q_range(n: usize, j: usize, k: usize) -> std::ops::Range<usize> {
    (j + k).saturating_sub(n + 1)..j.min(k)
}

/// The per-`r` summands `q_n(j,k,r) = b(n-j+1,k-r) b(n-k+1,j-r) C_r`.
pub fn q_terms(n: usize, j: usize, k: usize) -> Result<Vec<QTerm>> {
    check_cell(n, j, k)?;
    let range = q_range(n, j, k);
    let cats = catalans(range.end.max(1));
    range
        .map(|r| {
            let count = ballot(n - j + 1, k - r)? * ballot(n - k + 1, j - r)? * &cats[r];
            Ok(QTerm { r, count })
        })
        .collect()
}

/// `Q_n(j,k)`: number of 132-avoiders `σ` of size `n` with `σ(j) = k`.
pub fn exact_q(n: usize, j: usize, k: usize) -> Result<BigCount> {
    Ok(q_terms(n, j, k)?.into_iter().map(|t| t.count).sum())
}

/// A count divided by `C_n`, kept both as a natural log and as a ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedEntry {
    pub log_ratio: f64,
    pub ratio: f64,
}

impl NormalizedEntry {
    pub fn from_log(log_ratio: f64) -> Self {
        NormalizedEntry {
            log_ratio,
            ratio: log_ratio.exp(),
        }
    }
}

/// Natural log of a big integer from its top 64 bits and its bit length.
pub fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return x.to_u64().map_or(f64::NAN, |v| (v as f64).ln());
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `count / C_n`. A count above `C_n` can only come from a bug upstream.
pub fn normalize(count: &BigCount, n: usize) -> Result<NormalizedEntry> {
    let total = catalan(n);
    if count > &total {
        return Err(Error::consistency(format!(
            "count exceeds C_{n}; it cannot be a position count"
        )));
    }
    if count == &total {
        return Ok(NormalizedEntry::from_log(0.0));
    }
    Ok(NormalizedEntry::from_log(big_ln(count) - big_ln(&total)))
}

/// Every ballot number `b(m,i)` with `1 <= i <= m <= max_m`, built by the
/// lattice-path recurrence `b(m,i) = b(m,i-1) + b(m-1,i)`.
#[derive(Debug, Clone)]
pub struct BallotTable {
    rows: Vec<Vec<BigUint>>,
}

impl BallotTable {
    pub fn new(max_m: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max_m + 1);
        rows.push(vec![BigUint::zero()]);
        for m in 1..=max_m {
            let mut row = Vec::with_capacity(m + 1);
            row.push(BigUint::zero());
            row.push(BigUint::from(1u8));
            for i in 2..=m {
                let above = if i < m {
                    rows[m - 1][i].clone()
                } else {
                    BigUint::zero()
                };
                let next = &row[i - 1] + above;
                row.push(next);
            }
            rows.push(row);
        }
        BallotTable { rows }
    }

    pub fn max_m(&self) -> usize {
        self.rows.len() - 1
    }

    /// `b(m,i)`; panics outside `1 <= i <= m <= max_m`.
    pub fn get(&self, m: usize, i: usize) -> &BigUint {
        &self.rows[m][i]
    }
}

/// Exact `P_n` or `Q_n` cells for one fixed `n`, backed by a local ballot
/// table so that whole matrices cost additions and products only.
#[derive(Debug, Clone)]
pub struct ExactCounts {
    pattern: MatrixPattern,
    n: usize,
    ballots: BallotTable,
    catalans: Vec<BigUint>,
}

impl ExactCounts {
    pub fn new(pattern: MatrixPattern, n: usize) -> Self {
        ExactCounts {
            pattern,
            n,
            ballots: BallotTable::new(n),
            catalans: catalans(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pattern(&self) -> MatrixPattern {
        self.pattern
    }

    /// `C_n`.
    pub fn total(&self) -> &BigUint {
        &self.catalans[self.n]
    }

    pub fn catalan(&self, m: usize) -> &BigUint {
        &self.catalans[m]
    }

    pub fn ballots(&self) -> &BallotTable {
        &self.ballots
    }

    /// The count at `(j,k)`; panics outside `[1,n]^2`.
    pub fn count(&self, j: usize, k: usize) -> BigUint {
        let n = self.n;
        assert!(
            (1..=n).contains(&j) && (1..=n).contains(&k),
            "cell ({j},{k}) outside [1,{n}]^2"
        );
        let b = &self.ballots;
        match self.pattern {
            MatrixPattern::P123 if j + k <= n + 1 => b.get(n - k + 1, j) * b.get(n - j + 1, k),
            MatrixPattern::P123 => b.get(j, n - k + 1) * b.get(k, n - j + 1),
            MatrixPattern::Q132 => q_range(n, j, k)
                .map(|r| b.get(n - j + 1, k - r) * b.get(n - k + 1, j - r) * &self.catalans[r])
                .sum(),
        }
    }

    /// `count(k,k)` for `k = 1..=n`, or `count(k,n+1-k)` when `anti`.
    pub fn diagonal(&self, anti: bool) -> Vec<BigUint> {
        let n = self.n;
        (1..=n)
            .map(|k| self.count(k, if anti { n + 1 - k } else { k }))
            .collect()
    }
}
