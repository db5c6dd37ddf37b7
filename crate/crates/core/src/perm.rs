//! Permutations in one-line notation, pattern containment, the brute-force
//! avoider enumerator, and scalar statistics.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A permutation of `1..=n` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    values: Vec<usize>,
}

impl Permutation {
    /// Validates that `values` is a rearrangement of `1..=n`.
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let n = values.len();
        let mut seen = vec![false; n + 1];
        for &v in &values {
            if v == 0 || v > n {
                return Err(Error::domain(format!(
                    "value {v} outside 1..={n} in one-line notation"
                )));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::domain(format!("value {v} repeated")));
            }
        }
        Ok(Permutation { values })
    }

    pub(crate) fn from_vec_unchecked(values: Vec<usize>) -> Self {
        debug_assert!(Permutation::new(values.clone()).is_ok());
        Permutation { values }
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            values: (1..=n).collect(),
        }
    }

    /// `(n, n-1, ..., 1)`.
    pub fn decreasing(n: usize) -> Self {
        Permutation {
            values: (1..=n).rev().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn into_values(self) -> Vec<usize> {
        self.values
    }

    /// `σ(i)` for 1-based `i`.
    pub fn at(&self, i: usize) -> usize {
        self.values[i - 1]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.values.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { values: inv }
    }

    /// `(σ(n), ..., σ(1))`.
    pub fn reverse(&self) -> Self {
        Permutation {
            values: self.values.iter().rev().copied().collect(),
        }
    }

    /// `i ↦ n+1-σ(i)`.
    pub fn complement(&self) -> Self {
        let n = self.len();
        Permutation {
            values: self.values.iter().map(|&v| n + 1 - v).collect(),
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Parses `4 2 3 1 5`, `4,2,3,1,5` or `(4,2,3,1,5)`.
impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let values = inner
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::domain(format!("not a positive integer: {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(values)
    }
}

/// The six patterns of length three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum S3 {
    P123,
    P132,
    P213,
    P231,
    P312,
    P321,
}

impl S3 {
    pub const ALL: [S3; 6] = [S3::P123, S3::P132, S3::P213, S3::P231, S3::P312, S3::P321];

    pub fn values(self) -> [usize; 3] {
        match self {
            S3::P123 => [1, 2, 3],
            S3::P132 => [1, 3, 2],
            S3::P213 => [2, 1, 3],
            S3::P231 => [2, 3, 1],
            S3::P312 => [3, 1, 2],
            S3::P321 => [3, 2, 1],
        }
    }

    fn from_values(v: &[usize]) -> Option<S3> {
        S3::ALL.into_iter().find(|p| p.values() == v)
    }
}

impl fmt::Display for S3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.values();
        write!(f, "{a}{b}{c}")
    }
}

impl FromStr for S3 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        S3::ALL
            .into_iter()
            .find(|p| p.to_string() == s.trim())
            .ok_or_else(|| Error::domain(format!("not a pattern of length 3: {s:?}")))
    }
}

/// A pattern of any length. Members of S_3 take the linear-time checks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    perm: Permutation,
    s3: Option<S3>,
}

impl Pattern {
    pub fn new(perm: Permutation) -> Self {
        let s3 = S3::from_values(perm.values());
        Pattern { perm, s3 }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn as_permutation(&self) -> &Permutation {
        &self.perm
    }

    pub fn as_s3(&self) -> Option<S3> {
        self.s3
    }
}

impl From<S3> for Pattern {
    fn from(p: S3) -> Self {
        Pattern {
            perm: Permutation::from_vec_unchecked(p.values().to_vec()),
            s3: Some(p),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.perm.len() < 10 {
            self.perm.values().iter().try_for_each(|v| write!(f, "{v}"))
        } else {
            write!(f, "{}", self.perm)
        }
    }
}

/// Accepts `132` (single digits) or a spaced/comma list such as `1 3 2`.
impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if !t.is_empty() && t.chars().all(|c| c.is_ascii_digit()) {
            let values = t.bytes().map(|b| (b - b'0') as usize).collect();
            return Ok(Pattern::new(Permutation::new(values)?));
        }
        Ok(Pattern::new(t.parse()?))
    }
}

/// Whether some `i<j<k` has `seq[i] < seq[j] < seq[k]` under `less`.
fn has_inc3(seq: &[usize], less: impl Fn(usize, usize) -> bool) -> bool {
    let mut low: Option<usize> = None;
    let mut mid: Option<usize> = None;
    for &x in seq {
        match (low, mid) {
            (_, Some(m)) if less(m, x) => return true,
            (Some(l), _) if less(l, x) => {
                if mid.is_none_or(|m| less(x, m)) {
                    mid = Some(x);
                }
            }
            _ => low = Some(x),
        }
    }
    false
}

/// Positions `(i, j, k)`, 0-based, of an occurrence of 132 in `seq` under
/// the order `less`.
fn witness_132_by(seq: &[usize], less: impl Fn(usize, usize) -> bool) -> Option<[usize; 3]> {
    // Scan from the right; `two` is the largest value popped so far and
    // `three` the position that popped it.
    let mut stack: Vec<usize> = Vec::new();
    let mut two: Option<(usize, usize)> = None;
    for i in (0..seq.len()).rev() {
        if let Some((two_pos, three_pos)) = two {
            if less(seq[i], seq[two_pos]) {
                return Some([i, three_pos, two_pos]);
            }
        }
        while let Some(&top) = stack.last() {
            if less(seq[top], seq[i]) {
                stack.pop();
                two = Some((top, i));
            } else {
                break;
            }
        }
        stack.push(i);
    }
    None
}

/// A 1-based occurrence `(i, j, k)` of 132: `σ(i) < σ(k) < σ(j)`.
pub fn find_132_witness(sigma: &Permutation) -> Option<(usize, usize, usize)> {
    witness_132_by(sigma.values(), |a, b| a < b).map(|[i, j, k]| (i + 1, j + 1, k + 1))
}

fn contains_s3(seq: &[usize], p: S3) -> bool {
    let lt = |a: usize, b: usize| a < b;
    let gt = |a: usize, b: usize| a > b;
    match p {
        S3::P123 => has_inc3(seq, lt),
        S3::P321 => has_inc3(seq, gt),
        S3::P132 => witness_132_by(seq, lt).is_some(),
        // Complement maps 312 to 132.
        S3::P312 => witness_132_by(seq, gt).is_some(),
        S3::P231 | S3::P213 => {
            let rev: Vec<usize> = seq.iter().rev().copied().collect();
            // Reverse maps 231 to 132, and 213 to 312.
            if p == S3::P231 {
                witness_132_by(&rev, lt).is_some()
            } else {
                witness_132_by(&rev, gt).is_some()
            }
        }
    }
}

/// Backtracking search for `pat` in `seq`; with `anchored`, the last pattern
/// entry must sit on the last element of `seq`.
fn contains_general(seq: &[usize], pat: &[usize], anchored: bool) -> bool {
    fn extend(seq: &[usize], pat: &[usize], chosen: &mut Vec<usize>, from: usize, anchored: bool) -> bool {
        let t = chosen.len();
        if t == pat.len() {
            return true;
        }
        let last = seq.len();
        let start = if anchored && t + 1 == pat.len() { last - 1 } else { from };
        let remaining = pat.len() - t;
        for pos in start..last {
            if last - pos < remaining {
                break;
            }
            let ok = chosen
                .iter()
                .enumerate()
                .all(|(s, &q)| (seq[q] < seq[pos]) == (pat[s] < pat[t]));
            if ok {
                chosen.push(pos);
                if extend(seq, pat, chosen, pos + 1, anchored) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    if pat.is_empty() {
        return true;
    }
    if pat.len() > seq.len() {
        return false;
    }
    extend(seq, pat, &mut Vec::with_capacity(pat.len()), 0, anchored)
}

/// Whether `sigma` contains `pat` as a pattern. Linear time for S_3
/// patterns, backtracking otherwise.
pub fn contains(sigma: &Permutation, pat: &Pattern) -> bool {
    match pat.s3 {
        Some(p) => contains_s3(sigma.values(), p),
        None => contains_general(sigma.values(), pat.perm.values(), false),
    }
}

/// Slice form of [`contains`]; `seq` need only hold distinct values.
pub fn contains_in(seq: &[usize], pat: &Pattern) -> bool {
    match pat.s3 {
        Some(p) => contains_s3(seq, p),
        None => contains_general(seq, pat.perm.values(), false),
    }
}

pub fn avoids(sigma: &Permutation, pat: &Pattern) -> bool {
    !contains(sigma, pat)
}

/// Largest size accepted by [`enumerate_avoiders`].
pub const MAX_ENUMERATION_N: usize = 12;

/// Lazily yields the avoiders of `pat` in `S_n`, in lexicographic order.
pub fn enumerate_avoiders(n: usize, pat: &Pattern) -> Result<Avoiders> {
    if n > MAX_ENUMERATION_N {
        return Err(Error::TooLarge {
            what: "enumeration size n",
            requested: n,
            bound: MAX_ENUMERATION_N,
        });
    }
    Ok(Avoiders {
        n,
        pat: pat.perm.values().to_vec(),
        prefix: Vec::with_capacity(n),
        used: vec![false; n + 1],
        next: vec![1],
        done: false,
    })
}

/// Iterator returned by [`enumerate_avoiders`]; a depth-first search that
/// prunes every prefix already containing the pattern.
#[derive(Debug, Clone)]
pub struct Avoiders {
    n: usize,
    pat: Vec<usize>,
    prefix: Vec<usize>,
    used: Vec<bool>,
    // next[d]: smallest candidate value still to try at depth d.
    next: Vec<usize>,
    done: bool,
}

impl Iterator for Avoiders {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.done {
            return None;
        }
        if self.n == 0 {
            self.done = true;
            return Some(Permutation::identity(0));
        }
        loop {
            let depth = self.prefix.len();
            if depth == self.n {
                let out = Permutation::from_vec_unchecked(self.prefix.clone());
                self.backtrack();
                return Some(out);
            }
            let start = self.next[depth];
            let candidate = (start..=self.n).find(|&v| !self.used[v]);
            match candidate {
                Some(v) => {
                    self.next[depth] = v + 1;
                    self.prefix.push(v);
                    if contains_general(&self.prefix, &self.pat, true) {
                        self.prefix.pop();
                        continue;
                    }
                    self.used[v] = true;
                    self.next.push(1);
                }
                None => {
                    if depth == 0 {
                        self.done = true;
                        return None;
                    }
                    self.next.pop();
                    self.backtrack();
                }
            }
        }
    }
}

impl Avoiders {
    fn backtrack(&mut self) {
        if let Some(v) = self.prefix.pop() {
            self.used[v] = false;
        }
        if self.next.len() > self.prefix.len() + 1 {
            self.next.truncate(self.prefix.len() + 1);
        }
    }
}

/// Every permutation of `1..=n` in lexicographic order (brute-force oracle).
pub fn all_permutations(n: usize) -> Result<Vec<Permutation>> {
    if n > 10 {
        return Err(Error::TooLarge {
            what: "full symmetric group size n",
            requested: n,
            bound: 10,
        });
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (1..=n).collect();
    loop {
        out.push(Permutation::from_vec_unchecked(cur.clone()));
        // Next lexicographic permutation.
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return Ok(out);
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap_or(i);
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// Statistic selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StatKind {
    /// Fixed points `σ(i) = i`.
    Fp,
    /// Anti-fixed points `σ(i) = n+1-i`.
    Afp,
    /// Length of the leftmost decreasing run.
    Ldr,
    /// Right-to-left maxima.
    Rmax,
    /// Longest increasing subsequence.
    Lis,
    /// Largest `r` with `σ(i) > λ r` for all `i <= r`.
    RankLambda(f64),
    /// `Σ_i min((n+1-σ(i)-i)^2, (2n-σ(i)-i)^2)`.
    Chi2,
    /// `σ(1)`.
    First,
    /// `σ(n)`.
    Last,
}

impl StatKind {
    pub fn name(&self) -> &'static str {
        match self {
            StatKind::Fp => "fp",
            StatKind::Afp => "afp",
            StatKind::Ldr => "ldr",
            StatKind::Rmax => "rmax",
            StatKind::Lis => "lis",
            StatKind::RankLambda(_) => "rank",
            StatKind::Chi2 => "chi2",
            StatKind::First => "first",
            StatKind::Last => "last",
        }
    }

    /// Statistics of the form `Σ_i w(i, σ(i))`, whose expectation over a
    /// class is a weighted sum of its position matrix.
    pub fn is_cell_additive(&self) -> bool {
        matches!(
            self,
            StatKind::Fp | StatKind::Afp | StatKind::Chi2 | StatKind::First | StatKind::Last
        )
    }

    /// The cell weight `w(i, v)` of a cell-additive statistic.
    pub fn cell_weight(&self, n: usize, i: usize, v: usize) -> Option<f64> {
        let w = match self {
            StatKind::Fp => (v == i) as u64,
            StatKind::Afp => (v + i == n + 1) as u64,
            StatKind::Chi2 => chi2_cell(n, i, v),
            StatKind::First => if i == 1 { v as u64 } else { 0 },
            StatKind::Last => if i == n { v as u64 } else { 0 },
            _ => return None,
        };
        Some(w as f64)
    }
}

impl fmt::Display for StatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatKind::RankLambda(l) => write!(f, "rank[{l}]"),
            other => f.write_str(other.name()),
        }
    }
}

/// Parses a statistic name; `rank` means `λ = 1`, `rank:0.5` sets `λ`.
impl FromStr for StatKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(l) = s.strip_prefix("rank:") {
            let lambda: f64 = l
                .parse()
                .map_err(|_| Error::domain(format!("bad lambda {l:?}")))?;
            check_lambda(lambda)?;
            return Ok(StatKind::RankLambda(lambda));
        }
        Ok(match s {
            "fp" => StatKind::Fp,
            "afp" => StatKind::Afp,
            "ldr" => StatKind::Ldr,
            "rmax" => StatKind::Rmax,
            "lis" => StatKind::Lis,
            "rank" => StatKind::RankLambda(1.0),
            "chi2" => StatKind::Chi2,
            "first" => StatKind::First,
            "last" => StatKind::Last,
            other => return Err(Error::domain(format!("unknown statistic {other:?}"))),
        })
    }
}

/// A statistic evaluated on one permutation. Every supported statistic is
/// integer valued.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatValue {
    pub kind: StatKind,
    pub value: u64,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("lambda must be a positive real, got {lambda}")))
    }
}

pub fn fixed_points(sigma: &Permutation) -> usize {
    sigma.values.iter().enumerate().filter(|(i, &v)| v == i + 1).count()
}

pub fn anti_fixed_points(sigma: &Permutation) -> usize {
    let n = sigma.len();
    sigma.values.iter().enumerate().filter(|(i, &v)| v + i == n).count()
}

pub fn leftmost_decreasing_run(sigma: &Permutation) -> usize {
    let v = &sigma.values;
    if v.is_empty() {
        return 0;
    }
    1 + v.windows(2).take_while(|w| w[0] > w[1]).count()
}

pub fn right_to_left_maxima(sigma: &Permutation) -> usize {
    let mut best = 0;
    let mut count = 0;
    for &v in sigma.values.iter().rev() {
        if v > best {
            best = v;
            count += 1;
        }
    }
    count
}

/// Patience sorting, `O(n log n)`.
pub fn lis(sigma: &Permutation) -> usize {
    let mut tails: Vec<usize> = Vec::new();
    for &v in &sigma.values {
        let pos = tails.partition_point(|&t| t < v);
        if pos == tails.len() {
            tails.push(v);
        } else {
            tails[pos] = v;
        }
    }
    tails.len()
}

/// The generalized rank. `r = 0` always qualifies, so the result exists.
pub fn rank_lambda(sigma: &Permutation, lambda: f64) -> Result<usize> {
    check_lambda(lambda)?;
    let mut min = usize::MAX;
    let mut r = 0;
    for (i, &v) in sigma.values.iter().enumerate() {
        min = min.min(v);
        if (min as f64) > lambda * (i + 1) as f64 {
            r = i + 1;
        } else {
            break;
        }
    }
    Ok(r)
}

fn chi2_cell(n: usize, i: usize, v: usize) -> u64 {
    let (n, i, v) = (n as i64, i as i64, v as i64);
    let a = n + 1 - v - i;
    let b = 2 * n - v - i;
    (a * a).min(b * b) as u64
}

pub fn chi2(sigma: &Permutation) -> u64 {
    let n = sigma.len();
    sigma
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| chi2_cell(n, i + 1, v))
        .sum()
}

pub fn stat(sigma: &Permutation, kind: StatKind) -> Result<StatValue> {
    let v = &sigma.values;
    let value = match kind {
        StatKind::Fp => fixed_points(sigma) as u64,
        StatKind::Afp => anti_fixed_points(sigma) as u64,
        StatKind::Ldr => leftmost_decreasing_run(sigma) as u64,
        StatKind::Rmax => right_to_left_maxima(sigma) as u64,
        StatKind::Lis => lis(sigma) as u64,
        StatKind::RankLambda(l) => rank_lambda(sigma, l)? as u64,
        StatKind::Chi2 => chi2(sigma),
        StatKind::First => v.first().copied().unwrap_or(0) as u64,
        StatKind::Last => v.last().copied().unwrap_or(0) as u64,
    };
    Ok(StatValue { kind, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn triple_loop(seq: &[usize], pat: [usize; 3]) -> bool {
        let n = seq.len();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let t = [seq[i], seq[j], seq[k]];
                    let ok = (0..3).all(|a| (0..3).all(|b| (t[a] < t[b]) == (pat[a] < pat[b])));
                    if ok {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn catalan_u64(n: usize) -> usize {
        (0..n).fold(1usize, |c, m| c * 2 * (2 * m + 1) / (m + 2))
    }

    #[test]
    fn parse_and_display() {
        let s = p("(4,2,3,1,5)");
        assert_eq!(s.values(), &[4, 2, 3, 1, 5]);
        assert_eq!(s.to_string(), "4 2 3 1 5");
        assert_eq!(p("4 2 3 1 5"), s);
        assert!("1 1".parse::<Permutation>().is_err());
        assert!("0 1".parse::<Permutation>().is_err());
        assert!("1 x".parse::<Permutation>().is_err());
        assert_eq!("132".parse::<Pattern>().unwrap().as_s3(), Some(S3::P132));
        assert_eq!("1 3 2".parse::<Pattern>().unwrap().as_s3(), Some(S3::P132));
        assert_eq!("2413".parse::<Pattern>().unwrap().as_s3(), None);
        assert_eq!("231".parse::<S3>().unwrap().to_string(), "231");
    }

    #[test]
    fn containment_examples() {
        assert!(contains(&p("2 4 5 1 3"), &S3::P132.into()));
        assert!(!contains(&p("5 3 4 1 2"), &S3::P132.into()));
        for pat in S3::ALL {
            assert!(!contains(&p("1"), &pat.into()));
        }
        let (i, j, k) = find_132_witness(&p("2 4 5 1 3")).unwrap();
        let s = p("2 4 5 1 3");
        assert!(i < j && j < k && s.at(i) < s.at(k) && s.at(k) < s.at(j));
    }

    #[test]
    fn specialized_checks_match_triple_loop() {
        for n in 0..=8 {
            for sigma in all_permutations(n).unwrap() {
                for pat in S3::ALL {
                    let fast = contains(&sigma, &pat.into());
                    assert_eq!(fast, triple_loop(sigma.values(), pat.values()), "{sigma} {pat}");
                    let general = contains_general(sigma.values(), &pat.values(), false);
                    assert_eq!(fast, general);
                }
                if let Some((i, j, k)) = find_132_witness(&sigma) {
                    assert!(i < j && j < k && sigma.at(i) < sigma.at(k) && sigma.at(k) < sigma.at(j));
                }
            }
        }
    }

    #[test]
    fn longer_pattern_backtracking() {
        let pat: Pattern = "2413".parse().unwrap();
        assert!(contains(&p("3 5 1 4 2"), &pat));
        assert!(!contains(&p("1 2 3 4 5"), &pat));
        assert!(contains(&p("1 2 3 4 5"), &"1234".parse().unwrap()));
    }

    #[test]
    fn avoider_counts_are_catalan() {
        for pat in S3::ALL {
            let pattern = Pattern::from(pat);
            for n in 0..=9 {
                let all: Vec<_> = enumerate_avoiders(n, &pattern).unwrap().collect();
                assert_eq!(all.len(), catalan_u64(n), "{pat} n={n}");
                assert!(all.windows(2).all(|w| w[0] < w[1]), "lexicographic order");
                assert!(all.iter().all(|s| !contains(s, &pattern)));
            }
        }
    }

    #[test]
    fn avoider_examples() {
        let got: Vec<String> = enumerate_avoiders(3, &S3::P123.into())
            .unwrap()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(got, ["1 3 2", "2 1 3", "2 3 1", "3 1 2", "3 2 1"]);
        let one: Vec<_> = enumerate_avoiders(1, &S3::P321.into()).unwrap().collect();
        assert_eq!(one, vec![p("1")]);
        assert!(matches!(
            enumerate_avoiders(13, &S3::P132.into()),
            Err(Error::TooLarge { bound: 12, .. })
        ));
    }

    #[test]
    fn general_pattern_enumeration_matches_filter() {
        let pat: Pattern = "2413".parse().unwrap();
        for n in 0..=7 {
            let fast: Vec<_> = enumerate_avoiders(n, &pat).unwrap().collect();
            let slow: Vec<_> = all_permutations(n)
                .unwrap()
                .into_iter()
                .filter(|s| !contains(s, &pat))
                .collect();
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn stat_examples() {
        assert_eq!(stat(&p("4 2 3 1 5"), StatKind::Fp).unwrap().value, 3);
        assert_eq!(stat(&p("3 2 1"), StatKind::Afp).unwrap().value, 3);
        for n in 1..20 {
            assert_eq!(chi2(&Permutation::decreasing(n)), 0);
            assert_eq!(lis(&Permutation::identity(n)), n);
            assert_eq!(rank_lambda(&Permutation::identity(n), 1.0).unwrap(), 0);
        }
        assert_eq!(rank_lambda(&p("3 2 1"), 1.0).unwrap(), 1);
        assert_eq!(leftmost_decreasing_run(&p("5 3 4 1 2")), 2);
        assert_eq!(right_to_left_maxima(&p("5 3 4 1 2")), 3);
        assert_eq!(stat(&p("5 3 4 1 2"), StatKind::First).unwrap().value, 5);
        assert_eq!(stat(&p("5 3 4 1 2"), StatKind::Last).unwrap().value, 2);
        assert!(rank_lambda(&p("1"), 0.0).is_err());
        assert!(rank_lambda(&p("1"), f64::NAN).is_err());
    }

    #[test]
    fn rank_bounds_exhaustive() {
        for n in 1..=8 {
            for sigma in all_permutations(n).unwrap() {
                assert!(2 * rank_lambda(&sigma, 1.0).unwrap() <= n);
                for lambda in [0.5, 1.0, 2.0] {
                    // The r leading values all exceed λr, and only n - ⌊λr⌋ values do.
                    let r = rank_lambda(&sigma, lambda).unwrap();
                    assert!(r + (lambda * r as f64).floor() as usize <= n, "{sigma} {lambda}");
                }
            }
        }
    }

    #[test]
    fn rank_half_exceeds_real_bound_when_n_is_one_mod_three() {
        // σ(1..3) = {2,3,4} gives rank 3 > 4/1.5.
        assert_eq!(rank_lambda(&p("2 3 4 1"), 0.5).unwrap(), 3);
        assert_eq!(rank_lambda(&p("1"), 0.5).unwrap(), 1);
        for n in [2usize, 3, 5, 6, 8] {
            for sigma in all_permutations(n).unwrap() {
                assert!(rank_lambda(&sigma, 0.5).unwrap() as f64 <= n as f64 / 1.5 + 1e-12);
            }
        }
    }

    #[test]
    fn fp_of_123_avoiders_at_most_two() {
        for n in 1..=9 {
            for sigma in enumerate_avoiders(n, &S3::P123.into()).unwrap() {
                assert!(fixed_points(&sigma) <= 2, "{sigma}");
            }
        }
    }

    fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
        v.sort();
        v
    }

    #[test]
    fn equidistribution_multisets() {
        for n in 1..=8 {
            let s123: Vec<_> = enumerate_avoiders(n, &S3::P123.into()).unwrap().collect();
            let s132: Vec<_> = enumerate_avoiders(n, &S3::P132.into()).unwrap().collect();
            let s321: Vec<_> = enumerate_avoiders(n, &S3::P321.into()).unwrap().collect();
            let ldr123 = sorted(s123.iter().map(leftmost_decreasing_run).collect());
            let ldr132 = sorted(s132.iter().map(leftmost_decreasing_run).collect());
            let head = sorted(s123.iter().map(|s| n + 1 - s.at(1)).collect());
            let rmax132 = sorted(s132.iter().map(right_to_left_maxima).collect());
            assert_eq!(ldr123, ldr132);
            assert_eq!(ldr123, head);
            assert_eq!(ldr123, rmax132);
            let afp123 = sorted(s123.iter().map(anti_fixed_points).collect());
            let fp321 = sorted(s321.iter().map(fixed_points).collect());
            assert_eq!(afp123, fp321);
        }
    }

    fn lis_dp(v: &[usize]) -> usize {
        let mut best = vec![1; v.len()];
        for i in 0..v.len() {
            for j in 0..i {
                if v[j] < v[i] {
                    best[i] = best[i].max(best[j] + 1);
                }
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    fn arb_perm(max: usize) -> impl Strategy<Value = Permutation> {
        (0..=max)
            .prop_flat_map(|n| Just((1..=n).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(Permutation::from_vec_unchecked)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn lis_matches_dp(sigma in arb_perm(64)) {
            prop_assert_eq!(lis(&sigma), lis_dp(sigma.values()));
        }
    }

    proptest! {
        #[test]
        fn inverse_is_involutive(sigma in arb_perm(50)) {
            prop_assert_eq!(sigma.inverse().inverse(), sigma.clone());
            let id = Permutation::identity(sigma.len());
            let composed: Vec<usize> = sigma.inverse().values().iter().map(|&v| sigma.at(v)).collect();
            prop_assert_eq!(composed, id.into_values());
        }

        #[test]
        fn symmetry_maps_permute_patterns(sigma in arb_perm(30)) {
            prop_assert_eq!(
                contains(&sigma, &S3::P231.into()),
                contains(&sigma.reverse(), &S3::P132.into())
            );
            prop_assert_eq!(
                contains(&sigma, &S3::P123.into()),
                contains(&sigma.complement(), &S3::P321.into())
            );
            prop_assert_eq!(
                contains(&sigma, &S3::P213.into()),
                contains(&sigma.inverse(), &S3::P213.into())
            );
        }

        #[test]
        fn stat_ranges(sigma in arb_perm(40), lambda in 0.01f64..5.0) {
            let n = sigma.len() as u64;
            prop_assert!(stat(&sigma, StatKind::Fp).unwrap().value <= n);
            let ldr = stat(&sigma, StatKind::Ldr).unwrap().value;
            prop_assert!(n == 0 || (1..=n).contains(&ldr));
            prop_assert!(stat(&sigma, StatKind::RankLambda(lambda)).unwrap().value <= n);
            let cells: f64 = sigma
                .values()
                .iter()
                .enumerate()
                .map(|(i, &v)| StatKind::Chi2.cell_weight(sigma.len(), i + 1, v).unwrap())
                .sum();
            prop_assert_eq!(cells as u64, chi2(&sigma));
        }
    }
}
