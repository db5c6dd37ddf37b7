use std::ops::RangeInclusive;

use num_bigint::BigUint;

use super::{normalize, ExactCounts, LogCounts, MatrixPattern, NormalizedEntry};
use crate::error::{Error, Result};

/// Sizes above this use log-space ratios in normalized mode instead of
/// exact bignum counts.
pub const LOG_SPACE_THRESHOLD: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceMode {
    Exact,
    Normalized,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SliceEntries {
    Exact(Vec<BigUint>),
    Normalized(Vec<NormalizedEntry>),
}

/// A dense row-major block of `P_n` or `Q_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSlice {
    pub pattern: MatrixPattern,
    pub n: usize,
    pub rows: RangeInclusive<usize>,
    pub cols: RangeInclusive<usize>,
    pub entries: SliceEntries,
}

impl MatrixSlice {
    pub fn mode(&self) -> SliceMode {
        match self.entries {
            SliceEntries::Exact(_) => SliceMode::Exact,
            SliceEntries::Normalized(_) => SliceMode::Normalized,
        }
    }

    pub fn width(&self) -> usize {
        self.cols.clone().count()
    }

    pub fn height(&self) -> usize {
        self.rows.clone().count()
    }

    fn offset(&self, j: usize, k: usize) -> Option<usize> {
        if self.rows.contains(&j) && self.cols.contains(&k) {
            Some((j - self.rows.start()) * self.width() + (k - self.cols.start()))
        } else {
            None
        }
    }

    pub fn exact(&self, j: usize, k: usize) -> Option<&BigUint> {
        match &self.entries {
            SliceEntries::Exact(v) => self.offset(j, k).map(|i| &v[i]),
            SliceEntries::Normalized(_) => None,
        }
    }

    pub fn normalized(&self, j: usize, k: usize) -> Option<NormalizedEntry> {
        match &self.entries {
            SliceEntries::Normalized(v) => self.offset(j, k).map(|i| v[i]),
            SliceEntries::Exact(_) => None,
        }
    }

    /// Cells in row-major order as `(j, k)`.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .clone()
            .flat_map(move |j| self.cols.clone().map(move |k| (j, k)))
    }
}

/// Materializes a block of `P_n` (pattern 123) or `Q_n` (pattern 132).
///
/// `n = 0` yields the empty matrix whatever the requested ranges.
pub fn matrix_slice(
    pattern: MatrixPattern,
    n: usize,
    rows: RangeInclusive<usize>,
    cols: RangeInclusive<usize>,
    mode: SliceMode,
) -> Result<MatrixSlice> {
    if n == 0 {
        let entries = match mode {
            SliceMode::Exact => SliceEntries::Exact(Vec::new()),
            SliceMode::Normalized => SliceEntries::Normalized(Vec::new()),
        };
        #[allow(clippy::reversed_empty_ranges)]
        return Ok(MatrixSlice {
            pattern,
            n,
            rows: 1..=0,
            cols: 1..=0,
            entries,
        });
    }
    for (name, r) in [("row", &rows), ("column", &cols)] {
        if r.is_empty() {
            return Err(Error::domain(format!("empty {name} range")));
        }
        if *r.start() < 1 || *r.end() > n {
            return Err(Error::domain(format!(
                "{name} range {}..={} not within [1,{n}]",
                r.start(),
                r.end()
            )));
        }
    }
    let cells = rows
        .clone()
        .flat_map(|j| cols.clone().map(move |k| (j, k)));
    let entries = match mode {
        SliceMode::Exact => {
            let counts = ExactCounts::new(pattern, n);
            SliceEntries::Exact(cells.map(|(j, k)| counts.count(j, k)).collect())
        }
        SliceMode::Normalized if n > LOG_SPACE_THRESHOLD => {
            let logs = LogCounts::new(pattern, n);
            SliceEntries::Normalized(cells.map(|(j, k)| logs.entry(j, k)).collect())
        }
        SliceMode::Normalized => {
            let counts = ExactCounts::new(pattern, n);
            SliceEntries::Normalized(
                cells
                    .map(|(j, k)| normalize(&counts.count(j, k), n))
                    .collect::<Result<_>>()?,
            )
        }
    };
    Ok(MatrixSlice {
        pattern,
        n,
        rows,
        cols,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_rows(slice: &MatrixSlice) -> Vec<Vec<u64>> {
        slice
            .rows
            .clone()
            .map(|j| {
                slice
                    .cols
                    .clone()
                    .map(|k| {
                        let v = slice.exact(j, k).unwrap();
                        num_traits::ToPrimitive::to_u64(v).unwrap()
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn p3_full_matrix() {
        let s = matrix_slice(MatrixPattern::P123, 3, 1..=3, 1..=3, SliceMode::Exact).unwrap();
        assert_eq!(exact_rows(&s), vec![vec![1, 2, 2], vec![2, 1, 2], vec![2, 2, 1]]);
    }

    #[test]
    fn q3_last_column() {
        let s = matrix_slice(MatrixPattern::Q132, 3, 1..=3, 3..=3, SliceMode::Exact).unwrap();
        assert_eq!(exact_rows(&s), vec![vec![2], vec![1], vec![2]]);
    }

    #[test]
    fn degenerate_sizes() {
        let empty = matrix_slice(MatrixPattern::P123, 0, 1..=1, 1..=1, SliceMode::Exact).unwrap();
        assert_eq!(empty.cells().count(), 0);
        let one = matrix_slice(MatrixPattern::Q132, 1, 1..=1, 1..=1, SliceMode::Exact).unwrap();
        assert_eq!(exact_rows(&one), vec![vec![1]]);
    }

    #[test]
    fn rejects_bad_ranges() {
        #[allow(clippy::reversed_empty_ranges)]
        let empty = matrix_slice(MatrixPattern::P123, 5, 3..=2, 1..=5, SliceMode::Exact);
        assert!(matches!(empty, Err(Error::Domain(_))));
        let outside = matrix_slice(MatrixPattern::P123, 5, 1..=6, 1..=5, SliceMode::Exact);
        assert!(matches!(outside, Err(Error::Domain(_))));
        let zero = matrix_slice(MatrixPattern::Q132, 5, 0..=2, 1..=5, SliceMode::Exact);
        assert!(matches!(zero, Err(Error::Domain(_))));
    }

    #[test]
    fn normalized_rows_sum_to_one() {
        for pattern in [MatrixPattern::P123, MatrixPattern::Q132] {
            let n = 40;
            let s = matrix_slice(pattern, n, 1..=n, 1..=n, SliceMode::Normalized).unwrap();
            for j in 1..=n {
                let mut total = 0.0;
                for k in 1..=n {
                    let e = s.normalized(j, k).unwrap();
                    assert!((0.0..=1.0).contains(&e.ratio));
                    total += e.ratio;
                }
                assert!((total - 1.0).abs() < 1e-12, "{pattern} row {j}: {total}");
            }
        }
    }

    #[test]
    fn log_space_path_above_threshold() {
        let n = LOG_SPACE_THRESHOLD + 1;
        let s = matrix_slice(MatrixPattern::Q132, n, n..=n, n..=n, SliceMode::Normalized).unwrap();
        let corner = s.normalized(n, n).unwrap().ratio;
        // Q_n(n,n)/C_n = C_{n-1}/C_n = (n+1)/(2(2n-1)).
        let expect = (n as f64 + 1.0) / (2.0 * (2.0 * n as f64 - 1.0));
        assert!((corner - expect).abs() < 1e-10 * expect);
    }
}
