use super::{q_range, MatrixPattern, NormalizedEntry};

/// Log-space evaluation of `P_n(j,k)/C_n` and `Q_n(j,k)/C_n` for sizes where
/// bignum arithmetic is too slow.
///
/// `ln k!` is accumulated with compensated summation of `ln i`, so a single
/// table serves every ballot and Catalan number up to size `n`.
#[derive(Debug, Clone)]
pub struct LogCounts {
    pattern: MatrixPattern,
    n: usize,
    ln_int: Vec<f64>,
    ln_fact: Vec<f64>,
    ln_cat: Vec<f64>,
}

impl LogCounts {
    pub fn new(pattern: MatrixPattern, n: usize) -> Self {
        let top = 2 * n + 2;
        let ln_int: Vec<f64> = (0..=top)
            .map(|i| if i == 0 { f64::NEG_INFINITY } else { (i as f64).ln() })
            .collect();
        let mut ln_fact = Vec::with_capacity(top + 1);
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        ln_fact.push(0.0);
        for x in &ln_int[1..] {
            let t = sum + x;
            if sum.abs() >= x.abs() {
                comp += (sum - t) + x;
            } else {
                comp += (x - t) + sum;
            }
            sum = t;
            ln_fact.push(sum + comp);
        }
        let ln_cat = (0..=n)
            .map(|m| ln_fact[2 * m] - ln_fact[m] - ln_fact[m + 1])
            .collect();
        LogCounts {
            pattern,
            n,
            ln_int,
            ln_fact,
            ln_cat,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pattern(&self) -> MatrixPattern {
        self.pattern
    }

    /// `ln C_m` for `m <= n`.
    pub fn ln_catalan(&self, m: usize) -> f64 {
        self.ln_cat[m]
    }

    /// `ln k!` for `k <= 2n + 2`.
    pub fn ln_factorial(&self, k: usize) -> f64 {
        self.ln_fact[k]
    }

    /// `ln b(m,i)` for `1 <= i <= m <= n`.
    pub fn ln_ballot(&self, m: usize, i: usize) -> f64 {
        self.ln_int[m - i + 1] - self.ln_int[m + i - 1] + self.ln_fact[m + i - 1]
            - self.ln_fact[m]
            - self.ln_fact[i - 1]
    }

    fn ln_q_term(&self, j: usize, k: usize, r: usize) -> f64 {
        let n = self.n;
        self.ln_ballot(n - j + 1, k - r) + self.ln_ballot(n - k + 1, j - r) + self.ln_cat[r]
            - self.ln_cat[n]
    }

    /// `ln(count(j,k) / C_n)`; panics outside `[1,n]^2`.
    pub fn ln_ratio(&self, j: usize, k: usize) -> f64 {
        let n = self.n;
        assert!(
            (1..=n).contains(&j) && (1..=n).contains(&k),
            "cell ({j},{k}) outside [1,{n}]^2"
        );
        match self.pattern {
            MatrixPattern::P123 if j + k <= n + 1 => {
                self.ln_ballot(n - k + 1, j) + self.ln_ballot(n - j + 1, k) - self.ln_cat[n]
            }
            MatrixPattern::P123 => {
                self.ln_ballot(j, n - k + 1) + self.ln_ballot(k, n - j + 1) - self.ln_cat[n]
            }
            MatrixPattern::Q132 => {
                let range = q_range(n, j, k);
                let max = range
                    .clone()
                    .map(|r| self.ln_q_term(j, k, r))
                    .fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = range.map(|r| (self.ln_q_term(j, k, r) - max).exp()).sum();
                max + sum.ln()
            }
        }
    }

    /// `count(j,k) / C_n` as a plain double. Cells far below `1e-300` may
    /// underflow to zero; use [`LogCounts::ln_ratio`] when the tail matters.
    pub fn ratio(&self, j: usize, k: usize) -> f64 {
        match self.pattern {
            MatrixPattern::P123 => self.ln_ratio(j, k).exp(),
            MatrixPattern::Q132 => {
                let n = self.n;
                assert!(
                    (1..=n).contains(&j) && (1..=n).contains(&k),
                    "cell ({j},{k}) outside [1,{n}]^2"
                );
                q_range(n, j, k)
                    .map(|r| self.ln_q_term(j, k, r).exp())
                    .sum()
            }
        }
    }

    pub fn entry(&self, j: usize, k: usize) -> NormalizedEntry {
        NormalizedEntry::from_log(self.ln_ratio(j, k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{big_ln, catalan, exact_p, exact_q, normalize, ExactCounts};

    #[test]
    fn ln_factorial_matches_bignum() {
        let logs = LogCounts::new(MatrixPattern::P123, 600);
        let mut fact = num_bigint::BigUint::from(1u8);
        for k in 1..=1200usize {
            fact *= k;
            let exact = big_ln(&fact);
            assert!(
                (logs.ln_factorial(k) - exact).abs() < 1e-12 * exact.max(1.0),
                "k={k}"
            );
        }
    }

    #[test]
    fn ln_catalan_matches_bignum() {
        let logs = LogCounts::new(MatrixPattern::P123, 400);
        for m in [0usize, 1, 2, 10, 100, 399, 400] {
            assert!((logs.ln_catalan(m) - big_ln(&catalan(m))).abs() < 1e-11);
        }
    }

    #[test]
    fn ratios_agree_with_exact_route() {
        for n in [7usize, 40, 123] {
            let lp = LogCounts::new(MatrixPattern::P123, n);
            let lq = LogCounts::new(MatrixPattern::Q132, n);
            for j in (1..=n).step_by(3) {
                for k in (1..=n).step_by(5) {
                    let p = normalize(&exact_p(n, j, k).unwrap(), n).unwrap().ratio;
                    let q = normalize(&exact_q(n, j, k).unwrap(), n).unwrap().ratio;
                    let rp = lp.ratio(j, k);
                    let rq = lq.ratio(j, k);
                    assert!((rp - p).abs() <= 1e-11 * p, "P {n} {j} {k}: {rp} vs {p}");
                    assert!((rq - q).abs() <= 1e-11 * q, "Q {n} {j} {k}: {rq} vs {q}");
                    assert!((lq.ln_ratio(j, k).exp() - rq).abs() <= 1e-11 * rq);
                }
            }
        }
    }

    #[test]
    fn full_row_sums_to_one() {
        let n = 300;
        for pattern in [MatrixPattern::P123, MatrixPattern::Q132] {
            let logs = LogCounts::new(pattern, n);
            let exact = ExactCounts::new(pattern, 10);
            assert_eq!(exact.n(), 10);
            for k in [1usize, 2, 150, 299, 300] {
                let s: f64 = (1..=n).map(|j| logs.ratio(j, k)).sum();
                assert!((s - 1.0).abs() < 1e-11, "{pattern} column {k}: {s}");
            }
        }
    }
}
