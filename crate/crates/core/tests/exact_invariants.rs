use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};

use permshape::bijections::SeededRng;
use permshape::exact::{
    catalan, exact_p, exact_q, matrix_slice, normalize, ExactCounts, LogCounts, MatrixPattern,
    SliceMode,
};
use permshape::perm::{enumerate_avoiders, S3};

fn full(pattern: MatrixPattern, n: usize) -> Vec<Vec<BigUint>> {
    let counts = ExactCounts::new(pattern, n);
    let mut m = vec![vec![BigUint::zero(); n + 1]; n + 1];
    for (j, row) in m.iter_mut().enumerate().skip(1) {
        for (k, cell) in row.iter_mut().enumerate().skip(1) {
            *cell = counts.count(j, k);
        }
    }
    m
}

#[test]
fn cells_match_enumeration_up_to_nine() {
    for (pattern, s3) in [(MatrixPattern::P123, S3::P123), (MatrixPattern::Q132, S3::P132)] {
        for n in 1..=9 {
            let mut brute = vec![vec![0u32; n + 1]; n + 1];
            for s in enumerate_avoiders(n, &s3.into()).unwrap() {
                for j in 1..=n {
                    brute[j][s.at(j)] += 1;
                }
            }
            let m = full(pattern, n);
            for j in 1..=n {
                for k in 1..=n {
                    assert_eq!(m[j][k], BigUint::from(brute[j][k]), "{pattern} n={n} ({j},{k})");
                }
            }
        }
    }
}

#[test]
fn margins_and_transpose_symmetry_up_to_200() {
    for n in 1..=200 {
        let cn = catalan(n);
        for pattern in [MatrixPattern::P123, MatrixPattern::Q132] {
            let m = full(pattern, n);
            let mut cols = vec![BigUint::zero(); n + 1];
            for j in 1..=n {
                let mut row = BigUint::zero();
                for k in 1..=n {
                    row += &m[j][k];
                    cols[k] += &m[j][k];
                    assert_eq!(m[j][k], m[k][j], "{pattern} n={n} ({j},{k}) transpose");
                }
                assert_eq!(row, cn, "{pattern} n={n} row {j}");
            }
            assert!(cols[1..].iter().all(|c| *c == cn), "{pattern} n={n} columns");
        }
    }
}

#[test]
fn anti_transpose() {
    for n in 1..=60 {
        let m = full(MatrixPattern::P123, n);
        for j in 1..=n {
            for k in 1..=n {
                assert_eq!(m[j][k], m[n + 1 - k][n + 1 - j], "n={n} ({j},{k})");
            }
        }
    }
    assert_eq!(exact_q(3, 1, 2).unwrap(), BigUint::from(2u8));
    assert_eq!(exact_q(3, 2, 3).unwrap(), BigUint::from(1u8));
}

#[test]
fn extremes() {
    for n in 3..=120 {
        let c = catalan(n - 1);
        let p = ExactCounts::new(MatrixPattern::P123, n);
        assert_eq!(p.count(1, n), c);
        assert_eq!(p.count(2, n), c);
        assert_eq!(p.count(1, n - 1), c);
        let max = (1..=n)
            .flat_map(|j| (1..=n).map(move |k| (j, k)))
            .map(|(j, k)| p.count(j, k))
            .max()
            .unwrap();
        assert_eq!(max, c, "n={n}");
        let q = ExactCounts::new(MatrixPattern::Q132, n);
        assert_eq!(q.count(n, n), c);
        assert!(q.count(2, n) < c, "n={n}");
    }
}

#[test]
fn anti_diagonal_sums_to_catalan() {
    for n in 1..=300 {
        let d = ExactCounts::new(MatrixPattern::P123, n).diagonal(true);
        assert_eq!(d.into_iter().sum::<BigUint>(), catalan(n), "n={n}");
    }
}

#[test]
fn normalize_precision() {
    let mut rng = SeededRng::seed_from_u64(500);
    for _ in 0..400 {
        let n = rng.gen_range(1..=500);
        let (j, k) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
        for (count, pattern) in [
            (exact_p(n, j, k).unwrap(), MatrixPattern::P123),
            (exact_q(n, j, k).unwrap(), MatrixPattern::Q132),
        ] {
            let exact = BigRational::new(BigInt::from(count.clone()), BigInt::from(catalan(n)));
            let want = exact.to_f64().unwrap();
            let got = normalize(&count, n).unwrap();
            if want > 0.0 {
                assert!(((got.ratio - want) / want).abs() < 1e-10, "{pattern} n={n} ({j},{k})");
                let logs = LogCounts::new(pattern, n).ratio(j, k);
                assert!(((logs - want) / want).abs() < 1e-10, "log-space {pattern} n={n} ({j},{k})");
            } else {
                assert_eq!(got.ratio, 0.0);
            }
        }
    }
}

#[test]
fn slices_agree_with_single_cells() {
    let n = 37;
    for pattern in [MatrixPattern::P123, MatrixPattern::Q132] {
        let s = matrix_slice(pattern, n, 5..=20, 11..=37, SliceMode::Exact).unwrap();
        for (j, k) in s.cells() {
            let single = match pattern {
                MatrixPattern::P123 => exact_p(n, j, k),
                MatrixPattern::Q132 => exact_q(n, j, k),
            }
            .unwrap();
            assert_eq!(s.exact(j, k), Some(&single));
        }
    }
}
