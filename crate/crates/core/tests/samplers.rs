use std::collections::{BTreeSet, HashMap};

use num_traits::ToPrimitive;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use permshape::bijections::{phi, phi_inv, sample_avoider, sample_dyck, SeededRng};
use permshape::exact::{catalan, ExactCounts, MatrixPattern};
use permshape::perm::{avoids, enumerate_avoiders, Permutation, S3};

const CLASSES: [S3; 4] = [S3::P123, S3::P132, S3::P321, S3::P231];

/// Exact `P(σ(j) = k)` for a class, from the position matrices.
fn marginal(p: S3, n: usize) -> Vec<Vec<f64>> {
    let (pattern, reversed) = match p {
        S3::P123 => (MatrixPattern::P123, false),
        S3::P321 => (MatrixPattern::P123, true),
        S3::P132 => (MatrixPattern::Q132, false),
        S3::P231 => (MatrixPattern::Q132, true),
        _ => unreachable!(),
    };
    let counts = ExactCounts::new(pattern, n);
    let cn = catalan(n).to_f64().unwrap();
    (1..=n)
        .map(|j| {
            let row = if reversed { n + 1 - j } else { j };
            (1..=n).map(|k| counts.count(row, k).to_f64().unwrap() / cn).collect()
        })
        .collect()
}

#[test]
fn position_marginals_match_exact_matrices() {
    let samples = 100_000;
    for (ci, &p) in CLASSES.iter().enumerate() {
        let n = 4;
        let want = marginal(p, n);
        let mut hits = vec![vec![0u32; n]; n];
        let mut rng = SeededRng::with_stream(4, ci as u64);
        for _ in 0..samples {
            let s = sample_avoider(n, p, &mut rng).unwrap();
            for j in 1..=n {
                hits[j - 1][s.at(j) - 1] += 1;
            }
        }
        for j in 0..n {
            for k in 0..n {
                let pr = want[j][k];
                let sd = (pr * (1.0 - pr) / samples as f64).sqrt();
                let got = hits[j][k] as f64 / samples as f64;
                assert!((got - pr).abs() <= 3.0 * sd.max(1e-12), "{p} ({},{}) {got} vs {pr}", j + 1, k + 1);
            }
        }
    }
}

#[test]
fn goodness_of_fit_small_classes() {
    let samples = 200_000;
    for (ci, &p) in CLASSES.iter().enumerate() {
        for n in 2..=5 {
            let index: HashMap<Vec<usize>, usize> = enumerate_avoiders(n, &p.into())
                .unwrap()
                .enumerate()
                .map(|(i, s)| (s.into_values(), i))
                .collect();
            let mut hits = vec![0u64; index.len()];
            let mut rng = SeededRng::with_stream(10 + n as u64, ci as u64);
            for _ in 0..samples {
                let s = sample_avoider(n, p, &mut rng).unwrap();
                hits[index[s.values()]] += 1;
            }
            let e = samples as f64 / index.len() as f64;
            let stat: f64 = hits.iter().map(|&h| (h as f64 - e).powi(2) / e).sum();
            let pval = ChiSquared::new((index.len() - 1) as f64).unwrap().sf(stat);
            assert!(pval > 1e-4, "{p} n={n}: chi2 {stat} p {pval}");
        }
    }
}

#[test]
fn samples_stay_in_class_at_scale() {
    let mut rng = SeededRng::new(77);
    for &p in &CLASSES {
        for n in [1usize, 2, 50, 500] {
            for _ in 0..50 {
                let s = sample_avoider(n, p, &mut rng).unwrap();
                assert_eq!(s.len(), n);
                assert!(avoids(&s, &p.into()), "{p} n={n}: {s}");
            }
        }
    }
    assert!(sample_avoider(5, S3::P213, &mut rng).is_err());
    assert!(sample_avoider(5, S3::P312, &mut rng).is_err());
}

#[test]
fn dyck_round_trip_through_permutations() {
    let mut rng = SeededRng::new(3);
    for n in [0usize, 1, 7, 64, 1000] {
        for _ in 0..20 {
            let g = sample_dyck(n, &mut rng);
            assert_eq!(phi_inv(&phi(&g)).unwrap(), g);
        }
    }
}

#[test]
fn reversal_images_are_whole_classes() {
    for n in 1..=8 {
        let rev = |p: S3| -> BTreeSet<Vec<usize>> {
            enumerate_avoiders(n, &p.into())
                .unwrap()
                .map(|s: Permutation| s.reverse().into_values())
                .collect()
        };
        let set = |p: S3| -> BTreeSet<Vec<usize>> {
            enumerate_avoiders(n, &p.into()).unwrap().map(|s| s.into_values()).collect()
        };
        assert_eq!(rev(S3::P123), set(S3::P321));
        assert_eq!(rev(S3::P132), set(S3::P231));
    }
}
