use num_bigint::BigInt;
use num_rational::BigRational;

use permshape::perm::StatKind;
use permshape::statlab::{
    exp_exact, exp_fp_exact, exp_position_exact, fit_loglog, mc_expectation, PermClass, Position,
};

#[test]
fn monte_carlo_agrees_with_exact_at_200() {
    let n = 200;
    let mut seed = 0;
    for class in PermClass::ALL {
        for kind in [StatKind::Fp, StatKind::Afp, StatKind::First, StatKind::Last, StatKind::Chi2] {
            seed += 1;
            let exact = exp_exact(kind, class, n).unwrap().value_f64();
            let mc = mc_expectation(kind, class, n, 4000, seed).unwrap();
            let se = mc.value.stderr().unwrap();
            assert!(
                (mc.value_f64() - exact).abs() <= 4.0 * se.max(1e-12),
                "{kind} {class}: {} ± {se} vs {exact}",
                mc.value_f64()
            );
        }
    }
}

#[test]
fn fixed_points_of_132_average_one() {
    let r = mc_expectation(StatKind::Fp, PermClass::Avoid132, 100, 100_000, 2024).unwrap();
    let se = r.value.stderr().unwrap();
    assert!((r.value_f64() - 1.0).abs() <= 3.0 * se, "{} ± {se}", r.value_f64());
}

#[test]
fn fp_321_is_exactly_one_and_123_tends_to_half() {
    let one = BigRational::from_integer(BigInt::from(1));
    for n in [1, 2, 3, 10, 99, 200, 333] {
        assert_eq!(exp_fp_exact(n, PermClass::Avoid321).unwrap().value.as_rational(), Some(&one));
    }
    let mut prev = f64::INFINITY;
    for n in [250, 500, 1000, 2000] {
        let v = exp_fp_exact(n, PermClass::Avoid123).unwrap().value_f64();
        assert!(v > 0.5 && v < prev, "n={n}: {v}");
        prev = v;
    }
}

#[test]
fn first_position_gap_approaches_three() {
    let mut prev = 0.0;
    for n in [10usize, 100, 1000, 5000] {
        let v = exp_position_exact(n, Position::First123).unwrap().value_f64();
        let gap = n as f64 + 1.0 - v;
        assert!(gap > prev && gap < 3.0);
        assert!((gap - (3.0 - 6.0 / (n as f64 + 2.0))).abs() < 1e-9);
        prev = gap;
    }
}

#[test]
fn rank_gap_grows_like_square_root() {
    let ns = [100usize, 200, 400, 800];
    for (i, lambda) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let gaps: Vec<f64> = ns
            .iter()
            .map(|&n| {
                let r = mc_expectation(StatKind::RankLambda(lambda), PermClass::Avoid123, n, 2000, 40 + i as u64)
                    .unwrap();
                assert!(r.value_f64() <= n as f64 / (1.0 + lambda) + 1.0);
                n as f64 / (1.0 + lambda) - r.value_f64()
            })
            .collect();
        let fit = fit_loglog(&ns, &gaps).unwrap();
        assert!((fit.slope - 0.5).abs() < 0.1, "lambda {lambda}: slope {}", fit.slope);
    }
}

#[test]
fn report_lines_are_reproducible() {
    let a = mc_expectation(StatKind::Chi2, PermClass::Uniform, 30, 1000, 5).unwrap();
    let b = mc_expectation(StatKind::Chi2, PermClass::Uniform, 30, 1000, 5).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_line(), b.to_line());
    let c = mc_expectation(StatKind::Chi2, PermClass::Uniform, 30, 1000, 6).unwrap();
    assert_ne!(a.to_line(), c.to_line());
}
