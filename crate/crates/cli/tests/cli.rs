use std::process::Command;

use num_bigint::BigUint;

use permshape::exact::{ExactCounts, MatrixPattern};
use permshape::perm::{avoids, Permutation, S3};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("permshape").chain(args.iter().copied());
    let code = permshape_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    out
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn argmax(csv: &str) -> usize {
    let mut best = (0, BigUint::default());
    for r in rows(csv) {
        let v: BigUint = r[1].parse().unwrap();
        if v > best.1 {
            best = (r[0].parse().unwrap(), v);
        }
    }
    best.0
}

#[test]
fn matrix_132_n3_rows_sum_to_five() {
    let out = ok(&["matrix", "--pattern", "132", "--n", "3", "--mode", "exact"]);
    assert_eq!(out.lines().next(), Some("j,k,value"));
    let mut sums = [0u64; 3];
    for r in rows(&out) {
        let j: usize = r[0].parse().unwrap();
        sums[j - 1] += r[2].parse::<u64>().unwrap();
    }
    assert_eq!(sums, [5, 5, 5]);
}

#[test]
fn matrix_file_round_trip_and_slices() {
    let dir = std::env::temp_dir().join(format!("permshape-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("p.csv");
    let p = path.to_str().unwrap();
    assert_eq!(ok(&["matrix", "--pattern", "123", "--n", "12", "--out", p]), "");
    let full = std::fs::read_to_string(&path).unwrap();
    assert_eq!(full, ok(&["matrix", "--pattern", "123", "--n", "12"]));
    assert_eq!(rows(&full).len(), 144);
    let slice = ok(&["matrix", "--pattern", "123", "--n", "12", "--rows", "3:5", "--cols", "10:12"]);
    let want: Vec<_> = full
        .lines()
        .skip(1)
        .filter(|l| {
            let r: Vec<usize> = l.split(',').take(2).map(|x| x.parse().unwrap()).collect();
            (3..=5).contains(&r[0]) && (10..=12).contains(&r[1])
        })
        .collect();
    assert_eq!(slice.lines().skip(1).collect::<Vec<_>>(), want);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn normalized_values_use_scientific_notation() {
    let out = ok(&["matrix", "--pattern", "132", "--n", "3", "--mode", "normalized"]);
    let first = &rows(&out)[0];
    assert_eq!(first[2], "2.00000000000e-1");
    let big = ok(&["diag", "--pattern", "123", "--n", "2500", "--mode", "normalized", "--range", "1:2"]);
    for r in rows(&big) {
        let (mantissa, exp) = r[1].split_once('e').unwrap();
        let m: f64 = mantissa.parse().unwrap();
        assert!((1.0..10.0).contains(&m) && mantissa.len() == 13, "{r:?}");
        assert!(exp.parse::<i32>().unwrap() < -1000, "{r:?}");
    }
}

#[test]
fn diagonal_argmax_at_250() {
    let p = ok(&["diag", "--pattern", "123", "--n", "250"]);
    assert_eq!(argmax(&p), 118);
    let q = ok(&["diag", "--pattern", "132", "--n", "250", "--range", "62:187"]);
    assert_eq!(argmax(&q), 119);
    let both = ok(&["diag", "--pattern", "both", "--n", "250"]);
    assert_eq!(both.lines().next(), Some("k,p123,q132"));
    assert_eq!(rows(&both).len(), 250);
    let anti = ok(&["diag", "--pattern", "123", "--n", "20", "--anti"]);
    assert_eq!(rows(&anti).len(), 20);
}

#[test]
fn samples_are_deterministic_and_in_class() {
    for pat in ["123", "132", "321", "231"] {
        let a = ok(&["sample", "--pattern", pat, "--n", "40", "--count", "25", "--seed", "9"]);
        assert_eq!(a, ok(&["sample", "--pattern", pat, "--n", "40", "--count", "25", "--seed", "9"]));
        assert_ne!(a, ok(&["sample", "--pattern", pat, "--n", "40", "--count", "25", "--seed", "10"]));
        let p: S3 = pat.parse().unwrap();
        assert_eq!(a.lines().count(), 25);
        for line in a.lines() {
            let s = Permutation::new(line.split(' ').map(|x| x.parse().unwrap()).collect()).unwrap();
            assert!(avoids(&s, &p.into()));
        }
    }
    let (code, _, _) = run(&["sample", "--pattern", "213", "--n", "5"]);
    assert_eq!(code, 2);
}

#[test]
fn stats_report_lines() {
    let out = ok(&["stats", "--stat", "fp", "--pattern", "132", "--n", "7", "--exact"]);
    let f: Vec<&str> = out.split_whitespace().collect();
    assert_eq!(&f[..5], ["fp", "132", "7", "exact", "1"]);
    let mc = ok(&["stats", "--stat", "rank", "--lambda", "1", "--pattern", "123", "--n", "50", "--mc", "--samples", "500", "--seed", "4"]);
    assert_eq!(mc.split_whitespace().count(), 7);
    assert_eq!(mc, ok(&["stats", "--stat", "rank", "--lambda", "1", "--pattern", "123", "--n", "50", "--mc", "--samples", "500", "--seed", "4"]));
    let first = ok(&["stats", "--stat", "first", "--pattern", "123", "--n", "1000", "--exact"]);
    assert!(first.starts_with("first 123 1000 exact "));
    let (code, _, _) = run(&["stats", "--stat", "fp", "--pattern", "123", "--n", "7", "--exact", "--mc"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["stats", "--stat", "fp", "--lambda", "1", "--pattern", "123", "--n", "7", "--exact"]);
    assert_eq!(code, 2);
}

#[test]
fn limit_lines() {
    let out = ok(&["limit", "--theorem", "F", "--a", "0.5", "--b", "0.5", "--c", "0", "--alpha", "0"]);
    assert!(out.contains("exponent: 1.5"), "{out}");
    let g = ok(&["limit", "--theorem", "G", "--a", "0.6", "--b", "0.6", "--c", "-1", "--alpha", "0.4"]);
    assert!(g.lines().any(|l| l.starts_with("exponent")));
}

#[test]
fn exact_csv_reparses_to_counts() {
    for (pat, mat) in [("123", MatrixPattern::P123), ("132", MatrixPattern::Q132)] {
        let counts = ExactCounts::new(mat, 90);
        for r in rows(&ok(&["matrix", "--pattern", pat, "--n", "90"])) {
            let (j, k): (usize, usize) = (r[0].parse().unwrap(), r[1].parse().unwrap());
            assert_eq!(r[2].parse::<BigUint>().unwrap(), counts.count(j, k));
        }
    }
}

#[test]
fn empty_matrix_at_zero() {
    assert_eq!(ok(&["matrix", "--pattern", "123", "--n", "0"]), "j,k,value\n");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["matrix", "--pattern", "213", "--n", "3"][..],
        &["matrix", "--pattern", "123", "--n", "3", "--bogus"],
        &["matrix", "--pattern", "123", "--n", "x"],
        &["matrix", "--pattern", "123", "--n", "4", "--rows", "3:9"],
        &["stats", "--stat", "lis", "--pattern", "123", "--n", "40", "--exact"],
        &["verify", "--suite", "oracle", "--max-n", "13"],
    ] {
        let (code, _, err) = run(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty());
    }
}

#[test]
fn oracle_and_figure_suites_pass() {
    let out = ok(&["verify", "--suite", "oracle", "--max-n", "7"]);
    assert!(out.lines().last().unwrap().starts_with("suite oracle:"));
    assert!(!out.contains("FAIL"));
    let fig = ok(&["verify", "--suite", "figures"]);
    assert!(fig.contains("PASS argmax_p"));
}

#[test]
fn binary_exit_codes_and_repeatability() {
    let bin = env!("CARGO_BIN_EXE_permshape");
    let go = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let a = go(&["diag", "--pattern", "both", "--n", "60", "--mode", "normalized"]);
    let b = go(&["diag", "--pattern", "both", "--n", "60", "--mode", "normalized"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(go(&["matrix", "--pattern", "9"]).status.code(), Some(2));
    assert_eq!(go(&["--help"]).status.code(), Some(0));
}
