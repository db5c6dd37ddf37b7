//! Verification suites behind `permshape verify`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

use clap::ValueEnum;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use permshape::asymptotics::{
    decay_slope, regime, regime_slope, u, xi, xi_probe, z_probe, RegimeQuery, Theorem,
};
use permshape::bijections::{
    map_123_132, map_132_123, phi, phi_inv, sample_avoider, sample_uniform, DyckPath, SeededRng,
    Step,
};
use permshape::exact::{catalan, exact_p, exact_q, normalize, ExactCounts, LogCounts, MatrixPattern};
use permshape::perm::{
    all_permutations, anti_fixed_points, contains, enumerate_avoiders, fixed_points,
    leftmost_decreasing_run, lis, rank_lambda, right_to_left_maxima, Permutation, StatKind,
    MAX_ENUMERATION_N, S3,
};
use permshape::statlab::{exp_exact, exp_fp_exact, PermClass};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Brute-force oracles for counts, bijections and statistics.
    Oracle,
    /// Margins and symmetries of the exact matrices.
    Symmetry,
    /// Limit constants, the z(1/2) probe and regime slopes.
    Convergence,
    /// Numbers behind the n = 250 figures.
    Figures,
}

impl Suite {
    fn default_max_n(self) -> usize {
        match self {
            Suite::Oracle => 9,
            Suite::Symmetry => 100,
            Suite::Convergence => 4000,
            Suite::Figures => 250,
        }
    }
}

struct Log<'a> {
    out: &'a mut dyn Write,
    checks: usize,
    failed: usize,
}

impl Log<'_> {
    fn check(&mut self, ok: bool, name: &str, detail: impl AsRef<str>) -> CliResult {
        self.checks += 1;
        if !ok {
            self.failed += 1;
        }
        let tag = if ok { "PASS" } else { "FAIL" };
        writeln!(self.out, "{tag} {name}: {}", detail.as_ref())?;
        Ok(())
    }

    fn info(&mut self, name: &str, detail: impl AsRef<str>) -> CliResult {
        writeln!(self.out, "INFO {name}: {}", detail.as_ref())?;
        Ok(())
    }
}

pub fn verify(suite: Suite, max_n: Option<usize>, out: &mut dyn Write) -> CliResult {
    let max_n = max_n.unwrap_or_else(|| suite.default_max_n());
    let mut log = Log { out, checks: 0, failed: 0 };
    match suite {
        Suite::Oracle => oracle(max_n, &mut log)?,
        Suite::Symmetry => symmetry(max_n, &mut log)?,
        Suite::Convergence => convergence(max_n, &mut log)?,
        Suite::Figures => figures(max_n, &mut log)?,
    }
    let suite_name = suite.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    writeln!(
        log.out,
        "suite {suite_name}: {}/{} checks passed",
        log.checks - log.failed,
        log.checks
    )?;
    if log.failed > 0 {
        Err(CliError::Failed(log.failed))
    } else {
        Ok(())
    }
}

fn avoiders(n: usize, p: S3) -> CliResult<Vec<Permutation>> {
    Ok(enumerate_avoiders(n, &p.into())?.collect())
}

fn triple_loop_contains(s: &[usize], p: [usize; 3]) -> bool {
    let n = s.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let t = [s[i], s[j], s[k]];
                let ok = (0..3).all(|a| (0..3).all(|b| a == b || (p[a] < p[b]) == (t[a] < t[b])));
                if ok {
                    return true;
                }
            }
        }
    }
    false
}

fn dyck_paths(n: usize) -> Vec<DyckPath> {
    fn go(n: usize, ups: usize, downs: usize, cur: &mut Vec<Step>, acc: &mut Vec<DyckPath>) {
        if ups == n && downs == n {
            acc.push(DyckPath::new(cur.clone()).expect("balanced by construction"));
            return;
        }
        if ups < n {
            cur.push(Step::U);
            go(n, ups + 1, downs, cur, acc);
            cur.pop();
        }
        if downs < ups {
            cur.push(Step::D);
            go(n, ups, downs + 1, cur, acc);
            cur.pop();
        }
    }
    let mut acc = Vec::new();
    go(n, 0, 0, &mut Vec::new(), &mut acc);
    acc
}

fn left_to_right_minima(s: &Permutation) -> Vec<(usize, usize)> {
    let mut best = usize::MAX;
    let mut out = Vec::new();
    for (i, &v) in s.values().iter().enumerate() {
        if v < best {
            best = v;
            out.push((i, v));
        }
    }
    out
}

fn multiset(values: impl IntoIterator<Item = usize>) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for v in values {
        *m.entry(v).or_insert(0) += 1;
    }
    m
}

fn lis_quadratic(s: &[usize]) -> usize {
    let mut best = vec![1usize; s.len()];
    for i in 0..s.len() {
        for j in 0..i {
            if s[j] < s[i] {
                best[i] = best[i].max(best[j] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

fn oracle(max_n: usize, log: &mut Log) -> CliResult {
    if max_n > MAX_ENUMERATION_N {
        return Err(CliError::Usage(format!(
            "oracle suite enumerates classes; --max-n must be at most {MAX_ENUMERATION_N}"
        )));
    }
    let small = max_n.min(8);

    let mut bad = Vec::new();
    for n in 1..=max_n {
        for p in S3::ALL {
            if BigUint::from(avoiders(n, p)?.len()) != catalan(n) {
                bad.push(format!("{p}@{n}"));
            }
        }
    }
    log.check(bad.is_empty(), "catalan_counts", format!("|S_n(pi)| = C_n, n <= {max_n} {bad:?}"))?;

    for (mat, p) in [(MatrixPattern::P123, S3::P123), (MatrixPattern::Q132, S3::P132)] {
        let mut mismatches = 0;
        for n in 1..=max_n {
            let mut brute = vec![vec![0u64; n + 1]; n + 1];
            for s in avoiders(n, p)? {
                for j in 1..=n {
                    brute[j][s.at(j)] += 1;
                }
            }
            let counts = ExactCounts::new(mat, n);
            for j in 1..=n {
                for k in 1..=n {
                    let single = match mat {
                        MatrixPattern::P123 => exact_p(n, j, k)?,
                        MatrixPattern::Q132 => exact_q(n, j, k)?,
                    };
                    let want = BigUint::from(brute[j][k]);
                    if single != want || counts.count(j, k) != want {
                        mismatches += 1;
                    }
                }
            }
        }
        log.check(
            mismatches == 0,
            &format!("cells_{mat}"),
            format!("exact cells equal brute force for n <= {max_n} ({mismatches} mismatches)"),
        )?;
    }

    let terms: Vec<String> = permshape::exact::q_terms(7, 4, 3)?
        .into_iter()
        .map(|t| t.count.to_string())
        .collect();
    log.check(
        exact_p(7, 4, 3)? == BigUint::from(70u8)
            && exact_q(7, 4, 3)? == BigUint::from(105u8)
            && terms == ["70", "27", "8"],
        "worked_examples",
        format!("P_7(4,3) = 70, Q_7(4,3) = 105 = {}", terms.join("+")),
    )?;

    let mut disagreements = 0;
    for n in 1..=small {
        for s in all_permutations(n)? {
            for p in S3::ALL {
                if contains(&s, &p.into()) != triple_loop_contains(s.values(), p.values()) {
                    disagreements += 1;
                }
            }
        }
    }
    log.check(
        disagreements == 0,
        "containment",
        format!("linear-time checks agree with the triple loop on S_n, n <= {small}"),
    )?;

    let mut phi_ok = true;
    for n in 0..=small {
        let paths = dyck_paths(n);
        let image: BTreeSet<Vec<usize>> = paths.iter().map(|g| phi(g).into_values()).collect();
        let class: BTreeSet<Vec<usize>> =
            avoiders(n.max(1), S3::P132)?.into_iter().map(|s| s.into_values()).collect();
        let round_trip = paths.iter().all(|g| phi_inv(&phi(g)).as_ref() == Ok(g));
        phi_ok &= round_trip && (n == 0 || (image == class && image.len() == paths.len()));
    }
    log.check(phi_ok, "phi_bijection", format!("phi maps D_n onto S_n(132) and phi_inv inverts it, n <= {small}"))?;

    let mut ss_ok = true;
    for n in 1..=small {
        let s123 = avoiders(n, S3::P123)?;
        let mut image = BTreeSet::new();
        for s in &s123 {
            let t = map_123_132(s)?;
            ss_ok &= left_to_right_minima(s) == left_to_right_minima(&t);
            ss_ok &= map_132_123(&t)? == *s;
            image.insert(t.into_values());
        }
        let class: BTreeSet<Vec<usize>> = avoiders(n, S3::P132)?.into_iter().map(|s| s.into_values()).collect();
        ss_ok &= image == class;
    }
    log.check(
        ss_ok,
        "simion_schmidt",
        format!("123 <-> 132 bijection fixing left-to-right minima, n <= {small}"),
    )?;

    let mut rev_ok = true;
    for n in 1..=small {
        for (from, to) in [(S3::P123, S3::P321), (S3::P132, S3::P231)] {
            let image: BTreeSet<Vec<usize>> =
                avoiders(n, from)?.into_iter().map(|s| s.reverse().into_values()).collect();
            let class: BTreeSet<Vec<usize>> = avoiders(n, to)?.into_iter().map(|s| s.into_values()).collect();
            rev_ok &= image == class;
        }
    }
    log.check(rev_ok, "reversal", format!("reverse maps S_n(123) onto S_n(321), S_n(132) onto S_n(231), n <= {small}"))?;

    let mut fp_max = 0;
    for n in 1..=max_n {
        for s in avoiders(n, S3::P123)? {
            fp_max = fp_max.max(fixed_points(&s));
        }
    }
    log.check(fp_max <= 2, "fp_123_at_most_two", format!("max fp over S_n(123), n <= {max_n}: {fp_max}"))?;

    let mut trail_ok = true;
    for n in 1..=small {
        let s123 = avoiders(n, S3::P123)?;
        let s132 = avoiders(n, S3::P132)?;
        let s321 = avoiders(n, S3::P321)?;
        let base = multiset(s123.iter().map(leftmost_decreasing_run));
        trail_ok &= multiset(s132.iter().map(leftmost_decreasing_run)) == base;
        trail_ok &= multiset(s123.iter().map(|s| n + 1 - s.at(1))) == base;
        trail_ok &= multiset(s132.iter().map(right_to_left_maxima)) == base;
        trail_ok &= multiset(s123.iter().map(anti_fixed_points)) == multiset(s321.iter().map(fixed_points));
    }
    log.check(
        trail_ok,
        "equidistribution",
        format!("ldr(123) ~ ldr(132) ~ n+1-sigma(1) ~ rmax(132), afp(123) ~ fp(321), n <= {small}"),
    )?;

    let mut rank_ok = true;
    let mut half_ok = true;
    for n in 1..=small {
        for s in all_permutations(n)? {
            for lambda in [0.5, 1.0, 2.0] {
                let r = rank_lambda(&s, lambda)?;
                rank_ok &= r + (lambda * r as f64).floor() as usize <= n;
            }
            half_ok &= 2 * rank_lambda(&s, 1.0)? <= n;
        }
    }
    log.check(
        rank_ok && half_ok,
        "rank_bounds",
        format!("r + floor(lambda r) <= n for lambda in {{0.5,1,2}}, rank <= n/2, n <= {small}"),
    )?;
    log.info(
        "rank_bounds",
        "rank_lambda <= n/(1+lambda) fails for lambda = 0.5 (e.g. 2 3 4 1 has rank 3 > 8/3)",
    )?;

    let mut rng = SeededRng::new(64);
    let mut lis_ok = true;
    for i in 0..2000 {
        let s = sample_uniform(1 + i % 64, &mut rng);
        lis_ok &= lis(&s) == lis_quadratic(s.values());
    }
    log.check(lis_ok, "lis", "patience sorting equals the quadratic DP on 2000 random permutations")?;

    let samples = 100_000;
    let mut freq_ok = true;
    let mut worst = 0.0f64;
    for (ci, p) in [S3::P123, S3::P132, S3::P321, S3::P231].into_iter().enumerate() {
        let mut rng = SeededRng::with_stream(3, ci as u64);
        let mut hits: HashMap<Vec<usize>, usize> = HashMap::new();
        for _ in 0..samples {
            *hits.entry(sample_avoider(3, p, &mut rng)?.into_values()).or_insert(0) += 1;
        }
        freq_ok &= hits.len() == 5;
        for h in hits.values() {
            let f = *h as f64 / samples as f64;
            worst = worst.max((f - 0.2).abs());
        }
    }
    log.check(
        freq_ok && worst <= 0.01,
        "sampler_n3",
        format!("each avoider of size 3 drawn with frequency 0.2 +- {worst:.4}"),
    )?;

    let mut exp_ok = true;
    for n in 1..=small {
        for class in PermClass::ALL {
            for kind in [StatKind::Fp, StatKind::Afp, StatKind::First, StatKind::Last, StatKind::Chi2] {
                let perms = match class.pattern() {
                    Some(p) => avoiders(n, p)?,
                    None => all_permutations(n)?,
                };
                let total: u64 = perms
                    .iter()
                    .map(|s| permshape::perm::stat(s, kind).map(|v| v.value))
                    .sum::<permshape::Result<u64>>()?;
                let want = BigRational::new(BigInt::from(total), BigInt::from(perms.len()));
                exp_ok &= exp_exact(kind, class, n)?.value.as_rational() == Some(&want);
            }
        }
    }
    log.check(exp_ok, "expectations", format!("matrix expectations equal class averages, n <= {small}"))?;
    Ok(())
}

fn symmetry(max_n: usize, log: &mut Log) -> CliResult {
    let mut margins = true;
    let mut transpose = true;
    let mut anti = true;
    let mut extremes = true;
    let mut antidiag = true;
    for n in 1..=max_n {
        let cn = catalan(n);
        for mat in [MatrixPattern::P123, MatrixPattern::Q132] {
            let counts = ExactCounts::new(mat, n);
            let m: Vec<Vec<BigUint>> = (1..=n)
                .map(|j| (1..=n).map(|k| counts.count(j, k)).collect())
                .collect();
            let mut cols = vec![BigUint::zero(); n];
            for j in 0..n {
                let mut row = BigUint::zero();
                for k in 0..n {
                    row += &m[j][k];
                    cols[k] += &m[j][k];
                    transpose &= m[j][k] == m[k][j];
                    if mat == MatrixPattern::P123 {
                        anti &= m[j][k] == m[n - 1 - k][n - 1 - j];
                    }
                }
                margins &= row == cn;
            }
            margins &= cols.iter().all(|c| *c == cn);
            if n >= 3 {
                let c1 = catalan(n - 1);
                match mat {
                    MatrixPattern::P123 => {
                        extremes &= m[0][n - 1] == c1 && m[1][n - 1] == c1 && m[0][n - 2] == c1;
                        extremes &= m.iter().flatten().max() == Some(&c1);
                        let s: BigUint = (0..n).map(|k| &m[k][n - 1 - k]).sum();
                        antidiag &= s == cn;
                    }
                    MatrixPattern::Q132 => {
                        extremes &= m[n - 1][n - 1] == c1 && m[1][n - 1] < c1;
                    }
                }
            }
        }
    }
    log.check(margins, "margins", format!("row and column sums equal C_n, n <= {max_n}"))?;
    log.check(transpose, "transpose", format!("P and Q symmetric, n <= {max_n}"))?;
    log.check(anti, "anti_transpose", format!("P_n(j,k) = P_n(n+1-k,n+1-j), n <= {max_n}"))?;
    log.check(
        exact_q(3, 1, 2)? == BigUint::from(2u8) && exact_q(3, 2, 3)? == BigUint::from(1u8),
        "q_asymmetry",
        "Q_3(1,2) = 2, Q_3(2,3) = 1",
    )?;
    log.check(extremes, "extremes", format!("P(1,n) = P(2,n) = P(1,n-1) = max P = C_(n-1); Q(n,n) = C_(n-1) > Q(2,n), 3 <= n <= {max_n}"))?;
    log.check(antidiag, "anti_diagonal", format!("sum_k P_n(k,n+1-k) = C_n, n <= {max_n}"))?;

    let mut rng = SeededRng::new(500);
    let top = max_n.clamp(1, 500);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let n = 1 + (i * 7919) % top;
        let s = sample_uniform(n, &mut rng);
        let (j, k) = (s.at(1), s.at(n));
        for count in [exact_p(n, j, k)?, exact_q(n, j, k)?] {
            let exact = BigRational::new(BigInt::from(count.clone()), BigInt::from(catalan(n)));
            let want = exact.to_f64().unwrap_or(f64::NAN);
            let got = normalize(&count, n)?.ratio;
            if want > 0.0 {
                worst = worst.max(((got - want) / want).abs());
            }
        }
    }
    log.check(worst < 1e-10, "normalize", format!("max relative error {worst:.2e} on 200 cells, n <= {top}"))?;
    Ok(())
}

fn upto(list: &[usize], max_n: usize) -> Vec<usize> {
    list.iter().copied().filter(|&n| n <= max_n).collect()
}

fn convergence(max_n: usize, log: &mut Log) -> CliResult {
    let ns = upto(&[400, 800, 1600, 3200], max_n);
    if ns.len() >= 2 {
        let target = xi(0.5, 0.0)?;
        let errs: Vec<f64> = ns.iter().map(|&n| (xi_probe(n) - target).abs() / target).collect();
        let last = *errs.last().unwrap_or(&f64::NAN);
        log.check(
            errs.windows(2).all(|w| w[1] < w[0]) && last < 0.05,
            "xi",
            format!("n^1.5 P_n(n/2,n/2+1)/C_n on {ns:?}: final error {:.4}%", 100.0 * last),
        )?;
    }
    let n = max_n.min(2000);
    if n >= 10 {
        let logs = LogCounts::new(MatrixPattern::Q132, n);
        let corner = logs.ratio(n, n);
        let u0 = u(0.0)?;
        log.check((corner - u0).abs() / u0 < 0.01, "u0", format!("Q_{n}(n,n)/C_n = {corner:.6} vs {u0}"))?;
        let u1 = u(1.0)?;
        let cell = logs.ratio(n - 1, n - 1);
        log.check((cell - u1).abs() / u1 < 0.01, "u1", format!("Q_{n}(n-1,n-1)/C_n = {cell:.6} vs {u1}"))?;
    }
    let zs = upto(&[500, 1000, 2000, 4000], max_n);
    if zs.len() >= 2 {
        let p = z_probe(&zs, 0.10)?;
        log.check(
            matches!(p.selected, permshape::asymptotics::ZChoice::Thm | permshape::asymptotics::ZChoice::Lem),
            "z_selection",
            format!(
                "extrapolated {:.5} on {zs:?}; selected {} (z_thm {:.5}, z_lem {:.5})",
                p.extrapolated, p.selected, p.z_thm, p.z_lem
            ),
        )?;
    }
    let fp_n = max_n.min(4000);
    if fp_n >= 100 {
        let v = exp_fp_exact(fp_n, PermClass::Avoid123)?.value_f64();
        log.check((v - 0.5).abs() < 0.05, "fp_123", format!("E[fp] over S_{fp_n}(123) = {v:.6}"))?;
    }
    let sched = upto(&[250, 500, 1000, 2000], max_n);
    if sched.len() >= 3 {
        let battery = [
            (Theorem::F, 0.5, 0.5, 0.0, 0.0),
            (Theorem::F, 0.5, 0.5, 1.0, 0.0),
            (Theorem::G, 1.0, 1.0, 0.0, 0.0),
            (Theorem::G, 1.0, 1.0, 1.0, 0.5),
            (Theorem::G, 0.6, 0.6, 1.0, 0.4),
            (Theorem::G, 0.5, 0.5, 0.0, 0.0),
        ];
        for (t, a, b, c, alpha) in battery {
            let q = RegimeQuery::new(a, b, c, alpha)?;
            let r = regime(t, &q)?;
            let slope = -regime_slope(t, &q, &sched)?.slope;
            log.check(
                (slope - r.exponent).abs() <= 0.1,
                "regime",
                format!("{t} {q}: exponent {} fitted {slope:.4}", r.exponent),
            )?;
        }
        let q = RegimeQuery::new(0.3, 0.4, 0.0, 0.0)?;
        let slope = decay_slope(Theorem::F, &q, &sched)?.slope;
        log.check(slope <= -0.01, "decay", format!("F {q}: slope of log-ratio vs n {slope:.5}"))?;
    }
    Ok(())
}

fn figures(n: usize, log: &mut Log) -> CliResult {
    if n < 8 {
        return Err(CliError::Usage("figures suite needs --max-n >= 8".into()));
    }
    let (lo, hi) = (n / 4, 3 * n / 4);
    let argmax = |d: &[BigUint]| -> usize {
        let mut best = lo;
        for k in lo..=hi {
            if d[k - 1] > d[best - 1] {
                best = k;
            }
        }
        best
    };
    let p = ExactCounts::new(MatrixPattern::P123, n).diagonal(false);
    let q = ExactCounts::new(MatrixPattern::Q132, n).diagonal(false);
    let (ap, aq) = (argmax(&p), argmax(&q));
    if n == 250 {
        log.check(ap == 118, "argmax_p", format!("argmax_k P_250(k,k) over [{lo},{hi}] = {ap}"))?;
        log.check(aq == 119, "argmax_q", format!("argmax_k Q_250(k,k) over [{lo},{hi}] = {aq}"))?;
        let lead = format!("{:.2e}", catalan(250).to_f64().unwrap_or(f64::NAN));
        log.check(lead == "4.65e146", "catalan_250", format!("C_250 = {lead}"))?;
    } else {
        log.info("argmax", format!("n = {n}: P peaks at {ap}, Q at {aq} over [{lo},{hi}]"))?;
    }
    let c1 = catalan(n - 1);
    log.check(q[n - 1] == c1, "corner_spike", format!("Q_{n}(n,n) = C_(n-1)"))?;
    let anti: BigUint = ExactCounts::new(MatrixPattern::P123, n).diagonal(true).into_iter().sum();
    log.check(anti == catalan(n), "wall", format!("anti-diagonal of P_{n} sums to C_n"))?;
    Ok(())
}
