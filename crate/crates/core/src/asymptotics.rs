//! Limit constants, the piecewise regime exponents `F` (for `P_n`) and `G`
//! (for `Q_n`), decay classes, the technical functions `h_P`, `h_Q`, and
//! numerical probes that check them against exact log-space counts.
//!
//! A query `(a, b, c, α)` refers to the cell
//! `(an - c n^α, bn - c n^α)`, rounded to the nearest integer; on the
//! anti-diagonal with `c = 0` or `α = 0` the column gets `+1`, see
//! [`RegimeResult::offset`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::exact::{LogCounts, MatrixPattern};
use crate::statlab::{fit_linear, fit_loglog_logs, SlopeFit};

/// Tolerance for the equalities `a + b = 1`, `α = 3/8`, etc.
pub const BRANCH_TOL: f64 = 1e-12;

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= BRANCH_TOL
}

fn check_open_unit(name: &str, a: f64) -> Result<()> {
    if a.is_finite() && a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} requires 0 < a < 1, got a = {a}")))
    }
}

fn check_finite(name: &str, c: f64) -> Result<()> {
    if c.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} requires finite c, got {c}")))
    }
}

fn check_positive_c(name: &str, c: f64) -> Result<()> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} requires c > 0, got c = {c}")))
    }
}

/// `ξ(a,c) = (2c+1)^2 / (4 √π (a(1-a))^{3/2})`.
pub fn xi(a: f64, c: f64) -> Result<f64> {
    check_open_unit("xi", a)?;
    check_finite("xi", c)?;
    Ok((2.0 * c + 1.0).powi(2) / (4.0 * PI.sqrt() * (a * (1.0 - a)).powf(1.5)))
}

/// `η(a,c) = c^2 / (√π (a(1-a))^{3/2})`.
pub fn eta(a: f64, c: f64) -> Result<f64> {
    check_open_unit("eta", a)?;
    check_finite("eta", c)?;
    Ok(c * c / (PI.sqrt() * (a * (1.0 - a)).powf(1.5)))
}

/// `κ(a,c) = exp(-c^2 / (a(1-a)))`.
pub fn kappa(a: f64, c: f64) -> Result<f64> {
    check_open_unit("kappa", a)?;
    check_finite("kappa", c)?;
    Ok((-c * c / (a * (1.0 - a))).exp())
}

/// Largest `c` accepted by [`u_exact`].
pub const U_MAX_C: u64 = 5000;

/// `u(c) = Σ_{s=0}^{c} ((s+1)/(2c+1-s))^2 binom(2c+1-s, c+1)^2 4^{s-2c-1}`,
/// summed as an exact rational.
pub fn u_exact(c: u64) -> Result<BigRational> {
    if c > U_MAX_C {
        return Err(Error::TooLarge {
            what: "u(c) argument c",
            requested: c as usize,
            bound: U_MAX_C as usize,
        });
    }
    let c = c as usize;
    let mut sum = BigRational::zero();
    for s in 0..=c {
        let top = 2 * c + 1 - s;
        let binom = binomial(top, c + 1);
        let num = BigInt::from(s + 1) * &binom;
        let den = BigInt::from(top);
        let term = BigRational::new(&num * &num, &den * &den)
            / BigRational::from_integer(BigInt::one() << (2 * (2 * c + 1 - s)));
        sum += term;
    }
    Ok(sum)
}

fn binomial(n: usize, k: usize) -> BigInt {
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `u(c)` as a double; `c` must be a nonnegative integer.
pub fn u(c: f64) -> Result<f64> {
    if !(c.is_finite() && c >= 0.0 && c.fract() == 0.0) {
        return Err(Error::domain(format!(
            "u(c) is a finite sum and requires integer c >= 0, got c = {c}"
        )));
    }
    u_exact(c as u64)?
        .to_f64()
        .ok_or_else(|| Error::consistency("u(c) not representable as f64"))
}

/// `v(a,b) = 1 / (2 √π (2-a-b)^{3/2} (a+b-1)^{3/2})`.
pub fn v(a: f64, b: f64) -> Result<f64> {
    let s = a + b;
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || !(s > 1.0 && s < 2.0) {
        return Err(Error::domain(format!(
            "v(a,b) requires a,b in [0,1] with 1 < a+b < 2, got a = {a}, b = {b}"
        )));
    }
    Ok(1.0 / (2.0 * PI.sqrt() * (2.0 - s).powf(1.5) * (s - 1.0).powf(1.5)))
}

/// `w(c) = 1 / (2^{5/2} c^{3/2} √π)`.
pub fn w(c: f64) -> Result<f64> {
    check_positive_c("w", c)?;
    Ok(1.0 / (2f64.powf(2.5) * c.powf(1.5) * PI.sqrt()))
}

/// Relative tolerance of the quadrature in [`x`].
pub const X_REL_TOL: f64 = 1e-8;

/// `x(a,c) = (4π a^{3/2}(1-a)^{3/2})^{-1} ∫_0^∞ s^2 (s+2c)^{-3/2} exp(-s^2/(4a(1-a))) ds`.
///
/// The range is cut where the Gaussian factor drops below `1e-16`, split
/// at `s = 2c`, and bisected until each panel meets its share of the
/// tolerance.
pub fn x(a: f64, c: f64) -> Result<f64> {
    check_open_unit("x", a)?;
    check_positive_c("x", c)?;
    let q = 4.0 * a * (1.0 - a);
    let f = move |s: f64| s * s / (s + 2.0 * c).powf(1.5) * (-s * s / q).exp();
    let s_max = (q * 1e16f64.ln()).sqrt();
    let mut breaks = vec![0.0];
    if 2.0 * c < s_max {
        breaks.push(2.0 * c);
    }
    breaks.push(s_max);
    let rough: f64 = breaks
        .windows(2)
        .map(|p| quadrature::double_exponential::integrate(f, p[0], p[1], 1e-6).integral)
        .sum();
    let target = X_REL_TOL * 0.1 * rough.abs().max(f64::MIN_POSITIVE);
    let integral: f64 = breaks
        .windows(2)
        .map(|p| adaptive(&f, p[0], p[1], target / 2.0, 0))
        .sum();
    Ok(integral / (PI * q.powf(1.5) / 2.0))
}

fn adaptive(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, depth: u32) -> f64 {
    let out = quadrature::double_exponential::integrate(f, lo, hi, tol);
    if out.error_estimate <= tol || depth >= 40 {
        return out.integral;
    }
    let mid = 0.5 * (lo + hi);
    adaptive(f, lo, mid, tol / 2.0, depth + 1) + adaptive(f, mid, hi, tol / 2.0, depth + 1)
}

/// `y(a,c) = 2c^2 / (√π a^{3/2} (1-a)^{3/2})`.
pub fn y(a: f64, c: f64) -> Result<f64> {
    check_open_unit("y", a)?;
    check_finite("y", c)?;
    Ok(2.0 * c * c / (PI.sqrt() * (a * (1.0 - a)).powf(1.5)))
}

/// `Γ(3/4) / (2^{3/2} π (a(1-a))^{3/4})`, the form in the limit theorem.
pub fn z_thm(a: f64) -> Result<f64> {
    check_open_unit("z", a)?;
    Ok(gamma(0.75) / (2f64.powf(1.5) * PI * (a * (1.0 - a)).powf(0.75)))
}

/// `Γ(3/4) / (2^{9/4} π (a(1-a))^{3/4})`, the form in the supporting lemma.
pub fn z_lem(a: f64) -> Result<f64> {
    check_open_unit("z", a)?;
    Ok(gamma(0.75) / (2f64.powf(2.25) * PI * (a * (1.0 - a)).powf(0.75)))
}

/// The `z(a)` used by [`regime_g`]: [`z_thm`], the form selected by
/// [`z_probe`].
pub fn z(a: f64) -> Result<f64> {
    z_thm(a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitKind {
    Xi,
    Eta,
    Kappa,
    U,
    V,
    W,
    X,
    Y,
    ZThm,
    ZLem,
}

impl LimitKind {
    pub const ALL: [LimitKind; 10] = [
        LimitKind::Xi,
        LimitKind::Eta,
        LimitKind::Kappa,
        LimitKind::U,
        LimitKind::V,
        LimitKind::W,
        LimitKind::X,
        LimitKind::Y,
        LimitKind::ZThm,
        LimitKind::ZLem,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LimitKind::Xi => "xi",
            LimitKind::Eta => "eta",
            LimitKind::Kappa => "kappa",
            LimitKind::U => "u",
            LimitKind::V => "v",
            LimitKind::W => "w",
            LimitKind::X => "x",
            LimitKind::Y => "y",
            LimitKind::ZThm => "z_thm",
            LimitKind::ZLem => "z_lem",
        }
    }
}

impl FromStr for LimitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "z" {
            return Ok(LimitKind::ZThm);
        }
        LimitKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown limit constant {s:?}")))
    }
}

/// Arguments for [`limit_constant`]; each kind reads the ones it needs
/// (`u`, `w`: `c`; `v`: `a, b`; `z`: `a`; the rest: `a, c`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LimitParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

pub fn limit_constant(kind: LimitKind, p: LimitParams) -> Result<f64> {
    match kind {
        LimitKind::Xi => xi(p.a, p.c),
        LimitKind::Eta => eta(p.a, p.c),
        LimitKind::Kappa => kappa(p.a, p.c),
        LimitKind::U => u(p.c),
        LimitKind::V => v(p.a, p.b),
        LimitKind::W => w(p.c),
        LimitKind::X => x(p.a, p.c),
        LimitKind::Y => y(p.a, p.c),
        LimitKind::ZThm => z_thm(p.a),
        LimitKind::ZLem => z_lem(p.a),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// Exponent `F` and constant `L` for `P_n`.
    F,
    /// Exponent `G` and constant `M` for `Q_n`.
    G,
}

impl Theorem {
    pub fn pattern(self) -> MatrixPattern {
        match self {
            Theorem::F => MatrixPattern::P123,
            Theorem::G => MatrixPattern::Q132,
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::F => "F",
            Theorem::G => "G",
        })
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "F" | "f" => Ok(Theorem::F),
            "G" | "g" => Ok(Theorem::G),
            other => Err(Error::domain(format!("theorem must be F or G, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeQuery {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub alpha: f64,
}

impl RegimeQuery {
    /// Checks `0 <= a,b <= 1`, `0 <= α < 1` and finite `c`.
    pub fn new(a: f64, b: f64, c: f64, alpha: f64) -> Result<Self> {
        let q = RegimeQuery { a, b, c, alpha };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        for (name, val) in [("a", self.a), ("b", self.b)] {
            if !(0.0..=1.0).contains(&val) {
                return Err(Error::domain(format!("{name} must lie in [0,1], got {val}")));
            }
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::domain(format!(
                "alpha must lie in [0,1), got {}",
                self.alpha
            )));
        }
        check_finite("regime query", self.c)
    }
}

impl fmt::Display for RegimeQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(a={}, b={}, c={}, alpha={})", self.a, self.b, self.c, self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// Polynomial (or no) decay.
    None,
    /// Below `ε^n` for some `ε < 1`.
    ExpN,
    /// Below `ε^{n^p}` with the stored `p = 2α - 1`.
    ExpNPow(f64),
}

impl fmt::Display for Decay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decay::None => f.write_str("none"),
            Decay::ExpN => f.write_str("exp_n"),
            Decay::ExpNPow(p) => write!(f, "exp_n_pow({p})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeResult {
    /// `F` or `G`; `f64::INFINITY` for super-polynomial decay.
    pub exponent: f64,
    /// `L` or `M`. `None` when the exponent is infinite, or on the corners
    /// `a ∈ {0,1}` of the anti-diagonal where the constants blow up.
    pub limit_constant: Option<f64>,
    pub decay: Decay,
    /// The evaluated cell is `(j, k+1)` rather than `(j, k)`.
    pub offset: bool,
    /// Human-readable description of the matched branch.
    pub branch: &'static str,
}

impl RegimeResult {
    fn infinite(decay: Decay, branch: &'static str) -> Self {
        RegimeResult {
            exponent: f64::INFINITY,
            limit_constant: None,
            decay,
            offset: false,
            branch,
        }
    }

    fn finite(exponent: f64, limit: Result<f64>, offset: bool, branch: &'static str) -> Result<Self> {
        let limit_constant = match limit {
            Ok(v) => Some(v),
            // Constants are undefined only at a ∈ {0,1}; anything else is a real error.
            Err(Error::Domain(msg)) if msg.contains("0 < a < 1") => None,
            Err(e) => return Err(e),
        };
        Ok(RegimeResult {
            exponent,
            limit_constant,
            decay: Decay::None,
            offset,
            branch,
        })
    }
}

/// Exponent `F` and constant `L` for `P_n`.
///
/// | condition                         | F          | L      | decay            |
/// |-----------------------------------|------------|--------|------------------|
/// | a+b ≠ 1                           | ∞          |        | exp_n            |
/// | a+b = 1, c = 0                    | 3/2        | ξ(a,0) | (offset cell)    |
/// | a+b = 1, c ≠ 0, α > 1/2           | ∞          |        | exp_n_pow(2α-1)  |
/// | a+b = 1, c ≠ 0, α = 0             | 3/2        | ξ(a,c) | (offset cell)    |
/// | a+b = 1, c ≠ 0, 0 < α < 1/2       | 3/2 - 2α   | η(a,c) |                  |
/// | a+b = 1, c ≠ 0, α = 1/2           | 1/2        | η·κ    |                  |
pub fn regime_f(q: &RegimeQuery) -> Result<RegimeResult> {
    q.validate()?;
    let RegimeQuery { a, b, c, alpha } = *q;
    if !close(a + b, 1.0) {
        return Ok(RegimeResult::infinite(Decay::ExpN, "a+b != 1"));
    }
    if c == 0.0 {
        return RegimeResult::finite(1.5, xi(a, 0.0), true, "a+b = 1, c = 0");
    }
    if close(alpha, 0.0) {
        return RegimeResult::finite(1.5, xi(a, c), true, "a+b = 1, c != 0, alpha = 0");
    }
    if close(alpha, 0.5) {
        let l = eta(a, c).and_then(|e| Ok(e * kappa(a, c)?));
        return RegimeResult::finite(0.5, l, false, "a+b = 1, c != 0, alpha = 1/2");
    }
    if alpha < 0.5 {
        return RegimeResult::finite(
            1.5 - 2.0 * alpha,
            eta(a, c),
            false,
            "a+b = 1, c != 0, 0 < alpha < 1/2",
        );
    }
    if alpha > 0.5 {
        return Ok(RegimeResult::infinite(
            Decay::ExpNPow(2.0 * alpha - 1.0),
            "a+b = 1, c != 0, alpha > 1/2",
        ));
    }
    Err(Error::Classification(format!("no branch of F matches {q}")))
}

/// Exponent `G` and constant `M` for `Q_n`.
///
/// | condition                          | G        | M         | decay           |
/// |------------------------------------|----------|-----------|-----------------|
/// | a+b < 1                            | ∞        |           | exp_n           |
/// | 1 < a+b < 2                        | 3/2      | v(a,b)    |                 |
/// | a = b = 1, c < 0                   | error: cell beyond `n`                 |
/// | a = b = 1, α = 0 or c = 0          | 0        | u(c)      |                 |
/// | a = b = 1, 0 < α, c > 0            | 3α/2     | w(c)      |                 |
/// | a+b = 1, c = 0                     | 3/4      | z(a)      | (offset cell)   |
/// | a+b = 1, c > 0, α < 3/8            | 3/4      | z(a)      | (offset if α=0) |
/// | a+b = 1, c > 0, α = 3/8            | 3/4      | z + y     |                 |
/// | a+b = 1, c > 0, 3/8 < α < 1/2      | 3/2 - 2α | y(a,c)    |                 |
/// | a+b = 1, c > 0, α = 1/2            | 1/2      | y·κ       |                 |
/// | a+b = 1, c > 0, α > 1/2            | ∞        |           | exp_n_pow(2α-1) |
/// | a+b = 1, c < 0, α < 1/2            | 3/4      | z(a)      | (offset if α=0) |
/// | a+b = 1, c < 0, α = 1/2            | 3/4      | x(a,\|c\|) |                |
/// | a+b = 1, c < 0, α > 1/2            | 3α/2     | w(\|c\|)  |                 |
///
/// `x` and `w` are stated for positive `c`; the `c < 0` rows evaluate them
/// at `|c|`.
pub fn regime_g(q: &RegimeQuery) -> Result<RegimeResult> {
    q.validate()?;
    let RegimeQuery { a, b, c, alpha } = *q;
    let s = a + b;
    if close(a, 1.0) && close(b, 1.0) {
        if c < 0.0 {
            return Err(Error::domain(format!(
                "a = b = 1 with c < 0 puts the cell beyond n: {q}"
            )));
        }
        if c == 0.0 || close(alpha, 0.0) {
            return RegimeResult::finite(0.0, u(c), false, "a = b = 1, alpha = 0 or c = 0");
        }
        return RegimeResult::finite(1.5 * alpha, w(c), false, "a = b = 1, 0 < alpha < 1, c > 0");
    }
    if s < 1.0 - BRANCH_TOL {
        return Ok(RegimeResult::infinite(Decay::ExpN, "a+b < 1"));
    }
    if s > 1.0 + BRANCH_TOL {
        return RegimeResult::finite(1.5, v(a, b), false, "1 < a+b < 2");
    }
    let at_zero = close(alpha, 0.0);
    if c == 0.0 {
        return RegimeResult::finite(0.75, z(a), true, "a+b = 1, c = 0");
    }
    if c > 0.0 {
        if close(alpha, 0.375) {
            let m = z(a).and_then(|zv| Ok(zv + y(a, c)?));
            return RegimeResult::finite(0.75, m, false, "a+b = 1, c > 0, alpha = 3/8");
        }
        if close(alpha, 0.5) {
            let m = y(a, c).and_then(|yv| Ok(yv * kappa(a, c)?));
            return RegimeResult::finite(0.5, m, false, "a+b = 1, c > 0, alpha = 1/2");
        }
        if alpha < 0.375 {
            return RegimeResult::finite(0.75, z(a), at_zero, "a+b = 1, c > 0, alpha < 3/8");
        }
        if alpha < 0.5 {
            return RegimeResult::finite(
                1.5 - 2.0 * alpha,
                y(a, c),
                false,
                "a+b = 1, c > 0, 3/8 < alpha < 1/2",
            );
        }
        return Ok(RegimeResult::infinite(
            Decay::ExpNPow(2.0 * alpha - 1.0),
            "a+b = 1, c > 0, alpha > 1/2",
        ));
    }
    if c < 0.0 {
        if close(alpha, 0.5) {
            return RegimeResult::finite(0.75, x(a, -c), false, "a+b = 1, c < 0, alpha = 1/2");
        }
        if alpha < 0.5 {
            return RegimeResult::finite(0.75, z(a), at_zero, "a+b = 1, c < 0, alpha < 1/2");
        }
        return RegimeResult::finite(1.5 * alpha, w(-c), false, "a+b = 1, c < 0, alpha > 1/2");
    }
    Err(Error::Classification(format!("no branch of G matches {q}")))
}

pub fn regime(theorem: Theorem, q: &RegimeQuery) -> Result<RegimeResult> {
    match theorem {
        Theorem::F => regime_f(q),
        Theorem::G => regime_g(q),
    }
}

/// The 1-based cell `(round(an - c n^α), round(bn - c n^α) + offset)`.
pub fn evaluated_cell(q: &RegimeQuery, n: usize, offset: bool) -> Result<(usize, usize)> {
    q.validate()?;
    let nf = n as f64;
    let shift = q.c * nf.powf(q.alpha);
    let j = (q.a * nf - shift).round();
    let k = (q.b * nf - shift).round() + if offset { 1.0 } else { 0.0 };
    let inside = |v: f64| v >= 1.0 && v <= nf;
    if !inside(j) || !inside(k) {
        return Err(Error::domain(format!(
            "query {q} at n = {n} gives cell ({j}, {k}) outside [1,{n}]^2"
        )));
    }
    Ok((j as usize, k as usize))
}

/// `ln(count/C_n)` at the query's cell, using the matched branch's offset.
pub fn log_ratio_at(theorem: Theorem, q: &RegimeQuery, n: usize) -> Result<f64> {
    let offset = regime(theorem, q)?.offset;
    let (j, k) = evaluated_cell(q, n, offset)?;
    Ok(LogCounts::new(theorem.pattern(), n).ln_ratio(j, k))
}

/// Least-squares fit of `ln(count/C_n)` against `ln n`. The fitted slope
/// estimates `-F` (or `-G`).
pub fn regime_slope(theorem: Theorem, q: &RegimeQuery, ns: &[usize]) -> Result<SlopeFit> {
    let logs = ns
        .iter()
        .map(|&n| log_ratio_at(theorem, q, n))
        .collect::<Result<Vec<_>>>()?;
    fit_loglog_logs(ns, &logs)
}

/// Least-squares fit of `ln(count/C_n)` against `n`; a negative slope
/// means decay like `ε^n`.
pub fn decay_slope(theorem: Theorem, q: &RegimeQuery, ns: &[usize]) -> Result<SlopeFit> {
    let logs = ns
        .iter()
        .map(|&n| log_ratio_at(theorem, q, n))
        .collect::<Result<Vec<_>>>()?;
    fit_linear(ns, &logs)
}

/// `n^{3/2} P_n(n/2, n/2+1) / C_n`, the ξ(1/2, 0) probe.
pub fn xi_probe(n: usize) -> f64 {
    let logs = LogCounts::new(MatrixPattern::P123, n);
    (1.5 * (n as f64).ln() + logs.ln_ratio(n / 2, n / 2 + 1)).exp()
}

/// Which printed form of `z(a)` the numerics support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZChoice {
    Thm,
    Lem,
    Neither,
    Both,
}

impl fmt::Display for ZChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZChoice::Thm => "z_thm",
            ZChoice::Lem => "z_lem",
            ZChoice::Neither => "neither",
            ZChoice::Both => "both",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZProbe {
    /// `(n, n^{3/4} Q_n(n/2, n/2) / C_n)`.
    pub values: Vec<(usize, f64)>,
    /// Richardson step on the last two sizes, assuming an `n^{-1/2}`
    /// correction: `(√r v(n₂) - v(n₁)) / (√r - 1)` with `r = n₂/n₁`.
    pub extrapolated: f64,
    pub z_thm: f64,
    pub z_lem: f64,
    pub tolerance: f64,
    pub selected: ZChoice,
}

impl ZProbe {
    pub fn rel_err(&self, value: f64, choice: ZChoice) -> f64 {
        let target = match choice {
            ZChoice::Lem => self.z_lem,
            _ => self.z_thm,
        };
        (value - target).abs() / target
    }
}

/// Evaluates `n^{3/4} Q_n(n/2, n/2)/C_n` on `ns` (at least two sizes,
/// increasing) and picks the `z(1/2)` form within `tolerance` of the
/// extrapolated limit.
pub fn z_probe(ns: &[usize], tolerance: f64) -> Result<ZProbe> {
    if ns.len() < 2 || ns.windows(2).any(|w| w[0] >= w[1]) || ns[0] < 2 {
        return Err(Error::domain("z probe needs at least two increasing sizes >= 2"));
    }
    let values: Vec<(usize, f64)> = ns
        .iter()
        .map(|&n| {
            let logs = LogCounts::new(MatrixPattern::Q132, n);
            (n, (0.75 * (n as f64).ln() + logs.ln_ratio(n / 2, n / 2)).exp())
        })
        .collect();
    let (n1, v1) = values[values.len() - 2];
    let (n2, v2) = values[values.len() - 1];
    let root = (n2 as f64 / n1 as f64).sqrt();
    let extrapolated = (root * v2 - v1) / (root - 1.0);
    let (zt, zl) = (z_thm(0.5)?, z_lem(0.5)?);
    let thm_ok = (extrapolated - zt).abs() / zt < tolerance;
    let lem_ok = (extrapolated - zl).abs() / zl < tolerance;
    let selected = match (thm_ok, lem_ok) {
        (true, false) => ZChoice::Thm,
        (false, true) => ZChoice::Lem,
        (true, true) => ZChoice::Both,
        (false, false) => ZChoice::Neither,
    };
    Ok(ZProbe {
        values,
        extrapolated,
        z_thm: zt,
        z_lem: zl,
        tolerance,
        selected,
    })
}

fn xlx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `ln h_P(a,b)` where
/// `h_P = (1-a+b)^{1-a+b} (1-b+a)^{1-b+a} / (a^a (1-a)^{1-a} b^b (1-b)^{1-b})`.
pub fn ln_h_p(a: f64, b: f64) -> f64 {
    xlx(1.0 - a + b) + xlx(1.0 - b + a) - xlx(a) - xlx(1.0 - a) - xlx(b) - xlx(1.0 - b)
}

/// `h_P(a,b) <= 4`, with equality exactly on `b = 1 - a`. `0^0 = 1`.
pub fn h_p(a: f64, b: f64) -> f64 {
    ln_h_p(a, b).exp()
}

/// `ln h_Q(a,s,t)` where, with `p = 1-at+a-ast`, `q = 1-a+at-ast`,
/// `h_Q = 4^{ast} p^p q^q / ((1-at)^{1-at} (a-ast)^{a-ast} (1-a)^{1-a} (at-ast)^{at-ast})`.
pub fn ln_h_q(a: f64, s: f64, t: f64) -> f64 {
    let ast = a * s * t;
    let at = a * t;
    ast * 4f64.ln() + xlx(1.0 - at + a - ast) + xlx(1.0 - a + at - ast)
        - xlx(1.0 - at)
        - xlx(a - ast)
        - xlx(1.0 - a)
        - xlx(at - ast)
}

/// `h_Q(a,s,t) <= 4`, with equality at `s = (at+a-1)/(at)` when
/// `at + a > 1`. `0^0 = 1`.
pub fn h_q(a: f64, s: f64, t: f64) -> f64 {
    ln_h_q(a, s, t).exp()
}
