//! Poisson approximation: the Stein equation, exact total variation against
//! Poisson(λ), and the certified upper bounds for the three statistics
//! k − d and k − c under C_{k,n} and k − 1 − d under R_{k,n}.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::exact::{fmt_g17, pow_u64, rat, rat_from_uints, rat_int, render, to_f64, Rational};
use crate::hp::{self, Hp};
use crate::measures::{c_pmf_c_from_row, check_k, d_from_cyclic, d_pmf_r_from_row};
use crate::permcore::eulerian_row;
use crate::pmf::ExactPmf;

/// Mass below which the solver and the TV tail stop extending the support.
pub const NEGLIGIBLE_MASS: f64 = 1e-16;

const TV_BITS: usize = 256;

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::BadLambda(lambda))
    }
}

/// e^{−λ}λ^j/j!, evaluated in log space.
pub fn poisson_pmf(lambda: f64, j: u64) -> f64 {
    if j == 0 {
        return (-lambda).exp();
    }
    (-lambda + j as f64 * lambda.ln() - ln_factorial(j)).exp()
}

/// P(X ≥ j) for X ~ Poisson(λ).
///
/// Summed upward from j (no 1 − CDF cancellation). Once the ratio of
/// successive terms drops below 1/2, summation stops as soon as the geometric
/// remainder bound falls under 1e−15 of the running sum, and that bound is
/// added back in.
pub fn poisson_tail(lambda: f64, j: u64) -> f64 {
    if j == 0 {
        return 1.0;
    }
    let mut i = j;
    let mut term = poisson_pmf(lambda, i);
    let mut sum = 0.0;
    let mut comp = 0.0;
    loop {
        // Kahan step
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        let q = lambda / (i + 1) as f64;
        let next = term * q;
        if q < 0.5 && (next / (1.0 - q) <= 1e-15 * sum || next == 0.0) {
            return sum + next / (1.0 - q);
        }
        term = next;
        i += 1;
    }
}

/// Smallest j ≥ max(A) + 1 beyond the mode where p_λ(j) < 1e−16.
pub fn default_j_max(lambda: f64, target: &BTreeSet<u64>) -> u64 {
    let floor = target.iter().next_back().map_or(1, |&a| a + 1).max(lambda.ceil() as u64 + 1);
    let mut j = floor;
    while poisson_pmf(lambda, j) >= NEGLIGIBLE_MASS {
        j += 1;
    }
    j
}

/// Solution g_{λ,A} of λg(j+1) − j·g(j) = 1{j∈A} − P_λ(A), g(0) = 0, on 0..=j_max.
#[derive(Clone, Debug)]
pub struct SteinSolution {
    pub lambda: f64,
    pub target_set: BTreeSet<u64>,
    pub g: Vec<f64>,
    /// sup_j |g(j)|
    pub sup_g: f64,
    /// sup_j |g(j+1) − g(j)|
    pub sup_delta: f64,
    /// max over 0 ≤ j < j_max of |λg(j+1) − j·g(j) − 1{j∈A} + P_λ(A)| in f64
    pub max_residual: f64,
    pub p_lambda_a: f64,
}

impl SteinSolution {
    pub fn j_max(&self) -> usize {
        self.g.len() - 1
    }
}

/// Forward recurrence g(j+1) = (1{j∈A} − P_λ(A) + j·g(j))/λ.
///
/// The recurrence amplifies rounding by about 1/p_λ(j), so it is run in
/// binary floating point carrying 30 decimal digits more than
/// −log₁₀ p_λ(j_max) and only then rounded.
pub fn solve_stein(lambda: f64, target: &BTreeSet<u64>, j_max: u64) -> Result<SteinSolution> {
    check_lambda(lambda)?;
    if j_max == 0 {
        return Err(Error::out_of_range("j_max", 0, ">= 1"));
    }
    let log10_p = ((-lambda + j_max as f64 * lambda.ln() - ln_factorial(j_max)) / std::f64::consts::LN_10)
        .min(0.0);
    let bits = hp::bits_for_digits(30 + (-log10_p).ceil() as usize).max(hp::DEFAULT_BITS);

    let lam = hp::from_f64(lambda, bits);
    let zero = hp::from_int(0, bits);
    let one = hp::from_int(1, bits);

    // P_λ(A), summing masses forward
    let top = target.iter().next_back().copied().unwrap_or(0);
    let mut p = (-&lam).exp();
    let mut p_a = zero.clone();
    for j in 0..=top {
        if target.contains(&j) {
            p_a += &p;
        }
        p = p * &lam / hp::from_int(j as i64 + 1, bits);
    }

    let mut g_hp: Vec<Hp> = Vec::with_capacity(j_max as usize + 1);
    g_hp.push(zero.clone());
    for j in 0..j_max {
        let h = if target.contains(&j) { &one - &p_a } else { -&p_a };
        let jj = hp::from_int(j as i64, bits);
        let next = (h + &jj * &g_hp[j as usize]) / &lam;
        g_hp.push(next);
    }

    let g: Vec<f64> = g_hp.iter().map(hp::to_f64).collect();
    let p_lambda_a = hp::to_f64(&p_a);
    let sup_g = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let sup_delta = g.windows(2).fold(0.0f64, |m, w| m.max((w[1] - w[0]).abs()));
    let max_residual = (0..j_max as usize).fold(0.0f64, |m, j| {
        let h = if target.contains(&(j as u64)) { 1.0 - p_lambda_a } else { -p_lambda_a };
        m.max((lambda * g[j + 1] - j as f64 * g[j] - h).abs())
    });
    Ok(SteinSolution {
        lambda,
        target_set: target.clone(),
        g,
        sup_g,
        sup_delta,
        max_residual,
        p_lambda_a,
    })
}

/// [`solve_stein`] with [`default_j_max`].
pub fn solve_stein_default(lambda: f64, target: &BTreeSet<u64>) -> Result<SteinSolution> {
    check_lambda(lambda)?;
    solve_stein(lambda, target, default_j_max(lambda, target))
}

/// Total variation distance with the width of its enclosing interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TvValue {
    pub value: f64,
    pub width: f64,
}

/// sup_A |P(A) − P_λ(A)| = ½Σ_j |p(j) − p_λ(j)| for rational λ.
///
/// The sum over the pmf support is done at 256 bits; the Poisson tail beyond
/// the support is summed until the geometric remainder is below 2^−200 and
/// that remainder goes into the width.
pub fn tv_vs_poisson_exact_lambda(pmf: &ExactPmf, lambda: &Rational) -> Result<TvValue> {
    if *lambda <= Rational::zero() {
        return Err(Error::BadLambda(to_f64(lambda)));
    }
    let bits = TV_BITS;
    let lam = hp::from_rational(lambda, bits);
    let half = hp::from_rational(&rat(1, 2), bits);
    let top = pmf.support().last().copied().unwrap_or(0);

    let mut p = (-&lam).exp();
    let zero = hp::from_int(0, bits);
    let mut acc = zero.clone();
    for j in 0..=top {
        let diff = hp::from_rational(&pmf.prob(j), bits) - &p;
        if diff < zero {
            acc -= diff;
        } else {
            acc += diff;
        }
        p = p * &lam / hp::from_int(j as i64 + 1, bits);
    }
    // p is now p_λ(top + 1)
    let cutoff = hp::from_rational(&rat(1, 1), bits) / hp::from_int(2, bits).powi(200.into());
    let lam_f = to_f64(lambda);
    let mut j = top + 1;
    let mut tail = hp::from_int(0, bits);
    let remainder = loop {
        tail += &p;
        let next = &p * &lam / hp::from_int(j as i64 + 1, bits);
        let ratio = lam_f / (j + 2) as f64;
        if ratio < 0.5 && next < cutoff {
            // Σ_{i>j} p_λ(i) ≤ p_λ(j+1)/(1 − λ/(j+2))
            break hp::to_f64(&next) / (1.0 - ratio);
        }
        p = next;
        j += 1;
    };
    acc += tail;
    let value = hp::to_f64(&(acc * half));
    Ok(TvValue {
        value,
        width: remainder / 2.0 + 2.0 * f64::EPSILON * value.max(f64::MIN_POSITIVE),
    })
}

pub fn tv_exact_vs_poisson(pmf: &ExactPmf, lambda: f64) -> Result<TvValue> {
    check_lambda(lambda)?;
    let lam = Rational::from_float(lambda).expect("finite lambda");
    tv_vs_poisson_exact_lambda(pmf, &lam)
}

fn decay(k: u64, m: u64) -> Rational {
    rat_from_uints(&pow_u64(k - 1, m), &pow_u64(k, m))
}

fn check_kn(k: u64, n: usize) -> Result<()> {
    check_k(k)?;
    if n == 0 {
        return Err(Error::out_of_range("n", 0, ">= 1"));
    }
    Ok(())
}

/// (k/n)² + k(n+1)(1 − 1/k)^n, exactly.
pub fn bound_c_kd_exact(k: u64, n: usize) -> Result<Rational> {
    check_kn(k, n)?;
    let lam = rat(k as i64, n as i64);
    Ok(&lam * &lam + rat_int(k) * rat_int(n as u64 + 1) * decay(k, n as u64))
}

/// (k/n)² + 2k/n + k(n+1)(1 − 1/k)^n, exactly.
pub fn bound_c_kc_exact(k: u64, n: usize) -> Result<Rational> {
    check_kn(k, n)?;
    let lam = rat(k as i64, n as i64);
    Ok(bound_c_kd_exact(k, n)? + rat_int(2u64) * lam)
}

/// (k/(n+1))² + 2k/(n+1) + k(n+2)(1 − 1/k)^{n+1}, exactly.
pub fn bound_r_exact(k: u64, n: usize) -> Result<Rational> {
    check_kn(k, n)?;
    let lam = rat(k as i64, n as i64 + 1);
    Ok(&lam * &lam
        + rat_int(2u64) * &lam
        + rat_int(k) * rat_int(n as u64 + 2) * decay(k, n as u64 + 1))
}

pub fn bound_c_kd(k: u64, n: usize) -> Result<f64> {
    bound_c_kd_exact(k, n).map(|b| to_f64(&b))
}

pub fn bound_c_kc(k: u64, n: usize) -> Result<f64> {
    bound_c_kc_exact(k, n).map(|b| to_f64(&b))
}

pub fn bound_r(k: u64, n: usize) -> Result<f64> {
    bound_r_exact(k, n).map(|b| to_f64(&b))
}

/// The statistic compared with Poisson(λ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TvStatistic {
    /// k − d under C_{k,n}, λ = k/n
    KMinusDUnderC,
    /// k − c under C_{k,n}, λ = k/n
    KMinusCUnderC,
    /// k − 1 − d under R_{k,n}, λ = k/(n+1)
    KMinus1MinusDUnderR,
}

impl TvStatistic {
    pub const ALL: [TvStatistic; 3] = [
        TvStatistic::KMinusDUnderC,
        TvStatistic::KMinusCUnderC,
        TvStatistic::KMinus1MinusDUnderR,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TvStatistic::KMinusDUnderC => "C-kd",
            TvStatistic::KMinusCUnderC => "C-kc",
            TvStatistic::KMinus1MinusDUnderR => "R",
        }
    }

    pub fn lambda(&self, k: u64, n: usize) -> Rational {
        match self {
            TvStatistic::KMinus1MinusDUnderR => rat(k as i64, n as i64 + 1),
            _ => rat(k as i64, n as i64),
        }
    }

    pub fn bound_exact(&self, k: u64, n: usize) -> Result<Rational> {
        match self {
            TvStatistic::KMinusDUnderC => bound_c_kd_exact(k, n),
            TvStatistic::KMinusCUnderC => bound_c_kc_exact(k, n),
            TvStatistic::KMinus1MinusDUnderR => bound_r_exact(k, n),
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        match self {
            TvStatistic::KMinus1MinusDUnderR if n == 0 => Err(Error::out_of_range("n", 0, ">= 1")),
            TvStatistic::KMinus1MinusDUnderR => Ok(()),
            _ if n < 2 => Err(Error::CyclicUndefined(n)),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for TvStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TvStatistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "C-kd" | "c-kd" => Ok(TvStatistic::KMinusDUnderC),
            "C-kc" | "c-kc" => Ok(TvStatistic::KMinusCUnderC),
            "R" | "r" => Ok(TvStatistic::KMinus1MinusDUnderR),
            other => Err(Error::Parse(format!(
                "unknown statistic {other:?} (expected R, C-kd or C-kc)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TvReport {
    pub k: u64,
    pub n: usize,
    pub statistic: TvStatistic,
    pub lambda: f64,
    pub tv_exact: f64,
    pub tv_width: f64,
    pub bound: f64,
    pub bound_exact: Rational,
    pub slack: f64,
}

impl TvReport {
    pub const CSV_HEADER: &'static str = "k,n,statistic,lambda,tv_exact,bound,slack";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.k,
            self.n,
            self.statistic,
            fmt_g17(self.lambda),
            fmt_g17(self.tv_exact),
            fmt_g17(self.bound),
            fmt_g17(self.slack)
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "n": self.n,
            "statistic": self.statistic.name(),
            "lambda": fmt_g17(self.lambda),
            "tv_exact": fmt_g17(self.tv_exact),
            "tv_width": fmt_g17(self.tv_width),
            "bound": fmt_g17(self.bound),
            "bound_exact": render(&self.bound_exact),
            "slack": fmt_g17(self.slack),
        })
    }
}

/// Law of the statistic, built from Eulerian row n (R) or row n−1 (C).
fn statistic_pmf(k: u64, n: usize, statistic: TvStatistic, row: &[BigUint]) -> ExactPmf {
    match statistic {
        TvStatistic::KMinusDUnderC => d_from_cyclic(&c_pmf_c_from_row(k, row), n).pushforward(|d| k - d),
        TvStatistic::KMinusCUnderC => c_pmf_c_from_row(k, row).pushforward(|c| k - c),
        TvStatistic::KMinus1MinusDUnderR => d_pmf_r_from_row(k, row).pushforward(|d| k - 1 - d),
    }
}

fn row_index(n: usize, statistic: TvStatistic) -> usize {
    match statistic {
        TvStatistic::KMinus1MinusDUnderR => n,
        _ => n - 1,
    }
}

/// Pushforward law of the statistic under its measure.
pub fn tv_statistic_pmf(k: u64, n: usize, statistic: TvStatistic) -> Result<ExactPmf> {
    check_k(k)?;
    statistic.check(n)?;
    Ok(statistic_pmf(k, n, statistic, &eulerian_row(row_index(n, statistic))))
}

fn report_from_row(k: u64, n: usize, statistic: TvStatistic, row: &[BigUint]) -> Result<TvReport> {
    let pmf = statistic_pmf(k, n, statistic, row);
    let lam = statistic.lambda(k, n);
    let tv = tv_vs_poisson_exact_lambda(&pmf, &lam)?;
    let bound_exact = statistic.bound_exact(k, n)?;
    let bound = to_f64(&bound_exact);
    Ok(TvReport {
        k,
        n,
        statistic,
        lambda: to_f64(&lam),
        tv_exact: tv.value,
        tv_width: tv.width,
        bound,
        bound_exact,
        slack: bound - tv.value,
    })
}

pub fn tv_report(k: u64, n: usize, statistic: TvStatistic) -> Result<TvReport> {
    check_k(k)?;
    statistic.check(n)?;
    report_from_row(k, n, statistic, &eulerian_row(row_index(n, statistic)))
}

/// `points` values of k spread evenly over 1..=⌊n/4⌋ (all of them if fewer).
pub fn grid_ks(n: usize, points: usize) -> Vec<u64> {
    let top = (n / 4).max(1) as u64;
    if points == 0 {
        return Vec::new();
    }
    if top as usize <= points || points == 1 {
        return if points == 1 { vec![1] } else { (1..=top).collect() };
    }
    let mut ks: Vec<u64> = (0..points)
        .map(|i| 1 + ((top - 1) as f64 * i as f64 / (points - 1) as f64).round() as u64)
        .collect();
    ks.dedup();
    ks
}

/// Reports for every (k, n, statistic) in the grid, ordered by n, then k,
/// then statistic. Eulerian rows are built once per n.
pub fn tv_grid(ns: &[usize], points: usize, statistics: &[TvStatistic]) -> Result<Vec<TvReport>> {
    let mut out = Vec::new();
    for &n in ns {
        for s in statistics {
            s.check(n)?;
        }
        let row_n = eulerian_row(n);
        let row_prev = if n >= 1 { eulerian_row(n - 1) } else { Vec::new() };
        let ks = grid_ks(n, points);
        let jobs: Vec<(u64, TvStatistic)> = ks
            .iter()
            .flat_map(|&k| statistics.iter().map(move |&s| (k, s)))
            .collect();
        let reports = jobs
            .par_iter()
            .map(|&(k, s)| {
                let row = if row_index(n, s) == n { &row_n } else { &row_prev };
                report_from_row(k, n, s, row)
            })
            .collect::<Result<Vec<_>>>()?;
        out.extend(reports);
    }
    Ok(out)
}

/// Grid used for certification: n ∈ {20, 50, 100, 200, 400}, 20 values of k.
pub const CERTIFICATION_NS: [usize; 5] = [20, 50, 100, 200, 400];
pub const CERTIFICATION_POINTS: usize = 20;

/// λ²/2 floor on bound_R(1, n) − TV at k = 1, where the law is δ₀.
pub fn degenerate_floor(n: usize) -> f64 {
    let lam = 1.0 / (n as f64 + 1.0);
    lam * lam / 2.0
}

/// The k = 1 R-statistic gap to its floor; positive when the floor holds.
pub fn degenerate_margin(n: usize) -> Result<f64> {
    let r = tv_report(1, n, TvStatistic::KMinus1MinusDUnderR)?;
    Ok(r.slack - degenerate_floor(n))
}

/// Σ_{j} P_λ(j) over the first `terms` values, compensated; for normalization checks.
pub fn poisson_mass(lambda: f64, terms: u64) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for j in 0..terms {
        let y = poisson_pmf(lambda, j) - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

impl TvValue {
    pub fn lower(&self) -> f64 {
        self.value - self.width
    }

    pub fn upper(&self) -> f64 {
        self.value + self.width
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn set(v: &[u64]) -> BTreeSet<u64> {
        v.iter().copied().collect()
    }

    #[test]
    fn pmf_and_tail() {
        assert_eq!(poisson_pmf(2.5, 0), (-2.5f64).exp());
        assert!((poisson_pmf(1.0, 1) - 0.36787944117144233).abs() < 1e-16);
        assert!((poisson_mass(3.0, 60) - 1.0).abs() < 1e-15);
        assert_eq!(poisson_tail(0.7, 0), 1.0);
        let direct: f64 = 1.0 - (0..4).map(|j| poisson_pmf(2.0, j)).sum::<f64>();
        assert!((poisson_tail(2.0, 4) - direct).abs() < 1e-15);
        assert!(poisson_tail(0.1, 30) < 1e-50);
    }

    #[test]
    fn stein_empty_set() {
        let s = solve_stein(1.3, &BTreeSet::new(), 20).unwrap();
        assert!(s.g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn stein_first_step() {
        let s = solve_stein(1.0, &set(&[0]), 30).unwrap();
        assert_eq!(s.g[0], 0.0);
        assert!((s.g[1] - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!(s.sup_g <= 1.0 && s.sup_delta <= 1.0);
        assert!(s.max_residual < 1e-12);
    }

    #[test]
    fn stein_absorbing_set() {
        let all: BTreeSet<u64> = (0..=40).collect();
        let s = solve_stein(0.8, &all, 40).unwrap();
        assert!(s.max_residual < 1e-12);
        assert!(s.sup_g <= 1.0);
    }

    #[test]
    fn stein_small_lambda_large_j() {
        let s = solve_stein_default(0.05, &set(&[0, 3, 17, 50])).unwrap();
        assert!(s.j_max() > 50);
        assert!(s.sup_g <= 1.0 && s.sup_delta <= 1.0 && s.max_residual < 1e-12);
        assert!(solve_stein(0.0, &set(&[1]), 5).is_err());
        assert!(solve_stein(-1.0, &set(&[1]), 5).is_err());
    }

    #[test]
    fn tv_examples() {
        let lam = 0.3;
        let tv = tv_exact_vs_poisson(&ExactPmf::point_mass(0), lam).unwrap();
        assert!((tv.value - (1.0 - (-lam).exp())).abs() < 1e-15);
        assert!(tv.width < 1e-14);

        let r = tv_report(1, 9, TvStatistic::KMinus1MinusDUnderR).unwrap();
        assert!((r.tv_exact - (1.0 - (-0.1f64).exp())).abs() < 1e-15);
        assert!((r.bound - 0.21).abs() < 1e-15);
        assert!(r.slack > 0.0);
    }

    #[test]
    fn tv_of_truncated_poisson() {
        // Poisson(1/2) on 0..40, mass at 0 absorbing the truncation and rounding
        let lam = rat(1, 2);
        let mut pairs = Vec::new();
        let mut p = Rational::one();
        let mut fact = Rational::one();
        let e = Rational::from_float((-0.5f64).exp()).unwrap();
        let mut rest = Rational::zero();
        for j in 1..=40u64 {
            p *= &lam;
            fact *= rat_int(j);
            let m = &e * &p / &fact;
            rest += &m;
            pairs.push((j, m));
        }
        pairs.push((0, Rational::one() - rest));
        let pmf = ExactPmf::from_pairs(pairs).unwrap();
        let tv = tv_vs_poisson_exact_lambda(&pmf, &lam).unwrap();
        assert!(tv.value < 1e-14);
    }

    #[test]
    fn bound_examples() {
        assert_eq!(bound_c_kd_exact(1, 7).unwrap(), rat(1, 49));
        assert_eq!(bound_r_exact(1, 9).unwrap(), rat(21, 100));
        let b = bound_c_kd(5, 200).unwrap();
        assert!((b - 6.25e-4).abs() < 1e-15);
        assert!(bound_c_kc(5, 200).unwrap() > b);
    }

    #[test]
    fn statistic_names_roundtrip() {
        for s in TvStatistic::ALL {
            assert_eq!(s.name().parse::<TvStatistic>().unwrap(), s);
        }
        assert!("X".parse::<TvStatistic>().is_err());
        assert!(tv_report(2, 1, TvStatistic::KMinusDUnderC).is_err());
    }

    #[test]
    fn grid_points() {
        assert_eq!(grid_ks(20, 20), vec![1, 2, 3, 4, 5]);
        let ks = grid_ks(400, 20);
        assert_eq!(ks.len(), 20);
        assert_eq!((ks[0], ks[19]), (1, 100));
    }

    #[test]
    fn k1_degenerate_laws() {
        // d under R_{1,n} is 0, so k−1−d is δ₀
        let p = tv_statistic_pmf(1, 6, TvStatistic::KMinus1MinusDUnderR).unwrap();
        assert_eq!(p, ExactPmf::point_mass(0));
        // c ≡ 1 under C_{1,n} but d is 0 on the n rotations of the identity
        let p = tv_statistic_pmf(1, 4, TvStatistic::KMinusDUnderC).unwrap();
        assert_eq!(p.prob(1), rat(1, 4));
        assert_eq!(p.prob(0), rat(3, 4));
        assert!(degenerate_margin(9).unwrap() > 0.0);
    }
}
