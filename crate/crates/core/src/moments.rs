//! Exact first and second moments of the cyclic-descent count under
//! C_{k,n}, their transfer to d, the Bernoulli-number form of the mean,
//! and the large-n expansions at k = αn.
//!
//! With x = 1/α, E = e^x and M = e^x − 1 the expansions are
//!
//! * E_C(c) ≈ n·m(α) + s(α), m = α − 1/M, s = E(E + 1 − 2αM) / (2α²M³)
//! * Var_C(c) ≈ n·v(α),      v = E(α²M² − E) / (α²M⁴)
//!
//! valid for α > 1/(2π), where the Bernoulli generating function converges.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{
    binomial, factorial, falling_factorial, fmt_g17, pow_u64, power_sum, rat, rat_from_uints,
    rat_int, render, to_f64, Rational,
};
use crate::hp::{self, Hp, DEFAULT_BITS};
use crate::measures::check_k;

/// Bernoulli numbers B_0..=B_m with B_1 = −1/2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BernoulliCache {
    values: Vec<Rational>,
}

impl BernoulliCache {
    pub fn get(&self, t: usize) -> &Rational {
        &self.values[t]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }
}

/// B_0..=B_m from Σ_{j=0}^{m} C(m+1, j)·B_j = 0 (m ≥ 1).
pub fn bernoulli_numbers(m: usize) -> BernoulliCache {
    let mut values: Vec<Rational> = Vec::with_capacity(m + 1);
    values.push(Rational::one());
    for idx in 1..=m {
        if idx >= 3 && idx % 2 == 1 {
            values.push(Rational::zero());
            continue;
        }
        let s: Rational = values
            .iter()
            .enumerate()
            .map(|(j, b)| b * rat_int(BigInt::from(binomial(idx as u128 + 1, j as u64))))
            .sum();
        values.push(-s / rat_int(BigInt::from(idx as u64 + 1)));
    }
    BernoulliCache { values }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::CyclicUndefined(n))
    } else {
        Ok(())
    }
}

/// E_C(c) = k − n/k^{n−1}·Σ_{j=1}^{k−1} j^{n−1}.
pub fn mean_c_exact(k: u64, n: usize) -> Result<Rational> {
    check_k(k)?;
    check_n(n)?;
    let s = power_sum(k - 1, n as u32 - 1) * BigUint::from(n);
    Ok(rat_int(k) - rat_from_uints(&s, &pow_u64(k, n as u64 - 1)))
}

/// E_C(c²) = k² − n(n+1)/k^{n−1}·Σ j^n + n(nk−n−k)/k^{n−1}·Σ j^{n−1}.
pub fn second_moment_c_exact(k: u64, n: usize) -> Result<Rational> {
    check_k(k)?;
    check_n(n)?;
    let den = rat_int(BigInt::from(pow_u64(k, n as u64 - 1)));
    let nn = BigInt::from(n as u64);
    let kk = BigInt::from(k);
    let s_n = rat_int(BigInt::from(power_sum(k - 1, n as u32)));
    let s_n1 = rat_int(BigInt::from(power_sum(k - 1, n as u32 - 1)));
    let c1 = rat_int(&nn * (&nn + 1));
    let c2 = rat_int(&nn * (&nn * &kk - &nn - &kk));
    Ok(rat_int(&kk * &kk) - c1 * s_n / &den + c2 * s_n1 / &den)
}

pub fn variance_c_exact(k: u64, n: usize) -> Result<Rational> {
    let mu = mean_c_exact(k, n)?;
    Ok(second_moment_c_exact(k, n)? - &mu * &mu)
}

/// E_C(d) = (n−1)/n·E_C(c).
pub fn mean_d_c(k: u64, n: usize) -> Result<Rational> {
    Ok(mean_c_exact(k, n)? * rat(n as i64 - 1, n as i64))
}

/// E_C(d²) = (1 − 2/n)·E_C(c²) + E_C(c)/n.
pub fn second_moment_d_c(k: u64, n: usize) -> Result<Rational> {
    let n_i = n as i64;
    Ok(second_moment_c_exact(k, n)? * rat(n_i - 2, n_i) + mean_c_exact(k, n)? * rat(1, n_i))
}

/// Terms B_t·(n)_t / (t!·k^t) for t = 0..=n−1, the finite Bernoulli
/// expansion of the partial power sums behind E_C(c).
#[derive(Clone, Debug)]
pub struct AsymptoticSeries {
    pub k: u64,
    pub n: usize,
    /// k/n as a float.
    pub alpha: f64,
    pub terms: Vec<Rational>,
}

impl AsymptoticSeries {
    pub fn new(k: u64, n: usize, bernoulli: &BernoulliCache) -> Result<Self> {
        check_k(k)?;
        check_n(n)?;
        if bernoulli.max_index() + 1 < n {
            return Err(Error::out_of_range(
                "bernoulli cache",
                bernoulli.max_index(),
                format!(">= {}", n - 1),
            ));
        }
        let mut terms = Vec::with_capacity(n);
        let mut fall = BigUint::one();
        let mut fact = BigUint::one();
        let mut kpow = BigUint::one();
        for t in 0..n {
            if t > 0 {
                fall *= BigUint::from((n - t + 1) as u64);
                fact *= BigUint::from(t as u64);
                kpow *= BigUint::from(k);
            }
            let scale = rat_from_uints(&fall, &(&fact * &kpow));
            terms.push(bernoulli.get(t) * scale);
        }
        Ok(AsymptoticSeries {
            k,
            n,
            alpha: k as f64 / n as f64,
            terms,
        })
    }

    /// Σ_{t=1}^{n−1} of the terms.
    pub fn sum_from_one(&self) -> Rational {
        self.terms.iter().skip(1).sum()
    }
}

/// E_C(c) = −k·Σ_{t=1}^{n−1} B_t (n)_t / (t! k^t).
pub fn mean_c_bernoulli(k: u64, n: usize) -> Result<Rational> {
    let cache = bernoulli_numbers(n.max(2));
    mean_c_bernoulli_with(k, n, &cache)
}

pub fn mean_c_bernoulli_with(k: u64, n: usize, cache: &BernoulliCache) -> Result<Rational> {
    let series = AsymptoticSeries::new(k, n, cache)?;
    Ok(-(rat_int(k) * series.sum_from_one()))
}

/// Lower edge of the convergence region, 1/(2π).
pub fn alpha_threshold() -> f64 {
    1.0 / (2.0 * std::f64::consts::PI)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > alpha_threshold() {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

struct ExpParts {
    alpha: Hp,
    e: Hp,
    m: Hp,
}

fn exp_parts(alpha: &Hp) -> ExpParts {
    let one = hp::from_int(1, alpha.precision());
    let x = &one / alpha;
    ExpParts {
        alpha: alpha.clone(),
        e: x.exp(),
        m: x.exp_m1(),
    }
}

/// The four series Σ B_t/(t!α^t), Σ B_t·C(t,2)/(t!α^t), Σ B_{t+1}/(t!α^t) and
/// Σ B_{t+1}·C(t,2)/(t!α^t) in closed form, at high precision.
pub fn bernoulli_closed_forms_hp(alpha: &Hp) -> [Hp; 4] {
    let ExpParts { alpha: a, e, m } = exp_parts(alpha);
    let bits = a.precision();
    let one = hp::from_int(1, bits);
    let two = hp::from_int(2, bits);
    let three = hp::from_int(3, bits);
    let four = hp::from_int(4, bits);
    let a3 = &a * &a * &a;
    let m2 = &m * &m;
    let m3 = &m2 * &m;
    let m4 = &m2 * &m2;

    let p1 = &one / (&a * &m);
    let p2 = &e * (&e + &one - &two * &a * &m) / (&two * &a3 * &m3);
    let p3 = (&a * &m - &e) / (&a * &m2);
    let e2 = &e * &e;
    let p4 = &e * (&three * &a * &m * (&e + &one) - &e2 - &four * &e - &one) / (&two * &a3 * &m4);
    [p1, p2, p3, p4]
}

pub fn bernoulli_closed_forms(alpha: f64) -> Result<[f64; 4]> {
    check_alpha(alpha)?;
    let forms = bernoulli_closed_forms_hp(&hp::from_f64(alpha, DEFAULT_BITS));
    Ok(forms.map(|v| hp::to_f64(&v)))
}

/// The same four series truncated after `terms` terms, exactly, with α the
/// exact value of the given float.
pub fn bernoulli_series(alpha: f64, terms: usize) -> Result<[Rational; 4]> {
    check_alpha(alpha)?;
    let a = Rational::from_float(alpha).expect("finite alpha");
    let cache = bernoulli_numbers(terms + 1);
    let mut sums: [Rational; 4] = Default::default();
    let mut scale = Rational::one(); // 1/(t!·α^t)
    for t in 0..terms {
        if t > 0 {
            scale /= &a * rat_int(t as u64);
        }
        let pairs = rat_int(BigInt::from(binomial(t as u128, 2)));
        let bt = cache.get(t) * &scale;
        let bt1 = cache.get(t + 1) * &scale;
        sums[0] += &bt;
        sums[1] += &bt * &pairs;
        sums[2] += &bt1;
        sums[3] += &bt1 * &pairs;
    }
    Ok(sums)
}

/// Upper bound on Σ_{t≥n} |B_t|·t^l / (α^t·t!) for n ≥ 1.
///
/// Uses |B_{2u}| ≤ 8√(πu)(u/(πe))^{2u} with Stirling's lower bound on
/// (2u)!, which together give |B_s|/s! ≤ 4·e^{−1/(12s+1)}·(2π)^{−s} for even
/// s ≥ 2; odd s ≥ 3 contribute nothing. The geometric remainder is closed
/// off once consecutive bound terms shrink by a fixed ratio q < 1.
pub fn bernoulli_tail_bound(alpha: f64, n: u64, l: u32) -> Result<f64> {
    check_alpha(alpha)?;
    if n == 0 {
        return Err(Error::out_of_range("n", 0, ">= 1"));
    }
    let rho = alpha_threshold() / alpha;
    let ln_rho = rho.ln();
    let mut sum = 0.0;
    if n <= 1 {
        sum += 0.5 / alpha;
    }
    let mut t = n.max(2);
    if t % 2 == 1 {
        t += 1;
    }
    loop {
        let tf = t as f64;
        let term = (4f64.ln() - 1.0 / (12.0 * tf + 1.0) + l as f64 * tf.ln() + tf * ln_rho).exp();
        sum += term;
        let q = ((tf + 2.0) / tf).powi(l as i32) * rho * rho;
        if q < 1.0 && term <= 1e-20 * sum {
            // later bound terms (without the Stirling correction) shrink by ≤ q per step
            let head = (4f64.ln() + l as f64 * tf.ln() + tf * ln_rho).exp();
            sum += head * q / (1.0 - q);
            return Ok(sum);
        }
        if term == 0.0 && q < 1.0 {
            return Ok(sum);
        }
        t += 2;
    }
}

/// Exact partial tail Σ_{t=n}^{n+len−1} |B_t|·t^l / (α^t·t!) as a float.
pub fn bernoulli_tail_exact(alpha: f64, n: usize, l: u32, len: usize) -> Result<f64> {
    check_alpha(alpha)?;
    let a = Rational::from_float(alpha).expect("finite alpha");
    let cache = bernoulli_numbers(n + len);
    let mut total = Rational::zero();
    for t in n..n + len {
        let b = cache.get(t);
        if b.is_zero() {
            continue;
        }
        let b = if *b < Rational::zero() { -b.clone() } else { b.clone() };
        let num = b * rat_int(num_traits::pow::pow(BigInt::from(t as u64), l as usize));
        let den = rat_int(BigInt::from(factorial(t as u64))) * num_traits::pow::pow(a.clone(), t);
        total += num / den;
    }
    Ok(to_f64(&total))
}

/// (m(α), s(α)) at high precision.
pub fn asymptotic_mean_c_hp(alpha: &Hp) -> (Hp, Hp) {
    let ExpParts { alpha: a, e, m } = exp_parts(alpha);
    let bits = a.precision();
    let one = hp::from_int(1, bits);
    let two = hp::from_int(2, bits);
    let lin = &a - &one / &m;
    let m3 = &m * &m * &m;
    let cst = &e * (&e + &one - &two * &a * &m) / (&two * &a * &a * &m3);
    (lin, cst)
}

/// v(α) at high precision.
pub fn asymptotic_variance_c_hp(alpha: &Hp) -> Hp {
    let ExpParts { alpha: a, e, m } = exp_parts(alpha);
    let a2 = &a * &a;
    let m2 = &m * &m;
    &e * (&a2 * &m2 - &e) / (&a2 * &m2 * &m2)
}

/// Linear coefficient m(α) and constant s(α) of E_C(c) at k = αn.
pub fn asymptotic_mean_c(alpha: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    let (lin, cst) = asymptotic_mean_c_hp(&hp::from_f64(alpha, DEFAULT_BITS));
    Ok((hp::to_f64(&lin), hp::to_f64(&cst)))
}

/// Linear coefficient v(α) of Var_C(c) at k = αn.
pub fn asymptotic_variance_c(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(hp::to_f64(&asymptotic_variance_c_hp(&hp::from_f64(alpha, DEFAULT_BITS))))
}

/// |(1 − (n)_t/n^t) − C(t,2)/n| and its bound C(t,2)²/(2n²), exactly.
pub fn falling_ratio_gap(n: u64, t: u64) -> (Rational, Rational) {
    let ratio = rat_from_uints(&falling_factorial(n, t), &pow_u64(n, t));
    let pairs = rat_int(BigInt::from(binomial(t as u128, 2)));
    let nn = rat_int(n);
    let gap = Rational::one() - ratio - &pairs / &nn;
    let gap = if gap < Rational::zero() { -gap } else { gap };
    let bound = &pairs * &pairs / (rat_int(2u64) * &nn * &nn);
    (gap, bound)
}

/// |E_C(c)/n − k/n| with its two bounds k(1−1/k)^n and k/n.
pub fn mean_gap(k: u64, n: usize) -> Result<(Rational, Rational, Rational)> {
    let mean = mean_c_exact(k, n)?;
    let lam = rat(k as i64, n as i64);
    let diff = mean / rat_int(n as u64) - &lam;
    let gap = if diff < Rational::zero() { -diff } else { diff };
    let geometric = rat_int(k)
        * rat_from_uints(&pow_u64(k - 1, n as u64), &pow_u64(k, n as u64));
    Ok((gap, geometric, lam))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum MomentStatistic {
    /// c under C_{k,n}
    CUnderC,
    /// d under C_{k,n}
    DUnderC,
    /// d under R_{k,n}
    DUnderR,
}

impl MomentStatistic {
    pub fn label(&self) -> &'static str {
        match self {
            MomentStatistic::CUnderC => "c|C",
            MomentStatistic::DUnderC => "d|C",
            MomentStatistic::DUnderR => "d|R",
        }
    }
}

/// Exact mean and variance of one statistic, with the k = αn expansion when
/// α lies in the convergence region.
#[derive(Clone, Debug)]
pub struct MomentReport {
    pub k: u64,
    pub n: usize,
    pub statistic: MomentStatistic,
    pub mean_exact: Rational,
    pub second_exact: Rational,
    pub variance_exact: Rational,
    pub alpha: f64,
    pub mean_asym: Option<f64>,
    pub variance_asym: Option<f64>,
    pub error_mean: Option<f64>,
    pub error_variance: Option<f64>,
}

struct Asym {
    mean: Hp,
    var: Hp,
}

fn asym_for(k: u64, n: usize) -> Option<Asym> {
    let alpha_r = rat(k as i64, n as i64);
    if to_f64(&alpha_r) <= alpha_threshold() {
        return None;
    }
    let alpha = hp::from_rational(&alpha_r, DEFAULT_BITS);
    let (lin, cst) = asymptotic_mean_c_hp(&alpha);
    let v = asymptotic_variance_c_hp(&alpha);
    let nn = hp::from_int(n as i64, DEFAULT_BITS);
    Some(Asym {
        mean: &nn * &lin + &cst,
        var: &nn * &v,
    })
}

impl MomentReport {
    fn build(
        k: u64,
        n: usize,
        statistic: MomentStatistic,
        mean: Rational,
        second: Rational,
        alpha: f64,
        asym: Option<(Hp, Hp)>,
    ) -> Self {
        let variance = &second - &mean * &mean;
        let (mean_asym, variance_asym, error_mean, error_variance) = match asym {
            Some((am, av)) => {
                let em = hp::from_rational(&mean, DEFAULT_BITS) - &am;
                let ev = hp::from_rational(&variance, DEFAULT_BITS) - &av;
                (
                    Some(hp::to_f64(&am)),
                    Some(hp::to_f64(&av)),
                    Some(hp::to_f64(&em)),
                    Some(hp::to_f64(&ev)),
                )
            }
            None => (None, None, None, None),
        };
        MomentReport {
            k,
            n,
            statistic,
            mean_exact: mean,
            second_exact: second,
            variance_exact: variance,
            alpha,
            mean_asym,
            variance_asym,
            error_mean,
            error_variance,
        }
    }

    pub fn to_json(&self, with_asymptotics: bool) -> Value {
        let mut v = json!({
            "k": self.k,
            "n": self.n,
            "statistic": self.statistic.label(),
            "mean_exact": render(&self.mean_exact),
            "second_exact": render(&self.second_exact),
            "variance_exact": render(&self.variance_exact),
            "mean_float": fmt_g17(to_f64(&self.mean_exact)),
            "variance_float": fmt_g17(to_f64(&self.variance_exact)),
        });
        if with_asymptotics {
            let f = |x: Option<f64>| x.map(fmt_g17);
            let obj = v.as_object_mut().expect("object");
            obj.insert("alpha".into(), json!(fmt_g17(self.alpha)));
            obj.insert("mean_asym".into(), json!(f(self.mean_asym)));
            obj.insert("variance_asym".into(), json!(f(self.variance_asym)));
            obj.insert("error_mean".into(), json!(f(self.error_mean)));
            obj.insert("error_variance".into(), json!(f(self.error_variance)));
        }
        v
    }

    pub fn csv_header(with_asymptotics: bool) -> &'static str {
        if with_asymptotics {
            "k,n,statistic,mean_exact,second_exact,variance_exact,mean_float,variance_float,alpha,mean_asym,variance_asym,error_mean,error_variance"
        } else {
            "k,n,statistic,mean_exact,second_exact,variance_exact,mean_float,variance_float"
        }
    }

    pub fn csv_row(&self, with_asymptotics: bool) -> String {
        let mut row = format!(
            "{},{},{},{},{},{},{},{}",
            self.k,
            self.n,
            self.statistic.label(),
            render(&self.mean_exact),
            render(&self.second_exact),
            render(&self.variance_exact),
            fmt_g17(to_f64(&self.mean_exact)),
            fmt_g17(to_f64(&self.variance_exact)),
        );
        if with_asymptotics {
            let f = |x: Option<f64>| x.map(fmt_g17).unwrap_or_default();
            row.push_str(&format!(
                ",{},{},{},{},{}",
                fmt_g17(self.alpha),
                f(self.mean_asym),
                f(self.variance_asym),
                f(self.error_mean),
                f(self.error_variance)
            ));
        }
        row
    }
}

/// c under C_{k,n}, expansion at α = k/n.
pub fn moments_c(k: u64, n: usize) -> Result<MomentReport> {
    let mean = mean_c_exact(k, n)?;
    let second = second_moment_c_exact(k, n)?;
    let asym = asym_for(k, n).map(|a| (a.mean, a.var));
    Ok(MomentReport::build(
        k,
        n,
        MomentStatistic::CUnderC,
        mean,
        second,
        k as f64 / n as f64,
        asym,
    ))
}

/// d under C_{k,n} through the linear identities linking d to c; the
/// expansion substitutes the c-expansion into the same relations.
pub fn moments_d_c(k: u64, n: usize) -> Result<MomentReport> {
    let mean = mean_d_c(k, n)?;
    let second = second_moment_d_c(k, n)?;
    let asym = asym_for(k, n).map(|a| {
        let bits = DEFAULT_BITS;
        let nn = hp::from_int(n as i64, bits);
        let one = hp::from_int(1, bits);
        let two = hp::from_int(2, bits);
        let mean_d = &a.mean * (&nn - &one) / &nn;
        let var_d = (&one - &two / &nn) * &a.var - &a.mean * &a.mean / (&nn * &nn) + &a.mean / &nn;
        (mean_d, var_d)
    });
    Ok(MomentReport::build(
        k,
        n,
        MomentStatistic::DUnderC,
        mean,
        second,
        k as f64 / n as f64,
        asym,
    ))
}

/// d under R_{k,n}, read off c − 1 under C_{k,n+1}.
pub fn moments_d_r(k: u64, n: usize) -> Result<MomentReport> {
    check_k(k)?;
    if n == 0 {
        return Err(Error::out_of_range("n", 0, ">= 1"));
    }
    let mean_c = mean_c_exact(k, n + 1)?;
    let second_c = second_moment_c_exact(k, n + 1)?;
    let one = Rational::one();
    let mean = &mean_c - &one;
    // E(c−1)² = E c² − 2 E c + 1
    let second = &second_c - rat_int(2u64) * &mean_c + &one;
    let asym = asym_for(k, n + 1).map(|a| {
        let one = hp::from_int(1, DEFAULT_BITS);
        (&a.mean - &one, a.var)
    });
    Ok(MomentReport::build(
        k,
        n,
        MomentStatistic::DUnderR,
        mean,
        second,
        k as f64 / (n + 1) as f64,
        asym,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(12);
        assert_eq!(*b.get(0), rat(1, 1));
        assert_eq!(*b.get(1), rat(-1, 2));
        assert_eq!(*b.get(2), rat(1, 6));
        assert_eq!(*b.get(4), rat(-1, 30));
        assert_eq!(*b.get(7), rat(0, 1));
        assert_eq!(*b.get(12), rat(-691, 2730));
    }

    #[test]
    fn bernoulli_recurrence_holds() {
        let b = bernoulli_numbers(40);
        for m in 1..=40usize {
            let s: Rational = (0..=m)
                .map(|j| b.get(j) * rat_int(BigInt::from(binomial(m as u128 + 1, j as u64))))
                .sum();
            assert!(s.is_zero(), "m = {m}");
        }
    }

    #[test]
    fn exact_means() {
        assert_eq!(mean_c_exact(2, 3).unwrap(), rat(5, 4));
        assert_eq!(mean_c_exact(1, 5).unwrap(), rat(1, 1));
        assert_eq!(mean_c_exact(2, 2).unwrap(), rat(1, 1));
        assert_eq!(second_moment_c_exact(2, 3).unwrap(), rat(7, 4));
        assert_eq!(second_moment_c_exact(1, 4).unwrap(), rat(1, 1));
        assert_eq!(second_moment_c_exact(2, 2).unwrap(), rat(1, 1));
        assert!(mean_c_exact(3, 1).is_err());
    }

    #[test]
    fn d_moments_from_c_small() {
        assert_eq!(mean_d_c(2, 3).unwrap(), rat(5, 6));
        // enumeration: 0·1/4 + 1·2/3 + 4·1/12 = 1
        assert_eq!(second_moment_d_c(2, 3).unwrap(), rat(1, 1));
        // k = 1: c ≡ 1 but d = 0 only on the n rotations with π(n) > π(1)
        assert_eq!(mean_d_c(1, 5).unwrap(), rat(4, 5));
    }

    #[test]
    fn bernoulli_mean_route() {
        assert_eq!(mean_c_bernoulli(2, 3).unwrap(), rat(5, 4));
        assert_eq!(mean_c_bernoulli(3, 4).unwrap(), mean_c_exact(3, 4).unwrap());
        assert_eq!(mean_c_bernoulli(1, 2).unwrap(), rat(1, 1));
    }

    #[test]
    fn series_terms_vanish_at_odd_index() {
        let cache = bernoulli_numbers(30);
        let s = AsymptoticSeries::new(7, 25, &cache).unwrap();
        assert_eq!(s.terms.len(), 25);
        for t in (3..25).step_by(2) {
            assert!(s.terms[t].is_zero());
        }
    }

    #[test]
    fn closed_forms_at_one() {
        let [p1, p2, p3, p4] = bernoulli_closed_forms(1.0).unwrap();
        let e = std::f64::consts::E;
        assert!((p1 - 1.0 / (e - 1.0)).abs() < 1e-15);
        assert!((p1 - 0.5819767068693265).abs() < 1e-15);
        assert!((p3 + 1.0 / ((e - 1.0) * (e - 1.0))).abs() < 1e-15);
        assert!(p2 > 0.0 && p4 < 0.0);
        assert!(bernoulli_closed_forms(0.15).is_err());
    }

    #[test]
    fn closed_forms_match_truncated_series() {
        for &alpha in &[0.25, 0.5, 1.0, 2.0, 7.5] {
            let closed = bernoulli_closed_forms(alpha).unwrap();
            let series = bernoulli_series(alpha, 200).unwrap();
            // l = 0 for parts 1 and 3, l = 2 for the C(t,2) parts
            let tails = [
                bernoulli_tail_bound(alpha, 200, 0).unwrap(),
                bernoulli_tail_bound(alpha, 200, 2).unwrap(),
                bernoulli_tail_bound(alpha, 201, 0).unwrap() * 201.0 / alpha,
                bernoulli_tail_bound(alpha, 201, 2).unwrap() * 201.0 / alpha,
            ];
            for i in 0..4 {
                let diff = (closed[i] - to_f64(&series[i])).abs();
                let scale = closed[i].abs().max(1.0);
                assert!(
                    diff <= tails[i] + 4.0 * f64::EPSILON * scale,
                    "alpha {alpha} part {}: diff {diff:e}, tail {:e}",
                    i + 1,
                    tails[i]
                );
            }
        }
    }

    #[test]
    fn part_two_vanishes_for_large_alpha() {
        let [_, p2, _, _] = bernoulli_closed_forms(1e6).unwrap();
        assert!(p2.abs() < 1e-12);
    }

    #[test]
    fn asymptotic_limits() {
        let (m1, _) = asymptotic_mean_c(1.0).unwrap();
        assert!((m1 - 0.4180232931306736).abs() < 1e-15);
        let (m_big, _) = asymptotic_mean_c(1e6).unwrap();
        assert!((m_big - 0.5).abs() < 1e-6);
        let v_big = asymptotic_variance_c(1e6).unwrap();
        assert!((v_big - 1.0 / 12.0).abs() < 1e-6);
        assert!(asymptotic_variance_c(0.1).is_err());
    }

    #[test]
    fn tail_bound_dominates_exact_tail() {
        for &alpha in &[0.25, 0.5, 1.0, 2.0] {
            for l in [0u32, 2, 4] {
                let mut prev = f64::INFINITY;
                for n in 10..=60u64 {
                    let bound = bernoulli_tail_bound(alpha, n, l).unwrap();
                    assert!(bound.is_finite() && bound > 0.0);
                    assert!(bound <= prev, "alpha {alpha} l {l} n {n}");
                    prev = bound;
                    if n % 10 == 0 {
                        let exact = bernoulli_tail_exact(alpha, n as usize, l, 240).unwrap();
                        assert!(exact <= bound, "alpha {alpha} l {l} n {n}");
                    }
                }
            }
        }
    }

    #[test]
    fn falling_ratio_estimate() {
        for n in 0..=60u64 {
            for t in 0..=n {
                let (gap, bound) = falling_ratio_gap(n.max(1), t.min(n.max(1)));
                assert!(gap <= bound);
            }
        }
    }

    #[test]
    fn mean_gap_bounds() {
        for n in 2..15 {
            for k in 1..15 {
                let (gap, geo, lam) = mean_gap(k, n).unwrap();
                assert!(gap <= geo && gap <= lam, "k={k} n={n}");
            }
        }
    }

    #[test]
    fn reports() {
        let r = moments_d_r(2, 2).unwrap();
        assert_eq!(r.mean_exact, rat(1, 4));
        assert_eq!(r.variance_exact, rat(3, 16));
        let r = moments_d_r(1, 6).unwrap();
        assert_eq!(r.mean_exact, rat(0, 1));
        assert_eq!(r.variance_exact, rat(0, 1));
        let limit = moments_d_r(1 << 20, 5).unwrap();
        assert!((to_f64(&limit.mean_exact) - 2.0).abs() < 1e-4);

        let c = moments_c(10, 10).unwrap();
        assert!(c.mean_asym.is_some());
        assert!(c.error_mean.unwrap().abs() < 0.05);
        let small = moments_c(1, 10).unwrap();
        assert!(small.mean_asym.is_none());
        let d = moments_d_c(2, 3).unwrap();
        assert_eq!(d.mean_exact, rat(5, 6));
        assert_eq!(d.second_exact, rat(1, 1));
        assert!(c.to_json(true).get("error_mean").is_some());
        assert_eq!(
            c.csv_row(false).split(',').count(),
            MomentReport::csv_header(false).split(',').count()
        );
    }
}
