//! Self-check suites: every exact identity and inequality the engine relies
//! on, checked against enumeration where that is feasible.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{binomial, pow_u64, rat, rat_from_uints, render, Rational};
use crate::hp::{self, DEFAULT_BITS};
use crate::measures::{c_pmf_c, d_pmf_c, d_pmf_r, transfer_l1};
use crate::moments::{
    asymptotic_mean_c_hp, asymptotic_variance_c, asymptotic_variance_c_hp, bernoulli_numbers,
    bernoulli_tail_bound, falling_ratio_gap, mean_c_bernoulli_with, mean_c_exact, mean_d_c, mean_gap,
    second_moment_c_exact, second_moment_d_c,
};
use crate::oracle::SnCensus;
use crate::pair::{
    conditional_drift_enumerated, conditional_drift_given_d, drift_expectation, is_symmetric,
    joint_matrix, newton_check, nogood_diagnostic, normalized_pair, rotation_conditional_law,
    central_eulerian_ratio, use1_identity, PairModel,
};
use crate::permcore::{cyclic_descent_counts, cyclic_gf_coefficients, eulerian_row, oracle_cap};
use crate::sampler::{case_total, exact_insertion_distribution};
use crate::stein::{solve_stein_default, tv_grid, TvStatistic, CERTIFICATION_NS, CERTIFICATION_POINTS};

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Largest n enumerated (≤ the oracle cap).
    pub oracle_max: usize,
    /// Largest k in the enumeration grids.
    pub k_max: u64,
    /// Grid bound for the Bernoulli-form mean and the mean-gap estimate.
    pub bernoulli_max: usize,
    pub newton_max: usize,
    pub stein_cases: usize,
    /// Values of n for the Poisson certification sweep.
    pub tv_ns: Vec<usize>,
    /// Corrupts one binomial coefficient on the R side of the transfer suite.
    pub inject_fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            oracle_max: 8,
            k_max: 12,
            bernoulli_max: 40,
            newton_max: 60,
            stein_cases: 1000,
            tv_ns: CERTIFICATION_NS.to_vec(),
            inject_fault: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub checks: u64,
    pub counterexample: Option<Value>,
    pub seconds: f64,
}

impl SuiteResult {
    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.name,
            "passed": self.passed,
            "checks": self.checks,
            "counterexample": self.counterexample,
            "seconds": self.seconds,
        })
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed(),
            "suites": self.suites.iter().map(SuiteResult::to_json).collect::<Vec<_>>(),
        })
    }

    pub const CSV_HEADER: &'static str = "suite,passed,checks,seconds,counterexample";

    pub fn csv_rows(&self) -> Vec<String> {
        self.suites
            .iter()
            .map(|s| {
                let ce = s
                    .counterexample
                    .as_ref()
                    .map(|v| format!("\"{}\"", v.to_string().replace('"', "\"\"")))
                    .unwrap_or_default();
                format!("{},{},{},{:.3},{}", s.name, s.passed, s.checks, s.seconds, ce)
            })
            .collect()
    }
}

/// Tally for one suite; stops at the first counterexample.
struct Tally {
    checks: u64,
    failure: Option<Value>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            checks: 0,
            failure: None,
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> Value) -> bool {
        self.checks += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(detail());
        }
        self.failure.is_none()
    }

}

fn run(name: &'static str, body: impl FnOnce(&mut Tally) -> Result<()>) -> SuiteResult {
    let start = Instant::now();
    let mut t = Tally::new();
    if let Err(e) = body(&mut t) {
        if t.failure.is_none() {
            t.failure = Some(json!({ "error": e.to_string() }));
        }
    }
    SuiteResult {
        name,
        passed: t.failure.is_none(),
        checks: t.checks,
        counterexample: t.failure,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn verify_suite(opts: &VerifyOptions) -> Result<VerifyReport> {
    let cap = oracle_cap();
    if opts.oracle_max < 2 || opts.oracle_max > cap {
        return Err(Error::out_of_range("oracle_max", opts.oracle_max, format!("2..={cap}")));
    }
    if opts.k_max == 0 {
        return Err(Error::out_of_range("k_max", 0, ">= 1"));
    }
    let censuses: Vec<SnCensus> = (1..=opts.oracle_max)
        .map(SnCensus::new)
        .collect::<Result<_>>()?;
    let census = |n: usize| &censuses[n - 1];
    let pmf_n = opts.oracle_max.min(8);

    let mut suites = vec![
        run("eulerian", |t| {
            for n in 1..=opts.oracle_max {
                let row = eulerian_row(n);
                let hist = census(n).descent_histogram();
                if !t.check(hist == row, || json!({ "n": n, "statistic": "d" })) {
                    return Ok(());
                }
                if n >= 2 {
                    let counts = cyclic_descent_counts(n)?;
                    let hist = census(n).cyclic_histogram();
                    if !t.check(hist == counts.counts(), || json!({ "n": n, "statistic": "c" })) {
                        return Ok(());
                    }
                }
            }
            Ok(())
        }),
        run("generating_function", |t| {
            for n in 2..=pmf_n {
                let gf = cyclic_gf_coefficients(n, 12)?;
                let series = census(n).cyclic_series(12);
                if let Some(i) = (0..=12).find(|&i| gf[i] != series[i]) {
                    t.check(false, || {
                        json!({ "n": n, "power": i, "series": series[i].to_string(), "formula": gf[i].to_string() })
                    });
                    return Ok(());
                }
                t.check(true, || Value::Null);
            }
            Ok(())
        }),
        run("pmf_oracle", |t| {
            for n in 1..=pmf_n {
                for k in 1..=opts.k_max {
                    let c = census(n);
                    let ok = d_pmf_r(k, n)? == c.d_pmf_r(k);
                    if !t.check(ok, || json!({ "k": k, "n": n, "law": "d under R" })) {
                        return Ok(());
                    }
                    if n >= 2 {
                        let ok = c_pmf_c(k, n)? == c.c_pmf_c(k);
                        if !t.check(ok, || json!({ "k": k, "n": n, "law": "c under C" })) {
                            return Ok(());
                        }
                        let ok = d_pmf_c(k, n)? == c.d_pmf_c(k);
                        if !t.check(ok, || json!({ "k": k, "n": n, "law": "d under C" })) {
                            return Ok(());
                        }
                    }
                }
            }
            Ok(())
        }),
        run("transfer", |t| transfer_suite(t, opts, &censuses)),
        run("moments", |t| {
            for n in 2..=pmf_n {
                let c = census(n);
                for k in 1..=opts.k_max {
                    let e_c = c.c_expectation(k, |_, c| c as i64);
                    let e_c2 = c.c_expectation(k, |_, c| (c * c) as i64);
                    let e_d = c.c_expectation(k, |d, _| d as i64);
                    let e_d2 = c.c_expectation(k, |d, _| (d * d) as i64);
                    let pairs = [
                        ("mean_c", mean_c_exact(k, n)?, e_c),
                        ("second_moment_c", second_moment_c_exact(k, n)?, e_c2),
                        ("mean_d", mean_d_c(k, n)?, e_d),
                        ("second_moment_d", second_moment_d_c(k, n)?, e_d2),
                    ];
                    for (what, formula, oracle) in pairs {
                        let ok = formula == oracle;
                        if !t.check(ok, || {
                            json!({ "k": k, "n": n, "quantity": what,
                                    "formula": render(&formula), "enumeration": render(&oracle) })
                        }) {
                            return Ok(());
                        }
                    }
                }
            }
            Ok(())
        }),
        run("bernoulli", |t| {
            let cache = bernoulli_numbers(opts.bernoulli_max.max(2));
            for n in 2..=opts.bernoulli_max {
                for k in 1..=opts.bernoulli_max as u64 {
                    let a = mean_c_bernoulli_with(k, n, &cache)?;
                    let b = mean_c_exact(k, n)?;
                    if !t.check(a == b, || json!({ "k": k, "n": n })) {
                        return Ok(());
                    }
                    let var = second_moment_c_exact(k, n)? - &b * &b;
                    if !t.check(var >= Rational::zero(), || json!({ "k": k, "n": n, "variance": render(&var) })) {
                        return Ok(());
                    }
                    let (gap, geo, lam) = mean_gap(k, n)?;
                    if !t.check(gap <= geo && gap <= lam, || json!({ "k": k, "n": n, "gap": render(&gap) })) {
                        return Ok(());
                    }
                }
            }
            Ok(())
        }),
        run("elementary_estimates", |t| {
            for n in 1..=200u64 {
                for s in 0..=n {
                    let (gap, bound) = falling_ratio_gap(n, s);
                    if !t.check(gap <= bound, || json!({ "n": n, "t": s })) {
                        return Ok(());
                    }
                }
            }
            for &alpha in &[0.25, 0.5, 1.0, 2.0] {
                for l in [0u32, 2, 4] {
                    let mut prev = f64::INFINITY;
                    for n in 10..=60u64 {
                        let b = bernoulli_tail_bound(alpha, n, l)?;
                        if !t.check(b.is_finite() && b <= prev, || json!({ "alpha": alpha, "l": l, "n": n })) {
                            return Ok(());
                        }
                        prev = b;
                    }
                }
            }
            Ok(())
        }),
        run("asymptotics", |t| {
            let alpha = hp::from_int(1, DEFAULT_BITS);
            let (m, s) = asymptotic_mean_c_hp(&alpha);
            let v = asymptotic_variance_c_hp(&alpha);
            let mut mean_err = Vec::new();
            let mut var_err = Vec::new();
            for &n in &[50usize, 100, 200, 400, 800] {
                let nn = hp::from_int(n as i64, DEFAULT_BITS);
                let mean = mean_c_exact(n as u64, n)?;
                let var = second_moment_c_exact(n as u64, n)? - &mean * &mean;
                let e = hp::from_rational(&mean, DEFAULT_BITS) - &nn * &m - &s;
                mean_err.push((n, hp::to_f64(&(&nn * e)).abs()));
                let e = hp::from_rational(&var, DEFAULT_BITS) - &nn * &v;
                var_err.push((n, hp::to_f64(&e).abs()));
            }
            let first = mean_err[0].1;
            let worst = mean_err.iter().fold(0.0f64, |a, &(_, e)| a.max(e));
            t.check(worst <= 2.0 * first, || json!({ "scaled_mean_errors": mean_err }));
            let last = var_err.last().expect("grid").1;
            t.check(last <= var_err[0].1 + 1.0, || json!({ "variance_errors": var_err }));
            let m1 = hp::to_f64(&m);
            t.check((m1 - 0.4180233).abs() < 1e-7, || json!({ "m(1)": m1 }));
            let v_big = asymptotic_variance_c(1e6)?;
            t.check((v_big - 1.0 / 12.0).abs() < 1e-6, || json!({ "v(1e6)": v_big }));
            Ok(())
        }),
        run("pair", |t| pair_suite(t, opts, &censuses)),
        run("newton", |t| {
            let rec = newton_check(opts.newton_max.max(3))?;
            t.checks += rec.checked as u64 - 1;
            t.check(rec.passes(), || json!({ "mismatches": rec.mismatches }));
            Ok(())
        }),
        run("nogood", |t| {
            let rows = nogood_diagnostic(4..=14)?;
            for r in &rows {
                let v = r.value_f64();
                if !t.check(v > 0.0 && r.dominates, || json!({ "n": r.n, "value": v, "lower_bound": r.lower_bound_f64() })) {
                    return Ok(());
                }
            }
            let vals: Vec<f64> = rows.iter().map(|r| r.value_f64()).collect();
            let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = vals.iter().cloned().fold(0.0, f64::max);
            t.check(min >= max / 2.0, || json!({ "min": min, "max": max }));
            let (exact, asym) = central_eulerian_ratio(60)?;
            t.check((exact / asym - 1.0).abs() <= 0.05, || json!({ "ratio": exact, "asymptotic": asym }));
            Ok(())
        }),
        run("stein", |t| {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5e1e);
            for _ in 0..opts.stein_cases {
                let lambda = rng.random_range(0.05..=5.0);
                let density: f64 = rng.random_range(0.0..=1.0);
                let target: BTreeSet<u64> = (0..=50u64).filter(|_| rng.random_bool(density)).collect();
                let s = solve_stein_default(lambda, &target)?;
                let ok = s.sup_g <= 1.0 && s.sup_delta <= 1.0 && s.max_residual < 1e-12;
                if !t.check(ok, || {
                    json!({ "lambda": lambda, "set": target, "sup_g": s.sup_g,
                            "sup_delta": s.sup_delta, "residual": s.max_residual })
                }) {
                    return Ok(());
                }
            }
            Ok(())
        }),
        run("poisson_certification", |t| {
            let reports = tv_grid(&opts.tv_ns, CERTIFICATION_POINTS, &TvStatistic::ALL)?;
            for r in &reports {
                let ok = r.tv_exact + r.tv_width <= r.bound && r.tv_width < 1e-13;
                if !t.check(ok, || {
                    json!({ "k": r.k, "n": r.n, "statistic": r.statistic.name(),
                            "tv_exact": r.tv_exact, "bound": r.bound })
                }) {
                    return Ok(());
                }
            }
            Ok(())
        }),
        run("sampler_exact", |t| {
            for n in 1..=opts.oracle_max.min(5) {
                let c = census(n);
                for k in 1..=4u64 {
                    let tree = exact_insertion_distribution(k, n)?;
                    for (p, want) in c.perms().iter().zip(c.r_probs(k)) {
                        let got = tree.get(p).cloned().unwrap_or_else(Rational::zero);
                        if !t.check(got == want, || json!({ "k": k, "n": n, "perm": p.to_string() })) {
                            return Ok(());
                        }
                    }
                }
            }
            for k in 1..=50u64 {
                for m in 1..=50usize {
                    for d in 0..m.min(k as usize) {
                        if !t.check(case_total(k, m, d) == rat(1, 1), || json!({ "k": k, "m": m, "d": d })) {
                            return Ok(());
                        }
                    }
                }
            }
            Ok(())
        }),
    ];
    suites.retain(|s| !(s.name == "poisson_certification" && opts.tv_ns.is_empty()));
    Ok(VerifyReport { suites })
}

/// C(top, bottom), plus one when the fault is armed.
fn weight_binomial(top: u128, bottom: u64, fault: bool) -> BigUint {
    let b = binomial(top, bottom);
    if fault {
        b + 1u32
    } else {
        b
    }
}

/// P_{R_{k,n}}(d=r) from the Eulerian row against the enumerated law of c
/// on S_{n+1} (formula route once n+1 exceeds the oracle range), plus the
/// L1 transfer bound.
fn transfer_suite(t: &mut Tally, opts: &VerifyOptions, censuses: &[SnCensus]) -> Result<()> {
    for n in 1..=opts.oracle_max.min(8) {
        let row = eulerian_row(n);
        for k in 1..=opts.k_max {
            let den = pow_u64(k, n as u64);
            let c_side = if n < censuses.len() {
                censuses[n].c_pmf_c(k)
            } else {
                c_pmf_c(k, n + 1)?
            };
            for r in 0..=n as u64 {
                let top = (n as u128 + k as u128).checked_sub(r as u128 + 1);
                let lhs = match top {
                    Some(top) if (r as usize) < n => {
                        let w = weight_binomial(top, n as u64, opts.inject_fault);
                        rat_from_uints(&(&row[r as usize] * w), &den)
                    }
                    _ => Rational::zero(),
                };
                let rhs = c_side.prob(r + 1);
                if !t.check(lhs == rhs, || {
                    json!({ "k": k, "n": n, "r": r,
                            "P_R(d=r)": render(&lhs), "P_C(c=r+1) on S_{n+1}": render(&rhs) })
                }) {
                    return Ok(());
                }
            }
            if n >= 2 {
                let (l1, bound) = transfer_l1(k, n)?;
                if !t.check(l1 <= bound, || json!({ "k": k, "n": n, "l1": render(&l1) })) {
                    return Ok(());
                }
            }
        }
    }
    Ok(())
}

fn pair_suite(t: &mut Tally, opts: &VerifyOptions, censuses: &[SnCensus]) -> Result<()> {
    let n_top = opts.oracle_max.min(7);
    for n in 2..=n_top {
        for p in censuses[n - 1].perms() {
            let law = rotation_conditional_law(p);
            let ok = matches!(&law, Ok(l) if l.total() == rat(1, 1));
            if !t.check(ok, || json!({ "perm": p.to_string(), "law": format!("{law:?}") })) {
                return Ok(());
            }
            let l = law?;
            let d = crate::pair::drift(p)?;
            if !t.check(l.mean() == d, || json!({ "perm": p.to_string(), "drift": render(&d) })) {
                return Ok(());
            }
        }
        for k in 1..=opts.k_max.min(8) {
            let z = drift_expectation(k, n)?;
            if !t.check(z.is_zero(), || json!({ "k": k, "n": n, "mean_drift": render(&z) })) {
                return Ok(());
            }
            let m = joint_matrix(k, n)?;
            if !t.check(is_symmetric(&m), || json!({ "k": k, "n": n, "joint": "not symmetric" })) {
                return Ok(());
            }
            let u = use1_identity(k, n)?;
            if !t.check(u.holds(), || json!({ "k": k, "n": n, "lhs": render(&u.lhs), "rhs": render(&u.rhs) })) {
                return Ok(());
            }
            let np = normalized_pair(PairModel::Finite(k), n)?;
            if !t.check(np.is_standardized(), || json!({ "k": k, "n": n, "E(W^2)": render(&np.second_w) })) {
                return Ok(());
            }
            for (r, _, _) in &np.values {
                let formula = conditional_drift_given_d(PairModel::Finite(k), n, *r)?.to_f64();
                let direct = conditional_drift_enumerated(k, n, *r)?;
                if !t.check((formula - direct).abs() <= 1e-12, || {
                    json!({ "k": k, "n": n, "r": r, "formula": formula, "enumeration": direct })
                }) {
                    return Ok(());
                }
            }
        }
        let np = normalized_pair(PairModel::Uniform, n)?;
        if !t.check(np.is_standardized(), || json!({ "uniform_n": n })) {
            return Ok(());
        }
    }
    Ok(())
}
