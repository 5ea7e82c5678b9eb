//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use descents::exact::{rat, to_f64, Rational};
use descents::hp::{self, DEFAULT_BITS};
use descents::measures::{c_pmf_c, d_pmf_c, d_pmf_r, transfer_l1};
use descents::moments::{
    asymptotic_mean_c_hp, asymptotic_variance_c, asymptotic_variance_c_hp, mean_c_exact,
    mean_d_c, second_moment_c_exact, second_moment_d_c,
};
use descents::oracle::SnCensus;
use descents::pair::{central_eulerian_ratio, newton_check, nogood_diagnostic};
use descents::permcore::cyclic_gf_coefficients;
use descents::sampler::{
    case_total, exact_insertion_distribution, exact_law, goodness_of_fit, riffle_histogram,
    sample_histogram, SampleStatistic, SamplerConfig,
};
use descents::stein::{
    solve_stein_default, tv_grid, tv_report, TvStatistic, CERTIFICATION_NS, CERTIFICATION_POINTS,
};
use descents::Family;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

const N_MAX: usize = 8;
const K_MAX: u64 = 12;

fn censuses() -> Vec<SnCensus> {
    (1..=N_MAX + 1).map(|n| SnCensus::new(n).expect("within oracle cap")).collect()
}

fn within(limit: Duration, t: Duration) -> Result<(), String> {
    if t <= limit {
        Ok(())
    } else {
        Err(format!("took {t:.1?}, limit {limit:?}"))
    }
}

fn c1(cs: &[SnCensus]) -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for n in 1..=N_MAX {
        let c = &cs[n - 1];
        for k in 1..=K_MAX {
            let mut pairs = vec![("d|R", d_pmf_r(k, n).unwrap(), c.d_pmf_r(k))];
            if n >= 2 {
                pairs.push(("c|C", c_pmf_c(k, n).unwrap(), c.c_pmf_c(k)));
                pairs.push(("d|C", d_pmf_c(k, n).unwrap(), c.d_pmf_c(k)));
            }
            for (what, formula, oracle) in pairs {
                if formula != oracle {
                    return Err(format!("{what} differs at k={k}, n={n}"));
                }
                checked += 1;
            }
        }
    }
    within(Duration::from_secs(60), start.elapsed())?;
    Ok(format!("{checked} laws equal enumeration in {:.2?}", start.elapsed()))
}

fn c2(cs: &[SnCensus]) -> Outcome {
    let mut checked = 0;
    for n in 2..=N_MAX {
        let c = &cs[n - 1];
        let nn = Rational::from_integer((n as i64).into());
        for k in 1..=K_MAX {
            let e_c = c.c_expectation(k, |_, c| c as i64);
            let e_c2 = c.c_expectation(k, |_, c| (c * c) as i64);
            let e_d = c.c_expectation(k, |d, _| d as i64);
            let e_d2 = c.c_expectation(k, |d, _| (d * d) as i64);
            let one = rat(1, 1);
            let from_c_d = (&nn - &one) / &nn * &e_c;
            let from_c_d2 = (&one - rat(2, 1) / &nn) * &e_c2 + &e_c / &nn;
            let ok = mean_c_exact(k, n).unwrap() == e_c
                && second_moment_c_exact(k, n).unwrap() == e_c2
                && from_c_d == e_d
                && from_c_d2 == e_d2
                && mean_d_c(k, n).unwrap() == e_d
                && second_moment_d_c(k, n).unwrap() == e_d2;
            if !ok {
                return Err(format!("moment mismatch at k={k}, n={n}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} (k,n) points, mean/second moment and both d-from-c identities exact"))
}

fn c3(cs: &[SnCensus]) -> Outcome {
    let mut checked = 0;
    for (n, next) in (1..=N_MAX).zip(&cs[1..]) {
        for k in 1..=K_MAX {
            let r_law = d_pmf_r(k, n).unwrap();
            let c_law = next.c_pmf_c(k);
            for r in 0..=n as u64 {
                if r_law.prob(r) != c_law.prob(r + 1) {
                    return Err(format!("P_R(d=r) != P_C(c=r+1) at k={k}, n={n}, r={r}"));
                }
                checked += 1;
            }
            if n >= 2 {
                let (l1, bound) = transfer_l1(k, n).unwrap();
                if l1 > bound || bound != rat(2 * k as i64, n as i64) {
                    return Err(format!("L1 {} above 2k/n at k={k}, n={n}", to_f64(&l1)));
                }
            }
        }
    }
    Ok(format!("{checked} transfer identities exact, L1 <= 2k/n on the grid"))
}

fn c4() -> Outcome {
    let start = Instant::now();
    let rows = tv_grid(&CERTIFICATION_NS, CERTIFICATION_POINTS, &TvStatistic::ALL).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if let Some(r) = rows.iter().find(|r| r.tv_exact + r.tv_width > r.bound) {
        return Err(format!("{} at k={}, n={}: tv {} > bound {}", r.statistic.name(), r.k, r.n, r.tv_exact, r.bound));
    }
    let pin = tv_report(5, 200, TvStatistic::KMinusDUnderC).map_err(|e| e.to_string())?;
    if (pin.bound / 6.25e-4 - 1.0).abs() > 1e-6 || pin.tv_exact >= pin.bound {
        return Err(format!("(5,200): bound {} tv {}", pin.bound, pin.tv_exact));
    }
    within(Duration::from_secs(300), elapsed)?;
    Ok(format!(
        "{} rows certified in {elapsed:.1?}; (5,200) C-kd bound {:.6e}, tv {:.3e}",
        rows.len(),
        pin.bound,
        pin.tv_exact
    ))
}

fn c5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut g, mut dg, mut res) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let lambda = rng.random_range(0.05..=8.0);
        let density: f64 = rng.random_range(0.0..=1.0);
        let set = (0..=60u64).filter(|_| rng.random_bool(density)).collect();
        let s = solve_stein_default(lambda, &set).map_err(|e| e.to_string())?;
        g = g.max(s.sup_g);
        dg = dg.max(s.sup_delta);
        res = res.max(s.max_residual);
    }
    if g <= 1.0 && dg <= 1.0 && res < 1e-12 {
        Ok(format!("1000 cases: max sup|g| {g:.4}, max sup|Δg| {dg:.4}, max residual {res:.1e}"))
    } else {
        Err(format!("sup|g| {g}, sup|Δg| {dg}, residual {res}"))
    }
}

const ASYM_NS: [usize; 5] = [50, 100, 200, 400, 800];

fn c6() -> Outcome {
    let one = hp::from_int(1, DEFAULT_BITS);
    let (m, s) = asymptotic_mean_c_hp(&one);
    let mut errs = Vec::new();
    for n in ASYM_NS {
        let nn = hp::from_int(n as i64, DEFAULT_BITS);
        let mean = hp::from_rational(&mean_c_exact(n as u64, n).unwrap(), DEFAULT_BITS);
        errs.push(hp::to_f64(&(&nn * (mean - &nn * &m - &s))).abs());
    }
    let m1 = hp::to_f64(&m);
    let max = errs.iter().cloned().fold(0.0, f64::max);
    if max <= 2.0 * errs[0] && (m1 - 0.4180233).abs() < 5e-8 {
        Ok(format!("m(1) = {m1:.9}, n·error {errs:.4?}"))
    } else {
        Err(format!("m(1) = {m1}, n·error {errs:?}"))
    }
}

fn c7() -> Outcome {
    let one = hp::from_int(1, DEFAULT_BITS);
    let v = asymptotic_variance_c_hp(&one);
    let mut errs = Vec::new();
    for n in ASYM_NS {
        let var = descents::moments::variance_c_exact(n as u64, n).unwrap();
        let nn = hp::from_int(n as i64, DEFAULT_BITS);
        errs.push(hp::to_f64(&(hp::from_rational(&var, DEFAULT_BITS) - nn * &v)).abs());
    }
    let v_inf = asymptotic_variance_c(1e6).map_err(|e| e.to_string())?;
    if errs[4] <= errs[0] + 1.0 && (v_inf - 1.0 / 12.0).abs() < 1e-6 {
        Ok(format!("|Var - n·v(1)| {errs:.4?}; v(1e6) - 1/12 = {:.2e}", v_inf - 1.0 / 12.0))
    } else {
        Err(format!("errors {errs:?}, v(1e6) = {v_inf}"))
    }
}

fn c8() -> Outcome {
    let rec = newton_check(60).map_err(|e| e.to_string())?;
    if rec.passes() {
        Ok(format!("{} (n,k) points, equality exactly where predicted ({})", rec.checked, rec.equality_points.len()))
    } else {
        Err(format!("mismatches {:?}", rec.mismatches))
    }
}

fn c9() -> Outcome {
    let rows = nogood_diagnostic(4..=14).map_err(|e| e.to_string())?;
    let vals: Vec<f64> = rows.iter().map(|r| r.value_f64()).collect();
    if let Some(r) = rows.iter().find(|r| r.value_f64() <= 0.0 || !r.dominates) {
        return Err(format!("n={}: value {} vs bound {}", r.n, r.value_f64(), r.lower_bound_f64()));
    }
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = vals.iter().cloned().fold(0.0, f64::max);
    let (exact, asym) = central_eulerian_ratio(60).map_err(|e| e.to_string())?;
    let rel = (exact / asym - 1.0).abs();
    if min >= max / 2.0 && rel <= 0.05 {
        Ok(format!("n·E|G| in [{min:.4}, {max:.4}], dominates bound; central ratio off by {:.2}%", 100.0 * rel))
    } else {
        Err(format!("min {min}, max {max}, central ratio error {rel}"))
    }
}

fn c10(cs: &[SnCensus]) -> Outcome {
    let mut perms = 0;
    for n in 1..=5 {
        for k in 1..=4 {
            let tree = exact_insertion_distribution(k, n).map_err(|e| e.to_string())?;
            for (p, want) in cs[n - 1].perms().iter().zip(cs[n - 1].r_probs(k)) {
                if tree.get(p).cloned().unwrap_or_else(Rational::zero) != want {
                    return Err(format!("k={k}, n={n}, π={p}"));
                }
                perms += 1;
            }
        }
    }
    for k in 1..=50u64 {
        for m in 1..=50usize {
            for d in 0..m.min(k as usize) {
                if case_total(k, m, d) != rat(1, 1) {
                    return Err(format!("case probabilities at k={k}, m={m}, d={d}"));
                }
            }
        }
    }
    Ok(format!("{perms} (k,n,π) masses exact; case normalization exact for n,k <= 50"))
}

fn c11() -> Outcome {
    let exact = exact_law(Family::R, SampleStatistic::D, 4, 6).map_err(|e| e.to_string())?;
    let limit = Duration::from_secs(60);

    let start = Instant::now();
    let config = SamplerConfig::new(4, 6, 1_000_000, 20_240_611, 8).map_err(|e| e.to_string())?;
    let hist = sample_histogram(&config, Family::R, SampleStatistic::D).map_err(|e| e.to_string())?;
    let t_ins = start.elapsed();
    let fit_ins = goodness_of_fit(&hist, &exact).map_err(|e| e.to_string())?;

    let start = Instant::now();
    let config = SamplerConfig::new(4, 6, 100_000, 20_240_612, 8).map_err(|e| e.to_string())?;
    let hist = riffle_histogram(&config, 2);
    let t_gsr = start.elapsed();
    let fit_gsr = goodness_of_fit(&hist, &exact).map_err(|e| e.to_string())?;

    let good = |f: &descents::sampler::GoodnessOfFit| f.p_value > 0.001 && f.max_bin_z <= 4.0;
    let detail = format!(
        "insertion p={:.3} max|z|={:.2} ({t_ins:.1?}); GSR p={:.3} max|z|={:.2} ({t_gsr:.1?})",
        fit_ins.p_value, fit_ins.max_bin_z, fit_gsr.p_value, fit_gsr.max_bin_z
    );
    within(limit, t_ins)?;
    within(limit, t_gsr)?;
    if good(&fit_ins) && good(&fit_gsr) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c12(cs: &[SnCensus]) -> Outcome {
    for n in 2..=N_MAX {
        if cyclic_gf_coefficients(n, 12).map_err(|e| e.to_string())? != cs[n - 1].cyclic_series(12) {
            return Err(format!("coefficient mismatch at n={n}"));
        }
    }
    Ok("coefficients through t^12 exact for 2 <= n <= 8".into())
}

fn main() -> ExitCode {
    let cs = censuses();
    let criteria: Vec<(&str, Check)> = vec![
        ("oracle equivalence", Box::new(|| c1(&cs))),
        ("exact moments", Box::new(|| c2(&cs))),
        ("transfer identity", Box::new(|| c3(&cs))),
        ("Poisson certification", Box::new(c4)),
        ("Stein solution bounds", Box::new(c5)),
        ("asymptotic mean", Box::new(c6)),
        ("asymptotic variance", Box::new(c7)),
        ("Newton inequalities", Box::new(c8)),
        ("nogood diagnostic", Box::new(c9)),
        ("sampler exactness", Box::new(|| c10(&cs))),
        ("statistical cross-checks", Box::new(c11)),
        ("generating function", Box::new(|| c12(&cs))),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
