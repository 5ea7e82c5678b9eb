//! The exchangeable pair (d, d′) under C_{k,n} obtained by applying a
//! uniformly chosen cyclic rotation, and the remainder G(W) of the
//! normalized pair W = (d − E d)/√Var(d).
//!
//! Quantities of the form (rational)/√Var are carried as [`SqrtForm`] and
//! compared in squared form.

use dashu_float::ops::SquareRoot;
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{factorial, fmt_g17, rat, rat_from_uints, rat_int, render, to_f64, Rational};
use crate::hp::{self, DEFAULT_BITS};
use crate::measures::{c_pmf_c, check_k, d_from_cyclic};
use crate::moments::{mean_d_c, second_moment_d_c};
use crate::oracle::SnCensus;
use crate::permcore::{cyclic_rotate, descent_count, eulerian_row, eulerian_table, Permutation};
use crate::pmf::ExactPmf;

/// `coef / √radicand` with radicand > 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtForm {
    pub coef: Rational,
    pub radicand: Rational,
}

impl SqrtForm {
    pub fn to_f64(&self) -> f64 {
        let c = hp::from_rational(&self.coef, DEFAULT_BITS);
        let r = hp::from_rational(&self.radicand, DEFAULT_BITS);
        hp::to_f64(&(c / r.sqrt()))
    }

    /// Exact sign-aware comparison `self ≥ other` via squares.
    pub fn ge(&self, other: &SqrtForm) -> bool {
        // compare c1·√r2 against c2·√r1
        let lhs = &self.coef;
        let rhs = &other.coef;
        match (lhs.is_negative(), rhs.is_negative()) {
            (false, true) => true,
            (true, false) => lhs.is_zero() && rhs.is_zero(),
            (false, false) => lhs * lhs * &other.radicand >= rhs * rhs * &self.radicand,
            (true, true) => lhs * lhs * &other.radicand <= rhs * rhs * &self.radicand,
        }
    }
}

/// Law of d′ − d ∈ {−1, 0, +1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepLaw {
    pub down: Rational,
    pub stay: Rational,
    pub up: Rational,
}

impl StepLaw {
    pub fn mean(&self) -> Rational {
        &self.up - &self.down
    }

    pub fn total(&self) -> Rational {
        &self.down + &self.stay + &self.up
    }
}

fn check_n(p: &Permutation) -> Result<usize> {
    let n = p.len();
    if n < 2 {
        Err(Error::CyclicUndefined(n))
    } else {
        Ok(n)
    }
}

/// Law of d′ − d from all n rotations of π.
pub fn rotation_law_enumerated(p: &Permutation) -> Result<StepLaw> {
    let n = check_n(p)?;
    let d = descent_count(p) as i64;
    let mut counts = [0i64; 3];
    for s in 0..n {
        let step = descent_count(&cyclic_rotate(p, s)?) as i64 - d;
        if !(-1..=1).contains(&step) {
            return Err(Error::Inconsistent(format!("rotation moved d by {step} at {p}")));
        }
        counts[(step + 1) as usize] += 1;
    }
    let n = n as i64;
    Ok(StepLaw {
        down: rat(counts[0], n),
        stay: rat(counts[1], n),
        up: rat(counts[2], n),
    })
}

/// Closed form: up-step (n−1−d)/n if π(n) > π(1), otherwise down-step d/n.
pub fn rotation_law_closed_form(p: &Permutation) -> Result<StepLaw> {
    let n = check_n(p)? as i64;
    let d = descent_count(p) as i64;
    Ok(if p.wraps_down() {
        StepLaw {
            down: Rational::zero(),
            stay: rat(d + 1, n),
            up: rat(n - 1 - d, n),
        }
    } else {
        StepLaw {
            down: rat(d, n),
            stay: rat(n - d, n),
            up: Rational::zero(),
        }
    })
}

/// Conditional law of d′ − d given π, computed both ways and required to agree.
pub fn rotation_conditional_law(p: &Permutation) -> Result<StepLaw> {
    let a = rotation_law_enumerated(p)?;
    let b = rotation_law_closed_form(p)?;
    if a != b {
        return Err(Error::Inconsistent(format!("rotation law at {p}: {a:?} vs {b:?}")));
    }
    Ok(a)
}

/// E(d′ − d | π) = −d/n + (n−1)/n·1{π(n) > π(1)}.
pub fn drift(p: &Permutation) -> Result<Rational> {
    let n = check_n(p)? as i64;
    let d = descent_count(p) as i64;
    let chi = p.wraps_down() as i64;
    Ok(rat(-d + (n - 1) * chi, n))
}

/// Σ_π C_{k,n}(π)·drift(π), exactly; zero by exchangeability.
pub fn drift_expectation(k: u64, n: usize) -> Result<Rational> {
    check_k(k)?;
    if n < 2 {
        return Err(Error::CyclicUndefined(n));
    }
    let census = SnCensus::new(n)?;
    let nn = n as i64;
    let sum = census.c_expectation(k, |d, c| -(d as i64) + (nn - 1) * (c as i64 - d as i64));
    Ok(sum / rat_int(nn))
}

/// Joint law P(d = a, d′ = b) under C_{k,n}, from every π and every rotation.
pub fn joint_matrix(k: u64, n: usize) -> Result<Vec<Vec<Rational>>> {
    check_k(k)?;
    if n < 2 {
        return Err(Error::CyclicUndefined(n));
    }
    let census = SnCensus::new(n)?;
    let probs = census.c_probs(k);
    let share = rat(1, n as i64);
    let mut m = vec![vec![Rational::zero(); n]; n];
    for (p, w) in census.perms().iter().zip(&probs) {
        if w.is_zero() {
            continue;
        }
        let a = descent_count(p);
        let w = w * &share;
        for s in 0..n {
            let b = descent_count(&cyclic_rotate(p, s)?);
            m[a][b] += &w;
        }
    }
    Ok(m)
}

pub fn is_symmetric(m: &[Vec<Rational>]) -> bool {
    (0..m.len()).all(|i| (0..i).all(|j| m[i][j] == m[j][i]))
}

/// Both sides of E_C(d·1{π(n) > π(1)}) = E_C(c(c−1))/n.
#[derive(Clone, Debug)]
pub struct Use1Record {
    pub k: u64,
    pub n: usize,
    /// By enumeration.
    pub lhs: Rational,
    /// From the exact moments of c.
    pub rhs: Rational,
}

impl Use1Record {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn use1_identity(k: u64, n: usize) -> Result<Use1Record> {
    check_k(k)?;
    if n < 2 {
        return Err(Error::CyclicUndefined(n));
    }
    let census = SnCensus::new(n)?;
    let lhs = census.c_expectation(k, |d, c| d as i64 * (c as i64 - d as i64));
    let mean = crate::moments::mean_c_exact(k, n)?;
    let second = crate::moments::second_moment_c_exact(k, n)?;
    let rhs = (second - mean) / rat_int(n as u64);
    Ok(Use1Record { k, n, lhs, rhs })
}

/// Uniform measure on S_n, or C_{k,n}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairModel {
    Uniform,
    Finite(u64),
}

struct Laws {
    c: ExactPmf,
    d: ExactPmf,
    mean_d: Rational,
    var_d: Rational,
}

fn laws(model: PairModel, n: usize) -> Result<Laws> {
    if n < 2 {
        return Err(Error::CyclicUndefined(n));
    }
    let out = match model {
        PairModel::Uniform => {
            let prev = eulerian_row(n - 1);
            let row = eulerian_row(n);
            let f_prev = factorial(n as u64 - 1);
            let f_n = factorial(n as u64);
            let c = ExactPmf::from_pairs(
                prev.iter()
                    .enumerate()
                    .map(|(i, a)| (i as u64 + 1, rat_from_uints(a, &f_prev))),
            )?;
            let d = ExactPmf::from_pairs(
                row.iter()
                    .enumerate()
                    .map(|(r, a)| (r as u64, rat_from_uints(a, &f_n))),
            )?;
            Laws {
                c,
                d,
                mean_d: rat(n as i64 - 1, 2),
                var_d: rat(n as i64 + 1, 12),
            }
        }
        PairModel::Finite(k) => {
            let c = c_pmf_c(k, n)?;
            let d = d_from_cyclic(&c, n);
            let mean_d = mean_d_c(k, n)?;
            let var_d = second_moment_d_c(k, n)? - &mean_d * &mean_d;
            Laws { c, d, mean_d, var_d }
        }
    };
    if out.var_d <= Rational::zero() {
        return Err(Error::Inconsistent(format!("Var(d) = {} for n = {n}", render(&out.var_d))));
    }
    Ok(out)
}

/// P(c = r+1)/P(d = r)·(r+1)(n−1)/n, the conditional mean of
/// (n−1)·1{π(n) > π(1)} given d = r.
fn wrap_term(l: &Laws, n: usize, r: u64) -> Result<Rational> {
    let pd = l.d.prob(r);
    if pd.is_zero() {
        return Err(Error::ZeroProbability(r));
    }
    Ok(l.c.prob(r + 1) / pd * rat((r as i64 + 1) * (n as i64 - 1), n as i64))
}

/// E(W′ − W | d = r) = −W/n + (wrap_term − E d)/(n√Var), which collapses
/// to (wrap_term − r)/(n√Var).
pub fn conditional_drift_given_d(model: PairModel, n: usize, r: u64) -> Result<SqrtForm> {
    let l = laws(model, n)?;
    let a = wrap_term(&l, n, r)?;
    Ok(SqrtForm {
        coef: (a - rat_int(r)) / rat_int(n as u64),
        radicand: l.var_d,
    })
}

/// E(W′ − W | d = r) by enumerating S_n under C_{k,n}.
pub fn conditional_drift_enumerated(k: u64, n: usize, r: u64) -> Result<f64> {
    check_k(k)?;
    if n < 2 {
        return Err(Error::CyclicUndefined(n));
    }
    let census = SnCensus::new(n)?;
    let probs = census.c_probs(k);
    let mut mass = Rational::zero();
    let mut num = Rational::zero();
    let mut m1 = Rational::zero();
    let mut m2 = Rational::zero();
    for (p, w) in census.perms().iter().zip(&probs) {
        let d = descent_count(p) as u64;
        m1 += w * rat_int(d);
        m2 += w * rat_int(d * d);
        if d == r {
            mass += w;
            num += w * drift(p)?;
        }
    }
    if mass.is_zero() {
        return Err(Error::ZeroProbability(r));
    }
    let var = m2 - &m1 * &m1;
    Ok(SqrtForm {
        coef: num / mass,
        radicand: var,
    }
    .to_f64())
}

/// G at one value r of d, as coef/√Var.
#[derive(Clone, Debug)]
pub struct GPoint {
    pub r: u64,
    pub prob: Rational,
    pub value: SqrtForm,
}

/// G(r) = E(W′ − W | d = r) + W/n over the support of d, with E|G(W)|.
#[derive(Clone, Debug)]
pub struct GRemainder {
    pub model: PairModel,
    pub n: usize,
    pub mean_d: Rational,
    pub var_d: Rational,
    pub points: Vec<GPoint>,
    pub mean_abs: SqrtForm,
}

pub fn g_remainder(model: PairModel, n: usize) -> Result<GRemainder> {
    let l = laws(model, n)?;
    let nn = rat_int(n as u64);
    let mut points = Vec::with_capacity(l.d.len());
    let mut acc = Rational::zero();
    for (r, p) in l.d.iter() {
        let coef = (wrap_term(&l, n, r)? - &l.mean_d) / &nn;
        acc += p * coef.abs();
        points.push(GPoint {
            r,
            prob: p.clone(),
            value: SqrtForm {
                coef,
                radicand: l.var_d.clone(),
            },
        });
    }
    Ok(GRemainder {
        model,
        n,
        mean_d: l.mean_d.clone(),
        var_d: l.var_d.clone(),
        points,
        mean_abs: SqrtForm {
            coef: acc,
            radicand: l.var_d,
        },
    })
}

/// E_{U_n}|G(W)| from the Eulerian form
/// (n−1)/((n−1)!·2n²·√Var)·Σ_r |(r+1)A(n−1,r+1) − (n−r)A(n−1,r)|.
pub fn uniform_mean_abs_g_eulerian(n: usize) -> Result<SqrtForm> {
    if n < 2 {
        return Err(Error::CyclicUndefined(n));
    }
    let row = eulerian_row(n - 1);
    let a = |j: usize| -> BigInt {
        if j == 0 || j > n - 1 {
            BigInt::zero()
        } else {
            BigInt::from(row[j - 1].clone())
        }
    };
    let mut total = BigInt::zero();
    for r in 0..n {
        let v = a(r + 1) * (r as i64 + 1) - a(r) * (n - r) as i64;
        total += v.abs();
    }
    let den = BigInt::from(factorial(n as u64 - 1)) * 2 * (n as i64) * (n as i64);
    Ok(SqrtForm {
        coef: Rational::new(total * (n as i64 - 1), den),
        radicand: rat(n as i64 + 1, 12),
    })
}

/// The normalized pair W = (d − E d)/√Var with λ = 1/n.
#[derive(Clone, Debug)]
pub struct NormalizedPair {
    pub model: PairModel,
    pub n: usize,
    pub mean_d: Rational,
    pub var_d: Rational,
    pub lambda: Rational,
    /// (r, W(r), G(r)) over the support of d.
    pub values: Vec<(u64, f64, f64)>,
    /// √Var·E(W), exactly.
    pub mean_w_scaled: Rational,
    /// E(W²), exactly.
    pub second_w: Rational,
}

impl NormalizedPair {
    pub fn is_standardized(&self) -> bool {
        self.mean_w_scaled.is_zero() && self.second_w == rat(1, 1)
    }
}

pub fn normalized_pair(model: PairModel, n: usize) -> Result<NormalizedPair> {
    let g = g_remainder(model, n)?;
    let mut m1 = Rational::zero();
    let mut m2 = Rational::zero();
    let mut values = Vec::with_capacity(g.points.len());
    for pt in &g.points {
        let centered = rat_int(pt.r) - &g.mean_d;
        m1 += &pt.prob * &centered;
        m2 += &pt.prob * &centered * &centered;
        let w = SqrtForm {
            coef: centered,
            radicand: g.var_d.clone(),
        };
        values.push((pt.r, w.to_f64(), pt.value.to_f64()));
    }
    Ok(NormalizedPair {
        model,
        n,
        lambda: rat(1, n as i64),
        mean_w_scaled: m1,
        second_w: m2 / &g.var_d,
        mean_d: g.mean_d,
        var_d: g.var_d,
        values,
    })
}

/// Exhaustive check of (r+1)A(n−1,r+1) ≥ (n−r)A(n−1,r) against the claimed
/// range r ≤ (n−1)/2 (n odd) or r ≤ n/2 − 1 (n even).
#[derive(Clone, Debug)]
pub struct NewtonRecord {
    pub n_max: usize,
    pub checked: usize,
    pub equality_points: Vec<(usize, usize)>,
    /// (n, r) where the inequality and the range disagree.
    pub mismatches: Vec<(usize, usize)>,
}

impl NewtonRecord {
    pub fn passes(&self) -> bool {
        self.mismatches.is_empty()
    }
}

pub fn newton_range_end(n: usize) -> usize {
    if n % 2 == 1 {
        (n - 1) / 2
    } else {
        n / 2 - 1
    }
}

pub fn newton_check(n_max: usize) -> Result<NewtonRecord> {
    if n_max < 3 {
        return Err(Error::out_of_range("n_max", n_max, ">= 3"));
    }
    let table = eulerian_table(n_max - 1)?;
    let mut rec = NewtonRecord {
        n_max,
        checked: 0,
        equality_points: Vec::new(),
        mismatches: Vec::new(),
    };
    for n in 3..=n_max {
        for r in 0..n {
            let lhs = table.get(n - 1, r + 1) * BigUint::from(r + 1);
            let rhs = table.get(n - 1, r) * BigUint::from(n - r);
            rec.checked += 1;
            if lhs == rhs {
                rec.equality_points.push((n, r));
            }
            if (lhs >= rhs) != (r <= newton_range_end(n)) {
                rec.mismatches.push((n, r));
            }
        }
    }
    Ok(rec)
}

/// A(n−1, ⌈(n−1)/2⌉)/(n−1)! and its asymptotic value √(6/(nπ)).
pub fn central_eulerian_ratio(n: usize) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::out_of_range("n", n, ">= 2"));
    }
    let row = eulerian_row(n - 1);
    let mid = (n - 1).div_ceil(2);
    let exact = rat_from_uints(&row[mid - 1], &factorial(n as u64 - 1));
    Ok((to_f64(&exact), (6.0 / (n as f64 * std::f64::consts::PI)).sqrt()))
}

/// One row of the diagnostic: n·E_{U_n}|G(W)| against n times the explicit
/// lower bound, both over √Var_{U_n}(d) = √((n+1)/12).
#[derive(Clone, Debug)]
pub struct NogoodRow {
    pub n: usize,
    pub value: SqrtForm,
    /// n·bound = (p·x − p·√(n/12))/√Var with p = (n−1)/n.
    pub bound_p: Rational,
    pub bound_x: Rational,
    pub dominates: bool,
}

impl NogoodRow {
    pub fn value_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn lower_bound_f64(&self) -> f64 {
        let bits = DEFAULT_BITS;
        let p = hp::from_rational(&self.bound_p, bits);
        let x = hp::from_rational(&self.bound_x, bits);
        let s = hp::from_rational(&rat(self.n as i64, 12), bits).sqrt();
        let v = hp::from_rational(&self.value.radicand, bits).sqrt();
        hp::to_f64(&(p * (x - s) / v))
    }

    pub const CSV_HEADER: &'static str = "n,value_num,value_den_sqrt_form,float_value,lower_bound_float";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.n,
            render(&self.value.coef),
            render(&self.value.radicand),
            fmt_g17(self.value_f64()),
            fmt_g17(self.lower_bound_f64())
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "value_num": render(&self.value.coef),
            "value_den_sqrt_form": render(&self.value.radicand),
            "float_value": fmt_g17(self.value_f64()),
            "lower_bound_float": fmt_g17(self.lower_bound_f64()),
            "dominates": self.dominates,
        })
    }
}

pub fn nogood_row(n: usize) -> Result<NogoodRow> {
    if n < 3 {
        return Err(Error::out_of_range("n", n, ">= 3"));
    }
    let g = g_remainder(PairModel::Uniform, n)?;
    let nn = rat_int(n as u64);
    let value = SqrtForm {
        coef: g.mean_abs.coef * &nn,
        radicand: g.mean_abs.radicand,
    };
    let row = eulerian_row(n - 1);
    let f = rat_int(BigInt::from(factorial(n as u64 - 1)));
    let bound_x = if n % 2 == 1 {
        rat(n as i64 + 1, 2) * rat_int(BigInt::from(row[(n - 1) / 2 - 1].clone())) / (rat_int(2u64) * &f)
    } else {
        nn.clone() * rat_int(BigInt::from(row[n / 2 - 1].clone())) / (rat_int(2u64) * &f)
    };
    let bound_p = rat(n as i64 - 1, n as i64);
    // value ≥ p(x − s) with s = √(n/12): trivial if p·x ≤ value, else compare squares
    let t = &bound_p * &bound_x - &value.coef;
    let dominates = t <= Rational::zero() || &bound_p * &bound_p * rat(n as i64, 12) >= &t * &t;
    Ok(NogoodRow {
        n,
        value,
        bound_p,
        bound_x,
        dominates,
    })
}

pub fn nogood_diagnostic(ns: impl IntoIterator<Item = usize>) -> Result<Vec<NogoodRow>> {
    ns.into_iter().map(nogood_row).collect()
}
