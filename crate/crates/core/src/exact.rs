//! Exact integer and rational helpers shared by every module.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: impl Into<BigInt>) -> Rational {
    Rational::from_integer(v.into())
}

pub fn rat_from_uints(num: &BigUint, den: &BigUint) -> Rational {
    Rational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

/// Binomial coefficient C(top, bottom); zero when `bottom > top`.
pub fn binomial(top: u128, bottom: u64) -> BigUint {
    let bottom = bottom as u128;
    if bottom > top {
        return BigUint::zero();
    }
    let bottom = bottom.min(top - bottom);
    let mut acc = BigUint::one();
    // acc == C(top - bottom + i, i) after step i, so each division is exact
    for i in 1..=bottom {
        acc *= BigUint::from(top - bottom + i);
        acc /= BigUint::from(i);
    }
    acc
}

pub fn pow_u64(base: u64, exp: u64) -> BigUint {
    num_traits::pow::pow(BigUint::from(base), exp as usize)
}

/// Σ_{j=1}^{m} j^p, summed directly.
pub fn power_sum(m: u64, p: u32) -> BigUint {
    let mut total = BigUint::zero();
    if m == 0 {
        return total;
    }
    let bits = 64 - m.leading_zeros();
    if (bits as u64) * (p as u64) <= 120 {
        let mut acc: u128 = 0;
        for j in 1..=m {
            let term = (j as u128).pow(p);
            match acc.checked_add(term) {
                Some(v) => acc = v,
                None => {
                    total += BigUint::from(acc);
                    acc = term;
                }
            }
        }
        total += BigUint::from(acc);
    } else {
        for j in 1..=m {
            total += num_traits::pow::pow(BigUint::from(j), p as usize);
        }
    }
    total
}

/// Falling factorial (n)_t = n(n-1)...(n-t+1), with (n)_0 = 1.
pub fn falling_factorial(n: u64, t: u64) -> BigUint {
    if t > n {
        return BigUint::zero();
    }
    (0..t).fold(BigUint::one(), |acc, i| acc * BigUint::from(n - i))
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// ⌈log₂ x⌉ for x ≥ 1, in integer arithmetic.
pub fn ceil_log2(x: u64) -> u32 {
    debug_assert!(x >= 1);
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Nearest `f64` to an exact rational.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Canonical "num/den" rendering; integers render without a denominator.
pub fn render(r: &Rational) -> String {
    let r = r.reduced();
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Renders an `f64` the way `%.17g` would: 17 significant digits, trailing zeros trimmed.
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific form");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        trim_zeros(&fixed)
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
