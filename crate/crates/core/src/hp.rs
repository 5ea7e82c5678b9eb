//! Fixed-precision binary floats for closed forms that cancel badly in f64.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::{IBig, Sign, UBig};
use num_bigint::BigInt;
use num_traits::Signed;

use crate::exact::Rational;

pub type Hp = FBig<HalfEven, 2>;

/// Working precision in bits (about 102 significant decimal digits).
pub const DEFAULT_BITS: usize = 340;

pub fn bits_for_digits(digits: usize) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 8
}

fn ibig(v: &BigInt) -> IBig {
    let mag = UBig::from_le_bytes(&v.magnitude().to_bytes_le());
    let sign = if v.is_negative() {
        Sign::Negative
    } else {
        Sign::Positive
    };
    IBig::from_parts(sign, mag)
}

pub fn from_int(v: i64, bits: usize) -> Hp {
    Hp::from(IBig::from(v)).with_precision(bits).value()
}

pub fn from_rational(r: &Rational, bits: usize) -> Hp {
    let num = Hp::from(ibig(r.numer())).with_precision(bits).value();
    let den = Hp::from(ibig(r.denom())).with_precision(bits).value();
    num / den
}

/// Exact conversion of a finite f64, then rounded to `bits`.
pub fn from_f64(x: f64, bits: usize) -> Hp {
    let r = Rational::from_float(x).expect("finite input");
    from_rational(&r, bits)
}

pub fn to_f64(x: &Hp) -> f64 {
    x.to_f64().value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn exp_one() {
        let e = from_int(1, DEFAULT_BITS).exp();
        assert_eq!(to_f64(&e), std::f64::consts::E);
        let third = from_rational(&rat(-1, 3), DEFAULT_BITS);
        assert_eq!(to_f64(&third), -1.0 / 3.0);
    }

    #[test]
    fn cancellation_survives() {
        // (1 + 1e-30) - 1 is lost in f64 but not at ~100 digits
        let big = crate::exact::rat_int(num_bigint::BigInt::from(10).pow(30));
        let tiny = from_rational(&(rat(1, 1) / big), DEFAULT_BITS);
        let one = from_int(1, DEFAULT_BITS);
        let diff = (&one + &tiny) - &one;
        assert!((to_f64(&diff) - 1e-30).abs() < 1e-45);
    }
}
