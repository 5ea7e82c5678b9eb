//! The riffle measure R_{k,n}, the cut-then-riffle measure C_{k,n}, and the
//! exact laws of d and c they induce.
//!
//! R_{k,n}(π) = C(n+k−d(π)−1, n) / k^n and
//! C_{k,n}(π) = C(n+k−c(π)−1, n−1) / (n·k^{n−1}). Pmfs are built from
//! Eulerian rows, never by enumerating S_n.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{binomial, ceil_log2, pow_u64, rat, rat_from_uints, render, Rational};
use crate::permcore::{cyclic_descent_count, descent_count, eulerian_row, Permutation};
use crate::pmf::ExactPmf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    R,
    C,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R" | "r" => Ok(Family::R),
            "C" | "c" => Ok(Family::C),
            _ => Err(Error::Parse(format!("unknown measure {s:?} (expected R or C)"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::R => "R",
            Family::C => "C",
        })
    }
}

/// A member of one of the two measure families on S_n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeasureSpec {
    family: Family,
    k: u64,
    n: usize,
}

impl MeasureSpec {
    pub fn new(family: Family, k: u64, n: usize) -> Result<Self> {
        check_k(k)?;
        if n == 0 {
            return Err(Error::out_of_range("n", 0, ">= 1"));
        }
        if family == Family::C && n < 2 {
            return Err(Error::CyclicUndefined(n));
        }
        Ok(MeasureSpec { family, k, n })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Probability of `p` under this measure.
    pub fn prob(&self, p: &Permutation) -> Result<Rational> {
        match self.family {
            Family::R => r_prob(self, p),
            Family::C => c_prob(self, p),
        }
    }
}

pub(crate) fn check_k(k: u64) -> Result<()> {
    if k == 0 {
        Err(Error::out_of_range("k", 0, ">= 1"))
    } else {
        Ok(())
    }
}

fn check_size(spec: &MeasureSpec, p: &Permutation) -> Result<()> {
    if p.len() != spec.n {
        Err(Error::SizeMismatch {
            expected: spec.n,
            found: p.len(),
        })
    } else {
        Ok(())
    }
}

/// Numerator C(n+k−d−1, n) of R_{k,n} at a permutation with d descents.
pub fn r_weight(k: u64, n: usize, d: usize) -> BigUint {
    let top = n as u128 + k as u128;
    match top.checked_sub(d as u128 + 1) {
        Some(top) => binomial(top, n as u64),
        None => BigUint::zero(),
    }
}

/// Numerator C(n+k−c−1, n−1) of C_{k,n} at a permutation with c cyclic descents.
pub fn c_weight(k: u64, n: usize, c: usize) -> BigUint {
    let top = n as u128 + k as u128;
    match top.checked_sub(c as u128 + 1) {
        Some(top) => binomial(top, n as u64 - 1),
        None => BigUint::zero(),
    }
}

pub fn r_prob(spec: &MeasureSpec, p: &Permutation) -> Result<Rational> {
    if spec.family != Family::R {
        return Err(Error::Parse("r_prob needs a measure from the R family".into()));
    }
    check_size(spec, p)?;
    let num = r_weight(spec.k, spec.n, descent_count(p));
    Ok(rat_from_uints(&num, &pow_u64(spec.k, spec.n as u64)))
}

pub fn c_prob(spec: &MeasureSpec, p: &Permutation) -> Result<Rational> {
    if spec.family != Family::C {
        return Err(Error::Parse("c_prob needs a measure from the C family".into()));
    }
    check_size(spec, p)?;
    let c = cyclic_descent_count(p)?;
    let num = c_weight(spec.k, spec.n, c);
    let den = pow_u64(spec.k, spec.n as u64 - 1) * BigUint::from(spec.n);
    Ok(rat_from_uints(&num, &den))
}

/// Law of d under R_{k,n}: mass A(n, r+1)·C(n+k−r−1, n)/k^n at r.
pub fn d_pmf_r(k: u64, n: usize) -> Result<ExactPmf> {
    check_k(k)?;
    if n == 0 {
        return Err(Error::out_of_range("n", 0, ">= 1"));
    }
    Ok(d_pmf_r_from_row(k, &eulerian_row(n)))
}

/// [`d_pmf_r`] given Eulerian row n (length n).
pub fn d_pmf_r_from_row(k: u64, row_n: &[BigUint]) -> ExactPmf {
    let n = row_n.len();
    let den = pow_u64(k, n as u64);
    let top = (n as u64).min(k) as usize;
    let pairs = (0..top).map(|r| {
        let num = &row_n[r] * r_weight(k, n, r);
        (r as u64, rat_from_uints(&num, &den))
    });
    ExactPmf::from_pairs(pairs).expect("R_{k,n} is a probability measure")
}

/// Law of c under C_{k,n}: mass A(n−1, i)·C(n+k−i−1, n−1)/k^{n−1} at i.
pub fn c_pmf_c(k: u64, n: usize) -> Result<ExactPmf> {
    check_k(k)?;
    if n < 2 {
        return Err(Error::CyclicUndefined(n));
    }
    Ok(c_pmf_c_from_row(k, &eulerian_row(n - 1)))
}

/// [`c_pmf_c`] given Eulerian row n−1 (length n−1).
pub fn c_pmf_c_from_row(k: u64, row_n_minus_1: &[BigUint]) -> ExactPmf {
    let n = row_n_minus_1.len() + 1;
    let den = pow_u64(k, n as u64 - 1);
    let top = ((n - 1) as u64).min(k) as usize;
    let pairs = (1..=top).map(|i| {
        let num = &row_n_minus_1[i - 1] * c_weight(k, n, i);
        (i as u64, rat_from_uints(&num, &den))
    });
    ExactPmf::from_pairs(pairs).expect("C_{k,n} is a probability measure")
}

/// Law of d under C_{k,n}, via
/// P(d=l) = P(c=l)·(n−l)/n + P(c=l+1)·(l+1)/n.
pub fn d_pmf_c(k: u64, n: usize) -> Result<ExactPmf> {
    Ok(d_from_cyclic(&c_pmf_c(k, n)?, n))
}

/// Applies the rotation transfer identity to a law of c on S_n.
pub fn d_from_cyclic(c_pmf: &ExactPmf, n: usize) -> ExactPmf {
    let n_big = BigInt::from(n as u64);
    let top = c_pmf.support().last().copied().unwrap_or(0);
    let pairs = (0..=top).map(|l| {
        let stay = c_pmf.prob(l) * Rational::new(BigInt::from(n as u64 - l.min(n as u64)), n_big.clone());
        let drop = c_pmf.prob(l + 1) * Rational::new(BigInt::from(l + 1), n_big.clone());
        (l, stay + drop)
    });
    ExactPmf::from_pairs(pairs).expect("transfer identity preserves total mass")
}

/// Checks P_{R_{k,n}}(d=r) = P_{C_{k,n+1}}(c=r+1) for every r and returns
/// the common law (indexed by r).
pub fn transfer_r_to_c(k: u64, n: usize) -> Result<ExactPmf> {
    check_k(k)?;
    if n == 0 {
        return Err(Error::out_of_range("n", 0, ">= 1"));
    }
    let row = eulerian_row(n);
    let r_side = d_pmf_r_from_row(k, &row);
    let c_side = c_pmf_c_from_row(k, &row);
    compare_shifted(k, n, &r_side, &c_side)?;
    Ok(r_side)
}

pub(crate) fn compare_shifted(k: u64, n: usize, r_side: &ExactPmf, c_side: &ExactPmf) -> Result<()> {
    if c_side.prob(0) != Rational::zero() {
        return Err(Error::Inconsistent(format!("k={k} n={n}: c = 0 has mass")));
    }
    let top = r_side
        .support()
        .last()
        .copied()
        .max(c_side.support().last().copied())
        .unwrap_or(0);
    for r in 0..=top {
        let lhs = r_side.prob(r);
        let rhs = c_side.prob(r + 1);
        if lhs != rhs {
            return Err(Error::Inconsistent(format!(
                "k={k} n={n} r={r}: P_R(d=r) = {} but P_C(c=r+1) = {}",
                render(&lhs),
                render(&rhs)
            )));
        }
    }
    Ok(())
}

/// Σ_l |P_C(d=l) − P_C(c=l)| together with the bound 2k/n.
pub fn transfer_l1(k: u64, n: usize) -> Result<(Rational, Rational)> {
    let c = c_pmf_c(k, n)?;
    let d = d_from_cyclic(&c, n);
    Ok((
        d.l1_distance(&c),
        rat(2 * k as i64, n as i64),
    ))
}

/// Which shuffle the parsimony distance counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// Plain riffle shuffles; distance ⌈log₂(d+1)⌉.
    Riffle,
    /// A cut followed by a riffle; distance ⌈log₂ c⌉.
    CutRiffle,
}

impl FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "riffle" => Ok(Flavor::Riffle),
            "cut_riffle" | "cut-riffle" => Ok(Flavor::CutRiffle),
            _ => Err(Error::Parse(format!(
                "unknown flavor {s:?} (expected riffle or cut_riffle)"
            ))),
        }
    }
}

/// Minimum number of shuffles reaching a permutation with statistic `stat`
/// (d for riffle, c for cut-then-riffle).
pub fn parsimony_distance(stat: u64, flavor: Flavor) -> Result<u32> {
    match flavor {
        Flavor::Riffle => Ok(ceil_log2(stat + 1)),
        Flavor::CutRiffle => {
            if stat == 0 {
                Err(Error::out_of_range("c", 0, ">= 1 for cut_riffle"))
            } else {
                Ok(ceil_log2(stat))
            }
        }
    }
}

/// 2^r as a pile count; r > 62 is rejected.
pub fn piles_for_rounds(r: u32) -> Result<u64> {
    if r > 62 {
        Err(Error::ShuffleCountOverflow(r))
    } else {
        Ok(1u64 << r)
    }
}

/// Exact law of the minimum parsimony distance after `r` shuffles.
pub fn parsimony_pmf(n: usize, r: u32, flavor: Flavor) -> Result<ExactPmf> {
    parsimony_pmf_for_k(n, piles_for_rounds(r)?, flavor)
}

/// As [`parsimony_pmf`] with an explicit pile count k.
pub fn parsimony_pmf_for_k(n: usize, k: u64, flavor: Flavor) -> Result<ExactPmf> {
    let (base, shift) = match flavor {
        Flavor::Riffle => (d_pmf_r(k, n)?, 1),
        Flavor::CutRiffle => (c_pmf_c(k, n)?, 0),
    };
    Ok(base.pushforward(|v| ceil_log2(v + shift) as u64))
}
