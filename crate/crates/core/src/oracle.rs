//! Brute-force references computed by walking every permutation of S_n.
//!
//! Nothing here touches Eulerian tables or transfer identities: each law is
//! the pushforward of the measure's defining per-permutation weight.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::Result;
use crate::exact::{pow_u64, rat_from_uints, Rational};
use crate::measures::{c_weight, r_weight};
use crate::permcore::{cyclic_descent_count, descent_count, enumerate_sn_block, Permutation};
use crate::pmf::ExactPmf;

/// d, c and the wrap indicator for every permutation of S_n.
#[derive(Clone, Debug)]
pub struct SnCensus {
    n: usize,
    perms: Vec<Permutation>,
    stats: Vec<(u32, u32)>,
}

impl SnCensus {
    /// Enumerates S_n (subject to the oracle cap), in parallel blocks keyed
    /// by π(1) and merged in block order.
    pub fn new(n: usize) -> Result<Self> {
        let blocks = (1..=n as u32)
            .map(|lead| enumerate_sn_block(n, lead))
            .collect::<Result<Vec<_>>>()?;
        let chunks: Vec<Vec<(Permutation, (u32, u32))>> = blocks
            .into_par_iter()
            .map(|it| {
                it.map(|p| {
                    let d = descent_count(&p) as u32;
                    let c = if n >= 2 {
                        cyclic_descent_count(&p).expect("n >= 2") as u32
                    } else {
                        0
                    };
                    (p, (d, c))
                })
                .collect()
            })
            .collect();
        let (perms, stats) = chunks.into_iter().flatten().unzip();
        Ok(SnCensus { n, perms, stats })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    /// (d, c) per permutation, parallel to [`SnCensus::perms`]; c is 0 when n = 1.
    pub fn stats(&self) -> &[(u32, u32)] {
        &self.stats
    }

    /// Histogram of d over S_n.
    pub fn descent_histogram(&self) -> Vec<BigUint> {
        let mut h = vec![BigUint::zero(); self.n];
        for &(d, _) in &self.stats {
            h[d as usize] += 1u32;
        }
        h
    }

    /// Histogram of c over S_n, indexed so that entry i−1 counts c = i.
    pub fn cyclic_histogram(&self) -> Vec<BigUint> {
        let mut h = vec![BigUint::zero(); self.n];
        for &(_, c) in &self.stats {
            h[c as usize - 1] += 1u32;
        }
        h
    }

    /// Counts of c = 0..=order over S_n as signed integers, for comparison
    /// with [`crate::permcore::cyclic_gf_coefficients`].
    pub fn cyclic_series(&self, order: usize) -> Vec<num_bigint::BigInt> {
        let mut out = vec![num_bigint::BigInt::zero(); order + 1];
        for &(_, c) in &self.stats {
            if (c as usize) <= order {
                out[c as usize] += 1;
            }
        }
        out
    }

    /// R_{k,n}(π) for every permutation.
    pub fn r_probs(&self, k: u64) -> Vec<Rational> {
        let den = pow_u64(k, self.n as u64);
        let mut cache = BTreeMap::new();
        self.stats
            .iter()
            .map(|&(d, _)| {
                cache
                    .entry(d)
                    .or_insert_with(|| rat_from_uints(&r_weight(k, self.n, d as usize), &den))
                    .clone()
            })
            .collect()
    }

    /// C_{k,n}(π) for every permutation.
    pub fn c_probs(&self, k: u64) -> Vec<Rational> {
        let den = pow_u64(k, self.n as u64 - 1) * BigUint::from(self.n);
        let mut cache = BTreeMap::new();
        self.stats
            .iter()
            .map(|&(_, c)| {
                cache
                    .entry(c)
                    .or_insert_with(|| rat_from_uints(&c_weight(k, self.n, c as usize), &den))
                    .clone()
            })
            .collect()
    }

    /// Pushforward of R_{k,n} through d.
    pub fn d_pmf_r(&self, k: u64) -> ExactPmf {
        let den = pow_u64(k, self.n as u64);
        self.pushforward(&den, |&(d, _)| (d as u64, r_weight(k, self.n, d as usize)))
    }

    /// Pushforward of C_{k,n} through c.
    pub fn c_pmf_c(&self, k: u64) -> ExactPmf {
        let den = pow_u64(k, self.n as u64 - 1) * BigUint::from(self.n);
        self.pushforward(&den, |&(_, c)| (c as u64, c_weight(k, self.n, c as usize)))
    }

    /// Pushforward of C_{k,n} through d.
    pub fn d_pmf_c(&self, k: u64) -> ExactPmf {
        let den = pow_u64(k, self.n as u64 - 1) * BigUint::from(self.n);
        self.pushforward(&den, |&(d, c)| (d as u64, c_weight(k, self.n, c as usize)))
    }

    /// E_C[f(d, c)] under C_{k,n} for an integer-valued f.
    pub fn c_expectation(&self, k: u64, f: impl Fn(u32, u32) -> i64) -> Rational {
        let den = pow_u64(k, self.n as u64 - 1) * BigUint::from(self.n);
        let mut num = num_bigint::BigInt::zero();
        let mut cache: BTreeMap<u32, BigUint> = BTreeMap::new();
        for &(d, c) in &self.stats {
            let w = cache
                .entry(c)
                .or_insert_with(|| c_weight(k, self.n, c as usize));
            num += num_bigint::BigInt::from(w.clone()) * f(d, c);
        }
        Rational::new(num, den.into())
    }

    fn pushforward(
        &self,
        den: &BigUint,
        weight: impl Fn(&(u32, u32)) -> (u64, BigUint),
    ) -> ExactPmf {
        let mut sums: BTreeMap<u64, BigUint> = BTreeMap::new();
        for s in &self.stats {
            let (v, w) = weight(s);
            *sums.entry(v).or_insert_with(BigUint::zero) += w;
        }
        ExactPmf::from_pairs(sums.into_iter().map(|(v, num)| (v, rat_from_uints(&num, den))))
            .expect("brute-force pushforward of a probability measure")
    }
}
