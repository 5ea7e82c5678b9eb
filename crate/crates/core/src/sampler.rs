//! Samplers for R_{k,n} (sequential insertion) and C_{k,n} (insertion plus
//! a uniform rotation), a Gilbert–Shannon–Reeds riffle simulator used as an
//! independent cross-check, and chi-square goodness of fit against exact
//! laws.
//!
//! Stream i of a run uses ChaCha8 seeded from the run seed with stream id i,
//! so results depend only on (seed, streams, count).

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::exact::{fmt_g17, rat, rat_int, to_f64, Rational};
use crate::measures::{check_k, parsimony_distance, parsimony_pmf, piles_for_rounds, Family, Flavor};
use crate::permcore::{cyclic_descent_count, descent_count, Permutation};
use crate::pmf::ExactPmf;

/// Parameters of one sampling run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerConfig {
    pub k: u64,
    pub n: usize,
    pub count: u64,
    pub seed: u64,
    pub streams: u32,
}

impl SamplerConfig {
    pub fn new(k: u64, n: usize, count: u64, seed: u64, streams: u32) -> Result<Self> {
        check_k(k)?;
        if n == 0 {
            return Err(Error::out_of_range("n", 0, ">= 1"));
        }
        if count == 0 {
            return Err(Error::out_of_range("count", 0, ">= 1"));
        }
        if streams == 0 {
            return Err(Error::out_of_range("streams", 0, ">= 1"));
        }
        Ok(SamplerConfig {
            k,
            n,
            count,
            seed,
            streams,
        })
    }

    /// Draws assigned to stream i: ⌊count/streams⌋, plus one for the first
    /// count mod streams streams.
    pub fn stream_count(&self, i: u32) -> u64 {
        let s = self.streams as u64;
        self.count / s + u64::from((i as u64) < self.count % s)
    }
}

pub fn stream_rng(seed: u64, stream: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Histogram of `draw` over all streams, merged in stream order.
pub fn parallel_histogram<F>(config: &SamplerConfig, draw: F) -> BTreeMap<u64, u64>
where
    F: Fn(&mut ChaCha8Rng) -> u64 + Sync,
{
    let parts: Vec<BTreeMap<u64, u64>> = (0..config.streams)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(config.seed, i);
            let mut h = BTreeMap::new();
            for _ in 0..config.stream_count(i) {
                *h.entry(draw(&mut rng)).or_insert(0) += 1;
            }
            h
        })
        .collect();
    let mut out = BTreeMap::new();
    for part in parts {
        for (v, c) in part {
            *out.entry(v).or_insert(0) += c;
        }
    }
    out
}

/// Insertion sampler for R_{k,n}, returning the mapping and its descent count.
///
/// At size m with d descents, inserting m+1 after j keeps d when j = m or j
/// is a descent (weight m+k−d each) and raises d by one when j = 0 or j is an
/// ascent (weight k−d−1 each), out of k(m+1). One draw u ∈ [0, k(m+1))
/// picks both the case and the position within it.
fn sample_r_raw<R: Rng + ?Sized>(k: u64, n: usize, rng: &mut R) -> (Vec<u32>, usize) {
    let mut v: Vec<u32> = Vec::with_capacity(n);
    v.push(1);
    let mut d = 0usize;
    let mut keep = Vec::with_capacity(n);
    let mut raise = Vec::with_capacity(n);
    for m in 1..n {
        let k128 = k as u128;
        let stay_w = m as u128 + k128 - d as u128;
        let total = k128 * (m as u128 + 1);
        let u = rng.random_range(0..total);
        let stay_total = (d as u128 + 1) * stay_w;
        keep.clear();
        raise.clear();
        raise.push(0);
        for j in 1..m {
            if v[j - 1] > v[j] {
                keep.push(j);
            } else {
                raise.push(j);
            }
        }
        keep.push(m);
        let j = if u < stay_total {
            keep[(u / stay_w) as usize]
        } else {
            let up_w = k128 - d as u128 - 1;
            d += 1;
            raise[((u - stay_total) / up_w) as usize]
        };
        v.insert(j, m as u32 + 1);
    }
    (v, d)
}

pub fn sample_r<R: Rng + ?Sized>(k: u64, n: usize, rng: &mut R) -> Result<Permutation> {
    check_k(k)?;
    if n == 0 {
        return Err(Error::out_of_range("n", 0, ">= 1"));
    }
    Ok(Permutation::from_vec_unchecked(sample_r_raw(k, n, rng).0))
}

/// [`sample_r`] followed by a uniform cyclic rotation.
pub fn sample_c<R: Rng + ?Sized>(k: u64, n: usize, rng: &mut R) -> Result<Permutation> {
    check_k(k)?;
    if n < 2 {
        return Err(Error::CyclicUndefined(n));
    }
    let (mut v, _) = sample_r_raw(k, n, rng);
    let shift = rng.random_range(0..n);
    v.rotate_left(shift);
    Ok(Permutation::from_vec_unchecked(v))
}

/// Binomial(n, 1/2) from n fair coin flips.
pub fn cut_size<R: Rng + ?Sized>(n: usize, rng: &mut R) -> usize {
    let mut left = n;
    let mut heads = 0usize;
    while left >= 64 {
        heads += rng.next_u64().count_ones() as usize;
        left -= 64;
    }
    if left > 0 {
        heads += (rng.next_u64() & ((1u64 << left) - 1)).count_ones() as usize;
    }
    heads
}

/// One GSR riffle of the deck `p` (listed top to bottom): binomial cut, then
/// cards drop from each packet with probability proportional to its size.
pub fn gsr_shuffle<R: Rng + ?Sized>(p: &Permutation, rng: &mut R) -> Permutation {
    let deck = p.as_slice();
    let n = deck.len();
    let cut = cut_size(n, rng);
    let (mut a, mut b) = (0usize, cut);
    let mut out = Vec::with_capacity(n);
    while a < cut || b < n {
        let left = (cut - a) as u64;
        let right = (n - b) as u64;
        if rng.random_range(0..left + right) < left {
            out.push(deck[a]);
            a += 1;
        } else {
            out.push(deck[b]);
            b += 1;
        }
    }
    Permutation::from_vec_unchecked(out)
}

/// r GSR riffles applied to the ordered deck.
pub fn gsr_iterate<R: Rng + ?Sized>(n: usize, r: u32, rng: &mut R) -> Permutation {
    let mut deck = Permutation::identity(n);
    for _ in 0..r {
        deck = gsr_shuffle(&deck, rng);
    }
    deck
}

/// Descent count of the inverse of an r-riffle arrangement; distributed as d
/// under R_{2^r, n}.
pub fn gsr_inverse_descents<R: Rng + ?Sized>(n: usize, r: u32, rng: &mut R) -> u64 {
    descent_count(&gsr_iterate(n, r, rng).inverse()) as u64
}

/// Statistic recorded by [`sample_histogram`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleStatistic {
    D,
    C,
    /// ⌈log₂(d+1)⌉ under R, ⌈log₂ c⌉ under C.
    Parsimony,
}

impl std::str::FromStr for SampleStatistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "d" => Ok(SampleStatistic::D),
            "c" => Ok(SampleStatistic::C),
            "parsimony" => Ok(SampleStatistic::Parsimony),
            other => Err(Error::Parse(format!(
                "unknown statistic {other:?} (expected d, c or parsimony)"
            ))),
        }
    }
}

/// Exact law matching a (measure, statistic) pair.
pub fn exact_law(family: Family, stat: SampleStatistic, k: u64, n: usize) -> Result<ExactPmf> {
    use crate::measures::{c_pmf_c, d_pmf_c, d_pmf_r, parsimony_pmf_for_k};
    match (family, stat) {
        (Family::R, SampleStatistic::D) => d_pmf_r(k, n),
        (Family::R, SampleStatistic::C) => Err(Error::Parse(
            "the c statistic is only tabulated under C".into(),
        )),
        (Family::R, SampleStatistic::Parsimony) => parsimony_pmf_for_k(n, k, Flavor::Riffle),
        (Family::C, SampleStatistic::D) => d_pmf_c(k, n),
        (Family::C, SampleStatistic::C) => c_pmf_c(k, n),
        (Family::C, SampleStatistic::Parsimony) => parsimony_pmf_for_k(n, k, Flavor::CutRiffle),
    }
}

/// Histogram of `stat` over `config.count` draws from `family`.
pub fn sample_histogram(
    config: &SamplerConfig,
    family: Family,
    stat: SampleStatistic,
) -> Result<BTreeMap<u64, u64>> {
    let (k, n) = (config.k, config.n);
    if family == Family::C && n < 2 {
        return Err(Error::CyclicUndefined(n));
    }
    if family == Family::R && stat == SampleStatistic::C {
        return Err(Error::Parse("the c statistic is only tabulated under C".into()));
    }
    Ok(parallel_histogram(config, |rng| {
        let (mut v, d) = sample_r_raw(k, n, rng);
        match family {
            Family::R => match stat {
                SampleStatistic::Parsimony => {
                    parsimony_distance(d as u64, Flavor::Riffle).expect("riffle distance") as u64
                }
                _ => d as u64,
            },
            Family::C => {
                let shift = rng.random_range(0..n);
                v.rotate_left(shift);
                let p = Permutation::from_vec_unchecked(v);
                match stat {
                    SampleStatistic::D => descent_count(&p) as u64,
                    SampleStatistic::C => cyclic_descent_count(&p).expect("n >= 2") as u64,
                    SampleStatistic::Parsimony => {
                        let c = cyclic_descent_count(&p).expect("n >= 2") as u64;
                        parsimony_distance(c, Flavor::CutRiffle).expect("c >= 1") as u64
                    }
                }
            }
        }
    }))
}

/// Histogram of d(π^{−1}) over r-fold GSR riffles; `config.k` is ignored.
pub fn riffle_histogram(config: &SamplerConfig, rounds: u32) -> BTreeMap<u64, u64> {
    let n = config.n;
    parallel_histogram(config, |rng| gsr_inverse_descents(n, rounds, rng))
}

/// Chi-square test result.
#[derive(Clone, Debug, PartialEq)]
pub struct GoodnessOfFit {
    pub chi_square: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Largest |z| over the unmerged support, z = (obs − Np)/√(Np(1−p)).
    pub max_bin_z: f64,
    /// Merged bins as (first value, last value, observed, expected).
    pub bins: Vec<(u64, u64, u64, f64)>,
}

/// Minimum expected count per bin after merging.
pub const MIN_EXPECTED: f64 = 5.0;

/// Pearson chi-square of `histogram` against `exact`.
///
/// Bins run over the exact support in increasing order. Adjacent bins are
/// merged left to right until each holds at least 5 expected draws; a short
/// final bin is folded into its neighbour. Observations off the support give
/// an infinite statistic and p = 0.
pub fn goodness_of_fit(histogram: &BTreeMap<u64, u64>, exact: &ExactPmf) -> Result<GoodnessOfFit> {
    let count: u64 = histogram.values().sum();
    if (count as f64) < MIN_EXPECTED {
        return Err(Error::UndersizedSample(format!(
            "{count} draws; need at least {MIN_EXPECTED}"
        )));
    }
    let nf = count as f64;
    let off_support = histogram
        .iter()
        .any(|(v, &c)| c > 0 && exact.prob(*v).is_zero());

    let mut max_z = 0.0f64;
    for (v, p) in exact.iter() {
        let p = to_f64(p);
        let obs = histogram.get(&v).copied().unwrap_or(0) as f64;
        let sd = (nf * p * (1.0 - p)).sqrt();
        let z = if sd > 0.0 {
            (obs - nf * p) / sd
        } else if (obs - nf * p).abs() < 0.5 {
            0.0
        } else {
            f64::INFINITY
        };
        max_z = max_z.max(z.abs());
    }

    let mut bins: Vec<(u64, u64, u64, f64)> = Vec::new();
    let mut open: Option<(u64, u64, u64, f64)> = None;
    for (v, p) in exact.iter() {
        let obs = histogram.get(&v).copied().unwrap_or(0);
        let exp = nf * to_f64(p);
        let cur = match open.take() {
            Some((lo, _, o, e)) => (lo, v, o + obs, e + exp),
            None => (v, v, obs, exp),
        };
        if cur.3 >= MIN_EXPECTED {
            bins.push(cur);
        } else {
            open = Some(cur);
        }
    }
    if let Some(rest) = open {
        match bins.last_mut() {
            Some(last) => {
                last.1 = rest.1;
                last.2 += rest.2;
                last.3 += rest.3;
            }
            None => bins.push(rest),
        }
    }

    if off_support {
        return Ok(GoodnessOfFit {
            chi_square: f64::INFINITY,
            dof: bins.len().saturating_sub(1),
            p_value: 0.0,
            max_bin_z: f64::INFINITY,
            bins,
        });
    }
    let chi_square: f64 = bins
        .iter()
        .map(|&(_, _, o, e)| {
            let diff = o as f64 - e;
            diff * diff / e
        })
        .sum();
    let dof = bins.len() - 1;
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64)
            .map_err(|e| Error::Inconsistent(e.to_string()))?
            .sf(chi_square)
    };
    Ok(GoodnessOfFit {
        chi_square,
        dof,
        p_value,
        max_bin_z: max_z,
        bins,
    })
}

/// One line of a summary table.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub value: u64,
    pub count: u64,
    pub empirical: f64,
    pub exact: Rational,
    pub z: f64,
}

/// Empirical law of a run next to the exact law.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSummary {
    pub count: u64,
    pub histogram: BTreeMap<u64, u64>,
    pub rows: Vec<SummaryRow>,
    pub fit: GoodnessOfFit,
}

impl SampleSummary {
    pub const CSV_HEADER: &'static str = "value,count,empirical,exact_num,exact_den,z";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let e = r.exact.reduced();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.value,
                r.count,
                fmt_g17(r.empirical),
                e.numer(),
                e.denom(),
                fmt_g17(r.z)
            ));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let e = r.exact.reduced();
                json!({
                    "value": r.value,
                    "count": r.count,
                    "empirical": fmt_g17(r.empirical),
                    "exact_num": e.numer().to_string(),
                    "exact_den": e.denom().to_string(),
                    "z": fmt_g17(r.z),
                })
            })
            .collect();
        json!({
            "count": self.count,
            "rows": rows,
            "chi_square": fmt_g17(self.fit.chi_square),
            "dof": self.fit.dof,
            "p_value": fmt_g17(self.fit.p_value),
            "max_bin_z": fmt_g17(self.fit.max_bin_z),
        })
    }
}

pub fn summarize(histogram: BTreeMap<u64, u64>, exact: &ExactPmf) -> Result<SampleSummary> {
    let fit = goodness_of_fit(&histogram, exact)?;
    let count: u64 = histogram.values().sum();
    let nf = count as f64;
    let mut values: Vec<u64> = exact.support().to_vec();
    values.extend(histogram.keys().copied());
    values.sort_unstable();
    values.dedup();
    let rows = values
        .into_iter()
        .map(|v| {
            let c = histogram.get(&v).copied().unwrap_or(0);
            let exact_p = exact.prob(v);
            let p = to_f64(&exact_p);
            let sd = (nf * p * (1.0 - p)).sqrt();
            let z = if sd > 0.0 {
                (c as f64 - nf * p) / sd
            } else if c as f64 == nf * p {
                0.0
            } else {
                f64::INFINITY
            };
            SummaryRow {
                value: v,
                count: c,
                empirical: c as f64 / nf,
                exact: exact_p,
                z,
            }
        })
        .collect();
    Ok(SampleSummary {
        count,
        histogram,
        rows,
        fit,
    })
}

/// Samples the parsimony distance after r shuffles of the given flavor and
/// compares it with the exact pushforward.
pub fn sample_parsimony(
    n: usize,
    r: u32,
    flavor: Flavor,
    count: u64,
    seed: u64,
    streams: u32,
) -> Result<SampleSummary> {
    let k = piles_for_rounds(r)?;
    let config = SamplerConfig::new(k, n, count, seed, streams)?;
    let family = match flavor {
        Flavor::Riffle => Family::R,
        Flavor::CutRiffle => Family::C,
    };
    let hist = sample_histogram(&config, family, SampleStatistic::Parsimony)?;
    summarize(hist, &parsimony_pmf(n, r, flavor)?)
}

/// Draws from an exact pmf by inverse CDF: a 128-bit uniform u/2^128 is
/// compared with the exact cumulative masses.
pub fn sample_from_pmf<R: Rng + ?Sized>(pmf: &ExactPmf, rng: &mut R) -> u64 {
    let u = rat_int(BigInt::from(rng.random::<u128>()))
        / rat_int(BigInt::from(BigUint::one() << 128u32));
    let mut acc = Rational::zero();
    for (v, m) in pmf.iter() {
        acc += m;
        if u < acc {
            return v;
        }
    }
    *pmf.support().last().expect("nonempty pmf")
}

/// Probabilities of one case-1 and one case-2 insertion at size m with d
/// descents.
pub fn case_weights(k: u64, m: usize, d: usize) -> (Rational, Rational) {
    let den = rat_int(k) * rat_int(m as u64 + 1);
    let stay = (rat_int(m as u64) + rat_int(k) - rat_int(d as u64)) / &den;
    let up = (rat_int(k) - rat_int(d as u64 + 1)) / &den;
    (stay, up)
}

/// (d+1)·stay + (m−d)·up, which should be exactly 1.
pub fn case_total(k: u64, m: usize, d: usize) -> Rational {
    let (stay, up) = case_weights(k, m, d);
    stay * rat_int(d as u64 + 1) + up * rat_int((m - d) as u64)
}

/// Law of the insertion sampler's output on S_n, by expanding every branch
/// with exact probabilities.
pub fn exact_insertion_distribution(k: u64, n: usize) -> Result<BTreeMap<Permutation, Rational>> {
    check_k(k)?;
    if n == 0 {
        return Err(Error::out_of_range("n", 0, ">= 1"));
    }
    let mut states: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
    states.insert(vec![1], rat(1, 1));
    for m in 1..n {
        let mut next: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (v, w) in &states {
            let d = (1..m).filter(|&j| v[j - 1] > v[j]).count();
            let (stay, up) = case_weights(k, m, d);
            for j in 0..=m {
                let keeps = j == m || (j >= 1 && v[j - 1] > v[j]);
                let p = if keeps { &stay } else { &up };
                if p.is_zero() {
                    continue;
                }
                let mut t = v.clone();
                t.insert(j, m as u32 + 1);
                *next.entry(t).or_insert_with(Rational::zero) += w * p;
            }
        }
        states = next;
    }
    Ok(states
        .into_iter()
        .map(|(v, w)| (Permutation::from_vec_unchecked(v), w))
        .collect())
}
