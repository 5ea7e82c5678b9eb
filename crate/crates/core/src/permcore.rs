//! Permutations in one-line form, descent statistics, the insertion and
//! rotation moves, Eulerian tables and exhaustive enumeration of S_n.
//!
//! Positions and symbols are 1-based in every public interface: a
//! permutation of n symbols is the sequence π(1) … π(n) over {1..n}.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::factorial;

/// Default largest n that [`enumerate_sn`] accepts.
pub const DEFAULT_ORACLE_CAP: usize = 9;

/// Environment variable that overrides [`DEFAULT_ORACLE_CAP`].
pub const ORACLE_CAP_ENV: &str = "DESCENTS_ORACLE_CAP";

/// A permutation of {1..n} in one-line form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    /// Validates that `mapping` is a bijection on {1..n} with n ≥ 1.
    pub fn new(mapping: Vec<u32>) -> Result<Self> {
        let n = mapping.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty sequence".into()));
        }
        let mut seen = vec![false; n];
        for &v in &mapping {
            let idx = v as usize;
            if idx == 0 || idx > n {
                return Err(Error::InvalidPermutation(format!(
                    "symbol {v} is outside 1..={n}"
                )));
            }
            if std::mem::replace(&mut seen[idx - 1], true) {
                return Err(Error::InvalidPermutation(format!("symbol {v} repeats")));
            }
        }
        Ok(Permutation(mapping))
    }

    pub(crate) fn from_vec_unchecked(mapping: Vec<u32>) -> Self {
        debug_assert!(Permutation::new(mapping.clone()).is_ok());
        Permutation(mapping)
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "S_0 has no permutations in this engine");
        Permutation((1..=n as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    /// π(i) for 1-based `i`.
    pub fn at(&self, i: usize) -> u32 {
        self.0[i - 1]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.len()];
        for (pos, &v) in self.0.iter().enumerate() {
            inv[v as usize - 1] = pos as u32 + 1;
        }
        Permutation(inv)
    }

    /// Whether position n is a cyclic descent, i.e. π(n) > π(1).
    pub fn wraps_down(&self) -> bool {
        self.0[self.0.len() - 1] > self.0[0]
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mapping = s
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad symbol {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(mapping)
    }
}

/// d(π): number of positions 1 ≤ i ≤ n−1 with π(i) > π(i+1).
pub fn descent_count(p: &Permutation) -> usize {
    p.0.windows(2).filter(|w| w[0] > w[1]).count()
}

/// c(π): d(π), plus one when π(n) > π(1). Undefined for n = 1.
pub fn cyclic_descent_count(p: &Permutation) -> Result<usize> {
    if p.len() < 2 {
        return Err(Error::CyclicUndefined(p.len()));
    }
    Ok(descent_count(p) + usize::from(p.wraps_down()))
}

/// Inserts the new largest symbol n+1 after position `j` (0 ≤ j ≤ n).
pub fn insert_symbol(p: &Permutation, j: usize) -> Result<Permutation> {
    let n = p.len();
    if j > n {
        return Err(Error::out_of_range("j", j, format!("0..={n}")));
    }
    let mut v = Vec::with_capacity(n + 1);
    v.extend_from_slice(&p.0[..j]);
    v.push(n as u32 + 1);
    v.extend_from_slice(&p.0[j..]);
    Ok(Permutation(v))
}

/// Rotates the bottom row of the two-line form left by `shift` places, so
/// that π'(i) = π(i + shift) with indices taken cyclically.
pub fn cyclic_rotate(p: &Permutation, shift: usize) -> Result<Permutation> {
    let n = p.len();
    if shift >= n {
        return Err(Error::out_of_range("shift", shift, format!("0..{n}")));
    }
    let mut v = p.0.clone();
    v.rotate_left(shift);
    Ok(Permutation(v))
}

/// The enumeration cap in force: [`ORACLE_CAP_ENV`] if set and valid,
/// otherwise [`DEFAULT_ORACLE_CAP`].
pub fn oracle_cap() -> usize {
    std::env::var(ORACLE_CAP_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_ORACLE_CAP)
}

/// All n! permutations of S_n in lexicographic order.
pub fn enumerate_sn(n: usize) -> Result<SnIter> {
    enumerate_sn_with_cap(n, oracle_cap())
}

pub fn enumerate_sn_with_cap(n: usize, cap: usize) -> Result<SnIter> {
    if n == 0 {
        return Err(Error::out_of_range("n", 0, ">= 1"));
    }
    if n > cap {
        return Err(Error::OracleCap { n, cap });
    }
    Ok(SnIter {
        next: Some((1..=n as u32).collect()),
        lead: None,
    })
}

/// The (n−1)! permutations with π(1) = `lead`; the n blocks partition S_n
/// and can be walked by independent workers.
pub fn enumerate_sn_block(n: usize, lead: u32) -> Result<SnIter> {
    let cap = oracle_cap();
    if n > cap {
        return Err(Error::OracleCap { n, cap });
    }
    if lead == 0 || lead as usize > n {
        return Err(Error::out_of_range("lead", lead, format!("1..={n}")));
    }
    let mut first = vec![lead];
    first.extend((1..=n as u32).filter(|&v| v != lead));
    Ok(SnIter {
        next: Some(first),
        lead: Some(lead),
    })
}

/// Lexicographic permutation stream produced by [`enumerate_sn`].
pub struct SnIter {
    next: Option<Vec<u32>>,
    lead: Option<u32>,
}

impl Iterator for SnIter {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_lexicographic(&mut succ) && self.lead.is_none_or(|l| succ[0] == l) {
            self.next = Some(succ);
        }
        Some(Permutation(current))
    }
}

fn next_lexicographic(v: &mut [u32]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Eulerian triangle: `A(n, k)` counts permutations of n symbols with k−1
/// descents, for 1 ≤ k ≤ n ≤ n_max.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerianTable {
    rows: Vec<Vec<BigUint>>,
}

impl EulerianTable {
    pub fn n_max(&self) -> usize {
        self.rows.len()
    }

    /// Row n as `[A(n,1), …, A(n,n)]`.
    pub fn row(&self, n: usize) -> &[BigUint] {
        &self.rows[n - 1]
    }

    /// A(n, k), zero outside 1 ≤ k ≤ n.
    pub fn get(&self, n: usize, k: usize) -> BigUint {
        if n == 0 || n > self.rows.len() || k == 0 || k > n {
            BigUint::zero()
        } else {
            self.rows[n - 1][k - 1].clone()
        }
    }

    /// One row per line, entries as space-separated decimal integers.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses [`EulerianTable::to_text`] output and re-checks the invariants.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
            let row = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<BigUint>()
                        .map_err(|_| Error::Parse(format!("row {}: bad entry {t:?}", i + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != i + 1 {
                return Err(Error::Parse(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    i + 1
                )));
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse("empty table".into()));
        }
        let table = EulerianTable { rows };
        table.check()?;
        Ok(table)
    }

    /// Row sums, symmetry and unit boundary entries.
    pub fn check(&self) -> Result<()> {
        for (idx, row) in self.rows.iter().enumerate() {
            let n = idx + 1;
            let sum: BigUint = row.iter().sum();
            if sum != factorial(n as u64) {
                return Err(Error::Inconsistent(format!("row {n} does not sum to {n}!")));
            }
            if !row[0].is_one() || !row[n - 1].is_one() {
                return Err(Error::Inconsistent(format!("row {n} boundary entries")));
            }
            if (0..n).any(|k| row[k] != row[n - 1 - k]) {
                return Err(Error::Inconsistent(format!("row {n} is not symmetric")));
            }
        }
        Ok(())
    }
}

/// Builds the triangle with A(n,k) = k·A(n−1,k) + (n−k+1)·A(n−1,k−1).
pub fn eulerian_table(n_max: usize) -> Result<EulerianTable> {
    if n_max == 0 {
        return Err(Error::out_of_range("n_max", 0, ">= 1"));
    }
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n_max);
    rows.push(vec![BigUint::one()]);
    for n in 2..=n_max {
        let next = next_eulerian_row(&rows[n - 2]);
        rows.push(next);
    }
    Ok(EulerianTable { rows })
}

/// Row n of the Eulerian triangle without keeping earlier rows.
pub fn eulerian_row(n: usize) -> Vec<BigUint> {
    assert!(n >= 1, "Eulerian rows start at n = 1");
    let mut row = vec![BigUint::one()];
    for _ in 2..=n {
        row = next_eulerian_row(&row);
    }
    row
}

fn next_eulerian_row(prev: &[BigUint]) -> Vec<BigUint> {
    let n = prev.len() + 1;
    (1..=n)
        .map(|k| {
            let mut v = BigUint::zero();
            if k < n {
                v += &prev[k - 1] * BigUint::from(k);
            }
            if k >= 2 {
                v += &prev[k - 2] * BigUint::from(n - k + 1);
            }
            v
        })
        .collect()
}

/// Frequencies of the cyclic-descent statistic on S_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicDescentCounts {
    n: usize,
    /// `counts[i-1]` is the number of π with c(π) = i, for i in 1..=n.
    counts: Vec<BigUint>,
}

impl CyclicDescentCounts {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of π ∈ S_n with c(π) = i; zero outside 1..=n−1.
    pub fn get(&self, i: usize) -> BigUint {
        if i == 0 || i > self.n {
            BigUint::zero()
        } else {
            self.counts[i - 1].clone()
        }
    }

    /// Counts for i = 1..=n (the entry for i = n is always zero).
    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }
}

/// counts(i) = n·A(n−1, i), from the Eulerian row n−1.
pub fn cyclic_descent_counts(n: usize) -> Result<CyclicDescentCounts> {
    if n < 2 {
        return Err(Error::CyclicUndefined(n));
    }
    Ok(cyclic_counts_from_row(n, &eulerian_row(n - 1)))
}

pub(crate) fn cyclic_counts_from_row(n: usize, row_n_minus_1: &[BigUint]) -> CyclicDescentCounts {
    debug_assert_eq!(row_n_minus_1.len(), n - 1);
    let mut counts: Vec<BigUint> = row_n_minus_1
        .iter()
        .map(|a| a * BigUint::from(n))
        .collect();
    counts.push(BigUint::zero());
    CyclicDescentCounts { n, counts }
}

/// Coefficients of t^0..=t^order in n·(1−t)^n·Σ_{m=0}^{order} m^{n−1} t^m,
/// which should equal the counts of c over S_n (n ≥ 2).
pub fn cyclic_gf_coefficients(n: usize, order: usize) -> Result<Vec<BigInt>> {
    if n < 2 {
        return Err(Error::CyclicUndefined(n));
    }
    // (1−t)^n truncated to the same order
    let mut binom = vec![BigInt::zero(); order + 1];
    let mut c = BigInt::one();
    for (j, slot) in binom.iter_mut().enumerate().take(n.min(order) + 1) {
        *slot = if j % 2 == 0 { c.clone() } else { -c.clone() };
        c = c * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    let powers: Vec<BigInt> = (0..=order)
        .map(|m| num_traits::pow::pow(BigInt::from(m), n - 1))
        .collect();
    Ok((0..=order)
        .map(|i| {
            let s: BigInt = (0..=i).map(|j| &binom[j] * &powers[i - j]).sum();
            s * BigInt::from(n)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(v: &[u32]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn validation() {
        assert!(Permutation::new(vec![]).is_err());
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![1, 3]).is_err());
        assert!("3 1 2".parse::<Permutation>().is_ok());
        assert!("3 x 2".parse::<Permutation>().is_err());
    }

    #[test]
    fn descents() {
        assert_eq!(descent_count(&perm(&[3, 1, 4, 2, 5])), 2);
        assert_eq!(descent_count(&Permutation::identity(7)), 0);
        assert_eq!(descent_count(&perm(&[4, 3, 2, 1])), 3);
    }

    #[test]
    fn cyclic_descents() {
        assert_eq!(cyclic_descent_count(&perm(&[1, 2, 3])).unwrap(), 1);
        assert_eq!(cyclic_descent_count(&perm(&[3, 2, 1])).unwrap(), 2);
        assert_eq!(cyclic_descent_count(&perm(&[2, 3, 1])).unwrap(), 1);
        assert_eq!(
            cyclic_descent_count(&Permutation::identity(1)),
            Err(Error::CyclicUndefined(1))
        );
    }

    #[test]
    fn insertion() {
        let p = perm(&[3, 4, 1, 2]);
        assert_eq!(insert_symbol(&p, 2).unwrap(), perm(&[3, 4, 5, 1, 2]));
        assert_eq!(
            insert_symbol(&Permutation::identity(4), 4).unwrap(),
            Permutation::identity(5)
        );
        assert_eq!(
            insert_symbol(&Permutation::identity(1), 0).unwrap(),
            perm(&[2, 1])
        );
        assert!(insert_symbol(&p, 5).is_err());
    }

    #[test]
    fn rotation() {
        let p = perm(&[6, 4, 1, 5, 3, 2, 7]);
        assert_eq!(cyclic_rotate(&p, 3).unwrap(), perm(&[5, 3, 2, 7, 6, 4, 1]));
        assert_eq!(cyclic_rotate(&p, 0).unwrap(), p);
        assert_eq!(
            cyclic_rotate(&perm(&[1, 2, 3]), 1).unwrap(),
            perm(&[2, 3, 1])
        );
        assert!(cyclic_rotate(&p, 7).is_err());
    }

    #[test]
    fn enumeration() {
        let all: Vec<_> = enumerate_sn_with_cap(1, 9).unwrap().collect();
        assert_eq!(all, vec![Permutation::identity(1)]);
        let s3: Vec<_> = enumerate_sn_with_cap(3, 9).unwrap().collect();
        assert_eq!(s3.len(), 6);
        let mut hist = [0u32; 3];
        for p in &s3 {
            hist[descent_count(p)] += 1;
        }
        assert_eq!(hist, [1, 4, 1]);
        assert_eq!(enumerate_sn_with_cap(4, 9).unwrap().count(), 24);
        assert_eq!(
            enumerate_sn_with_cap(10, 9).err(),
            Some(Error::OracleCap { n: 10, cap: 9 })
        );
    }

    #[test]
    fn blocks_partition_sn() {
        let whole: Vec<_> = enumerate_sn_with_cap(5, 9).unwrap().collect();
        let mut blocks = Vec::new();
        for lead in 1..=5 {
            let block: Vec<_> = enumerate_sn_block(5, lead).unwrap().collect();
            assert_eq!(block.len(), 24);
            assert!(block.iter().all(|p| p.at(1) == lead));
            blocks.extend(block);
        }
        assert_eq!(blocks, whole);
    }

    #[test]
    fn eulerian_rows() {
        let t = eulerian_table(5).unwrap();
        assert_eq!(t.row(1), big(&[1]).as_slice());
        assert_eq!(t.row(3), big(&[1, 4, 1]).as_slice());
        assert_eq!(t.row(4), big(&[1, 11, 11, 1]).as_slice());
        assert_eq!(t.row(5), big(&[1, 26, 66, 26, 1]).as_slice());
        assert_eq!(eulerian_row(5), t.row(5));
        t.check().unwrap();
        assert_eq!(t.get(4, 0), BigUint::zero());
        assert_eq!(t.get(4, 5), BigUint::zero());
    }

    #[test]
    fn table_text_round_trip() {
        let t = eulerian_table(12).unwrap();
        let text = t.to_text();
        assert!(text.starts_with("1\n1 1\n1 4 1\n"));
        assert_eq!(EulerianTable::from_text(&text).unwrap(), t);
        assert!(EulerianTable::from_text("1\n1 2\n").is_err());
        assert!(EulerianTable::from_text("1\n1\n").is_err());
    }

    #[test]
    fn cyclic_counts_small() {
        assert!(cyclic_descent_counts(1).is_err());
        let c2 = cyclic_descent_counts(2).unwrap();
        assert_eq!(c2.get(1), BigUint::from(2u32));
        assert_eq!(c2.get(2), BigUint::zero());
        let c3 = cyclic_descent_counts(3).unwrap();
        assert_eq!(c3.counts(), big(&[3, 3, 0]).as_slice());
        for n in 2..12 {
            assert_eq!(
                cyclic_descent_counts(n).unwrap().total(),
                factorial(n as u64)
            );
        }
    }

    #[test]
    fn inverse_round_trip() {
        let p = perm(&[3, 1, 4, 2, 5]);
        assert_eq!(p.inverse(), perm(&[2, 4, 1, 3, 5]));
        assert_eq!(p.inverse().inverse(), p);
    }
}
