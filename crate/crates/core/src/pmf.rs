use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::exact::{fmt_g17, parse_rational, rat_int, render, to_f64, Rational};

/// Exact probability mass function on nonnegative integers.
///
/// Support values are distinct, sorted, carry nonzero mass, and the masses
/// sum to exactly one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPmf {
    support: Vec<u64>,
    mass: Vec<Rational>,
}

impl ExactPmf {
    /// Merges duplicate values, drops zero masses and checks normalization.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, Rational)>) -> Result<Self> {
        let mut acc: BTreeMap<u64, Rational> = BTreeMap::new();
        for (v, m) in pairs {
            if m < Rational::zero() {
                return Err(Error::Inconsistent(format!(
                    "negative mass {} at {v}",
                    render(&m)
                )));
            }
            *acc.entry(v).or_insert_with(Rational::zero) += m;
        }
        acc.retain(|_, m| !m.is_zero());
        let total: Rational = acc.values().sum();
        if !total.is_one() {
            return Err(Error::NotNormalized(render(&total)));
        }
        let (support, mass) = acc.into_iter().unzip();
        Ok(ExactPmf { support, mass })
    }

    pub fn point_mass(value: u64) -> Self {
        ExactPmf {
            support: vec![value],
            mass: vec![Rational::one()],
        }
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn masses(&self) -> &[Rational] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Rational)> + '_ {
        self.support.iter().copied().zip(self.mass.iter())
    }

    /// Exact mass at `value`; zero off the support.
    pub fn prob(&self, value: u64) -> Rational {
        match self.support.binary_search(&value) {
            Ok(i) => self.mass[i].clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn pushforward(&self, f: impl Fn(u64) -> u64) -> ExactPmf {
        ExactPmf::from_pairs(self.iter().map(|(v, m)| (f(v), m.clone())))
            .expect("pushforward of a normalized pmf stays normalized")
    }

    /// E[X^p].
    pub fn moment(&self, p: u32) -> Rational {
        self.iter()
            .map(|(v, m)| m * rat_int(num_traits::pow::pow(num_bigint::BigInt::from(v), p as usize)))
            .sum()
    }

    pub fn mean(&self) -> Rational {
        self.moment(1)
    }

    pub fn variance(&self) -> Rational {
        let mu = self.mean();
        self.moment(2) - &mu * &mu
    }

    /// Σ_v |p(v) − q(v)|.
    pub fn l1_distance(&self, other: &ExactPmf) -> Rational {
        let mut keys: Vec<u64> = self.support.iter().chain(&other.support).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .map(|v| {
                let d = self.prob(v) - other.prob(v);
                if d < Rational::zero() {
                    -d
                } else {
                    d
                }
            })
            .sum()
    }

    pub fn float_masses(&self) -> Vec<f64> {
        self.mass.iter().map(to_f64).collect()
    }

    /// `{"value": "num/den", …}` with values in ascending order.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (v, m) in self.iter() {
            map.insert(v.to_string(), Value::String(render(m)));
        }
        Value::Object(map)
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Parse("pmf JSON must be an object".into()))?;
        let pairs = obj
            .iter()
            .map(|(k, v)| {
                let key = k
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad support value {k:?}")))?;
                let mass = v
                    .as_str()
                    .and_then(parse_rational)
                    .ok_or_else(|| Error::Parse(format!("bad mass for {k}")))?;
                Ok((key, mass))
            })
            .collect::<Result<Vec<_>>>()?;
        ExactPmf::from_pairs(pairs)
    }

    /// `value,numerator,denominator,float` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,numerator,denominator,float\n");
        for (v, m) in self.iter() {
            let m = m.reduced();
            out.push_str(&format!(
                "{},{},{},{}\n",
                v,
                m.numer(),
                m.denom(),
                fmt_g17(to_f64(&m))
            ));
        }
        out
    }
}
