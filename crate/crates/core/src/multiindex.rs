//! Multi-indices `k = (k_1, ..., k_m)` and the graded index tables that
//! address coefficients of truncated series, polynomials and derivative
//! systems.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A tuple of nonnegative integers.
///
/// `Ord` is the graded-lexicographic order used for every enumeration in the
/// crate (total degree first, then `x_1 > x_2 > ...`). The componentwise
/// partial order is [`MultiIndex::le`].
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(m: usize) -> Self {
        MultiIndex(vec![0; m])
    }

    /// The unit multi-index `e_i` of length `m`.
    pub fn unit(m: usize, i: usize) -> Self {
        let mut v = vec![0; m];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `|k|`
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    /// Componentwise `self <= other`. Lengths must agree.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiIndex) -> Result<MultiIndex> {
        self.check_len(other)?;
        Ok(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    /// `self - other`, defined when `other <= self`.
    pub fn sub(&self, other: &MultiIndex) -> Result<MultiIndex> {
        self.check_len(other)?;
        if !other.le(self) {
            return Err(Error::domain(format!(
                "{other:?} is not componentwise below {self:?}"
            )));
        }
        Ok(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// `k!` as the product of coordinate factorials.
    pub fn factorial(&self) -> u128 {
        self.0.iter().map(|&k| factorial(k)).product()
    }

    /// Multi-index binomial `binom(self, l)`, exact.
    pub fn binomial(&self, l: &MultiIndex) -> Result<u128> {
        self.check_len(l)?;
        if !l.le(self) {
            return Err(Error::domain(format!(
                "binomial({self:?}, {l:?}) needs l <= k"
            )));
        }
        Ok(self
            .0
            .iter()
            .zip(&l.0)
            .map(|(&n, &k)| binomial(n, k))
            .product())
    }

    /// All `l` with `l <= self`, in graded-lex order.
    pub fn lower_set(&self) -> Vec<MultiIndex> {
        let mut out = vec![Vec::with_capacity(self.len())];
        for &k in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=k).map(move |j| {
                        let mut p = prefix.clone();
                        p.push(j);
                        p
                    })
                })
                .collect();
        }
        let mut res: Vec<MultiIndex> = out.into_iter().map(MultiIndex).collect();
        res.sort();
        res
    }

    fn check_len(&self, other: &MultiIndex) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::usage(format!(
                "multi-index length mismatch: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then(self.degree().cmp(&other.degree()))
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        if self.0.len() == 1 {
            write!(f, ",")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(v: [u32; N]) -> Self {
        MultiIndex(v.to_vec())
    }
}

pub fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

/// `C(n, k)` by the multiplicative formula; every partial product is exact.
pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut r = 1u128;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// All multi-indices of length `m` with `|k| <= n`, graded-lex order.
pub fn enumerate(m: usize, n: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for d in 0..=n {
        compositions(m, d, &mut Vec::with_capacity(m), &mut out);
    }
    out
}

// Compositions of d into m parts, first coordinate descending.
fn compositions(m: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if prefix.len() + 1 == m {
        prefix.push(d);
        out.push(MultiIndex(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in (0..=d).rev() {
        prefix.push(first);
        compositions(m, d - first, prefix, out);
        prefix.pop();
    }
}

/// The set `{k in N^m : |k| <= n}` with a position lookup.
#[derive(Clone, Debug)]
pub struct IndexTable {
    m: usize,
    order: u32,
    list: Vec<MultiIndex>,
    pos: HashMap<MultiIndex, usize>,
}

impl IndexTable {
    pub fn new(m: usize, order: u32) -> Self {
        let list = enumerate(m, order);
        let pos = list.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        IndexTable {
            m,
            order,
            list,
            pos,
        }
    }

    pub fn vars(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn get(&self, i: usize) -> &MultiIndex {
        &self.list[i]
    }

    pub fn position(&self, k: &MultiIndex) -> Option<usize> {
        self.pos.get(k).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &MultiIndex> {
        self.list.iter()
    }
}
