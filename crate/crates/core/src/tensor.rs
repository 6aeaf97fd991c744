//! Cell indexing and the Walsh–Hadamard engine.
//!
//! Cells of a `2^d` table are numbered so that variable 1 is bit 0 of the
//! index (first index fastest). The same bit patterns index subsets of the
//! variables, so an interaction parameter for subset `b` lives at cell `b`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported number of binary variables (16M cells).
pub const MAX_DIM: usize = 24;

/// Tag written into every serialized table.
pub const ORDER_TAG: &str = "lex-first-fastest";

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_DIM {
        return Err(Error::InvalidDimension { d, max: MAX_DIM });
    }
    Ok(())
}

/// The lexicographic, first-index-fastest enumeration of `{0,1}^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellOrder {
    d: usize,
}

impl CellOrder {
    pub fn new(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(CellOrder { d })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        1 << self.d
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Mask with all `d` bits set; also the index of the all-ones cell.
    pub fn full_mask(&self) -> usize {
        self.len() - 1
    }

    pub fn complement(&self, k: usize) -> usize {
        k ^ self.full_mask()
    }

    /// Level (0 or 1) of variable `v` (1-based) in cell `k`.
    pub fn level(&self, k: usize, v: usize) -> u8 {
        ((k >> (v - 1)) & 1) as u8
    }

    /// Cell index of a binary vector given as levels `a_1..a_d`.
    pub fn index_of(&self, levels: &[u8]) -> Result<usize> {
        if levels.len() != self.d {
            return Err(Error::LengthMismatch { expected: self.d, found: levels.len() });
        }
        let mut k = 0usize;
        for (i, &a) in levels.iter().enumerate() {
            if a > 1 {
                return Err(Error::InvalidArgument(format!("level {a} is not binary")));
            }
            k |= (a as usize) << i;
        }
        Ok(k)
    }

    /// Label of cell `k` as printed in tables, e.g. `"1000"` for `a = (1,0,0,0)`.
    pub fn cell_label(&self, k: usize) -> String {
        (1..=self.d).map(|v| if self.level(k, v) == 1 { '1' } else { '0' }).collect()
    }
}

/// Index of the complement cell `∼a`.
pub fn complement_index(k: usize, d: usize) -> Result<usize> {
    let order = CellOrder::new(d)?;
    if k >= order.len() {
        return Err(Error::InvalidArgument(format!("cell {k} out of range for d = {d}")));
    }
    Ok(order.complement(k))
}

/// A subset of the variables `{1, …, d}`, stored as a bit mask (variable `v` is bit `v-1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(pub usize);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    /// Builds a subset from 1-based variable labels.
    pub fn from_vars(vars: &[usize]) -> Subset {
        Subset(vars.iter().fold(0, |m, &v| m | (1 << (v - 1))))
    }

    /// All variables `1..=d`.
    pub fn full(d: usize) -> Subset {
        Subset((1 << d) - 1)
    }

    pub fn mask(self) -> usize {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_odd(self) -> bool {
        self.len() % 2 == 1
    }

    pub fn contains(self, v: usize) -> bool {
        (self.0 >> (v - 1)) & 1 == 1
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn symmetric_difference(self, other: Subset) -> Subset {
        Subset(self.0 ^ other.0)
    }

    /// 1-based variable labels in increasing order.
    pub fn vars(self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut m = self.0;
        while m != 0 {
            out.push(m.trailing_zeros() as usize + 1);
            m &= m - 1;
        }
        out
    }

    /// Compact key: concatenated labels (`"134"`), `"{}"` for the empty set.
    pub fn key(self) -> String {
        if self.is_empty() {
            return "{}".to_string();
        }
        self.vars().iter().map(|v| v.to_string()).collect()
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

impl FromStr for Subset {
    type Err = Error;

    /// Parses `"{}"`, `""` or a string of digits `1..=9`. Comma-separated labels
    /// (`"1,10,12"`) are accepted for d > 9.
    fn from_str(s: &str) -> Result<Subset> {
        let s = s.trim();
        if s.is_empty() || s == "{}" {
            return Ok(Subset::EMPTY);
        }
        let labels: Vec<usize> = if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::InvalidArgument(format!("bad subset key {s:?}")))?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|x| x as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::InvalidArgument(format!("bad subset key {s:?}")))?
        };
        if labels.iter().any(|&v| v == 0 || v > MAX_DIM) {
            return Err(Error::InvalidArgument(format!("bad subset key {s:?}")));
        }
        Ok(Subset::from_vars(&labels))
    }
}

/// Compresses the bits of `k` selected by `mask` into the low bits (parallel bit extract).
pub fn project_index(k: usize, mask: usize) -> usize {
    let mut out = 0usize;
    let mut bit = 0;
    let mut m = mask;
    while m != 0 {
        let low = m.trailing_zeros();
        out |= ((k >> low) & 1) << bit;
        bit += 1;
        m &= m - 1;
    }
    out
}

/// Sums a `2^d` vector over the variables outside `mask`; the result is in
/// first-fastest order over the variables of `mask`.
pub fn marginalize(values: &[f64], mask: usize) -> Vec<f64> {
    let mut out = vec![0.0; 1 << mask.count_ones()];
    for (k, &x) in values.iter().enumerate() {
        out[project_index(k, mask)] += x;
    }
    out
}

/// A vector of `2^d` reals in cell order.
#[derive(Debug, Clone, PartialEq)]
pub struct CellVector {
    d: usize,
    values: Vec<f64>,
}

impl CellVector {
    pub fn new(d: usize, values: Vec<f64>) -> Result<Self> {
        check_dim(d)?;
        if values.len() != 1 << d {
            return Err(Error::LengthMismatch { expected: 1 << d, found: values.len() });
        }
        Ok(CellVector { d, values })
    }

    /// Infers `d` from the length, which must be a power of two ≥ 2.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("length {n} is not 2^d with d ≥ 1")));
        }
        Self::new(n.trailing_zeros() as usize, values)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// In-place unnormalized Walsh–Hadamard butterfly: `v ← H_d v` with
/// `h_ab = (-1)^{popcount(a & b)}`. Length must be a power of two.
pub fn fwht_in_place(v: &mut [f64]) {
    debug_assert!(v.len().is_power_of_two());
    let n = v.len();
    let mut half = 1;
    while half < n {
        for block in v.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a, b) = (*x, *y);
                *x = a + b;
                *y = a - b;
            }
        }
        half <<= 1;
    }
}

/// `H_d v`.
pub fn hadamard_apply(v: &CellVector) -> CellVector {
    let mut values = v.values.clone();
    fwht_in_place(&mut values);
    CellVector { d: v.d, values }
}

/// `H_d^{-1} v = 2^{-d} H_d v`.
pub fn hadamard_inverse_apply(v: &CellVector) -> CellVector {
    let mut out = hadamard_apply(v);
    let scale = (out.len() as f64).recip();
    out.values.iter_mut().for_each(|x| *x *= scale);
    out
}

/// Slice version of [`hadamard_inverse_apply`].
pub(crate) fn inverse_transform(values: &[f64]) -> Vec<f64> {
    let mut out = values.to_vec();
    fwht_in_place(&mut out);
    let scale = (out.len() as f64).recip();
    out.iter_mut().for_each(|x| *x *= scale);
    out
}

pub(crate) fn transform(values: &[f64]) -> Vec<f64> {
    let mut out = values.to_vec();
    fwht_in_place(&mut out);
    out
}
