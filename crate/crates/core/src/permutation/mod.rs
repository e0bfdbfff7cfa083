//! Permutations, inversion statistics and inversion sequences.
//!
//! Positions and values are one-based throughout: a permutation of length
//! `n` stores each of `1..=n` exactly once, and `get(j)` is the value at
//! position `j`.

mod fenwick;
mod shift;

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::error::{Error, Result};

pub(crate) use fenwick::Fenwick;
pub use shift::{psi_shift, psi_unshift};

/// Below this length `inv_count` scans all pairs.
pub const PAIR_SCAN_MAX_LEN: usize = 64;

/// A permutation of `1..=n` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    values: Vec<u32>,
}

impl Permutation {
    /// Validates that `values` is a bijection of `1..=values.len()`.
    pub fn new(values: Vec<u32>) -> Result<Self> {
        let n = values.len();
        let mut seen = vec![false; n + 1];
        for (i, &v) in values.iter().enumerate() {
            let v = v as usize;
            if v == 0 || v > n {
                return Err(Error::InvalidPermutation {
                    n,
                    reason: format!("value {v} at position {} is out of range", i + 1),
                });
            }
            if seen[v] {
                return Err(Error::InvalidPermutation {
                    n,
                    reason: format!("value {v} repeated"),
                });
            }
            seen[v] = true;
        }
        Ok(Permutation { values })
    }

    pub(crate) fn from_vec_unchecked(values: Vec<u32>) -> Self {
        debug_assert!(Permutation::new(values.clone()).is_ok());
        Permutation { values }
    }

    pub fn identity(n: usize) -> Self {
        Permutation { values: (1..=n as u32).collect() }
    }

    pub fn reverse(n: usize) -> Self {
        Permutation { values: (1..=n as u32).rev().collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at one-based position `j`.
    pub fn get(&self, j: usize) -> u32 {
        self.values[j - 1]
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u32> {
        self.values
    }

    /// Number of pairs `i < j` with `p(i) > p(j)`.
    ///
    /// Dispatches to [`inv_count_pairs`] for short permutations and to
    /// [`inv_count_tree`] otherwise.
    pub fn inv_count(&self) -> u64 {
        if self.len() <= PAIR_SCAN_MAX_LEN {
            inv_count_pairs(&self.values)
        } else {
            inv_count_tree(&self.values)
        }
    }

    /// `inv_count / C(n, 2)` as a reduced fraction.
    pub fn inv_density(&self) -> Result<Ratio<u64>> {
        let n = self.len() as u64;
        if n < 2 {
            return Err(Error::Domain(format!(
                "inversion density needs length at least 2, got {n}"
            )));
        }
        Ok(Ratio::new(self.inv_count(), n * (n - 1) / 2))
    }

    /// Sum of `|p(j) - j|` over all positions.
    pub fn total_displacement(&self) -> u64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (v as i64 - (i as i64 + 1)).unsigned_abs())
            .sum()
    }

    pub fn to_inv_sequence(&self) -> InversionSequence {
        let n = self.len();
        let mut tree = Fenwick::new(n);
        let mut terms = Vec::with_capacity(n);
        for (j, &v) in self.values.iter().enumerate() {
            // values already placed that exceed v
            let below = tree.prefix(v as usize);
            terms.push(j as u32 - below);
            tree.add(v as usize, 1);
        }
        InversionSequence { terms }
    }

    /// The `k`-permutation order-isomorphic to `p(j) .. p(j+k-1)`.
    pub fn window_pattern(&self, j: usize, k: usize) -> Result<Permutation> {
        let n = self.len();
        if j == 0 || k == 0 || j + k > n + 1 {
            return Err(Error::WindowOutOfRange { start: j, len: k, n });
        }
        Ok(standardize(&self.values[j - 1..j - 1 + k]))
    }

    /// The permutation with each value `v` replaced by `n + 1 - v`.
    pub fn complement(&self) -> Permutation {
        let n = self.len() as u32;
        Permutation { values: self.values.iter().map(|&v| n + 1 - v).collect() }
    }

    /// Number of positions `j < n` with `p(j) > p(j+1)`.
    pub fn descents(&self) -> usize {
        self.values.windows(2).filter(|w| w[0] > w[1]).count()
    }
}

/// Rank-standardizes a sequence of distinct values.
pub fn standardize(window: &[u32]) -> Permutation {
    let mut order: Vec<usize> = (0..window.len()).collect();
    order.sort_unstable_by_key(|&i| window[i]);
    let mut values = vec![0u32; window.len()];
    for (rank, &i) in order.iter().enumerate() {
        values[i] = rank as u32 + 1;
    }
    Permutation { values }
}

/// Inversion count by scanning every pair.
pub fn inv_count_pairs(values: &[u32]) -> u64 {
    let mut count = 0u64;
    for (i, &a) in values.iter().enumerate() {
        count += values[i + 1..].iter().filter(|&&b| a > b).count() as u64;
    }
    count
}

/// Inversion count by order-statistics accumulation in `O(n log n)`.
pub fn inv_count_tree(values: &[u32]) -> u64 {
    let mut tree = Fenwick::new(values.len());
    let mut count = 0u64;
    for (j, &v) in values.iter().enumerate() {
        count += (j as u32 - tree.prefix(v as usize)) as u64;
        tree.add(v as usize, 1);
    }
    count
}

/// An inversion sequence `(e_1, ..., e_n)` with `e_j < j`.
///
/// `e_j` counts the inversions whose right end is at position `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InversionSequence {
    terms: Vec<u32>,
}

impl InversionSequence {
    pub fn new(terms: Vec<u32>) -> Result<Self> {
        for (i, &e) in terms.iter().enumerate() {
            if e as usize > i {
                return Err(Error::InvalidCode { position: i + 1, value: e as usize });
            }
        }
        Ok(InversionSequence { terms })
    }

    pub fn terms(&self) -> &[u32] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.terms.iter().map(|&e| e as u64).sum()
    }

    /// The unique permutation with this inversion sequence.
    pub fn to_permutation(&self) -> Permutation {
        Permutation { values: decode(&self.terms) }
    }
}

/// Validating wrapper around [`InversionSequence::to_permutation`].
pub fn from_inv_sequence(terms: &[u32]) -> Result<Permutation> {
    Ok(InversionSequence::new(terms.to_vec())?.to_permutation())
}

/// Decodes a code with `e_j < j` into one-line notation.
///
/// Works right to left: the value at position `j` has exactly `e_j`
/// larger values among those still unplaced.
pub(crate) fn decode(code: &[u32]) -> Vec<u32> {
    let n = code.len();
    let mut remaining = Fenwick::full(n);
    let mut values = vec![0u32; n];
    for j in (1..=n).rev() {
        let rank = j as u32 - code[j - 1];
        let v = remaining.select(rank);
        remaining.add(v, -1);
        values[j - 1] = v as u32;
    }
    values
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Display for InversionSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Splits text into integers: whitespace- or comma-separated, or a compact
/// digit word such as `2341` when the text has no separators.
fn parse_numbers(s: &str) -> Result<Vec<u32>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let has_separator = s.chars().any(|c| c.is_whitespace() || c == ',');
    if !has_separator && s.len() > 1 {
        if s.len() > 9 {
            return Err(Error::Parse(format!(
                "compact form '{s}' is limited to 9 digits; separate values with spaces or commas"
            )));
        }
        return s
            .chars()
            .map(|c| c.to_digit(10).ok_or_else(|| Error::Parse(format!("bad digit '{c}'"))))
            .collect();
    }
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u32>().map_err(|e| Error::Parse(format!("'{t}': {e}"))))
        .collect()
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Permutation::new(parse_numbers(s)?)
    }
}

impl FromStr for InversionSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InversionSequence::new(parse_numbers(s)?)
    }
}

/// All permutations of `1..=n` in lexicographic order.
pub fn all_permutations(n: usize) -> impl Iterator<Item = Permutation> {
    let mut current: Option<Vec<u32>> = Some((1..=n as u32).collect());
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let v = current.as_mut().unwrap();
        // next lexicographic permutation
        match (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) {
            None => current = None,
            Some(i) => {
                let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
                v.swap(i - 1, j);
                v[i..].reverse();
            }
        }
        Some(Permutation { values: out })
    })
}
