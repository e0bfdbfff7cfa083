//! Exact counting over the balls-in-boxes model of inversion sequences.
//!
//! A box of capacity `c` holds between `0` and `c` balls, contributing the
//! factor `1 + q + ... + q^c` to a generating function. Every count in this
//! module is a coefficient of a truncated product of such factors, computed
//! over arbitrary-precision integers:
//!
//! * boxes `0, 1, ..., n-1` give the Mahonian numbers `|S_{n,m}|`;
//! * boxes `k, k+1, ..., n-1` count the ways to complete a fixed prefix
//!   pattern of length `k` (the prefix counts `N_{k,l}`);
//! * dropping the two boxes that record the first point and the point `k`
//!   further along gives the gap-inversion counts.

mod logspace;
mod prob;

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::permutation::Permutation;

pub use logspace::{approx_gap_prob, approx_pattern_prob, log_capacity_poly, LogCoefficientVector};
pub use prob::ExactProbability;

/// Largest `n * m` handled by the exact kernels before callers should fall
/// back to the log-space representation.
pub const EXACT_CELL_BUDGET: u128 = 50_000_000;

/// Truncated polynomial with nonnegative big-integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientVector {
    coeffs: Vec<BigUint>,
}

impl CoefficientVector {
    /// The constant polynomial `1` truncated at `max_degree`.
    pub fn one(max_degree: usize) -> Self {
        let mut coeffs = vec![BigUint::zero(); max_degree + 1];
        coeffs[0] = BigUint::one();
        CoefficientVector { coeffs }
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    /// Coefficient of `q^s`, zero beyond the truncation bound.
    pub fn get(&self, s: usize) -> BigUint {
        self.coeffs.get(s).cloned().unwrap_or_default()
    }

    pub fn coeff(&self, s: usize) -> Option<&BigUint> {
        self.coeffs.get(s)
    }

    /// Multiplies in place by `1 + q + ... + q^capacity`.
    pub fn mul_box(&mut self, capacity: usize) {
        let mut scratch = vec![BigUint::zero(); self.coeffs.len()];
        self.mul_box_with(capacity, &mut scratch);
    }

    /// As [`mul_box`](Self::mul_box), reusing `scratch` (same length) for
    /// the output buffer.
    fn mul_box_with(&mut self, capacity: usize, scratch: &mut Vec<BigUint>) {
        let len = self.coeffs.len();
        debug_assert_eq!(scratch.len(), len);
        let mut window = BigUint::zero();
        for (s, out) in scratch.iter_mut().enumerate() {
            window += &self.coeffs[s];
            if s > capacity {
                window -= &self.coeffs[s - capacity - 1];
            }
            out.clone_from(&window);
        }
        std::mem::swap(&mut self.coeffs, scratch);
    }

    /// Truncated product with another vector.
    pub fn convolve(&self, other: &CoefficientVector) -> CoefficientVector {
        let len = self.coeffs.len().min(other.coeffs.len());
        let mut out = vec![BigUint::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        CoefficientVector { coeffs: out }
    }

    /// Sum of all stored coefficients.
    pub fn total(&self) -> BigUint {
        self.coeffs.iter().sum()
    }
}

/// Coefficient of `q^s` is the number of ways to put `s` balls in boxes with
/// the given capacities, for `s <= max_degree`.
pub fn capacity_poly(capacities: &[usize], max_degree: usize) -> CoefficientVector {
    let mut poly = CoefficientVector::one(max_degree);
    let mut scratch = vec![BigUint::zero(); max_degree + 1];
    for &c in capacities {
        poly.mul_box_with(c, &mut scratch);
    }
    poly
}

fn choose2(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Fails with [`Error::BudgetExceeded`] when an `n`-box table up to degree `m`
/// exceeds [`EXACT_CELL_BUDGET`].
pub fn check_budget(n: usize, m: u64) -> Result<()> {
    let cells = n as u128 * (m as u128 + 1);
    if cells > EXACT_CELL_BUDGET {
        return Err(Error::BudgetExceeded { cells, budget: EXACT_CELL_BUDGET });
    }
    Ok(())
}

/// Mahonian numbers `|S_{n,s}|` for `s = 0..=max_degree`.
pub fn mahonian_row(n: usize, max_degree: usize) -> CoefficientVector {
    let caps: Vec<usize> = (0..n).collect();
    capacity_poly(&caps, max_degree)
}

/// Number of `n`-permutations with exactly `m` inversions.
pub fn mahonian(n: usize, m: u64) -> BigUint {
    if m > choose2(n) {
        return BigUint::zero();
    }
    mahonian_row(n, m as usize).get(m as usize)
}

/// Number of weak `t`-compositions of `s`, i.e. `C(s + t - 1, s)`.
///
/// With no parts there is one composition of zero and none of anything else.
pub fn weak_comp_count(t: usize, s: u64) -> BigUint {
    if t == 0 {
        return if s == 0 { BigUint::one() } else { BigUint::zero() };
    }
    binomial(BigUint::from(s + t as u64 - 1), BigUint::from(s))
}

/// Weak `t`-compositions of `s` with every part below `r`.
pub fn restricted_comp_count(t: usize, s: u64, r: usize) -> Result<BigUint> {
    if r == 0 {
        return Err(Error::Domain("part bound r must be at least 1".into()));
    }
    if s > (t as u64) * (r as u64 - 1) {
        return Ok(BigUint::zero());
    }
    Ok(capacity_poly(&vec![r - 1; t], s as usize).get(s as usize))
}

/// Capacities `r, r+1, ..., r+t-1` of an inversion-sequence suffix.
fn suffix_capacities(t: usize, r: usize) -> Vec<usize> {
    (r..r + t).collect()
}

/// Generating polynomial of inversion-sequence suffixes of length `t` whose
/// `j`-th term is below `j + r`.
pub fn inv_suffix_row(t: usize, r: usize, max_degree: usize) -> CoefficientVector {
    capacity_poly(&suffix_capacities(t, r), max_degree)
}

/// Number of weak `t`-compositions of `s` whose `j`-th part is below `j + r`.
pub fn inv_suffix_count(t: usize, s: u64, r: usize) -> BigUint {
    let cap: u64 = suffix_capacities(t, r).iter().map(|&c| c as u64).sum();
    if s > cap {
        return BigUint::zero();
    }
    inv_suffix_row(t, r, s as usize).get(s as usize)
}

/// Row `g` with `prefix_count(n, m, k, l) = g[m - l]`, truncated at
/// `max_degree`.
pub fn prefix_count_row(n: usize, k: usize, max_degree: usize) -> Result<CoefficientVector> {
    if k > n {
        return Err(Error::Domain(format!("prefix length {k} exceeds n = {n}")));
    }
    Ok(inv_suffix_row(n - k, k, max_degree))
}

/// Number of `n`-permutations with `m` inversions whose first `k` points
/// form one particular `k`-permutation with `l` inversions.
pub fn prefix_count(n: usize, m: u64, k: usize, l: u64) -> Result<BigUint> {
    if k > n {
        return Err(Error::Domain(format!("prefix length {k} exceeds n = {n}")));
    }
    if l > choose2(k) {
        return Err(Error::Domain(format!(
            "a {k}-permutation has at most {} inversions, got {l}",
            choose2(k)
        )));
    }
    if m < l || m > choose2(n) {
        return Ok(BigUint::zero());
    }
    check_budget(n, m - l)?;
    Ok(inv_suffix_count(n - k, m - l, k))
}

/// Counts of `n`-permutations with `m` inversions split by whether the
/// points at positions `1` and `1 + k` are in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapCounts {
    /// `p(1) < p(1 + k)`
    pub up: BigUint,
    /// `p(1) > p(1 + k)`
    pub down: BigUint,
}

/// Capacities of the modified inversion sequence with the two special boxes
/// (positions `k` and `k + 1`) removed.
fn gap_capacities(n: usize, k: usize) -> Vec<usize> {
    (0..k - 1).chain(k + 1..n).collect()
}

/// Weight of `q^l` in the product of the two special boxes, split by side.
///
/// Adjoining a first and a last point to a `(k-1)`-permutation so as to
/// add `l` inversions can be done in `l + 1` ways without inverting the
/// pair (`l < k`) and in `2k - l` ways inverting it (`k <= l < 2k`).
pub(crate) fn gap_weight(k: usize, l: usize) -> (u64, u64) {
    if l < k {
        (l as u64 + 1, 0)
    } else if l < 2 * k {
        (0, (2 * k - l) as u64)
    } else {
        (0, 0)
    }
}

pub fn gap_counts(n: usize, m: u64, k: usize) -> Result<GapCounts> {
    if k == 0 || k >= n {
        return Err(Error::Domain(format!("gap {k} must lie in 1..={}", n.saturating_sub(1))));
    }
    if m > choose2(n) {
        return Ok(GapCounts { up: BigUint::zero(), down: BigUint::zero() });
    }
    check_budget(n, m)?;
    let g = capacity_poly(&gap_capacities(n, k), m as usize);
    let mut up = BigUint::zero();
    let mut down = BigUint::zero();
    for l in 0..2 * k {
        if l as u64 > m {
            break;
        }
        let coeff = g.get(m as usize - l);
        let (wu, wd) = gap_weight(k, l);
        if wu > 0 {
            up += &coeff * wu;
        }
        if wd > 0 {
            down += &coeff * wd;
        }
    }
    Ok(GapCounts { up, down })
}

/// Probability that `tau` occurs at any fixed position of a uniform
/// permutation from `S_{n,m}`.
pub fn exact_pattern_prob(n: usize, m: u64, tau: &Permutation) -> Result<ExactProbability> {
    let k = tau.len();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("pattern length {k} must lie in 1..={n}")));
    }
    let total = mahonian_checked(n, m)?;
    let hits = prefix_count(n, m, k, tau.inv_count())?;
    Ok(ExactProbability::new(hits, total))
}

/// Probability that positions `j` and `j + k` form an inversion.
pub fn exact_gap_prob(n: usize, m: u64, k: usize) -> Result<ExactProbability> {
    let counts = gap_counts(n, m, k)?;
    let total = &counts.up + &counts.down;
    if total.is_zero() {
        return Err(Error::EmptyClass { n, m });
    }
    Ok(ExactProbability::new(counts.down, total))
}

fn mahonian_checked(n: usize, m: u64) -> Result<BigUint> {
    if m > choose2(n) {
        return Err(Error::EmptyClass { n, m });
    }
    check_budget(n, m)?;
    Ok(mahonian(n, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::all_permutations;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn ints(poly: &CoefficientVector) -> Vec<u64> {
        poly.coeffs().iter().map(|c| u64::try_from(c).unwrap()).collect()
    }

    #[test]
    fn capacity_poly_examples() {
        assert_eq!(ints(&capacity_poly(&[0, 1, 2], 3)), vec![1, 2, 2, 1]);
        assert_eq!(ints(&capacity_poly(&[], 4)), vec![1, 0, 0, 0, 0]);
        assert_eq!(ints(&capacity_poly(&[1, 1], 2)), vec![1, 2, 1]);
    }

    #[test]
    fn capacity_poly_ignores_box_order() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let mut caps = vec![0, 3, 3, 5, 9, 1, 12, 2];
        let reference = capacity_poly(&caps, 40);
        for _ in 0..10 {
            caps.shuffle(&mut rng);
            assert_eq!(capacity_poly(&caps, 40), reference);
        }
        let full: usize = caps.iter().sum();
        let product: u64 = caps.iter().map(|&c| c as u64 + 1).product();
        assert_eq!(capacity_poly(&caps, full).total(), big(product));
    }

    #[test]
    fn mahonian_values() {
        let row: Vec<u64> = (0..=6).map(|m| u64::try_from(mahonian(4, m)).unwrap()).collect();
        assert_eq!(row, vec![1, 3, 5, 6, 5, 3, 1]);
        for n in 0..=8usize {
            assert_eq!(mahonian(n, 0), big(1));
            assert_eq!(mahonian(n, choose2(n)), big(1));
            assert_eq!(mahonian(n, choose2(n) + 1), big(0));
            let total = mahonian_row(n, choose2(n) as usize).total();
            assert_eq!(total, big((1..=n as u64).product()));
        }
        assert_eq!(mahonian(6, 5), big(71));
    }

    #[test]
    fn composition_counts() {
        assert_eq!(weak_comp_count(3, 2), big(6));
        assert_eq!(weak_comp_count(1, 17), big(1));
        assert_eq!(weak_comp_count(2, 5), big(6));
        assert_eq!(weak_comp_count(0, 0), big(1));
        assert_eq!(weak_comp_count(0, 3), big(0));
        assert_eq!(restricted_comp_count(2, 3, 3).unwrap(), big(2));
        assert_eq!(restricted_comp_count(3, 3, 2).unwrap(), big(1));
        assert_eq!(restricted_comp_count(4, 3, 4).unwrap(), weak_comp_count(4, 3));
        assert!(restricted_comp_count(3, 3, 0).is_err());
        assert_eq!(inv_suffix_count(2, 2, 1), big(2));
        assert_eq!(inv_suffix_count(3, 4, 4), weak_comp_count(3, 4));
    }

    #[test]
    fn suffix_counts_are_sandwiched() {
        for t in 1..=8 {
            for s in 0..=12u64 {
                for r in 1..=5 {
                    let lo = restricted_comp_count(t, s, r).unwrap();
                    let mid = inv_suffix_count(t, s, r);
                    let hi = weak_comp_count(t, s);
                    assert!(lo <= mid && mid <= hi, "t={t} s={s} r={r}");
                }
            }
        }
    }

    #[test]
    fn prefix_count_examples() {
        assert_eq!(prefix_count(4, 2, 2, 1).unwrap(), big(2));
        for m in 0..=6 {
            assert_eq!(prefix_count(4, m, 0, 0).unwrap(), mahonian(4, m));
        }
        assert!(prefix_count(4, 2, 2, 2).is_err());
        assert_eq!(prefix_count(4, 0, 3, 1).unwrap(), big(0));
        assert_eq!(prefix_count(3, 2, 3, 2).unwrap(), big(1));
        assert_eq!(prefix_count(3, 2, 3, 1).unwrap(), big(0));
    }

    #[test]
    fn prefix_counts_partition_mahonian() {
        for n in 0..=8usize {
            for k in 0..=n {
                let mk = mahonian_row(k, choose2(k) as usize);
                for m in 0..=choose2(n) {
                    let total: BigUint = (0..=choose2(k))
                        .map(|l| mk.get(l as usize) * prefix_count(n, m, k, l).unwrap())
                        .sum();
                    assert_eq!(total, mahonian(n, m), "n={n} k={k} m={m}");
                }
            }
        }
    }

    #[test]
    fn gap_count_examples() {
        let c = gap_counts(4, 2, 1).unwrap();
        assert_eq!((c.up, c.down), (big(3), big(2)));
        let c = gap_counts(4, 2, 2).unwrap();
        assert_eq!((c.up, c.down), (big(3), big(2)));
        let c = gap_counts(7, 0, 3).unwrap();
        assert_eq!((c.up, c.down), (big(1), big(0)));
        assert!(gap_counts(4, 2, 4).is_err());
        assert!(gap_counts(4, 2, 0).is_err());
    }

    #[test]
    fn gap_counts_sum_to_mahonian() {
        for n in 2..=8usize {
            for k in 1..n {
                for m in 0..=choose2(n) {
                    let c = gap_counts(n, m, k).unwrap();
                    assert_eq!(c.up + c.down, mahonian(n, m));
                }
            }
        }
    }

    #[test]
    fn special_box_weights_multiply_out() {
        // (1 + ... + q^{k-1}) (1 + ... + q^k) split into its two halves
        for k in 1..12 {
            let product = capacity_poly(&[k - 1, k], 2 * k);
            for l in 0..=2 * k {
                let (u, d) = gap_weight(k, l);
                assert_eq!(big(u + d), product.get(l));
            }
        }
    }

    #[test]
    fn probabilities() {
        let tau: Permutation = "21".parse().unwrap();
        let p = exact_pattern_prob(4, 2, &tau).unwrap();
        assert_eq!((p.num().clone(), p.den().clone()), (big(2), big(5)));
        let up = exact_pattern_prob(4, 2, &"12".parse().unwrap()).unwrap();
        assert_eq!((up.num().clone(), up.den().clone()), (big(3), big(5)));
        let one = exact_pattern_prob(4, 2, &"1".parse().unwrap()).unwrap();
        assert!(one.is_one());
        let g = exact_gap_prob(4, 2, 1).unwrap();
        assert_eq!((g.num().clone(), g.den().clone()), (big(2), big(5)));
        assert!(exact_gap_prob(6, 0, 2).unwrap().is_zero());
        assert!(exact_gap_prob(6, 15, 2).unwrap().is_one());
        assert!(matches!(exact_gap_prob(4, 7, 1), Err(Error::EmptyClass { .. })));
        assert!(matches!(
            exact_pattern_prob(4, 7, &tau),
            Err(Error::EmptyClass { .. })
        ));
    }

    #[test]
    fn pattern_prob_depends_only_on_inversions() {
        let n = 6;
        for m in 0..=choose2(n) {
            let mut by_pattern = std::collections::HashMap::new();
            for p in all_permutations(n).filter(|p| p.inv_count() == m) {
                *by_pattern.entry(p.window_pattern(1, 3).unwrap()).or_insert(0u64) += 1;
            }
            for tau in all_permutations(3) {
                let hits = by_pattern.get(&tau).copied().unwrap_or(0);
                assert_eq!(prefix_count(n, m, 3, tau.inv_count()).unwrap(), big(hits));
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            prefix_count(20_000, 10_000, 1, 0),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
