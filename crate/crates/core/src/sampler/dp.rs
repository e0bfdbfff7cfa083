//! Exact sampling from a table of partial Mahonian numbers.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::permutation::{decode, Permutation};
use crate::qcount::{CoefficientVector, EXACT_CELL_BUDGET};

use super::max_inversions;

/// Memory allowed for the big-integer table.
pub const DP_TABLE_BYTES: f64 = 256.0 * 1024.0 * 1024.0;

fn table_cells(n: usize, m: u64) -> u128 {
    (0..=n).map(|j| max_inversions(j).min(m) as u128 + 1).sum()
}

/// Rough size in bytes of the table for `(n, m)`, bounding every entry by
/// the number of weak `n`-compositions of `m`.
pub fn dp_table_bytes(n: usize, m: u64) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let bits = if n <= 1 || m == 0 {
        1.0
    } else {
        (ln_gamma(mf + nf) - ln_gamma(mf + 1.0) - ln_gamma(nf)) / std::f64::consts::LN_2
    };
    table_cells(n, m) as f64 * (bits / 8.0 + 32.0)
}

/// Whether the exact table for `(n, m)` fits both the cell and memory budgets.
pub fn dp_exact_feasible(n: usize, m: u64) -> bool {
    m <= max_inversions(n)
        && table_cells(n, m) <= EXACT_CELL_BUDGET
        && dp_table_bytes(n, m) <= DP_TABLE_BYTES
}

/// Uniform integer in `0..bound` by rejection on random bit strings.
pub(crate) fn random_below<R: Rng + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    assert!(!bound.is_zero());
    let bits = bound.bits();
    let digits = bits.div_ceil(32) as usize;
    let top_mask = if bits % 32 == 0 { u32::MAX } else { (1u32 << (bits % 32)) - 1 };
    let mut buf = vec![0u32; digits];
    loop {
        for d in buf.iter_mut() {
            *d = rng.random();
        }
        buf[digits - 1] &= top_mask;
        let candidate = BigUint::from_slice(&buf);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// Table `T[j][s]` of inversion sequences of length `j` with sum `s`, and
/// the backward sampler built on it.
#[derive(Debug, Clone)]
pub struct DpSampler {
    n: usize,
    m: u64,
    rows: Vec<Vec<BigUint>>,
}

impl DpSampler {
    pub fn new(n: usize, m: u64) -> Result<Self> {
        if m > max_inversions(n) {
            return Err(Error::EmptyClass { n, m });
        }
        let cells = table_cells(n, m);
        if cells > EXACT_CELL_BUDGET {
            return Err(Error::BudgetExceeded { cells, budget: EXACT_CELL_BUDGET });
        }
        let mut rows = Vec::with_capacity(n + 1);
        let mut row = CoefficientVector::one(m as usize);
        rows.push(vec![BigUint::from(1u32)]);
        for j in 1..=n {
            row.mul_box(j - 1);
            let len = max_inversions(j).min(m) as usize + 1;
            rows.push(row.coeffs()[..len].to_vec());
        }
        Ok(DpSampler { n, m, rows })
    }

    /// Row `j` of the table, truncated where it becomes zero or at `m`.
    pub fn row(&self, j: usize) -> &[BigUint] {
        &self.rows[j]
    }

    fn entry(&self, j: usize, s: u64) -> Option<&BigUint> {
        self.rows[j].get(s as usize)
    }

    pub fn sample_code<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u32> {
        let mut code = vec![0u32; self.n];
        let mut s = self.m;
        for j in (1..=self.n).rev() {
            let total = self.entry(j, s).expect("remaining sum within row");
            let mut u = random_below(rng, total);
            let mut v = 0u64;
            loop {
                if let Some(w) = self.entry(j - 1, s - v) {
                    if &u < w {
                        break;
                    }
                    u -= w;
                }
                v += 1;
            }
            code[j - 1] = v as u32;
            s -= v;
        }
        code
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        let p = Permutation::from_vec_unchecked(decode(&self.sample_code(rng)));
        debug_assert_eq!(p.inv_count(), self.m);
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcount::mahonian_row;
    use crate::sampler::RngStream;

    #[test]
    fn table_rows_are_mahonian() {
        let s = DpSampler::new(9, 20).unwrap();
        for j in 0..=9 {
            let reference = mahonian_row(j, 20);
            for (x, y) in s.row(j).iter().zip(reference.coeffs()) {
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn uniform_below_small_bound() {
        let mut rng = RngStream::new(1, 0).rng();
        let bound = BigUint::from(5u32);
        let mut counts = [0u32; 5];
        for _ in 0..5000 {
            let x = random_below(&mut rng, &bound);
            counts[usize::try_from(&x).unwrap()] += 1;
        }
        assert!(counts.iter().all(|&c| (850..1150).contains(&c)), "{counts:?}");
        let big = BigUint::from(1u32) << 200;
        assert!(random_below(&mut rng, &big) < big);
    }

    #[test]
    fn boundary_classes() {
        let mut rng = RngStream::new(2, 0).rng();
        assert_eq!(DpSampler::new(7, 0).unwrap().sample(&mut rng), Permutation::identity(7));
        assert_eq!(DpSampler::new(7, 21).unwrap().sample(&mut rng), Permutation::reverse(7));
        assert!(DpSampler::new(7, 22).is_err());
        let s = DpSampler::new(3, 1).unwrap();
        let mut seen = std::collections::HashMap::new();
        for _ in 0..4000 {
            *seen.entry(s.sample(&mut rng).to_string()).or_insert(0) += 1;
        }
        assert_eq!(seen.len(), 2);
        assert!(seen.values().all(|&c| (1800..2200).contains(&c)), "{seen:?}");
    }

    #[test]
    fn feasibility() {
        assert!(dp_exact_feasible(6, 5));
        assert!(dp_exact_feasible(100, 1000));
        assert!(!dp_exact_feasible(825, 3399));
        assert!(!dp_exact_feasible(6, 16));
    }
}
