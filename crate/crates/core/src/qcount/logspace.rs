//! Natural-log coefficient rows for box products too large to hold exactly.
//!
//! Results from this module are approximations and are reported as such.

use super::{choose2, gap_capacities, gap_weight, suffix_capacities};
use crate::error::{Error, Result};
use crate::permutation::Permutation;

/// Boxes up to this capacity are multiplied in by direct window sums.
const DIRECT_WINDOW_MAX: usize = 64;

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Truncated polynomial stored as the logs of its coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct LogCoefficientVector {
    logs: Vec<f64>,
    full_degree: u64,
}

impl LogCoefficientVector {
    pub fn one(max_degree: usize) -> Self {
        let mut logs = vec![f64::NEG_INFINITY; max_degree + 1];
        logs[0] = 0.0;
        LogCoefficientVector { logs, full_degree: 0 }
    }

    pub fn max_degree(&self) -> usize {
        self.logs.len() - 1
    }

    pub fn logs(&self) -> &[f64] {
        &self.logs
    }

    /// Log of the coefficient of `q^s`; `-inf` when it is zero or truncated.
    pub fn get(&self, s: usize) -> f64 {
        self.logs.get(s).copied().unwrap_or(f64::NEG_INFINITY)
    }

    /// Multiplies by `1 + q + ... + q^capacity`.
    ///
    /// Every product of box polynomials is palindromic and log-concave, so
    /// only the lower half of the row is computed; the rest is mirrored.
    pub fn mul_box(&mut self, capacity: usize) {
        if capacity == 0 {
            return;
        }
        let len = self.logs.len();
        let degree = self.full_degree + capacity as u64;
        let half = ((degree / 2) as usize).min(len - 1);
        let old = &self.logs;
        let mut new = vec![f64::NEG_INFINITY; len];
        if capacity <= DIRECT_WINDOW_MAX {
            for s in 0..=half {
                new[s] = log_sum_exp(&old[s.saturating_sub(capacity)..=s]);
            }
        } else {
            let mut prefix = Vec::with_capacity(half + 1);
            let mut acc = f64::NEG_INFINITY;
            for s in 0..=half {
                acc = log_add(acc, old[s]);
                prefix.push(acc);
                new[s] = if s <= capacity {
                    acc
                } else {
                    acc + (-(prefix[s - capacity - 1] - acc).exp()).ln_1p()
                };
            }
        }
        for s in half + 1..len {
            if (s as u64) <= degree {
                new[s] = new[(degree - s as u64) as usize];
            }
        }
        self.logs = new;
        self.full_degree = degree;
    }
}

/// Log-space counterpart of [`capacity_poly`](super::capacity_poly).
pub fn log_capacity_poly(capacities: &[usize], max_degree: usize) -> LogCoefficientVector {
    let mut poly = LogCoefficientVector::one(max_degree);
    for &c in capacities {
        poly.mul_box(c);
    }
    poly
}

fn log_mahonian(n: usize, m: u64) -> Result<f64> {
    if m > choose2(n) {
        return Err(Error::EmptyClass { n, m });
    }
    let caps: Vec<usize> = (0..n).collect();
    Ok(log_capacity_poly(&caps, m as usize).get(m as usize))
}

/// Floating-point approximation of the pattern probability for instances
/// beyond the exact budget.
pub fn approx_pattern_prob(n: usize, m: u64, tau: &Permutation) -> Result<f64> {
    let k = tau.len();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("pattern length {k} must lie in 1..={n}")));
    }
    let total = log_mahonian(n, m)?;
    let l = tau.inv_count();
    if l > m {
        return Ok(0.0);
    }
    let s = (m - l) as usize;
    let hits = log_capacity_poly(&suffix_capacities(n - k, k), s).get(s);
    Ok((hits - total).exp())
}

/// Floating-point approximation of the gap-inversion probability.
pub fn approx_gap_prob(n: usize, m: u64, k: usize) -> Result<f64> {
    if k == 0 || k >= n {
        return Err(Error::Domain(format!("gap {k} must lie in 1..={}", n.saturating_sub(1))));
    }
    if m > choose2(n) {
        return Err(Error::EmptyClass { n, m });
    }
    let g = log_capacity_poly(&gap_capacities(n, k), m as usize);
    let mut up = Vec::new();
    let mut down = Vec::new();
    for l in 0..(2 * k).min(m as usize + 1) {
        let coeff = g.get(m as usize - l);
        let (wu, wd) = gap_weight(k, l);
        if wu > 0 {
            up.push(coeff + (wu as f64).ln());
        }
        if wd > 0 {
            down.push(coeff + (wd as f64).ln());
        }
    }
    let (up, down) = (log_sum_exp(&up), log_sum_exp(&down));
    if down == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok(1.0 / (1.0 + (up - down).exp()))
}
