//! Goodness-of-fit statistics and binomial confidence intervals.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Cells with zero expectation folded into a neighbour.
    pub merged_cells: usize,
}

fn upper_tail(dof: usize, statistic: f64) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    if statistic <= 0.0 {
        return 1.0;
    }
    gamma_ur(dof as f64 / 2.0, statistic / 2.0)
}

/// Pearson statistic of `observed` against `expected` counts.
///
/// A cell with zero expectation is merged into the nearest earlier cell with
/// positive expectation (the next one if there is none).
pub fn chi_square(observed: &[u64], expected: &[f64]) -> Result<ChiSquare> {
    if observed.is_empty() || observed.len() != expected.len() {
        return Err(Error::Domain("chi-square needs equally long nonempty inputs".into()));
    }
    if expected.iter().any(|&e| e < 0.0 || !e.is_finite()) {
        return Err(Error::Domain("expected counts must be finite and nonnegative".into()));
    }
    let Some(first) = expected.iter().position(|&e| e > 0.0) else {
        return Err(Error::Domain("all expected counts are zero".into()));
    };
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut merged_cells = 0;
    let mut carry = 0.0;
    for (i, (&o, &e)) in observed.iter().zip(expected).enumerate() {
        if e > 0.0 {
            cells.push((o as f64 + carry, e));
            carry = 0.0;
        } else {
            merged_cells += 1;
            if i < first {
                carry += o as f64;
            } else {
                cells.last_mut().expect("earlier positive cell").0 += o as f64;
            }
        }
    }
    let statistic = cells.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len() - 1;
    Ok(ChiSquare { statistic, dof, p_value: upper_tail(dof, statistic), merged_cells })
}

/// Two-sample statistic for histograms `a` and `b` over the same cells,
/// allowing different totals. Cells empty in both samples are dropped.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<ChiSquare> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Domain("two-sample chi-square needs equally long nonempty inputs".into()));
    }
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Domain("both samples must be nonempty".into()));
    }
    let (k1, k2) = ((nb / na).sqrt(), (na / nb).sqrt());
    let mut statistic = 0.0;
    let mut used = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        if x + y == 0 {
            continue;
        }
        let d = k1 * x as f64 - k2 * y as f64;
        statistic += d * d / (x + y) as f64;
        used += 1;
    }
    let dof = used.saturating_sub(1);
    Ok(ChiSquare { statistic, dof, p_value: upper_tail(dof, statistic), merged_cells: a.len() - used })
}

/// Half the L1 distance between two distributions, each normalised to
/// total mass one.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() || p.is_empty() {
        return Err(Error::Domain("distributions must have equal nonzero length".into()));
    }
    let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
    if sp <= 0.0 || sq <= 0.0 {
        return Err(Error::Domain("distributions must have positive mass".into()));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a / sp - b / sq).abs()).sum::<f64>())
}

/// Two-sided standard normal quantile for confidence `level`.
pub fn normal_quantile(level: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    n.inverse_cdf(1.0 - (1.0 - level) / 2.0)
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_ci(successes: u64, trials: u64, level: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials {
        return Err(Error::Domain(format!("need 0 <= successes <= trials, trials > 0; got {successes}/{trials}")));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::Domain(format!("confidence level {level} outside (0, 1)")));
    }
    let z = normal_quantile(level);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    Ok((lo, hi))
}

/// Standard error `sqrt(p (1 - p) / n)`.
pub fn binomial_se(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_square_examples() {
        let c = chi_square(&[10, 20], &[15.0, 15.0]).unwrap();
        assert!((c.statistic - 10.0 / 3.0).abs() < 1e-12);
        assert_eq!(c.dof, 1);
        let same = chi_square(&[5, 5, 5], &[5.0, 5.0, 5.0]).unwrap();
        assert_eq!(same.statistic, 0.0);
        assert_eq!(same.p_value, 1.0);
        // chi-square with 2 degrees of freedom has survival exp(-x/2)
        let c = chi_square(&[30, 10, 20], &[20.0, 20.0, 20.0]).unwrap();
        assert!((c.p_value - (-c.statistic / 2.0).exp()).abs() < 1e-12);
    }

    #[test]
    fn zero_cells_are_merged() {
        let c = chi_square(&[0, 3, 7, 1], &[0.0, 5.0, 5.0, 0.0]).unwrap();
        assert_eq!(c.merged_cells, 2);
        assert_eq!(c.dof, 1);
        // cells become (3, 8) against (5, 5)
        assert!((c.statistic - (4.0 + 9.0) / 5.0).abs() < 1e-12);
        assert!(chi_square(&[1], &[0.0]).is_err());
    }

    #[test]
    fn two_sample() {
        let c = chi_square_two_sample(&[10, 20, 0], &[20, 40, 0]).unwrap();
        assert!(c.statistic.abs() < 1e-12);
        assert_eq!(c.dof, 1);
        let d = chi_square_two_sample(&[50, 0], &[0, 50]).unwrap();
        assert!((d.statistic - 100.0).abs() < 1e-9);
    }

    #[test]
    fn total_variation() {
        assert_eq!(tv_distance(&[0.2, 0.8], &[2.0, 8.0]).unwrap(), 0.0);
        assert!((tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wilson() {
        let (lo, hi) = wilson_ci(0, 100, 0.95).unwrap();
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson_ci(50, 100, 0.95).unwrap();
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
        assert_eq!(wilson_ci(7, 7, 0.9).unwrap().1, 1.0);
        assert!(wilson_ci(8, 7, 0.9).is_err());
        assert!((normal_quantile(0.95) - 1.959_964).abs() < 1e-6);
    }
}
