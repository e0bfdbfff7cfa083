//! Closed-form limit laws and tail bounds, used as predictions for exact
//! counts and Monte Carlo estimates.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Below this argument the gap probability uses its Taylor expansion.
pub const GAP_SERIES_SWITCH: f64 = 1e-4;

/// Parameters of the limit regimes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeParams {
    pub alpha: f64,
    pub rho: f64,
    pub beta: f64,
    pub theta: f64,
    pub epsilon: f64,
    pub x: u64,
    pub y: u64,
    pub delta: u64,
}

impl RegimeParams {
    pub fn new(
        alpha: f64,
        rho: f64,
        beta: f64,
        theta: f64,
        epsilon: f64,
        (x, y, delta): (u64, u64, u64),
    ) -> Result<Self> {
        let check = |ok: bool, what: &str| if ok { Ok(()) } else { Err(Error::Domain(what.to_string())) };
        check(alpha > 0.0 && alpha.is_finite(), "alpha must be positive")?;
        check((0.0..=1.0).contains(&rho), "rho must lie in [0, 1]")?;
        check(beta >= 0.0 && beta.is_finite(), "beta must be nonnegative")?;
        check(theta > 0.0 && theta.is_finite(), "theta must be positive")?;
        check(epsilon > 0.0 && epsilon.is_finite(), "epsilon must be positive")?;
        check(x + delta <= y, "binomial arguments need x <= y - delta")?;
        Ok(RegimeParams { alpha, rho, beta, theta, epsilon, x, y, delta })
    }
}

/// Window scale `k * sqrt(n / m)` for patterns of length `k`.
pub fn pattern_alpha(n: usize, m: u64, k: usize) -> f64 {
    k as f64 * (n as f64 / m as f64).sqrt()
}

/// Gap scale `k * n / m`.
pub fn gap_alpha(n: usize, m: u64, k: usize) -> f64 {
    k as f64 * n as f64 / m as f64
}

/// Limit of the probability that a pattern of length `k` and inversion
/// density `rho` occurs at a given position, at window scale `alpha`.
pub fn pattern_prob_critical(rho: f64, alpha: f64, k: usize) -> f64 {
    ln_pattern_prob_critical(rho, alpha, k).exp()
}

/// Natural log of [`pattern_prob_critical`], finite for any `k`.
pub fn ln_pattern_prob_critical(rho: f64, alpha: f64, k: usize) -> f64 {
    (1.0 - 2.0 * rho) * alpha * alpha / 4.0 - ln_gamma(k as f64 + 1.0)
}

/// Limit of the probability that positions `j` and `j + k` are inverted
/// when `k n / m -> alpha`.
pub fn gap_prob_critical(alpha: f64) -> f64 {
    if alpha < GAP_SERIES_SWITCH {
        let a2 = alpha * alpha;
        return 0.5 - alpha / 6.0 + alpha * a2 / 180.0 - alpha * a2 * a2 / 5040.0;
    }
    if alpha <= 1.0 {
        let num = alpha * alpha.exp() - alpha.exp_m1();
        let den = alpha.exp_m1();
        return num / (den * den);
    }
    let e = (-alpha).exp();
    let den = -(-alpha).exp_m1();
    (e * (alpha - 1.0) + e * e) / (den * den)
}

/// `2 exp(-theta^2 n)`, bounding `P(|dinv - 1/2| > theta)` for uniform
/// `n`-permutations.
pub fn hoeffding_density_bound(theta: f64, n: usize) -> f64 {
    2.0 * (-theta * theta * n as f64).exp()
}

/// Threshold `(1 + eps)(s / t) ln t` for the largest part of a uniform weak
/// `t`-composition of `s`, and the bound `t^{-eps/2}` on exceeding it.
pub fn comp_tail_threshold(t: usize, s: u64, epsilon: f64) -> (f64, f64) {
    let tf = t as f64;
    ((1.0 + epsilon) * (s as f64 / tf) * tf.ln(), tf.powf(-epsilon / 2.0))
}

/// `C(y, x) / C(y - delta, x)`, evaluated as a sum of logarithms over
/// `min(x, delta)` factors.
pub fn binom_ratio(y: u64, x: u64, delta: u64) -> Result<f64> {
    if x + delta > y {
        return Err(Error::Domain(format!("need x + delta <= y, got x={x} delta={delta} y={y}")));
    }
    let log = if delta <= x {
        // prod_{i < delta} (y - i) / (y - i - x)
        (0..delta).map(|i| -(-(x as f64) / (y - i) as f64).ln_1p()).sum::<f64>()
    } else {
        // prod_{i < x} (y - i) / (y - delta - i)
        (0..x).map(|i| (delta as f64 / (y - delta - i) as f64).ln_1p()).sum::<f64>()
    };
    Ok(log.exp())
}

/// Limit of `N_{k,l} / N_{k,0}` when `l ~ beta m / n`.
pub fn prefix_ratio_prediction(beta: f64) -> f64 {
    (-beta).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_limit() {
        for k in 1..12 {
            let fact: f64 = (1..=k).map(|i| i as f64).product();
            for alpha in [1e-6, 0.5, 3.0, 10.0] {
                assert!((pattern_prob_critical(0.5, alpha, k) * fact - 1.0).abs() < 1e-12);
            }
        }
        assert!((pattern_prob_critical(0.0, 2.0, 3) - 1f64.exp() / 6.0).abs() < 1e-12);
        let ln = ln_pattern_prob_critical(0.3, 1.0, 10_000);
        assert!((ln - (0.1 - ln_gamma(10_001.0))).abs() < 1e-9 * ln.abs());
    }

    #[test]
    fn gap_limit() {
        assert!((gap_prob_critical(1.0) - 1.0 / (1f64.exp() - 1.0).powi(2)).abs() < 1e-14);
        assert!((gap_prob_critical(1e-12) - 0.5).abs() < 1e-12);
        let below = gap_prob_critical(GAP_SERIES_SWITCH * (1.0 - 1e-12));
        let above = gap_prob_critical(GAP_SERIES_SWITCH * (1.0 + 1e-12));
        assert!((below - above).abs() < 1e-10);
        let at_one = gap_prob_critical(1.0);
        assert!((gap_prob_critical(1.0 - 1e-12) - at_one).abs() < 1e-10);
        let mut prev = 0.5;
        let mut alpha = 0.001;
        while alpha <= 20.0 {
            let p = gap_prob_critical(alpha);
            assert!(p < 0.5 && p < prev, "alpha={alpha}");
            prev = p;
            alpha += 0.001;
        }
        assert!(gap_prob_critical(800.0) >= 0.0);
    }

    #[test]
    fn bounds() {
        assert_eq!(hoeffding_density_bound(0.0, 10), 2.0);
        assert!((hoeffding_density_bound(0.02, 10_000) - 2.0 * (-4f64).exp()).abs() < 1e-15);
        let (thr, bound) = comp_tail_threshold(10_000, 1_000_000, 1.0);
        assert!((thr - 200.0 * 10_000f64.ln()).abs() < 1e-9);
        assert!((bound - 0.01).abs() < 1e-15);
        assert_eq!(comp_tail_threshold(50, 0, 0.5).0, 0.0);
        assert!(comp_tail_threshold(50, 10, 200.0).1 < 1e-150);
    }

    #[test]
    fn binomial_ratios() {
        assert_eq!(binom_ratio(100, 10, 0).unwrap(), 1.0);
        assert!((binom_ratio(1_000_000, 1000, 1000).unwrap() / 1f64.exp() - 1.0).abs() < 0.01);
        // C(10,3)/C(7,3) = 120/35
        assert!((binom_ratio(10, 3, 3).unwrap() - 120.0 / 35.0).abs() < 1e-12);
        assert!((binom_ratio(10, 3, 5).unwrap() - 120.0 / 10.0).abs() < 1e-12);
        assert!(binom_ratio(10, 6, 5).is_err());
        let mut prev = 0.0;
        for d in 0..50 {
            let r = binom_ratio(200, 30, d).unwrap();
            assert!(r >= prev);
            prev = r;
        }
    }

    #[test]
    fn binomial_ratio_sweep_approaches_exponential() {
        let alpha = 1.5;
        let mut prev = f64::INFINITY;
        for y in [1e4, 1e6, 1e8, 1e10] {
            let y = y as u64;
            let x = (y as f64).sqrt().ceil() as u64;
            let delta = (alpha * y as f64 / x as f64).ceil() as u64;
            let dev = (binom_ratio(y, x, delta).unwrap() / alpha.exp() - 1.0).abs();
            assert!(dev < prev, "y={y}");
            prev = dev;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn regime_validation() {
        assert!(RegimeParams::new(1.0, 0.5, 0.0, 0.1, 1.0, (3, 10, 2)).is_ok());
        assert!(RegimeParams::new(0.0, 0.5, 0.0, 0.1, 1.0, (3, 10, 2)).is_err());
        assert!(RegimeParams::new(1.0, 1.5, 0.0, 0.1, 1.0, (3, 10, 2)).is_err());
        assert!(RegimeParams::new(1.0, 0.5, 0.0, 0.1, 1.0, (9, 10, 2)).is_err());
        assert_eq!(prefix_ratio_prediction(0.0), 1.0);
        assert!((prefix_ratio_prediction(2f64.ln()) - 0.5).abs() < 1e-15);
        assert!((prefix_ratio_prediction(2.0) - 0.135_335_283).abs() < 1e-9);
    }
}
