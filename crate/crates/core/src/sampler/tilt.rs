//! Exponentially tilted inversion sequences.
//!
//! Under the tilt with parameter `q = e^{-x}` the terms `e_j` are independent,
//! `e_j` taking the value `v` in `0..j` with probability proportional to `q^v`.
//! Every sequence with sum `m` has the same weight `q^m`, so conditioning the
//! tilted law on the sum gives the uniform law on `S_{n,m}`.
//!
//! Targets above `C(n,2)/2` are handled through the complement map
//! `e_j -> j - 1 - e_j`, which keeps `q` in `(0, 1]`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::permutation::{decode, Permutation};

use super::max_inversions;

/// Below this value of `j * x` the box moments use their Taylor expansions.
const SERIES_SWITCH: f64 = 1e-3;

pub const DEFAULT_MAX_TRIALS: u64 = 50_000_000;

/// Mean of the tilted law on `0..j` with `q = e^{-x}`.
pub fn box_mean(j: u64, x: f64) -> f64 {
    let jf = j as f64;
    if jf * x < SERIES_SWITCH {
        let j2 = jf * jf;
        return (jf - 1.0) / 2.0 - (j2 - 1.0) * x / 12.0 + (j2 * j2 - 1.0) * x.powi(3) / 720.0;
    }
    1.0 / x.exp_m1() - jf / (jf * x).exp_m1()
}

/// Variance of the tilted law on `0..j` with `q = e^{-x}`.
pub fn box_variance(j: u64, x: f64) -> f64 {
    let jf = j as f64;
    if jf * x < SERIES_SWITCH {
        let j2 = jf * jf;
        return (j2 - 1.0) / 12.0 - (j2 * j2 - 1.0) * x * x / 240.0;
    }
    let term = |t: f64| {
        let s = (t / 2.0).sinh();
        1.0 / (4.0 * s * s)
    };
    (term(x) - jf * jf * term(jf * x)).max(0.0)
}

pub fn total_mean(n: usize, x: f64) -> f64 {
    (1..=n as u64).map(|j| box_mean(j, x)).sum()
}

pub fn total_variance(n: usize, x: f64) -> f64 {
    (1..=n as u64).map(|j| box_variance(j, x)).sum()
}

/// Solution of the mean-matching equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltParams {
    /// Tilt ratio in `(0, 1]`, for the target after reflection.
    pub q: f64,
    /// `-ln q`
    pub x: f64,
    /// The requested inversion count.
    pub target_mean: f64,
    /// Achieved total mean minus the (possibly reflected) target.
    pub residual: f64,
    /// Whether the target was reflected to `C(n,2) - m`.
    pub reflected: bool,
    /// Standard deviation of the tilted total.
    pub total_sd: f64,
}

/// Finds `q` whose tilted total mean equals `m`, by bisection on `x = -ln q`.
pub fn solve_tilt(n: usize, m: u64) -> Result<TiltParams> {
    let c = max_inversions(n);
    if m > c {
        return Err(Error::EmptyClass { n, m });
    }
    let reflected = 2 * m > c;
    let target = if reflected { c - m } else { m };
    let goal = target as f64;
    let x = if 2 * target == c {
        0.0
    } else if target == 0 {
        f64::INFINITY
    } else {
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        while total_mean(n, hi) > goal {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if total_mean(n, mid) > goal {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let (mean, var) = if x.is_finite() { (total_mean(n, x), total_variance(n, x)) } else { (0.0, 0.0) };
    Ok(TiltParams {
        q: (-x).exp(),
        x,
        target_mean: m as f64,
        residual: mean - goal,
        reflected,
        total_sd: var.sqrt(),
    })
}

/// Draws from the tilted law on `0..=last` with `x = -ln q`; `scale` is
/// `1 - q^{last + 1}`.
#[inline]
pub(crate) fn tilted_draw<R: Rng + ?Sized>(rng: &mut R, last: u32, x: f64, scale: f64) -> u32 {
    if x == 0.0 {
        return rng.random_range(0..=last);
    }
    let u: f64 = rng.random();
    let v = (-(-u * scale).ln_1p() / x).floor();
    if v >= last as f64 {
        last
    } else {
        v as u32
    }
}

/// Exactly uniform sampler for `S_{n,m}` by tilted rejection.
#[derive(Debug, Clone)]
pub struct TiltedSampler {
    n: usize,
    m: u64,
    params: TiltParams,
    scales: Vec<f64>,
    max_trials: u64,
}

impl TiltedSampler {
    pub fn new(n: usize, m: u64) -> Result<Self> {
        let params = solve_tilt(n, m)?;
        let scales = (1..=n as u64)
            .map(|j| if params.x.is_finite() { -(-(j as f64) * params.x).exp_m1() } else { 1.0 })
            .collect();
        Ok(TiltedSampler { n, m, params, scales, max_trials: DEFAULT_MAX_TRIALS })
    }

    pub fn with_max_trials(mut self, max_trials: u64) -> Self {
        self.max_trials = max_trials;
        self
    }

    pub fn params(&self) -> &TiltParams {
        &self.params
    }

    /// Fills `code` with one tilted proposal and reports whether its sum hits
    /// the (reflected) target. `code` is only partly written on rejection.
    pub fn propose<R: Rng + ?Sized>(&self, rng: &mut R, code: &mut [u32]) -> bool {
        let target = if self.params.reflected { max_inversions(self.n) - self.m } else { self.m };
        if !self.params.x.is_finite() {
            code.fill(0);
            return true;
        }
        let mut sum = 0u64;
        for j in (1..=self.n).rev() {
            let v = tilted_draw(rng, j as u32 - 1, self.params.x, self.scales[j - 1]);
            sum += v as u64;
            if sum > target {
                return false;
            }
            code[j - 1] = v;
        }
        sum == target
    }

    /// Uniform inversion sequence with sum `m`, and the number of proposals
    /// it took.
    pub fn sample_code_counted<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Vec<u32>, u64)> {
        let mut code = vec![0u32; self.n];
        for trial in 1..=self.max_trials {
            if self.propose(rng, &mut code) {
                if self.params.reflected {
                    for (j, e) in code.iter_mut().enumerate() {
                        *e = j as u32 - *e;
                    }
                }
                return Ok((code, trial));
            }
        }
        Err(Error::TrialsExhausted { trials: self.max_trials })
    }

    pub fn sample_code<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<u32>> {
        self.sample_code_counted(rng).map(|(code, _)| code)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Permutation> {
        let code = self.sample_code(rng)?;
        let p = Permutation::from_vec_unchecked(decode(&code));
        debug_assert_eq!(p.inv_count(), self.m);
        Ok(p)
    }
}

/// One exactly uniform draw from `S_{n,m}` by tilted rejection.
pub fn sample_perm_tilted<R: Rng + ?Sized>(n: usize, m: u64, rng: &mut R) -> Result<Permutation> {
    TiltedSampler::new(n, m)?.sample(rng)
}
