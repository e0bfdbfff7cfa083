//! Random generation of permutations with a fixed number of inversions,
//! weak compositions and patterns of prescribed inversion density.
//!
//! Two sampler kinds are offered. `Dp` draws inversion sequences term by
//! term from exact big-integer tables when they fit in memory, and from
//! floating-point tail laws otherwise (see [`ConditionalSampler`]). `Tilted`
//! uses rejection from independent tilted terms and is exactly uniform at any
//! size, at a cost growing like the standard deviation of the tilted total.

mod conditional;
mod dp;
mod rng;
mod tilt;

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::permutation::{decode, Permutation};

pub use conditional::{ConditionalSampler, STORED_ROW_BYTES};
pub use dp::{dp_exact_feasible, dp_table_bytes, DpSampler, DP_TABLE_BYTES};
pub use rng::{chunk_len, mix64, run_streams, RngStream, StreamRng, DEFAULT_SEED, DEFAULT_STREAMS};
pub use tilt::{
    box_mean, box_variance, sample_perm_tilted, solve_tilt, total_mean, total_variance, TiltParams,
    TiltedSampler, DEFAULT_MAX_TRIALS,
};

pub(crate) fn max_inversions(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Dp,
    Tilted,
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplerKind::Dp => "dp",
            SamplerKind::Tilted => "tilted",
        })
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "dp" => Ok(SamplerKind::Dp),
            "tilted" => Ok(SamplerKind::Tilted),
            other => Err(Error::Parse(format!("unknown sampler '{other}', expected dp or tilted"))),
        }
    }
}

#[derive(Debug, Clone)]
enum Engine {
    Exact(Box<DpSampler>),
    Conditional(ConditionalSampler),
    Tilted(TiltedSampler),
}

/// A sampler for uniform elements of `S_{n,m}`, or for the inversion-sequence
/// prefix `(e_1, ..., e_p)` of one. The prefix determines the pattern formed
/// by the first `p` points.
#[derive(Debug, Clone)]
pub struct PermSampler {
    n: usize,
    m: u64,
    prefix: usize,
    engine: Engine,
}

impl PermSampler {
    pub fn new(kind: SamplerKind, n: usize, m: u64) -> Result<Self> {
        Self::prefix(kind, n, m, n)
    }

    pub fn prefix(kind: SamplerKind, n: usize, m: u64, p: usize) -> Result<Self> {
        if m > max_inversions(n) {
            return Err(Error::EmptyClass { n, m });
        }
        if p > n {
            return Err(Error::Domain(format!("prefix length {p} exceeds n = {n}")));
        }
        let engine = match kind {
            SamplerKind::Tilted => Engine::Tilted(TiltedSampler::new(n, m)?),
            SamplerKind::Dp if dp_exact_feasible(n, m) => Engine::Exact(Box::new(DpSampler::new(n, m)?)),
            SamplerKind::Dp => Engine::Conditional(ConditionalSampler::prefix(n, m, p)?),
        };
        Ok(PermSampler { n, m, prefix: p, engine })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix
    }

    /// False when draws come from the floating-point tail laws.
    pub fn is_exact(&self) -> bool {
        !matches!(self.engine, Engine::Conditional(_))
    }

    pub fn engine_name(&self) -> &'static str {
        match self.engine {
            Engine::Exact(_) => "dp-exact",
            Engine::Conditional(_) => "dp-float",
            Engine::Tilted(_) => "tilted",
        }
    }

    /// Inversion-sequence prefix of length `prefix_len()`.
    pub fn sample_code<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<u32>> {
        let mut code = match &self.engine {
            Engine::Exact(dp) => dp.sample_code(rng),
            Engine::Conditional(c) => return c.sample_code(rng),
            Engine::Tilted(t) => t.sample_code(rng)?,
        };
        code.truncate(self.prefix);
        Ok(code)
    }

    pub fn sample_codes<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Vec<Vec<u32>>> {
        match &self.engine {
            Engine::Conditional(c) => c.sample_codes(count, rng),
            _ => (0..count).map(|_| self.sample_code(rng)).collect(),
        }
    }

    /// The pattern of the first `prefix_len()` points; the whole permutation
    /// when the sampler was built with [`PermSampler::new`].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Permutation> {
        let p = Permutation::from_vec_unchecked(decode(&self.sample_code(rng)?));
        debug_assert!(self.prefix < self.n || p.inv_count() == self.m);
        Ok(p)
    }
}

/// One draw from `S_{n,m}` with the `dp` sampler.
pub fn sample_perm_dp<R: Rng + ?Sized>(n: usize, m: u64, rng: &mut R) -> Result<Permutation> {
    PermSampler::new(SamplerKind::Dp, n, m)?.sample(rng)
}

/// Uniform weak `t`-composition of `s`, read off a uniform choice of `t - 1`
/// bar positions among `s + t - 1` slots.
pub fn sample_weak_composition<R: Rng + ?Sized>(t: usize, s: u64, rng: &mut R) -> Result<Vec<u64>> {
    if t == 0 {
        return Err(Error::Domain("a weak composition needs at least one part".into()));
    }
    let slots = s as usize + t - 1;
    let mut bars = index::sample(rng, slots, t - 1).into_vec();
    bars.sort_unstable();
    let mut parts = Vec::with_capacity(t);
    let mut prev = 0usize;
    for &b in &bars {
        parts.push((b - prev) as u64);
        prev = b + 1;
    }
    parts.push((slots - prev) as u64);
    Ok(parts)
}

/// `round(rho * C(k,2))`, halves going to the even neighbour.
pub fn density_target(k: usize, rho: f64) -> u64 {
    (rho * max_inversions(k) as f64).round_ties_even() as u64
}

/// Uniform `k`-permutation with `density_target(k, rho)` inversions.
pub fn sample_pattern_with_density<R: Rng + ?Sized>(k: usize, rho: f64, rng: &mut R) -> Result<Permutation> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Domain(format!("density {rho} outside [0, 1]")));
    }
    sample_perm_dp(k, density_target(k, rho), rng)
}

/// Inversion sequence of a uniform `n`-permutation: independent terms
/// uniform on `0..j`.
pub fn sample_uniform_code<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<u32> {
    (1..=n as u32).map(|j| rng.random_range(0..j)).collect()
}
