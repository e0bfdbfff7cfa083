//! Forward sampling of inversion sequences from floating-point tail laws.
//!
//! Row `R_i` is the tilted law of `e_{i+1} + ... + e_n`. Given the remaining
//! sum `b`, the term `e_i` has conditional law proportional to
//! `q^v R_i(b - v)`; it is drawn by proposing from the tilted box law and
//! accepting with probability `R_i(b - v) / max R_i` over the window. Each
//! row is log-concave, hence unimodal, so the window maximum is read off the
//! stored mode.
//!
//! The rows are held in double precision and trimmed where they fall below
//! `1e-40` of their maximum, so the resulting law is uniform on `S_{n,m}` only
//! up to that rounding. Callers label output from this module approximate.

use rand::Rng;

use crate::error::{Error, Result};

use super::max_inversions;
use super::tilt::{solve_tilt, tilted_draw, TiltParams};

const TRIM: f64 = 1e-40;
const DIRECT_CONVOLUTION_MAX: usize = 48;
const PROPOSALS_BEFORE_FALLBACK: u32 = 64;
/// Rows are all kept in memory up to this many bytes; beyond it the full
/// sampler keeps checkpoints and recomputes blocks.
pub const STORED_ROW_BYTES: u128 = 512 * 1024 * 1024;

#[derive(Debug, Clone)]
struct Row {
    lo: usize,
    vals: Vec<f64>,
    mode: usize,
}

impl Row {
    fn delta() -> Row {
        Row { lo: 0, vals: vec![1.0], mode: 0 }
    }

    fn hi(&self) -> usize {
        self.lo + self.vals.len() - 1
    }

    #[inline]
    fn get(&self, s: usize) -> f64 {
        if s < self.lo {
            return 0.0;
        }
        self.vals.get(s - self.lo).copied().unwrap_or(0.0)
    }

    fn max_over(&self, a: usize, b: usize) -> f64 {
        if self.mode < a {
            self.get(a)
        } else if self.mode > b {
            self.get(b)
        } else {
            self.get(self.mode)
        }
    }
}

/// Tilted box law on `0..=c` as `(q, 1/Z)`.
#[derive(Debug, Clone, Copy)]
struct BoxLaw {
    q: f64,
    inv_z: f64,
}

impl BoxLaw {
    fn new(c: usize, x: f64) -> BoxLaw {
        let q = (-x).exp();
        let z = if x == 0.0 { (c + 1) as f64 } else { -(-((c + 1) as f64) * x).exp_m1() / -(-x).exp_m1() };
        BoxLaw { q, inv_z: 1.0 / z }
    }
}

/// `old` convolved with the tilted box law on `0..=c`, truncated at `cap`.
fn convolve(old: &Row, c: usize, x: f64, cap: usize) -> Row {
    let law = BoxLaw::new(c, x);
    let lo = old.lo;
    let hi = (old.hi() + c).min(cap);
    let mut vals = vec![0.0f64; hi + 1 - lo];
    if c <= DIRECT_CONVOLUTION_MAX {
        let weights: Vec<f64> = (0..=c).map(|v| law.q.powi(v as i32) * law.inv_z).collect();
        for (idx, out) in vals.iter_mut().enumerate() {
            let s = lo + idx;
            let mut acc = 0.0;
            for (v, w) in weights.iter().enumerate().take((s - lo).min(c) + 1) {
                acc += w * old.get(s - v);
            }
            *out = acc;
        }
    } else {
        let tail = law.q.powi(c as i32 + 1);
        let mut run = 0.0f64;
        for (idx, out) in vals.iter_mut().enumerate() {
            let s = lo + idx;
            run = law.q * run + old.get(s);
            if s > c {
                run -= tail * old.get(s - c - 1);
            }
            run = run.max(0.0);
            *out = run * law.inv_z;
        }
    }
    trim(lo, vals)
}

fn trim(lo: usize, mut vals: Vec<f64>) -> Row {
    let (mode, max) = vals
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let floor = max * TRIM;
    let first = vals.iter().position(|&v| v >= floor).unwrap_or(0);
    let last = vals.iter().rposition(|&v| v >= floor).unwrap_or(0);
    vals.truncate(last + 1);
    vals.drain(..first);
    Row { lo: lo + first, vals, mode: lo + mode }
}

#[derive(Debug, Clone)]
enum Storage {
    /// `rows[i - 1] = R_i` for `i = 1..=stored`.
    Stored(Vec<Row>),
    /// `R_i` for every multiple `i` of `block` below `n`.
    Checkpoints { block: usize, rows: Vec<Row> },
}

/// Approximately uniform sampler for `S_{n,m}` or for the first `p` terms
/// of its inversion sequences.
#[derive(Debug, Clone)]
pub struct ConditionalSampler {
    n: usize,
    m: u64,
    target: usize,
    prefix: usize,
    params: TiltParams,
    storage: Storage,
}

impl ConditionalSampler {
    /// Sampler for whole inversion sequences.
    pub fn full(n: usize, m: u64) -> Result<Self> {
        Self::build(n, m, n)
    }

    /// Sampler for `(e_1, ..., e_p)` only.
    pub fn prefix(n: usize, m: u64, p: usize) -> Result<Self> {
        if p > n {
            return Err(Error::Domain(format!("prefix length {p} exceeds n = {n}")));
        }
        Self::build(n, m, p)
    }

    fn build(n: usize, m: u64, prefix: usize) -> Result<Self> {
        let params = solve_tilt(n, m)?;
        let c = max_inversions(n);
        let target = if params.reflected { c - m } else { m } as usize;
        let needed = prefix.min(n.saturating_sub(1));
        let x = params.x;
        let storage = if target == 0 || needed == 0 {
            Storage::Stored(Vec::new())
        } else if needed as u128 * (target as u128 + 1) * 8 <= STORED_ROW_BYTES || needed < n - 1 {
            let mut rows = vec![Row::delta(); needed];
            let mut row = Row::delta();
            for i in (1..n).rev() {
                row = convolve(&row, i, x, target);
                if i <= needed {
                    rows[i - 1] = row.clone();
                }
            }
            Storage::Stored(rows)
        } else {
            let block = (n as f64).sqrt().ceil() as usize;
            let mut rows = Vec::new();
            let mut row = Row::delta();
            for i in (1..n).rev() {
                row = convolve(&row, i, x, target);
                if i % block == 0 {
                    rows.push(row.clone());
                }
            }
            rows.reverse();
            Storage::Checkpoints { block, rows }
        };
        let sampler = ConditionalSampler { n, m, target, prefix, params, storage };
        if target > 0 && needed > 0 {
            let r1 = match &sampler.storage {
                Storage::Stored(rows) => rows[0].get(target),
                Storage::Checkpoints { block, .. } => sampler.block_rows(1, (*block - 1).min(n - 1))[0].get(target),
            };
            if r1 <= 0.0 {
                return Err(Error::Numerical(format!("tail law vanishes at m = {m} for n = {n}")));
            }
        }
        Ok(sampler)
    }

    pub fn params(&self) -> &TiltParams {
        &self.params
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix
    }

    /// Whether all rows are held in memory.
    pub fn is_stored(&self) -> bool {
        matches!(self.storage, Storage::Stored(_))
    }

    /// Rows `R_a ..= R_e` recomputed from the next checkpoint.
    fn block_rows(&self, a: usize, e: usize) -> Vec<Row> {
        let Storage::Checkpoints { block, rows } = &self.storage else {
            unreachable!("block rows requested from stored sampler")
        };
        let start = e + 1;
        let mut row = if start >= self.n { Row::delta() } else { rows[start / block - 1].clone() };
        let mut out = vec![Row::delta(); e + 1 - a];
        for i in (a..start).rev() {
            row = convolve(&row, i, self.params.x, self.target);
            out[i - a] = row.clone();
        }
        out
    }

    /// Draws `e_i` given remaining sum `b`, with `row = R_i`.
    fn step<R: Rng + ?Sized>(&self, rng: &mut R, i: usize, b: usize, row: &Row) -> Result<usize> {
        let last = (i - 1).min(b);
        if last == 0 {
            return Ok(0);
        }
        let peak = row.max_over(b - last, b);
        if peak <= 0.0 {
            return Err(Error::Numerical(format!("no mass left at position {i}, remaining {b}")));
        }
        let x = self.params.x;
        let scale = if x == 0.0 { 1.0 } else { -(-((last + 1) as f64) * x).exp_m1() };
        for _ in 0..PROPOSALS_BEFORE_FALLBACK {
            let v = tilted_draw(rng, last as u32, x, scale) as usize;
            let u: f64 = rng.random();
            if u * peak < row.get(b - v) {
                return Ok(v);
            }
        }
        let q = (-x).exp();
        let mut weights = Vec::with_capacity(last + 1);
        let mut qv = 1.0;
        for v in 0..=last {
            weights.push(qv * row.get(b - v));
            qv *= q;
        }
        let total: f64 = weights.iter().sum();
        let mut u = rng.random::<f64>() * total;
        for (v, w) in weights.iter().enumerate() {
            if u < *w {
                return Ok(v);
            }
            u -= w;
        }
        Ok(weights.iter().rposition(|&w| w > 0.0).unwrap_or(0))
    }

    fn finish(&self, code: &mut [u32]) {
        if self.params.reflected {
            for (j, e) in code.iter_mut().enumerate() {
                *e = j as u32 - *e;
            }
        }
    }

    /// One code of length `prefix_len()`.
    pub fn sample_code<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<u32>> {
        Ok(self.sample_codes(1, rng)?.pop().expect("one code"))
    }

    /// `count` independent codes of length `prefix_len()`.
    pub fn sample_codes<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Vec<Vec<u32>>> {
        let len = self.prefix;
        let mut codes = vec![vec![0u32; len]; count];
        let mut remaining = vec![self.target; count];
        if self.target > 0 {
            match &self.storage {
                Storage::Stored(rows) => {
                    for (code, b) in codes.iter_mut().zip(remaining.iter_mut()) {
                        for i in 1..=len.min(self.n - 1) {
                            let v = self.step(rng, i, *b, &rows[i - 1])?;
                            code[i - 1] = v as u32;
                            *b -= v;
                        }
                    }
                }
                Storage::Checkpoints { block, .. } => {
                    let mut a = 1;
                    while a < self.n {
                        let e = ((a / block + 1) * block - 1).min(self.n - 1);
                        let rows = self.block_rows(a, e);
                        for (code, b) in codes.iter_mut().zip(remaining.iter_mut()) {
                            for i in a..=e {
                                let v = self.step(rng, i, *b, &rows[i - a])?;
                                code[i - 1] = v as u32;
                                *b -= v;
                            }
                        }
                        a = e + 1;
                    }
                }
            }
            if len == self.n {
                for (code, b) in codes.iter_mut().zip(&remaining) {
                    if *b >= self.n {
                        return Err(Error::Numerical(format!("last term {b} exceeds capacity")));
                    }
                    code[self.n - 1] = *b as u32;
                }
            }
        }
        for code in &mut codes {
            self.finish(code);
        }
        Ok(codes)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::decode;
    use crate::qcount::{capacity_poly, mahonian};
    use crate::sampler::RngStream;
    use num_traits::ToPrimitive;

    #[test]
    fn rows_match_exact_tilted_laws() {
        let (n, m) = (120usize, 1500u64);
        let s = ConditionalSampler::prefix(n, m, n - 1).unwrap();
        let Storage::Stored(rows) = &s.storage else { panic!() };
        let q = s.params.q;
        for i in [1usize, 5, 40, 70, 118, 119] {
            let caps: Vec<usize> = (i..n).collect();
            let counts = capacity_poly(&caps, m as usize);
            let z: f64 = caps.iter().map(|&c| (0..=c).map(|v| q.powi(v as i32)).sum::<f64>()).product();
            let peak = rows[i - 1].get(rows[i - 1].mode);
            for sum in 0..=m as usize {
                let want = counts.get(sum).to_f64().unwrap() * q.powi(sum as i32) / z;
                let got = rows[i - 1].get(sum);
                assert!((got - want).abs() <= 1e-9 * want + 1e-12 * peak, "i={i} s={sum}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn full_codes_have_target_sum() {
        let mut rng = RngStream::new(10, 0).rng();
        for (n, m) in [(12usize, 30u64), (12, 50), (100, 600), (100, 4000), (300, 20000)] {
            let s = ConditionalSampler::full(n, m).unwrap();
            for code in s.sample_codes(20, &mut rng).unwrap() {
                assert_eq!(code.iter().map(|&e| e as u64).sum::<u64>(), m);
                assert!(code.iter().enumerate().all(|(j, &e)| (e as usize) <= j));
            }
        }
    }

    #[test]
    fn checkpointed_rows_agree_with_stored() {
        let (n, m) = (60usize, 500u64);
        let stored = ConditionalSampler::prefix(n, m, n - 1).unwrap();
        let Storage::Stored(all) = &stored.storage else { panic!() };
        let block = 8;
        let mut rows = Vec::new();
        for i in (1..n).rev() {
            if i % block == 0 {
                rows.push(all[i - 1].clone());
            }
        }
        rows.reverse();
        let cp = ConditionalSampler { storage: Storage::Checkpoints { block, rows }, prefix: n, ..stored.clone() };
        for (a, e) in [(1, 7), (9, 15), (57, 59)] {
            for (off, row) in cp.block_rows(a, e).iter().enumerate() {
                let want = &all[a + off - 1];
                assert_eq!(row.lo, want.lo);
                assert_eq!(row.vals, want.vals);
            }
        }
        let mut rng = RngStream::new(11, 0).rng();
        for code in cp.sample_codes(30, &mut rng).unwrap() {
            assert_eq!(code.iter().map(|&e| e as u64).sum::<u64>(), m);
        }
    }

    #[test]
    fn small_class_frequencies() {
        // S_{5,4} has 20 elements; 40000 draws give 2000 expected per cell.
        let s = ConditionalSampler::full(5, 4).unwrap();
        let mut rng = RngStream::new(12, 0).rng();
        let mut counts = std::collections::HashMap::new();
        for code in s.sample_codes(40_000, &mut rng).unwrap() {
            *counts.entry(decode(&code)).or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), mahonian(5, 4).to_usize().unwrap());
        assert!(counts.values().all(|&c| (1800..2200).contains(&c)), "{counts:?}");
    }

    #[test]
    fn reflected_and_trivial_targets() {
        let mut rng = RngStream::new(13, 0).rng();
        let s = ConditionalSampler::full(30, 400).unwrap();
        assert!(s.params().reflected);
        for code in s.sample_codes(10, &mut rng).unwrap() {
            assert_eq!(code.iter().map(|&e| e as u64).sum::<u64>(), 400);
        }
        let zero = ConditionalSampler::full(10, 0).unwrap().sample_code(&mut rng).unwrap();
        assert!(zero.iter().all(|&e| e == 0));
        let top = ConditionalSampler::full(10, 45).unwrap().sample_code(&mut rng).unwrap();
        assert_eq!(top, (0..10).collect::<Vec<u32>>());
    }
}
