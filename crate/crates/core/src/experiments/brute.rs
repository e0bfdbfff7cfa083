//! Exhaustive enumeration of `S_n` for small `n`, written without the
//! counting engine so that it can serve as an oracle for it.

use std::collections::BTreeMap;

/// All permutations of `1..=n` (Heap's algorithm).
pub fn enumerate(n: usize) -> Vec<Vec<u32>> {
    let mut a: Vec<u32> = (1..=n as u32).collect();
    let mut out = vec![a.clone()];
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

fn inversions(p: &[u32]) -> u64 {
    let mut count = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                count += 1;
            }
        }
    }
    count
}

fn ranks(window: &[u32]) -> Vec<u32> {
    window.iter().map(|&v| 1 + window.iter().filter(|&&w| w < v).count() as u32).collect()
}

/// Tallies over every permutation of `1..=n`.
#[derive(Debug, Clone, Default)]
pub struct Census {
    pub n: usize,
    /// `mahonian[m]` permutations with `m` inversions.
    pub mahonian: Vec<u64>,
    /// `(k, m, pattern)` -> permutations with `m` inversions whose first `k`
    /// points form `pattern`.
    pub prefix: BTreeMap<(usize, u64, Vec<u32>), u64>,
    /// `(k, m)` -> permutations with `m` inversions split by `p(1) < p(1+k)`
    /// and `p(1) > p(1+k)`.
    pub gaps: BTreeMap<(usize, u64), (u64, u64)>,
}

impl Census {
    /// Census of `S_n` with prefixes of length up to `max_k`.
    pub fn new(n: usize, max_k: usize) -> Census {
        let top = n * n.saturating_sub(1) / 2;
        let mut census = Census { n, mahonian: vec![0; top + 1], ..Census::default() };
        for p in enumerate(n) {
            let m = inversions(&p);
            census.mahonian[m as usize] += 1;
            for k in 0..=max_k.min(n) {
                *census.prefix.entry((k, m, ranks(&p[..k]))).or_insert(0) += 1;
            }
            for k in 1..n {
                let e = census.gaps.entry((k, m)).or_insert((0, 0));
                if p[0] < p[k] {
                    e.0 += 1;
                } else {
                    e.1 += 1;
                }
            }
        }
        census
    }

    pub fn prefix_count(&self, k: usize, m: u64, pattern: &[u32]) -> u64 {
        self.prefix.get(&(k, m, pattern.to_vec())).copied().unwrap_or(0)
    }

    pub fn gap_counts(&self, k: usize, m: u64) -> (u64, u64) {
        self.gaps.get(&(k, m)).copied().unwrap_or((0, 0))
    }
}
