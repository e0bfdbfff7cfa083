//! The inversion-preserving shift bijection.
//!
//! `psi_shift` drops the last point of a permutation and prepends a new
//! first point with value `n + 1 - p(n)`, nudging the values in between by
//! one so that the result is again a permutation with the same number of
//! inversions. Every consecutive pattern occurring at position `j <= n - k`
//! of the input occurs at position `j + 1` of the output.

use super::Permutation;

/// Applies the shift bijection. Length-one permutations map to themselves.
pub fn psi_shift(p: &Permutation) -> Permutation {
    let n = p.len();
    if n <= 1 {
        return p.clone();
    }
    let vals = p.values();
    let last = vals[n - 1];
    let first = n as u32 + 1 - last;
    let mut out = Vec::with_capacity(n);
    out.push(first);
    for &v in &vals[..n - 1] {
        let w = if first <= v && v < last {
            v + 1
        } else if last < v && v <= first {
            v - 1
        } else {
            v
        };
        out.push(w);
    }
    Permutation::from_vec_unchecked(out)
}

/// Inverse of [`psi_shift`].
pub fn psi_unshift(p: &Permutation) -> Permutation {
    let n = p.len();
    if n <= 1 {
        return p.clone();
    }
    let vals = p.values();
    let first = vals[0];
    let last = n as u32 + 1 - first;
    let mut out = Vec::with_capacity(n);
    for &w in &vals[1..] {
        let v = if first < last && first < w && w <= last {
            w - 1
        } else if last < first && last <= w && w < first {
            w + 1
        } else {
            w
        };
        out.push(v);
    }
    out.push(last);
    Permutation::from_vec_unchecked(out)
}
