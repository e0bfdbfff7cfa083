//! Binary indexed tree over positions `1..=n`, used for order statistics.

#[derive(Debug, Clone)]
pub(crate) struct Fenwick {
    tree: Vec<u32>,
    log: u32,
}

impl Fenwick {
    pub(crate) fn new(n: usize) -> Self {
        let log = if n == 0 { 0 } else { usize::BITS - 1 - n.leading_zeros() };
        Fenwick { tree: vec![0; n + 1], log }
    }

    /// A tree in which every position `1..=n` is present once.
    pub(crate) fn full(n: usize) -> Self {
        let mut tree = vec![1u32; n + 1];
        tree[0] = 0;
        for i in 1..=n {
            let parent = i + (i & i.wrapping_neg());
            if parent <= n {
                tree[parent] += tree[i];
            }
        }
        let log = if n == 0 { 0 } else { usize::BITS - 1 - n.leading_zeros() };
        Fenwick { tree, log }
    }

    pub(crate) fn add(&mut self, mut i: usize, delta: i32) {
        let n = self.tree.len() - 1;
        while i <= n {
            self.tree[i] = self.tree[i].wrapping_add_signed(delta);
            i += i & i.wrapping_neg();
        }
    }

    /// Number of present positions in `1..=i`.
    pub(crate) fn prefix(&self, mut i: usize) -> u32 {
        let mut acc = 0;
        while i > 0 {
            acc += self.tree[i];
            i &= i - 1;
        }
        acc
    }

    /// Smallest position `p` with `prefix(p) >= rank` (`rank >= 1`).
    pub(crate) fn select(&self, mut rank: u32) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = 1usize << self.log;
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] < rank {
                pos = next;
                rank -= self.tree[next];
            }
            step >>= 1;
        }
        pos + 1
    }
}
