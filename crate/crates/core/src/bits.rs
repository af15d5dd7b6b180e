//! Word-slice bitset helpers shared by the dense graph code.

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
pub(crate) fn test(set: &[u64], i: usize) -> bool {
    (set[i >> 6] >> (i & 63)) & 1 == 1
}

#[inline]
pub(crate) fn insert(set: &mut [u64], i: usize) {
    set[i >> 6] |= 1u64 << (i & 63);
}

#[inline]
pub(crate) fn remove(set: &mut [u64], i: usize) {
    set[i >> 6] &= !(1u64 << (i & 63));
}

#[inline]
pub(crate) fn count(set: &[u64]) -> usize {
    set.iter().map(|w| w.count_ones() as usize).sum()
}

#[inline]
pub(crate) fn count_and(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

#[inline]
pub(crate) fn is_empty(set: &[u64]) -> bool {
    set.iter().all(|&w| w == 0)
}

/// Set with bits `0..n` on.
pub(crate) fn full(n: usize) -> Vec<u64> {
    let mut v = vec![u64::MAX; words_for(n)];
    if n % 64 != 0 {
        if let Some(last) = v.last_mut() {
            *last = (1u64 << (n % 64)) - 1;
        }
    }
    v
}

pub(crate) fn first(set: &[u64]) -> Option<usize> {
    set.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

/// Iterator over set bits in increasing order.
pub(crate) struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let tz = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + tz);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

pub(crate) fn ones(words: &[u64]) -> Ones<'_> {
    Ones {
        words,
        idx: 0,
        cur: words.first().copied().unwrap_or(0),
    }
}
