//! Particle-number bookkeeping.
//!
//! Number-conserving operators never move weight between popcount sectors, so
//! amplitudes outside the sectors a state started in stay exactly zero. The
//! kernels use this to visit only the basis indices that can be nonzero; the
//! skipped entries would be `0 * x + 0 * y = 0` anyway, so results are
//! bit-identical to a dense sweep.

use std::fmt;

/// Set of particle numbers `m` in `0..=2N` a state may have weight in.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SectorSet(u64);

impl SectorSet {
    pub fn empty() -> Self {
        SectorSet(0)
    }

    pub fn full(n_slots: usize) -> Self {
        SectorSet((1u64 << (n_slots + 1)) - 1)
    }

    pub fn single(m: usize) -> Self {
        SectorSet(1 << m)
    }

    pub fn insert(&mut self, m: usize) {
        self.0 |= 1 << m;
    }

    pub fn contains(&self, m: usize) -> bool {
        m < 64 && self.0 & (1 << m) != 0
    }

    pub fn is_full(&self, n_slots: usize) -> bool {
        *self == SectorSet::full(n_slots)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(move |&m| self.contains(m))
    }

    pub fn union(self, other: SectorSet) -> SectorSet {
        SectorSet(self.0 | other.0)
    }

    pub fn intersection(self, other: SectorSet) -> SectorSet {
        SectorSet(self.0 & other.0)
    }

    /// Image under the global bit flip `m -> 2N - m`.
    pub fn mirrored(self, n_slots: usize) -> SectorSet {
        let mut out = SectorSet::empty();
        for m in self.iter() {
            out.insert(n_slots - m);
        }
        out
    }
}

impl fmt::Debug for SectorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Calls `f` on every `width`-bit integer with exactly `k` ones, ascending.
fn for_each_combination(width: usize, k: usize, mut f: impl FnMut(usize)) {
    if k > width {
        return;
    }
    if k == 0 {
        f(0);
        return;
    }
    let limit = 1usize << width;
    let mut x = (1usize << k) - 1;
    while x < limit {
        f(x);
        // Gosper's hack: next integer with the same popcount.
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
}

#[inline]
fn insert_zero_bit(x: usize, pos: usize) -> usize {
    let low = x & ((1 << pos) - 1);
    ((x >> pos) << (pos + 1)) | low
}

/// Visits every basis index whose popcount lies in `sectors`.
pub(crate) fn for_each_index(n_slots: usize, sectors: SectorSet, mut f: impl FnMut(usize)) {
    if sectors.is_full(n_slots) {
        (0..1usize << n_slots).for_each(f);
        return;
    }
    for m in sectors.iter().filter(|&m| m <= n_slots) {
        for_each_combination(n_slots, m, &mut f);
    }
}

/// Visits every group base (index with bits `a` and `b` cleared) whose four
/// members `base | {0, b, a, a+b}` can intersect `sectors`.
pub(crate) fn for_each_group(
    n_slots: usize,
    a: usize,
    b: usize,
    sectors: SectorSet,
    mut f: impl FnMut(usize),
) {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let free = n_slots - 2;
    let deposit = |x: usize| insert_zero_bit(insert_zero_bit(x, lo), hi);
    if sectors.is_full(n_slots) {
        for x in 0..1usize << free {
            f(deposit(x));
        }
        return;
    }
    let mut wanted = 0u64;
    for m in sectors.iter() {
        for k in m.saturating_sub(2)..=m.min(free) {
            wanted |= 1 << k;
        }
    }
    for k in (0..=free).filter(|k| wanted & (1 << k) != 0) {
        for_each_combination(free, k, |x| f(deposit(x)));
    }
}
