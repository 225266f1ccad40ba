//! Periodic 1+1 null lattice, spacelike surfaces and their growth.
//!
//! The lattice is `N` vertices wide. A spacelike surface cuts `2N` links, one
//! per qubit slot. Vertex `(col, row)` consumes and re-emits the links on the
//! slot pair
//!
//! ```text
//! a = (2 col + (row - 1) mod 2) mod 2N,   b = (a + 1) mod 2N
//! ```
//!
//! so odd rows pair `(0,1), (2,3), ...` and even rows pair `(1,2), ..., (2N-1,0)`.
//! A [`SurfaceFront`] stores, per slot, the row of the vertex that last emitted
//! the link on that slot (0 for the initial constant-time surface). A vertex is
//! ready when both of its slots sit at height `row - 1`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeGeometry {
    n_vertices: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId {
    /// Lattice time, starting at 1 for the first row above the initial surface.
    pub row: u64,
    pub col: usize,
}

impl VertexId {
    pub fn new(col: usize, row: u64) -> Self {
        VertexId { row, col }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(c={}, t={})", self.col, self.row)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SurfaceFront {
    heights: Vec<u64>,
}

impl SurfaceFront {
    /// The constant-time initial surface.
    pub fn zero(geometry: &LatticeGeometry) -> Self {
        SurfaceFront {
            heights: vec![0; geometry.n_slots()],
        }
    }

    /// Wraps raw heights without validation. Operations on the lattice check
    /// the front before use.
    pub fn from_heights(heights: Vec<u64>) -> Self {
        SurfaceFront { heights }
    }

    pub fn heights(&self) -> &[u64] {
        &self.heights
    }

    /// Lowest lattice time such that every vertex at or below it has been evolved.
    pub fn completed_rows(&self) -> u64 {
        self.heights.iter().copied().min().unwrap_or(0)
    }
}

/// An ordered vertex list meant to be a natural labelling of a stem.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stem(pub Vec<VertexId>);

impl LatticeGeometry {
    pub fn new(n_vertices: usize) -> Result<Self> {
        if n_vertices < 2 {
            return Err(Error::domain(format!(
                "lattice needs at least 2 vertices per row, got {n_vertices}"
            )));
        }
        Ok(LatticeGeometry { n_vertices })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_slots(&self) -> usize {
        2 * self.n_vertices
    }

    pub fn slots_of(&self, v: VertexId) -> (usize, usize) {
        debug_assert!(v.col < self.n_vertices && v.row >= 1);
        let n_slots = self.n_slots();
        let a = (2 * v.col + ((v.row - 1) % 2) as usize) % n_slots;
        (a, (a + 1) % n_slots)
    }

    fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v.col >= self.n_vertices || v.row == 0 {
            return Err(Error::domain(format!(
                "vertex {v} outside a lattice of width {}",
                self.n_vertices
            )));
        }
        Ok(())
    }

    /// Slot that shares the emitting vertex with `slot` when the link sits at `height`.
    fn partner_slot(&self, slot: usize, height: u64) -> usize {
        let n_slots = self.n_slots();
        // Row 0 uses the odd pairing, like every even row.
        let left_parity = ((height + 1) % 2) as usize;
        if slot % 2 == left_parity {
            (slot + 1) % n_slots
        } else {
            (slot + n_slots - 1) % n_slots
        }
    }

    /// Local spacelike check: each link's sibling (emitted by the same vertex)
    /// is either still on the surface or was consumed by exactly one later vertex.
    pub fn is_valid_front(&self, front: &SurfaceFront) -> bool {
        let h = &front.heights;
        if h.len() != self.n_slots() {
            return false;
        }
        h.iter().enumerate().all(|(s, &height)| {
            let p = h[self.partner_slot(s, height)];
            p == height || p == height + 1
        })
    }

    fn check_front(&self, front: &SurfaceFront) -> Result<()> {
        if front.heights.len() != self.n_slots() {
            return Err(Error::CorruptFront(format!(
                "front has {} slots, lattice has {}",
                front.heights.len(),
                self.n_slots()
            )));
        }
        if !self.is_valid_front(front) {
            return Err(Error::CorruptFront(format!(
                "heights {:?} are not a spacelike surface",
                front.heights
            )));
        }
        Ok(())
    }

    /// Vertices that can be evolved next, sorted by `(row, col)`.
    pub fn ready_vertices(&self, front: &SurfaceFront) -> Result<Vec<VertexId>> {
        self.check_front(front)?;
        let mut ready = self.ready_unchecked(front);
        ready.sort_unstable();
        Ok(ready)
    }

    fn ready_unchecked(&self, front: &SurfaceFront) -> Vec<VertexId> {
        let h = &front.heights;
        let n_slots = self.n_slots();
        (0..n_slots)
            .filter_map(|a| {
                let b = (a + 1) % n_slots;
                let height = h[a];
                // `a` must be the left slot of a pair in row `height + 1`.
                if h[b] != height || (height % 2) as usize != a % 2 {
                    return None;
                }
                let row = height + 1;
                let col = (a - (height % 2) as usize) / 2;
                Some(VertexId::new(col, row))
            })
            .collect()
    }

    pub fn is_ready(&self, front: &SurfaceFront, v: VertexId) -> bool {
        if v.col >= self.n_vertices || v.row == 0 || front.heights.len() != self.n_slots() {
            return false;
        }
        let (a, b) = self.slots_of(v);
        front.heights[a] == v.row - 1 && front.heights[b] == v.row - 1
    }

    /// Moves the front across `v` in place.
    pub fn advance_in_place(&self, front: &mut SurfaceFront, v: VertexId) -> Result<()> {
        self.check_vertex(v)?;
        if !self.is_ready(front, v) {
            return Err(Error::NotReady { vertex: v });
        }
        let (a, b) = self.slots_of(v);
        front.heights[a] = v.row;
        front.heights[b] = v.row;
        Ok(())
    }

    pub fn advance(&self, front: &SurfaceFront, v: VertexId) -> Result<SurfaceFront> {
        let mut next = front.clone();
        self.advance_in_place(&mut next, v)?;
        Ok(next)
    }

    /// Picks the next elementary motion uniformly among the ready vertices.
    ///
    /// Exactly one uniform draw `u` in `[0, 1)` is consumed; the ready set is
    /// sorted by `(row, col)` and entry `floor(u * count)` is returned.
    pub fn pick_next<R: Rng + ?Sized>(&self, front: &SurfaceFront, rng: &mut R) -> Result<VertexId> {
        let u: f64 = rng.gen();
        self.pick_with_draw(front, u)
    }

    pub fn pick_with_draw(&self, front: &SurfaceFront, u: f64) -> Result<VertexId> {
        let ready = self.ready_vertices(front)?;
        let idx = ((u * ready.len() as f64) as usize).min(ready.len() - 1);
        Ok(ready[idx])
    }

    /// True iff replaying `stem` from the zero front never evolves a vertex
    /// before it is ready (and never evolves one twice).
    pub fn validate_stem(&self, stem: &[VertexId]) -> bool {
        self.replay_stem(stem).is_ok()
    }

    pub fn replay_stem(&self, stem: &[VertexId]) -> Result<SurfaceFront> {
        let mut front = SurfaceFront::zero(self);
        for &v in stem {
            self.advance_in_place(&mut front, v)?;
        }
        Ok(front)
    }
}

impl LatticeGeometry {
    /// Up to `limit` linear extensions of the causal order restricted to the
    /// vertices of `stem`, in lexicographic order of choice.
    pub fn linear_extensions(&self, stem: &[VertexId], limit: usize) -> Result<Vec<Vec<VertexId>>> {
        if !self.validate_stem(stem) {
            return Err(Error::domain("vertex set is not a stem"));
        }
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(stem.len());
        let mut used = vec![false; stem.len()];
        self.extend(stem, &SurfaceFront::zero(self), &mut used, &mut prefix, limit, &mut out);
        Ok(out)
    }

    fn extend(
        &self,
        stem: &[VertexId],
        front: &SurfaceFront,
        used: &mut [bool],
        prefix: &mut Vec<VertexId>,
        limit: usize,
        out: &mut Vec<Vec<VertexId>>,
    ) {
        if out.len() >= limit {
            return;
        }
        if prefix.len() == stem.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..stem.len() {
            if used[k] || !self.is_ready(front, stem[k]) {
                continue;
            }
            let next = self.advance(front, stem[k]).expect("ready vertex");
            used[k] = true;
            prefix.push(stem[k]);
            self.extend(stem, &next, used, prefix, limit, out);
            prefix.pop();
            used[k] = false;
        }
    }
}

impl Stem {
    pub fn is_valid(&self, geometry: &LatticeGeometry) -> bool {
        geometry.validate_stem(&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(col: usize, row: u64) -> VertexId {
        VertexId::new(col, row)
    }

    #[test]
    fn linear_extensions_of_two_rows() {
        let g = LatticeGeometry::new(3).unwrap();
        let stem: Vec<_> = (0..3).map(|c| v(c, 1)).chain((0..3).map(|c| v(c, 2))).collect();
        let all = g.linear_extensions(&stem, usize::MAX).unwrap();
        // Brute force over all 720 orderings.
        let mut count = 0;
        let mut perm: Vec<usize> = (0..6).collect();
        permute(&mut perm, 0, &mut |p| {
            let order: Vec<_> = p.iter().map(|&i| stem[i]).collect();
            if g.validate_stem(&order) {
                count += 1;
            }
        });
        assert_eq!(all.len(), count);
        assert!(all.iter().all(|e| g.validate_stem(e)));
        assert_eq!(g.linear_extensions(&stem, 5).unwrap().len(), 5);
        assert!(g.linear_extensions(&[v(0, 2)], 5).is_err());
    }

    fn permute(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
        if k == p.len() {
            f(p);
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            permute(p, k + 1, f);
            p.swap(k, i);
        }
    }

    #[test]
    fn slot_pairs() {
        let g2 = LatticeGeometry::new(2).unwrap();
        assert_eq!(g2.slots_of(v(0, 1)), (0, 1));
        assert_eq!(g2.slots_of(v(1, 2)), (3, 0));
        let g4 = LatticeGeometry::new(4).unwrap();
        assert_eq!(g4.slots_of(v(2, 3)), (4, 5));
    }

    #[test]
    fn single_vertex_lattice_rejected() {
        assert!(LatticeGeometry::new(1).is_err());
        assert!(LatticeGeometry::new(0).is_err());
    }

    #[test]
    fn ready_sets() {
        let g = LatticeGeometry::new(2).unwrap();
        let ready = |h: Vec<u64>| g.ready_vertices(&SurfaceFront::from_heights(h)).unwrap();
        assert_eq!(ready(vec![0, 0, 0, 0]), vec![v(0, 1), v(1, 1)]);
        assert_eq!(ready(vec![1, 1, 0, 0]), vec![v(1, 1)]);
        assert_eq!(ready(vec![1, 1, 1, 1]), vec![v(0, 2), v(1, 2)]);
    }

    #[test]
    fn corrupted_front_is_an_error() {
        let g = LatticeGeometry::new(2).unwrap();
        let bad = SurfaceFront::from_heights(vec![1, 0, 0, 0]);
        assert!(matches!(g.ready_vertices(&bad), Err(Error::CorruptFront(_))));
        let short = SurfaceFront::from_heights(vec![0, 0]);
        assert!(matches!(g.ready_vertices(&short), Err(Error::CorruptFront(_))));
    }

    #[test]
    fn advancing() {
        let g = LatticeGeometry::new(2).unwrap();
        let zero = SurfaceFront::zero(&g);
        assert_eq!(g.advance(&zero, v(0, 1)).unwrap().heights(), &[1, 1, 0, 0]);
        let full = SurfaceFront::from_heights(vec![1, 1, 1, 1]);
        assert_eq!(g.advance(&full, v(1, 2)).unwrap().heights(), &[2, 1, 1, 2]);
        let bad = SurfaceFront::from_heights(vec![1, 0, 0, 0]);
        assert!(matches!(g.advance(&bad, v(0, 2)), Err(Error::NotReady { .. })));
    }

    #[test]
    fn draw_rule() {
        let g = LatticeGeometry::new(2).unwrap();
        let zero = SurfaceFront::zero(&g);
        assert_eq!(g.pick_with_draw(&zero, 0.3).unwrap(), v(0, 1));
        assert_eq!(g.pick_with_draw(&zero, 0.7).unwrap(), v(1, 1));
        let single = SurfaceFront::from_heights(vec![1, 1, 0, 0]);
        for u in [0.0, 0.5, 0.999_999] {
            assert_eq!(g.pick_with_draw(&single, u).unwrap(), v(1, 1));
        }
    }

    #[test]
    fn pick_next_is_uniform_on_two_choices() {
        let g = LatticeGeometry::new(2).unwrap();
        let zero = SurfaceFront::zero(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let hits = (0..10_000)
            .filter(|_| g.pick_next(&zero, &mut rng).unwrap() == v(0, 1))
            .count();
        // 3 sigma of Binomial(10^4, 1/2) is 150; the stated band is 200.
        assert!((4800..=5200).contains(&hits), "hits = {hits}");
    }

    #[test]
    fn stems() {
        let g = LatticeGeometry::new(2).unwrap();
        assert!(g.validate_stem(&[v(0, 1), v(1, 1), v(0, 2)]));
        assert!(!g.validate_stem(&[v(0, 2)]));
        assert!(g.validate_stem(&[v(1, 1), v(0, 1), v(0, 2)]));
        assert!(!g.validate_stem(&[v(0, 1), v(0, 1)]));
        assert!(Stem(vec![]).is_valid(&g));
    }

    #[test]
    fn n_motions_per_row() {
        let g = LatticeGeometry::new(8).unwrap();
        let mut front = SurfaceFront::zero(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut steps = 0;
        let mut row_counts = std::collections::BTreeMap::new();
        while front.completed_rows() < 5 {
            let next = g.pick_next(&front, &mut rng).unwrap();
            *row_counts.entry(next.row).or_insert(0) += 1;
            g.advance_in_place(&mut front, next).unwrap();
            steps += 1;
        }
        for row in 1..=5 {
            assert_eq!(row_counts[&row], 8);
        }
        assert!(steps >= 40);
    }
}
