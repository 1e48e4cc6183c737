//! Partial embeddings of family members into a bag, and the three profile
//! transformations the DP applies to sets of them.
//!
//! An entry `(member, mask, θ)` says: the induced subpattern of `member` on
//! the vertices in `mask` embeds into the processed graph so that exactly the
//! vertices in `dom θ` land in the current bag (at the positions θ gives) and
//! the rest land on already-forgotten vertices. A state's profile is the set
//! of all such entries that hold.

use rustc_hash::FxHashMap;

use super::family::{ForbiddenFamily, Mode, MAX_PATTERN_VERTICES};

pub const UNMAPPED: u8 = 0xFF;

/// Packed as member (8 bits), vertex mask (8 bits), then one byte of bag
/// position per pattern vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialEmbedding(u64);

impl PartialEmbedding {
    pub fn new(member: usize, mask: u8, theta: [u8; MAX_PATTERN_VERTICES]) -> Self {
        let mut x = member as u64 | (mask as u64) << 8;
        for (i, &t) in theta.iter().enumerate() {
            x |= (t as u64) << (16 + 8 * i);
        }
        PartialEmbedding(x)
    }

    /// The entry for pattern vertex `u` alone, placed at bag position `pos`.
    pub fn singleton(member: usize, u: usize, pos: usize) -> Self {
        let mut theta = [UNMAPPED; MAX_PATTERN_VERTICES];
        theta[u] = pos as u8;
        Self::new(member, 1 << u, theta)
    }

    pub fn member(self) -> usize {
        (self.0 & 0xFF) as usize
    }

    pub fn mask(self) -> u8 {
        (self.0 >> 8 & 0xFF) as u8
    }

    pub fn theta(self) -> [u8; MAX_PATTERN_VERTICES] {
        let mut t = [0u8; MAX_PATTERN_VERTICES];
        for (i, x) in t.iter_mut().enumerate() {
            *x = (self.0 >> (16 + 8 * i) & 0xFF) as u8;
        }
        t
    }

    pub fn image(self, u: usize) -> Option<usize> {
        let t = (self.0 >> (16 + 8 * u) & 0xFF) as u8;
        (t != UNMAPPED).then_some(t as usize)
    }

    /// Pattern vertices mapped into the bag.
    pub fn dom(self) -> u8 {
        let t = self.theta();
        (0..MAX_PATTERN_VERTICES).fold(0u8, |m, i| if t[i] != UNMAPPED { m | 1 << i } else { m })
    }

    pub fn with_mask(self, mask: u8) -> Self {
        PartialEmbedding(self.0 & !(0xFF << 8) | (mask as u64) << 8)
    }

    pub fn with_image(self, u: usize, pos: u8) -> Self {
        let shift = 16 + 8 * u;
        PartialEmbedding(self.0 & !(0xFF << shift) | (pos as u64) << shift)
    }

    /// The entry with the mask cleared: equal for entries sharing member and θ.
    fn theta_key(self) -> u64 {
        self.0 & !(0xFF << 8)
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn from_raw(x: u64) -> Self {
        PartialEmbedding(x)
    }

    fn map_positions(self, f: impl Fn(u8) -> u8) -> Self {
        let mut t = self.theta();
        for x in t.iter_mut() {
            if *x != UNMAPPED {
                *x = f(*x);
            }
        }
        Self::new(self.member(), self.mask(), t)
    }
}

/// Index of the bag position pair `{i, j}` in an edge bitmask.
pub fn pair_index(i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    b * (b - 1) / 2 + a
}

pub fn has_pair(h: u64, i: usize, j: usize) -> bool {
    h >> pair_index(i, j) & 1 == 1
}

/// Bag edge mask after inserting a new position `p` into a bag of size `b`
/// (positions `>= p` shift up); `adj` marks positions of the new bag joined
/// to `p`.
pub fn insert_position(h: u64, b: usize, p: usize, adj: u16) -> u64 {
    let up = |i: usize| if i >= p { i + 1 } else { i };
    let mut out = 0u64;
    for j in 0..b {
        for i in 0..j {
            if has_pair(h, i, j) {
                out |= 1 << pair_index(up(i), up(j));
            }
        }
    }
    for i in 0..=b {
        if adj >> i & 1 == 1 {
            out |= 1 << pair_index(i, p);
        }
    }
    out
}

/// Bag edge mask after removing position `p` from a bag of size `b`.
pub fn remove_position(h: u64, b: usize, p: usize) -> u64 {
    let down = |i: usize| if i > p { i - 1 } else { i };
    let mut out = 0u64;
    for j in 0..b {
        for i in 0..j {
            if i != p && j != p && has_pair(h, i, j) {
                out |= 1 << pair_index(down(i), down(j));
            }
        }
    }
    out
}

/// Profile operations for one family.
pub struct Profiles<'f> {
    pub family: &'f ForbiddenFamily,
    /// Drop entries that can never grow into a full member.
    pub prune: bool,
}

impl Profiles<'_> {
    fn induced(&self) -> bool {
        self.family.mode() == Mode::Induced
    }

    /// False when some unmapped vertex has a pattern neighbour outside the
    /// mask: that neighbour would have to land on a vertex adjacent to an
    /// already-forgotten one, which is impossible.
    pub fn alive(&self, e: PartialEmbedding) -> bool {
        let p = &self.family.members()[e.member()];
        let mask = e.mask();
        let mut unmapped = mask & !e.dom();
        while unmapped != 0 {
            let u = unmapped.trailing_zeros() as usize;
            unmapped &= unmapped - 1;
            if p.adj(u) & !mask != 0 {
                return false;
            }
        }
        true
    }

    pub fn is_full(&self, e: PartialEmbedding) -> bool {
        e.mask() == self.family.members()[e.member()].full_mask()
    }

    /// Introduces a vertex at position `p`; `adj` marks the new-bag positions
    /// it is joined to in the kept bag subgraph. `None` when a full member
    /// appears.
    pub fn introduce(
        &self,
        phi: &[PartialEmbedding],
        p: usize,
        adj: u16,
    ) -> Option<Vec<PartialEmbedding>> {
        let mut out = Vec::with_capacity(phi.len() * 2 + 8);
        let shift = |x: u8| if x as usize >= p { x + 1 } else { x };
        for &e in phi {
            let e = e.map_positions(shift);
            out.push(e);
            let pat = &self.family.members()[e.member()];
            let mask = e.mask();
            let dom = e.dom();
            for u in 0..pat.n() {
                if mask >> u & 1 == 1 {
                    continue;
                }
                let nb = pat.adj(u) & mask;
                if nb & !dom != 0 {
                    continue;
                }
                let fits = (0..pat.n()).filter(|&w| dom >> w & 1 == 1).all(|w| {
                    let pos = e.image(w).expect("mapped");
                    let joined = adj >> pos & 1 == 1;
                    if pat.has_edge(u, w) {
                        joined
                    } else {
                        !self.induced() || !joined
                    }
                });
                if !fits {
                    continue;
                }
                let grown = e.with_mask(mask | 1 << u).with_image(u, p as u8);
                if self.is_full(grown) {
                    return None;
                }
                out.push(grown);
            }
        }
        for (m, pat) in self.family.members().iter().enumerate() {
            for u in 0..pat.n() {
                out.push(PartialEmbedding::singleton(m, u, p));
            }
        }
        out.sort_unstable();
        out.dedup();
        Some(out)
    }

    /// Forgets the vertex at position `p`.
    pub fn forget(&self, phi: &[PartialEmbedding], p: usize) -> Vec<PartialEmbedding> {
        let mut out = Vec::with_capacity(phi.len());
        for &e in phi {
            let mut e = e;
            let t = e.theta();
            if let Some(u) = t.iter().position(|&x| x as usize == p) {
                e = e.with_image(u, UNMAPPED);
            }
            let e = e.map_positions(|x| if x as usize > p { x - 1 } else { x });
            if !self.prune || self.alive(e) {
                out.push(e);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Merges the profiles of two subtrees sharing the bag. Entries agreeing
    /// on θ combine when their forgotten parts are disjoint and no pattern
    /// edge runs between those parts (forgotten vertices of different
    /// subtrees are never adjacent). `None` when a full member appears.
    pub fn join(
        &self,
        a: &[PartialEmbedding],
        b: &[PartialEmbedding],
    ) -> Option<Vec<PartialEmbedding>> {
        let mut by_theta: FxHashMap<u64, Vec<PartialEmbedding>> = FxHashMap::default();
        for &e in b {
            by_theta.entry(e.theta_key()).or_default().push(e);
        }
        let mut out: Vec<PartialEmbedding> = a.iter().chain(b).copied().collect();
        for &e1 in a {
            let Some(group) = by_theta.get(&e1.theta_key()) else {
                continue;
            };
            let pat = &self.family.members()[e1.member()];
            let dom = e1.dom();
            let rest1 = e1.mask() & !dom;
            for &e2 in group {
                let rest2 = e2.mask() & !dom;
                if rest1 & rest2 != 0 || rest1 == 0 || rest2 == 0 {
                    continue;
                }
                let mut r = rest1;
                let mut crossing = false;
                while r != 0 {
                    let x = r.trailing_zeros() as usize;
                    r &= r - 1;
                    if pat.adj(x) & rest2 != 0 {
                        crossing = true;
                        break;
                    }
                }
                if crossing {
                    continue;
                }
                let merged = e1.with_mask(e1.mask() | e2.mask());
                if self.is_full(merged) {
                    return None;
                }
                out.push(merged);
            }
        }
        out.sort_unstable();
        out.dedup();
        Some(out)
    }
}
