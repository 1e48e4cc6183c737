//! The state space of the family DP: the entry domain for a bag subgraph,
//! an independent checker of the closure rules, and exhaustive enumeration
//! of valid states for small bags.
//!
//! For a bag of size `b` with kept edges `H` (a bitmask over position pairs),
//! the domain holds every entry whose θ is injective into the bag, preserves
//! pattern edges among its domain (and non-edges in induced mode), and whose
//! unmapped vertices have all their pattern neighbours inside the mask. A
//! profile is valid when:
//!
//! * (a) every entry with all of its mask mapped is present;
//! * (b) present entries are closed under restriction to sub-masks that stay
//!   in the domain;
//! * (c) a present entry extends by any vertex whose pattern neighbours in
//!   the mask are all mapped, onto any free bag position adjacent to their
//!   images (in induced mode only for fully mapped entries, and the position
//!   must also avoid images of non-neighbours);
//! * (d) no entry covers a whole member.

use std::collections::BTreeSet;
use std::sync::{Arc, Mutex};

use rustc_hash::FxHashMap;

use super::embedding::{has_pair, PartialEmbedding, Profiles, UNMAPPED};
use super::family::{ForbiddenFamily, Mode, MAX_PATTERN_VERTICES};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// A kept bag subgraph together with a profile.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneralState {
    pub h: u64,
    pub phi: Vec<PartialEmbedding>,
}

/// An induced subpattern: a member and a non-empty vertex subset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubPattern {
    pub member: usize,
    pub mask: u8,
}

/// Every induced subpattern of every member.
pub fn enumerate_patterns(family: &ForbiddenFamily) -> Vec<SubPattern> {
    let mut out = Vec::new();
    for (m, p) in family.members().iter().enumerate() {
        for mask in 1..=p.full_mask() {
            out.push(SubPattern { member: m, mask });
        }
    }
    out
}

/// `log2` of the state-count bound `2^(C(b,2) + |F|(b+2)^r)` for bags of size `b`.
pub fn state_bound_log2(b: usize, family: &ForbiddenFamily) -> f64 {
    let pairs = (b * b.saturating_sub(1) / 2) as f64;
    pairs + family.len() as f64 * ((b + 2) as f64).powi(family.r() as i32)
}

fn theta_ok(family: &ForbiddenFamily, e: PartialEmbedding, b: usize, h: u64) -> bool {
    let p = &family.members()[e.member()];
    let mask = e.mask();
    let t = e.theta();
    let mut used = 0u32;
    for (u, &tu) in t.iter().enumerate().take(MAX_PATTERN_VERTICES) {
        if tu == UNMAPPED {
            continue;
        }
        if u >= p.n() || mask >> u & 1 == 0 || tu as usize >= b || used >> tu & 1 == 1 {
            return false;
        }
        used |= 1 << tu;
    }
    for u in 0..p.n() {
        for w in u + 1..p.n() {
            if let (Some(x), Some(y)) = (e.image(u), e.image(w)) {
                let present = has_pair(h, x, y);
                if p.has_edge(u, w) && !present {
                    return false;
                }
                if family.mode() == Mode::Induced && !p.has_edge(u, w) && present {
                    return false;
                }
            }
        }
    }
    true
}

/// True when `e` lies in the entry domain for a bag of size `b` with kept
/// edges `h`.
pub fn in_domain(family: &ForbiddenFamily, e: PartialEmbedding, b: usize, h: u64) -> bool {
    if e.member() >= family.len() || e.mask() == 0 {
        return false;
    }
    if e.mask() & !family.members()[e.member()].full_mask() != 0 {
        return false;
    }
    theta_ok(family, e, b, h)
        && Profiles {
            family,
            prune: true,
        }
        .alive(e)
}

/// Every entry of the domain, sorted.
pub fn domain(family: &ForbiddenFamily, b: usize, h: u64) -> Vec<PartialEmbedding> {
    let mut out = Vec::new();
    for sp in enumerate_patterns(family) {
        let verts: Vec<usize> = (0..MAX_PATTERN_VERTICES)
            .filter(|&u| sp.mask >> u & 1 == 1)
            .collect();
        let mut theta = [UNMAPPED; MAX_PATTERN_VERTICES];
        fn rec(
            i: usize,
            verts: &[usize],
            b: usize,
            theta: &mut [u8; MAX_PATTERN_VERTICES],
            f: &mut dyn FnMut(&[u8; MAX_PATTERN_VERTICES]),
        ) {
            if i == verts.len() {
                f(theta);
                return;
            }
            theta[verts[i]] = UNMAPPED;
            rec(i + 1, verts, b, theta, f);
            for x in 0..b {
                if !theta[..].contains(&(x as u8)) {
                    theta[verts[i]] = x as u8;
                    rec(i + 1, verts, b, theta, f);
                }
            }
            theta[verts[i]] = UNMAPPED;
        }
        rec(0, &verts, b, &mut theta, &mut |t| {
            let e = PartialEmbedding::new(sp.member, sp.mask, *t);
            if in_domain(family, e, b, h) {
                out.push(e);
            }
        });
    }
    out.sort_unstable();
    out
}

/// Entries forced by rule (c) from `e`.
fn extensions(
    family: &ForbiddenFamily,
    e: PartialEmbedding,
    b: usize,
    h: u64,
) -> Vec<PartialEmbedding> {
    let p = &family.members()[e.member()];
    let mask = e.mask();
    let dom = e.dom();
    let induced = family.mode() == Mode::Induced;
    if induced && mask != dom {
        return Vec::new();
    }
    let used: Vec<usize> = (0..p.n()).filter_map(|u| e.image(u)).collect();
    let mut out = Vec::new();
    for u in 0..p.n() {
        if mask >> u & 1 == 1 || p.adj(u) & mask & !dom != 0 {
            continue;
        }
        for x in 0..b {
            if used.contains(&x) {
                continue;
            }
            let fits = (0..p.n()).filter(|&w| dom >> w & 1 == 1).all(|w| {
                let present = has_pair(h, e.image(w).unwrap(), x);
                if p.has_edge(u, w) {
                    present
                } else {
                    !induced || !present
                }
            });
            if fits {
                out.push(e.with_mask(mask | 1 << u).with_image(u, x as u8));
            }
        }
    }
    out
}

/// Restrictions of `e` to non-empty proper sub-masks that stay in the domain.
fn restrictions(
    family: &ForbiddenFamily,
    e: PartialEmbedding,
    b: usize,
    h: u64,
) -> Vec<PartialEmbedding> {
    let mask = e.mask();
    let mut out = Vec::new();
    let mut sub = (mask.wrapping_sub(1)) & mask;
    while sub != 0 {
        let mut r = e.with_mask(sub);
        for u in 0..MAX_PATTERN_VERTICES {
            if sub >> u & 1 == 0 && e.image(u).is_some() {
                r = r.with_image(u, UNMAPPED);
            }
        }
        if in_domain(family, r, b, h) {
            out.push(r);
        }
        sub = (sub - 1) & mask;
    }
    out
}

/// Checks a profile against rules (a)-(d) for a bag of size `b` with kept
/// edges `h`. Returns the first violated rule with its witness entry.
pub fn check_state(
    family: &ForbiddenFamily,
    b: usize,
    state: &GeneralState,
) -> std::result::Result<(), String> {
    let h = state.h;
    let set: BTreeSet<PartialEmbedding> = state.phi.iter().copied().collect();
    for &e in &state.phi {
        if !in_domain(family, e, b, h) {
            return Err(format!("entry {e:?} is outside the domain"));
        }
        if e.mask() == family.members()[e.member()].full_mask() {
            return Err(format!("(d): entry {e:?} covers a whole member"));
        }
        for r in restrictions(family, e, b, h) {
            if !set.contains(&r) {
                return Err(format!(
                    "(b): {e:?} present but its restriction {r:?} is not"
                ));
            }
        }
        for x in extensions(family, e, b, h) {
            if !set.contains(&x) {
                return Err(format!(
                    "(c): {e:?} present but its forced extension {x:?} is not"
                ));
            }
        }
    }
    for e in domain(family, b, h) {
        if e.dom() == e.mask() && !set.contains(&e) {
            return Err(format!("(a): total embedding {e:?} missing"));
        }
    }
    Ok(())
}

/// Memoised valid-state enumeration keyed by bag size and kept edge mask.
type StateLists = Arc<Vec<Vec<PartialEmbedding>>>;

pub struct ValidStates<'f> {
    family: &'f ForbiddenFamily,
    limit: usize,
    cache: Mutex<FxHashMap<(usize, u64), StateLists>>,
}

impl<'f> ValidStates<'f> {
    pub fn new(family: &'f ForbiddenFamily, limit: usize) -> Self {
        ValidStates {
            family,
            limit,
            cache: Mutex::new(FxHashMap::default()),
        }
    }

    /// Every valid profile for a bag of size `b` with kept edges `h`.
    pub fn profiles(&self, b: usize, h: u64) -> Result<Arc<Vec<Vec<PartialEmbedding>>>> {
        if let Some(hit) = self.cache.lock().unwrap().get(&(b, h)) {
            return Ok(hit.clone());
        }
        let fresh = Arc::new(self.compute(b, h)?);
        self.cache
            .lock()
            .unwrap()
            .entry((b, h))
            .or_insert_with(|| fresh.clone());
        Ok(fresh)
    }

    fn compute(&self, b: usize, h: u64) -> Result<Vec<Vec<PartialEmbedding>>> {
        let fam = self.family;
        let mut entries = domain(fam, b, h);
        entries.sort_by_key(|e| (e.mask().count_ones(), *e));
        let index: FxHashMap<PartialEmbedding, usize> =
            entries.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let n = entries.len();
        // For each entry: the earlier entries whose presence forces it (c),
        // and its restrictions, which must be present if it is (b).
        let mut forcers: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut restr: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, &e) in entries.iter().enumerate() {
            for x in extensions(fam, e, b, h) {
                if let Some(&j) = index.get(&x) {
                    forcers[j].push(i);
                }
            }
            restr[i] = restrictions(fam, e, b, h)
                .iter()
                .map(|r| index[r])
                .collect();
        }
        let total: Vec<bool> = entries.iter().map(|e| e.dom() == e.mask()).collect();
        let full: Vec<bool> = entries
            .iter()
            .map(|e| e.mask() == fam.members()[e.member()].full_mask())
            .collect();
        let mut out = Vec::new();
        let mut chosen = vec![false; n];
        #[allow(clippy::too_many_arguments)]
        fn rec(
            i: usize,
            entries: &[PartialEmbedding],
            forcers: &[Vec<usize>],
            restr: &[Vec<usize>],
            total: &[bool],
            full: &[bool],
            chosen: &mut Vec<bool>,
            out: &mut Vec<Vec<PartialEmbedding>>,
            limit: usize,
        ) -> Result<()> {
            if i == entries.len() {
                if out.len() >= limit {
                    return Err(Error::EnumerationLimit(limit));
                }
                out.push(
                    (0..entries.len())
                        .filter(|&j| chosen[j])
                        .map(|j| entries[j])
                        .collect(),
                );
                return Ok(());
            }
            let must = total[i] || forcers[i].iter().any(|&j| chosen[j]);
            let may = !full[i] && restr[i].iter().all(|&j| chosen[j]);
            if must && !may {
                return Ok(());
            }
            if may {
                chosen[i] = true;
                rec(
                    i + 1,
                    entries,
                    forcers,
                    restr,
                    total,
                    full,
                    chosen,
                    out,
                    limit,
                )?;
                chosen[i] = false;
            }
            if !must {
                rec(
                    i + 1,
                    entries,
                    forcers,
                    restr,
                    total,
                    full,
                    chosen,
                    out,
                    limit,
                )?;
            }
            Ok(())
        }
        rec(
            0,
            &entries,
            &forcers,
            &restr,
            &total,
            &full,
            &mut chosen,
            &mut out,
            self.limit,
        )?;
        Ok(out)
    }
}

/// All valid states of a bag: every kept subgraph `H` of `G[bag]` paired with
/// every valid profile for it.
pub fn enumerate_valid_states(
    g: &Graph,
    bag: &[Vertex],
    family: &ForbiddenFamily,
    limit: usize,
) -> Result<Vec<GeneralState>> {
    let mut bag = bag.to_vec();
    bag.sort_unstable();
    let b = bag.len();
    let mut pairs = Vec::new();
    for j in 0..b {
        for i in 0..j {
            if g.has_edge(bag[i], bag[j]) {
                pairs.push(super::embedding::pair_index(i, j));
            }
        }
    }
    let cat = ValidStates::new(family, limit);
    let mut out = Vec::new();
    for sub in 0u64..(1 << pairs.len()) {
        let h = pairs
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &p)| acc | (sub >> i & 1) << p);
        for phi in cat.profiles(b, h)?.iter() {
            if out.len() >= limit {
                return Err(Error::EnumerationLimit(limit));
            }
            out.push(GeneralState {
                h,
                phi: phi.clone(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::general::family::{clique, path, star};

    fn fam(p: Vec<crate::general::family::Pattern>, mode: Mode) -> ForbiddenFamily {
        ForbiddenFamily::new(p, mode).unwrap()
    }

    #[test]
    fn pattern_catalogue() {
        assert_eq!(
            enumerate_patterns(&fam(vec![path(3).unwrap()], Mode::Subgraph)).len(),
            7
        );
        assert_eq!(
            enumerate_patterns(&fam(vec![clique(3).unwrap()], Mode::Subgraph)).len(),
            7
        );
        let t4 = ForbiddenFamily::component_bound(3, Mode::Subgraph).unwrap();
        assert_eq!(enumerate_patterns(&t4).len(), 30);
    }

    #[test]
    fn single_vertex_bag_with_triangle() {
        let g = Graph::from_index_edges(1, &[]).unwrap();
        let k3 = fam(vec![clique(3).unwrap()], Mode::Subgraph);
        let states = enumerate_valid_states(&g, &[0], &k3, 1000).unwrap();
        assert_eq!(states.len(), 1);
        assert_eq!(states[0].phi.len(), 3);
        check_state(&k3, 1, &states[0]).unwrap();
    }

    #[test]
    fn edge_bag_with_p3() {
        let g = Graph::from_index_edges(2, &[(0, 1)]).unwrap();
        let p3 = fam(vec![path(3).unwrap()], Mode::Subgraph);
        let states = enumerate_valid_states(&g, &[0, 1], &p3, 10_000).unwrap();
        assert!(!states.is_empty());
        for s in &states {
            check_state(&p3, 2, s).unwrap();
            assert!(s.phi.iter().all(|e| e.mask() != 0b111));
            if s.h != 0 {
                // Both orientations of each pattern edge onto the bag edge.
                let total_pairs = s
                    .phi
                    .iter()
                    .filter(|e| (e.mask() == 0b011 || e.mask() == 0b110) && e.dom() == e.mask())
                    .count();
                assert_eq!(total_pairs, 4);
            }
        }
    }

    #[test]
    fn checker_rejects_broken_profiles() {
        let k3 = fam(vec![clique(3).unwrap()], Mode::Subgraph);
        let empty = GeneralState { h: 0, phi: vec![] };
        assert!(check_state(&k3, 1, &empty).unwrap_err().starts_with("(a)"));
        let star3 = fam(vec![star(3).unwrap()], Mode::Induced);
        let g = Graph::from_index_edges(2, &[]).unwrap();
        for s in enumerate_valid_states(&g, &[0, 1], &star3, 100_000).unwrap() {
            check_state(&star3, 2, &s).unwrap();
        }
    }
}
