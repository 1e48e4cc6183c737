use rustc_hash::FxHashMap;

use super::state::{ComponentState, MAX_BAG};
use crate::bits::{EdgeBits, Scored};
use crate::decomposition::{NiceDecomposition, NodeKind};
use crate::driver::Algebra;
use crate::error::Result;
use crate::graph::{Graph, Vertex};
use crate::partition::restricted_growth_strings;

pub type ComponentTable = FxHashMap<ComponentState, Scored>;

const NEW: u8 = 15;

/// Instance data after clamping: `h` never exceeds the total weight, and
/// every limit is at most `h`.
pub(crate) struct Ctx<'a> {
    pub g: &'a Graph,
    pub h: u16,
    pub k: u64,
    pub weight: Vec<u16>,
    pub limit: Option<Vec<u16>>,
    pub cost: Vec<u64>,
    pub record: bool,
}

struct BagEdge {
    i: usize,
    j: usize,
    id: usize,
    cost: u64,
}

fn bag_edges(g: &Graph, bag: &[Vertex], cost: &[u64]) -> Vec<BagEdge> {
    let mut out = Vec::new();
    for i in 0..bag.len() {
        for j in i + 1..bag.len() {
            if let Some(id) = g.edge_id(bag[i], bag[j]) {
                out.push(BagEdge {
                    i,
                    j,
                    id,
                    cost: cost[id],
                });
            }
        }
    }
    out
}

/// Keeps the better of the incumbent and the offered entry. The witness is
/// only built when it can matter.
fn offer(
    table: &mut ComponentTable,
    key: ComponentState,
    cost: u64,
    make: impl FnOnce() -> Option<EdgeBits>,
) {
    match table.get_mut(&key) {
        None => {
            table.insert(
                key,
                Scored {
                    cost,
                    witness: make(),
                },
            );
        }
        Some(inc) => {
            if cost < inc.cost {
                *inc = Scored {
                    cost,
                    witness: make(),
                };
            } else if cost == inc.cost && inc.witness.is_some() {
                let cand = Scored {
                    cost,
                    witness: make(),
                };
                if cand.beats(inc) {
                    *inc = cand;
                }
            }
        }
    }
}

impl Ctx<'_> {
    fn lim(&self, v: Vertex) -> u16 {
        self.limit.as_ref().map_or(self.h, |l| l[v])
    }

    fn limited(&self) -> bool {
        self.limit.is_some()
    }

    fn empty_bits(&self) -> Option<EdgeBits> {
        self.record.then(|| EdgeBits::empty(self.g.m()))
    }

    /// Calls `f` with every admissible (capacity, ceiling) vector for the
    /// given per-block minimum weight and ceiling bound.
    pub fn for_each_capacity(&self, lo: &[u16], top: &[u16], f: &mut dyn FnMut(&[u16], &[u16])) {
        let q = lo.len();
        let mut c = vec![0u16; q];
        let mut z = vec![0u16; q];
        fn rec(
            i: usize,
            ctx: &Ctx,
            lo: &[u16],
            top: &[u16],
            c: &mut Vec<u16>,
            z: &mut Vec<u16>,
            f: &mut dyn FnMut(&[u16], &[u16]),
        ) {
            if i == lo.len() {
                f(c, z);
                return;
            }
            let hi = if ctx.limited() { top[i] } else { ctx.h };
            for cap in lo[i]..=hi {
                c[i] = cap;
                if ctx.limited() {
                    for ceil in cap..=top[i] {
                        z[i] = ceil;
                        rec(i + 1, ctx, lo, top, c, z, f);
                    }
                } else {
                    rec(i + 1, ctx, lo, top, c, z, f);
                }
            }
        }
        rec(0, self, lo, top, &mut c, &mut z, f);
    }

    /// Every valid state for `bag`, with the crossing cost of its partition.
    pub fn bag_states(&self, bag: &[Vertex], mut f: impl FnMut(ComponentState, &[u8])) {
        for rgs in restricted_growth_strings(bag.len()) {
            let q = rgs.iter().map(|&b| b as usize + 1).max().unwrap_or(0);
            let mut lo = vec![0u32; q];
            let mut top = vec![self.h; q];
            for (i, &b) in rgs.iter().enumerate() {
                lo[b as usize] += self.weight[bag[i]] as u32;
                top[b as usize] = top[b as usize].min(self.lim(bag[i]));
            }
            if (0..q).any(|x| lo[x] > top[x] as u32 || lo[x] > self.h as u32) {
                continue;
            }
            let lo: Vec<u16> = lo.iter().map(|&x| x as u16).collect();
            self.for_each_capacity(&lo, &top, &mut |c, z| {
                let s = ComponentState::from_parts(&rgs, c, if self.limited() { z } else { &[] });
                f(s, &rgs);
            });
        }
    }

    fn block_weights(&self, bag: &[Vertex], s: &ComponentState) -> [u16; MAX_BAG] {
        let mut w = [0u16; MAX_BAG];
        for (i, &b) in s.partition().iter().enumerate() {
            w[b as usize] += self.weight[bag[i]];
        }
        w
    }

    /// Ceiling to store for a block whose smallest limit is `z`.
    fn ceiling(&self, z: u16) -> u16 {
        if self.limited() {
            z
        } else {
            0
        }
    }
}

// Tables are keyed by realised sizes: a block's capacity is the weight of
// its component within the processed subgraph, and its ceiling the smallest
// limit in that component. The signature "cheapest deletion leaving each
// block's component within c" is the upward closure of such a table, so
// both give the same optimum; storing only realised sizes keeps tables (and
// join pairings) small.
impl Algebra for Ctx<'_> {
    type Table = ComponentTable;

    fn leaf(&self, nd: &NiceDecomposition, t: usize) -> Result<ComponentTable> {
        let bag = &nd.node(t).bag;
        let edges = bag_edges(self.g, bag, &self.cost);
        let mut table = ComponentTable::default();
        'next: for rgs in restricted_growth_strings(bag.len()) {
            let q = rgs.iter().map(|&b| b as usize + 1).max().unwrap_or(0);
            let mut cap = [0u32; MAX_BAG];
            let mut top = [self.h; MAX_BAG];
            for (i, &b) in rgs.iter().enumerate() {
                cap[b as usize] += self.weight[bag[i]] as u32;
                top[b as usize] = top[b as usize].min(self.lim(bag[i]));
            }
            let mut caps = [0u16; MAX_BAG];
            let mut ceils = [0u16; MAX_BAG];
            for x in 0..q {
                if cap[x] > top[x] as u32 {
                    continue 'next;
                }
                caps[x] = cap[x] as u16;
                ceils[x] = self.ceiling(top[x]);
            }
            let crossing: Vec<&BagEdge> = edges.iter().filter(|e| rgs[e.i] != rgs[e.j]).collect();
            let cost: u64 = crossing.iter().map(|e| e.cost).sum();
            if cost > self.k {
                continue;
            }
            let witness = self.empty_bits().map(|mut b| {
                for e in &crossing {
                    b.set(e.id);
                }
                b
            });
            table.insert(
                ComponentState::from_parts(&rgs, &caps[..q], &ceils[..q]),
                Scored { cost, witness },
            );
        }
        Ok(table)
    }

    fn introduce(
        &self,
        nd: &NiceDecomposition,
        t: usize,
        child: &ComponentTable,
    ) -> Result<ComponentTable> {
        let node = nd.node(t);
        let NodeKind::Introduce(v) = node.kind else {
            unreachable!("introduce on {:?}", node.kind)
        };
        let bag = &node.bag;
        let p = bag
            .binary_search(&v)
            .expect("introduced vertex is in the bag");
        let wv = self.weight[v] as u32;
        let lv = self.lim(v);
        // Edges from v to child positions.
        let nbrs: Vec<(usize, usize, u64)> = bag
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != p)
            .filter_map(|(i, &u)| {
                let j = if i < p { i } else { i - 1 };
                self.g.edge_id(u, v).map(|id| (j, id, self.cost[id]))
            })
            .collect();
        let mut table = ComponentTable::default();
        let mut labels = vec![0u8; bag.len()];
        for (cs, entry) in child {
            let rgs = cs.partition();
            let q = cs.block_count();
            let caps = cs.capacities();
            let ceils = cs.ceilings();
            let mut per_label = [(0u16, 0u16); 16];
            for y in 0..q {
                per_label[y] = (caps[y], ceils[y]);
            }
            // v may join any set of blocks, even ones it has no edge to: the
            // two sides of a join must agree on the partition, and a block
            // grouped here may be connected only in the other subtree.
            let all = (1u32 << q) - 1;
            let mut mask = all;
            loop {
                let mut added = 0u64;
                for &(j, _, c) in &nbrs {
                    if mask >> rgs[j] & 1 == 0 {
                        added += c;
                    }
                }
                let cost = entry.cost + added;
                let mut sum = wv;
                let mut ceiling = lv;
                for y in 0..q {
                    if mask >> y & 1 == 1 {
                        sum += caps[y] as u32;
                        if self.limited() {
                            ceiling = ceiling.min(ceils[y]);
                        }
                    }
                }
                if cost <= self.k && sum <= ceiling as u32 {
                    for (i, l) in labels.iter_mut().enumerate() {
                        *l = if i == p {
                            NEW
                        } else {
                            let y = rgs[if i < p { i } else { i - 1 }];
                            if mask >> y & 1 == 1 {
                                NEW
                            } else {
                                y
                            }
                        };
                    }
                    per_label[NEW as usize] = (sum as u16, self.ceiling(ceiling));
                    let s = ComponentState::from_labels(&labels, &per_label);
                    offer(&mut table, s, cost, || {
                        entry.witness.as_ref().map(|w| {
                            let mut w = w.clone();
                            for &(j, id, _) in &nbrs {
                                if mask >> rgs[j] & 1 == 0 {
                                    w.set(id);
                                }
                            }
                            w
                        })
                    });
                }
                if mask == 0 {
                    break;
                }
                mask = (mask - 1) & all;
            }
        }
        Ok(table)
    }

    fn forget(
        &self,
        nd: &NiceDecomposition,
        t: usize,
        child: &ComponentTable,
    ) -> Result<ComponentTable> {
        let node = nd.node(t);
        let NodeKind::Forget(v) = node.kind else {
            unreachable!("forget on {:?}", node.kind)
        };
        let child_bag = &nd.node(node.children[0]).bag;
        let p = child_bag
            .binary_search(&v)
            .expect("forgotten vertex is in the child bag");
        let mut table = ComponentTable::default();
        let mut labels = Vec::with_capacity(child_bag.len());
        for (cs, entry) in child {
            let rgs = cs.partition();
            labels.clear();
            labels.extend(
                rgs.iter()
                    .enumerate()
                    .filter(|&(i, _)| i != p)
                    .map(|(_, &b)| b),
            );
            let mut per_label = [(0u16, 0u16); 16];
            for (y, (&c, &z)) in cs.capacities().iter().zip(cs.ceilings()).enumerate() {
                per_label[y] = (c, z);
            }
            let s = ComponentState::from_labels(&labels, &per_label);
            offer(&mut table, s, entry.cost, || entry.witness.clone());
        }
        Ok(table)
    }

    fn join(
        &self,
        nd: &NiceDecomposition,
        t: usize,
        left: &ComponentTable,
        right: &ComponentTable,
    ) -> Result<ComponentTable> {
        let bag = &nd.node(t).bag;
        let edges = bag_edges(self.g, bag, &self.cost);
        let mut groups: FxHashMap<ComponentState, Vec<(&ComponentState, &Scored)>> =
            FxHashMap::default();
        for (s, e) in right {
            groups.entry(s.join_key()).or_default().push((s, e));
        }
        let mut crossing_cache: FxHashMap<ComponentState, u64> = FxHashMap::default();
        let mut table = ComponentTable::default();
        for (ls, le) in left {
            let key = ls.join_key();
            let Some(group) = groups.get(&key) else {
                continue;
            };
            let rgs = ls.partition();
            let crossing = *crossing_cache.entry(key).or_insert_with(|| {
                edges
                    .iter()
                    .filter(|e| rgs[e.i] != rgs[e.j])
                    .map(|e| e.cost)
                    .sum()
            });
            let w = self.block_weights(bag, ls);
            let q = ls.block_count();
            let (lc, lz) = (ls.capacities(), ls.ceilings());
            for &(rs, re) in group {
                let cost = le.cost + re.cost - crossing;
                if cost > self.k {
                    continue;
                }
                let (rc, rz) = (rs.capacities(), rs.ceilings());
                let mut caps = [0u16; MAX_BAG];
                let mut ceils = [0u16; MAX_BAG];
                let mut ok = true;
                for x in 0..q {
                    let c = lc[x] as u32 + rc[x] as u32 - w[x] as u32;
                    let z = if self.limited() {
                        lz[x].min(rz[x])
                    } else {
                        self.h
                    };
                    if c > z as u32 {
                        ok = false;
                        break;
                    }
                    caps[x] = c as u16;
                    ceils[x] = self.ceiling(z);
                }
                if !ok {
                    continue;
                }
                let s = ComponentState::from_parts(rgs, &caps[..q], &ceils[..q]);
                offer(&mut table, s, cost, || match (&le.witness, &re.witness) {
                    (Some(a), Some(b)) => Some(a.union(b)),
                    _ => None,
                });
            }
        }
        Ok(table)
    }

    fn size(table: &ComponentTable) -> usize {
        table.len()
    }
}
