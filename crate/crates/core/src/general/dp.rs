use std::sync::{Arc, Mutex};

use rustc_hash::FxHashMap;

use super::embedding::{insert_position, pair_index, remove_position, PartialEmbedding, Profiles};
use super::family::ForbiddenFamily;
use crate::bits::{EdgeBits, Scored};
use crate::decomposition::{NiceDecomposition, NodeKind};
use crate::driver::Algebra;
use crate::error::Result;
use crate::graph::{Graph, Vertex};

/// Key: kept bag edges (over position pairs) and an interned profile id.
pub type GeneralKey = (u64, u32);
pub type GeneralTable = FxHashMap<GeneralKey, Scored>;

#[derive(Default)]
struct Interner {
    ids: FxHashMap<Arc<[PartialEmbedding]>, u32>,
    profiles: Vec<Arc<[PartialEmbedding]>>,
}

#[derive(Default)]
struct Memo {
    introduce: FxHashMap<(u32, u8, u16), Option<u32>>,
    forget: FxHashMap<(u32, u8), u32>,
    join: FxHashMap<(u32, u32), Option<u32>>,
}

pub(crate) struct GenCtx<'a> {
    pub g: &'a Graph,
    pub family: &'a ForbiddenFamily,
    pub k: u64,
    pub cost: Vec<u64>,
    pub record: bool,
    pub memoize: bool,
    pub prune: bool,
    interner: Mutex<Interner>,
    memo: Mutex<Memo>,
}

fn offer(
    table: &mut GeneralTable,
    key: GeneralKey,
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

impl<'a> GenCtx<'a> {
    pub fn new(
        g: &'a Graph,
        family: &'a ForbiddenFamily,
        k: u64,
        cost: Vec<u64>,
        record: bool,
        memoize: bool,
        prune: bool,
    ) -> Self {
        GenCtx {
            g,
            family,
            k,
            cost,
            record,
            memoize,
            prune,
            interner: Mutex::new(Interner::default()),
            memo: Mutex::new(Memo::default()),
        }
    }

    fn profiles(&self) -> Profiles<'_> {
        Profiles {
            family: self.family,
            prune: self.prune,
        }
    }

    fn intern(&self, phi: Vec<PartialEmbedding>) -> u32 {
        let mut int = self.interner.lock().unwrap();
        if let Some(&id) = int.ids.get(phi.as_slice()) {
            return id;
        }
        let id = int.profiles.len() as u32;
        let arc: Arc<[PartialEmbedding]> = phi.into();
        int.profiles.push(arc.clone());
        int.ids.insert(arc, id);
        id
    }

    pub fn profile(&self, id: u32) -> Arc<[PartialEmbedding]> {
        self.interner.lock().unwrap().profiles[id as usize].clone()
    }

    fn lift_introduce(&self, id: u32, p: usize, adj: u16) -> Option<u32> {
        let key = (id, p as u8, adj);
        if self.memoize {
            if let Some(&hit) = self.memo.lock().unwrap().introduce.get(&key) {
                return hit;
            }
        }
        let phi = self.profile(id);
        let out = self
            .profiles()
            .introduce(&phi, p, adj)
            .map(|v| self.intern(v));
        if self.memoize {
            self.memo.lock().unwrap().introduce.insert(key, out);
        }
        out
    }

    fn lift_forget(&self, id: u32, p: usize) -> u32 {
        let key = (id, p as u8);
        if self.memoize {
            if let Some(&hit) = self.memo.lock().unwrap().forget.get(&key) {
                return hit;
            }
        }
        let phi = self.profile(id);
        let out = self.intern(self.profiles().forget(&phi, p));
        if self.memoize {
            self.memo.lock().unwrap().forget.insert(key, out);
        }
        out
    }

    fn lift_join(&self, a: u32, b: u32) -> Option<u32> {
        let key = (a, b);
        if self.memoize {
            if let Some(&hit) = self.memo.lock().unwrap().join.get(&key) {
                return hit;
            }
        }
        let (pa, pb) = (self.profile(a), self.profile(b));
        let out = self.profiles().join(&pa, &pb).map(|v| self.intern(v));
        if self.memoize {
            self.memo.lock().unwrap().join.insert(key, out);
        }
        out
    }

    /// Adds `v` to a table over `bag` (which must not contain `v`).
    fn introduce_step(&self, table: &GeneralTable, bag: &[Vertex], v: Vertex) -> GeneralTable {
        let p = bag.partition_point(|&x| x < v);
        // (new-bag position, edge id, cost) for each G-neighbour of v in the bag.
        let nbrs: Vec<(usize, usize, u64)> = bag
            .iter()
            .enumerate()
            .filter_map(|(i, &u)| {
                let pos = if i < p { i } else { i + 1 };
                self.g.edge_id(u, v).map(|e| (pos, e, self.cost[e]))
            })
            .collect();
        let mut out = GeneralTable::default();
        for (&(h, id), entry) in table {
            for keep in 0u32..(1 << nbrs.len()) {
                let mut adj = 0u16;
                let mut added = 0u64;
                for (i, &(pos, _, c)) in nbrs.iter().enumerate() {
                    if keep >> i & 1 == 1 {
                        adj |= 1 << pos;
                    } else {
                        added += c;
                    }
                }
                let cost = entry.cost + added;
                if cost > self.k {
                    continue;
                }
                let Some(nid) = self.lift_introduce(id, p, adj) else {
                    continue;
                };
                let nh = insert_position(h, bag.len(), p, adj);
                offer(&mut out, (nh, nid), cost, || {
                    entry.witness.as_ref().map(|w| {
                        let mut w = w.clone();
                        for (i, &(_, e, _)) in nbrs.iter().enumerate() {
                            if keep >> i & 1 == 0 {
                                w.set(e);
                            }
                        }
                        w
                    })
                });
            }
        }
        out
    }

    fn deleted_bag_cost(&self, bag: &[Vertex], h: u64) -> u64 {
        let mut c = 0;
        for j in 0..bag.len() {
            for i in 0..j {
                if let Some(e) = self.g.edge_id(bag[i], bag[j]) {
                    if h >> pair_index(i, j) & 1 == 0 {
                        c += self.cost[e];
                    }
                }
            }
        }
        c
    }
}

impl Algebra for GenCtx<'_> {
    type Table = GeneralTable;

    /// A leaf is built as introduces from the empty bag, so any leaf bag works.
    fn leaf(&self, nd: &NiceDecomposition, t: usize) -> Result<GeneralTable> {
        let empty = self.intern(Vec::new());
        let mut table = GeneralTable::default();
        table.insert(
            (0, empty),
            Scored {
                cost: 0,
                witness: self.record.then(|| EdgeBits::empty(self.g.m())),
            },
        );
        let mut bag: Vec<Vertex> = Vec::new();
        for &v in &nd.node(t).bag {
            table = self.introduce_step(&table, &bag, v);
            bag.push(v);
        }
        Ok(table)
    }

    fn introduce(
        &self,
        nd: &NiceDecomposition,
        t: usize,
        child: &GeneralTable,
    ) -> Result<GeneralTable> {
        let node = nd.node(t);
        let NodeKind::Introduce(v) = node.kind else {
            unreachable!()
        };
        Ok(self.introduce_step(child, &nd.node(node.children[0]).bag, v))
    }

    fn forget(
        &self,
        nd: &NiceDecomposition,
        t: usize,
        child: &GeneralTable,
    ) -> Result<GeneralTable> {
        let node = nd.node(t);
        let NodeKind::Forget(v) = node.kind else {
            unreachable!()
        };
        let child_bag = &nd.node(node.children[0]).bag;
        let p = child_bag
            .binary_search(&v)
            .expect("forgotten vertex in child bag");
        let mut out = GeneralTable::default();
        for (&(h, id), entry) in child {
            let key = (
                remove_position(h, child_bag.len(), p),
                self.lift_forget(id, p),
            );
            offer(&mut out, key, entry.cost, || entry.witness.clone());
        }
        Ok(out)
    }

    fn join(
        &self,
        nd: &NiceDecomposition,
        t: usize,
        left: &GeneralTable,
        right: &GeneralTable,
    ) -> Result<GeneralTable> {
        let bag = &nd.node(t).bag;
        let mut by_h: FxHashMap<u64, Vec<(u32, &Scored)>> = FxHashMap::default();
        for (&(h, id), e) in right {
            by_h.entry(h).or_default().push((id, e));
        }
        let mut overlap: FxHashMap<u64, u64> = FxHashMap::default();
        let mut out = GeneralTable::default();
        for (&(h, id1), e1) in left {
            let Some(group) = by_h.get(&h) else { continue };
            let shared = *overlap
                .entry(h)
                .or_insert_with(|| self.deleted_bag_cost(bag, h));
            for &(id2, e2) in group {
                let cost = e1.cost + e2.cost - shared;
                if cost > self.k {
                    continue;
                }
                let Some(id) = self.lift_join(id1, id2) else {
                    continue;
                };
                offer(&mut out, (h, id), cost, || {
                    match (&e1.witness, &e2.witness) {
                        (Some(a), Some(b)) => Some(a.union(b)),
                        _ => None,
                    }
                });
            }
        }
        Ok(out)
    }

    fn size(table: &GeneralTable) -> usize {
        table.len()
    }
}
