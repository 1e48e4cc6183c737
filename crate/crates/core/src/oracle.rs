//! Brute-force reference solvers and seeded instance generators.
//!
//! The solvers enumerate deletion sets directly and share no code with the
//! dynamic programs beyond graph plumbing and pattern embedding.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::component::ProblemSpec;
use crate::decomposition::TreeDecomposition;
use crate::error::{Error, Result};
use crate::general::{contains_member, ForbiddenFamily, Mode};
use crate::graph::{EdgeSet, Graph, Vertex, VertexAnnotations};

/// Largest edge count the enumerators accept.
pub const MAX_ORACLE_EDGES: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    /// Minimum deletion cost, `None` when no set within the budget works.
    pub optimum: Option<u64>,
    /// Every optimal deletion set in edge order, when requested.
    pub all_optimal: Vec<EdgeSet>,
}

impl OracleResult {
    pub fn feasible(&self) -> bool {
        self.optimum.is_some()
    }

    /// The optimal set that contains the lowest edge on which any two differ.
    pub fn first_optimal(&self) -> Option<&EdgeSet> {
        self.all_optimal.iter().min_by(|a, b| tie_order(a, b))
    }
}

fn tie_order(a: &EdgeSet, b: &EdgeSet) -> std::cmp::Ordering {
    let x: Vec<_> = a.iter().collect();
    let y: Vec<_> = b.iter().collect();
    for (p, q) in x.iter().zip(&y) {
        if p != q {
            return p.cmp(q);
        }
    }
    // One is a prefix of the other: the longer one holds the next edge.
    y.len().cmp(&x.len())
}

struct Search<'a, F> {
    m: usize,
    cost: &'a [u64],
    ok: F,
    bound: u64,
    collect: bool,
    best: Option<u64>,
    found: Vec<u32>,
}

impl<F: FnMut(u32) -> bool> Search<'_, F> {
    fn record(&mut self, deleted: u32, c: u64) {
        if self.best.is_none_or(|b| c < b) {
            self.best = Some(c);
            self.found.clear();
            if !self.collect {
                self.bound = c.saturating_sub(1);
            } else {
                self.bound = c;
            }
        }
        if self.collect || self.found.is_empty() {
            self.found.push(deleted);
        }
    }

    /// Decides edges `i..` given the kept set so far, which already satisfies
    /// the (downward-closed) property.
    fn monotone(&mut self, i: usize, kept: u32, c: u64) {
        if c > self.bound {
            return;
        }
        if i == self.m {
            let deleted = !kept & ((1u64 << self.m) - 1) as u32;
            self.record(deleted, c);
            return;
        }
        let with = kept | 1 << i;
        if (self.ok)(with) {
            self.monotone(i + 1, with, c);
        }
        self.monotone(i + 1, kept, c + self.cost[i]);
    }

    fn full_scan(&mut self) {
        let all = ((1u64 << self.m) - 1) as u32;
        let mut order: Vec<(u64, u32)> = (0..=all)
            .map(|d| {
                (
                    (0..self.m)
                        .filter(|&e| d >> e & 1 == 1)
                        .map(|e| self.cost[e])
                        .sum(),
                    d,
                )
            })
            .filter(|&(c, _)| c <= self.bound)
            .collect();
        order.sort_unstable();
        for (c, d) in order {
            if c > self.bound {
                break;
            }
            if (self.ok)(all & !d) {
                self.record(d, c);
            }
        }
    }
}

fn edge_mask_check(g: &Graph) -> Result<()> {
    if g.m() > MAX_ORACLE_EDGES {
        return Err(Error::TooManyEdges {
            edges: g.m(),
            max: MAX_ORACLE_EDGES,
        });
    }
    Ok(())
}

fn finish<F>(g: &Graph, s: Search<'_, F>) -> OracleResult {
    let mut all_optimal: Vec<EdgeSet> = if s.collect {
        s.found
            .iter()
            .map(|&d| EdgeSet::from_edge_ids(g, (0..g.m()).filter(|&e| d >> e & 1 == 1)))
            .collect()
    } else {
        Vec::new()
    };
    all_optimal.sort_by(tie_order);
    OracleResult {
        optimum: s.best,
        all_optimal,
    }
}

/// Whether the edges in `kept` leave every component within `h` and within
/// the limits of its members.
fn components_ok(g: &Graph, kept: u32, h: u64, ann: &VertexAnnotations) -> bool {
    let mut parent: Vec<Vertex> = (0..g.n()).collect();
    fn find(p: &mut [Vertex], mut x: Vertex) -> Vertex {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if kept >> e & 1 == 1 {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a] = b;
            }
        }
    }
    let mut weight = vec![0u64; g.n()];
    let mut limit = vec![u64::MAX; g.n()];
    for v in g.vertices() {
        let r = find(&mut parent, v);
        weight[r] += ann.weight(v);
        limit[r] = limit[r].min(ann.limit(v));
    }
    (0..g.n()).all(|r| weight[r] <= h && weight[r] <= limit[r])
}

fn component_search(g: &Graph, spec: &ProblemSpec, collect: bool) -> Result<OracleResult> {
    edge_mask_check(g)?;
    spec.annotations.validate(g)?;
    if spec.h == 0 {
        return Err(Error::ZeroComponentBound);
    }
    let cost: Vec<u64> = (0..g.m()).map(|e| spec.annotations.edge_cost(e)).collect();
    let ann = &spec.annotations;
    if !components_ok(g, 0, spec.h, ann) {
        return Ok(OracleResult {
            optimum: None,
            all_optimal: Vec::new(),
        });
    }
    let mut s = Search {
        m: g.m(),
        cost: &cost,
        ok: |kept| components_ok(g, kept, spec.h, ann),
        bound: spec.k,
        collect,
        best: None,
        found: Vec::new(),
    };
    s.monotone(0, 0, 0);
    Ok(finish(g, s))
}

/// Minimum deletion cost (at most `spec.k`) after which every component
/// meets the size, weight and limit bounds of `spec`.
pub fn brute_force_component(g: &Graph, spec: &ProblemSpec) -> Result<OracleResult> {
    component_search(g, spec, false)
}

/// As [`brute_force_component`], also listing every optimal deletion set.
pub fn brute_force_component_all(g: &Graph, spec: &ProblemSpec) -> Result<OracleResult> {
    component_search(g, spec, true)
}

fn family_search(
    g: &Graph,
    family: &ForbiddenFamily,
    k: u64,
    costs: Option<&[u64]>,
    collect: bool,
) -> Result<OracleResult> {
    edge_mask_check(g)?;
    let cost: Vec<u64> = match costs {
        Some(c) if c.len() != g.m() => {
            return Err(Error::Invalid(format!(
                "{} edge costs for {} edges",
                c.len(),
                g.m()
            )))
        }
        Some(c) => c.to_vec(),
        None => vec![1; g.m()],
    };
    let ok = |kept: u32| !contains_member(&g.spanning_subgraph(|e| kept >> e & 1 == 1), family);
    let mut s = Search {
        m: g.m(),
        cost: &cost,
        ok,
        bound: k,
        collect,
        best: None,
        found: Vec::new(),
    };
    match family.mode() {
        // Subgraph containment is monotone, so failing partial sets prune.
        Mode::Subgraph => s.monotone(0, 0, 0),
        Mode::Induced => s.full_scan(),
    }
    Ok(finish(g, s))
}

/// Minimum number of deletions (at most `k`) after which no member of
/// `family` occurs.
pub fn brute_force_family(g: &Graph, family: &ForbiddenFamily, k: u64) -> Result<OracleResult> {
    family_search(g, family, k, None, false)
}

/// Cost-aware, optionally listing every optimal set.
pub fn brute_force_family_with(
    g: &Graph,
    family: &ForbiddenFamily,
    k: u64,
    costs: Option<&[u64]>,
    collect_all: bool,
) -> Result<OracleResult> {
    family_search(g, family, k, costs, collect_all)
}

/// Exhaustive search for a partition of the vertices into triangles.
pub fn has_perfect_triangle_cover(g: &Graph) -> bool {
    fn go(g: &Graph, covered: &mut [bool]) -> bool {
        let Some(v) = covered.iter().position(|&c| !c) else {
            return true;
        };
        covered[v] = true;
        let nbrs: Vec<Vertex> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| !covered[u])
            .collect();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if g.has_edge(a, b) {
                    covered[a] = true;
                    covered[b] = true;
                    if go(g, covered) {
                        return true;
                    }
                    covered[a] = false;
                    covered[b] = false;
                }
            }
        }
        covered[v] = false;
        false
    }
    go(g, &mut vec![false; g.n()])
}

/// Checks that deleting at most `e − n` edges to leave components of size at
/// most 3 is possible exactly when the graph has a perfect triangle cover,
/// and returns that common answer.
pub fn triangle_cover_crosscheck(g: &Graph) -> Result<bool> {
    if !g.n().is_multiple_of(3) {
        return Err(Error::NotDivisibleByThree(g.n()));
    }
    let deletion = match (g.m() as u64).checked_sub(g.n() as u64) {
        Some(k) => brute_force_component(g, &ProblemSpec::new(3, k))?.feasible(),
        None => {
            edge_mask_check(g)?;
            false
        }
    };
    let cover = has_perfect_triangle_cover(g);
    if deletion != cover {
        return Err(Error::Invalid(format!(
            "triangle cover cross-check disagrees: deletion {deletion}, cover {cover}"
        )));
    }
    Ok(cover)
}

/// Random partial `width`-tree on `n` vertices together with the
/// decomposition it was built from. Each edge of the underlying `width`-tree
/// survives with probability 0.7.
pub fn gen_random_low_tw(n: usize, width: usize, seed: u64) -> (Graph, TreeDecomposition) {
    gen_partial_ktree(n, width, 0.7, seed)
}

/// As [`gen_random_low_tw`] with an explicit edge survival probability.
pub fn gen_partial_ktree(
    n: usize,
    width: usize,
    keep: f64,
    seed: u64,
) -> (Graph, TreeDecomposition) {
    assert!(width >= 1, "width must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let base = n.min(width + 1);
    for v in 0..base {
        for u in 0..v {
            edges.push((u, v));
        }
    }
    let mut bags: Vec<Vec<Vertex>> = vec![(0..base).collect()];
    let mut tree = Vec::new();
    for v in base..n {
        let parent = rng.gen_range(0..bags.len());
        let mut clique = bags[parent].clone();
        clique.remove(rng.gen_range(0..clique.len()));
        for &u in &clique {
            edges.push((u, v));
        }
        clique.push(v);
        bags.push(clique);
        tree.push((parent, bags.len() - 1));
    }
    edges.retain(|_| rng.gen_bool(keep));
    // Relabel randomly so vertex order carries no structure.
    let mut perm: Vec<Vertex> = (0..n).collect();
    perm.shuffle(&mut rng);
    let edges: Vec<(Vertex, Vertex)> = edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
    let bags = bags
        .into_iter()
        .map(|b| b.into_iter().map(|v| perm[v]).collect())
        .collect();
    let g = Graph::from_index_edges(n, &edges).expect("generated edges are valid");
    (g, TreeDecomposition::new(bags, tree, 0))
}

/// Seeded G(n, p) random graph.
pub fn gen_gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 0..n {
        for u in 0..v {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_index_edges(n, &edges).expect("generated edges are valid")
}
