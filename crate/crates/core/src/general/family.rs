//! Forbidden families of small pattern graphs.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{parse_edge_list, Graph, Vertex};

/// Largest pattern accepted, in vertices.
pub const MAX_PATTERN_VERTICES: usize = 6;
/// Largest family accepted, in members.
pub const MAX_FAMILY_MEMBERS: usize = 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Forbid members as (not necessarily induced) subgraphs.
    #[default]
    Subgraph,
    /// Forbid members as induced subgraphs.
    Induced,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Subgraph => "subgraph",
            Mode::Induced => "induced",
        })
    }
}

/// A pattern graph on vertices `0..n` with adjacency bitmasks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    n: usize,
    adj: Vec<u8>,
}

impl Pattern {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Pattern> {
        if n > MAX_PATTERN_VERTICES {
            return Err(Error::PatternTooLarge {
                vertices: n,
                cap: MAX_PATTERN_VERTICES,
            });
        }
        let mut adj = vec![0u8; n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::Invalid(format!(
                    "bad pattern edge {a}-{b} on {n} vertices"
                )));
            }
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        Ok(Pattern { n, adj })
    }

    pub fn from_graph(g: &Graph) -> Result<Pattern> {
        Pattern::new(g.n(), g.edges())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.adj
            .iter()
            .map(|a| a.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// Neighbour bitmask of `u`.
    pub fn adj(&self, u: usize) -> u8 {
        self.adj[u]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] >> b & 1 == 1
    }

    pub fn full_mask(&self) -> u8 {
        ((1u16 << self.n) - 1) as u8
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.has_edge(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = 1u8;
        let mut frontier = 1u8;
        while frontier != 0 {
            let x = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = self.adj[x] & !seen;
            seen |= fresh;
            frontier |= fresh;
        }
        seen == self.full_mask()
    }

    /// Canonical form: the lexicographically smallest adjacency matrix over
    /// all vertex permutations. Equal iff isomorphic.
    pub fn canonical(&self) -> Vec<u8> {
        let mut perm: Vec<usize> = (0..self.n).collect();
        let mut best: Option<Vec<u8>> = None;
        loop {
            let code: Vec<u8> = (0..self.n)
                .map(|i| {
                    (0..self.n).fold(0u8, |acc, j| {
                        acc | (self.has_edge(perm[i], perm[j]) as u8) << j
                    })
                })
                .collect();
            if best.as_ref().is_none_or(|b| code < *b) {
                best = Some(code);
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        best.unwrap_or_default()
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Non-isomorphic trees on `n` vertices, from Prüfer sequences.
pub fn trees(n: usize) -> Result<Vec<Pattern>> {
    if n > MAX_PATTERN_VERTICES {
        return Err(Error::PatternTooLarge {
            vertices: n,
            cap: MAX_PATTERN_VERTICES,
        });
    }
    match n {
        0 => return Ok(Vec::new()),
        1 => return Pattern::new(1, &[]).map(|p| vec![p]),
        2 => return Pattern::new(2, &[(0, 1)]).map(|p| vec![p]),
        _ => {}
    }
    let mut seq = vec![0usize; n - 2];
    let mut out: Vec<Pattern> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    loop {
        let p = Pattern::new(n, &prufer_edges(&seq, n))?;
        if seen.insert(p.canonical()) {
            out.push(p);
        }
        let mut i = 0;
        while i < seq.len() && seq[i] == n - 1 {
            seq[i] = 0;
            i += 1;
        }
        if i == seq.len() {
            break;
        }
        seq[i] += 1;
    }
    Ok(out)
}

fn prufer_edges(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf exists");
        edges.push((leaf, x));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

pub fn star(leaves: usize) -> Result<Pattern> {
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    Pattern::new(leaves + 1, &edges)
}

pub fn clique(r: usize) -> Result<Pattern> {
    let mut edges = Vec::new();
    for a in 0..r {
        for b in a + 1..r {
            edges.push((a, b));
        }
    }
    Pattern::new(r, &edges)
}

pub fn path(r: usize) -> Result<Pattern> {
    let edges: Vec<_> = (1..r).map(|i| (i - 1, i)).collect();
    Pattern::new(r, &edges)
}

/// Members kept in insertion order, deduplicated up to isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForbiddenFamily {
    members: Vec<Pattern>,
    mode: Mode,
}

impl ForbiddenFamily {
    pub fn new(members: Vec<Pattern>, mode: Mode) -> Result<ForbiddenFamily> {
        let mut kept: Vec<Pattern> = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for p in members {
            if seen.insert((p.n, p.canonical())) {
                kept.push(p);
            }
        }
        if kept.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if let Some(i) = kept.iter().position(|p| p.m() == 0) {
            return Err(Error::EdgelessMember(i));
        }
        if kept.len() > MAX_FAMILY_MEMBERS {
            return Err(Error::FamilyTooLarge {
                members: kept.len(),
                cap: MAX_FAMILY_MEMBERS,
            });
        }
        Ok(ForbiddenFamily {
            members: kept,
            mode,
        })
    }

    /// All trees on `h + 1` vertices: forbidding them bounds components at `h`.
    pub fn component_bound(h: usize, mode: Mode) -> Result<ForbiddenFamily> {
        ForbiddenFamily::new(trees(h + 1)?, mode)
    }

    pub fn members(&self) -> &[Pattern] {
        &self.members
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Largest member size.
    pub fn r(&self) -> usize {
        self.members.iter().map(Pattern::n).max().unwrap_or(0)
    }
}

/// Expands a preset such as `@trees 4`, `@star 3`, `@clique 3` or `@path 4`.
pub fn preset(spec: &str) -> Result<Vec<Pattern>> {
    let tok: Vec<&str> = spec
        .trim()
        .trim_start_matches('@')
        .split_whitespace()
        .collect();
    let [name, arg] = tok[..] else {
        return Err(Error::Invalid(format!(
            "preset `{spec}` must look like `@name N`"
        )));
    };
    let n: usize = arg
        .parse()
        .map_err(|_| Error::Invalid(format!("preset `{spec}`: `{arg}` is not a number")))?;
    match name {
        "trees" => trees(n),
        "star" => star(n).map(|p| vec![p]),
        "clique" => clique(n).map(|p| vec![p]),
        "path" => path(n).map(|p| vec![p]),
        _ => Err(Error::Invalid(format!("unknown preset `@{name}`"))),
    }
}

/// Parses the family format: blank-line separated blocks, each an edge list
/// defining one member or one or more `@preset N` lines, with an optional
/// `mode: subgraph|induced` line.
pub fn parse_family(text: &str) -> Result<ForbiddenFamily> {
    let mut mode = Mode::Subgraph;
    let mut members = Vec::new();
    let mut block = String::new();
    let flush = |block: &mut String, members: &mut Vec<Pattern>| -> Result<()> {
        if !block.trim().is_empty() {
            let g = parse_edge_list(block)?;
            members.push(Pattern::from_graph(&g)?);
        }
        block.clear();
        Ok(())
    };
    for line in text.lines() {
        let t = line.trim();
        if t.starts_with('#') {
            continue;
        }
        if t.is_empty() {
            flush(&mut block, &mut members)?;
        } else if let Some(rest) = t.strip_prefix("mode:") {
            mode = match rest.trim() {
                "subgraph" => Mode::Subgraph,
                "induced" => Mode::Induced,
                other => return Err(Error::Invalid(format!("unknown mode `{other}`"))),
            };
        } else if t.starts_with('@') {
            members.extend(preset(t)?);
        } else {
            block.push_str(t);
            block.push('\n');
        }
    }
    flush(&mut block, &mut members)?;
    ForbiddenFamily::new(members, mode)
}

/// An embedding of a member into a graph: `map[i]` is the image of pattern
/// vertex `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occurrence {
    pub member: usize,
    pub map: Vec<Vertex>,
}

/// Finds an embedding of some member (a strong one in induced mode).
pub fn find_member(g: &Graph, family: &ForbiddenFamily) -> Option<Occurrence> {
    for (i, p) in family.members().iter().enumerate() {
        if let Some(map) = embed(g, p, family.mode()) {
            return Some(Occurrence { member: i, map });
        }
    }
    None
}

pub fn contains_member(g: &Graph, family: &ForbiddenFamily) -> bool {
    find_member(g, family).is_some()
}

/// Backtracking search for an embedding of `p` into `g`.
pub fn embed(g: &Graph, p: &Pattern, mode: Mode) -> Option<Vec<Vertex>> {
    if p.n() > g.n() {
        return None;
    }
    // Visit pattern vertices so that each (where possible) has an earlier
    // neighbour, which keeps candidate lists short.
    let mut order = Vec::with_capacity(p.n());
    let mut placed = 0u8;
    while order.len() < p.n() {
        let next = (0..p.n())
            .filter(|&u| placed >> u & 1 == 0)
            .max_by_key(|&u| {
                (
                    (p.adj(u) & placed).count_ones(),
                    p.adj(u).count_ones(),
                    std::cmp::Reverse(u),
                )
            })
            .expect("unplaced vertex");
        order.push(next);
        placed |= 1 << next;
    }
    let mut map = vec![usize::MAX; p.n()];
    let mut used = vec![false; g.n()];
    fn rec(
        depth: usize,
        g: &Graph,
        p: &Pattern,
        mode: Mode,
        order: &[usize],
        map: &mut [Vertex],
        used: &mut [bool],
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let u = order[depth];
        let anchor = order[..depth].iter().copied().find(|&w| p.has_edge(u, w));
        let candidates: Vec<Vertex> = match anchor {
            Some(w) => g.neighbors(map[w]).to_vec(),
            None => g.vertices().collect(),
        };
        for x in candidates {
            if used[x] || g.degree(x) < p.adj(u).count_ones() as usize {
                continue;
            }
            let fits = order[..depth].iter().all(|&w| {
                let e = g.has_edge(x, map[w]);
                if p.has_edge(u, w) {
                    e
                } else {
                    mode == Mode::Subgraph || !e
                }
            });
            if !fits {
                continue;
            }
            map[u] = x;
            used[x] = true;
            if rec(depth + 1, g, p, mode, order, map, used) {
                return true;
            }
            used[x] = false;
        }
        false
    }
    rec(0, g, p, mode, &order, &mut map, &mut used).then_some(map)
}
