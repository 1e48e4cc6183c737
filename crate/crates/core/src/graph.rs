//! Simple undirected graphs with string vertex names mapped to dense indices.
//!
//! Vertices are numbered in order of first appearance. Edges are stored with
//! the smaller endpoint first and kept sorted, so the edge index order is the
//! lexicographic order on endpoint pairs. Every solver in the crate reports
//! and tie-breaks on that order.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type Vertex = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, Vertex>,
    adj: Vec<Vec<Vertex>>,
    edges: Vec<(Vertex, Vertex)>,
}

#[derive(Default, Debug)]
pub struct GraphBuilder {
    names: Vec<String>,
    index: HashMap<String, Vertex>,
    edges: BTreeSet<(Vertex, Vertex)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: &str) -> Vertex {
        if let Some(&v) = self.index.get(name) {
            return v;
        }
        let v = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), v);
        v
    }

    /// Adds the edge `uv`; duplicates are ignored. Self-loops are rejected.
    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop {
                line: 0,
                vertex: self.names[u].clone(),
            });
        }
        self.edges.insert(if u < v { (u, v) } else { (v, u) });
        Ok(())
    }

    pub fn build(self) -> Graph {
        let n = self.names.len();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph {
            names: self.names,
            index: self.index,
            adj,
            edges: self.edges.into_iter().collect(),
        }
    }
}

impl Graph {
    /// Graph on vertices named `0..n` with the given index pairs.
    pub fn from_index_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Graph> {
        let mut b = GraphBuilder::new();
        for v in 0..n {
            b.add_vertex(&v.to_string());
        }
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::UnknownVertex(u.max(v).to_string()));
            }
            b.add_edge(u, v)?;
        }
        Ok(b.build())
    }

    /// Graph from named edges, vertices numbered by first appearance.
    pub fn from_named_edges(edges: &[(&str, &str)]) -> Result<Graph> {
        let mut b = GraphBuilder::new();
        for &(x, y) in edges {
            let u = b.add_vertex(x);
            let v = b.add_vertex(y);
            b.add_edge(u, v)?;
        }
        Ok(b.build())
    }

    /// Same vertices, keeping the edges whose id passes `keep`.
    pub fn spanning_subgraph(&self, keep: impl Fn(usize) -> bool) -> Graph {
        let edges: Vec<(Vertex, Vertex)> = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(e, _)| keep(e))
            .map(|(_, &uv)| uv)
            .collect();
        let mut adj = vec![Vec::new(); self.n()];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph {
            names: self.names.clone(),
            index: self.index.clone(),
            adj,
            edges,
        }
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.names.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Index of edge `uv` in [`Graph::edges`].
    pub fn edge_id(&self, u: Vertex, v: Vertex) -> Option<usize> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.binary_search(&key).ok()
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.names[v]
    }

    pub fn vertex(&self, name: &str) -> Option<Vertex> {
        self.index.get(name).copied()
    }

    pub fn vertex_or_err(&self, name: &str) -> Result<Vertex> {
        self.vertex(name)
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn edge_name(&self, e: usize) -> (&str, &str) {
        let (u, v) = self.edges[e];
        (self.name(u), self.name(v))
    }
}

/// A set of unordered vertex pairs, stored with the smaller index first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSet(BTreeSet<(Vertex, Vertex)>);

impl EdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, u: Vertex, v: Vertex) -> bool {
        self.0.insert(if u < v { (u, v) } else { (v, u) })
    }

    pub fn contains(&self, u: Vertex, v: Vertex) -> bool {
        self.0.contains(&if u < v { (u, v) } else { (v, u) })
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.0.iter().copied()
    }

    pub fn from_edge_ids(g: &Graph, ids: impl IntoIterator<Item = usize>) -> Self {
        EdgeSet(ids.into_iter().map(|e| g.edges()[e]).collect())
    }

    /// Total deletion cost; unit costs when `costs` is `None`.
    pub fn cost(&self, g: &Graph, costs: Option<&[u64]>) -> u64 {
        match costs {
            None => self.len() as u64,
            Some(c) => self
                .iter()
                .map(|(u, v)| g.edge_id(u, v).map_or(0, |e| c[e]))
                .sum(),
        }
    }
}

impl FromIterator<(Vertex, Vertex)> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = (Vertex, Vertex)>>(iter: I) -> Self {
        let mut s = EdgeSet::new();
        for (u, v) in iter {
            s.insert(u, v);
        }
        s
    }
}

/// Optional per-vertex weights and limits and per-edge deletion costs.
/// Vectors are indexed by vertex (or edge) index of the graph they annotate.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexAnnotations {
    pub weights: Option<Vec<u64>>,
    pub limits: Option<Vec<u64>>,
    pub edge_costs: Option<Vec<u64>>,
}

impl VertexAnnotations {
    pub fn is_trivial(&self) -> bool {
        self.weights.is_none() && self.limits.is_none() && self.edge_costs.is_none()
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        let check = |vals: &Vec<u64>, len: usize, what: &str| -> Result<()> {
            if vals.len() != len {
                return Err(Error::Invalid(format!(
                    "{what} annotation has {} entries, graph needs {len}",
                    vals.len()
                )));
            }
            if let Some(i) = vals.iter().position(|&x| x == 0) {
                return Err(Error::NonPositiveAnnotation {
                    name: format!("{what}[{i}]"),
                    value: 0,
                });
            }
            Ok(())
        };
        if let Some(w) = &self.weights {
            check(w, g.n(), "weight")?;
        }
        if let Some(l) = &self.limits {
            check(l, g.n(), "limit")?;
        }
        if let Some(c) = &self.edge_costs {
            check(c, g.m(), "cost")?;
        }
        Ok(())
    }

    pub fn weight(&self, v: Vertex) -> u64 {
        self.weights.as_ref().map_or(1, |w| w[v])
    }

    pub fn limit(&self, v: Vertex) -> u64 {
        self.limits.as_ref().map_or(u64::MAX, |l| l[v])
    }

    pub fn edge_cost(&self, e: usize) -> u64 {
        self.edge_costs.as_ref().map_or(1, |c| c[e])
    }
}

fn tokens(line: &str) -> Option<Vec<&str>> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        None
    } else {
        Some(line.split_whitespace().collect())
    }
}

/// Parses the edge-list format: one `u v` pair per line, `#` comments, and
/// `v name` lines declaring (possibly isolated) vertices.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut b = GraphBuilder::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let Some(tok) = tokens(raw) else { continue };
        if tok.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected two tokens, found {}", tok.len()),
            });
        }
        if tok[0] == "v" {
            b.add_vertex(tok[1]);
            continue;
        }
        if tok[0] == tok[1] {
            return Err(Error::SelfLoop {
                line,
                vertex: tok[0].to_string(),
            });
        }
        let u = b.add_vertex(tok[0]);
        let v = b.add_vertex(tok[1]);
        b.add_edge(u, v)?;
    }
    Ok(b.build())
}

/// Parses the PACE `.gr` format (`p tw n m` header, 1-based edge lines).
pub fn parse_gr(text: &str) -> Result<Graph> {
    let mut b = GraphBuilder::new();
    let mut n = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let Some(tok) = tokens(raw) else { continue };
        if tok[0] == "c" {
            continue;
        }
        if tok[0] == "p" {
            if tok.len() != 4 || tok[1] != "tw" {
                return Err(Error::Parse {
                    line,
                    message: "expected `p tw n m`".into(),
                });
            }
            let count: usize = parse_num(tok[2], line)?;
            for v in 1..=count {
                b.add_vertex(&v.to_string());
            }
            n = Some(count);
            continue;
        }
        let Some(count) = n else {
            return Err(Error::Parse {
                line,
                message: "edge before `p tw` header".into(),
            });
        };
        if tok.len() != 2 {
            return Err(Error::Parse {
                line,
                message: "expected `u v`".into(),
            });
        }
        let u: usize = parse_num(tok[0], line)?;
        let v: usize = parse_num(tok[1], line)?;
        if u == 0 || v == 0 || u > count || v > count {
            return Err(Error::Parse {
                line,
                message: format!("vertex out of range 1..={count}"),
            });
        }
        if u == v {
            return Err(Error::SelfLoop {
                line,
                vertex: u.to_string(),
            });
        }
        b.add_edge(u - 1, v - 1)?;
    }
    if n.is_none() {
        return Err(Error::Parse {
            line: 0,
            message: "missing `p tw n m` header".into(),
        });
    }
    Ok(b.build())
}

/// Picks `.gr` when the first content line is a `p` header, edge list otherwise.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let first = text
        .lines()
        .filter_map(tokens)
        .find(|t| t[0] != "c")
        .map(|t| t[0] == "p");
    if first == Some(true) {
        parse_gr(text)
    } else {
        parse_edge_list(text)
    }
}

pub(crate) fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid integer `{tok}`"),
    })
}

/// Writes `g` in the edge-list format. Every vertex gets a `v` line first so
/// that the vertex numbering survives a round trip.
pub fn to_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for v in g.vertices() {
        let _ = writeln!(out, "v {}", g.name(v));
    }
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{} {}", g.name(u), g.name(v));
    }
    out
}

pub fn edge_set_to_edge_list(g: &Graph, set: &EdgeSet) -> String {
    let mut out = String::new();
    for (u, v) in set.iter() {
        let _ = writeln!(out, "{} {}", g.name(u), g.name(v));
    }
    out
}

/// Reads a set of edges of `g` written as an edge list.
pub fn parse_edge_set(g: &Graph, text: &str) -> Result<EdgeSet> {
    let mut set = EdgeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let Some(tok) = tokens(raw) else { continue };
        if tok.len() != 2 {
            return Err(Error::Parse {
                line: i + 1,
                message: "expected `u v`".into(),
            });
        }
        let u = g.vertex_or_err(tok[0])?;
        let v = g.vertex_or_err(tok[1])?;
        set.insert(u, v);
    }
    Ok(set)
}

/// Reads `name value` lines. With `require_all`, every vertex must appear;
/// otherwise missing vertices take `default`.
pub fn parse_vertex_values(
    g: &Graph,
    text: &str,
    require_all: bool,
    default: u64,
) -> Result<Vec<u64>> {
    let mut vals: Vec<Option<u64>> = vec![None; g.n()];
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let Some(tok) = tokens(raw) else { continue };
        if tok.len() != 2 {
            return Err(Error::Parse {
                line,
                message: "expected `vertex value`".into(),
            });
        }
        let v = g.vertex_or_err(tok[0])?;
        let x: u64 = parse_num(tok[1], line)?;
        if x == 0 {
            return Err(Error::NonPositiveAnnotation {
                name: tok[0].to_string(),
                value: x,
            });
        }
        vals[v] = Some(x);
    }
    vals.iter()
        .enumerate()
        .map(|(v, x)| match x {
            Some(x) => Ok(*x),
            None if require_all => Err(Error::MissingWeight(g.name(v).to_string())),
            None => Ok(default),
        })
        .collect()
}

/// Reads `u v cost` lines; unlisted edges cost 1.
pub fn parse_edge_costs(g: &Graph, text: &str) -> Result<Vec<u64>> {
    let mut costs = vec![1; g.m()];
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let Some(tok) = tokens(raw) else { continue };
        if tok.len() != 3 {
            return Err(Error::Parse {
                line,
                message: "expected `u v cost`".into(),
            });
        }
        let u = g.vertex_or_err(tok[0])?;
        let v = g.vertex_or_err(tok[1])?;
        let e = g
            .edge_id(u, v)
            .ok_or_else(|| Error::MissingEdge(tok[0].to_string(), tok[1].to_string()))?;
        let c: u64 = parse_num(tok[2], line)?;
        if c == 0 {
            return Err(Error::NonPositiveAnnotation {
                name: format!("{} {}", tok[0], tok[1]),
                value: 0,
            });
        }
        costs[e] = c;
    }
    Ok(costs)
}

/// `G[U]`, keeping the relative vertex order of `g`.
pub fn induced_subgraph(g: &Graph, vertices: &[Vertex]) -> Result<Graph> {
    let mut keep: Vec<Vertex> = vertices.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&v| v >= g.n()) {
        return Err(Error::UnknownVertex(bad.to_string()));
    }
    let mut b = GraphBuilder::new();
    let mut map = vec![usize::MAX; g.n()];
    for &v in &keep {
        map[v] = b.add_vertex(g.name(v));
    }
    for &(u, v) in g.edges() {
        if map[u] != usize::MAX && map[v] != usize::MAX {
            b.add_edge(map[u], map[v])?;
        }
    }
    Ok(b.build())
}

pub fn delete_edges(g: &Graph, deleted: &EdgeSet) -> Result<Graph> {
    for (u, v) in deleted.iter() {
        if u >= g.n() || v >= g.n() || !g.has_edge(u, v) {
            let name = |x: Vertex| {
                if x < g.n() {
                    g.name(x).to_string()
                } else {
                    x.to_string()
                }
            };
            return Err(Error::MissingEdge(name(u), name(v)));
        }
    }
    let mut b = GraphBuilder::new();
    for v in g.vertices() {
        b.add_vertex(g.name(v));
    }
    for &(u, v) in g.edges() {
        if !deleted.contains(u, v) {
            b.add_edge(u, v)?;
        }
    }
    Ok(b.build())
}

/// Connected components, each sorted, ordered by smallest member.
pub fn connected_components(g: &Graph) -> Vec<Vec<Vertex>> {
    let mut seen = vec![false; g.n()];
    let mut out = Vec::new();
    for s in g.vertices() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut block = vec![s];
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    block.push(w);
                    stack.push(w);
                }
            }
        }
        block.sort_unstable();
        out.push(block);
    }
    out
}

/// Largest component size, or largest component weight when weights are given.
pub fn max_component_metric(g: &Graph, weights: Option<&[u64]>) -> Result<u64> {
    if let Some(w) = weights {
        if w.len() < g.n() {
            return Err(Error::MissingWeight(g.name(w.len()).to_string()));
        }
    }
    Ok(connected_components(g)
        .iter()
        .map(|c| match weights {
            None => c.len() as u64,
            Some(w) => c.iter().map(|&v| w[v]).sum(),
        })
        .max()
        .unwrap_or(0))
}

/// True when every component has metric at most `h` and at most the
/// smallest limit among its members.
pub fn component_bound_holds(g: &Graph, h: u64, ann: &VertexAnnotations) -> bool {
    connected_components(g).iter().all(|c| {
        let metric: u64 = c.iter().map(|&v| ann.weight(v)).sum();
        let limit = c.iter().map(|&v| ann.limit(v)).min().unwrap_or(u64::MAX);
        metric <= h && metric <= limit
    })
}
