//! Tree decompositions: validation, the PACE `.td` format, the min-fill
//! heuristic, an exact search for tiny graphs, and conversion to nice form.

mod exact;
mod min_fill;
mod nice;

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{parse_num, Graph, Vertex};

pub use exact::exact_treewidth;
pub use min_fill::decompose_min_fill;
pub use nice::{
    classify, make_nice, make_nice_with, LeafBags, NiceDecomposition, NiceNode, NodeKind,
};

/// A tree of bags. Bags are sorted vertex lists; `edges` are the tree edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<Vertex>>,
    pub edges: Vec<(usize, usize)>,
    pub root: usize,
}

/// One failed decomposition condition, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A graph vertex appears in no bag.
    MissingVertex(String),
    /// No bag holds both endpoints of this edge.
    UncoveredEdge(String, String),
    /// The bags holding this vertex do not form a connected subtree.
    DisconnectedOccurrence(String),
    /// The bag structure is not a tree.
    NotATree(String),
    /// A bag mentions a vertex index the graph does not have.
    UnknownVertex { bag: usize, vertex: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingVertex(v) => write!(f, "vertex `{v}` is in no bag"),
            Violation::UncoveredEdge(u, v) => write!(f, "edge {u}-{v} is in no bag"),
            Violation::DisconnectedOccurrence(v) => {
                write!(f, "bags containing `{v}` are not connected")
            }
            Violation::NotATree(why) => write!(f, "not a tree: {why}"),
            Violation::UnknownVertex { bag, vertex } => {
                write!(
                    f,
                    "bag {bag} holds vertex index {vertex}, outside the graph"
                )
            }
        }
    }
}

impl TreeDecomposition {
    pub fn new(mut bags: Vec<Vec<Vertex>>, edges: Vec<(usize, usize)>, root: usize) -> Self {
        for b in &mut bags {
            b.sort_unstable();
            b.dedup();
        }
        TreeDecomposition { bags, edges, root }
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// Largest bag size minus one; 0 for a decomposition with only empty bags.
    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    pub(crate) fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            if a < adj.len() && b < adj.len() {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        adj
    }

    /// Merges every bag that is a subset of a neighbouring bag into that
    /// neighbour. Afterwards no tree edge joins a bag to one of its supersets,
    /// which bounds the node count by `n + 1`.
    pub fn contract_redundant(&self) -> TreeDecomposition {
        let n = self.bags.len();
        if n <= 1 {
            return self.clone();
        }
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for &(a, b) in &self.edges {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        let mut alive = vec![true; n];
        let mut root = self.root;
        let subset = |a: &[Vertex], b: &[Vertex]| a.iter().all(|x| b.binary_search(x).is_ok());
        let mut changed = true;
        while changed {
            changed = false;
            for a in 0..n {
                if !alive[a] {
                    continue;
                }
                let target = adj[a]
                    .iter()
                    .copied()
                    .find(|&b| subset(&self.bags[a], &self.bags[b]));
                if let Some(b) = target {
                    let nbrs: Vec<usize> = adj[a].iter().copied().filter(|&x| x != b).collect();
                    for x in nbrs {
                        adj[x].remove(&a);
                        adj[x].insert(b);
                        adj[b].insert(x);
                    }
                    adj[b].remove(&a);
                    adj[a].clear();
                    alive[a] = false;
                    if root == a {
                        root = b;
                    }
                    changed = true;
                }
            }
        }
        let mut map = vec![usize::MAX; n];
        let mut bags = Vec::new();
        for a in 0..n {
            if alive[a] {
                map[a] = bags.len();
                bags.push(self.bags[a].clone());
            }
        }
        let mut edges = Vec::new();
        for a in 0..n {
            for &b in &adj[a] {
                if a < b {
                    edges.push((map[a], map[b]));
                }
            }
        }
        TreeDecomposition {
            bags,
            edges,
            root: map[root],
        }
    }
}

fn is_tree(td: &TreeDecomposition) -> std::result::Result<(), String> {
    let n = td.bags.len();
    if n == 0 {
        return Err("no bags".into());
    }
    if td.root >= n {
        return Err(format!("root {} out of range", td.root));
    }
    if let Some(&(a, b)) = td.edges.iter().find(|&&(a, b)| a >= n || b >= n || a == b) {
        return Err(format!("bad tree edge {a}-{b}"));
    }
    if td.edges.len() != n - 1 {
        return Err(format!(
            "{} nodes need {} tree edges, found {}",
            n,
            n - 1,
            td.edges.len()
        ));
    }
    let adj = td.adjacency();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    if count != n {
        return Err("tree is disconnected".into());
    }
    Ok(())
}

/// Checks the three decomposition conditions (plus tree shape). An empty
/// result means the decomposition is valid.
pub fn validate(g: &Graph, td: &TreeDecomposition) -> Vec<Violation> {
    let mut out = Vec::new();
    if let Err(why) = is_tree(td) {
        out.push(Violation::NotATree(why));
        return out;
    }
    let mut occurs: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for (i, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if v >= g.n() {
                out.push(Violation::UnknownVertex { bag: i, vertex: v });
            } else {
                occurs[v].push(i);
            }
        }
    }
    for v in g.vertices() {
        if occurs[v].is_empty() {
            out.push(Violation::MissingVertex(g.name(v).to_string()));
        }
    }
    for &(u, v) in g.edges() {
        let covered = occurs[u]
            .iter()
            .any(|&i| td.bags[i].binary_search(&v).is_ok());
        if !covered {
            out.push(Violation::UncoveredEdge(
                g.name(u).to_string(),
                g.name(v).to_string(),
            ));
        }
    }
    let adj = td.adjacency();
    let mut mark = vec![usize::MAX; td.bags.len()];
    for v in g.vertices() {
        let occ = &occurs[v];
        if occ.len() <= 1 {
            continue;
        }
        for &i in occ {
            mark[i] = v;
        }
        let mut stack = vec![occ[0]];
        let mut seen = BTreeSet::from([occ[0]]);
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if mark[y] == v && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        if seen.len() != occ.len() {
            out.push(Violation::DisconnectedOccurrence(g.name(v).to_string()));
        }
    }
    out
}

/// Parses the PACE `.td` format. Vertex `j` in the file is the graph vertex
/// with dense index `j - 1` (for `.gr` input that is the vertex named `j`).
/// Node 1 becomes the root. The result is validated against `g`.
pub fn parse_td(text: &str, g: &Graph) -> Result<TreeDecomposition> {
    let mut header: Option<(usize, usize)> = None;
    let mut bags: Vec<Option<Vec<Vertex>>> = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let tok: Vec<&str> = raw.split_whitespace().collect();
        if tok.is_empty() || tok[0] == "c" {
            continue;
        }
        match tok[0] {
            "s" => {
                if tok.len() != 5 || tok[1] != "td" {
                    return Err(Error::Parse {
                        line,
                        message: "expected `s td N W n`".into(),
                    });
                }
                let count: usize = parse_num(tok[2], line)?;
                let n: usize = parse_num(tok[4], line)?;
                if n != g.n() {
                    return Err(Error::Mismatch(format!(
                        "decomposition is for {n} vertices, graph has {}",
                        g.n()
                    )));
                }
                bags = vec![None; count];
                header = Some((count, n));
            }
            "b" => {
                let Some((count, n)) = header else {
                    return Err(Error::Parse {
                        line,
                        message: "bag before header".into(),
                    });
                };
                if tok.len() < 2 {
                    return Err(Error::Parse {
                        line,
                        message: "bag line without id".into(),
                    });
                }
                let id: usize = parse_num(tok[1], line)?;
                if id == 0 || id > count {
                    return Err(Error::Parse {
                        line,
                        message: format!("bag id {id} out of range"),
                    });
                }
                let mut bag = Vec::new();
                for t in &tok[2..] {
                    let v: usize = parse_num(t, line)?;
                    if v == 0 || v > n {
                        return Err(Error::Parse {
                            line,
                            message: format!("vertex {v} out of range 1..={n}"),
                        });
                    }
                    bag.push(v - 1);
                }
                if bags[id - 1].replace(bag).is_some() {
                    return Err(Error::Parse {
                        line,
                        message: format!("bag {id} defined twice"),
                    });
                }
            }
            _ => {
                let Some((count, _)) = header else {
                    return Err(Error::Parse {
                        line,
                        message: "tree edge before header".into(),
                    });
                };
                if tok.len() != 2 {
                    return Err(Error::Parse {
                        line,
                        message: "expected `i j`".into(),
                    });
                }
                let a: usize = parse_num(tok[0], line)?;
                let b: usize = parse_num(tok[1], line)?;
                if a == 0 || b == 0 || a > count || b > count {
                    return Err(Error::Parse {
                        line,
                        message: "tree edge out of range".into(),
                    });
                }
                edges.push((a - 1, b - 1));
            }
        }
    }
    if header.is_none() {
        return Err(Error::Parse {
            line: 0,
            message: "missing `s td` header".into(),
        });
    }
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| {
            b.ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("bag {} missing", i + 1),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let td = TreeDecomposition::new(bags, edges, 0);
    let violations = validate(g, &td);
    if !violations.is_empty() {
        return Err(Error::InvalidDecomposition(violations));
    }
    Ok(td)
}

/// Writes the PACE `.td` format (1-based bag ids and vertex indices).
pub fn write_td(td: &TreeDecomposition, n: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "s td {} {} {}", td.len(), td.width() + 1, n);
    for (i, bag) in td.bags.iter().enumerate() {
        let _ = write!(out, "b {}", i + 1);
        for &v in bag {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    for &(a, b) in &td.edges {
        let _ = writeln!(out, "{} {}", a + 1, b + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge() -> Graph {
        Graph::from_named_edges(&[("a", "b")]).unwrap()
    }

    #[test]
    fn single_bag_is_valid() {
        let td = TreeDecomposition::new(vec![vec![0, 1]], vec![], 0);
        assert!(validate(&edge(), &td).is_empty());
        assert_eq!(td.width(), 1);
    }

    #[test]
    fn uncovered_edge_is_reported() {
        let td = TreeDecomposition::new(vec![vec![0], vec![1]], vec![(0, 1)], 0);
        let v = validate(&edge(), &td);
        assert_eq!(v, vec![Violation::UncoveredEdge("a".into(), "b".into())]);
    }

    #[test]
    fn disconnected_occurrence_is_reported() {
        let td = TreeDecomposition::new(
            vec![vec![0, 1], vec![1], vec![0, 1]],
            vec![(0, 1), (1, 2)],
            0,
        );
        let v = validate(&edge(), &td);
        assert_eq!(v, vec![Violation::DisconnectedOccurrence("a".into())]);
        let edgeless = Graph::from_index_edges(2, &[]).unwrap();
        assert_eq!(validate(&edgeless, &td).len(), 1);
    }

    #[test]
    fn missing_vertex_and_shape() {
        let td = TreeDecomposition::new(vec![vec![0]], vec![], 0);
        assert!(matches!(
            validate(&edge(), &td)[0],
            Violation::MissingVertex(_)
        ));
        let cyc = TreeDecomposition::new(vec![vec![0, 1]; 3], vec![(0, 1), (1, 2), (2, 0)], 0);
        assert!(matches!(validate(&edge(), &cyc)[0], Violation::NotATree(_)));
    }

    #[test]
    fn parse_td_cases() {
        let g = edge();
        let td = parse_td("s td 1 2 2\nb 1 1 2\n", &g).unwrap();
        assert_eq!(td.width(), 1);
        assert!(matches!(
            parse_td("s td 1 2 2\nb 1 1 9\n", &g),
            Err(Error::Parse { line: 2, .. })
        ));
        match parse_td("s td 2 1 2\nb 1 1\nb 2 2\n1 2\n", &g) {
            Err(Error::InvalidDecomposition(v)) => {
                assert_eq!(v, vec![Violation::UncoveredEdge("a".into(), "b".into())])
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_td("s td 1 2 3\nb 1 1 2\n", &g),
            Err(Error::Mismatch(_))
        ));
    }

    #[test]
    fn td_round_trip() {
        let g = Graph::from_index_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let td = decompose_min_fill(&g);
        let back = parse_td(&write_td(&td, g.n()), &g).unwrap();
        assert_eq!(back.bags, td.bags);
        assert_eq!(back.width(), td.width());
    }

    #[test]
    fn contraction_removes_subset_bags() {
        let td = TreeDecomposition::new(
            vec![vec![0, 1], vec![1], vec![1, 2], vec![2]],
            vec![(0, 1), (1, 2), (2, 3)],
            3,
        );
        let c = td.contract_redundant();
        assert_eq!(c.len(), 2);
        let g = Graph::from_index_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(validate(&g, &c).is_empty());
        assert_eq!(c.bags[c.root], vec![1, 2]);
    }
}
