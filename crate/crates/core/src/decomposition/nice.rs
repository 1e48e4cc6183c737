use super::{validate, TreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Leaf,
    Introduce(Vertex),
    Forget(Vertex),
    Join,
}

impl NodeKind {
    pub fn label(&self) -> &'static str {
        match self {
            NodeKind::Leaf => "leaf",
            NodeKind::Introduce(_) => "introduce",
            NodeKind::Forget(_) => "forget",
            NodeKind::Join => "join",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub bag: Vec<Vertex>,
    pub kind: NodeKind,
    pub children: Vec<usize>,
}

/// A nice tree decomposition. Nodes are numbered so that every child has a
/// smaller id than its parent; the root is the last node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceDecomposition {
    nodes: Vec<NiceNode>,
    parent: Vec<Option<usize>>,
}

/// How leaf bags are shaped.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LeafBags {
    /// Peel leaves down to a single vertex while the node count stays within
    /// `4n`; larger leaves keep their full bag.
    #[default]
    Budgeted,
    /// Always peel to singleton leaves, regardless of node count.
    Singleton,
    /// Keep every leaf bag as it is.
    Full,
}

impl NiceDecomposition {
    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn node(&self, t: usize) -> &NiceNode {
        &self.nodes[t]
    }

    pub fn parent(&self, t: usize) -> Option<usize> {
        self.parent[t]
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn width(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.bag.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    /// Node counts as (leaf, introduce, forget, join).
    pub fn kind_counts(&self) -> [usize; 4] {
        let mut c = [0; 4];
        for n in &self.nodes {
            c[kind_index(n.kind)] += 1;
        }
        c
    }

    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|n| n.bag.clone()).collect();
        let mut edges = Vec::new();
        for (t, n) in self.nodes.iter().enumerate() {
            for &c in &n.children {
                edges.push((c, t));
            }
        }
        TreeDecomposition::new(bags, edges, self.root())
    }

    /// Checks the structural rules of every node kind and that the
    /// underlying decomposition is valid for `g`.
    pub fn check(&self, g: &Graph) -> Result<()> {
        for (t, n) in self.nodes.iter().enumerate() {
            let bad = |why: &str| {
                Err(Error::Invalid(format!(
                    "node {t} ({}): {why}",
                    n.kind.label()
                )))
            };
            if n.children.iter().any(|&c| c >= t) {
                return bad("child id not below parent id");
            }
            match n.kind {
                NodeKind::Leaf => {
                    if !n.children.is_empty() {
                        return bad("leaf with children");
                    }
                }
                NodeKind::Introduce(v) | NodeKind::Forget(v) => {
                    if n.children.len() != 1 {
                        return bad("expected one child");
                    }
                    let child = &self.nodes[n.children[0]].bag;
                    let (big, small) = if matches!(n.kind, NodeKind::Introduce(_)) {
                        (&n.bag, child)
                    } else {
                        (child, &n.bag)
                    };
                    let mut expect = small.clone();
                    expect.push(v);
                    expect.sort_unstable();
                    if small.contains(&v) || &expect != big {
                        return bad("bags differ by more than the named vertex");
                    }
                }
                NodeKind::Join => {
                    if n.children.len() != 2
                        || n.children.iter().any(|&c| self.nodes[c].bag != n.bag)
                    {
                        return bad("join needs two children with identical bags");
                    }
                }
            }
        }
        let violations = validate(g, &self.to_tree_decomposition());
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidDecomposition(violations))
        }
    }
}

fn kind_index(k: NodeKind) -> usize {
    match k {
        NodeKind::Leaf => 0,
        NodeKind::Introduce(_) => 1,
        NodeKind::Forget(_) => 2,
        NodeKind::Join => 3,
    }
}

/// The stored kind of node `t`.
pub fn classify(nd: &NiceDecomposition, t: usize) -> Result<NodeKind> {
    nd.nodes.get(t).map(|n| n.kind).ok_or(Error::UnknownNode(t))
}

pub fn make_nice(td: &TreeDecomposition, g: &Graph) -> Result<NiceDecomposition> {
    make_nice_with(td, g, LeafBags::default())
}

struct Builder {
    nodes: Vec<NiceNode>,
}

impl Builder {
    fn push(&mut self, bag: Vec<Vertex>, kind: NodeKind, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode {
            bag,
            kind,
            children,
        });
        self.nodes.len() - 1
    }

    fn forget_down(&mut self, mut top: usize, keep: &[Vertex]) -> usize {
        let drop: Vec<Vertex> = self.nodes[top]
            .bag
            .iter()
            .copied()
            .filter(|v| keep.binary_search(v).is_err())
            .collect();
        for v in drop {
            let bag: Vec<Vertex> = self.nodes[top]
                .bag
                .iter()
                .copied()
                .filter(|&x| x != v)
                .collect();
            top = self.push(bag, NodeKind::Forget(v), vec![top]);
        }
        top
    }

    fn introduce_up(&mut self, mut top: usize, target: &[Vertex]) -> usize {
        for &v in target {
            if self.nodes[top].bag.binary_search(&v).is_err() {
                let mut bag = self.nodes[top].bag.clone();
                let at = bag.binary_search(&v).unwrap_err();
                bag.insert(at, v);
                top = self.push(bag, NodeKind::Introduce(v), vec![top]);
            }
        }
        top
    }

    fn join(&mut self, a: usize, b: usize) -> usize {
        let bag = self.nodes[a].bag.clone();
        self.push(bag, NodeKind::Join, vec![a, b])
    }
}

/// Converts a valid decomposition into nice form of the same width.
///
/// Bags that are subsets of a neighbour are contracted first. Below each
/// remaining node, children are forgotten down to their intersection with
/// the node's bag, children with equal intersections are joined, the missing
/// vertices are introduced, and the groups are joined at the full bag.
pub fn make_nice_with(
    td: &TreeDecomposition,
    g: &Graph,
    leaves: LeafBags,
) -> Result<NiceDecomposition> {
    let violations = validate(g, td);
    if !violations.is_empty() {
        return Err(Error::InvalidDecomposition(violations));
    }
    let c = td.contract_redundant();
    let adj = c.adjacency();
    let min_vertex = |i: usize| c.bags[i].first().copied().unwrap_or(usize::MAX);
    let root = (0..c.len())
        .filter(|&i| adj[i].len() <= 1)
        .min_by_key(|&i| (min_vertex(i), i))
        .unwrap_or(0);

    // Root the contracted tree and order children by smallest vertex.
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); c.len()];
    let mut order = Vec::with_capacity(c.len());
    let mut seen = vec![false; c.len()];
    let mut stack = vec![root];
    seen[root] = true;
    while let Some(x) = stack.pop() {
        order.push(x);
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                children[x].push(y);
                stack.push(y);
            }
        }
    }
    for ch in &mut children {
        ch.sort_by_key(|&i| (min_vertex(i), i));
    }

    let mut b = Builder { nodes: Vec::new() };
    let mut top = vec![usize::MAX; c.len()];
    for &t in order.iter().rev() {
        let bag = &c.bags[t];
        if children[t].is_empty() {
            top[t] = b.push(bag.clone(), NodeKind::Leaf, vec![]);
            continue;
        }
        // (intersection, joined top) in first-appearance order.
        let mut groups: Vec<(Vec<Vertex>, usize)> = Vec::new();
        for &ch in &children[t] {
            let inter: Vec<Vertex> = c.bags[ch]
                .iter()
                .copied()
                .filter(|v| bag.binary_search(v).is_ok())
                .collect();
            let down = b.forget_down(top[ch], &inter);
            match groups.iter_mut().find(|(i, _)| *i == inter) {
                Some(gr) => gr.1 = b.join(gr.1, down),
                None => groups.push((inter, down)),
            }
        }
        let mut acc: Option<usize> = None;
        for (_, gtop) in groups {
            let up = b.introduce_up(gtop, bag);
            acc = Some(match acc {
                None => up,
                Some(a) => b.join(a, up),
            });
        }
        top[t] = acc.expect("at least one child");
    }

    let limit = 4 * g.n();
    let mut budget = limit.saturating_sub(b.nodes.len());
    let peel: Vec<bool> = b
        .nodes
        .iter()
        .map(|n| {
            if n.kind != NodeKind::Leaf || n.bag.len() <= 1 {
                return false;
            }
            match leaves {
                LeafBags::Full => false,
                LeafBags::Singleton => true,
                LeafBags::Budgeted => {
                    let extra = n.bag.len() - 1;
                    if extra <= budget {
                        budget -= extra;
                        true
                    } else {
                        false
                    }
                }
            }
        })
        .collect();

    // Re-emit in post-order, expanding peeled leaves into introduce chains.
    let mut out = Builder {
        nodes: Vec::with_capacity(b.nodes.len()),
    };
    let mut map = vec![usize::MAX; b.nodes.len()];
    for (i, n) in b.nodes.iter().enumerate() {
        let id = if peel[i] {
            let first = n.bag[0];
            let leaf = out.push(vec![first], NodeKind::Leaf, vec![]);
            out.introduce_up(leaf, &n.bag)
        } else {
            let kids = n.children.iter().map(|&c| map[c]).collect();
            out.push(n.bag.clone(), n.kind, kids)
        };
        map[i] = id;
    }
    let mut parent = vec![None; out.nodes.len()];
    for (t, n) in out.nodes.iter().enumerate() {
        for &ch in &n.children {
            parent[ch] = Some(t);
        }
    }
    Ok(NiceDecomposition {
        nodes: out.nodes,
        parent,
    })
}
