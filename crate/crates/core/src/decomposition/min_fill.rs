use rustc_hash::FxHashSet;

use super::TreeDecomposition;
use crate::graph::{Graph, Vertex};

fn fill_in(adj: &[FxHashSet<Vertex>], v: Vertex) -> usize {
    let nb: Vec<Vertex> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Elimination ordering by minimum fill-in, ties broken by minimum degree and
/// then by vertex index, so the result depends only on the graph.
pub fn min_fill_order(g: &Graph) -> Vec<Vertex> {
    let n = g.n();
    let mut adj: Vec<FxHashSet<Vertex>> = g
        .vertices()
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut fill: Vec<usize> = (0..n).map(|v| fill_in(&adj, v)).collect();
    let mut gone = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !gone[v])
            .min_by_key(|&v| (fill[v], adj[v].len(), v))
            .expect("a vertex remains");
        gone[v] = true;
        order.push(v);
        let nb: Vec<Vertex> = adj[v].iter().copied().collect();
        for &a in &nb {
            adj[a].remove(&v);
        }
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        adj[v].clear();
        let mut touched: FxHashSet<Vertex> = nb.iter().copied().collect();
        for &a in &nb {
            touched.extend(adj[a].iter().copied());
        }
        for u in touched {
            fill[u] = fill_in(&adj, u);
        }
    }
    order
}

/// Tree decomposition from an elimination ordering: the bag of `v` is `v`
/// plus its neighbours at elimination time, and its parent is the first of
/// those neighbours to be eliminated.
pub fn decomposition_from_order(g: &Graph, order: &[Vertex]) -> TreeDecomposition {
    let n = g.n();
    if n == 0 {
        return TreeDecomposition::new(vec![Vec::new()], Vec::new(), 0);
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut adj: Vec<FxHashSet<Vertex>> = g
        .vertices()
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut bags = Vec::with_capacity(n);
    let mut edges = Vec::new();
    let mut roots = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let nb: Vec<Vertex> = adj[v].iter().copied().collect();
        let mut bag = nb.clone();
        bag.push(v);
        bags.push(bag);
        match nb.iter().min_by_key(|&&u| pos[u]) {
            Some(&p) => edges.push((i, pos[p])),
            None => roots.push(i),
        }
        for &a in &nb {
            adj[a].remove(&v);
        }
        for (j, &a) in nb.iter().enumerate() {
            for &b in &nb[j + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
    }
    // One root per connected component; chain them to the last one.
    let last = *roots.last().expect("the last eliminated vertex is a root");
    for &r in &roots[..roots.len() - 1] {
        edges.push((r, last));
    }
    TreeDecomposition::new(bags, edges, last)
}

/// Min-fill heuristic decomposition with redundant bags contracted.
pub fn decompose_min_fill(g: &Graph) -> TreeDecomposition {
    decomposition_from_order(g, &min_fill_order(g)).contract_redundant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::validate;

    #[test]
    fn forest_has_width_one() {
        let g = Graph::from_index_edges(7, &[(0, 1), (1, 2), (1, 3), (4, 5)]).unwrap();
        let td = decompose_min_fill(&g);
        assert!(validate(&g, &td).is_empty());
        assert_eq!(td.width(), 1);
    }

    #[test]
    fn clique_and_cycle() {
        let k4 =
            Graph::from_index_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(decompose_min_fill(&k4).width(), 3);
        let c5 = Graph::from_index_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let td = decompose_min_fill(&c5);
        assert!(validate(&c5, &td).is_empty());
        assert_eq!(td.width(), 2);
    }

    #[test]
    fn isolated_and_empty() {
        let g = Graph::from_index_edges(3, &[]).unwrap();
        let td = decompose_min_fill(&g);
        assert!(validate(&g, &td).is_empty());
        assert_eq!(td.width(), 0);
        let e = Graph::from_index_edges(0, &[]).unwrap();
        assert!(validate(&e, &decompose_min_fill(&e)).is_empty());
    }
}
