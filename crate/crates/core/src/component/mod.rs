//! Edge deletion down to bounded component size (or weight), the specialised
//! DP over partition/capacity states.
//!
//! A state of a node is a partition of its bag into blocks that may still
//! share a component, plus a capacity per block bounding the final size of
//! that component. Tables map each reachable state to the cheapest deletion
//! set inside the node's subtree; values above the budget are dropped.

mod dp;
mod state;

pub use dp::ComponentTable;
pub use state::{ComponentState, MAX_BAG};

use crate::bits::Scored;
use crate::decomposition::NiceDecomposition;
use crate::driver::{run, RunOptions, RunOutput, StateStats};
use crate::error::{Error, Result};
use crate::graph::{
    component_bound_holds, delete_edges, EdgeSet, Graph, Vertex, VertexAnnotations,
};
use crate::partition::bell;
use dp::Ctx;

/// `h`, the budget `k`, and optional weights, limits and edge costs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    pub h: u64,
    pub k: u64,
    pub annotations: VertexAnnotations,
}

impl ProblemSpec {
    pub fn new(h: u64, k: u64) -> Self {
        ProblemSpec {
            h,
            k,
            annotations: VertexAnnotations::default(),
        }
    }

    /// Budget large enough that the solver reports the true minimum.
    pub fn minimize(g: &Graph, h: u64) -> Self {
        Self::new(h, g.m() as u64)
    }

    pub fn with_annotations(mut self, annotations: VertexAnnotations) -> Self {
        self.annotations = annotations;
        self
    }
}

/// Total deletion cost of removing every edge.
pub fn total_cost(g: &Graph, ann: &VertexAnnotations) -> u64 {
    (0..g.m()).map(|e| ann.edge_cost(e)).sum()
}

/// All valid states of `bag` under `spec`, without any solver-side clamping.
/// With limits active each block also ranges over its ceiling.
///
/// Panics if `h` does not fit in 16 bits or the bag exceeds [`MAX_BAG`].
pub fn enumerate_component_states(
    g: &Graph,
    bag: &[Vertex],
    spec: &ProblemSpec,
) -> Vec<ComponentState> {
    assert!(spec.h <= u16::MAX as u64, "h must fit in 16 bits");
    assert!(bag.len() <= MAX_BAG, "bag too large");
    let ann = &spec.annotations;
    let h = spec.h as u16;
    let clamp = |x: u64| x.min(u16::MAX as u64) as u16;
    let ctx = Ctx {
        g,
        h,
        k: spec.k,
        weight: g.vertices().map(|v| clamp(ann.weight(v))).collect(),
        limit: ann
            .limits
            .as_ref()
            .map(|l| l.iter().map(|&x| clamp(x).min(h)).collect()),
        cost: vec![1; g.m()],
        record: false,
    };
    let mut bag = bag.to_vec();
    bag.sort_unstable();
    let mut out = Vec::new();
    ctx.bag_states(&bag, |s, _| out.push(s));
    out
}

/// `B_b * h^b`, the bound on the number of states of a bag of size `b`
/// without limits.
pub fn state_bound(b: usize, h: u64) -> u128 {
    (bell(b) as u128).saturating_mul((h as u128).saturating_pow(b as u32))
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub witness: bool,
    pub run: RunOptions,
}

impl SolveOptions {
    pub fn with_witness() -> Self {
        SolveOptions {
            witness: true,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    /// Minimum deletion cost, `None` when it exceeds the budget.
    pub optimum: Option<u64>,
    pub feasible: bool,
    pub witness: Option<EdgeSet>,
    pub stats: StateStats,
    /// Component bound after clamping to the total vertex weight.
    pub effective_h: u64,
}

/// The tables of a finished run, for witness extraction and inspection.
pub struct ComponentRun<'g> {
    g: &'g Graph,
    spec: ProblemSpec,
    recorded: bool,
    /// `None` when a vertex alone already violates the bound.
    pub output: Option<RunOutput<ComponentTable>>,
    pub effective_h: u64,
}

impl ComponentRun<'_> {
    fn best(&self) -> Option<(&ComponentState, &Scored)> {
        let out = self.output.as_ref()?;
        let mut best: Option<(&ComponentState, &Scored)> = None;
        for (s, e) in out.root_table() {
            let better = match best {
                None => true,
                Some((bs, be)) => {
                    e.beats(be) || (e.cost == be.cost && e.witness.is_none() && s < bs)
                }
            };
            if better {
                best = Some((s, e));
            }
        }
        best
    }

    pub fn optimum(&self) -> Option<u64> {
        self.best().map(|(_, e)| e.cost)
    }

    pub fn stats(&self) -> StateStats {
        self.output
            .as_ref()
            .map(|o| o.stats.clone())
            .unwrap_or_default()
    }
}

pub(crate) fn check_decomposition(g: &Graph, nd: &NiceDecomposition, max_bag: usize) -> Result<()> {
    nd.check(g).map_err(|e| Error::Mismatch(e.to_string()))?;
    let size = nd.width() + 1;
    if size > max_bag {
        return Err(Error::BagTooLarge { size, max: max_bag });
    }
    Ok(())
}

/// Runs the DP and keeps the root table (and every table with
/// `opts.run.keep_tables`).
pub fn run_component_dp<'g>(
    g: &'g Graph,
    nd: &NiceDecomposition,
    spec: &ProblemSpec,
    opts: &SolveOptions,
) -> Result<ComponentRun<'g>> {
    if spec.h == 0 {
        return Err(Error::ZeroComponentBound);
    }
    spec.annotations.validate(g)?;
    check_decomposition(g, nd, MAX_BAG)?;
    let ann = &spec.annotations;
    let mut run_out = ComponentRun {
        g,
        spec: spec.clone(),
        recorded: opts.witness,
        output: None,
        effective_h: spec.h,
    };
    if g.vertices()
        .any(|v| ann.weight(v) > spec.h || ann.weight(v) > ann.limit(v))
    {
        return Ok(run_out);
    }
    let total: u64 = g.vertices().map(|v| ann.weight(v)).sum();
    let h = spec.h.min(total.max(1));
    if h > u16::MAX as u64 {
        return Err(Error::Invalid(format!(
            "effective component bound {h} exceeds the supported maximum {}",
            u16::MAX
        )));
    }
    run_out.effective_h = h;
    let h16 = h as u16;
    let ctx = Ctx {
        g,
        h: h16,
        k: spec.k,
        weight: g.vertices().map(|v| ann.weight(v) as u16).collect(),
        limit: ann
            .limits
            .as_ref()
            .map(|l| l.iter().map(|&x| x.min(h) as u16).collect()),
        cost: (0..g.m()).map(|e| ann.edge_cost(e)).collect(),
        record: opts.witness,
    };
    run_out.output = Some(run(&ctx, nd, &opts.run)?);
    Ok(run_out)
}

/// The recorded optimal deletion set, verified against the component bound.
/// Ties are broken towards the lexicographically smallest edge list.
pub fn extract_witness(run: &ComponentRun) -> Result<EdgeSet> {
    if !run.recorded {
        return Err(Error::WitnessNotRecorded);
    }
    let Some((_, best)) = run.best() else {
        return Err(Error::Invalid(
            "no witness: the instance is infeasible".into(),
        ));
    };
    let bits = best.witness.as_ref().ok_or(Error::WitnessNotRecorded)?;
    let set = bits.to_edge_set(run.g);
    let after = delete_edges(run.g, &set)?;
    let cost = set.cost(run.g, run.spec.annotations.edge_costs.as_deref());
    if cost != best.cost || !component_bound_holds(&after, run.spec.h, &run.spec.annotations) {
        return Err(Error::Invalid(
            "internal error: witness failed verification".into(),
        ));
    }
    Ok(set)
}

pub fn solve(g: &Graph, nd: &NiceDecomposition, spec: &ProblemSpec) -> Result<Solution> {
    solve_with(g, nd, spec, &SolveOptions::default())
}

pub fn solve_with(
    g: &Graph,
    nd: &NiceDecomposition,
    spec: &ProblemSpec,
    opts: &SolveOptions,
) -> Result<Solution> {
    let run = run_component_dp(g, nd, spec, opts)?;
    let optimum = run.optimum();
    let witness = match optimum {
        Some(_) if opts.witness => Some(extract_witness(&run)?),
        _ => None,
    };
    Ok(Solution {
        optimum,
        feasible: optimum.is_some(),
        witness,
        stats: run.stats(),
        effective_h: run.effective_h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{
        decompose_min_fill, make_nice, make_nice_with, LeafBags, TreeDecomposition,
    };

    fn nice(g: &Graph) -> NiceDecomposition {
        make_nice(&decompose_min_fill(g), g).unwrap()
    }

    fn opt(g: &Graph, h: u64) -> Option<u64> {
        solve(g, &nice(g), &ProblemSpec::minimize(g, h))
            .unwrap()
            .optimum
    }

    fn k4() -> Graph {
        Graph::from_index_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn state_enumeration_examples() {
        let g = Graph::from_named_edges(&[("a", "b")]).unwrap();
        assert_eq!(
            enumerate_component_states(&g, &[0], &ProblemSpec::new(2, 0)).len(),
            2
        );
        assert_eq!(
            enumerate_component_states(&g, &[0, 1], &ProblemSpec::new(1, 0)).len(),
            1
        );
        assert_eq!(
            enumerate_component_states(&g, &[0, 1], &ProblemSpec::new(2, 0)).len(),
            5
        );
        for b in 0..=3 {
            let bag: Vec<usize> = (0..b).collect();
            let g = Graph::from_index_edges(b, &[]).unwrap();
            for h in 1..=4 {
                let n = enumerate_component_states(&g, &bag, &ProblemSpec::new(h, 0)).len();
                assert!(n as u128 <= state_bound(b, h));
            }
        }
    }

    #[test]
    fn small_optima() {
        let tri = Graph::from_index_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(opt(&tri, 3), Some(0));
        let p3 = Graph::from_named_edges(&[("a", "b"), ("b", "c")]).unwrap();
        assert_eq!(opt(&p3, 2), Some(1));
        assert_eq!(opt(&k4(), 3), Some(3));
        assert_eq!(opt(&k4(), 1), Some(6));
        assert_eq!(opt(&k4(), 2), Some(4));
        // Bowtie: two triangles through one vertex.
        let bow =
            Graph::from_index_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        assert_eq!(opt(&bow, 3), Some(2));
    }

    #[test]
    fn budget_truncation() {
        let p3 = Graph::from_named_edges(&[("a", "b"), ("b", "c")]).unwrap();
        let nd = nice(&p3);
        let s = solve(&p3, &nd, &ProblemSpec::new(2, 0)).unwrap();
        assert!(!s.feasible);
        assert_eq!(s.optimum, None);
        assert!(solve(&p3, &nd, &ProblemSpec::new(2, 1)).unwrap().feasible);
        let tri = Graph::from_index_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let td = TreeDecomposition::new(vec![vec![0, 1, 2]], vec![], 0);
        let full = make_nice_with(&td, &tri, LeafBags::Full).unwrap();
        assert_eq!(
            solve(&tri, &full, &ProblemSpec::new(1, 2)).unwrap().optimum,
            None
        );
        assert_eq!(
            solve(&tri, &full, &ProblemSpec::new(1, 3)).unwrap().optimum,
            Some(3)
        );
    }

    #[test]
    fn witnesses_are_lexicographic() {
        let p3 = Graph::from_named_edges(&[("a", "b"), ("b", "c")]).unwrap();
        let s = solve_with(
            &p3,
            &nice(&p3),
            &ProblemSpec::minimize(&p3, 2),
            &SolveOptions::with_witness(),
        )
        .unwrap();
        let w: Vec<_> = s.witness.unwrap().iter().collect();
        assert_eq!(w, vec![(0, 1)]);
        let g = k4();
        let s = solve_with(
            &g,
            &nice(&g),
            &ProblemSpec::minimize(&g, 3),
            &SolveOptions::with_witness(),
        )
        .unwrap();
        let w: Vec<_> = s.witness.unwrap().iter().collect();
        assert_eq!(w, vec![(0, 1), (0, 2), (0, 3)]);
        let tri = Graph::from_index_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let s = solve_with(
            &tri,
            &nice(&tri),
            &ProblemSpec::minimize(&tri, 3),
            &SolveOptions::with_witness(),
        )
        .unwrap();
        assert!(s.witness.unwrap().is_empty());
    }

    #[test]
    fn witness_requires_recording() {
        let g = k4();
        let run = run_component_dp(
            &g,
            &nice(&g),
            &ProblemSpec::minimize(&g, 3),
            &SolveOptions::default(),
        )
        .unwrap();
        assert!(matches!(
            extract_witness(&run),
            Err(Error::WitnessNotRecorded)
        ));
    }

    #[test]
    fn overweight_vertex_is_infeasible() {
        let g = Graph::from_index_edges(2, &[(0, 1)]).unwrap();
        let ann = VertexAnnotations {
            weights: Some(vec![1, 5]),
            ..Default::default()
        };
        let spec = ProblemSpec::minimize(&g, 3).with_annotations(ann);
        let s = solve(&g, &nice(&g), &spec).unwrap();
        assert!(!s.feasible);
        assert!(matches!(
            solve(&g, &nice(&g), &ProblemSpec::new(0, 1)),
            Err(Error::ZeroComponentBound)
        ));
    }

    #[test]
    fn limits_see_forgotten_vertices() {
        // u - a - w: u has limit 2, h = 3. The component {u, a, w} is too big
        // for u, so one deletion is needed even though u is forgotten before
        // w is introduced.
        let g = Graph::from_named_edges(&[("u", "a"), ("a", "w")]).unwrap();
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2]], vec![(0, 1)], 1);
        let nd = make_nice(&td, &g).unwrap();
        let ann = VertexAnnotations {
            limits: Some(vec![2, 3, 3]),
            ..Default::default()
        };
        let spec = ProblemSpec::minimize(&g, 3).with_annotations(ann);
        assert_eq!(solve(&g, &nd, &spec).unwrap().optimum, Some(1));
    }

    #[test]
    fn weighted_and_costed() {
        let g = Graph::from_index_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let ann = VertexAnnotations {
            weights: Some(vec![2, 1, 2]),
            edge_costs: Some(vec![5, 1]),
            ..Default::default()
        };
        let spec = ProblemSpec::new(3, 10).with_annotations(ann);
        let s = solve_with(&g, &nice(&g), &spec, &SolveOptions::with_witness()).unwrap();
        assert_eq!(s.optimum, Some(1));
        assert_eq!(s.witness.unwrap().iter().collect::<Vec<_>>(), vec![(1, 2)]);
    }

    #[test]
    fn empty_graph() {
        let g = Graph::from_index_edges(0, &[]).unwrap();
        assert_eq!(opt(&g, 1), Some(0));
    }
}
