//! Edge deletion against a forbidden family of small patterns, as
//! subgraphs or as induced subgraphs.
//!
//! A state of a node is the subgraph `H` of the bag kept so far together
//! with a profile: the set of partial embeddings of family members that the
//! processed part of the graph realises, recorded by where they meet the
//! bag. A state whose profile would contain a whole member is discarded.

mod dp;
pub mod embedding;
pub mod family;
pub mod states;

pub use dp::{GeneralKey, GeneralTable};
pub use embedding::{PartialEmbedding, Profiles};
pub use family::{
    clique, contains_member, embed, find_member, parse_family, path, preset, star, trees,
    ForbiddenFamily, Mode, Occurrence, Pattern, MAX_FAMILY_MEMBERS, MAX_PATTERN_VERTICES,
};
pub use states::{
    check_state, domain, enumerate_patterns, enumerate_valid_states, in_domain, state_bound_log2,
    GeneralState, SubPattern, ValidStates,
};

use crate::bits::Scored;
use crate::component::check_decomposition;
use crate::decomposition::NiceDecomposition;
use crate::driver::{run, RunOptions, StateStats};
use crate::error::{Error, Result};
use crate::graph::{delete_edges, EdgeSet, Graph};
use dp::GenCtx;

/// Largest bag the family solver accepts (kept bag edges fit in 64 bits).
pub const GEN_MAX_BAG: usize = 11;

#[derive(Clone, Debug)]
pub struct GenOptions {
    pub witness: bool,
    /// Cache profile transformations across nodes.
    pub memoize: bool,
    /// Drop partial embeddings that can never complete.
    pub prune_dead: bool,
    /// Per-edge deletion costs; unit costs when `None`.
    pub edge_costs: Option<Vec<u64>>,
    pub run: RunOptions,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            witness: false,
            memoize: true,
            prune_dead: true,
            edge_costs: None,
            run: RunOptions::default(),
        }
    }
}

impl GenOptions {
    pub fn with_witness() -> Self {
        GenOptions {
            witness: true,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySolution {
    pub optimum: Option<u64>,
    pub feasible: bool,
    pub witness: Option<EdgeSet>,
    pub stats: StateStats,
}

/// The root table and the profiles it refers to, plus every node's states
/// when `keep_tables` is set.
pub struct GeneralRun {
    pub tables: Vec<Option<Vec<(GeneralState, Scored)>>>,
    pub stats: StateStats,
}

fn setup<'a>(
    g: &'a Graph,
    nd: &NiceDecomposition,
    family: &'a ForbiddenFamily,
    k: u64,
    opts: &GenOptions,
) -> Result<GenCtx<'a>> {
    check_decomposition(g, nd, GEN_MAX_BAG)?;
    let cost = match &opts.edge_costs {
        Some(c) if c.len() != g.m() => {
            return Err(Error::Invalid(format!(
                "{} edge costs for {} edges",
                c.len(),
                g.m()
            )))
        }
        Some(c) if c.contains(&0) => {
            return Err(Error::NonPositiveAnnotation {
                name: "edge cost".into(),
                value: 0,
            })
        }
        Some(c) => c.clone(),
        None => vec![1; g.m()],
    };
    Ok(GenCtx::new(
        g,
        family,
        k,
        cost,
        opts.witness,
        opts.memoize,
        opts.prune_dead,
    ))
}

/// Runs the family DP and returns every kept table with profiles resolved.
pub fn run_general_dp(
    g: &Graph,
    nd: &NiceDecomposition,
    family: &ForbiddenFamily,
    k: u64,
    opts: &GenOptions,
) -> Result<GeneralRun> {
    let ctx = setup(g, nd, family, k, opts)?;
    let out = run(&ctx, nd, &opts.run)?;
    let tables = out
        .tables
        .into_iter()
        .map(|t| {
            t.map(|table| {
                let mut rows: Vec<(GeneralState, Scored)> = table
                    .into_iter()
                    .map(|((h, id), s)| {
                        (
                            GeneralState {
                                h,
                                phi: ctx.profile(id).to_vec(),
                            },
                            s,
                        )
                    })
                    .collect();
                rows.sort_by(|a, b| a.0.cmp(&b.0));
                rows
            })
        })
        .collect();
    Ok(GeneralRun {
        tables,
        stats: out.stats,
    })
}

/// Minimum deletion cost (at most `k`) leaving no member of `family`.
pub fn gen_solve(
    g: &Graph,
    nd: &NiceDecomposition,
    family: &ForbiddenFamily,
    k: u64,
    opts: &GenOptions,
) -> Result<FamilySolution> {
    let ctx = setup(g, nd, family, k, opts)?;
    let out = run(&ctx, nd, &opts.run)?;
    let mut best: Option<(&(u64, u32), &Scored)> = None;
    for (key, e) in out.root_table() {
        let better = match best {
            None => true,
            Some((bk, be)) => e.beats(be) || (e.cost == be.cost && e.witness.is_none() && key < bk),
        };
        if better {
            best = Some((key, e));
        }
    }
    let optimum = best.map(|(_, e)| e.cost);
    let witness = match best {
        Some((_, e)) if opts.witness => {
            let bits = e.witness.as_ref().ok_or(Error::WitnessNotRecorded)?;
            let set = bits.to_edge_set(g);
            let after = delete_edges(g, &set)?;
            let cost: u64 = bits.ids().map(|id| ctx.cost[id]).sum();
            if cost != e.cost || contains_member(&after, family) {
                return Err(Error::Invalid(
                    "internal error: witness failed verification".into(),
                ));
            }
            Some(set)
        }
        _ => None,
    };
    Ok(FamilySolution {
        optimum,
        feasible: optimum.is_some(),
        witness,
        stats: out.stats.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{decompose_min_fill, make_nice};

    fn solve(g: &Graph, fam: &ForbiddenFamily, k: u64) -> Option<u64> {
        let nd = make_nice(&decompose_min_fill(g), g).unwrap();
        gen_solve(g, &nd, fam, k, &GenOptions::with_witness())
            .unwrap()
            .optimum
    }

    fn one(p: Pattern, mode: Mode) -> ForbiddenFamily {
        ForbiddenFamily::new(vec![p], mode).unwrap()
    }

    #[test]
    fn small_instances() {
        let tri = Graph::from_index_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(
            solve(&tri, &one(clique(3).unwrap(), Mode::Subgraph), 1),
            Some(1)
        );
        assert_eq!(
            solve(&tri, &one(clique(3).unwrap(), Mode::Subgraph), 0),
            None
        );
        let k2 = one(clique(2).unwrap(), Mode::Subgraph);
        assert_eq!(solve(&tri, &k2, 3), Some(3));
        let c5 = Graph::from_index_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(
            solve(&c5, &one(path(3).unwrap(), Mode::Subgraph), 5),
            Some(3)
        );
        assert_eq!(
            solve(&c5, &one(clique(3).unwrap(), Mode::Subgraph), 0),
            Some(0)
        );
        let p3 = Graph::from_index_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            solve(&p3, &one(path(3).unwrap(), Mode::Subgraph), 1),
            Some(1)
        );
        let bow =
            Graph::from_index_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        assert_eq!(
            solve(&bow, &one(clique(3).unwrap(), Mode::Subgraph), 2),
            Some(2)
        );
        let k4 =
            Graph::from_index_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(
            solve(
                &k4,
                &ForbiddenFamily::component_bound(3, Mode::Subgraph).unwrap(),
                6
            ),
            Some(3)
        );
        let k14 = Graph::from_index_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(
            solve(&k14, &one(star(4).unwrap(), Mode::Subgraph), 1),
            Some(1)
        );
    }

    #[test]
    fn induced_mode() {
        // A triangle has no induced P3.
        let tri = Graph::from_index_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(
            solve(&tri, &one(path(3).unwrap(), Mode::Induced), 3),
            Some(0)
        );
        // Deleting edges can create induced copies, so compare with brute force.
        let diamond =
            Graph::from_index_edges(4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]).unwrap();
        let fam = one(path(3).unwrap(), Mode::Induced);
        let brute = crate::oracle::brute_force_family(&diamond, &fam, 5).unwrap();
        assert_eq!(solve(&diamond, &fam, 5), brute.optimum);
    }

    #[test]
    fn disconnected_pattern() {
        let two = Pattern::new(4, &[(0, 1), (2, 3)]).unwrap();
        let fam = one(two, Mode::Subgraph);
        let p5 = Graph::from_index_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        // Keep only edges that pairwise share a vertex: at most 2 adjacent edges.
        assert_eq!(solve(&p5, &fam, 4), Some(2));
    }

    #[test]
    fn memo_and_pruning_are_transparent() {
        let g = Graph::from_index_edges(
            6,
            &[
                (0, 1),
                (1, 2),
                (2, 0),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 3),
                (1, 4),
            ],
        )
        .unwrap();
        let nd = make_nice(&decompose_min_fill(&g), &g).unwrap();
        let fam = ForbiddenFamily::new(vec![clique(3).unwrap(), star(3).unwrap()], Mode::Subgraph)
            .unwrap();
        let base = gen_solve(&g, &nd, &fam, 8, &GenOptions::default())
            .unwrap()
            .optimum;
        for (memoize, prune_dead) in [(false, true), (true, false), (false, false)] {
            let o = GenOptions {
                memoize,
                prune_dead,
                ..Default::default()
            };
            assert_eq!(gen_solve(&g, &nd, &fam, 8, &o).unwrap().optimum, base);
        }
    }
}
