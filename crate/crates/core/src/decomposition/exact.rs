use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest graph the exact search accepts.
pub const EXACT_MAX_VERTICES: usize = 16;

/// Exact treewidth via the subset recurrence
/// `TW(S) = min_{v in S} max(TW(S - v), |Q(S - v, v)|)`, where `Q(S, v)` is
/// the set of vertices outside `S + v` reachable from `v` through `S`.
/// Exponential; meant for cross-checking on graphs with a dozen vertices.
pub fn exact_treewidth(g: &Graph) -> Result<usize> {
    let n = g.n();
    if n > EXACT_MAX_VERTICES {
        return Err(Error::Invalid(format!(
            "exact treewidth supports at most {EXACT_MAX_VERTICES} vertices, got {n}"
        )));
    }
    if n == 0 {
        return Ok(0);
    }
    let nbr: Vec<u32> = g
        .vertices()
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let q = |s: u32, v: usize| -> u32 {
        let mut seen = 1u32 << v;
        let mut frontier = 1u32 << v;
        let mut out = 0u32;
        while frontier != 0 {
            let x = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = nbr[x] & !seen;
            seen |= fresh;
            out |= fresh & !s;
            frontier |= fresh & s;
        }
        out
    };
    let full = (1u32 << n) - 1;
    let mut tw = vec![i32::MAX; 1 << n];
    tw[0] = -1;
    for s in 1..=full {
        let mut best = i32::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            let cand = tw[prev as usize].max(q(prev, v).count_ones() as i32);
            best = best.min(cand);
        }
        tw[s as usize] = best;
    }
    Ok(tw[full as usize].max(0) as usize)
}
