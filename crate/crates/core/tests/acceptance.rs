//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero when any
//! criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twcut::component::{solve_with, state_bound, ProblemSpec, Solution, SolveOptions};
use twcut::decomposition::{
    decompose_min_fill, make_nice, validate, NiceDecomposition, TreeDecomposition,
};
use twcut::general::{
    clique, contains_member, gen_solve, path, star, FamilySolution, ForbiddenFamily, GenOptions,
    Mode,
};
use twcut::graph::{component_bound_holds, delete_edges, Graph, VertexAnnotations};
use twcut::oracle::{
    brute_force_component, brute_force_family, gen_gnp, gen_random_low_tw,
    triangle_cover_crosscheck, MAX_ORACLE_EDGES,
};

/// Failures and evidence collected for the cross-cutting criteria.
#[derive(Default)]
struct Ledger {
    bound_checks: usize,
    bound_failures: Vec<String>,
    witnesses: usize,
    witness_failures: Vec<String>,
}

impl Ledger {
    /// Per-node state counts against `B_b * h^b` (non-limit solves only).
    fn check_bounds(&mut self, tag: &str, nd: &NiceDecomposition, sol: &Solution) {
        for (t, &count) in sol.stats.per_node.iter().enumerate() {
            let b = nd.node(t).bag.len();
            self.bound_checks += 1;
            if count as u128 > state_bound(b, sol.effective_h) {
                self.bound_failures
                    .push(format!("{tag}: node {t} has {count} states, bag {b}"));
            }
        }
    }

    /// The same checks the `verify` command performs, plus cost = optimum.
    fn check_component_witness(
        &mut self,
        tag: &str,
        g: &Graph,
        spec: &ProblemSpec,
        sol: &Solution,
    ) {
        let (Some(opt), Some(w)) = (sol.optimum, &sol.witness) else {
            return;
        };
        self.witnesses += 1;
        let ok = delete_edges(g, w)
            .is_ok_and(|after| component_bound_holds(&after, spec.h, &spec.annotations))
            && w.cost(g, spec.annotations.edge_costs.as_deref()) == opt;
        if !ok {
            self.witness_failures.push(tag.to_string());
        }
    }

    fn check_family_witness(
        &mut self,
        tag: &str,
        g: &Graph,
        fam: &ForbiddenFamily,
        sol: &FamilySolution,
    ) {
        let (Some(opt), Some(w)) = (sol.optimum, &sol.witness) else {
            return;
        };
        self.witnesses += 1;
        let ok = delete_edges(g, w).is_ok_and(|after| !contains_member(&after, fam))
            && w.len() as u64 == opt;
        if !ok {
            self.witness_failures.push(tag.to_string());
        }
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(n: usize, title: &str, o: &Outcome, took: Duration) -> bool {
    let verdict = if o.pass { "PASS" } else { "FAIL" };
    println!(
        "{verdict} criterion {n:>2}: {title} — {} [{:.1} s]",
        o.detail,
        took.as_secs_f64()
    );
    o.pass
}

fn nice(g: &Graph) -> NiceDecomposition {
    make_nice(&decompose_min_fill(g), g).expect("min-fill decompositions are valid")
}

fn solve_component(g: &Graph, nd: &NiceDecomposition, spec: &ProblemSpec) -> Solution {
    solve_with(g, nd, spec, &SolveOptions::with_witness()).expect("component solve")
}

/// Random graph on `n` vertices with at most the oracle's edge limit.
fn small_graph(rng: &mut ChaCha8Rng, n: usize, p_lo: f64, p_hi: f64) -> Graph {
    loop {
        let g = gen_gnp(n, rng.gen_range(p_lo..p_hi), rng.gen());
        if g.m() <= MAX_ORACLE_EDGES {
            return g;
        }
    }
}

fn criterion_1(ledger: &mut Ledger, small: &mut Vec<Graph>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut solves, mut mismatches) = (0, Vec::new());
    for i in 0..300 {
        let n = rng.gen_range(1..=9);
        let g = small_graph(&mut rng, n, 0.15, 0.6);
        let nd = nice(&g);
        for h in 1..=n as u64 {
            let spec = ProblemSpec::minimize(&g, h);
            let sol = solve_component(&g, &nd, &spec);
            let brute = brute_force_component(&g, &spec).expect("oracle");
            solves += 1;
            if sol.optimum != brute.optimum {
                mismatches.push(format!(
                    "graph {i} h {h}: dp {:?} oracle {:?}",
                    sol.optimum, brute.optimum
                ));
            }
            ledger.check_bounds(&format!("c1 graph {i} h {h}"), &nd, &sol);
            ledger.check_component_witness(&format!("c1 graph {i} h {h}"), &g, &spec, &sol);
        }
        small.push(g);
    }
    Outcome {
        pass: mismatches.is_empty(),
        detail: format!(
            "300 graphs, {solves} solves, {} mismatches{}",
            mismatches.len(),
            first(&mismatches)
        ),
    }
}

fn families(mode: Mode) -> Vec<(&'static str, ForbiddenFamily)> {
    let one = |p| ForbiddenFamily::new(vec![p], mode).unwrap();
    vec![
        ("{K3}", one(clique(3).unwrap())),
        ("{P3}", one(path(3).unwrap())),
        ("{K1,3}", one(star(3).unwrap())),
        (
            "{P4,K1,3}",
            ForbiddenFamily::new(vec![path(4).unwrap(), star(3).unwrap()], mode).unwrap(),
        ),
    ]
}

fn criterion_2(ledger: &mut Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut solves, mut mismatches) = (0, Vec::new());
    for i in 0..150 {
        let n = rng.gen_range(2..=7);
        let g = small_graph(&mut rng, n, 0.2, 0.6);
        let nd = nice(&g);
        let k = g.m() as u64;
        for mode in [Mode::Subgraph, Mode::Induced] {
            for (name, fam) in families(mode) {
                let sol =
                    gen_solve(&g, &nd, &fam, k, &GenOptions::with_witness()).expect("family solve");
                let brute = brute_force_family(&g, &fam, k).expect("oracle");
                solves += 1;
                let tag = format!("graph {i} {name} {mode:?}");
                if sol.optimum != brute.optimum {
                    mismatches.push(format!(
                        "{tag}: dp {:?} oracle {:?}",
                        sol.optimum, brute.optimum
                    ));
                }
                ledger.check_family_witness(&format!("c2 {tag}"), &g, &fam, &sol);
            }
        }
    }
    Outcome {
        pass: mismatches.is_empty(),
        detail: format!(
            "150 graphs x 4 families x 2 modes = {solves} solves, {} mismatches{}",
            mismatches.len(),
            first(&mismatches)
        ),
    }
}

fn criterion_3(ledger: &mut Ledger, small: &[Graph]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut graphs: Vec<Graph> = small.iter().filter(|g| g.n() <= 8).cloned().collect();
    for _ in 0..100 {
        let n = rng.gen_range(4..=8);
        graphs.push(gen_gnp(n, rng.gen_range(0.2..0.7), rng.gen()));
    }
    let (mut solves, mut mismatches) = (0, Vec::new());
    for (i, g) in graphs.iter().enumerate() {
        let nd = nice(g);
        let k = g.m() as u64;
        for h in [2usize, 3] {
            let fam = ForbiddenFamily::component_bound(h, Mode::Subgraph).unwrap();
            let a = gen_solve(g, &nd, &fam, k, &GenOptions::with_witness()).expect("family solve");
            let spec = ProblemSpec::new(h as u64, k);
            let b = solve_component(g, &nd, &spec);
            solves += 1;
            if a.optimum != b.optimum {
                mismatches.push(format!(
                    "graph {i} h {h}: family {:?} component {:?}",
                    a.optimum, b.optimum
                ));
            }
            ledger.check_bounds(&format!("c3 graph {i} h {h}"), &nd, &b);
            ledger.check_component_witness(&format!("c3 graph {i} h {h}"), g, &spec, &b);
            ledger.check_family_witness(&format!("c3 graph {i} h {h}"), g, &fam, &a);
        }
    }
    Outcome {
        pass: mismatches.is_empty(),
        detail: format!(
            "{} graphs (n <= 8), {solves} paired solves, {} mismatches{}",
            graphs.len(),
            mismatches.len(),
            first(&mismatches)
        ),
    }
}

/// Near-cubic graph; with `planted`, a perfect triangle cover is built in
/// first and the remaining degree is filled at random.
fn cubic_ish(rng: &mut ChaCha8Rng, n: usize, planted: bool) -> Graph {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut edges = std::collections::BTreeSet::new();
    let mut deg = vec![0usize; n];
    let add = |u: usize,
               v: usize,
               edges: &mut std::collections::BTreeSet<(usize, usize)>,
               deg: &mut Vec<usize>| {
        if u != v && deg[u] < 3 && deg[v] < 3 && edges.insert((u.min(v), u.max(v))) {
            deg[u] += 1;
            deg[v] += 1;
        }
    };
    if planted {
        for t in perm.chunks(3) {
            add(t[0], t[1], &mut edges, &mut deg);
            add(t[1], t[2], &mut edges, &mut deg);
            add(t[0], t[2], &mut edges, &mut deg);
        }
    }
    for _ in 0..20 * n {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        add(u, v, &mut edges, &mut deg);
    }
    let edges: Vec<_> = edges.into_iter().collect();
    Graph::from_index_edges(n, &edges).unwrap()
}

fn criterion_4(ledger: &mut Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut yes, mut no, mut failures) = (0, 0, Vec::new());
    for i in 0..50 {
        let n = [6, 9, 12][i % 3];
        let g = cubic_ish(&mut rng, n, i % 2 == 0);
        assert!(g.m() <= 24);
        match triangle_cover_crosscheck(&g) {
            Ok(true) => yes += 1,
            Ok(false) => no += 1,
            Err(e) => failures.push(format!("graph {i}: {e}")),
        }
        if g.m() >= g.n() {
            let spec = ProblemSpec::new(3, (g.m() - g.n()) as u64);
            let nd = nice(&g);
            let sol = solve_component(&g, &nd, &spec);
            let cover = twcut::oracle::has_perfect_triangle_cover(&g);
            if sol.feasible != cover {
                failures.push(format!(
                    "graph {i}: dp feasible {} but cover {cover}",
                    sol.feasible
                ));
            }
            ledger.check_bounds(&format!("c4 graph {i}"), &nd, &sol);
            ledger.check_component_witness(&format!("c4 graph {i}"), &g, &spec, &sol);
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "50 graphs ({yes} with a cover, {no} without), {} disagreements{}",
            failures.len(),
            first(&failures)
        ),
    }
}

fn check_td(
    g: &Graph,
    td: &TreeDecomposition,
    tag: &str,
    failures: &mut Vec<String>,
) -> Option<NiceDecomposition> {
    if !validate(g, td).is_empty() {
        failures.push(format!("{tag}: invalid decomposition"));
        return None;
    }
    let nd = match make_nice(td, g) {
        Ok(nd) => nd,
        Err(e) => {
            failures.push(format!("{tag}: make_nice failed: {e}"));
            return None;
        }
    };
    if nd.check(g).is_err() {
        failures.push(format!("{tag}: nice decomposition fails its checks"));
    }
    if nd.width() != td.width() {
        failures.push(format!("{tag}: width {} became {}", td.width(), nd.width()));
    }
    if nd.len() > 4 * g.n().max(1) {
        failures.push(format!("{tag}: {} nodes for n = {}", nd.len(), g.n()));
    }
    Some(nd)
}

fn criterion_5(ledger: &mut Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut failures, mut max_ratio, mut solved) = (Vec::new(), 0f64, 0);
    for i in 0..200 {
        let n = rng.gen_range(1..=80);
        let w = rng.gen_range(1..=5);
        let (g, td) = gen_random_low_tw(n, w, rng.gen());
        if td.width() > w {
            failures.push(format!(
                "graph {i}: construction width {} above {w}",
                td.width()
            ));
        }
        let built = check_td(&g, &td, &format!("graph {i} construction"), &mut failures);
        let mf = decompose_min_fill(&g);
        let heuristic = check_td(&g, &mf, &format!("graph {i} min-fill"), &mut failures);
        for nd in built.iter().chain(&heuristic) {
            max_ratio = max_ratio.max(nd.len() as f64 / n as f64);
        }
        // Solve the smaller ones to extend the state-bound check.
        if let Some(nd) = built.filter(|nd| nd.width() <= 3 && n <= 40) {
            let spec = ProblemSpec::minimize(&g, 3);
            let sol = solve_component(&g, &nd, &spec);
            ledger.check_bounds(&format!("c5 graph {i}"), &nd, &sol);
            ledger.check_component_witness(&format!("c5 graph {i}"), &g, &spec, &sol);
            solved += 1;
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "200 partial k-trees, construction and min-fill decompositions; max nodes/n = {max_ratio:.2}; {solved} also solved; {} violations{}",
            failures.len(),
            first(&failures)
        ),
    }
}

fn criterion_6(ledger: &Ledger) -> Outcome {
    Outcome {
        pass: ledger.bound_failures.is_empty() && ledger.bound_checks > 0,
        detail: format!(
            "{} per-node checks over criteria 1-5, {} violations{}",
            ledger.bound_checks,
            ledger.bound_failures.len(),
            first(&ledger.bound_failures)
        ),
    }
}

fn criterion_7(ledger: &mut Ledger) -> Outcome {
    let (g, td) = gen_random_low_tw(100, 4, 2010);
    let start = Instant::now();
    let nd = make_nice(&td, &g).expect("construction decomposition is valid");
    let spec = ProblemSpec::minimize(&g, 5);
    let sol = solve_component(&g, &nd, &spec);
    let took = start.elapsed();
    ledger.check_component_witness("c7", &g, &spec, &sol);
    Outcome {
        pass: sol.feasible && took <= Duration::from_secs(60),
        detail: format!(
            "n = {}, e = {}, width = {}, h = 5: minimum deletion {} in {:.1} s (limit 60 s), max states per node {}",
            g.n(),
            g.m(),
            nd.width(),
            sol.optimum.map_or("infeasible".to_string(), |o| o.to_string()),
            took.as_secs_f64(),
            sol.stats.max_states()
        ),
    }
}

fn criterion_8(ledger: &mut Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut failures, mut checks) = (Vec::new(), 0);
    for i in 0..100 {
        let n = rng.gen_range(2..=8);
        let g = small_graph(&mut rng, n, 0.2, 0.7);
        let nd = nice(&g);
        let h = rng.gen_range(1..=n as u64);
        let plain = solve_component(&g, &nd, &ProblemSpec::minimize(&g, h));
        let trivial = VertexAnnotations {
            weights: Some(vec![1; g.n()]),
            limits: Some(vec![h; g.n()]),
            edge_costs: Some(vec![1; g.m()]),
        };
        let t = solve_component(
            &g,
            &nd,
            &ProblemSpec::minimize(&g, h).with_annotations(trivial),
        );
        checks += 1;
        if t.optimum != plain.optimum || t.witness != plain.witness {
            failures.push(format!("graph {i}: trivial annotations changed the result"));
        }
        // Random annotations, one kind at a time and all together.
        let weights: Vec<u64> = (0..g.n()).map(|_| rng.gen_range(1..=3)).collect();
        let limits: Vec<u64> = (0..g.n())
            .map(|_| {
                if rng.gen_bool(0.4) {
                    rng.gen_range(1..=h.max(1) + 2)
                } else {
                    u64::MAX
                }
            })
            .collect();
        let costs: Vec<u64> = (0..g.m()).map(|_| rng.gen_range(1..=4)).collect();
        let hw = rng.gen_range(1..=2 * n as u64);
        let variants = [
            (
                "weights",
                hw,
                VertexAnnotations {
                    weights: Some(weights.clone()),
                    ..Default::default()
                },
            ),
            (
                "limits",
                h,
                VertexAnnotations {
                    limits: Some(limits.clone()),
                    ..Default::default()
                },
            ),
            (
                "costs",
                h,
                VertexAnnotations {
                    edge_costs: Some(costs.clone()),
                    ..Default::default()
                },
            ),
            (
                "all",
                hw,
                VertexAnnotations {
                    weights: Some(weights),
                    limits: Some(limits),
                    edge_costs: Some(costs),
                },
            ),
        ];
        for (name, hh, ann) in variants {
            let k: u64 = (0..g.m()).map(|e| ann.edge_cost(e)).sum();
            let spec = ProblemSpec::new(hh, k).with_annotations(ann);
            let sol = solve_component(&g, &nd, &spec);
            let brute = brute_force_component(&g, &spec).expect("oracle");
            checks += 1;
            if sol.optimum != brute.optimum {
                failures.push(format!(
                    "graph {i} {name}: dp {:?} oracle {:?}",
                    sol.optimum, brute.optimum
                ));
            }
            ledger.check_component_witness(&format!("c8 graph {i} {name}"), &g, &spec, &sol);
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("100 instances, {checks} comparisons (trivial, weights, limits, costs, combined), {} mismatches{}", failures.len(), first(&failures)),
    }
}

fn criterion_9(ledger: &Ledger) -> Outcome {
    Outcome {
        pass: ledger.witness_failures.is_empty() && ledger.witnesses > 0,
        detail: format!(
            "{} witnesses from criteria 1-8 checked by deletion + property + cost, {} failures{}",
            ledger.witnesses,
            ledger.witness_failures.len(),
            first(&ledger.witness_failures)
        ),
    }
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut failures, mut done, mut tries) = (Vec::new(), 0, 0);
    while done < 50 && tries < 10_000 {
        tries += 1;
        let n = rng.gen_range(3..=9);
        let g = small_graph(&mut rng, n, 0.3, 0.7);
        let nd = nice(&g);
        let (at, below, opt) = if done % 2 == 0 {
            let h = rng.gen_range(1..=3);
            let opt = solve_component(&g, &nd, &ProblemSpec::minimize(&g, h))
                .optimum
                .unwrap();
            if opt == 0 {
                continue;
            }
            let run = |k| solve_component(&g, &nd, &ProblemSpec::new(h, k)).feasible;
            (run(opt), run(opt - 1), opt)
        } else {
            let fam = ForbiddenFamily::new(vec![path(3).unwrap()], Mode::Subgraph).unwrap();
            let opt = gen_solve(&g, &nd, &fam, g.m() as u64, &GenOptions::default())
                .unwrap()
                .optimum
                .unwrap();
            if opt == 0 {
                continue;
            }
            let run = |k| {
                gen_solve(&g, &nd, &fam, k, &GenOptions::default())
                    .unwrap()
                    .feasible
            };
            (run(opt), run(opt - 1), opt)
        };
        done += 1;
        if !at || below {
            failures.push(format!(
                "instance {done}: optimum {opt}, feasible at k {at}, at k-1 {below}"
            ));
        }
    }
    Outcome {
        pass: failures.is_empty() && done == 50,
        detail: format!(
            "{done} instances (component and family), {} violations{}",
            failures.len(),
            first(&failures)
        ),
    }
}

/// " (first: ...)" when there is a failure to show.
fn first(v: &[String]) -> String {
    v.first()
        .map_or(String::new(), |f| format!(" (first: {f})"))
}

fn main() {
    let mut ledger = Ledger::default();
    let mut small = Vec::new();
    let mut all = true;
    let mut timed = |n: usize, title: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        all &= report(n, title, &o, start.elapsed());
    };
    timed(1, "component DP equals brute force", &mut || {
        criterion_1(&mut ledger, &mut small)
    });
    timed(2, "family DP equals brute force", &mut || {
        criterion_2(&mut ledger)
    });
    timed(3, "tree family equals component DP", &mut || {
        criterion_3(&mut ledger, &small)
    });
    timed(4, "triangle cover cross-check", &mut || {
        criterion_4(&mut ledger)
    });
    timed(5, "decomposition contracts", &mut || {
        criterion_5(&mut ledger)
    });
    timed(6, "state counts within B_b * h^b", &mut || {
        criterion_6(&ledger)
    });
    timed(7, "performance envelope", &mut || criterion_7(&mut ledger));
    timed(8, "weights, limits and costs", &mut || {
        criterion_8(&mut ledger)
    });
    timed(9, "witness soundness", &mut || criterion_9(&ledger));
    timed(10, "truncation semantics", &mut criterion_10);
    if !all {
        std::process::exit(1);
    }
}
