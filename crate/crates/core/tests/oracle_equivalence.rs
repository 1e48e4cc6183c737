use twcut::component::{solve_with, ProblemSpec, SolveOptions};
use twcut::decomposition::{
    decompose_min_fill, make_nice, make_nice_with, LeafBags, NiceDecomposition,
};
use twcut::general::{clique, gen_solve, path, star, ForbiddenFamily, GenOptions, Mode, Pattern};
use twcut::graph::{component_bound_holds, delete_edges, Graph, VertexAnnotations};
use twcut::oracle::{brute_force_component_all, brute_force_family_with, gen_gnp};

fn nice(g: &Graph) -> NiceDecomposition {
    make_nice(&decompose_min_fill(g), g).unwrap()
}

fn families(mode: Mode) -> Vec<ForbiddenFamily> {
    let p4 = path(4).unwrap();
    let claw = star(3).unwrap();
    vec![
        ForbiddenFamily::new(vec![clique(3).unwrap()], mode).unwrap(),
        ForbiddenFamily::new(vec![path(3).unwrap()], mode).unwrap(),
        ForbiddenFamily::new(vec![claw.clone()], mode).unwrap(),
        ForbiddenFamily::new(vec![p4, claw], mode).unwrap(),
    ]
}

#[test]
fn component_dp_matches_oracle_with_witness() {
    for seed in 0..60 {
        let n = 3 + (seed as usize % 6);
        let g = gen_gnp(n, 0.4, seed);
        let nd = nice(&g);
        for h in 1..=n as u64 {
            let spec = ProblemSpec::minimize(&g, h);
            let sol = solve_with(&g, &nd, &spec, &SolveOptions::with_witness()).unwrap();
            let brute = brute_force_component_all(&g, &spec).unwrap();
            assert_eq!(sol.optimum, brute.optimum, "seed {seed} h {h}");
            let w = sol.witness.unwrap();
            assert_eq!(Some(&w), brute.first_optimal(), "seed {seed} h {h}");
            let after = delete_edges(&g, &w).unwrap();
            assert!(component_bound_holds(
                &after,
                h,
                &VertexAnnotations::default()
            ));
        }
    }
}

#[test]
fn leaf_shapes_do_not_change_results() {
    for seed in 0..20 {
        let g = gen_gnp(7, 0.45, 100 + seed);
        let td = decompose_min_fill(&g);
        for h in [2, 3, 4] {
            let spec = ProblemSpec::minimize(&g, h);
            let base = solve_with(
                &g,
                &make_nice(&td, &g).unwrap(),
                &spec,
                &SolveOptions::default(),
            )
            .unwrap();
            for leaves in [LeafBags::Singleton, LeafBags::Full] {
                let nd = make_nice_with(&td, &g, leaves).unwrap();
                let other = solve_with(&g, &nd, &spec, &SolveOptions::default()).unwrap();
                assert_eq!(base.optimum, other.optimum);
            }
        }
    }
}

#[test]
fn general_dp_matches_oracle_both_modes() {
    for seed in 0..25 {
        let n = 3 + (seed as usize % 5);
        let g = gen_gnp(n, 0.45, 1000 + seed);
        let nd = nice(&g);
        for mode in [Mode::Subgraph, Mode::Induced] {
            for fam in families(mode) {
                let k = g.m() as u64;
                let sol = gen_solve(&g, &nd, &fam, k, &GenOptions::with_witness()).unwrap();
                let brute = brute_force_family_with(&g, &fam, k, None, true).unwrap();
                assert_eq!(sol.optimum, brute.optimum, "seed {seed} {mode:?} {fam:?}");
                assert_eq!(
                    sol.witness.as_ref(),
                    brute.first_optimal(),
                    "seed {seed} {mode:?}"
                );
            }
        }
    }
}

#[test]
fn general_dp_with_costs_matches_oracle() {
    for seed in 0..15 {
        let g = gen_gnp(6, 0.5, 2000 + seed);
        let costs: Vec<u64> = (0..g.m()).map(|e| 1 + (e as u64 * 7 + seed) % 4).collect();
        let nd = nice(&g);
        let fam = ForbiddenFamily::new(vec![path(3).unwrap()], Mode::Subgraph).unwrap();
        let k: u64 = costs.iter().sum();
        let opts = GenOptions {
            witness: true,
            edge_costs: Some(costs.clone()),
            ..Default::default()
        };
        let sol = gen_solve(&g, &nd, &fam, k, &opts).unwrap();
        let brute = brute_force_family_with(&g, &fam, k, Some(&costs), true).unwrap();
        assert_eq!(sol.optimum, brute.optimum, "seed {seed}");
        assert_eq!(sol.witness.as_ref(), brute.first_optimal());
    }
}

#[test]
fn disconnected_members_match_oracle() {
    let two = Pattern::new(4, &[(0, 1), (2, 3)]).unwrap();
    for mode in [Mode::Subgraph, Mode::Induced] {
        let fam = ForbiddenFamily::new(vec![two.clone()], mode).unwrap();
        for seed in 0..15 {
            let g = gen_gnp(6, 0.4, 3000 + seed);
            let k = g.m() as u64;
            let sol = gen_solve(&g, &nice(&g), &fam, k, &GenOptions::default()).unwrap();
            let brute = brute_force_family_with(&g, &fam, k, None, false).unwrap();
            assert_eq!(sol.optimum, brute.optimum, "seed {seed} {mode:?}");
        }
    }
}

#[test]
fn tree_family_matches_component_dp() {
    for seed in 0..30 {
        let n = 4 + (seed as usize % 5);
        let g = gen_gnp(n, 0.4, 4000 + seed);
        let nd = nice(&g);
        for h in [2usize, 3] {
            let fam = ForbiddenFamily::component_bound(h, Mode::Subgraph).unwrap();
            let k = g.m() as u64;
            let a = gen_solve(&g, &nd, &fam, k, &GenOptions::default()).unwrap();
            let b = solve_with(
                &g,
                &nd,
                &ProblemSpec::new(h as u64, k),
                &SolveOptions::default(),
            )
            .unwrap();
            assert_eq!(a.optimum, b.optimum, "seed {seed} h {h}");
        }
    }
}
