use graphnash::approx::{
    approximate_tree_nash_with, downstream_pass, enumerate_grid_equilibria, ApproxConfig, GridChoice, Policy, TauGrid,
};
use graphnash::exact::exact_tree_nash;
use graphnash::game::{
    coordination_edge, generate_random_rational_tree_game, generate_random_tree_game, is_eps_nash, is_exact_nash,
    matching_pennies_edge, max_regret, path_coordination, REGRET_TOL,
};
use graphnash::oracle::brute_force_equilibria;
use graphnash::select::{select_equilibrium, Objective};
use graphnash::transform::{
    approximate_tree_nash_multi_with, condense_to_tree, merge_vertices, solve_sparse, MultiActionGame, MultiConfig,
};
use graphnash::tree::orient;
use graphnash::MixedProfile;
use num_rational::BigRational;

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

#[test]
fn matching_pennies_everywhere() {
    let g = matching_pennies_edge();
    assert_eq!(exact_tree_nash(&g, 0, Policy::First).unwrap(), vec![half(), half()]);
    let (p, cert) = approximate_tree_nash_with(&g, &ApproxConfig::new(0.05)).unwrap();
    assert!(cert.max_regret <= 0.05 + REGRET_TOL, "{cert:?} {p:?}");
    assert!(is_eps_nash(&g, &p, 0.05).unwrap());
    let grid = TauGrid::new(2).unwrap();
    let res = downstream_pass(&g, &orient(&g, 1).unwrap(), grid, 0.0, true).unwrap();
    let all = enumerate_grid_equilibria(&res, 10).unwrap();
    assert_eq!(all, vec![MixedProfile::new(vec![0.5, 0.5]).unwrap()]);
}

#[test]
fn exact_and_approx_agree_on_rational_trees() {
    for seed in 0..10 {
        let g = generate_random_rational_tree_game(6, 3, 4, seed).unwrap();
        let exact = exact_tree_nash(&g, 0, Policy::Random(seed)).unwrap();
        assert!(is_exact_nash(&g, &exact).unwrap());
        for root in [0, 5] {
            let config = ApproxConfig { eps: 0.1, root, policy: Policy::Random(seed), grid: GridChoice::Adaptive };
            let (p, _) = approximate_tree_nash_with(&g, &config).unwrap();
            assert!(max_regret(&g, &p).unwrap() <= 0.1 + 1e-12, "seed {seed} root {root}");
        }
    }
}

#[test]
fn root_choice_does_not_change_the_equilibrium_set() {
    let g = generate_random_tree_game(4, 3, 11).unwrap();
    let grid = TauGrid::new(5).unwrap();
    let truth = brute_force_equilibria(&g, grid, 0.2).unwrap().mixed_profiles();
    for root in 0..4 {
        let res = downstream_pass(&g, &orient(&g, root).unwrap(), grid, 0.2, true).unwrap();
        assert_eq!(enumerate_grid_equilibria(&res, usize::MAX).unwrap(), truth, "root {root}");
    }
}

#[test]
fn selection_beats_any_found_equilibrium() {
    let g = path_coordination(4);
    let best = select_equilibrium(&g, 0.1, Objective::Social, 0).unwrap();
    // Payoffs are at most 1 and everyone agreeing attains it.
    assert!((best.value - 4.0).abs() < 1e-9);
    let g = generate_random_tree_game(5, 3, 3).unwrap();
    let sel = select_equilibrium(&g, 0.2, Objective::Welfare, 2).unwrap();
    assert!(is_eps_nash(&g, &sel.profile, 0.2).unwrap());
    assert!((sel.value - sel.table_value).abs() < 1e-9);
}

#[test]
fn multi_action_solver_handles_binary_games() {
    let g = generate_random_tree_game(6, 3, 21).unwrap();
    let multi = MultiActionGame::from_binary(&g);
    let (profile, cert) = approximate_tree_nash_multi_with(&multi, &MultiConfig::new(0.1)).unwrap();
    assert!(cert.max_regret <= 0.1);
    let p0: Vec<f64> = profile.iter().map(|d| d[0]).collect();
    assert!(is_eps_nash(&g, &MixedProfile::new(p0).unwrap(), 0.1 + 1e-9).unwrap());
}

#[test]
fn condensed_clusters_form_a_tree() {
    let g = graphnash::game::cycle_coordination(5);
    let clusters = condense_to_tree(&g).unwrap();
    let cg = merge_vertices(&g, &clusters).unwrap();
    assert_eq!(cg.quotient().iter().map(Vec::len).sum::<usize>(), 2 * (cg.clusters().len() - 1));
    let (p, cert) = solve_sparse(&g, 0.1, Policy::First).unwrap();
    assert!(cert.max_regret <= 0.1);
    assert!(is_eps_nash(&g, &p, 0.1).unwrap());
    let (p, _) = solve_sparse(&coordination_edge(), 0.1, Policy::First).unwrap();
    assert!(is_eps_nash(&coordination_edge(), &p, 0.1).unwrap());
}
