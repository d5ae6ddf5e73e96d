mod common;

use cmpg::models::{gen_block_withholding, random_ergodic_game, BlockWithholdingParams};
use cmpg::{evaluate_strategy, simulate_profile, solve, Game, GameBuilder, Options, Player, SimulationConfig};

fn config(seed: u64) -> SimulationConfig {
    SimulationConfig {
        start: 0,
        steps: 31_250,
        batches: 32,
        seed,
    }
}

#[test]
fn two_state_chain_matches_stationary_mean() {
    // stays with probability 0.7 in state 0 (reward 1) and 0.4 in state 1 (reward 5);
    // π = (2/3, 1/3), mean payoff 7/3
    let l = || vec!["a".to_string()];
    let mut b = GameBuilder::new(vec![l(), l()], vec![l(), l()]);
    b.set(0, 0, 0, 1.0, vec![(0, 0.7), (1, 0.3)])
        .set(1, 0, 0, 5.0, vec![(0, 0.6), (1, 0.4)]);
    let g: Game = b.build().unwrap();
    let res = simulate_profile(
        &g,
        &g.uniform_strategy(Player::One),
        &g.uniform_strategy(Player::Two),
        &config(1),
    )
    .unwrap();
    assert!(
        (res.mean_payoff_estimate - 7.0 / 3.0).abs() <= 3.0 * res.half_width_95,
        "{res:?}"
    );
    assert!(res.half_width_95 < 0.02);
}

#[test]
fn start_state_does_not_matter() {
    let g: Game = random_ergodic_game(42, 4, 3).unwrap();
    let (p1, p2) = (g.uniform_strategy(Player::One), g.uniform_strategy(Player::Two));
    let runs: Vec<_> = (0..4)
        .map(|start| simulate_profile(&g, &p1, &p2, &SimulationConfig { start, ..config(7) }).unwrap())
        .collect();
    for r in &runs[1..] {
        let tol = 3.0 * (r.half_width_95 + runs[0].half_width_95);
        assert!((r.mean_payoff_estimate - runs[0].mean_payoff_estimate).abs() <= tol);
    }
}

#[test]
fn evaluation_agrees_with_simulation() {
    for seed in 0..5 {
        let g: Game = random_ergodic_game(seed, 3, 3).unwrap();
        let strat = common::random_strategy(&g, Player::One, seed);
        let sol = evaluate_strategy(&g, &strat, 0).unwrap();
        let response = g.pure_strategy(Player::Two, &sol.response_actions()).unwrap();
        let res = simulate_profile(&g, &strat, &response, &config(seed)).unwrap();
        assert!(
            (res.mean_payoff_estimate - sol.gain).abs() <= 3.0 * res.half_width_95,
            "seed {seed}: {res:?} vs {}",
            sol.gain
        );
    }
}

#[test]
fn block_withholding_profile_tracks_bracket() {
    let g: Game = gen_block_withholding(&BlockWithholdingParams::new(10).unwrap()).unwrap();
    let r = solve(&g, &Options::default()).unwrap();
    let res = simulate_profile(&g, &r.strategy_p1, &r.strategy_p2, &config(3)).unwrap();
    assert!(
        (res.mean_payoff_estimate - r.midpoint()).abs() <= res.half_width_95 + 0.01,
        "{res:?} vs [{}, {}]",
        r.lower,
        r.upper
    );
}
