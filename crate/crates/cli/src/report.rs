use std::fmt::Write as _;

use cmpg::{ConcurrentGame, Player, Report, SimulationResult, StationaryStrategy};

fn strategy_lines(out: &mut String, game: &ConcurrentGame<f64>, strat: &StationaryStrategy<f64>) {
    let owner = strat.owner();
    let _ = writeln!(out, "strategy {owner}:");
    for s in 0..game.n_states() {
        let labels = game.actions(owner, s);
        let parts: Vec<String> = strat
            .at(s)
            .iter()
            .enumerate()
            .filter(|&(_, &p)| p > 0.0)
            .map(|(a, p)| format!("{}:{p:.6}", labels[a]))
            .collect();
        let _ = writeln!(out, "  {s} → {}", parts.join(" "));
    }
}

/// Human-readable solve report. Contains nothing run-dependent, so two
/// runs on the same input print identical text.
pub fn render_solve(game: &ConcurrentGame<f64>, report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "termination: {}", report.termination.as_str());
    let _ = writeln!(out, "value ∈ [{:?}, {:?}]", report.lower, report.upper);
    let _ = writeln!(out, "epsilon: {:?} (gap {:?})", report.epsilon_requested, report.gap());
    let _ = writeln!(
        out,
        "strategy iterations: {} ({}: {}, {}: {}, rounds: {})",
        report.strategy_iterations(),
        Player::One,
        report.iterations_p1,
        Player::Two,
        report.iterations_p2,
        report.rounds
    );
    strategy_lines(&mut out, game, &report.strategy_p1);
    strategy_lines(&mut out, game, &report.strategy_p2);
    out
}

pub fn render_simulation(res: &SimulationResult) -> String {
    format!(
        "estimate: {:?} ± {:?}\nsteps: {} × {} batches, seed {} ({})\n",
        res.mean_payoff_estimate, res.half_width_95, res.steps, res.batches, res.seed, res.rng
    )
}
