//! Hoffman–Karp strategy iteration with a two-sided stopping rule.
//!
//! Player 1's iteration produces a non-decreasing sequence of guaranteed
//! payoffs (lower bounds on the value); the mirrored iteration for player 2
//! produces non-increasing upper bounds. Running both in lockstep brackets
//! the value, and the solver stops once the bracket is narrower than the
//! requested epsilon.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{evaluate_strategy_from, PotentialSolution};
use crate::game::{ConcurrentGame, Player, StationaryStrategy};
use crate::linalg::Matrix;
use crate::matrix_game::{col_guarantee, row_guarantee, solve_refined};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Converged,
    MaxIters,
    Stalled,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIters => "max-iters",
            Termination::Stalled => "stalled",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions<T> {
    pub epsilon: T,
    pub target: usize,
    pub max_iters: usize,
    /// Skip the ergodicity pre-check.
    pub assume_ergodic: bool,
    /// Tolerance for keeping a distribution that is already optimal.
    pub opt_tolerance: T,
    /// Start from seeded random strategies instead of uniform ones.
    pub seed: Option<u64>,
}

impl<T: Scalar> Default for SolveOptions<T> {
    fn default() -> Self {
        SolveOptions {
            epsilon: T::of(0.01),
            target: 0,
            max_iters: 100,
            assume_ergodic: false,
            opt_tolerance: T::opt_tolerance(),
            seed: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    pub lower: T,
    pub upper: T,
    pub epsilon_requested: T,
    pub strategy_p1: StationaryStrategy<T>,
    pub strategy_p2: StationaryStrategy<T>,
    /// Strategy evaluations performed for each player.
    pub iterations_p1: usize,
    pub iterations_p2: usize,
    /// Rounds of the alternating loop; one round improves both players.
    pub rounds: usize,
    /// Guaranteed payoff of player 1's strategy after each evaluation.
    pub trace_p1: Vec<T>,
    /// Guaranteed payoff of player 2's strategy after each evaluation.
    pub trace_p2: Vec<T>,
    pub wall_time: std::time::Duration,
    pub termination: Termination,
}

impl<T: Scalar> SolveReport<T> {
    pub fn midpoint(&self) -> T {
        (self.lower + self.upper) / T::of(2.0)
    }

    pub fn gap(&self) -> T {
        self.upper - self.lower
    }

    /// Iteration count in the sense of a whole run: the larger of the two
    /// players' evaluation counts.
    pub fn strategy_iterations(&self) -> usize {
        self.iterations_p1.max(self.iterations_p2)
    }
}

/// Local matrix game `M_s[a1][a2] = R(s,a1,a2) + Σ δ(s,a1,a2)(s')·v(s')`.
pub fn local_matrix<T: Scalar>(game: &ConcurrentGame<T>, potential: &[T], s: usize) -> Matrix<T> {
    let m1 = game.n_actions(Player::One, s);
    let m2 = game.n_actions(Player::Two, s);
    Matrix::from_fn(m1, m2, |a1, a2| {
        let e = game.entry(s, a1, a2);
        e.reward + e.dist.iter().map(|&(t, p)| p * potential[t]).sum::<T>()
    })
}

/// One synchronous improvement sweep for the owner of `strat`.
///
/// Every state's distribution is replaced by an optimal one for its local
/// matrix game unless the current distribution already guarantees the
/// matrix-game value within `opt_tolerance`. Returns the new strategy and
/// whether any state changed.
pub fn improve_once<T: Scalar>(
    game: &ConcurrentGame<T>,
    strat: &StationaryStrategy<T>,
    eval: &PotentialSolution<T>,
    opt_tolerance: T,
) -> Result<(StationaryStrategy<T>, bool)> {
    if eval.evaluated != strat.owner() {
        return Err(Error::InvalidInput("evaluation belongs to the other player".into()));
    }
    let owner = strat.owner();
    let updates: Vec<Option<Vec<T>>> = (0..game.n_states())
        .into_par_iter()
        .map(|s| {
            if game.n_actions(owner, s) == 1 {
                return Ok(None);
            }
            let m = local_matrix(game, &eval.potential, s);
            let sol = solve_refined(&m).map_err(|e| Error::at_state(s, e))?;
            let tol = opt_tolerance * T::one().max(sol.value.abs());
            let (current, fresh) = match owner {
                Player::One => (row_guarantee(&m, strat.at(s)), sol.row_strategy),
                Player::Two => (-col_guarantee(&m, strat.at(s)), sol.col_strategy),
            };
            let target = match owner {
                Player::One => sol.value,
                Player::Two => -sol.value,
            };
            Ok(if current >= target - tol { None } else { Some(fresh) })
        })
        .collect::<Result<_>>()?;

    let mut next = strat.clone();
    let mut changed = false;
    for (s, update) in updates.into_iter().enumerate() {
        if let Some(dist) = update {
            next.set(s, dist);
            changed = true;
        }
    }
    Ok((next, changed))
}

/// Payoff `strat` guarantees against a best-responding opponent.
pub fn best_response_value<T: Scalar>(game: &ConcurrentGame<T>, strat: &StationaryStrategy<T>) -> Result<T> {
    Ok(evaluate_strategy_from(game, strat, 0, None)?.gain)
}

fn random_strategy<T: Scalar>(game: &ConcurrentGame<T>, player: Player, rng: &mut ChaCha8Rng) -> StationaryStrategy<T> {
    let mut strat = game.uniform_strategy(player);
    for s in 0..game.n_states() {
        let w: Vec<f64> = (0..game.n_actions(player, s))
            .map(|_| rng.gen_range(0.05..1.0))
            .collect();
        let total: f64 = w.iter().sum();
        strat.set(s, w.iter().map(|x| T::of(x / total)).collect());
    }
    strat
}

struct Side<T> {
    strat: StationaryStrategy<T>,
    eval: PotentialSolution<T>,
    best_strat: StationaryStrategy<T>,
    best: T,
    evaluations: usize,
    trace: Vec<T>,
    settled: bool,
}

impl<T: Scalar> Side<T> {
    fn start(game: &ConcurrentGame<T>, strat: StationaryStrategy<T>, target: usize) -> Result<Self> {
        let eval = evaluate_strategy_from(game, &strat, target, None)?;
        let best = eval.gain;
        Ok(Side {
            best_strat: strat.clone(),
            strat,
            best,
            evaluations: 1,
            trace: vec![best],
            eval,
            settled: false,
        })
    }

    /// Improves and re-evaluates; keeps the best strategy seen so far.
    fn step(&mut self, game: &ConcurrentGame<T>, target: usize, opt_tolerance: T) -> Result<()> {
        let (next, changed) = improve_once(game, &self.strat, &self.eval, opt_tolerance)?;
        if !changed {
            self.settled = true;
            return Ok(());
        }
        let warm = self.eval.response_actions();
        let eval = evaluate_strategy_from(game, &next, target, Some(&warm))?;
        self.evaluations += 1;
        self.trace.push(eval.gain);
        let better = match next.owner() {
            Player::One => eval.gain > self.best,
            Player::Two => eval.gain < self.best,
        };
        if better {
            self.best = eval.gain;
            self.best_strat = next.clone();
        }
        self.strat = next;
        self.eval = eval;
        Ok(())
    }
}

/// Brackets the value of an ergodic game to within `epsilon`.
pub fn solve<T: Scalar>(game: &ConcurrentGame<T>, options: &SolveOptions<T>) -> Result<SolveReport<T>> {
    if !(options.epsilon > T::zero()) {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    if options.target >= game.n_states() {
        return Err(Error::InvalidInput(format!(
            "target state {} out of range (n = {})",
            options.target,
            game.n_states()
        )));
    }
    if !options.assume_ergodic && !game.ergodic_sufficient() {
        return Err(Error::InvalidInput(
            "game fails the ergodicity check; pass the override to solve it anyway".into(),
        ));
    }
    let start = Instant::now();
    let target = options.target;
    let (init1, init2) = match options.seed {
        None => (game.uniform_strategy(Player::One), game.uniform_strategy(Player::Two)),
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (
                random_strategy(game, Player::One, &mut rng),
                random_strategy(game, Player::Two, &mut rng),
            )
        }
    };
    let mut p1 = Side::start(game, init1, target)?;
    let mut p2 = Side::start(game, init2, target)?;
    let mut rounds = 0;

    let termination = loop {
        if p2.best - p1.best <= options.epsilon {
            break Termination::Converged;
        }
        if p1.settled && p2.settled {
            break Termination::Stalled;
        }
        if rounds >= options.max_iters {
            break Termination::MaxIters;
        }
        rounds += 1;
        if !p1.settled {
            p1.step(game, target, options.opt_tolerance)?;
        }
        if !p2.settled {
            p2.step(game, target, options.opt_tolerance)?;
        }
    };

    Ok(SolveReport {
        lower: p1.best,
        upper: p2.best,
        epsilon_requested: options.epsilon,
        strategy_p1: p1.best_strat,
        strategy_p2: p2.best_strat,
        iterations_p1: p1.evaluations,
        iterations_p2: p2.evaluations,
        rounds,
        trace_p1: p1.trace,
        trace_p2: p2.trace,
        wall_time: start.elapsed(),
        termination,
    })
}
