//! Evaluation of a fixed stationary strategy.
//!
//! Fixing one player's stationary strategy turns the game into an
//! average-reward MDP for the opponent. Its optimal gain is the payoff the
//! strategy guarantees, and the accompanying potential (relative value)
//! vector, pinned to zero at a target state, feeds the improvement step.
//!
//! The gain/potential linear program is solved by policy iteration over
//! the opponent's pure stationary responses. Each evaluation step solves
//! the square system formed by one tight constraint per state with
//! Gaussian elimination, which is the basis-solve a simplex run on the same
//! LP would perform, but exact up to the elimination itself.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{ConcurrentGame, Player, StationaryStrategy};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSolution<T> {
    pub gain: T,
    /// Potential per state; exactly zero at `target_state`.
    pub potential: Vec<T>,
    pub target_state: usize,
    /// Pure optimal response of the opponent, lowest index among tight actions.
    pub best_response: StationaryStrategy<T>,
    /// Owner of the evaluated strategy.
    pub evaluated: Player,
    /// Policy-iteration rounds needed by the opponent MDP.
    pub rounds: usize,
}

impl<T: Scalar> PotentialSolution<T> {
    /// Pure action index of the best response at each state.
    pub fn response_actions(&self) -> Vec<usize> {
        (0..self.best_response.n_states())
            .map(|s| self.best_response.argmax(s))
            .collect()
    }
}

/// Expected one-step reward at `s` when `strat` is mixed against the
/// opponent's pure action `a_opp`.
pub fn exp_rew<T: Scalar>(game: &ConcurrentGame<T>, s: usize, strat: &StationaryStrategy<T>, a_opp: usize) -> T {
    strat
        .at(s)
        .iter()
        .enumerate()
        .filter(|(_, &p)| p != T::zero())
        .map(|(a, &p)| match strat.owner() {
            Player::One => game.reward(s, a, a_opp) * p,
            Player::Two => game.reward(s, a_opp, a) * p,
        })
        .sum()
}

/// Expected potential after one step from `s` when the players mix with
/// `d1` and `d2`.
pub fn one_st<T: Scalar>(game: &ConcurrentGame<T>, potential: &[T], d1: &[T], d2: &[T], s: usize) -> T {
    let mut acc = T::zero();
    for (a1, &p1) in d1.iter().enumerate() {
        if p1 == T::zero() {
            continue;
        }
        for (a2, &p2) in d2.iter().enumerate() {
            if p2 == T::zero() {
                continue;
            }
            let step: T = game.transition(s, a1, a2).iter().map(|&(t, p)| p * potential[t]).sum();
            acc += p1 * p2 * step;
        }
    }
    acc
}

/// Opponent's MDP once `strat` is fixed: per state, per opponent action,
/// the mixed reward and successor distribution.
struct InducedMdp<T> {
    rewards: Vec<Vec<T>>,
    transitions: Vec<Vec<Vec<(usize, T)>>>,
}

impl<T: Scalar> InducedMdp<T> {
    fn new(game: &ConcurrentGame<T>, strat: &StationaryStrategy<T>) -> Self {
        let opp = strat.owner().opponent();
        let (rewards, transitions) = (0..game.n_states())
            .into_par_iter()
            .map(|s| {
                let k = game.n_actions(opp, s);
                let mut rs = Vec::with_capacity(k);
                let mut ts = Vec::with_capacity(k);
                for b in 0..k {
                    rs.push(exp_rew(game, s, strat, b));
                    let mut dist: Vec<(usize, T)> = Vec::new();
                    for (a, &p) in strat.at(s).iter().enumerate() {
                        if p == T::zero() {
                            continue;
                        }
                        let succ = match strat.owner() {
                            Player::One => game.transition(s, a, b),
                            Player::Two => game.transition(s, b, a),
                        };
                        dist.extend(succ.iter().map(|&(t, q)| (t, p * q)));
                    }
                    dist.sort_by_key(|&(t, _)| t);
                    dist.dedup_by(|later, kept| {
                        if later.0 == kept.0 {
                            kept.1 += later.1;
                            true
                        } else {
                            false
                        }
                    });
                    ts.push(dist);
                }
                (rs, ts)
            })
            .unzip();
        InducedMdp { rewards, transitions }
    }

    fn q_value(&self, s: usize, b: usize, potential: &[T]) -> T {
        self.rewards[s][b] + self.transitions[s][b].iter().map(|&(t, p)| p * potential[t]).sum::<T>()
    }
}

/// Solves the gain/potential system for `strat` with `v[target] = 0`.
///
/// When `strat` belongs to player 1 the opponent minimizes, so the gain is
/// the largest `g` with `g + v_s ≤ ExpRew(s,σ,a₂) + OneSt(v,σ(s),a₂,s)` for
/// every `s` and `a₂`; for player 2 the inequalities flip and `g` is the
/// smallest feasible value.
pub fn evaluate_strategy<T: Scalar>(
    game: &ConcurrentGame<T>,
    strat: &StationaryStrategy<T>,
    target: usize,
) -> Result<PotentialSolution<T>> {
    evaluate_strategy_from(game, strat, target, None)
}

/// As [`evaluate_strategy`], starting the opponent's policy iteration from
/// `warm_start` when given (for example the previous best response).
pub fn evaluate_strategy_from<T: Scalar>(
    game: &ConcurrentGame<T>,
    strat: &StationaryStrategy<T>,
    target: usize,
    warm_start: Option<&[usize]>,
) -> Result<PotentialSolution<T>> {
    strat.check(game)?;
    let n = game.n_states();
    if target >= n {
        return Err(Error::InvalidInput(format!(
            "target state {target} out of range (n = {n})"
        )));
    }
    let opp = strat.owner().opponent();
    let mdp = InducedMdp::new(game, strat);
    // the opponent of player 1 minimizes
    let sense = match strat.owner() {
        Player::One => -T::one(),
        Player::Two => T::one(),
    };
    let scale = mdp.rewards.iter().flatten().fold(T::one(), |m, r| m.max(r.abs()));
    let tol = T::slack_tolerance() * scale;

    let mut policy: Vec<usize> = match warm_start {
        Some(w) if w.len() == n && (0..n).all(|s| w[s] < game.n_actions(opp, s)) => w.to_vec(),
        _ => (0..n)
            .map(|s| best_index(mdp.rewards[s].iter().map(|&r| sense * r), T::zero()))
            .collect(),
    };

    let max_rounds = 10 * n + 100;
    let mut rounds = 0;
    let (gain, potential) = loop {
        rounds += 1;
        let (gain, potential) = solve_policy(&mdp, &policy, target).map_err(|e| match e {
            Error::Singular => Error::NotErgodic { player: strat.owner() },
            e => e,
        })?;
        let switches: Vec<(usize, usize)> = (0..n)
            .into_par_iter()
            .filter_map(|s| {
                let q: Vec<T> = (0..mdp.rewards[s].len())
                    .map(|b| sense * mdp.q_value(s, b, &potential))
                    .collect();
                let best = q.iter().copied().fold(T::neg_infinity(), T::max);
                if q[policy[s]] >= best - tol {
                    None
                } else {
                    Some((s, best_index(q.iter().copied(), T::zero())))
                }
            })
            .collect();
        if switches.is_empty() || rounds >= max_rounds {
            break (gain, potential);
        }
        for (s, b) in switches {
            policy[s] = b;
        }
    };

    let mut response = vec![0; n];
    for (s, slot) in response.iter_mut().enumerate() {
        *slot = best_index(
            (0..mdp.rewards[s].len()).map(|b| sense * mdp.q_value(s, b, &potential)),
            tol,
        );
    }
    let best_response = game.pure_strategy(opp, &response)?;
    Ok(PotentialSolution {
        gain,
        potential,
        target_state: target,
        best_response,
        evaluated: strat.owner(),
        rounds,
    })
}

/// Lowest index whose value is within `tol` of the maximum.
fn best_index<T: Scalar>(values: impl Iterator<Item = T> + Clone, tol: T) -> usize {
    let best = values.clone().fold(T::neg_infinity(), T::max);
    values.into_iter().position(|x| x >= best - tol).unwrap_or(0)
}

/// Solves `g + v_s − Σ P(s,π(s))(s') v_{s'} = r(s,π(s))`, `v_target = 0`.
fn solve_policy<T: Scalar>(mdp: &InducedMdp<T>, policy: &[usize], target: usize) -> Result<(T, Vec<T>)> {
    let n = policy.len();
    // unknown 0 is the gain; the target's potential column is reused for it
    let col = |s: usize| if s == target { 0 } else { s + usize::from(s < target) };
    let mut a = Matrix::zeros(n, n);
    let mut b = vec![T::zero(); n];
    for s in 0..n {
        let act = policy[s];
        a[(s, 0)] += T::one();
        if s != target {
            a[(s, col(s))] += T::one();
        }
        for &(t, p) in &mdp.transitions[s][act] {
            if t != target {
                a[(s, col(t))] -= p;
            }
        }
        b[s] = mdp.rewards[s][act];
    }
    let x = linalg::solve(a, b)?;
    let potential = (0..n)
        .map(|s| if s == target { T::zero() } else { x[col(s)] })
        .collect();
    Ok((x[0], potential))
}

/// Largest violation of the evaluation's optimality equations,
/// `|g + v_s − opt_a (ExpRew + OneSt)|` over all states.
pub fn bellman_residual<T: Scalar>(
    game: &ConcurrentGame<T>,
    strat: &StationaryStrategy<T>,
    sol: &PotentialSolution<T>,
) -> T {
    let opp = strat.owner().opponent();
    let mut worst = T::zero();
    for s in 0..game.n_states() {
        let k = game.n_actions(opp, s);
        let values = (0..k).map(|b| {
            let mut pure = vec![T::zero(); k];
            pure[b] = T::one();
            let next = match strat.owner() {
                Player::One => one_st(game, &sol.potential, strat.at(s), &pure, s),
                Player::Two => one_st(game, &sol.potential, &pure, strat.at(s), s),
            };
            exp_rew(game, s, strat, b) + next
        });
        let opt = match strat.owner() {
            Player::One => values.fold(T::infinity(), T::min),
            Player::Two => values.fold(T::neg_infinity(), T::max),
        };
        worst = worst.max((sol.gain + sol.potential[s] - opt).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameBuilder;

    fn labels(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("a{i}")).collect()
    }

    fn cycle() -> ConcurrentGame<f64> {
        let mut b = GameBuilder::new(vec![labels(1); 2], vec![labels(1); 2]);
        b.set(0, 0, 0, 0.0, vec![(1, 1.0)]);
        b.set(1, 0, 0, 2.0, vec![(0, 1.0)]);
        b.build().unwrap()
    }

    #[test]
    fn trivial_game() {
        let mut b = GameBuilder::new(vec![labels(1)], vec![labels(1)]);
        b.set(0, 0, 0, 5.0, vec![(0, 1.0)]);
        let g = b.build().unwrap();
        let sol = evaluate_strategy(&g, &g.uniform_strategy(Player::One), 0).unwrap();
        assert_eq!(sol.gain, 5.0);
        assert_eq!(sol.potential, vec![0.0]);
    }

    #[test]
    fn deterministic_cycle() {
        // g + v0 = 0 + v1, g + v1 = 2 + v0, v0 = 0  =>  g = 1, v1 = 1
        let g = cycle();
        let sol = evaluate_strategy(&g, &g.uniform_strategy(Player::One), 0).unwrap();
        assert!((sol.gain - 1.0).abs() < 1e-15);
        assert_eq!(sol.potential[0], 0.0);
        assert!((sol.potential[1] - 1.0).abs() < 1e-15);
        // moving the target shifts potentials, not the gain
        let other = evaluate_strategy(&g, &g.uniform_strategy(Player::One), 1).unwrap();
        assert!((other.gain - 1.0).abs() < 1e-15);
        assert_eq!(other.potential[1], 0.0);
        assert!((other.potential[0] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn minimizer_picks_smaller_self_loop() {
        let mut b = GameBuilder::new(vec![labels(2)], vec![labels(2)]);
        for a1 in 0..2 {
            b.set(0, a1, 0, 3.0, vec![(0, 1.0)]);
            b.set(0, a1, 1, 1.0, vec![(0, 1.0)]);
        }
        let g = b.build().unwrap();
        let sol = evaluate_strategy(&g, &g.uniform_strategy(Player::One), 0).unwrap();
        assert_eq!(sol.gain, 1.0);
        assert_eq!(sol.response_actions(), vec![1]);
        // player 2's strategy is evaluated against a maximizer
        let p2 = g.pure_strategy(Player::Two, &[0]).unwrap();
        assert_eq!(evaluate_strategy(&g, &p2, 0).unwrap().gain, 3.0);
    }

    #[test]
    fn exp_rew_and_one_st() {
        let mut b = GameBuilder::new(vec![labels(2)], vec![labels(1)]);
        b.set(0, 0, 0, 2.0, vec![(0, 1.0)]);
        b.set(0, 1, 0, 4.0, vec![(0, 1.0)]);
        let g = b.build().unwrap();
        assert_eq!(exp_rew(&g, 0, &g.uniform_strategy(Player::One), 0), 3.0);
        let pure = g.pure_strategy(Player::One, &[1]).unwrap();
        assert_eq!(exp_rew(&g, 0, &pure, 0), 4.0);

        let c = cycle();
        assert_eq!(one_st(&c, &[0.0, 0.0], &[1.0], &[1.0], 0), 0.0);
        assert_eq!(one_st(&c, &[0.0, 4.0], &[1.0], &[1.0], 0), 4.0);
    }

    #[test]
    fn one_st_averages_successors() {
        let mut b = GameBuilder::new(vec![labels(1); 3], vec![labels(1); 3]);
        b.set(0, 0, 0, 0.0, vec![(1, 0.5), (2, 0.5)]);
        b.set(1, 0, 0, 0.0, vec![(0, 1.0)]);
        b.set(2, 0, 0, 0.0, vec![(0, 1.0)]);
        let g = b.build().unwrap();
        assert_eq!(one_st(&g, &[0.0, 1.0, 3.0], &[1.0], &[1.0], 0), 2.0);
    }

    #[test]
    fn non_ergodic_is_reported() {
        // two absorbing states: the potential system is singular
        let mut b = GameBuilder::new(vec![labels(1); 2], vec![labels(1); 2]);
        b.set(0, 0, 0, 0.0, vec![(0, 1.0)]);
        b.set(1, 0, 0, 1.0, vec![(1, 1.0)]);
        let g = b.build().unwrap();
        let err = evaluate_strategy(&g, &g.uniform_strategy(Player::One), 0).unwrap_err();
        assert!(matches!(err, Error::NotErgodic { player: Player::One }));
    }
}
