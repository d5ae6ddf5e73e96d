//! Small synthetic games used for cross-checking the solver.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::finish;
use crate::error::{Error, Result};
use crate::game::{ConcurrentGame, GameBuilder};
use crate::scalar::Scalar;

fn labels(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("a{i}")).collect()
}

/// Game where every entry pays `reward`. States form a cycle with a
/// uniform chance of staying put.
pub fn constant_game<T: Scalar>(n_states: usize, n_actions: usize, reward: T) -> Result<ConcurrentGame<T>> {
    if n_states == 0 || n_actions == 0 {
        return Err(Error::InvalidInput("constant game needs states and actions".into()));
    }
    let mut b = GameBuilder::new(vec![labels(n_actions); n_states], vec![labels(n_actions); n_states]);
    let half = T::of(0.5);
    for s in 0..n_states {
        let next = (s + 1) % n_states;
        for a1 in 0..n_actions {
            for a2 in 0..n_actions {
                b.set(s, a1, a2, reward, vec![(s, half), (next, half)]);
            }
        }
    }
    finish(b)
}

/// Random game that passes [`ConcurrentGame::ergodic_sufficient`].
///
/// Every entry moves to `(s + 1) mod n` with probability at least 0.1 and
/// spreads the rest over a random subset of states. Rewards are uniform in
/// `[-1, 1]`; action counts uniform in `1..=max_actions`.
pub fn random_ergodic_game<T: Scalar>(seed: u64, n_states: usize, max_actions: usize) -> Result<ConcurrentGame<T>> {
    if n_states == 0 || max_actions == 0 {
        return Err(Error::InvalidInput("random game needs states and actions".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m1: Vec<usize> = (0..n_states).map(|_| rng.gen_range(1..=max_actions)).collect();
    let m2: Vec<usize> = (0..n_states).map(|_| rng.gen_range(1..=max_actions)).collect();
    let mut b = GameBuilder::new(
        m1.iter().map(|&k| labels(k)).collect(),
        m2.iter().map(|&k| labels(k)).collect(),
    );
    for s in 0..n_states {
        for a1 in 0..m1[s] {
            for a2 in 0..m2[s] {
                let reward: f64 = rng.gen_range(-1.0..=1.0);
                let cycle: f64 = rng.gen_range(0.1..0.6);
                let mut weights: Vec<(usize, f64)> = Vec::new();
                for t in 0..n_states {
                    if rng.gen_bool(0.5) {
                        weights.push((t, rng.gen_range(0.05..1.0)));
                    }
                }
                let total: f64 = weights.iter().map(|w| w.1).sum();
                let mut dist = vec![(T::of(cycle), (s + 1) % n_states)];
                if total > 0.0 {
                    for (t, w) in weights.drain(..) {
                        dist.push((T::of((1.0 - cycle) * w / total), t));
                    }
                } else {
                    dist.push((T::of(1.0 - cycle), s));
                }
                b.set(
                    s,
                    a1,
                    a2,
                    T::of(reward),
                    dist.into_iter().map(|(p, t)| (t, p)).collect(),
                );
            }
        }
    }
    finish(b)
}
