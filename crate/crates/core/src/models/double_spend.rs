//! Zero-confirmation double spending between a seller (player 1) and a
//! malicious buyer (player 2).
//!
//! State 0 is the shuffling state the seller passes through after
//! reconnecting; state `i ≥ 1` is a network position where a double spend
//! succeeds with probability `p_i = 0.1 + (i−1)·0.4/n`.

use serde::{Deserialize, Serialize};

use super::finish;
use crate::error::{Error, Result};
use crate::game::{ConcurrentGame, GameBuilder};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleSpendParams {
    /// Number of non-shuffling states.
    pub n: usize,
    /// Spontaneous disconnect probability.
    pub p_dc: f64,
    /// Seller's profit ratio.
    pub profit: f64,
    /// Fraction of honest customers lost while waiting for a confirmation.
    pub impatient: f64,
    pub max_attack: usize,
    /// Honest purchase volume per round.
    pub honest_volume: f64,
}

impl DoubleSpendParams {
    pub fn new(n: usize) -> Result<Self> {
        DoubleSpendParams {
            n,
            p_dc: 0.001,
            profit: 0.5,
            impatient: 0.5,
            max_attack: 20,
            honest_volume: 10.0,
        }
        .checked()
    }

    /// Parameters giving exactly `states` states in total.
    pub fn with_states(states: usize) -> Result<Self> {
        Self::new(states.saturating_sub(1))
    }

    pub fn checked(self) -> Result<Self> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if self.n < 2 || self.max_attack < 1 || !unit(self.p_dc) || !unit(self.profit) || !unit(self.impatient) {
            return Err(Error::InvalidInput(format!("invalid double-spend parameters {self:?}")));
        }
        if !(self.honest_volume.is_finite() && self.honest_volume >= 0.0) {
            return Err(Error::InvalidInput(
                "honest volume must be finite and non-negative".into(),
            ));
        }
        Ok(self)
    }

    /// Success probability of a double spend at state `i ∈ 1..=n`.
    pub fn success_probability<T: Scalar>(&self, i: usize) -> T {
        T::of(0.1) + T::of((i - 1) as f64) * T::of(0.4) / T::of(self.n as f64)
    }

    pub fn n_states(&self) -> usize {
        self.n + 1
    }
}

const SELLER_ACTIONS: [&str; 4] = ["accept", "reconnect", "confirm", "reconnect+confirm"];

pub fn gen_double_spend<T: Scalar>(params: &DoubleSpendParams) -> Result<ConcurrentGame<T>> {
    let params = params.checked()?;
    let n = params.n;
    let p_dc = T::of(params.p_dc);
    let profit = T::of(params.profit);
    let honest = T::of(params.honest_volume);
    let impatient = T::of(params.impatient);

    let mut actions_p1 = vec![vec!["shuffle".to_string()]];
    let mut actions_p2 = vec![vec!["wait".to_string()]];
    for _ in 1..=n {
        actions_p1.push(SELLER_ACTIONS.iter().map(|s| s.to_string()).collect());
        actions_p2.push((1..=params.max_attack).map(|d| format!("double-spend-{d}")).collect());
    }
    let mut builder = GameBuilder::new(actions_p1, actions_p2);

    let uniform = T::one() / T::of(n as f64);
    builder.set(0, 0, 0, T::zero(), (1..=n).map(|i| (i, uniform)).collect());

    for s in 1..=n {
        let p_s: T = params.success_probability(s);
        let neighbours: Vec<usize> = [s - 1, s, s + 1]
            .into_iter()
            .filter(|&t| (1..=n).contains(&t))
            .collect();
        for a1 in 0..4 {
            let reconnect = a1 == 1 || a1 == 3;
            let confirm = a1 >= 2;
            let p_a = if confirm { T::zero() } else { p_s };
            let dist = if reconnect {
                vec![(0, T::one())]
            } else {
                let fail = T::one() - p_a;
                let local = fail * (T::one() - p_dc) / T::of(neighbours.len() as f64);
                let mut d = vec![(0, p_dc * fail)];
                d.extend(neighbours.iter().map(|&t| (t, local)));
                if p_a > T::zero() {
                    d.push((n, p_a));
                }
                d
            };
            let r2 = if confirm {
                honest * profit * (T::one() - impatient)
            } else {
                honest * profit
            };
            for d in 1..=params.max_attack {
                let d_t = T::of(d as f64);
                let r1 = d_t * profit * (T::one() - p_a) - d_t * (T::one() - profit) * p_a;
                builder.set(s, a1, d - 1, r1 + r2, dist.clone());
            }
        }
    }
    finish(builder)
}
