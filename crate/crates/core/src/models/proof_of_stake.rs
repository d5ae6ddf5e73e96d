//! Proof-of-stake signing attack between pools A (player 1) and B (player 2).
//!
//! A state `(i, j, p)` records the stakes `iε`, `jε` of the two pools and a
//! network connectivity level `p`. Each round the non-mining pool may refuse
//! to sign the other's block; without enough signatures the block loses its
//! mining reward. The number of independent signatures is Poisson with rate
//! `(1 − iε − jε)·p`.

use serde::{Deserialize, Serialize};

use super::{finish, pool_move, product};
use crate::error::{Error, Result};
use crate::game::{ConcurrentGame, GameBuilder};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProofOfStakeParams {
    pub n: usize,
    /// Spacing of the connectivity grid on `[0, 1]`.
    pub p_step: f64,
    pub mining_reward: f64,
    /// Total signing reward per block, shared pro rata by stake.
    pub signing_reward: f64,
}

impl ProofOfStakeParams {
    pub fn new(n: usize) -> Result<Self> {
        ProofOfStakeParams {
            n,
            p_step: 0.01,
            mining_reward: 10.0,
            signing_reward: 1.0,
        }
        .checked()
    }

    pub fn with_step(n: usize, p_step: f64) -> Result<Self> {
        ProofOfStakeParams {
            p_step,
            ..Self::new(n)?
        }
        .checked()
    }

    pub fn checked(self) -> Result<Self> {
        let levels = 1.0 / self.p_step;
        let snapped = (levels.round() - levels).abs() < 1e-9;
        if self.n < 2 || !(self.p_step > 0.0 && self.p_step <= 1.0) || !snapped {
            return Err(Error::InvalidInput(format!(
                "proof of stake needs n ≥ 2 and a step dividing 1 (got n={}, step={})",
                self.n, self.p_step
            )));
        }
        if !(self.mining_reward.is_finite() && self.signing_reward.is_finite()) {
            return Err(Error::InvalidInput("rewards must be finite".into()));
        }
        Ok(self)
    }

    pub fn levels(&self) -> usize {
        (1.0 / self.p_step).round() as usize + 1
    }

    pub fn epsilon<T: Scalar>(&self) -> T {
        T::one() / T::of((2 * self.n + 1) as f64)
    }

    pub fn n_states(&self) -> usize {
        self.n * self.n * self.levels()
    }

    pub fn state_index(&self, i: usize, j: usize, level: usize) -> usize {
        ((i - 1) * self.n + (j - 1)) * self.levels() + level
    }
}

/// `P[X ≤ x]` for `X ~ Poisson(lambda)`.
pub fn poisson_cdf<T: Scalar>(lambda: T, x: T) -> Result<T> {
    if !(lambda >= T::zero()) || !lambda.is_finite() {
        return Err(Error::InvalidInput(format!(
            "Poisson rate must be finite and ≥ 0, got {lambda}"
        )));
    }
    if x < T::zero() {
        return Ok(T::zero());
    }
    if lambda == T::zero() {
        return Ok(T::one());
    }
    let top = x.floor();
    let mut term = (-lambda).exp();
    let mut acc = term;
    let mut k = T::zero();
    while k < top {
        k += T::one();
        term = term * lambda / k;
        acc += term;
        if k > lambda && term < acc * T::epsilon() {
            break;
        }
    }
    Ok(acc.min(T::one()))
}

/// Revenue of the pool holding `own` stake against one holding `other`,
/// given whether the rival and the pool itself sign each other's blocks.
pub fn pos_revenue<T: Scalar>(
    params: &ProofOfStakeParams,
    own: T,
    other: T,
    p: T,
    own_signs: bool,
    other_signs: bool,
) -> Result<T> {
    let half = T::of(0.5);
    let lambda = (T::one() - own - other) * p;
    let accepted = if own >= half || (other_signs && own + other >= half) {
        T::one()
    } else if other_signs {
        T::one() - poisson_cdf(lambda, half - own - other)?
    } else {
        T::one() - poisson_cdf(lambda, half - own)?
    };
    let mining = T::of(params.mining_reward) * own * accepted;
    let signing = T::of(params.signing_reward);
    let rival_blocks = if own_signs { other * own * signing } else { T::zero() };
    let rest = own * (T::one() - other) * signing;
    Ok(mining + rival_blocks + rest)
}

pub fn gen_proof_of_stake<T: Scalar>(params: &ProofOfStakeParams) -> Result<ConcurrentGame<T>> {
    let params = params.checked()?;
    let n = params.n;
    let levels = params.levels();
    let eps: T = params.epsilon();
    let tie = T::of(1e-12);
    let labels = || vec!["sign".to_string(), "refuse".to_string()];

    let total = params.n_states();
    let mut builder = GameBuilder::new(vec![labels(); total], vec![labels(); total]);
    let third = T::one() / T::of(3.0);
    let half = T::of(0.5);

    for i in 1..=n {
        for j in 1..=n {
            let alpha = T::of(i as f64) * eps;
            let beta = T::of(j as f64) * eps;
            for level in 0..levels {
                let s = params.state_index(i, j, level);
                let p = T::of(level as f64 * params.p_step).min(T::one());
                let p_moves: Vec<(usize, T)> = if levels == 1 {
                    vec![(0, T::one())]
                } else if level == 0 {
                    vec![(0, half), (1, half)]
                } else if level == levels - 1 {
                    vec![(level - 1, half), (level, half)]
                } else {
                    vec![(level - 1, third), (level, third), (level + 1, third)]
                };
                for a1 in 0..2 {
                    for a2 in 0..2 {
                        let (a_signs, b_signs) = (a1 == 0, a2 == 0);
                        let r_a = pos_revenue(&params, alpha, beta, p, a_signs, b_signs)?;
                        let r_b = pos_revenue(&params, beta, alpha, p, b_signs, a_signs)?;
                        let attr_a = r_a / alpha;
                        let attr_b = r_b / beta;
                        let even = (attr_a - attr_b).abs() <= tie;
                        let move_a = pool_move::<T>(i, n, even || attr_a > attr_b);
                        let move_b = pool_move::<T>(j, n, even || attr_b > attr_a);
                        let stakes = product(&move_a, &move_b, |x, y| (x - 1) * n + (y - 1));
                        let mut dist = Vec::with_capacity(stakes.len() * p_moves.len());
                        for &(pair, q) in &stakes {
                            for &(l, r) in &p_moves {
                                dist.push((pair * levels + l, q * r));
                            }
                        }
                        builder.set(s, a1, a2, r_a, dist);
                    }
                }
            }
        }
    }
    finish(builder)
}
