//! Block-withholding attack between two mining pools.
//!
//! States are pairs `(i1, i2)` on `{1..n}²`: pool A owns `i1·ε` of the hash
//! power and pool B `i2·ε`, with `ε = 1/(2n+1)`. Each pool picks how much of
//! its power infiltrates the other. The reward is pool A's revenue; miners
//! drift towards the more attractive pool.

use serde::{Deserialize, Serialize};

use super::{finish, pool_move, product};
use crate::error::{Error, Result};
use crate::game::{ConcurrentGame, GameBuilder};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockWithholdingParams {
    pub n: usize,
}

impl BlockWithholdingParams {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("block withholding needs n ≥ 2, got {n}")));
        }
        Ok(BlockWithholdingParams { n })
    }

    pub fn epsilon<T: Scalar>(&self) -> T {
        T::one() / T::of((2 * self.n + 1) as f64)
    }

    pub fn n_states(&self) -> usize {
        self.n * self.n
    }

    pub fn state_index(&self, i1: usize, i2: usize) -> usize {
        (i1 - 1) * self.n + (i2 - 1)
    }
}

/// Revenues and attractiveness of both pools for one pair of attack levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attractiveness<T> {
    pub r_a: T,
    pub r_b: T,
    pub r_c: T,
    pub attr_a: T,
    pub attr_b: T,
    pub attr_c: T,
}

/// Solves
///
/// ```text
/// r_A = (α − α′) + α′·attr_B,   attr_B = r_B / (β + α′)
/// r_B = (β − β′) + β′·attr_A,   attr_A = r_A / (α + β′)
/// ```
///
/// and sets `attr_C = 1/(1 − α′ − β′)`. Revenues are normalized so that
/// `r_A + r_B + r_C = 1`, which makes `r_C` the remainder.
pub fn solve_attractiveness<T: Scalar>(alpha: T, beta: T, alpha_p: T, beta_p: T) -> Result<Attractiveness<T>> {
    let zero = T::zero();
    let ok = alpha > zero
        && beta > zero
        && alpha_p >= zero
        && alpha_p < alpha
        && beta_p >= zero
        && beta_p < beta
        && alpha + beta <= T::one();
    if !ok {
        return Err(Error::InvalidInput(format!(
            "attractiveness needs 0 < α, β; α′ ∈ [0, α); β′ ∈ [0, β); α + β ≤ 1 \
             (got α={alpha}, β={beta}, α′={alpha_p}, β′={beta_p})"
        )));
    }
    // [1, -k_a; -k_b, 1] [r_A; r_B] = [α - α′; β - β′]
    let k_a = alpha_p / (beta + alpha_p);
    let k_b = beta_p / (alpha + beta_p);
    let det = T::one() - k_a * k_b;
    assert!(det > zero, "attractiveness system is singular for valid inputs");
    let own_a = alpha - alpha_p;
    let own_b = beta - beta_p;
    let r_a = (own_a + k_a * own_b) / det;
    let r_b = (own_b + k_b * own_a) / det;
    Ok(Attractiveness {
        r_a,
        r_b,
        r_c: T::one() - r_a - r_b,
        attr_a: r_a / (alpha + beta_p),
        attr_b: r_b / (beta + alpha_p),
        attr_c: T::one() / (T::one() - alpha_p - beta_p),
    })
}

pub fn gen_block_withholding<T: Scalar>(params: &BlockWithholdingParams) -> Result<ConcurrentGame<T>> {
    let n = params.n;
    let eps: T = params.epsilon();
    let tie = T::of(1e-12);
    let attack = |k: usize| (0..k).map(|j| format!("attack-{j}ε")).collect::<Vec<_>>();

    let mut actions_p1 = Vec::with_capacity(n * n);
    let mut actions_p2 = Vec::with_capacity(n * n);
    for i1 in 1..=n {
        for i2 in 1..=n {
            actions_p1.push(attack(i1));
            actions_p2.push(attack(i2));
        }
    }
    let mut builder = GameBuilder::new(actions_p1, actions_p2);
    for i1 in 1..=n {
        for i2 in 1..=n {
            let s = params.state_index(i1, i2);
            let alpha = T::of(i1 as f64) * eps;
            let beta = T::of(i2 as f64) * eps;
            for a1 in 0..i1 {
                for a2 in 0..i2 {
                    let at = solve_attractiveness(alpha, beta, T::of(a1 as f64) * eps, T::of(a2 as f64) * eps)?;
                    let even = (at.attr_a - at.attr_b).abs() <= tie;
                    let move_a = pool_move::<T>(i1, n, even || at.attr_a > at.attr_b);
                    let move_b = pool_move::<T>(i2, n, even || at.attr_b > at.attr_a);
                    let dist = product(&move_a, &move_b, |x, y| params.state_index(x, y));
                    builder.set(s, a1, a2, at.r_a, dist);
                }
            }
        }
    }
    finish(builder)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_attack_keeps_own_power() {
        let at: Attractiveness<f64> = solve_attractiveness(0.3, 0.3, 0.0, 0.0).unwrap();
        assert!((at.r_a - 0.3).abs() < 1e-15);
        assert!((at.attr_a - 1.0).abs() < 1e-15);
        assert_eq!(at.attr_c, 1.0);
        assert!((at.r_a + at.r_b + at.r_c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_sided_attack() {
        // β′ = 0 ⇒ r_B = β, attr_B = β/(β+α′) = 0.75, r_A = 0.2 + 0.1·0.75
        let at: Attractiveness<f64> = solve_attractiveness(0.3, 0.3, 0.1, 0.0).unwrap();
        assert!((at.r_b - 0.3).abs() < 1e-15);
        assert!((at.attr_b - 0.75).abs() < 1e-15);
        assert!((at.r_a - 0.275).abs() < 1e-15);
    }

    #[test]
    fn attr_c_formula() {
        let at: Attractiveness<f64> = solve_attractiveness(0.3, 0.3, 0.1, 0.1).unwrap();
        assert!((at.attr_c - 1.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(solve_attractiveness(0.3, 0.3, 0.3, 0.0).is_err());
        assert!(solve_attractiveness(0.6, 0.6, 0.0, 0.0).is_err());
        assert!(BlockWithholdingParams::new(1).is_err());
    }

    #[test]
    fn shape_at_n10() {
        let p = BlockWithholdingParams::new(10).unwrap();
        let g: ConcurrentGame<f64> = gen_block_withholding(&p).unwrap();
        assert_eq!(g.n_states(), 100);
        assert!(g.validate().is_empty());
        assert!(g.ergodic_sufficient());
        let corner = p.state_index(1, 1);
        assert_eq!(g.actions_p1()[corner].len(), 1);
        assert_eq!(g.actions_p2()[corner].len(), 1);
    }

    #[test]
    fn interior_joint_move() {
        let p = BlockWithholdingParams::new(10).unwrap();
        let g: ConcurrentGame<f64> = gen_block_withholding(&p).unwrap();
        // A attacks at (5,5), B does not: A stays more attractive
        let s = p.state_index(5, 5);
        let at: Attractiveness<f64> = solve_attractiveness(5.0 / 21.0, 5.0 / 21.0, 1.0 / 21.0, 0.0).unwrap();
        assert!(at.attr_a > at.attr_b);
        let dist = g.transition(s, 1, 0);
        let up_down = dist.iter().find(|&&(t, _)| t == p.state_index(6, 4)).unwrap().1;
        assert!((up_down - 4.0 / 9.0).abs() < 1e-15);
        assert!(dist.iter().all(|&(_, q)| q >= 1.0 / 36.0 - 1e-15));
    }

    #[test]
    fn revenues_normalize_everywhere() {
        let p = BlockWithholdingParams::new(6).unwrap();
        let eps: f64 = p.epsilon();
        for i1 in 1..=6 {
            for i2 in 1..=6 {
                for a1 in 0..i1 {
                    for a2 in 0..i2 {
                        let at: Attractiveness<f64> =
                            solve_attractiveness(i1 as f64 * eps, i2 as f64 * eps, a1 as f64 * eps, a2 as f64 * eps)
                                .unwrap();
                        assert!((at.r_a + at.r_b + at.r_c - 1.0).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
