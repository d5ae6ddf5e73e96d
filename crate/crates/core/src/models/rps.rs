//! Repeated rock-paper-scissors played in laps.
//!
//! State `k ∈ {−2..2}` (stored at index `k + 2`) is player 1's lead in
//! rounds within the current lap. Reaching a lead of three either way ends
//! the lap and play restarts at 0. Ties are decided by a fair coin. With
//! network noise `ε`, every round is lost by a random player with
//! probability `ε` regardless of the moves.

use super::finish;
use crate::error::{Error, Result};
use crate::game::{ConcurrentGame, GameBuilder};
use crate::scalar::Scalar;

const MOVES: [&str; 3] = ["R", "P", "S"];

fn beats(a: usize, b: usize) -> bool {
    // paper beats rock, scissors beat paper, rock beats scissors
    (a + 3 - b) % 3 == 1
}

/// Index of lead `k ∈ {−2..2}`.
pub fn rps_state(lead: i32) -> usize {
    (lead + 2) as usize
}

/// `symmetric = false` rewards one unit per lap won by player 1 (paid in
/// expectation on the step that can end the lap); `symmetric = true` pays
/// `+1` for a lap won by player 1 and `−1` for one won by player 2.
pub fn gen_rps<T: Scalar>(noise: T, symmetric: bool) -> Result<ConcurrentGame<T>> {
    if !(noise >= T::zero() && noise < T::one()) {
        return Err(Error::InvalidInput(format!("noise must lie in [0, 1), got {noise}")));
    }
    let labels = || MOVES.iter().map(|m| m.to_string()).collect::<Vec<_>>();
    let mut builder = GameBuilder::new(vec![labels(); 5], vec![labels(); 5]);
    let half = T::of(0.5);
    let clean = T::one() - noise;
    for lead in -2..=2i32 {
        let s = rps_state(lead);
        let up = if lead == 2 { rps_state(0) } else { rps_state(lead + 1) };
        let down = if lead == -2 { rps_state(0) } else { rps_state(lead - 1) };
        for a1 in 0..3 {
            for a2 in 0..3 {
                let win = if beats(a1, a2) {
                    T::one()
                } else if beats(a2, a1) {
                    T::zero()
                } else {
                    half
                };
                let p_up = clean * win + noise * half;
                let p_down = clean * (T::one() - win) + noise * half;
                let lap_won = if lead == 2 { p_up } else { T::zero() };
                let lap_lost = if lead == -2 { p_down } else { T::zero() };
                let reward = if symmetric { lap_won - lap_lost } else { lap_won };
                builder.set(s, a1, a2, reward, vec![(up, p_up), (down, p_down)]);
            }
        }
    }
    finish(builder)
}

#[cfg(test)]
mod tests {
    use super::*;

    const R: usize = 0;
    const P: usize = 1;
    const S: usize = 2;

    #[test]
    fn beats_relation() {
        assert!(beats(R, S) && beats(S, P) && beats(P, R));
        assert!(!beats(S, R) && !beats(R, R));
    }

    #[test]
    fn noisy_transitions() {
        let g: ConcurrentGame<f64> = gen_rps(0.1, false).unwrap();
        let to_zero = g
            .transition(rps_state(2), R, S)
            .iter()
            .find(|x| x.0 == rps_state(0))
            .unwrap()
            .1;
        assert!((to_zero - 0.95).abs() < 1e-15);
        assert_eq!(g.reward(rps_state(2), R, R), 0.5);
        assert!(g.ergodic_sufficient());
        assert!(g.validate().is_empty());
    }

    #[test]
    fn noiseless_is_not_provably_ergodic() {
        let g: ConcurrentGame<f64> = gen_rps(0.0, false).unwrap();
        assert!(g.validate().is_empty());
        assert!(!g.ergodic_sufficient());
        assert_eq!(g.transition(rps_state(2), R, S), &[(rps_state(0), 1.0)]);
        assert_eq!(g.reward(rps_state(2), R, S), 1.0);
        assert_eq!(g.reward(rps_state(1), R, S), 0.0);
    }

    #[test]
    fn symmetric_rewards_are_antisymmetric() {
        let g: ConcurrentGame<f64> = gen_rps(0.1, true).unwrap();
        for a1 in 0..3 {
            for a2 in 0..3 {
                let here = g.reward(rps_state(2), a1, a2);
                let mirror = g.reward(rps_state(-2), a2, a1);
                assert!((here + mirror).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rejects_bad_noise() {
        assert!(gen_rps(1.0f64, true).is_err());
        assert!(gen_rps(-0.1f64, true).is_err());
    }
}
