//! Generators for the attack games and test fixtures.
//!
//! Every generator returns a validated [`ConcurrentGame`]; construction
//! cannot produce structural violations for parameters that pass the
//! generator's own checks.

mod block_withholding;
mod double_spend;
mod proof_of_stake;
mod random;
mod rps;

pub use block_withholding::{gen_block_withholding, solve_attractiveness, Attractiveness, BlockWithholdingParams};
pub use double_spend::{gen_double_spend, DoubleSpendParams};
pub use proof_of_stake::{gen_proof_of_stake, poisson_cdf, pos_revenue, ProofOfStakeParams};
pub use random::{constant_game, random_ergodic_game};
pub use rps::{gen_rps, rps_state};

use crate::error::{Error, Result};
use crate::game::{ConcurrentGame, Distribution, GameBuilder};
use crate::scalar::Scalar;

/// Per-coordinate migration of a pool on the grid `1..=n`.
///
/// An attractive pool gains one unit with probability 2/3 and keeps or
/// loses one with 1/6 each; an unattractive pool has the mirrored split.
/// A move off the grid is folded into "retain".
pub(crate) fn pool_move<T: Scalar>(i: usize, n: usize, attractive: bool) -> [(usize, T); 3] {
    let two_thirds = T::of(2.0) / T::of(3.0);
    let sixth = T::one() / T::of(6.0);
    let (gain, keep, lose) = if attractive {
        (two_thirds, sixth, sixth)
    } else {
        (sixth, sixth, two_thirds)
    };
    let mut stay = keep;
    let mut up = (i + 1, gain);
    let mut down = (i.wrapping_sub(1), lose);
    if i == n {
        stay += gain;
        up.1 = T::zero();
    }
    if i == 1 {
        stay += lose;
        down.1 = T::zero();
    }
    [(i, stay), up, down]
}

/// Product of independent coordinate moves, mapped to state indices.
pub(crate) fn product<T: Scalar>(
    a: &[(usize, T)],
    b: &[(usize, T)],
    index: impl Fn(usize, usize) -> usize,
) -> Distribution<T> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &(x, p) in a {
        if p == T::zero() {
            continue;
        }
        for &(y, q) in b {
            if q == T::zero() {
                continue;
            }
            out.push((index(x, y), p * q));
        }
    }
    out
}

pub(crate) fn finish<T: Scalar>(builder: GameBuilder<T>) -> Result<ConcurrentGame<T>> {
    builder
        .build()
        .map_err(|v| Error::InvalidInput(format!("generator produced {} violations, first: {}", v.len(), v[0])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pool_move_boundaries() {
        let inner = pool_move::<f64>(3, 5, true);
        assert_eq!(inner[0], (3, 1.0 / 6.0));
        assert_eq!(inner[1], (4, 2.0 / 3.0));
        let top = pool_move::<f64>(5, 5, true);
        assert!((top[0].1 - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(top[1].1, 0.0);
        let bottom = pool_move::<f64>(1, 5, false);
        assert!((bottom[0].1 - 5.0 / 6.0).abs() < 1e-15);
        for m in [inner, top, bottom] {
            assert!((m.iter().map(|x| x.1).sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }
}
