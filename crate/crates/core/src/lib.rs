//! Strategy iteration for ergodic concurrent mean-payoff games.
//!
//! The solver brackets the value of a two-player zero-sum concurrent game
//! between the guarantees of the two players' current stationary strategies
//! and tightens the bracket by Hoffman–Karp improvement steps until it is
//! narrower than a requested epsilon.
//!
//! Everything numeric is generic over [`Scalar`] (`f64` or `f32`); the
//! aliases at the crate root fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod eval;
pub mod game;
pub mod io;
pub mod linalg;
pub mod matrix_game;
pub mod models;
pub mod scalar;
pub mod simplex;
pub mod simulate;
pub mod solver;

pub use error::{Error, Result};
pub use eval::{bellman_residual, evaluate_strategy, evaluate_strategy_from, exp_rew, one_st, PotentialSolution};
pub use game::{Distribution, Entry, GameBuilder, Player, Violation};
pub use linalg::Matrix;
pub use matrix_game::{
    certificate_residual, col_guarantee, refine_solution, row_guarantee, solve_matrix_game, solve_refined,
    MatrixGameSolution, RefineError,
};
pub use scalar::Scalar;
pub use simulate::{simulate_profile, SimulationConfig, SimulationResult};
pub use solver::{solve, SolveOptions, SolveReport, Termination};

pub type Game = game::ConcurrentGame<f64>;
pub type Strategy = game::StationaryStrategy<f64>;
pub type Report = SolveReport<f64>;
pub type Options = SolveOptions<f64>;
pub type Potential = PotentialSolution<f64>;

pub type Game32 = game::ConcurrentGame<f32>;
pub type Strategy32 = game::StationaryStrategy<f32>;
pub type Report32 = SolveReport<f32>;

pub use game::{ConcurrentGame, StationaryStrategy};
