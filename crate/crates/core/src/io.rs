//! JSON file formats: games, strategies and solve reports.
//!
//! Numbers are written with the shortest representation that parses back to
//! the same binary64 value, so a game survives a write/read cycle bit-exact.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{ConcurrentGame, GameBuilder, Player, StationaryStrategy};
use crate::scalar::Scalar;
use crate::solver::SolveReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub n_states: usize,
    pub actions_p1: Vec<Vec<String>>,
    pub actions_p2: Vec<Vec<String>>,
    pub entries: Vec<EntryRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryRecord {
    pub s: usize,
    pub a1: usize,
    pub a2: usize,
    pub reward: f64,
    pub dist: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    pub player: u8,
    pub labels: Vec<Vec<String>>,
    pub probs: Vec<Vec<f64>>,
}

/// Machine-readable solve report. Wall time is deliberately absent so that
/// repeated runs produce identical documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub lower: f64,
    pub upper: f64,
    pub epsilon: f64,
    pub midpoint: f64,
    pub termination: String,
    pub strategy_iterations: usize,
    pub iterations_p1: usize,
    pub iterations_p2: usize,
    pub rounds: usize,
    pub trace_p1: Vec<f64>,
    pub trace_p2: Vec<f64>,
    pub strategy_p1: StrategyFile,
    pub strategy_p2: StrategyFile,
}

fn located(err: serde_json::Error) -> Error {
    Error::Format(format!("line {}, column {}: {err}", err.line(), err.column()))
}

impl GameFile {
    pub fn from_game<T: Scalar>(game: &ConcurrentGame<T>) -> Self {
        let mut entries = Vec::new();
        for s in 0..game.n_states() {
            let m2 = game.n_actions(Player::Two, s);
            for (k, e) in game.state_entries(s).iter().enumerate() {
                entries.push(EntryRecord {
                    s,
                    a1: k / m2,
                    a2: k % m2,
                    reward: e.reward.to_f64_lossy(),
                    dist: e.dist.iter().map(|&(t, p)| (t, p.to_f64_lossy())).collect(),
                });
            }
        }
        GameFile {
            n_states: game.n_states(),
            actions_p1: game.actions_p1().to_vec(),
            actions_p2: game.actions_p2().to_vec(),
            entries,
        }
    }

    pub fn into_game<T: Scalar>(self) -> Result<ConcurrentGame<T>> {
        if self.actions_p1.len() != self.n_states || self.actions_p2.len() != self.n_states {
            return Err(Error::Format(format!(
                "n_states is {} but action tables list {} and {} states",
                self.n_states,
                self.actions_p1.len(),
                self.actions_p2.len()
            )));
        }
        let mut b = GameBuilder::new(self.actions_p1, self.actions_p2);
        for e in self.entries {
            b.set(
                e.s,
                e.a1,
                e.a2,
                T::of(e.reward),
                e.dist.into_iter().map(|(t, p)| (t, T::of(p))).collect(),
            );
        }
        b.build().map_err(|violations| {
            let mut msg = format!("{} violation(s)", violations.len());
            for v in violations.iter().take(10) {
                let _ = write!(msg, "; {v}");
            }
            Error::Format(msg)
        })
    }
}

pub fn game_to_json<T: Scalar>(game: &ConcurrentGame<T>) -> String {
    serde_json::to_string(&GameFile::from_game(game)).expect("game file serializes")
}

pub fn game_from_json<T: Scalar>(text: &str) -> Result<ConcurrentGame<T>> {
    let file: GameFile = serde_json::from_str(text).map_err(located)?;
    file.into_game()
}

impl StrategyFile {
    pub fn from_strategy<T: Scalar>(game: &ConcurrentGame<T>, strat: &StationaryStrategy<T>) -> Self {
        let owner = strat.owner();
        StrategyFile {
            player: match owner {
                Player::One => 1,
                Player::Two => 2,
            },
            labels: (0..game.n_states()).map(|s| game.actions(owner, s).to_vec()).collect(),
            probs: strat
                .probs()
                .iter()
                .map(|row| row.iter().map(|p| p.to_f64_lossy()).collect())
                .collect(),
        }
    }

    /// Checks the strategy against `game`; mismatches name the state.
    pub fn into_strategy<T: Scalar>(self, game: &ConcurrentGame<T>) -> Result<StationaryStrategy<T>> {
        let owner = match self.player {
            1 => Player::One,
            2 => Player::Two,
            p => return Err(Error::Format(format!("player must be 1 or 2, got {p}"))),
        };
        let probs = self
            .probs
            .into_iter()
            .map(|row| row.into_iter().map(T::of).collect())
            .collect();
        StationaryStrategy::new(game, owner, probs)
    }
}

pub fn strategy_to_json<T: Scalar>(game: &ConcurrentGame<T>, strat: &StationaryStrategy<T>) -> String {
    serde_json::to_string_pretty(&StrategyFile::from_strategy(game, strat)).expect("strategy serializes")
}

pub fn strategy_from_json<T: Scalar>(game: &ConcurrentGame<T>, text: &str) -> Result<StationaryStrategy<T>> {
    let file: StrategyFile = serde_json::from_str(text).map_err(located)?;
    file.into_strategy(game)
}

impl ReportFile {
    pub fn from_report<T: Scalar>(game: &ConcurrentGame<T>, report: &SolveReport<T>) -> Self {
        let f = |xs: &[T]| xs.iter().map(|x| x.to_f64_lossy()).collect();
        ReportFile {
            lower: report.lower.to_f64_lossy(),
            upper: report.upper.to_f64_lossy(),
            epsilon: report.epsilon_requested.to_f64_lossy(),
            midpoint: report.midpoint().to_f64_lossy(),
            termination: report.termination.as_str().to_string(),
            strategy_iterations: report.strategy_iterations(),
            iterations_p1: report.iterations_p1,
            iterations_p2: report.iterations_p2,
            rounds: report.rounds,
            trace_p1: f(&report.trace_p1),
            trace_p2: f(&report.trace_p2),
            strategy_p1: StrategyFile::from_strategy(game, &report.strategy_p1),
            strategy_p2: StrategyFile::from_strategy(game, &report.strategy_p2),
        }
    }
}
