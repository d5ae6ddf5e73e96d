//! Concurrent stochastic game structures and stationary strategies.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    /// Maximizer of the mean payoff.
    One,
    /// Minimizer of the mean payoff.
    Two,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::One => f.write_str("player-1"),
            Player::Two => f.write_str("player-2"),
        }
    }
}

/// Sparse successor distribution: `(state, probability)` pairs.
pub type Distribution<T> = Vec<(usize, T)>;

#[derive(Debug, Clone, PartialEq)]
pub struct Entry<T> {
    pub reward: T,
    pub dist: Distribution<T>,
}

/// Explicit finite concurrent game.
///
/// Actions are addressed by dense per-state indices; the labels exist only
/// for reporting. Entries are stored row-major per state, so the entry for
/// `(s, a1, a2)` lives at `offset[s] + a1 * |Γ₂(s)| + a2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrentGame<T> {
    actions_p1: Vec<Vec<String>>,
    actions_p2: Vec<Vec<String>>,
    offsets: Vec<usize>,
    entries: Vec<Entry<T>>,
}

/// One broken structural invariant, with its coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    NoActions {
        state: usize,
        player: Player,
    },
    Missing {
        state: usize,
        a1: usize,
        a2: usize,
    },
    Duplicate {
        state: usize,
        a1: usize,
        a2: usize,
    },
    OutOfRange {
        state: usize,
        a1: usize,
        a2: usize,
    },
    SuccessorOutOfRange {
        state: usize,
        a1: usize,
        a2: usize,
        successor: usize,
    },
    BadProbability {
        state: usize,
        a1: usize,
        a2: usize,
        successor: usize,
        probability: f64,
    },
    Mass {
        state: usize,
        a1: usize,
        a2: usize,
        mass: f64,
    },
    NonFiniteReward {
        state: usize,
        a1: usize,
        a2: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NoActions { state, player } => {
                write!(f, "state {state}: {player} has no actions")
            }
            Violation::Missing { state, a1, a2 } => {
                write!(f, "({state},{a1},{a2}): entry missing")
            }
            Violation::Duplicate { state, a1, a2 } => {
                write!(f, "({state},{a1},{a2}): entry defined more than once")
            }
            Violation::OutOfRange { state, a1, a2 } => {
                write!(f, "({state},{a1},{a2}): state or action index out of range")
            }
            Violation::SuccessorOutOfRange {
                state,
                a1,
                a2,
                successor,
            } => {
                write!(f, "({state},{a1},{a2}): successor {successor} out of range")
            }
            Violation::BadProbability {
                state,
                a1,
                a2,
                successor,
                probability,
            } => write!(
                f,
                "({state},{a1},{a2}): probability {probability} of successor {successor} not in [0,1]"
            ),
            Violation::Mass { state, a1, a2, mass } => {
                write!(f, "({state},{a1},{a2}): distribution mass {mass} ≠ 1")
            }
            Violation::NonFiniteReward { state, a1, a2 } => {
                write!(f, "({state},{a1},{a2}): reward is not finite")
            }
        }
    }
}

/// Incremental construction of a [`ConcurrentGame`].
///
/// The builder never rejects data; [`GameBuilder::build`] runs the full
/// validation and reports every violation at once.
#[derive(Debug, Clone)]
pub struct GameBuilder<T> {
    actions_p1: Vec<Vec<String>>,
    actions_p2: Vec<Vec<String>>,
    raw: Vec<(usize, usize, usize, Entry<T>)>,
}

impl<T: Scalar> GameBuilder<T> {
    pub fn new(actions_p1: Vec<Vec<String>>, actions_p2: Vec<Vec<String>>) -> Self {
        GameBuilder {
            actions_p1,
            actions_p2,
            raw: Vec::new(),
        }
    }

    pub fn n_states(&self) -> usize {
        self.actions_p1.len()
    }

    pub fn set(&mut self, s: usize, a1: usize, a2: usize, reward: T, dist: Distribution<T>) -> &mut Self {
        self.raw.push((s, a1, a2, Entry { reward, dist }));
        self
    }

    /// Structural violations of the data added so far.
    pub fn violations(&self) -> Vec<Violation> {
        self.layout().1
    }

    fn layout(&self) -> (Vec<Option<Entry<T>>>, Vec<Violation>, Vec<usize>) {
        let mut violations = Vec::new();
        let n = self.actions_p1.len();
        if self.actions_p2.len() != n {
            violations.push(Violation::OutOfRange {
                state: n.min(self.actions_p2.len()),
                a1: 0,
                a2: 0,
            });
        }
        let n = n.min(self.actions_p2.len());
        for s in 0..n {
            if self.actions_p1[s].is_empty() {
                violations.push(Violation::NoActions {
                    state: s,
                    player: Player::One,
                });
            }
            if self.actions_p2[s].is_empty() {
                violations.push(Violation::NoActions {
                    state: s,
                    player: Player::Two,
                });
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut total = 0;
        for s in 0..n {
            offsets.push(total);
            total += self.actions_p1[s].len() * self.actions_p2[s].len();
        }
        offsets.push(total);

        let mut slots: Vec<Option<Entry<T>>> = vec![None; total];
        for (s, a1, a2, entry) in &self.raw {
            let (s, a1, a2) = (*s, *a1, *a2);
            if s >= n || a1 >= self.actions_p1[s].len() || a2 >= self.actions_p2[s].len() {
                violations.push(Violation::OutOfRange { state: s, a1, a2 });
                continue;
            }
            let k = offsets[s] + a1 * self.actions_p2[s].len() + a2;
            if slots[k].is_some() {
                violations.push(Violation::Duplicate { state: s, a1, a2 });
                continue;
            }
            check_entry(n, s, a1, a2, entry, &mut violations);
            slots[k] = Some(entry.clone());
        }
        for s in 0..n {
            let m2 = self.actions_p2[s].len();
            for k in offsets[s]..offsets[s + 1] {
                if slots[k].is_none() {
                    let local = k - offsets[s];
                    violations.push(Violation::Missing {
                        state: s,
                        a1: local / m2,
                        a2: local % m2,
                    });
                }
            }
        }
        (slots, violations, offsets)
    }

    pub fn build(self) -> std::result::Result<ConcurrentGame<T>, Vec<Violation>> {
        let (slots, violations, offsets) = self.layout();
        if !violations.is_empty() {
            return Err(violations);
        }
        let entries = slots
            .into_iter()
            .map(|e| {
                let mut e = e.expect("checked above");
                e.dist.sort_by_key(|&(t, _)| t);
                e.dist.dedup_by(|later, kept| {
                    if later.0 == kept.0 {
                        kept.1 += later.1;
                        true
                    } else {
                        false
                    }
                });
                e.dist.retain(|&(_, p)| p > T::zero());
                e
            })
            .collect();
        Ok(ConcurrentGame {
            actions_p1: self.actions_p1,
            actions_p2: self.actions_p2,
            offsets,
            entries,
        })
    }
}

fn check_entry<T: Scalar>(n: usize, s: usize, a1: usize, a2: usize, entry: &Entry<T>, out: &mut Vec<Violation>) {
    if !entry.reward.is_finite() {
        out.push(Violation::NonFiniteReward { state: s, a1, a2 });
    }
    let mut mass = T::zero();
    for &(t, p) in &entry.dist {
        if t >= n {
            out.push(Violation::SuccessorOutOfRange {
                state: s,
                a1,
                a2,
                successor: t,
            });
        }
        if !(p >= T::zero() && p <= T::one()) {
            out.push(Violation::BadProbability {
                state: s,
                a1,
                a2,
                successor: t,
                probability: p.to_f64_lossy(),
            });
        }
        mass += p;
    }
    if !((mass - T::one()).abs() <= T::prob_tolerance()) {
        out.push(Violation::Mass {
            state: s,
            a1,
            a2,
            mass: mass.to_f64_lossy(),
        });
    }
}

impl<T: Scalar> ConcurrentGame<T> {
    pub fn n_states(&self) -> usize {
        self.actions_p1.len()
    }

    pub fn actions(&self, player: Player, s: usize) -> &[String] {
        match player {
            Player::One => &self.actions_p1[s],
            Player::Two => &self.actions_p2[s],
        }
    }

    pub fn n_actions(&self, player: Player, s: usize) -> usize {
        self.actions(player, s).len()
    }

    pub fn actions_p1(&self) -> &[Vec<String>] {
        &self.actions_p1
    }

    pub fn actions_p2(&self) -> &[Vec<String>] {
        &self.actions_p2
    }

    #[inline]
    pub fn entry(&self, s: usize, a1: usize, a2: usize) -> &Entry<T> {
        &self.entries[self.offsets[s] + a1 * self.actions_p2[s].len() + a2]
    }

    #[inline]
    pub fn reward(&self, s: usize, a1: usize, a2: usize) -> T {
        self.entry(s, a1, a2).reward
    }

    #[inline]
    pub fn transition(&self, s: usize, a1: usize, a2: usize) -> &[(usize, T)] {
        &self.entry(s, a1, a2).dist
    }

    /// Entries of state `s` in `(a1, a2)` row-major order.
    pub fn state_entries(&self, s: usize) -> &[Entry<T>] {
        &self.entries[self.offsets[s]..self.offsets[s + 1]]
    }

    /// Size of the transition relation, `Σ |supp δ(s,a1,a2)|`.
    pub fn transition_count(&self) -> usize {
        self.entries
            .iter()
            .map(|e| e.dist.iter().filter(|&&(_, p)| p > T::zero()).count())
            .sum()
    }

    /// Largest action count of either player at any state.
    pub fn max_actions(&self) -> usize {
        self.actions_p1
            .iter()
            .chain(&self.actions_p2)
            .map(Vec::len)
            .max()
            .unwrap_or(0)
    }

    /// Re-checks every structural invariant. Always empty for games built
    /// through [`GameBuilder::build`].
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.n_states();
        for s in 0..n {
            if self.actions_p1[s].is_empty() {
                out.push(Violation::NoActions {
                    state: s,
                    player: Player::One,
                });
            }
            if self.actions_p2[s].is_empty() {
                out.push(Violation::NoActions {
                    state: s,
                    player: Player::Two,
                });
            }
            for a1 in 0..self.actions_p1[s].len() {
                for a2 in 0..self.actions_p2[s].len() {
                    check_entry(n, s, a1, a2, self.entry(s, a1, a2), &mut out);
                }
            }
        }
        out
    }

    /// Sufficient condition for ergodicity.
    ///
    /// Builds the graph with an edge `s → s'` whenever `s'` is a successor of
    /// `s` under *every* action pair and checks strong connectivity. `true`
    /// means the game is ergodic; `false` is inconclusive.
    pub fn ergodic_sufficient(&self) -> bool {
        let n = self.n_states();
        if n == 0 {
            return false;
        }
        let mut forward: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut backward: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut hits = vec![0usize; n];
        for s in 0..n {
            let entries = self.state_entries(s);
            for e in entries {
                for &(t, p) in &e.dist {
                    if p > T::zero() {
                        hits[t] += 1;
                    }
                }
            }
            for (t, h) in hits.iter_mut().enumerate() {
                if *h == entries.len() {
                    forward[s].push(t);
                    backward[t].push(s);
                }
                *h = 0;
            }
        }
        reaches_all(&forward) && reaches_all(&backward)
    }

    /// Probability distribution over `player`'s actions at every state,
    /// uniform over the available actions.
    pub fn uniform_strategy(&self, player: Player) -> StationaryStrategy<T> {
        let probs = (0..self.n_states())
            .map(|s| {
                let k = self.n_actions(player, s);
                vec![T::one() / T::of(k as f64); k]
            })
            .collect();
        StationaryStrategy { owner: player, probs }
    }

    /// Pure strategy playing the given action index at each state.
    pub fn pure_strategy(&self, player: Player, choice: &[usize]) -> Result<StationaryStrategy<T>> {
        if choice.len() != self.n_states() {
            return Err(Error::Dimension(format!(
                "expected {} choices, got {}",
                self.n_states(),
                choice.len()
            )));
        }
        let probs = choice
            .iter()
            .enumerate()
            .map(|(s, &a)| {
                let k = self.n_actions(player, s);
                if a >= k {
                    return Err(Error::Dimension(format!(
                        "state {s}: action {a} but only {k} available"
                    )));
                }
                let mut row = vec![T::zero(); k];
                row[a] = T::one();
                Ok(row)
            })
            .collect::<Result<_>>()?;
        Ok(StationaryStrategy { owner: player, probs })
    }

    /// Same game with every reward replaced by `f(reward)`.
    pub fn map_rewards(&self, f: impl Fn(T) -> T) -> Self {
        let mut g = self.clone();
        for e in &mut g.entries {
            e.reward = f(e.reward);
        }
        g
    }
}

fn reaches_all(adj: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(s) = stack.pop() {
        for &t in &adj[s] {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    seen.into_iter().all(|x| x)
}

/// Memoryless randomized strategy: one distribution over the owner's own
/// action list per state.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryStrategy<T> {
    owner: Player,
    probs: Vec<Vec<T>>,
}

impl<T: Scalar> StationaryStrategy<T> {
    /// Checks the strategy against `game` and wraps it.
    pub fn new(game: &ConcurrentGame<T>, owner: Player, probs: Vec<Vec<T>>) -> Result<Self> {
        let strat = StationaryStrategy { owner, probs };
        strat.check(game)?;
        Ok(strat)
    }

    pub fn owner(&self) -> Player {
        self.owner
    }

    pub fn at(&self, s: usize) -> &[T] {
        &self.probs[s]
    }

    pub fn probs(&self) -> &[Vec<T>] {
        &self.probs
    }

    pub(crate) fn set(&mut self, s: usize, dist: Vec<T>) {
        self.probs[s] = dist;
    }

    pub fn n_states(&self) -> usize {
        self.probs.len()
    }

    /// Verifies dimensions and that each state carries a distribution.
    pub fn check(&self, game: &ConcurrentGame<T>) -> Result<()> {
        if self.probs.len() != game.n_states() {
            return Err(Error::Dimension(format!(
                "strategy covers {} states, game has {}",
                self.probs.len(),
                game.n_states()
            )));
        }
        for (s, row) in self.probs.iter().enumerate() {
            let k = game.n_actions(self.owner, s);
            if row.len() != k {
                return Err(Error::Dimension(format!(
                    "state {s}: strategy has {} probabilities, {} has {k} actions",
                    row.len(),
                    self.owner
                )));
            }
            if row.iter().any(|&p| !(p >= T::zero() && p <= T::one())) {
                return Err(Error::Dimension(format!("state {s}: probability outside [0,1]")));
            }
            let mass: T = row.iter().copied().sum();
            if !((mass - T::one()).abs() <= T::prob_tolerance()) {
                return Err(Error::Dimension(format!("state {s}: probabilities sum to {mass}")));
            }
        }
        Ok(())
    }

    /// Index of the most probable action at `s` (lowest index on ties).
    pub fn argmax(&self, s: usize) -> usize {
        let row = &self.probs[s];
        let mut best = 0;
        for (a, &p) in row.iter().enumerate() {
            if p > row[best] {
                best = a;
            }
        }
        best
    }
}
