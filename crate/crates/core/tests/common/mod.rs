//! Reference computations that share no code with the library's solvers.
#![allow(dead_code, clippy::needless_range_loop)]

use cmpg::{Game, Player, Strategy};

pub type Dense = Vec<Vec<f64>>;

/// Gaussian elimination with partial pivoting; `None` if singular.
pub fn gauss(mut a: Dense, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

fn worst_column(m: &Dense, p: &[f64]) -> f64 {
    (0..m[0].len())
        .map(|j| (0..m.len()).map(|i| p[i] * m[i][j]).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// Value of the row player's maximin problem by support enumeration.
///
/// The maximin of a concave piecewise-linear function over the simplex is
/// attained at a vertex of its linearity regions; each vertex equalizes
/// `|R|` columns on a row support `R`, so trying every equal-size pair of
/// row and column subsets finds it.
pub fn matrix_value(m: &Dense) -> f64 {
    let (rows, cols) = (m.len(), m[0].len());
    let mut best = f64::NEG_INFINITY;
    for r in subsets(rows) {
        for c in subsets(cols).into_iter().filter(|c| c.len() == r.len()) {
            // unknowns: p_r (|r|) and v; equations: column payoffs = v, Σp = 1
            let k = r.len();
            let mut a = vec![vec![0.0; k + 1]; k + 1];
            let mut b = vec![0.0; k + 1];
            for (e, &j) in c.iter().enumerate() {
                for (u, &i) in r.iter().enumerate() {
                    a[e][u] = m[i][j];
                }
                a[e][k] = -1.0;
            }
            for u in 0..k {
                a[k][u] = 1.0;
            }
            b[k] = 1.0;
            let Some(x) = gauss(a, b) else { continue };
            if x[..k].iter().any(|&p| p < -1e-12) {
                continue;
            }
            let mut p = vec![0.0; rows];
            for (u, &i) in r.iter().enumerate() {
                p[i] = x[u].max(0.0);
            }
            best = best.max(worst_column(m, &p));
        }
    }
    best
}

/// Maximin over a grid of mixed strategies with spacing `1/steps`.
pub fn grid_value(m: &Dense, steps: usize) -> f64 {
    let h = 1.0 / steps as f64;
    match m.len() {
        1 => worst_column(m, &[1.0]),
        2 => (0..=steps)
            .map(|a| worst_column(m, &[a as f64 * h, 1.0 - a as f64 * h]))
            .fold(f64::NEG_INFINITY, f64::max),
        3 => {
            let mut best = f64::NEG_INFINITY;
            for a in 0..=steps {
                for b in 0..=steps - a {
                    let (x, y) = (a as f64 * h, b as f64 * h);
                    best = best.max(worst_column(m, &[x, y, 1.0 - x - y]));
                }
            }
            best
        }
        _ => panic!("grid oracle supports up to three rows"),
    }
}

fn local(game: &Game, v: &[f64], s: usize, tau: f64) -> Dense {
    let e = game.state_entries(s);
    let m2 = game.actions_p2()[s].len();
    e.chunks(m2)
        .map(|row| {
            row.iter()
                .map(|e| e.reward + tau * v[s] + (1.0 - tau) * e.dist.iter().map(|&(t, p)| p * v[t]).sum::<f64>())
                .collect()
        })
        .collect()
}

/// Value iteration on the Shapley operator of the lazy game
/// `δ' = τ·stay + (1−τ)·δ`, which has the same mean-payoff value and is
/// aperiodic. Returns `(lo, hi)` with `lo ≤ value ≤ hi`, stopping once
/// `hi − lo ≤ residual`.
pub fn value_iteration(game: &Game, residual: f64, max_sweeps: usize) -> (f64, f64) {
    let n = game.n_states();
    let tau = 0.5;
    let mut v = vec![0.0; n];
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for _ in 0..max_sweeps {
        let next: Vec<f64> = (0..n).map(|s| matrix_value(&local(game, &v, s, tau))).collect();
        let diffs: Vec<f64> = next.iter().zip(&v).map(|(a, b)| a - b).collect();
        lo = diffs.iter().copied().fold(f64::INFINITY, f64::min);
        hi = diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let base = next[0];
        v = next.iter().map(|x| x - base).collect();
        if hi - lo <= residual {
            break;
        }
    }
    (lo, hi)
}

/// Long-run average reward of the chain where `strat` is mixed against the
/// opponent's pure choice `response[s]`, from the chain's stationary
/// distribution.
pub fn profile_gain(game: &Game, strat: &Strategy, response: &[usize]) -> f64 {
    let n = game.n_states();
    let mut p = vec![vec![0.0; n]; n];
    let mut r = vec![0.0; n];
    for s in 0..n {
        for (a, &q) in strat.at(s).iter().enumerate() {
            let (a1, a2) = match strat.owner() {
                Player::One => (a, response[s]),
                Player::Two => (response[s], a),
            };
            r[s] += q * game.reward(s, a1, a2);
            for &(t, w) in game.transition(s, a1, a2) {
                p[s][t] += q * w;
            }
        }
    }
    // π(P − I) = 0 with Σπ = 1: replace the last balance equation by the mass
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            a[j][i] = p[i][j] - if i == j { 1.0 } else { 0.0 };
        }
    }
    let mut b = vec![0.0; n];
    a[n - 1] = vec![1.0; n];
    b[n - 1] = 1.0;
    let pi = gauss(a, b).expect("unichain profile");
    pi.iter().zip(&r).map(|(x, y)| x * y).sum()
}

/// Guaranteed payoff of `strat` by enumerating every pure stationary
/// response of the opponent.
pub fn brute_force_guarantee(game: &Game, strat: &Strategy) -> f64 {
    let opp = strat.owner().opponent();
    let sizes: Vec<usize> = (0..game.n_states()).map(|s| game.actions(opp, s).len()).collect();
    let mut choice = vec![0; sizes.len()];
    let mut best = match strat.owner() {
        Player::One => f64::INFINITY,
        Player::Two => f64::NEG_INFINITY,
    };
    loop {
        let g = profile_gain(game, strat, &choice);
        best = match strat.owner() {
            Player::One => best.min(g),
            Player::Two => best.max(g),
        };
        let mut k = 0;
        loop {
            if k == choice.len() {
                return best;
            }
            choice[k] += 1;
            if choice[k] < sizes[k] {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Random stationary strategy for `player`, all probabilities positive.
pub fn random_strategy(game: &Game, player: Player, seed: u64) -> Strategy {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let probs = (0..game.n_states())
        .map(|s| {
            let w: Vec<f64> = (0..game.actions(player, s).len())
                .map(|_| rng.gen_range(0.1..1.0))
                .collect();
            let t: f64 = w.iter().sum();
            w.iter().map(|x| x / t).collect()
        })
        .collect();
    Strategy::new(game, player, probs).unwrap()
}
