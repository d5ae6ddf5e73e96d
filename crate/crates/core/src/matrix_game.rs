//! Zero-sum matrix games.
//!
//! The row player maximizes, the column player minimizes. Solutions come
//! from the dense simplex in [`crate::simplex`] and can then be sharpened by
//! re-solving the square system of tight constraints with Gaussian
//! elimination ([`refine_solution`]).

use thiserror::Error;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::{max_of, min_of, Scalar};
use crate::simplex::{self, Var};

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGameSolution<T> {
    pub value: T,
    /// Maximizer's mixed strategy over rows.
    pub row_strategy: Vec<T>,
    /// Minimizer's mixed strategy over columns.
    pub col_strategy: Vec<T>,
    /// Rows `i` with `(M q)_i` within the slack tolerance of the value.
    pub tight_rows: Vec<usize>,
    /// Columns `j` with `(pᵀ M)_j` within the slack tolerance of the value.
    pub tight_cols: Vec<usize>,
}

/// Why a refinement could not improve on the raw LP solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RefineError {
    #[error("tight-constraint system is singular")]
    Singular,
    #[error("tight-constraint system yields negative probabilities")]
    Infeasible,
    #[error("refined solution has a larger certificate residual than the input")]
    NoImprovement,
}

/// Smallest payoff the row player's mixed strategy guarantees.
pub fn row_guarantee<T: Scalar>(m: &Matrix<T>, p: &[T]) -> T {
    min_of(m.vec_mul(p))
}

/// Largest payoff the column player's mixed strategy concedes.
pub fn col_guarantee<T: Scalar>(m: &Matrix<T>, q: &[T]) -> T {
    max_of(m.mul_vec(q))
}

/// Deviation of a claimed solution from a mutual-guarantee certificate:
/// the duality gap `max(Mq) − min(pᵀM)` together with any probability mass
/// or sign defect of either strategy.
pub fn certificate_residual<T: Scalar>(m: &Matrix<T>, sol: &MatrixGameSolution<T>) -> T {
    let gap = col_guarantee(m, &sol.col_strategy) - row_guarantee(m, &sol.row_strategy);
    let defect = |v: &[T]| {
        let mass: T = v.iter().copied().sum();
        let neg = v.iter().fold(T::zero(), |acc, &x| acc.max(-x));
        (mass - T::one()).abs().max(neg)
    };
    gap.max(T::zero())
        .max(defect(&sol.row_strategy))
        .max(defect(&sol.col_strategy))
}

/// Solves the matrix game by linear programming.
///
/// The matrix is shifted to be strictly positive, after which the column
/// player's problem `max 1ᵀy s.t. M y ≤ 1, y ≥ 0` has a feasible origin.
/// The row strategy is read from the duals.
pub fn solve_matrix_game<T: Scalar>(m: &Matrix<T>) -> Result<MatrixGameSolution<T>> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::InvalidInput(
            "matrix game needs at least one row and column".into(),
        ));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("matrix game has non-finite entries".into()));
    }
    let lo = min_of(m.iter().copied());
    let shift = T::one() - lo;
    let shifted = m.map(|x| x + shift);

    let lp = simplex::maximize(&vec![T::one(); m.cols()], &shifted, &vec![T::one(); m.rows()])?;
    let total = lp.objective;
    if !(total > T::zero()) {
        return Err(Error::InvalidInput("degenerate matrix game LP".into()));
    }
    let col_strategy = normalize(lp.primal.clone());
    let row_strategy = normalize(lp.dual.clone());
    let mut sol = MatrixGameSolution {
        value: T::one() / total - shift,
        row_strategy,
        col_strategy,
        tight_rows: Vec::new(),
        tight_cols: Vec::new(),
    };
    // Rows whose slack left the basis are tight by construction.
    let mut basic_slack = vec![false; m.rows()];
    for v in &lp.basis {
        if let Var::Slack(i) = *v {
            basic_slack[i] = true;
        }
    }
    settle(m, &mut sol);
    for (i, basic) in basic_slack.into_iter().enumerate() {
        if !basic && !sol.tight_rows.contains(&i) {
            sol.tight_rows.push(i);
        }
    }
    sol.tight_rows.sort_unstable();
    Ok(sol)
}

/// Sharpens a raw solution: picks a square set of tight constraints (the
/// supports of both strategies, topped up with the least-slack constraints
/// on the shorter side) and solves the resulting equality systems by
/// Gaussian elimination with partial pivoting.
pub fn refine_solution<T: Scalar>(
    m: &Matrix<T>,
    raw: &MatrixGameSolution<T>,
) -> std::result::Result<MatrixGameSolution<T>, RefineError> {
    if m.rows() == 1 || m.cols() == 1 {
        // one side is pure, the other is the best pure response
        return Ok(raw.clone());
    }
    let supp_tol = T::slack_tolerance();
    let mut rows: Vec<usize> = (0..m.rows()).filter(|&i| raw.row_strategy[i] > supp_tol).collect();
    let mut cols: Vec<usize> = (0..m.cols()).filter(|&j| raw.col_strategy[j] > supp_tol).collect();
    if rows.is_empty() || cols.is_empty() {
        return Err(RefineError::Infeasible);
    }

    let row_payoff = m.mul_vec(&raw.col_strategy);
    let col_payoff = m.vec_mul(&raw.row_strategy);
    let upper = max_of(row_payoff.iter().copied());
    let lower = min_of(col_payoff.iter().copied());
    while rows.len() < cols.len() {
        let next = least_slack(&rows, m.rows(), |i| upper - row_payoff[i]).ok_or(RefineError::Singular)?;
        rows.push(next);
    }
    while cols.len() < rows.len() {
        let next = least_slack(&cols, m.cols(), |j| col_payoff[j] - lower).ok_or(RefineError::Singular)?;
        cols.push(next);
    }
    rows.sort_unstable();
    cols.sort_unstable();

    let k = rows.len();
    // row side: Σ_i p_i M[i][j] - z = 0 for j in cols; Σ p_i = 1
    let a = Matrix::from_fn(k + 1, k + 1, |r, c| match (r < k, c < k) {
        (true, true) => m[(rows[c], cols[r])],
        (true, false) => -T::one(),
        (false, true) => T::one(),
        (false, false) => T::zero(),
    });
    let p = linalg::solve(a, unit_rhs(k)).map_err(|_| RefineError::Singular)?;
    // column side: Σ_j M[i][j] q_j - w = 0 for i in rows; Σ q_j = 1
    let a = Matrix::from_fn(k + 1, k + 1, |r, c| match (r < k, c < k) {
        (true, true) => m[(rows[r], cols[c])],
        (true, false) => -T::one(),
        (false, true) => T::one(),
        (false, false) => T::zero(),
    });
    let q = linalg::solve(a, unit_rhs(k)).map_err(|_| RefineError::Singular)?;

    let neg_tol = T::slack_tolerance();
    if p[..k].iter().chain(&q[..k]).any(|&x| x < -neg_tol || !x.is_finite()) {
        return Err(RefineError::Infeasible);
    }
    let mut row_strategy = vec![T::zero(); m.rows()];
    for (&i, &x) in rows.iter().zip(&p[..k]) {
        row_strategy[i] = x.max(T::zero());
    }
    let mut col_strategy = vec![T::zero(); m.cols()];
    for (&j, &x) in cols.iter().zip(&q[..k]) {
        col_strategy[j] = x.max(T::zero());
    }
    let mut refined = MatrixGameSolution {
        value: raw.value,
        row_strategy: normalize(row_strategy),
        col_strategy: normalize(col_strategy),
        tight_rows: Vec::new(),
        tight_cols: Vec::new(),
    };
    settle(m, &mut refined);
    if certificate_residual(m, &refined) > certificate_residual(m, raw) {
        return Err(RefineError::NoImprovement);
    }
    Ok(refined)
}

/// Solve followed by refinement. When refinement fails, the raw strategies
/// are repaired by moving any missing probability mass onto their most
/// probable action.
pub fn solve_refined<T: Scalar>(m: &Matrix<T>) -> Result<MatrixGameSolution<T>> {
    let raw = solve_matrix_game(m)?;
    Ok(match refine_solution(m, &raw) {
        Ok(refined) => refined,
        Err(_) => {
            let mut sol = raw;
            fill_to_argmax(&mut sol.row_strategy);
            fill_to_argmax(&mut sol.col_strategy);
            settle(m, &mut sol);
            sol
        }
    })
}

/// Clamps negative entries to zero and adds `1 − Σ` to the largest entry.
pub fn fill_to_argmax<T: Scalar>(v: &mut [T]) {
    for x in v.iter_mut() {
        if *x < T::zero() {
            *x = T::zero();
        }
    }
    let best = argmax(v);
    // two passes absorb the rounding of the first correction
    for _ in 0..2 {
        let mass: T = v.iter().copied().sum();
        v[best] += T::one() - mass;
    }
}

fn argmax<T: Scalar>(v: &[T]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

fn normalize<T: Scalar>(mut v: Vec<T>) -> Vec<T> {
    for x in v.iter_mut() {
        if *x < T::zero() {
            *x = T::zero();
        }
    }
    let mass: T = v.iter().copied().sum();
    if mass > T::zero() {
        for x in v.iter_mut() {
            *x /= mass;
        }
    } else {
        let k = T::of(v.len() as f64);
        v.iter_mut().for_each(|x| *x = T::one() / k);
    }
    fill_to_argmax(&mut v);
    v
}

fn unit_rhs<T: Scalar>(k: usize) -> Vec<T> {
    let mut b = vec![T::zero(); k + 1];
    b[k] = T::one();
    b
}

fn least_slack<T: Scalar>(taken: &[usize], len: usize, slack: impl Fn(usize) -> T) -> Option<usize> {
    (0..len)
        .filter(|i| !taken.contains(i))
        .fold(None, |best: Option<(usize, T)>, i| {
            let s = slack(i);
            match best {
                Some((_, b)) if b <= s => best,
                _ => Some((i, s)),
            }
        })
        .map(|(i, _)| i)
}

/// Recomputes value and tight sets from the strategies.
fn settle<T: Scalar>(m: &Matrix<T>, sol: &mut MatrixGameSolution<T>) {
    let row_payoff = m.mul_vec(&sol.col_strategy);
    let col_payoff = m.vec_mul(&sol.row_strategy);
    let upper = max_of(row_payoff.iter().copied());
    let lower = min_of(col_payoff.iter().copied());
    sol.value = (lower + upper) / T::of(2.0);
    let tol = T::slack_tolerance();
    sol.tight_rows = (0..m.rows()).filter(|&i| upper - row_payoff[i] <= tol).collect();
    sol.tight_cols = (0..m.cols()).filter(|&j| col_payoff[j] - lower <= tol).collect();
}
