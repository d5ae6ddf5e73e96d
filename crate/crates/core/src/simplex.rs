//! Dense tableau simplex for linear programs of the form
//!
//! ```text
//! maximize   cᵀx
//! subject to A x ≤ b,  x ≥ 0,   with b ≥ 0
//! ```
//!
//! The origin is always feasible, so a single phase suffices. Pivoting uses
//! Bland's rule (lowest eligible index on entry and on ratio ties), which
//! makes every solve deterministic and cycle-free.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Index of a tableau column: either an original variable or a slack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Structural(usize),
    Slack(usize),
}

#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub objective: T,
    /// Primal values of the structural variables.
    pub primal: Vec<T>,
    /// Dual values, one per constraint row.
    pub dual: Vec<T>,
    /// Basic variable of each constraint row at the optimum.
    pub basis: Vec<Var>,
    pub pivots: usize,
}

pub fn maximize<T: Scalar>(c: &[T], a: &Matrix<T>, b: &[T]) -> Result<LpSolution<T>> {
    let m = a.rows();
    let n = a.cols();
    if c.len() != n || b.len() != m {
        return Err(Error::InvalidInput("LP dimensions do not agree".into()));
    }
    if b.iter().any(|&x| x < T::zero() || !x.is_finite()) {
        return Err(Error::InvalidInput(
            "LP right-hand side must be finite and non-negative".into(),
        ));
    }

    let width = n + m + 1;
    let rhs = n + m;
    // rows 0..m are constraints, row m is the objective (reduced costs)
    let mut t = Matrix::zeros(m + 1, width);
    for i in 0..m {
        for j in 0..n {
            t[(i, j)] = a[(i, j)];
        }
        t[(i, n + i)] = T::one();
        t[(i, rhs)] = b[i];
    }
    for j in 0..n {
        t[(m, j)] = c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let eps = T::pivot_tolerance().sqrt() * T::of(1e-3);
    let mut pivots = 0usize;
    let max_pivots = 50 * (n + m).max(1) * (n + m).max(1);
    while let Some(enter) = (0..n + m).find(|&j| t[(m, j)] > eps) {
        let mut leave: Option<(usize, T)> = None;
        for i in 0..m {
            let coef = t[(i, enter)];
            if coef > eps {
                let ratio = t[(i, rhs)] / coef;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        if ratio < best || (ratio == best && basis[i] < basis[r]) {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
        }
        let Some((row, _)) = leave else {
            return Err(Error::Unbounded);
        };
        pivot(&mut t, row, enter);
        basis[row] = enter;
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::InvalidInput("simplex exceeded its pivot budget".into()));
        }
    }

    let mut primal = vec![T::zero(); n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            primal[var] = t[(i, rhs)].max(T::zero());
        }
    }
    // objective row holds c - yᵀA over structurals and -y over slacks
    let dual = (0..m).map(|i| (-t[(m, n + i)]).max(T::zero())).collect();
    let objective = -t[(m, rhs)];
    let basis = basis
        .into_iter()
        .map(|v| if v < n { Var::Structural(v) } else { Var::Slack(v - n) })
        .collect();
    Ok(LpSolution {
        objective,
        primal,
        dual,
        basis,
        pivots,
    })
}

fn pivot<T: Scalar>(t: &mut Matrix<T>, row: usize, col: usize) {
    let width = t.cols();
    let inv = T::one() / t[(row, col)];
    for j in 0..width {
        t[(row, j)] *= inv;
    }
    t[(row, col)] = T::one();
    for i in 0..t.rows() {
        if i == row {
            continue;
        }
        let factor = t[(i, col)];
        if factor == T::zero() {
            continue;
        }
        for j in 0..width {
            let delta = factor * t[(row, j)];
            t[(i, j)] -= delta;
        }
        t[(i, col)] = T::zero();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_example() {
        // max 3x + 5y  s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18
        let a = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]]).unwrap();
        let sol: LpSolution<f64> = maximize(&[3.0, 5.0], &a, &[4.0, 12.0, 18.0]).unwrap();
        assert!((sol.objective - 36.0).abs() < 1e-12);
        assert!((sol.primal[0] - 2.0).abs() < 1e-12);
        assert!((sol.primal[1] - 6.0).abs() < 1e-12);
        // strong duality
        let dual_obj: f64 = sol.dual.iter().zip([4.0, 12.0, 18.0]).map(|(y, b)| y * b).sum();
        assert!((dual_obj - 36.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_is_reported() {
        let a = Matrix::from_rows(&[vec![1.0, -1.0]]).unwrap();
        assert!(matches!(maximize(&[1.0, 1.0], &a, &[1.0]), Err(Error::Unbounded)));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // classic Beale-style degeneracy; Bland's rule must not cycle
        let a = Matrix::from_rows(&[
            vec![0.25, -8.0, -1.0, 9.0],
            vec![0.5, -12.0, -0.5, 3.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        let sol: LpSolution<f64> = maximize(&[0.75, -20.0, 0.5, -6.0], &a, &[0.0, 0.0, 1.0]).unwrap();
        assert!((sol.objective - 1.25).abs() < 1e-12);
    }
}
