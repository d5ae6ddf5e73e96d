mod common;

use cmpg::{
    certificate_residual, col_guarantee, refine_solution, row_guarantee, solve_refined, Matrix, MatrixGameSolution,
};
use proptest::prelude::*;

fn mat(rows: &[Vec<f64>]) -> Matrix<f64> {
    Matrix::from_rows(rows).unwrap()
}

fn dense(m: &Matrix<f64>) -> common::Dense {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn assert_valid(m: &Matrix<f64>, sol: &MatrixGameSolution<f64>) {
    for strat in [&sol.row_strategy, &sol.col_strategy] {
        let mass: f64 = strat.iter().sum();
        assert!((mass - 1.0).abs() <= 1e-9, "mass {mass}");
        assert!(strat.iter().all(|&p| p >= 0.0));
    }
    assert!(row_guarantee(m, &sol.row_strategy) >= sol.value - 1e-7);
    assert!(col_guarantee(m, &sol.col_strategy) <= sol.value + 1e-7);
}

fn matrix_strategy(max_dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_dim, 1..=max_dim)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-10.0..10.0f64, c), r))
}

#[test]
fn rock_paper_scissors() {
    let m = mat(&[vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]]);
    let sol = solve_refined(&m).unwrap();
    assert!(sol.value.abs() < 1e-12);
    for p in sol.row_strategy.iter().chain(&sol.col_strategy) {
        assert!((p - 1.0 / 3.0).abs() < 1e-12);
    }
}

#[test]
fn two_by_two_matches_closed_form() {
    // value = (ad − bc)/(a + d − b − c) for a fully mixed 2×2 game
    let m = mat(&[vec![3.0, 1.0], vec![0.0, 2.0]]);
    let sol = solve_refined(&m).unwrap();
    let (a, b, c, d) = (3.0, 1.0, 0.0, 2.0);
    let den = a + d - b - c;
    assert!((sol.value - (a * d - b * c) / den).abs() < 1e-12);
    assert!((sol.row_strategy[0] - (d - c) / den).abs() < 1e-12);
    assert!((sol.col_strategy[0] - (d - b) / den).abs() < 1e-12);
    assert_valid(&m, &sol);
}

#[test]
fn refinement_restores_unit_mass() {
    let m = mat(&[vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]]);
    let third = 0.999999 / 3.0;
    let raw = MatrixGameSolution {
        value: 0.0,
        row_strategy: vec![third; 3],
        col_strategy: vec![third; 3],
        tight_rows: vec![0, 1, 2],
        tight_cols: vec![0, 1, 2],
    };
    let refined = refine_solution(&m, &raw).unwrap();
    for strat in [&refined.row_strategy, &refined.col_strategy] {
        assert!((strat.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(strat.iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-15));
    }
}

#[test]
fn one_by_one_is_left_alone() {
    let m = mat(&[vec![5.0]]);
    let raw = solve_refined(&m).unwrap();
    assert_eq!(raw.value, 5.0);
    assert_eq!(refine_solution(&m, &raw).unwrap(), raw);
}

#[test]
fn grid_oracle_agrees_on_fixed_cases() {
    for rows in [
        vec![vec![3.0, 1.0], vec![0.0, 2.0]],
        vec![vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]],
        vec![vec![2.0, -1.0, 0.5], vec![-0.3, 0.7, 1.0], vec![0.1, 0.2, -2.0]],
    ] {
        let m = mat(&rows);
        let v = solve_refined(&m).unwrap().value;
        assert!((v - common::grid_value(&rows, 1000)).abs() <= 2e-3 * 3.0);
        assert!((v - common::matrix_value(&rows)).abs() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn certificate_and_oracle(rows in matrix_strategy(5)) {
        let m = mat(&rows);
        let sol = solve_refined(&m).unwrap();
        assert_valid(&m, &sol);
        prop_assert!(certificate_residual(&m, &sol) <= 1e-7);
        prop_assert!((sol.value - common::matrix_value(&dense(&m))).abs() <= 1e-7);
    }

    #[test]
    fn transpose_negation(rows in matrix_strategy(5)) {
        let m = mat(&rows);
        let neg_t = m.transpose().map(|x| -x);
        let v = solve_refined(&m).unwrap().value;
        let w = solve_refined(&neg_t).unwrap().value;
        prop_assert!((v + w).abs() <= 1e-7);
    }

    #[test]
    fn shift_moves_value(rows in matrix_strategy(4), k in -50.0..50.0f64) {
        let m = mat(&rows);
        let a = solve_refined(&m).unwrap();
        let b = solve_refined(&m.map(|x| x + k)).unwrap();
        prop_assert!((b.value - a.value - k).abs() <= 1e-9 * (1.0 + k.abs()));
        // the shifted strategies are still optimal for the original matrix
        prop_assert!(row_guarantee(&m, &b.row_strategy) >= a.value - 1e-7);
        prop_assert!(col_guarantee(&m, &b.col_strategy) <= a.value + 1e-7);
    }

    #[test]
    fn saddle_point_value(rows in matrix_strategy(4)) {
        let m = mat(&rows);
        let maximin = (0..m.rows()).map(|i| m.row(i).iter().copied().fold(f64::INFINITY, f64::min)).fold(f64::NEG_INFINITY, f64::max);
        let t = m.transpose();
        let minimax = (0..t.rows()).map(|j| t.row(j).iter().copied().fold(f64::NEG_INFINITY, f64::max)).fold(f64::INFINITY, f64::min);
        let v = solve_refined(&m).unwrap().value;
        prop_assert!(maximin - 1e-9 <= v && v <= minimax + 1e-9);
        if maximin == minimax {
            prop_assert!((v - maximin).abs() <= 1e-9);
        }
    }

    #[test]
    fn single_precision_tracks_double(rows in matrix_strategy(3)) {
        let m = mat(&rows);
        let m32: Matrix<f32> = Matrix::from_rows(&rows.iter().map(|r| r.iter().map(|&x| x as f32).collect()).collect::<Vec<_>>()).unwrap();
        let v = solve_refined(&m).unwrap().value;
        let v32 = solve_refined(&m32).unwrap().value;
        prop_assert!((v - v32 as f64).abs() <= 1e-3);
    }
}
