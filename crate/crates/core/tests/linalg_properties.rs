mod common;

use proptest::prelude::*;

use common::{integer_rank, lift};
use koszulkit_core::linalg::{Matrix, Subspace};
use koszulkit_core::{Field, PrimeField, Rationals};

fn matrix_strategy(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        // Small entries with many zeros, so rank deficiency is common.
        prop::collection::vec(prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -3i64..=3], c), r)
    })
}

fn to_matrix<F: Field>(f: &F, rows: &[Vec<i64>]) -> Matrix<F> {
    Matrix::from_rows(f, rows[0].len(), &lift(f, rows))
}

/// Rank modulo `p` by plain elimination over `u64`.
fn rank_mod_p(rows: &[Vec<i64>], p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
        .collect();
    let cols = m[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(rank, piv);
        let inv = (1..p).find(|&x| x * m[rank][c] % p == 1).unwrap();
        for i in 0..m.len() {
            if i != rank && m[i][c] != 0 {
                let factor = m[i][c] * inv % p;
                for j in 0..cols {
                    m[i][j] = (m[i][j] + p * p - factor * m[rank][j] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn check_matrix<F: Field>(f: &F, rows: &[Vec<i64>], oracle_rank: usize) -> Result<(), TestCaseError> {
    let m = to_matrix(f, rows);
    let rank = m.rank();
    prop_assert_eq!(rank, oracle_rank);
    prop_assert_eq!(m.transpose().rank(), rank);
    let kernel = m.kernel();
    prop_assert_eq!(rank + kernel.dim(), m.cols());
    for v in kernel.basis() {
        prop_assert!(f.is_zero_vec(&m.mul_vec(v)));
    }
    let r = m.rref();
    let again = r.matrix.rref();
    prop_assert_eq!(&again.pivots, &r.pivots);
    for i in 0..m.rows() {
        prop_assert_eq!(again.matrix.row(i), r.matrix.row(i));
    }
    prop_assert_eq!(m.image().dim(), rank);
    Ok(())
}

fn check_grassmann<F: Field>(f: &F, a: &[Vec<i64>], b: &[Vec<i64>]) -> Result<(), TestCaseError> {
    let n = a[0].len();
    let u = Subspace::span(f, n, lift(f, a));
    let w = Subspace::span(f, n, lift(f, b));
    let sum = u.sum(&w).unwrap();
    let cap = u.intersect(&w).unwrap();
    prop_assert_eq!(sum.dim() + cap.dim(), u.dim() + w.dim());
    prop_assert!(cap.is_subspace_of(&u) && cap.is_subspace_of(&w));
    prop_assert!(u.is_subspace_of(&sum) && w.is_subspace_of(&sum));
    for v in u.basis() {
        prop_assert!(f.is_zero_vec(&w.reduce(v)) == w.contains(v));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rank_nullity_and_rref_over_q(rows in matrix_strategy(6, 7)) {
        check_matrix(&Rationals, &rows, integer_rank(&rows))?;
    }

    #[test]
    fn rank_nullity_and_rref_over_f7(rows in matrix_strategy(6, 7)) {
        check_matrix(&PrimeField::new(7).unwrap(), &rows, rank_mod_p(&rows, 7))?;
    }

    #[test]
    fn grassmann_formula(
        (a, b) in (1usize..=6).prop_flat_map(|n| (
            prop::collection::vec(prop::collection::vec(-2i64..=2, n), 1..=5),
            prop::collection::vec(prop::collection::vec(-2i64..=2, n), 1..=5),
        ))
    ) {
        check_grassmann(&Rationals, &a, &b)?;
        check_grassmann(&PrimeField::new(5).unwrap(), &a, &b)?;
    }

    #[test]
    fn solve_returns_a_solution(rows in matrix_strategy(5, 5), rhs_seed in prop::collection::vec(-3i64..=3, 5)) {
        let f = Rationals;
        let m = to_matrix(&f, &rows);
        // A right-hand side in the image must be solvable.
        let x: Vec<_> = rhs_seed.iter().take(m.cols()).map(|&c| f.from_i64(c)).chain(std::iter::repeat(f.zero())).take(m.cols()).collect();
        let b = m.mul_vec(&x);
        let y = m.solve(&b).expect("b lies in the image");
        prop_assert_eq!(m.mul_vec(&y), b);
    }
}
