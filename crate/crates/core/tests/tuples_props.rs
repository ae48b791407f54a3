mod common;

use common::*;
use mixdisc::tuples::{random_orthogonal, random_unit_vector};
use mixdisc::{alpha_of, check_doubly_stochastic, eigen_decompose, from_matrix_rows, random_tuple, restrict_tuple};
use mixdisc::{Matrix, MatrixTuple};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diagonal_embedding_of_doubly_stochastic_matrix_passes(n in 1usize..=8, seed in any::<u64>()) {
        let a = random_birkhoff(n, 4, &mut rng(seed));
        prop_assert!(check_doubly_stochastic(&from_matrix_rows(&a).unwrap(), 1e-12).unwrap().passes);
    }

    #[test]
    fn passing_diagonal_tuple_has_doubly_stochastic_rows(n in 1usize..=8, seed in any::<u64>(), skew in 0.0f64..0.3) {
        let mut a = random_birkhoff(n, 4, &mut rng(seed));
        a[(0, 0)] += skew;
        let passes = check_doubly_stochastic(&from_matrix_rows(&a).unwrap(), 1e-12).unwrap().passes;
        let rows_ok = (0..n).all(|i| (a.row(i).iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let cols_ok = (0..n).all(|j| ((0..n).map(|i| a[(i, j)]).sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert_eq!(passes, rows_ok && cols_ok);
    }

    #[test]
    fn alpha_is_invariant_under_common_orthogonal_conjugation(n in 1usize..=8, alpha in 1.0f64..5.0, seed in any::<u64>()) {
        let t = random_tuple(n, alpha, seed).unwrap();
        let u = random_orthogonal(n, &mut rng(seed ^ 0x5eed));
        let conj = MatrixTuple::new(t.iter().map(|q| q.congruence(&u).unwrap()).collect()).unwrap();
        let a = alpha_of(&t).unwrap().alpha;
        let b = alpha_of(&conj).unwrap().alpha;
        prop_assert!((a - b).abs() <= 1e-9 * a);
        prop_assert!(a <= alpha);
    }

    #[test]
    fn restriction_drops_one_dimension_and_keeps_definiteness(n in 2usize..=8, seed in any::<u64>()) {
        let mut g = rng(seed);
        let t = random_pd_tuple(n, &mut g);
        let u = random_unit_vector(n, &mut g);
        let r = restrict_tuple(&t, &u).unwrap();
        prop_assert_eq!(r.n(), n - 1);
        for q in r.iter() {
            prop_assert_eq!(q.dim(), n - 1);
            prop_assert!(eigen_decompose(q).unwrap().min() > 0.0);
        }
    }

    #[test]
    fn generator_is_deterministic_per_seed(n in 1usize..=6, alpha in 1.0f64..4.0, seed in any::<u64>()) {
        prop_assert_eq!(random_tuple(n, alpha, seed).unwrap(), random_tuple(n, alpha, seed).unwrap());
    }
}

#[test]
fn non_square_embedding_is_rejected() {
    assert!(from_matrix_rows(&Matrix::zeros(2, 3)).is_err());
}
