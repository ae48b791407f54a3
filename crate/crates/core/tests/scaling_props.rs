mod common;

use common::*;
use mixdisc::linalg::orthogonal_complement;
use mixdisc::scaling::{hessian_f, hyperplane_trace_bounds, sinkhorn_balance};
use mixdisc::tuples::{random_conditioned_matrix, random_unit_vector};
use mixdisc::{
    check_doubly_stochastic, eigen_decompose, gradient_f, objective_f, random_tuple, restrict_form,
    scale_to_doubly_stochastic, Error, SolverConfig, SymMatrix,
};
use proptest::prelude::*;
use rand::Rng;

fn centered<R: Rng>(n: usize, spread: f64, rng: &mut R) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-spread..spread)).collect();
    let mean = x.iter().sum::<f64>() / n as f64;
    x.iter_mut().for_each(|v| *v -= mean);
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn objective_is_convex_along_segments(n in 2usize..=8, seed in any::<u64>(), lambda in 0.01f64..0.99) {
        let mut g = rng(seed);
        let t = random_pd_tuple(n, &mut g);
        let x = centered(n, 2.0, &mut g);
        let y = centered(n, 2.0, &mut g);
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        let lhs = objective_f(&t, &mid).unwrap();
        let rhs = lambda * objective_f(&t, &x).unwrap() + (1.0 - lambda) * objective_f(&t, &y).unwrap();
        prop_assert!(lhs <= rhs + 1e-9);
    }

    #[test]
    fn gradient_matches_central_differences(n in 1usize..=7, seed in any::<u64>()) {
        let mut g = rng(seed);
        let t = random_pd_tuple(n, &mut g);
        let x: Vec<f64> = (0..n).map(|_| g.random_range(-1.0..1.0)).collect();
        let grad = gradient_f(&t, &x).unwrap();
        let h = 1e-5;
        for i in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (objective_f(&t, &xp).unwrap() - objective_f(&t, &xm).unwrap()) / (2.0 * h);
            prop_assert!((fd - grad[i]).abs() <= 1e-6, "component {}: {} vs {}", i, fd, grad[i]);
        }
        prop_assert!((grad.iter().sum::<f64>() - n as f64).abs() <= 1e-9);
    }

    #[test]
    fn hessian_matches_gradient_differences(n in 1usize..=6, seed in any::<u64>()) {
        let mut g = rng(seed);
        let t = random_pd_tuple(n, &mut g);
        let x: Vec<f64> = (0..n).map(|_| g.random_range(-1.0..1.0)).collect();
        let hess = hessian_f(&t, &x).unwrap();
        let h = 1e-5;
        for j in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let gp = gradient_f(&t, &xp).unwrap();
            let gm = gradient_f(&t, &xm).unwrap();
            for i in 0..n {
                let fd = (gp[i] - gm[i]) / (2.0 * h);
                prop_assert!((fd - hess[(i, j)]).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn solver_output_satisfies_its_identities(n in 1usize..=12, alpha in 1.0f64..4.0, seed in any::<u64>()) {
        let t = random_tuple(n, alpha, seed).unwrap();
        let cfg = SolverConfig::default();
        let r = scale_to_doubly_stochastic(&t, &cfg).unwrap();
        prop_assert!(r.residual <= cfg.trace_tol);
        prop_assert!(check_doubly_stochastic(&r.scaled, 1e-8).unwrap().passes);
        prop_assert!((r.tau.iter().product::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(r.xi.iter().sum::<f64>().abs() <= 1e-12);
        prop_assert!((2.0 * r.log_det_transform + r.objective).abs() <= 1e-9);
        let det = r.transform.determinant().unwrap();
        prop_assert!((det.abs().ln() - r.log_det_transform).abs() <= 1e-9);
        let grad = gradient_f(&t, &r.xi).unwrap();
        for (gi, b) in grad.iter().zip(r.scaled.iter()) {
            prop_assert!(((b.trace() - 1.0) - (gi - 1.0)).abs() <= 1e-9);
            prop_assert!((gi - 1.0).abs() <= cfg.trace_tol + 1e-12);
        }
    }

    #[test]
    fn accepted_iterates_decrease_the_objective(n in 2usize..=10, alpha in 1.0f64..4.0, seed in any::<u64>()) {
        let t = random_tuple(n, alpha, seed).unwrap();
        let r = scale_to_doubly_stochastic(&t, &SolverConfig::default()).unwrap();
        prop_assert_eq!(r.objective_trace.len(), r.iterations + 1);
        for w in r.objective_trace.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12, "{:?}", r.objective_trace);
        }
    }

    #[test]
    fn hyperplane_restriction_trace_bounds(n in 2usize..=50, target in 1.0f64..4.0, seed in any::<u64>()) {
        let mut g = rng(seed);
        let q = random_conditioned_matrix(n, target, &mut g);
        let q = q.scaled(1.0 / q.trace());
        let eig = eigen_decompose(&q).unwrap();
        let alpha = eig.max() / eig.min();
        let u = random_unit_vector(n, &mut g);
        let tr = restrict_form(&q, &orthogonal_complement(&u).unwrap()).unwrap().trace();
        let (lo, hi) = hyperplane_trace_bounds(n, alpha);
        prop_assert!(lo - 1e-10 <= tr && tr <= hi + 1e-10, "{} not in [{}, {}]", tr, lo, hi);
    }

    #[test]
    fn sinkhorn_output_is_doubly_stochastic(n in 1usize..=10, seed in any::<u64>()) {
        let a = random_matrix(n, n, 0.5, 3.0, &mut rng(seed));
        let b = sinkhorn_balance(&a, 1e-13, 10_000).unwrap();
        for i in 0..n {
            prop_assert!((b.row(i).iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(((0..n).map(|k| b[(k, i)]).sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn singular_member_is_rejected() {
    let mut t = random_tuple(4, 2.0, 1).unwrap();
    t = t.with_slot(2, SymMatrix::diagonal(&[1.0, 1.0, 1.0, 0.0])).unwrap();
    assert!(matches!(
        scale_to_doubly_stochastic(&t, &SolverConfig::default()),
        Err(Error::TupleNotPositiveDefinite { matrix: 2, .. })
    ));
}

#[test]
fn iteration_cap_reports_best_iterate() {
    let t = random_tuple(8, 4.0, 3).unwrap();
    let cfg = SolverConfig {
        trace_tol: 1e-300,
        max_iterations: 2,
        ..SolverConfig::default()
    };
    match scale_to_doubly_stochastic(&t, &cfg) {
        Err(Error::NoConvergence { best }) => {
            assert_eq!(best.xi.len(), 8);
            assert!(best.residual.is_finite());
        }
        other => panic!("expected NoConvergence, got {other:?}"),
    }
}
