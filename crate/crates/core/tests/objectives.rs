mod common;

use common::{exact_spectral_norm, random_interior_point, random_point, random_symmetric, rng};
use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use simplexopt::objectives::check_gradient;
use simplexopt::{ChebyshevObjective, Objective, QuadraticObjective};

#[test]
fn quadratic_gradients_match_central_differences() {
    let mut r = rng(11);
    for _ in 0..100 {
        let n = r.random_range(2..=30);
        let obj = common::random_quadratic(&mut r, n, false);
        let x = random_interior_point(&mut r, n);
        let err = check_gradient(&obj, &x, 1e-6);
        assert!(err <= 1e-6, "quadratic gradient error {err:e}");
    }
}

#[test]
fn chebyshev_gradients_match_central_differences() {
    let mut r = rng(12);
    for _ in 0..100 {
        let n = r.random_range(1..=30);
        let m = r.random_range(1..=10);
        let a = Array2::from_shape_fn((m, n), |_| StandardNormal.sample(&mut r));
        let obj = ChebyshevObjective::new(a).unwrap();
        let x = random_point(&mut r, n);
        let err = check_gradient(&obj, &x, 1e-6);
        assert!(err <= 1e-5, "chebyshev gradient error {err:e}");
    }
}

#[test]
fn chebyshev_matches_explicit_gram_formulation() {
    let mut r = rng(13);
    for _ in 0..20 {
        let n = r.random_range(1..=50);
        let m = r.random_range(1..=12);
        let a = Array2::from_shape_fn((m, n), |_| StandardNormal.sample(&mut r));
        let gram = a.t().dot(&a);
        let b: Array1<f64> = gram.diag().to_owned();
        let obj = ChebyshevObjective::new(a).unwrap();
        let x = random_point(&mut r, n);
        let xv = Array1::from(x.to_vec());
        let value = xv.dot(&gram.dot(&xv)) - b.dot(&xv);
        let grad = gram.dot(&xv) * 2.0 - &b;
        let (f, g) = obj.value_and_gradient(&x);
        assert!((f - value).abs() <= 1e-10);
        for (u, v) in g.iter().zip(grad.iter()) {
            assert!((u - v).abs() <= 1e-10);
        }
        for (u, v) in obj.b().iter().zip(b.iter()) {
            assert!((u - v).abs() <= 1e-10);
        }
    }
}

#[test]
fn lipschitz_estimate_brackets_spectral_norm() {
    let mut r = rng(14);
    let mut cases: Vec<Array2<f64>> = vec![
        Array2::from_diag(&Array1::from(vec![1.0, 2.0, 3.0])),
        Array2::from_diag(&Array1::from(vec![-4.0, 0.5, 3.9])),
        Array2::eye(5),
    ];
    for _ in 0..40 {
        let n = r.random_range(2..=10);
        cases.push(random_symmetric(&mut r, n));
    }
    for _ in 0..10 {
        cases.push(common::random_spd(&mut r, 30));
    }
    for (seed, q) in cases.into_iter().enumerate() {
        let n = q.nrows();
        let exact = exact_spectral_norm(&q);
        let obj = QuadraticObjective::with_seed(q, vec![0.0; n], seed as u64).unwrap();
        let l = obj.lipschitz();
        assert!(
            l >= exact,
            "case {seed}: estimate {l} below spectral norm {exact}"
        );
        assert!(
            l <= 1.05 * exact,
            "case {seed}: estimate {l} too loose for {exact}"
        );
    }
}

#[test]
fn chebyshev_lipschitz_is_twice_gram_norm() {
    let mut r = rng(15);
    for seed in 0..10 {
        let a = Array2::from_shape_fn((4, 9), |_| StandardNormal.sample(&mut r));
        let exact = 2.0 * exact_spectral_norm(&a.t().dot(&a));
        let obj = ChebyshevObjective::with_seed(a, seed).unwrap();
        assert!(obj.lipschitz() >= exact && obj.lipschitz() <= 1.05 * exact);
    }
}

#[test]
fn lipschitz_estimate_is_deterministic_per_seed() {
    let mut r = rng(16);
    let q = random_symmetric(&mut r, 12);
    let a = QuadraticObjective::with_seed(q.clone(), vec![0.0; 12], 3).unwrap();
    let b = QuadraticObjective::with_seed(q, vec![0.0; 12], 3).unwrap();
    assert_eq!(a.lipschitz().to_bits(), b.lipschitz().to_bits());
}
