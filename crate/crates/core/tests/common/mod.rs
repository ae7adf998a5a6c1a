#![allow(dead_code)]

use ndarray::Array2;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use simplexopt::{QuadraticObjective, SimplexPoint};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random feasible point whose support has between 1 and n entries.
pub fn random_point<R: Rng>(rng: &mut R, n: usize) -> SimplexPoint {
    let k = rng.random_range(1..=n);
    let support = sample(rng, n, k);
    let mut x = vec![0.0; n];
    for i in support.iter() {
        x[i] = -rng.random::<f64>().max(1e-300).ln();
    }
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
    SimplexPoint::new(x).unwrap()
}

/// Random point with full support.
pub fn random_interior_point<R: Rng>(rng: &mut R, n: usize) -> SimplexPoint {
    let mut x: Vec<f64> = (0..n)
        .map(|_| -rng.random::<f64>().max(1e-300).ln())
        .collect();
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
    SimplexPoint::new(x).unwrap()
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize, scale: f64) -> Vec<f64> {
    (0..n)
        .map(|_| scale * rng.random_range(-1.0..1.0))
        .collect()
}

pub fn random_symmetric<R: Rng>(rng: &mut R, n: usize) -> Array2<f64> {
    let mut q = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v: f64 = StandardNormal.sample(rng);
            q[[i, j]] = v;
            q[[j, i]] = v;
        }
    }
    q
}

/// `BᵀB/n + I` with Gaussian `B`: symmetric positive definite.
pub fn random_spd<R: Rng>(rng: &mut R, n: usize) -> Array2<f64> {
    let b = Array2::from_shape_fn((n, n), |_| StandardNormal.sample(rng));
    b.t().dot(&b) / n as f64 + Array2::<f64>::eye(n)
}

/// Spectral norm through an independent symmetric eigen-solver.
pub fn exact_spectral_norm(q: &Array2<f64>) -> f64 {
    let n = q.nrows();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| q[[i, j]]);
    m.symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn random_quadratic<R: Rng>(rng: &mut R, n: usize, exact_l: bool) -> QuadraticObjective {
    let q = random_symmetric(rng, n);
    let c = random_vector(rng, n, 1.0);
    let obj = QuadraticObjective::new(q.clone(), c).unwrap();
    if exact_l {
        obj.with_lipschitz(exact_spectral_norm(&q).max(1e-12))
            .unwrap()
    } else {
        obj
    }
}

pub fn gap_oracle(x: &[f64], g: &[f64]) -> f64 {
    // max over vertices of -gᵀ(eᵢ - x), floored at zero
    let gx: f64 = x.iter().zip(g).map(|(a, b)| a * b).sum();
    (0..x.len())
        .map(|i| (gx - g[i]).max(0.0))
        .fold(0.0, f64::max)
}
