//! Seeded instance generators: non-convex quadratics with a planted stationary
//! point, and Chebyshev-center problems over Gaussian point clouds.

use nalgebra::DMatrix;
use ndarray::Array2;
use rand::seq::index::sample;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use simplexopt::active_set::multipliers;
use simplexopt::{
    stationarity_gap, ChebyshevObjective, Objective, QuadraticObjective, SimplexPoint,
};

use crate::BenchError;

/// Largest accepted stationarity gap at the planted point.
pub const PLANTED_GAP_TOL: f64 = 1e-10;
/// Smallest accepted multiplier on the planted zero set.
pub const COMPLEMENTARITY_MARGIN: f64 = 1e-3;
/// Regeneration attempts before giving up on a seed.
pub const MAX_ATTEMPTS: u64 = 32;

/// Independent 64-bit seed for stream `stream` of `seed`.
pub fn sub_seed(seed: u64, stream: u64) -> u64 {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r.next_u64()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadGenConfig {
    pub n: usize,
    pub rho: f64,
    /// Weight of the positive definite part of `Q`.
    pub theta: f64,
    pub seed: u64,
}

impl QuadGenConfig {
    pub fn new(n: usize, rho: f64, seed: u64) -> Self {
        QuadGenConfig {
            n,
            rho,
            theta: 0.5,
            seed,
        }
    }

    /// Number of nonzeros of the planted point.
    pub fn support_size(&self) -> usize {
        (self.rho * self.n as f64).round() as usize
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.n == 0 {
            return Err(BenchError::Config("n must be positive".into()));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(BenchError::Config(format!(
                "rho must lie in (0, 1), got {}",
                self.rho
            )));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(BenchError::Config(format!(
                "theta must lie in (0, 1], got {}",
                self.theta
            )));
        }
        if self.support_size() == 0 {
            return Err(BenchError::Config(format!(
                "round(rho * n) is zero for rho={} n={}",
                self.rho, self.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChebGenConfig {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

impl ChebGenConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.n == 0 || self.m == 0 {
            return Err(BenchError::Config(format!(
                "need n, m >= 1, got n={} m={}",
                self.n, self.m
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PlantedQuadratic {
    pub objective: QuadraticObjective,
    pub planted: SimplexPoint,
    /// Sorted indices where the planted point is zero.
    pub zero_set: Vec<usize>,
    /// Seed that produced the accepted instance.
    pub accepted_seed: u64,
    pub attempts: u64,
}

impl PlantedQuadratic {
    pub fn planted_value(&self) -> f64 {
        self.objective.value(&self.planted)
    }

    /// Smallest curvature of `Q` along the face spanned by the planted
    /// support. Positive means the planted point is a strict local minimizer.
    pub fn face_curvature(&self) -> f64 {
        let support = self.planted.support();
        face_curvature(self.objective.q(), &support)
    }
}

/// Smallest eigenvalue of `Q_SS` restricted to `{d : Σ d = 0}`; `+∞` when the
/// face is a single vertex.
pub fn face_curvature(q: &Array2<f64>, support: &[usize]) -> f64 {
    let t = support.len();
    if t < 2 {
        return f64::INFINITY;
    }
    // Orthonormal basis of the sum-zero subspace: Gram-Schmidt on e_k − e_{k+1}.
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(t - 1);
    for k in 0..t - 1 {
        let mut v = vec![0.0; t];
        v[k] = 1.0;
        v[k + 1] = -1.0;
        for b in &basis {
            let p: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        basis.push(v);
    }
    let z = DMatrix::from_fn(t, t - 1, |i, j| basis[j][i]);
    let qs = DMatrix::from_fn(t, t, |i, j| q[[support[i], support[j]]]);
    let h = z.transpose() * qs * &z;
    let h = (&h + h.transpose()) * 0.5;
    h.symmetric_eigenvalues().min()
}

/// Gap and smallest zero-set multiplier of the planted point.
pub fn planted_certificate(
    obj: &QuadraticObjective,
    planted: &[f64],
) -> Result<(f64, f64), BenchError> {
    let g = obj.gradient(planted);
    let gap = stationarity_gap(planted, &g)?;
    let mu = multipliers(planted, &g)?.mu;
    let margin = planted
        .iter()
        .zip(&mu)
        .filter(|(x, _)| **x == 0.0)
        .map(|(_, m)| *m)
        .fold(f64::INFINITY, f64::min);
    Ok((gap, margin))
}

fn draw_quadratic(
    cfg: &QuadGenConfig,
    seed: u64,
) -> Result<(QuadraticObjective, SimplexPoint), BenchError> {
    let n = cfg.n;
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let b = Array2::from_shape_fn((n, n), |_| StandardNormal.sample(&mut r));
    let mut p = b.t().dot(&b) / n as f64;
    p.diag_mut().mapv_inplace(|v| v + 1.0);
    let u = Array2::from_shape_fn((n, n), |_| r.random_range(-1.0..1.0));
    let s = (&u + &u.t()) * 0.5;
    let mut q = p * cfg.theta + s * (1.0 - cfg.theta);
    // Exact symmetry after rounding.
    for i in 0..n {
        for j in 0..i {
            q[[j, i]] = q[[i, j]];
        }
    }

    let support = sample(&mut r, n, cfg.support_size()).into_vec();
    let mut x = vec![0.0; n];
    for &i in &support {
        x[i] = r.random::<f64>();
    }
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    let planted = SimplexPoint::new(x)?;

    let rvec: Vec<f64> = planted
        .iter()
        .map(|&v| {
            if v > 0.0 {
                1.0
            } else {
                1.0 + r.random_range(COMPLEMENTARITY_MARGIN..1.0)
            }
        })
        .collect();
    let qx = q.dot(&ndarray::ArrayView1::from(planted.as_slice()));
    let c: Vec<f64> = qx.iter().zip(&rvec).map(|(a, b)| a - b).collect();
    let obj = QuadraticObjective::with_seed(q, c, seed)?;
    Ok((obj, planted))
}

/// Quadratic `½xᵀQx − cᵀx` whose planted point is stationary with strictly
/// positive multipliers on its zero set.
pub fn gen_quadratic(cfg: &QuadGenConfig) -> Result<PlantedQuadratic, BenchError> {
    cfg.validate()?;
    for attempt in 0..MAX_ATTEMPTS {
        let seed = if attempt == 0 {
            cfg.seed
        } else {
            sub_seed(cfg.seed, attempt)
        };
        let (objective, planted) = draw_quadratic(cfg, seed)?;
        let (gap, margin) = planted_certificate(&objective, &planted)?;
        if gap <= PLANTED_GAP_TOL && margin >= COMPLEMENTARITY_MARGIN {
            let zero_set = (0..cfg.n).filter(|&i| planted[i] == 0.0).collect();
            return Ok(PlantedQuadratic {
                objective,
                planted,
                zero_set,
                accepted_seed: seed,
                attempts: attempt + 1,
            });
        }
    }
    Err(BenchError::Generator(format!(
        "no verified instance after {MAX_ATTEMPTS} attempts (seed {})",
        cfg.seed
    )))
}

/// Chebyshev-center objective over `n` standard normal points in `R^m`.
pub fn gen_chebyshev(cfg: &ChebGenConfig) -> Result<ChebyshevObjective, BenchError> {
    cfg.validate()?;
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    let a = Array2::from_shape_fn((cfg.m, cfg.n), |_| StandardNormal.sample(&mut r));
    Ok(ChebyshevObjective::with_seed(a, cfg.seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_size_rounds() {
        assert_eq!(QuadGenConfig::new(20, 0.1, 0).support_size(), 2);
        assert_eq!(QuadGenConfig::new(512, 0.15, 0).support_size(), 77);
        assert!(QuadGenConfig::new(4, 0.1, 0).validate().is_err());
    }

    #[test]
    fn small_instance_has_planted_structure() {
        let g = gen_quadratic(&QuadGenConfig::new(20, 0.1, 7)).unwrap();
        assert_eq!(g.planted.support().len(), 2);
        assert_eq!(g.zero_set.len(), 18);
        let grad = g.objective.gradient(&g.planted);
        for i in 0..20 {
            if g.planted[i] > 0.0 {
                assert!((grad[i] - 1.0).abs() <= 1e-12);
            } else {
                assert!(grad[i] > 1.0);
            }
        }
    }

    #[test]
    fn face_curvature_of_known_matrices() {
        let q = Array2::from_diag(&ndarray::arr1(&[1.0, 3.0, -5.0]));
        // On {0, 1}: d = (1, -1)/√2 gives (1 + 3)/2.
        assert!((face_curvature(&q, &[0, 1]) - 2.0).abs() <= 1e-12);
        assert!(face_curvature(&q, &[0, 1, 2]) < 0.0);
        assert_eq!(face_curvature(&q, &[2]), f64::INFINITY);
    }

    #[test]
    fn sub_seeds_differ() {
        assert_ne!(sub_seed(1, 1), sub_seed(1, 2));
        assert_ne!(sub_seed(1, 1), sub_seed(2, 1));
        assert_eq!(sub_seed(5, 3), sub_seed(5, 3));
    }
}
