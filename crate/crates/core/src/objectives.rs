//! Objective functions over the simplex.
//!
//! Every objective exposes its value, gradient and an upper bound `L` on the
//! Lipschitz constant of its gradient. Two concrete families are provided:
//! indefinite quadratics `½xᵀQx - cᵀx` and the Chebyshev-center (minimum
//! enclosing ball) dual `‖Ax‖² - bᵀx` with `bᵢ = ‖cᵢ‖²`.

use ndarray::{Array2, ArrayView1};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_dim, Error, Result};
use crate::vector::{dot, norm_sq};

/// Smallest Lipschitz constant handed to the active-set machinery.
pub const LIPSCHITZ_FLOOR: f64 = 1e-12;
/// Multiplicative safety factor applied to power-iteration estimates.
pub const LIPSCHITZ_SAFETY: f64 = 1.01;
const POWER_MAX_ITERS: usize = 100;
const POWER_REL_TOL: f64 = 1e-8;

/// Where an objective's Lipschitz constant came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LipschitzSource {
    /// Supplied by the caller as the exact constant.
    Exact,
    /// Power-iteration estimate scaled by [`LIPSCHITZ_SAFETY`].
    Estimated,
    /// Supplied by the caller for a black-box objective.
    Supplied,
}

impl LipschitzSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            LipschitzSource::Exact => "exact",
            LipschitzSource::Estimated => "estimated",
            LipschitzSource::Supplied => "supplied",
        }
    }
}

/// Evaluation contract for a continuously differentiable function on the simplex.
///
/// Implementations assume `x.len() == self.dim()`; the solver validates the
/// starting point once and keeps every iterate at that dimension.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        (self.value(x), self.gradient(x))
    }

    /// Upper bound on the Lipschitz constant of the gradient over the simplex.
    fn lipschitz(&self) -> f64;

    /// `dᵀ∇²f d` when the Hessian is constant, `None` otherwise.
    fn curvature(&self, _d: &[f64]) -> Option<f64> {
        None
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (**self).gradient(x)
    }
    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        (**self).value_and_gradient(x)
    }
    fn lipschitz(&self) -> f64 {
        (**self).lipschitz()
    }
    fn curvature(&self, d: &[f64]) -> Option<f64> {
        (**self).curvature(d)
    }
}

/// Power iteration for the spectral norm of a symmetric linear operator of size `n`.
///
/// Runs at most 100 iterations or until the relative change of the estimate
/// drops below 1e-8, then returns the estimate times 1.01, floored at 1e-12.
pub fn estimate_lipschitz<F>(apply: F, n: usize, seed: u64) -> Result<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if n == 0 {
        return Ok(LIPSCHITZ_FLOOR);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let nv = norm_sq(&v).sqrt();
    v.iter_mut().for_each(|x| *x /= nv);

    let mut estimate = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        let w = apply(&v);
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("operator in power iteration"));
        }
        let norm = norm_sq(&w).sqrt();
        if norm == 0.0 {
            estimate = 0.0;
            break;
        }
        let change = (norm - estimate).abs() / norm;
        estimate = norm;
        v = w.into_iter().map(|x| x / norm).collect();
        if change < POWER_REL_TOL {
            break;
        }
    }
    Ok((LIPSCHITZ_SAFETY * estimate).max(LIPSCHITZ_FLOOR))
}

/// `f(x) = ½xᵀQx - cᵀx` with symmetric (possibly indefinite) `Q`.
#[derive(Debug, Clone)]
pub struct QuadraticObjective {
    q: Array2<f64>,
    c: Vec<f64>,
    lipschitz: f64,
    lipschitz_source: LipschitzSource,
}

impl QuadraticObjective {
    /// Builds the objective and estimates `L ≈ ‖Q‖₂` by power iteration seeded with 0.
    pub fn new(q: Array2<f64>, c: Vec<f64>) -> Result<Self> {
        Self::with_seed(q, c, 0)
    }

    pub fn with_seed(q: Array2<f64>, c: Vec<f64>, seed: u64) -> Result<Self> {
        let (rows, cols) = q.dim();
        check_dim(rows, cols)?;
        check_dim(rows, c.len())?;
        if q.iter().chain(c.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("quadratic data"));
        }
        let scale = q.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        for i in 0..rows {
            for j in (i + 1)..rows {
                let diff = (q[[i, j]] - q[[j, i]]).abs();
                if diff > 1e-12 * scale {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        diff,
                    });
                }
            }
        }
        let mut obj = QuadraticObjective {
            q,
            c,
            lipschitz: LIPSCHITZ_FLOOR,
            lipschitz_source: LipschitzSource::Estimated,
        };
        obj.lipschitz = obj.estimate_lipschitz(seed)?;
        Ok(obj)
    }

    /// Replaces the estimated constant by a known exact one (e.g. from an eigen-solver).
    pub fn with_lipschitz(mut self, l: f64) -> Result<Self> {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "Lipschitz constant must be positive, got {l}"
            )));
        }
        self.lipschitz = l;
        self.lipschitz_source = LipschitzSource::Exact;
        Ok(self)
    }

    pub fn estimate_lipschitz(&self, seed: u64) -> Result<f64> {
        estimate_lipschitz(
            |v| self.q.dot(&ArrayView1::from(v)).to_vec(),
            self.dim(),
            seed,
        )
    }

    pub fn q(&self) -> &Array2<f64> {
        &self.q
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn lipschitz_source(&self) -> LipschitzSource {
        self.lipschitz_source
    }

    /// Value and gradient `Qx - c`, with a dimension check.
    pub fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        check_dim(self.dim(), x.len())?;
        Ok(self.value_and_gradient(x))
    }

    fn qx(&self, x: &[f64]) -> Vec<f64> {
        self.q.dot(&ArrayView1::from(x)).to_vec()
    }
}

impl Objective for QuadraticObjective {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.value_and_gradient(x).0
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.qx(x);
        g.iter_mut().zip(&self.c).for_each(|(gi, ci)| *gi -= ci);
        g
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let qx = self.qx(x);
        let value = 0.5 * dot(x, &qx) - dot(&self.c, x);
        let grad = qx.into_iter().zip(&self.c).map(|(a, c)| a - c).collect();
        (value, grad)
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn curvature(&self, d: &[f64]) -> Option<f64> {
        Some(dot(d, &self.qx(d)))
    }
}

/// Chebyshev-center objective `f(x) = ‖Ax‖² - bᵀx`, `bᵢ = ‖cᵢ‖²`, where the
/// columns `cᵢ` of the `m × n` matrix `A` are the points to enclose.
///
/// Evaluated matrix-free through `w = Ax`; `AᵀA` is never formed.
#[derive(Debug, Clone)]
pub struct ChebyshevObjective {
    a: Array2<f64>,
    b: Vec<f64>,
    lipschitz: f64,
    lipschitz_source: LipschitzSource,
}

impl ChebyshevObjective {
    pub fn new(a: Array2<f64>) -> Result<Self> {
        Self::with_seed(a, 0)
    }

    pub fn with_seed(a: Array2<f64>, seed: u64) -> Result<Self> {
        let b = a.columns().into_iter().map(|c| c.dot(&c)).collect();
        Self::from_parts(a, b, seed)
    }

    /// Accepts a precomputed `b`, which must match the squared column norms to 1e-10.
    pub fn from_parts(a: Array2<f64>, b: Vec<f64>, seed: u64) -> Result<Self> {
        check_dim(a.ncols(), b.len())?;
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("chebyshev data"));
        }
        for (i, col) in a.columns().into_iter().enumerate() {
            let norm = col.dot(&col);
            if (norm - b[i]).abs() > 1e-10 * norm.max(1.0) {
                return Err(Error::InvalidConfig(format!(
                    "b[{i}] = {} does not match squared column norm {norm}",
                    b[i]
                )));
            }
        }
        let mut obj = ChebyshevObjective {
            a,
            b,
            lipschitz: LIPSCHITZ_FLOOR,
            lipschitz_source: LipschitzSource::Estimated,
        };
        obj.lipschitz = obj.estimate_lipschitz(seed)?;
        Ok(obj)
    }

    pub fn with_lipschitz(mut self, l: f64) -> Result<Self> {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "Lipschitz constant must be positive, got {l}"
            )));
        }
        self.lipschitz = l;
        self.lipschitz_source = LipschitzSource::Exact;
        Ok(self)
    }

    /// Power iteration on `2AᵀA` using two matrix-vector products per step.
    pub fn estimate_lipschitz(&self, seed: u64) -> Result<f64> {
        estimate_lipschitz(
            |v| {
                let w = self.a.dot(&ArrayView1::from(v));
                self.a.t().dot(&w).iter().map(|x| 2.0 * x).collect()
            },
            self.dim(),
            seed,
        )
    }

    pub fn a(&self) -> &Array2<f64> {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn sample_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn lipschitz_source(&self) -> LipschitzSource {
        self.lipschitz_source
    }

    pub fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        check_dim(self.dim(), x.len())?;
        Ok(self.value_and_gradient(x))
    }

    /// Center `Ax` of the ball described by the dual point `x`.
    pub fn center(&self, x: &[f64]) -> Vec<f64> {
        self.a.dot(&ArrayView1::from(x)).to_vec()
    }
}

impl Objective for ChebyshevObjective {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let w = self.center(x);
        norm_sq(&w) - dot(&self.b, x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.value_and_gradient(x).1
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let w = self.a.dot(&ArrayView1::from(x));
        let value = w.dot(&w) - dot(&self.b, x);
        let grad = self
            .a
            .t()
            .dot(&w)
            .iter()
            .zip(&self.b)
            .map(|(atw, b)| 2.0 * atw - b)
            .collect();
        (value, grad)
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn curvature(&self, d: &[f64]) -> Option<f64> {
        let ad = self.a.dot(&ArrayView1::from(d));
        Some(2.0 * ad.dot(&ad))
    }
}

/// Black-box objective assembled from closures with a caller-supplied `L`.
pub struct FnObjective<F, G> {
    dim: usize,
    value: F,
    gradient: G,
    lipschitz: f64,
}

impl<F, G> FnObjective<F, G>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    pub fn new(dim: usize, value: F, gradient: G, lipschitz: f64) -> Result<Self> {
        if !(lipschitz.is_finite() && lipschitz > 0.0) {
            return Err(Error::NonFinite("Lipschitz constant"));
        }
        Ok(FnObjective {
            dim,
            value,
            gradient,
            lipschitz,
        })
    }
}

impl<F, G> Objective for FnObjective<F, G>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// Largest componentwise relative error between `∇f(x)` and central finite
/// differences of `f` with step `h`, relative to `max(1, |∇ᵢf(x)|)`.
pub fn check_gradient<O: Objective + ?Sized>(obj: &O, x: &[f64], h: f64) -> f64 {
    let grad = obj.gradient(x);
    let mut probe = x.to_vec();
    let mut worst = 0.0_f64;
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let fp = obj.value(&probe);
        probe[i] = x[i] - h;
        let fm = obj.value(&probe);
        probe[i] = x[i];
        let fd = (fp - fm) / (2.0 * h);
        let err = (fd - grad[i]).abs() / grad[i].abs().max(1.0);
        worst = worst.max(err);
    }
    worst
}
