//! Stepsize rules along a feasible descent direction.

use crate::directions::Direction;
use crate::error::{check_dim, Error, Result};
use crate::objectives::Objective;
use crate::vector::add_scaled;

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchConfig {
    /// Backtracking factor `δ ∈ (0, 1)`.
    pub delta: f64,
    /// Sufficient-decrease slope `γ ∈ (0, 1)`.
    pub gamma: f64,
    pub max_backtracks: usize,
}

impl Default for LineSearchConfig {
    fn default() -> Self {
        LineSearchConfig {
            delta: 0.5,
            gamma: 1e-4,
            max_backtracks: 100,
        }
    }
}

impl LineSearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0 && self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidConfig(format!("line search config {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmijoStep {
    pub alpha: f64,
    pub f_new: f64,
    /// Objective evaluations, one per trial stepsize.
    pub evals: usize,
    /// The accepted trial point `x̃ + αd`.
    pub point: Vec<f64>,
}

/// Backtracking from `alpha_max` until
/// `f(x̃ + αd) ≤ f(x̃) + γ α ∇f(x̃)ᵀd`.
pub fn armijo<O: Objective + ?Sized>(
    obj: &O,
    x: &[f64],
    f_x: f64,
    dir: &Direction,
    cfg: &LineSearchConfig,
) -> Result<ArmijoStep> {
    cfg.validate()?;
    check_dim(x.len(), dir.d.len())?;
    if !(dir.dir_deriv < 0.0) {
        return Err(Error::InvalidConfig(format!(
            "line search needs a descent direction, got derivative {}",
            dir.dir_deriv
        )));
    }
    let mut alpha = dir.alpha_max;
    let mut evals = 0;
    for _ in 0..=cfg.max_backtracks {
        let point = add_scaled(x, alpha, &dir.d);
        let f_new = obj.value(&point);
        evals += 1;
        if f_new <= f_x + cfg.gamma * alpha * dir.dir_deriv {
            return Ok(ArmijoStep {
                alpha,
                f_new,
                evals,
                point,
            });
        }
        alpha *= cfg.delta;
    }
    Err(Error::LineSearchFailure {
        backtracks: cfg.max_backtracks,
        alpha,
    })
}

/// Exact minimizer of `f(x̃ + αd)` over `(0, alpha_max]` for objectives with a
/// constant Hessian: `α = min(-∇f(x̃)ᵀd / dᵀ∇²f d, alpha_max)` when the
/// curvature is positive, `alpha_max` otherwise.
pub fn exact_quadratic<O: Objective + ?Sized>(obj: &O, x: &[f64], dir: &Direction) -> Result<f64> {
    check_dim(x.len(), dir.d.len())?;
    if !(dir.dir_deriv < 0.0) {
        return Err(Error::InvalidConfig(format!(
            "line search needs a descent direction, got derivative {}",
            dir.dir_deriv
        )));
    }
    let curvature = obj
        .curvature(&dir.d)
        .ok_or_else(|| Error::InvalidConfig("exact line search needs a constant Hessian".into()))?;
    if curvature > 0.0 {
        Ok((-dir.dir_deriv / curvature).min(dir.alpha_max))
    } else {
        Ok(dir.alpha_max)
    }
}
