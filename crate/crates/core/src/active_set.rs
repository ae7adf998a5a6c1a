//! Multiplier-based active-set estimation on the simplex and the mass shift
//! that zeroes the estimated active variables.
//!
//! With `λ(x) = ∇f(x)ᵀx` and `μᵢ(x) = ∇ᵢf(x) - λ(x)`, index `i` is estimated
//! active when `xᵢ ≤ ε μᵢ(x)`. The shift moves the mass of every active
//! variable onto a nonactive index that minimizes the gradient. For `ε` small
//! enough this yields `f(x̃) - f(x) ≤ -C L ‖x̃ - x‖²`; since that bound is not
//! known in practice, [`shift_with_epsilon_control`] halves `ε` until the
//! decrease is observed.

use crate::error::{check_dim, Error, Result};
use crate::objectives::Objective;
use crate::simplex::SimplexPoint;
use crate::vector::{dist_sq, dot};

/// Slack added to the sufficient-decrease test to absorb rounding in `f`.
pub const DECREASE_SLACK: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct ActiveSetConfig {
    /// Current estimate parameter; never grows during a run.
    pub epsilon: f64,
    pub epsilon0: f64,
    /// Sufficient-decrease constant `C`.
    pub c: f64,
    /// Factor applied to `epsilon` when the decrease test fails.
    pub shrink: f64,
    pub max_shrinks_per_iter: usize,
}

impl Default for ActiveSetConfig {
    fn default() -> Self {
        ActiveSetConfig {
            epsilon: 0.1,
            epsilon0: 0.1,
            c: 1e-6,
            shrink: 0.5,
            max_shrinks_per_iter: 50,
        }
    }
}

impl ActiveSetConfig {
    /// Configuration starting at `epsilon0`.
    pub fn with_epsilon0(epsilon0: f64) -> Self {
        ActiveSetConfig {
            epsilon: epsilon0,
            epsilon0,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.epsilon > 0.0
            && self.epsilon <= self.epsilon0
            && self.shrink > 0.0
            && self.shrink < 1.0
            && self.c > 0.0
            && self.epsilon0.is_finite()
            && self.c.is_finite();
        if !ok {
            return Err(Error::InvalidConfig(format!("active-set config {self:?}")));
        }
        Ok(())
    }
}

/// Largest `ε` for which the shift is guaranteed to decrease `f` by `C L ‖x̃-x‖²`.
pub fn epsilon_bound(n: usize, lipschitz: f64, c: f64) -> f64 {
    2.0 / (n as f64 * lipschitz * (2.0 * c + 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierValues {
    pub lambda: f64,
    pub mu: Vec<f64>,
}

pub fn multipliers(x: &[f64], g: &[f64]) -> Result<MultiplierValues> {
    check_dim(x.len(), g.len())?;
    let lambda = dot(g, x);
    let mu = g.iter().map(|gi| gi - lambda).collect();
    Ok(MultiplierValues { lambda, mu })
}

/// Partition of the indices into estimated active (`A`) and nonactive (`N`)
/// variables, together with the gradient minimizers `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveSetEstimate {
    pub active: Vec<usize>,
    pub nonactive: Vec<usize>,
    pub minimizers: Vec<usize>,
    pub multipliers: MultiplierValues,
}

impl ActiveSetEstimate {
    /// Smallest index in `N ∩ J`.
    pub fn pivot(&self) -> Option<usize> {
        self.minimizers
            .iter()
            .copied()
            .find(|j| self.nonactive.binary_search(j).is_ok())
    }

    /// Keeps in `A` only the indices where `x` is already zero, so that the
    /// partition stays consistent with leaving `x` unchanged.
    fn restricted_to_zeros(&self, x: &[f64]) -> ActiveSetEstimate {
        let (active, moved): (Vec<usize>, Vec<usize>) =
            self.active.iter().partition(|&&i| x[i] == 0.0);
        let mut nonactive = self.nonactive.clone();
        nonactive.extend(moved);
        nonactive.sort_unstable();
        ActiveSetEstimate {
            active,
            nonactive,
            minimizers: self.minimizers.clone(),
            multipliers: self.multipliers.clone(),
        }
    }
}

pub fn estimate(x: &[f64], g: &[f64], epsilon: f64) -> Result<ActiveSetEstimate> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let multipliers = multipliers(x, g)?;
    let (active, nonactive): (Vec<usize>, Vec<usize>) =
        (0..x.len()).partition(|&i| x[i] <= epsilon * multipliers.mu[i]);
    let gmin = g.iter().copied().fold(f64::INFINITY, f64::min);
    let minimizers = (0..g.len()).filter(|&i| g[i] == gmin).collect();
    Ok(ActiveSetEstimate {
        active,
        nonactive,
        minimizers,
        multipliers,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftResult {
    pub x_tilde: SimplexPoint,
    /// Index receiving the removed mass; `None` when nothing was moved and no pivot exists.
    pub pivot: Option<usize>,
    pub moved_mass: f64,
    pub decrease_ok: bool,
    pub shrinks_used: usize,
}

/// Zeroes every estimated active variable and adds the removed mass to the
/// smallest index of `N ∩ J`.
pub fn shift_to_tilde(x: &SimplexPoint, est: &ActiveSetEstimate) -> Result<ShiftResult> {
    check_dim(x.dim(), est.multipliers.mu.len())?;
    let pivot = est.pivot();
    let moved_mass: f64 = est.active.iter().map(|&i| x[i]).sum();
    if est.active.iter().all(|&i| x[i] == 0.0) {
        return Ok(ShiftResult {
            x_tilde: x.clone(),
            pivot,
            moved_mass: 0.0,
            decrease_ok: true,
            shrinks_used: 0,
        });
    }
    let j = pivot.ok_or(Error::NoPivot)?;
    let mut coords = x.to_vec();
    for &i in &est.active {
        coords[i] = 0.0;
    }
    coords[j] += moved_mass;
    Ok(ShiftResult {
        x_tilde: SimplexPoint::from_raw(coords),
        pivot: Some(j),
        moved_mass,
        decrease_ok: true,
        shrinks_used: 0,
    })
}

/// Result of the ε-controlled shift: the accepted point, the estimate it was
/// built from and the objective data at `x̃`.
#[derive(Debug, Clone)]
pub struct ShiftOutcome {
    pub shift: ShiftResult,
    /// Partition to use for the direction; `x̃` is zero on `estimate.active`.
    pub estimate: ActiveSetEstimate,
    pub f_tilde: f64,
    pub g_tilde: Vec<f64>,
    /// Objective evaluations spent on decrease tests.
    pub evals: usize,
}

/// Estimates, shifts and tests `f(x̃) - f(x) ≤ -C L ‖x̃ - x‖²`, shrinking `ε`
/// after every failed test. After `max_shrinks_per_iter` failures `x̃ = x` is
/// returned with `decrease_ok = false`. The returned config carries the
/// accepted (possibly reduced) `ε`.
pub fn shift_with_epsilon_control<O: Objective + ?Sized>(
    x: &SimplexPoint,
    f_x: f64,
    g: &[f64],
    obj: &O,
    cfg: &ActiveSetConfig,
) -> Result<(ShiftOutcome, ActiveSetConfig)> {
    cfg.validate()?;
    check_dim(x.dim(), g.len())?;
    let cl = cfg.c * obj.lipschitz();
    let mut cfg = cfg.clone();
    let mut evals = 0;
    let mut shrinks = 0;

    let unchanged =
        |est: &ActiveSetEstimate, decrease_ok: bool, shrinks_used: usize, evals: usize| {
            let estimate = est.restricted_to_zeros(x);
            ShiftOutcome {
                shift: ShiftResult {
                    x_tilde: x.clone(),
                    pivot: estimate.pivot(),
                    moved_mass: 0.0,
                    decrease_ok,
                    shrinks_used,
                },
                estimate,
                f_tilde: f_x,
                g_tilde: g.to_vec(),
                evals,
            }
        };

    loop {
        let est = estimate(x, g, cfg.epsilon)?;
        let shift = match shift_to_tilde(x, &est) {
            Ok(s) => s,
            // Only reachable at numerically stationary points.
            Err(Error::NoPivot) => return Ok((unchanged(&est, true, shrinks, evals), cfg)),
            Err(e) => return Err(e),
        };
        if shift.moved_mass == 0.0 {
            let outcome = ShiftOutcome {
                shift: ShiftResult {
                    shrinks_used: shrinks,
                    ..shift
                },
                estimate: est,
                f_tilde: f_x,
                g_tilde: g.to_vec(),
                evals,
            };
            return Ok((outcome, cfg));
        }

        let (f_tilde, g_tilde) = obj.value_and_gradient(&shift.x_tilde);
        evals += 1;
        if !f_tilde.is_finite() {
            return Err(Error::ObjectiveOverflow);
        }
        let bound = -cl * dist_sq(&shift.x_tilde, x);
        if f_tilde - f_x <= bound + DECREASE_SLACK {
            let outcome = ShiftOutcome {
                shift: ShiftResult {
                    shrinks_used: shrinks,
                    ..shift
                },
                estimate: est,
                f_tilde,
                g_tilde,
                evals,
            };
            return Ok((outcome, cfg));
        }
        if shrinks == cfg.max_shrinks_per_iter {
            return Ok((unchanged(&est, false, shrinks, evals), cfg));
        }
        cfg.epsilon *= cfg.shrink;
        shrinks += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::QuadraticObjective;
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;

    fn pt(v: &[f64]) -> SimplexPoint {
        SimplexPoint::new(v.to_vec()).unwrap()
    }

    /// `f(x) = gᵀx` as a quadratic with `Q = 0`.
    fn linear(g: &[f64]) -> QuadraticObjective {
        let n = g.len();
        QuadraticObjective::new(Array2::zeros((n, n)), g.iter().map(|v| -v).collect()).unwrap()
    }

    #[test]
    fn multiplier_examples() {
        let m = multipliers(&[0.9, 0.05, 0.05], &[0.0, 1.0, 2.0]).unwrap();
        assert_abs_diff_eq!(m.lambda, 0.15, epsilon = 1e-15);
        for (a, b) in m.mu.iter().zip([-0.15, 0.85, 1.85]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        let m = multipliers(&[0.2, 0.8], &[0.0, 0.0]).unwrap();
        assert_eq!(m.lambda, 0.0);
        assert_eq!(m.mu, vec![0.0, 0.0]);
        let m = multipliers(&[1.0, 0.0, 0.0], &[3.0, 5.0, -1.0]).unwrap();
        assert_eq!(m.lambda, 3.0);
        assert_eq!(m.mu, vec![0.0, 2.0, -4.0]);
        assert!(multipliers(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn estimate_examples() {
        let e = estimate(&[0.9, 0.05, 0.05], &[0.0, 1.0, 2.0], 0.1).unwrap();
        assert_eq!(e.active, vec![1, 2]);
        assert_eq!(e.nonactive, vec![0]);
        assert_eq!(e.minimizers, vec![0]);

        // A zero variable with negative multiplier stays nonactive.
        let e = estimate(&[0.0, 0.5, 0.5], &[-1.0, 1.0, 1.0], 0.1).unwrap();
        assert!(e.active.is_empty());
        assert_eq!(e.nonactive, vec![0, 1, 2]);
        assert_eq!(e.minimizers, vec![0]);

        let t = 1.0 / 3.0;
        let e = estimate(&[t, t, t], &[2.0, 2.0, 2.0], 0.1).unwrap();
        assert!(e.active.is_empty());
        assert_eq!(e.minimizers, vec![0, 1, 2]);

        assert!(estimate(&[1.0], &[1.0], 0.0).is_err());
    }

    #[test]
    fn shift_examples() {
        let x = pt(&[0.9, 0.05, 0.05]);
        let est = estimate(&x, &[0.0, 1.0, 2.0], 0.1).unwrap();
        let s = shift_to_tilde(&x, &est).unwrap();
        assert_eq!(s.x_tilde.as_slice(), &[1.0, 0.0, 0.0]);
        assert_eq!(s.pivot, Some(0));
        assert_abs_diff_eq!(s.moved_mass, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(dist_sq(&s.x_tilde, &x), 0.015, epsilon = 1e-15);

        let y = pt(&[0.2, 0.3, 0.5]);
        let est = estimate(&y, &[1.0, 1.0, 1.0], 0.1).unwrap();
        let s = shift_to_tilde(&y, &est).unwrap();
        assert_eq!(s.x_tilde, y);
        assert_eq!(s.moved_mass, 0.0);

        let v = pt(&[1.0, 0.0, 0.0]);
        let est = estimate(&v, &[0.0, 1.0, 2.0], 0.1).unwrap();
        assert_eq!(est.active, vec![1, 2]);
        let s = shift_to_tilde(&v, &est).unwrap();
        assert_eq!(s.x_tilde, v);
    }

    #[test]
    fn shift_without_pivot_is_an_error() {
        let x = pt(&[0.5, 0.5]);
        let est = ActiveSetEstimate {
            active: vec![1],
            nonactive: vec![0],
            minimizers: vec![1],
            multipliers: multipliers(&x, &[1.0, 0.0]).unwrap(),
        };
        assert_eq!(shift_to_tilde(&x, &est), Err(Error::NoPivot));
    }

    #[test]
    fn controlled_shift_accepts_linear_decrease() {
        let g = [0.0, 1.0, 2.0];
        let obj = linear(&g);
        let x = pt(&[0.9, 0.05, 0.05]);
        let f = obj.value(&x);
        let (out, cfg) =
            shift_with_epsilon_control(&x, f, &g, &obj, &ActiveSetConfig::default()).unwrap();
        assert!(out.shift.decrease_ok);
        assert_eq!(out.shift.shrinks_used, 0);
        assert_eq!(out.shift.x_tilde.as_slice(), &[1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(f - out.f_tilde, 0.15, epsilon = 1e-15);
        assert_eq!(cfg.epsilon, 0.1);
    }

    #[test]
    fn controlled_shift_with_empty_estimate_is_a_no_op() {
        let obj = QuadraticObjective::new(Array2::eye(3), vec![0.0; 3]).unwrap();
        let t = 1.0 / 3.0;
        let x = pt(&[t, t, t]);
        let (f, g) = obj.value_and_gradient(&x);
        let (out, _) =
            shift_with_epsilon_control(&x, f, &g, &obj, &ActiveSetConfig::default()).unwrap();
        assert!(out.estimate.active.is_empty());
        assert_eq!(out.shift.x_tilde, x);
        assert!(out.shift.decrease_ok);
        assert_eq!(out.shift.shrinks_used, 0);
        assert_eq!(out.evals, 0);
    }

    #[test]
    fn controlled_shift_shrinks_epsilon_on_increase() {
        // f = 50‖x‖²: at x = (0.5, 0.3, 0.2) and ε = 0.1 index 0 is estimated
        // active and moving its mass onto index 2 increases f.
        let k = 100.0;
        let obj = QuadraticObjective::new(Array2::eye(3) * k, vec![0.0; 3]).unwrap();
        let x = pt(&[0.5, 0.3, 0.2]);
        let (f, g) = obj.value_and_gradient(&x);

        // Brute-force scan over ε = 0.1·2^-k for the first accepted shift.
        let cl = 1e-6 * obj.lipschitz();
        let expected = (0..=50)
            .find(|&s| {
                let eps = 0.1 * 0.5_f64.powi(s);
                let est = estimate(&x, &g, eps).unwrap();
                let xt = shift_to_tilde(&x, &est).unwrap().x_tilde;
                obj.value(&xt) - f <= -cl * dist_sq(&xt, &x) + DECREASE_SLACK
            })
            .unwrap();
        assert!(expected >= 1);

        let (out, cfg) =
            shift_with_epsilon_control(&x, f, &g, &obj, &ActiveSetConfig::default()).unwrap();
        assert_eq!(out.shift.shrinks_used, expected as usize);
        assert!(out.shift.decrease_ok);
        assert_abs_diff_eq!(cfg.epsilon, 0.1 * 0.5_f64.powi(expected), epsilon = 1e-18);
        assert!(out.f_tilde <= f);
    }

    #[test]
    fn exhausted_shrinks_leave_point_unchanged() {
        let obj = QuadraticObjective::new(Array2::eye(3) * 100.0, vec![0.0; 3]).unwrap();
        let x = pt(&[0.5, 0.3, 0.2]);
        let (f, g) = obj.value_and_gradient(&x);
        let cfg = ActiveSetConfig {
            max_shrinks_per_iter: 0,
            ..Default::default()
        };
        let (out, cfg) = shift_with_epsilon_control(&x, f, &g, &obj, &cfg).unwrap();
        assert!(!out.shift.decrease_ok);
        assert_eq!(out.shift.x_tilde, x);
        assert!(out.estimate.active.iter().all(|&i| x[i] == 0.0));
        assert_eq!(out.estimate.active.len() + out.estimate.nonactive.len(), 3);
        assert_eq!(cfg.epsilon, 0.1);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let cfg = ActiveSetConfig {
            shrink: 1.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        assert!(ActiveSetConfig::with_epsilon0(0.3).validate().is_ok());
    }

    #[test]
    fn epsilon_bound_formula() {
        assert_abs_diff_eq!(epsilon_bound(4, 2.0, 0.5), 2.0 / 16.0, epsilon = 1e-15);
    }
}
