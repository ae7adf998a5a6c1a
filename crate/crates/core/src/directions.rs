//! Search directions restricted to the estimated nonactive face `Δ_N`.
//!
//! All directions are full-length vectors that vanish outside `N`, so
//! `x̃ + α d` stays feasible for every `α ∈ [0, alpha_max]`.

use std::fmt;

use crate::error::{check_dim, Error, Result};
use crate::simplex::{project_simplex, FaceIndexSet, SimplexPoint};
use crate::vector::{argmax_over, argmin_over};

/// Which direction rule drives the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DirectionRule {
    /// Frank-Wolfe: toward the best vertex of the face.
    Fw,
    /// Away-step Frank-Wolfe: Frank-Wolfe or away from the worst supported vertex.
    Afw,
    /// Projected gradient onto the face.
    Pg,
}

impl DirectionRule {
    pub fn as_str(&self) -> &'static str {
        match self {
            DirectionRule::Fw => "fw",
            DirectionRule::Afw => "afw",
            DirectionRule::Pg => "pg",
        }
    }
}

impl fmt::Display for DirectionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The kind of direction that was actually produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DirectionKind {
    Fw,
    AfwToward,
    AfwAway,
    Pg,
}

impl DirectionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DirectionKind::Fw => "fw",
            DirectionKind::AfwToward => "afw-toward",
            DirectionKind::AfwAway => "afw-away",
            DirectionKind::Pg => "pg",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    pub d: Vec<f64>,
    pub kind: DirectionKind,
    /// `∇f(x̃)ᵀd` for the gradient the direction was built from.
    pub dir_deriv: f64,
    pub alpha_max: f64,
    /// `î` for Frank-Wolfe steps, `ĵ` for away steps.
    pub pivot: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgConfig {
    /// Gradient scaling `s > 0` inside the projection.
    pub s: f64,
}

impl Default for PgConfig {
    fn default() -> Self {
        PgConfig { s: 1.0 }
    }
}

fn check_face(x: &[f64], g: &[f64], nonactive: &[usize]) -> Result<()> {
    check_dim(x.len(), g.len())?;
    if nonactive.is_empty() {
        return Err(Error::EmptyFace);
    }
    if let Some(&i) = nonactive.iter().find(|&&i| i >= x.len()) {
        return Err(Error::FaceIndexOutOfRange {
            index: i,
            dim: x.len(),
        });
    }
    if nonactive.len() < x.len() {
        let mut on_face = vec![false; x.len()];
        nonactive.iter().for_each(|&i| on_face[i] = true);
        if let Some(i) = (0..x.len()).find(|&i| !on_face[i] && x[i] != 0.0) {
            return Err(Error::Infeasible(format!(
                "x̃[{i}] = {} is nonzero outside the nonactive face",
                x[i]
            )));
        }
    }
    Ok(())
}

/// `gᵀd` for a `d` supported on `N` with `Σ d = 0`, evaluated with `g` shifted
/// by its minimum over `N`. Both forms agree exactly; the shifted one avoids
/// cancellation when `g` is nearly constant on the support.
fn face_derivative(g: &[f64], d: &[f64], nonactive: &[usize]) -> f64 {
    let g_ref = nonactive
        .iter()
        .map(|&i| g[i])
        .fold(f64::INFINITY, f64::min);
    nonactive.iter().map(|&i| (g[i] - g_ref) * d[i]).sum()
}

fn fw_parts(x: &[f64], g: &[f64], nonactive: &[usize]) -> (usize, Vec<f64>) {
    let i_hat = argmin_over(g, nonactive.iter().copied()).expect("non-empty face");
    let mut d = vec![0.0; x.len()];
    for &i in nonactive {
        d[i] = -x[i];
    }
    d[i_hat] += 1.0;
    (i_hat, d)
}

/// `d = e_î - x̃` on `N` with `î = argmin_{i∈N} gᵢ`; `alpha_max = 1`.
pub fn fw_direction(x: &SimplexPoint, g: &[f64], nonactive: &[usize]) -> Result<Direction> {
    check_face(x, g, nonactive)?;
    let (i_hat, d) = fw_parts(x, g, nonactive);
    Ok(Direction {
        dir_deriv: face_derivative(g, &d, nonactive),
        d,
        kind: DirectionKind::Fw,
        alpha_max: 1.0,
        pivot: Some(i_hat),
    })
}

/// Away-step Frank-Wolfe: the Frank-Wolfe direction unless the away direction
/// `x̃ - e_ĵ`, `ĵ = argmax_{j∈N, x̃ⱼ>0} gⱼ`, has a strictly smaller directional
/// derivative. Away steps may travel up to `x̃_ĵ / (1 - x̃_ĵ)`.
pub fn afw_direction(x: &SimplexPoint, g: &[f64], nonactive: &[usize]) -> Result<Direction> {
    check_face(x, g, nonactive)?;
    let (i_hat, d_fw) = fw_parts(x, g, nonactive);
    let fw_deriv = face_derivative(g, &d_fw, nonactive);

    let j_hat = argmax_over(g, nonactive.iter().copied().filter(|&j| x[j] > 0.0))
        .ok_or_else(|| Error::Infeasible("no positive component on the nonactive face".into()))?;
    let mut d_away = vec![0.0; x.len()];
    for &i in nonactive {
        d_away[i] = x[i];
    }
    d_away[j_hat] -= 1.0;
    let away_deriv = face_derivative(g, &d_away, nonactive);

    if fw_deriv <= away_deriv {
        return Ok(Direction {
            d: d_fw,
            kind: DirectionKind::AfwToward,
            dir_deriv: fw_deriv,
            alpha_max: 1.0,
            pivot: Some(i_hat),
        });
    }
    let xj = x[j_hat];
    // x̃ = e_ĵ makes the away direction vanish; the branch is then never a descent step.
    let alpha_max = if xj < 1.0 { xj / (1.0 - xj) } else { 1.0 };
    Ok(Direction {
        d: d_away,
        kind: DirectionKind::AfwAway,
        dir_deriv: away_deriv,
        alpha_max,
        pivot: Some(j_hat),
    })
}

/// `d = P_{Δ_N}(x̃ - s g) - x̃`; `alpha_max = 1`.
pub fn pg_direction(
    x: &SimplexPoint,
    g: &[f64],
    nonactive: &[usize],
    cfg: &PgConfig,
) -> Result<Direction> {
    check_face(x, g, nonactive)?;
    if !(cfg.s > 0.0 && cfg.s.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "PG scaling must be positive, got {}",
            cfg.s
        )));
    }
    let face = FaceIndexSet::new(nonactive.to_vec(), x.len())?;
    // The projection is invariant to shifting g by a constant on N.
    let g_ref = nonactive
        .iter()
        .map(|&i| g[i])
        .fold(f64::INFINITY, f64::min);
    let y: Vec<f64> = x
        .iter()
        .zip(g)
        .map(|(xi, gi)| xi - cfg.s * (gi - g_ref))
        .collect();
    let target = project_simplex(&y, &face)?;
    let d: Vec<f64> = target.iter().zip(x.iter()).map(|(p, xi)| p - xi).collect();
    Ok(Direction {
        dir_deriv: face_derivative(g, &d, nonactive),
        d,
        kind: DirectionKind::Pg,
        alpha_max: 1.0,
        pivot: None,
    })
}

pub fn compute_direction(
    rule: DirectionRule,
    x: &SimplexPoint,
    g: &[f64],
    nonactive: &[usize],
    pg: &PgConfig,
) -> Result<Direction> {
    match rule {
        DirectionRule::Fw => fw_direction(x, g, nonactive),
        DirectionRule::Afw => afw_direction(x, g, nonactive),
        DirectionRule::Pg => pg_direction(x, g, nonactive, pg),
    }
}
