//! The active-set outer loop and its plain baselines.
//!
//! Each iteration checks the stationarity gap at `x^k`, optionally shifts the
//! mass of the estimated active variables (producing `x̃^k`), computes a
//! direction on the nonactive face and takes a stepsize along it. Baselines
//! run the same loop with an empty active set and `x̃^k = x^k`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::active_set::{estimate, shift_with_epsilon_control, ActiveSetConfig};
use crate::directions::{compute_direction, DirectionKind, DirectionRule, PgConfig};
use crate::error::{check_dim, Error, Result};
use crate::line_search::{armijo, exact_quadratic, LineSearchConfig};
use crate::objectives::Objective;
use crate::simplex::{stationarity_gap, SimplexPoint};
use crate::vector::add_scaled;

/// Directional derivatives above this are not treated as descent by the
/// Armijo search, whose decrease test cannot resolve smaller changes in `f`.
/// Exact steps only need a negative derivative.
pub const DESCENT_TOL: f64 = -1e-14;
const DROP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LineSearchKind {
    Armijo,
    /// Closed-form minimizer along the segment; needs a constant Hessian.
    ExactQuadratic,
}

impl LineSearchKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LineSearchKind::Armijo => "armijo",
            LineSearchKind::ExactQuadratic => "exact",
        }
    }
}

impl FromStr for LineSearchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "armijo" => Ok(LineSearchKind::Armijo),
            "exact" | "exact-quadratic" => Ok(LineSearchKind::ExactQuadratic),
            other => Err(Error::InvalidConfig(format!(
                "unknown line search '{other}'"
            ))),
        }
    }
}

/// A direction rule with or without the active-set step: `fw`, `as-pg`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Algorithm {
    pub rule: DirectionRule,
    pub active_set: bool,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::new(DirectionRule::Fw, false),
        Algorithm::new(DirectionRule::Afw, false),
        Algorithm::new(DirectionRule::Pg, false),
        Algorithm::new(DirectionRule::Fw, true),
        Algorithm::new(DirectionRule::Afw, true),
        Algorithm::new(DirectionRule::Pg, true),
    ];

    pub const fn new(rule: DirectionRule, active_set: bool) -> Self {
        Algorithm { rule, active_set }
    }

    /// The same rule with the active-set step toggled.
    pub fn counterpart(&self) -> Algorithm {
        Algorithm::new(self.rule, !self.active_set)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.active_set {
            write!(f, "as-{}", self.rule)
        } else {
            write!(f, "{}", self.rule)
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let (active_set, rule) = match lower.strip_prefix("as-") {
            Some(rest) => (true, rest),
            None => (false, lower.as_str()),
        };
        let rule = match rule {
            "fw" => DirectionRule::Fw,
            "afw" => DirectionRule::Afw,
            "pg" => DirectionRule::Pg,
            _ => return Err(Error::InvalidConfig(format!("unknown algorithm '{s}'"))),
        };
        Ok(Algorithm { rule, active_set })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub rule: DirectionRule,
    pub active_set_enabled: bool,
    pub line_search: LineSearchKind,
    /// Stop once the stationarity gap at `x^k` is at most `tol`.
    pub tol: f64,
    /// Iteration limit; `None` means the problem dimension.
    pub maxit: Option<usize>,
    pub as_cfg: ActiveSetConfig,
    pub ls_cfg: LineSearchConfig,
    pub pg_cfg: PgConfig,
    /// Run seed, carried into outputs for provenance.
    pub seed: u64,
    /// Keep every `x^k` and `x̃^k` in the result.
    pub keep_iterates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rule: DirectionRule::Fw,
            active_set_enabled: true,
            line_search: LineSearchKind::Armijo,
            tol: 1e-6,
            maxit: None,
            as_cfg: ActiveSetConfig::default(),
            ls_cfg: LineSearchConfig::default(),
            pg_cfg: PgConfig::default(),
            seed: 0,
            keep_iterates: false,
        }
    }
}

impl SolverConfig {
    pub fn for_algorithm(algo: Algorithm) -> Self {
        SolverConfig {
            rule: algo.rule,
            active_set_enabled: algo.active_set,
            ..Default::default()
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        Algorithm::new(self.rule, self.active_set_enabled)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.maxit == Some(0) {
            return Err(Error::InvalidConfig("maxit must be at least 1".into()));
        }
        if !(self.pg_cfg.s > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "PG scaling must be positive, got {}",
                self.pg_cfg.s
            )));
        }
        self.ls_cfg.validate()?;
        self.as_cfg.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    Fw,
    AfwToward,
    AfwAway,
    Pg,
    /// No move along the direction (`α = 0`).
    Zero,
    /// Terminal row: the solver stopped at this iterate.
    Stop,
}

impl StepKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StepKind::Fw => "fw",
            StepKind::AfwToward => "afw-toward",
            StepKind::AfwAway => "afw-away",
            StepKind::Pg => "pg",
            StepKind::Zero => "zero",
            StepKind::Stop => "stop",
        }
    }
}

impl From<DirectionKind> for StepKind {
    fn from(kind: DirectionKind) -> Self {
        match kind {
            DirectionKind::Fw => StepKind::Fw,
            DirectionKind::AfwToward => StepKind::AfwToward,
            DirectionKind::AfwAway => StepKind::AfwAway,
            DirectionKind::Pg => StepKind::Pg,
        }
    }
}

/// One trace row: the state at `x^k` and the step taken from it.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub f: f64,
    pub gap: f64,
    pub n_active: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub step_kind: StepKind,
    pub drop_step: bool,
    /// Wall-clock seconds since the start of the solve.
    pub elapsed: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Converged,
    /// Iteration limit reached, or no further progress was possible.
    MaxIterations,
    LineSearchFailure,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIterations => "maxit",
            SolveStatus::LineSearchFailure => "line-search-failure",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateSnapshot {
    pub x: Vec<f64>,
    pub x_tilde: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub x_final: SimplexPoint,
    pub f_final: f64,
    pub gap_final: f64,
    pub status: SolveStatus,
    /// Number of completed iterations.
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
    /// Estimated active set at `x_final` with the last `ε`.
    pub final_active_set: Vec<usize>,
    pub final_epsilon: f64,
    pub lipschitz: f64,
    /// Set when the run ended with a line-search failure.
    pub failure: Option<Error>,
    /// Filled only with `keep_iterates`.
    pub iterates: Vec<IterateSnapshot>,
}

/// A step is a drop step when an away step takes its full stepsize `alpha_max < 1`.
pub fn classify_step(kind: StepKind, alpha: f64, alpha_max: f64) -> bool {
    kind == StepKind::AfwAway && (alpha - alpha_max).abs() <= DROP_TOL && alpha_max < 1.0
}

/// Minimizes `obj` over the simplex from `x0`.
pub fn solve<O: Objective + ?Sized>(
    obj: &O,
    x0: &SimplexPoint,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    cfg.validate()?;
    let n = obj.dim();
    check_dim(n, x0.dim())?;
    if cfg.line_search == LineSearchKind::ExactQuadratic && obj.curvature(&vec![0.0; n]).is_none() {
        return Err(Error::InvalidConfig(
            "exact line search needs a constant Hessian".into(),
        ));
    }
    let maxit = cfg.maxit.unwrap_or(n).max(1);
    let start = Instant::now();
    let full_face: Vec<usize> = (0..n).collect();

    let mut x = x0.clone();
    let (mut f, mut g) = obj.value_and_gradient(&x);
    if !f.is_finite() {
        return Err(Error::ObjectiveOverflow);
    }
    let mut as_cfg = cfg.as_cfg.clone();
    let mut trace = Vec::new();
    let mut iterates = Vec::new();
    let mut pending_evals = 1;
    let mut stalled = false;
    let mut failure = None;
    let mut k = 0;

    let status = loop {
        let gap = stationarity_gap(&x, &g)?;
        if gap <= cfg.tol {
            break SolveStatus::Converged;
        }
        if k >= maxit {
            break SolveStatus::MaxIterations;
        }

        let (x_tilde, f_tilde, g_tilde, n_active, nonactive, moved_mass, mut evals) =
            if cfg.active_set_enabled {
                let (out, updated) = shift_with_epsilon_control(&x, f, &g, obj, &as_cfg)?;
                as_cfg = updated;
                (
                    out.shift.x_tilde,
                    out.f_tilde,
                    out.g_tilde,
                    out.estimate.active.len(),
                    out.estimate.nonactive,
                    out.shift.moved_mass,
                    out.evals,
                )
            } else {
                (x.clone(), f, g.clone(), 0, full_face.clone(), 0.0, 0)
            };
        evals += pending_evals;
        if cfg.keep_iterates {
            iterates.push(IterateSnapshot {
                x: x.to_vec(),
                x_tilde: x_tilde.to_vec(),
            });
        }

        let dir = compute_direction(cfg.rule, &x_tilde, &g_tilde, &nonactive, &cfg.pg_cfg)?;
        let descent_tol = match cfg.line_search {
            LineSearchKind::Armijo => DESCENT_TOL,
            LineSearchKind::ExactQuadratic => 0.0,
        };
        let (alpha, mut point) = if dir.dir_deriv < descent_tol {
            match cfg.line_search {
                LineSearchKind::Armijo => match armijo(obj, &x_tilde, f_tilde, &dir, &cfg.ls_cfg) {
                    Ok(step) => {
                        evals += step.evals;
                        (step.alpha, step.point)
                    }
                    Err(e @ Error::LineSearchFailure { .. }) => {
                        trace.push(IterationRecord {
                            k,
                            f,
                            gap,
                            n_active,
                            epsilon: if cfg.active_set_enabled {
                                as_cfg.epsilon
                            } else {
                                0.0
                            },
                            alpha: 0.0,
                            step_kind: StepKind::Stop,
                            drop_step: false,
                            elapsed: start.elapsed().as_secs_f64(),
                            evals,
                        });
                        failure = Some(e);
                        break SolveStatus::LineSearchFailure;
                    }
                    Err(e) => return Err(e),
                },
                LineSearchKind::ExactQuadratic => {
                    let alpha = exact_quadratic(obj, &x_tilde, &dir)?;
                    (alpha, add_scaled(&x_tilde, alpha, &dir.d))
                }
            }
        } else {
            (0.0, x_tilde.to_vec())
        };

        let step_kind = if alpha > 0.0 {
            StepKind::from(dir.kind)
        } else {
            StepKind::Zero
        };
        let drop_step = classify_step(step_kind, alpha, dir.alpha_max);
        if drop_step {
            if let Some(j) = dir.pivot {
                point[j] = 0.0;
            }
        }
        let x_next = SimplexPoint::new(point)
            .map_err(|e| Error::Infeasible(format!("iterate {} left the simplex: {e}", k + 1)))?;

        trace.push(IterationRecord {
            k,
            f,
            gap,
            n_active,
            epsilon: if cfg.active_set_enabled {
                as_cfg.epsilon
            } else {
                0.0
            },
            alpha,
            step_kind,
            drop_step,
            elapsed: start.elapsed().as_secs_f64(),
            evals,
        });
        k += 1;

        let progressed = alpha > 0.0 || moved_mass > 0.0;
        x = x_next;
        (f, g) = obj.value_and_gradient(&x);
        pending_evals = 1;
        if !f.is_finite() {
            return Err(Error::ObjectiveOverflow);
        }
        if progressed {
            stalled = false;
        } else if cfg.active_set_enabled && !stalled {
            // Retry once with a smaller ε before giving up.
            as_cfg.epsilon *= as_cfg.shrink;
            stalled = true;
        } else {
            break SolveStatus::MaxIterations;
        }
    };

    let gap_final = stationarity_gap(&x, &g)?;
    let final_active_set = estimate(&x, &g, as_cfg.epsilon)?.active;
    if failure.is_none() {
        trace.push(IterationRecord {
            k,
            f,
            gap: gap_final,
            n_active: final_active_set.len(),
            epsilon: if cfg.active_set_enabled {
                as_cfg.epsilon
            } else {
                0.0
            },
            alpha: 0.0,
            step_kind: StepKind::Stop,
            drop_step: false,
            elapsed: start.elapsed().as_secs_f64(),
            evals: if k == 0 { pending_evals } else { 0 },
        });
    }

    Ok(SolveResult {
        x_final: x,
        f_final: f,
        gap_final,
        status,
        iterations: k,
        trace,
        final_active_set,
        final_epsilon: as_cfg.epsilon,
        lipschitz: obj.lipschitz(),
        failure,
        iterates,
    })
}
