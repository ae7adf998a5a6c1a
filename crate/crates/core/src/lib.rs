//! Minimization of smooth, possibly non-convex functions over the unit simplex
//! with an active-set strategy in front of Frank-Wolfe, away-step Frank-Wolfe
//! and projected-gradient directions.
//!
//! Every iteration estimates which variables are zero at a stationary point
//! from closed-form multiplier functions, moves their mass onto a
//! gradient-minimizing coordinate when that yields a sufficient decrease, and
//! then searches only in the remaining (nonactive) face.
//!
//! ```
//! use ndarray::Array2;
//! use simplexopt::{solve, Algorithm, QuadraticObjective, SimplexPoint, SolverConfig};
//!
//! let obj = QuadraticObjective::new(Array2::eye(3), vec![0.5, 0.0, 0.0]).unwrap();
//! let cfg = SolverConfig::for_algorithm("as-pg".parse::<Algorithm>().unwrap());
//! let res = solve(&obj, &SimplexPoint::vertex(3, 2).unwrap(), &cfg).unwrap();
//! assert!(res.gap_final <= 1e-6);
//! ```

pub mod active_set;
pub mod directions;
pub mod error;
pub mod line_search;
pub mod objectives;
pub mod simplex;
pub mod solver;
pub mod vector;

pub use active_set::{ActiveSetConfig, ActiveSetEstimate, MultiplierValues, ShiftResult};
pub use directions::{Direction, DirectionKind, DirectionRule, PgConfig};
pub use error::{Error, Result};
pub use line_search::LineSearchConfig;
pub use objectives::{
    ChebyshevObjective, FnObjective, LipschitzSource, Objective, QuadraticObjective,
};
pub use simplex::{is_feasible, project_simplex, stationarity_gap, FaceIndexSet, SimplexPoint};
pub use solver::{
    solve, Algorithm, IterationRecord, LineSearchKind, SolveResult, SolveStatus, SolverConfig,
    StepKind,
};
