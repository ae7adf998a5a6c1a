//! Benchmark harness for `simplexopt`: seeded instance generators, a JSON
//! problem-file format and an experiment driver that writes per-run traces,
//! summary tables and optimization-error curves.

pub mod experiment;
pub mod generate;
pub mod problem;

pub use experiment::{run_experiment, ExperimentConfig, ExperimentReport, Family, RunSummary};
pub use generate::{gen_chebyshev, gen_quadratic, ChebGenConfig, PlantedQuadratic, QuadGenConfig};
pub use problem::{Problem, ProblemFile};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("generator: {0}")]
    Generator(String),
    #[error("problem file: {0}")]
    Format(String),
    #[error(transparent)]
    Solver(#[from] simplexopt::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
