use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use simplexopt::{Algorithm, LineSearchKind, SimplexPoint};
use simplexopt_bench::experiment::{self, run_single, write_outputs, ExperimentReport, Instance};
use simplexopt_bench::problem::Problem;
use simplexopt_bench::{run_experiment, ExperimentConfig, Family, ProblemFile, RunSummary};

#[derive(Parser)]
#[command(
    name = "simplexopt",
    version,
    about = "Active-set first-order methods over the unit simplex"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one instance and write it as a problem file.
    Generate(Common),
    /// Solve one instance (from a problem file or generated) with each algorithm.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Problem file to load instead of generating.
        #[arg(long)]
        problem: Option<PathBuf>,
        /// Starting point.
        #[arg(long, value_enum)]
        start: Option<StartKind>,
    },
    /// Run a seeded experiment over several instances and starts.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        instances: usize,
        /// Random starts per quadratic instance (Chebyshev runs use e₁ only).
        #[arg(long, default_value_t = 10)]
        starts: usize,
        /// Also write every generated instance under `<out>/problems`.
        #[arg(long)]
        save_problems: bool,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (generate) or directory (solve, bench).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FamilyArg::Quadratic)]
    family: FamilyArg,
    #[arg(long, default_value_t = 512)]
    n: usize,
    /// Fraction of nonzeros in the planted point (quadratic).
    #[arg(long, default_value_t = 0.1)]
    rho: f64,
    /// Weight of the positive definite part of Q (quadratic).
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Sample dimension (chebyshev).
    #[arg(long, default_value_t = 10)]
    m: usize,
    /// Algorithm to run; repeat for several. Defaults to all six.
    #[arg(long = "algo", value_parser = parse_algorithm)]
    algos: Vec<Algorithm>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Iteration limit; defaults to n.
    #[arg(long)]
    maxit: Option<usize>,
    #[arg(long, value_enum, default_value_t = LineSearchArg::Armijo)]
    line_search: LineSearchArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Quadratic,
    Chebyshev,
}

#[derive(Clone, Copy, ValueEnum)]
enum LineSearchArg {
    Armijo,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum StartKind {
    /// First vertex.
    E1,
    Barycenter,
    /// Projection of seeded uniform noise.
    Random,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: simplexopt::Error| e.to_string())
}

impl Common {
    fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            family: match self.family {
                FamilyArg::Quadratic => Family::Quadratic,
                FamilyArg::Chebyshev => Family::Chebyshev,
            },
            n: self.n,
            rho: self.rho,
            theta: self.theta,
            m: self.m,
            seed: self.seed,
            algorithms: if self.algos.is_empty() {
                Algorithm::ALL.to_vec()
            } else {
                self.algos.clone()
            },
            tol: self.tol,
            maxit: self.maxit,
            line_search: match self.line_search {
                LineSearchArg::Armijo => LineSearchKind::Armijo,
                LineSearchArg::Exact => LineSearchKind::ExactQuadratic,
            },
            ..Default::default()
        }
    }
}

fn print_runs(runs: &[&RunSummary]) {
    println!(
        "{:<18} {:>5} {:<8} {:<20} {:>6} {:>16} {:>10} {:>9}",
        "problem", "start", "algo", "status", "iters", "f_final", "gap", "time_s"
    );
    for s in runs {
        println!(
            "{:<18} {:>5} {:<8} {:<20} {:>6} {:>16.8} {:>10.2e} {:>9.4}",
            s.problem, s.start, s.algorithm, s.status, s.iters, s.f_final, s.gap_final, s.cpu_time
        );
        if let Some(e) = &s.error {
            println!("    error: {e}");
        }
    }
}

fn print_aggregate(report: &ExperimentReport) {
    let mut by_algo: BTreeMap<&str, Vec<&RunSummary>> = BTreeMap::new();
    for r in &report.runs {
        by_algo
            .entry(&r.summary.algorithm)
            .or_default()
            .push(&r.summary);
    }
    println!(
        "{:<8} {:>5} {:>9} {:>10} {:>10} {:>16} {:>10}",
        "algo", "runs", "converged", "mean_iter", "mean_time", "mean_f", "identified"
    );
    for (algo, runs) in by_algo {
        let k = runs.len() as f64;
        let converged = runs.iter().filter(|s| s.status == "converged").count();
        let identified = runs.iter().filter(|s| s.identified == Some(true)).count();
        println!(
            "{:<8} {:>5} {:>9} {:>10.1} {:>10.4} {:>16.8} {:>10}",
            algo,
            runs.len(),
            converged,
            runs.iter().map(|s| s.iters as f64).sum::<f64>() / k,
            runs.iter().map(|s| s.cpu_time).sum::<f64>() / k,
            runs.iter().map(|s| s.f_final).sum::<f64>() / k,
            identified
        );
    }
}

fn generate(common: &Common) -> Result<()> {
    let cfg = common.experiment();
    cfg.validate()?;
    let inst = experiment::build_instance(
        &ExperimentConfig {
            instances: 1,
            ..cfg.clone()
        },
        0,
    )?;
    let path = common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.json", inst.id)));
    inst.file
        .write(&path)
        .with_context(|| format!("writing {}", path.display()))?;
    println!(
        "wrote {} ({}, n={})",
        path.display(),
        inst.problem.family(),
        inst.problem.dim()
    );
    Ok(())
}

fn load_instance(common: &Common, problem: Option<&PathBuf>) -> Result<Instance> {
    let cfg = common.experiment();
    let Some(path) = problem else {
        return Ok(experiment::build_instance(&cfg, 0)?);
    };
    let file = ProblemFile::read(path).with_context(|| format!("reading {}", path.display()))?;
    let decoded = file.to_problem()?;
    let planted = file.planted()?;
    let zero_set = planted
        .as_ref()
        .map(|p| (0..p.dim()).filter(|&i| p[i] == 0.0).collect());
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "problem".into());
    Ok(Instance {
        id: stem,
        problem: decoded,
        planted,
        zero_set,
        file,
    })
}

fn solve_cmd(common: &Common, problem: Option<&PathBuf>, start: Option<StartKind>) -> Result<i32> {
    let inst = load_instance(common, problem)?;
    let n = inst.problem.dim();
    let mut cfg = common.experiment();
    cfg.n = n;
    cfg.instances = 1;
    cfg.starts = 1;
    cfg.family = match inst.problem {
        Problem::Quadratic(_) => Family::Quadratic,
        Problem::Chebyshev(_) => Family::Chebyshev,
    };
    let start = start.unwrap_or(match cfg.family {
        Family::Quadratic => StartKind::Random,
        Family::Chebyshev => StartKind::E1,
    });
    let x0 = match start {
        StartKind::E1 => SimplexPoint::vertex(n, 0)?,
        StartKind::Barycenter => SimplexPoint::barycenter(n)?,
        StartKind::Random => experiment::random_start(n, cfg.start_seed(0, 0))?,
    };
    let runs: Vec<_> = cfg
        .algorithms
        .iter()
        .map(|&a| run_single(&cfg, &inst, 0, 0, &x0, a))
        .collect();
    let report = ExperimentReport {
        config: cfg.record(),
        instances: Vec::new(),
        runs,
    };
    print_runs(&report.runs.iter().map(|r| &r.summary).collect::<Vec<_>>());
    if let Some(out) = &common.out {
        write_outputs(&report, out)?;
    }
    Ok(report.exit_code())
}

fn bench_cmd(common: &Common, instances: usize, starts: usize, save_problems: bool) -> Result<i32> {
    let cfg = ExperimentConfig {
        instances,
        starts,
        save_problems,
        ..common.experiment()
    };
    let Some(out) = &common.out else {
        bail!("bench needs --out <dir>");
    };
    let report = run_experiment(&cfg, out)?;
    print_aggregate(&report);
    if report.error_count() > 0 {
        eprintln!(
            "{} run(s) failed; see {}",
            report.error_count(),
            out.join("summary.json").display()
        );
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Generate(common) => generate(common).map(|_| 0),
        Command::Solve {
            common,
            problem,
            start,
        } => solve_cmd(common, problem.as_ref(), *start),
        Command::Bench {
            common,
            instances,
            starts,
            save_problems,
        } => bench_cmd(common, *instances, *starts, *save_problems),
    };
    match outcome {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
