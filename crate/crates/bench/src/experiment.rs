//! Multi-run experiment driver: generates instances, runs every algorithm from
//! every start and writes traces, a summary table and error curves.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use simplexopt::{
    project_simplex, solve, Algorithm, FaceIndexSet, IterationRecord, LineSearchKind, SimplexPoint,
    SolveResult, SolveStatus, SolverConfig,
};

use crate::generate::{gen_chebyshev, gen_quadratic, sub_seed, ChebGenConfig, QuadGenConfig};
use crate::problem::{EncodedArray, GeneratorMetadata, Problem, ProblemFile};
use crate::BenchError;

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "SIMPLEXOPT_THREADS";

pub const TRACE_HEADER: &str = "k,f,gap,n_active,epsilon,alpha,step_kind,drop,elapsed_s,evals";
pub const SUMMARY_HEADER: &str =
    "problem,instance,start,algorithm,status,iters,f_final,gap_final,n_active,identified,evals,cpu_time";
pub const CURVE_HEADER: &str = "problem,start,algorithm,k,error,elapsed_s";
pub const MEAN_CURVE_HEADER: &str = "algorithm,k,mean_error,runs";

const START_STREAM: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Quadratic,
    Chebyshev,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Quadratic => "quadratic",
            Family::Chebyshev => "chebyshev",
        }
    }
}

impl FromStr for Family {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s.to_ascii_lowercase().as_str() {
            "quadratic" | "quad" => Ok(Family::Quadratic),
            "chebyshev" | "cheb" => Ok(Family::Chebyshev),
            _ => Err(BenchError::Config(format!("unknown family '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub family: Family,
    pub n: usize,
    pub rho: f64,
    pub theta: f64,
    pub m: usize,
    pub instances: usize,
    /// Starts per instance; Chebyshev runs always use the single start `e₁`.
    pub starts: usize,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub tol: f64,
    /// `None` means `n`.
    pub maxit: Option<usize>,
    pub line_search: LineSearchKind,
    pub save_problems: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            family: Family::Quadratic,
            n: 512,
            rho: 0.1,
            theta: 0.5,
            m: 10,
            instances: 10,
            starts: 10,
            seed: 0,
            algorithms: Algorithm::ALL.to_vec(),
            tol: 1e-6,
            maxit: None,
            line_search: LineSearchKind::Armijo,
            save_problems: false,
        }
    }
}

impl ExperimentConfig {
    pub fn effective_starts(&self) -> usize {
        match self.family {
            Family::Quadratic => self.starts,
            Family::Chebyshev => 1,
        }
    }

    pub fn solver_config(&self, algo: Algorithm) -> SolverConfig {
        SolverConfig {
            tol: self.tol,
            maxit: self.maxit,
            line_search: self.line_search,
            seed: self.seed,
            ..SolverConfig::for_algorithm(algo)
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.instances == 0 || self.effective_starts() == 0 {
            return Err(BenchError::Config(
                "need at least one instance and one start".into(),
            ));
        }
        if self.algorithms.is_empty() {
            return Err(BenchError::Config("no algorithms selected".into()));
        }
        match self.family {
            Family::Quadratic => self.quad_config(0).validate(),
            Family::Chebyshev => self.cheb_config(0).validate(),
        }?;
        self.solver_config(self.algorithms[0]).validate()?;
        Ok(())
    }

    pub fn instance_seed(&self, instance: usize) -> u64 {
        sub_seed(self.seed, instance as u64)
    }

    pub fn start_seed(&self, instance: usize, start: usize) -> u64 {
        sub_seed(
            self.seed,
            START_STREAM + (instance * self.effective_starts() + start) as u64,
        )
    }

    fn quad_config(&self, instance: usize) -> QuadGenConfig {
        QuadGenConfig {
            n: self.n,
            rho: self.rho,
            theta: self.theta,
            seed: self.instance_seed(instance),
        }
    }

    fn cheb_config(&self, instance: usize) -> ChebGenConfig {
        ChebGenConfig {
            n: self.n,
            m: self.m,
            seed: self.instance_seed(instance),
        }
    }

    pub fn record(&self) -> ConfigRecord {
        ConfigRecord {
            family: self.family,
            n: self.n,
            rho: (self.family == Family::Quadratic).then_some(self.rho),
            theta: (self.family == Family::Quadratic).then_some(self.theta),
            m: (self.family == Family::Chebyshev).then_some(self.m),
            instances: self.instances,
            starts: self.effective_starts(),
            seed: self.seed,
            algorithms: self.algorithms.iter().map(|a| a.to_string()).collect(),
            tol: self.tol,
            maxit: self.maxit.unwrap_or(self.n),
            line_search: self.line_search.as_str().to_string(),
        }
    }
}

/// Serialized form of [`ExperimentConfig`] embedded in the JSON summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub family: Family,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub instances: usize,
    pub starts: usize,
    pub seed: u64,
    pub algorithms: Vec<String>,
    pub tol: f64,
    pub maxit: usize,
    pub line_search: String,
}

/// One generated instance with its provenance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub problem: Problem,
    pub planted: Option<SimplexPoint>,
    pub zero_set: Option<Vec<usize>>,
    pub file: ProblemFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub id: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accepted_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planted_value: Option<f64>,
    pub lipschitz: f64,
}

pub fn build_instance(cfg: &ExperimentConfig, instance: usize) -> Result<Instance, BenchError> {
    let id = format!("{}-i{instance:03}", cfg.family.as_str());
    match cfg.family {
        Family::Quadratic => {
            let qc = cfg.quad_config(instance);
            let g = gen_quadratic(&qc)?;
            let meta = GeneratorMetadata {
                seed: Some(qc.seed),
                accepted_seed: Some(g.accepted_seed),
                rho: Some(qc.rho),
                theta: Some(qc.theta),
                planted: Some(EncodedArray::from_vec(&g.planted)),
                columns: None,
            };
            let file = ProblemFile::quadratic(&g.objective, meta);
            Ok(Instance {
                id,
                problem: Problem::Quadratic(g.objective),
                planted: Some(g.planted),
                zero_set: Some(g.zero_set),
                file,
            })
        }
        Family::Chebyshev => {
            let cc = cfg.cheb_config(instance);
            let obj = gen_chebyshev(&cc)?;
            let meta = GeneratorMetadata {
                seed: Some(cc.seed),
                columns: Some("standard-normal".into()),
                ..Default::default()
            };
            let file = ProblemFile::chebyshev(&obj, meta);
            Ok(Instance {
                id,
                problem: Problem::Chebyshev(obj),
                planted: None,
                zero_set: None,
                file,
            })
        }
    }
}

/// Projection of uniform noise onto the simplex.
pub fn random_start(n: usize, seed: u64) -> Result<SimplexPoint, BenchError> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let y: Vec<f64> = (0..n).map(|_| r.random::<f64>()).collect();
    Ok(project_simplex(&y, &FaceIndexSet::full(n)?)?)
}

pub fn start_point(
    cfg: &ExperimentConfig,
    instance: usize,
    start: usize,
) -> Result<SimplexPoint, BenchError> {
    match cfg.family {
        Family::Quadratic => random_start(cfg.n, cfg.start_seed(instance, start)),
        Family::Chebyshev => Ok(SimplexPoint::vertex(cfg.n, 0)?),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub problem: String,
    pub instance: usize,
    pub start: usize,
    pub algorithm: String,
    pub status: String,
    pub iters: usize,
    pub f_final: f64,
    pub gap_final: f64,
    pub n_active: usize,
    /// Final active set equals the planted zero set; quadratic family only.
    pub identified: Option<bool>,
    pub evals: usize,
    pub cpu_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Full output of one (instance, start, algorithm) run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub trace: Vec<IterationRecord>,
}

impl RunOutput {
    pub fn errored(&self) -> bool {
        self.summary.error.is_some()
    }
}

fn summarize(
    id: &str,
    instance: usize,
    start: usize,
    algo: Algorithm,
    zero_set: Option<&[usize]>,
    outcome: Result<SolveResult, simplexopt::Error>,
    cpu_time: f64,
) -> RunOutput {
    match outcome {
        Ok(res) => {
            let error = match (&res.status, &res.failure) {
                (SolveStatus::LineSearchFailure, Some(e)) => Some(e.to_string()),
                (SolveStatus::LineSearchFailure, None) => Some("line search failure".into()),
                _ => None,
            };
            RunOutput {
                summary: RunSummary {
                    problem: id.to_string(),
                    instance,
                    start,
                    algorithm: algo.to_string(),
                    status: res.status.as_str().to_string(),
                    iters: res.iterations,
                    f_final: res.f_final,
                    gap_final: res.gap_final,
                    n_active: res.final_active_set.len(),
                    identified: zero_set.map(|z| z == res.final_active_set.as_slice()),
                    evals: res.trace.iter().map(|t| t.evals).sum(),
                    cpu_time,
                    error,
                },
                trace: res.trace,
            }
        }
        Err(e) => RunOutput {
            summary: RunSummary {
                problem: id.to_string(),
                instance,
                start,
                algorithm: algo.to_string(),
                status: "error".into(),
                iters: 0,
                f_final: f64::NAN,
                gap_final: f64::NAN,
                n_active: 0,
                identified: zero_set.map(|_| false),
                evals: 0,
                cpu_time,
                error: Some(e.to_string()),
            },
            trace: Vec::new(),
        },
    }
}

/// Runs one algorithm on one instance from one start.
pub fn run_single(
    cfg: &ExperimentConfig,
    inst: &Instance,
    instance: usize,
    start: usize,
    x0: &SimplexPoint,
    algo: Algorithm,
) -> RunOutput {
    let scfg = cfg.solver_config(algo);
    let t0 = Instant::now();
    let outcome = solve(inst.problem.objective(), x0, &scfg);
    let cpu = t0.elapsed().as_secs_f64();
    summarize(
        &inst.id,
        instance,
        start,
        algo,
        inst.zero_set.as_deref(),
        outcome,
        cpu,
    )
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub config: ConfigRecord,
    pub instances: Vec<InstanceRecord>,
    pub runs: Vec<RunOutput>,
}

impl ExperimentReport {
    pub fn error_count(&self) -> usize {
        self.runs.iter().filter(|r| r.errored()).count()
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.error_count() > 0)
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, BenchError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| {
            BenchError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got '{v}'"
            ))
        })?;
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| BenchError::Config(e.to_string()))
}

/// Generates instances and runs every configured algorithm from every start.
/// Runs execute in parallel; results come back in (instance, start, algorithm)
/// order.
pub fn execute(cfg: &ExperimentConfig) -> Result<(Vec<Instance>, ExperimentReport), BenchError> {
    cfg.validate()?;
    let pool = thread_pool()?;
    pool.install(|| {
        let instances: Vec<Instance> = (0..cfg.instances)
            .into_par_iter()
            .map(|i| build_instance(cfg, i))
            .collect::<Result<_, _>>()?;
        let starts = cfg.effective_starts();
        let mut jobs = Vec::new();
        for i in 0..cfg.instances {
            for s in 0..starts {
                jobs.push((i, s, start_point(cfg, i, s)?));
            }
        }
        let runs: Vec<RunOutput> = jobs
            .par_iter()
            .flat_map_iter(|(i, s, x0)| cfg.algorithms.iter().map(move |&a| (*i, *s, x0, a)))
            .map(|(i, s, x0, a)| run_single(cfg, &instances[i], i, s, x0, a))
            .collect();
        let records = instances
            .iter()
            .enumerate()
            .map(|(i, inst)| InstanceRecord {
                id: inst.id.clone(),
                seed: cfg.instance_seed(i),
                accepted_seed: inst.file.metadata.accepted_seed,
                planted_value: inst
                    .planted
                    .as_ref()
                    .map(|p| inst.problem.objective().value(p)),
                lipschitz: inst.problem.objective().lipschitz(),
            })
            .collect();
        Ok((
            instances,
            ExperimentReport {
                config: cfg.record(),
                instances: records,
                runs,
            },
        ))
    })
}

/// [`execute`] plus all output files under `out_dir`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<ExperimentReport, BenchError> {
    fs::create_dir_all(out_dir.join("traces"))?;
    let (instances, report) = execute(cfg)?;
    if cfg.save_problems {
        fs::create_dir_all(out_dir.join("problems"))?;
        for inst in &instances {
            inst.file
                .write(&out_dir.join("problems").join(format!("{}.json", inst.id)))?;
        }
    }
    write_outputs(&report, out_dir)?;
    Ok(report)
}

pub fn trace_file_name(s: &RunSummary) -> String {
    format!("{}_s{:03}_{}.csv", s.problem, s.start, s.algorithm)
}

pub fn trace_csv(trace: &[IterationRecord]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for t in trace {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            t.k,
            t.f,
            t.gap,
            t.n_active,
            t.epsilon,
            t.alpha,
            t.step_kind.as_str(),
            u8::from(t.drop_step),
            t.elapsed,
            t.evals
        )
        .unwrap();
    }
    out
}

pub fn summary_csv(runs: &[RunOutput]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in runs {
        let s = &r.summary;
        let identified = s.identified.map(|b| b.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            s.problem,
            s.instance,
            s.start,
            s.algorithm,
            s.status,
            s.iters,
            s.f_final,
            s.gap_final,
            s.n_active,
            identified,
            s.evals,
            s.cpu_time
        )
        .unwrap();
    }
    out
}

/// Key grouping an algorithm with its active-set counterpart.
fn pair_key(s: &RunSummary) -> (String, usize, String) {
    let algo: Algorithm = s.algorithm.parse().expect("algorithm names round-trip");
    (s.problem.clone(), s.start, algo.rule.to_string())
}

/// `(k, E^k, elapsed_s)` samples of one run.
pub type ErrorCurve = Vec<(usize, f64, f64)>;

/// `E^k = f(x^k) − f_min`, with `f_min` the best value reached by an algorithm
/// or its counterpart on the same (instance, start).
pub fn error_curves(runs: &[RunOutput]) -> Vec<(usize, ErrorCurve)> {
    let mut best: BTreeMap<(String, usize, String), f64> = BTreeMap::new();
    for r in runs.iter().filter(|r| !r.trace.is_empty()) {
        let f_min = r.trace.iter().map(|t| t.f).fold(f64::INFINITY, f64::min);
        let e = best.entry(pair_key(&r.summary)).or_insert(f64::INFINITY);
        *e = e.min(f_min);
    }
    runs.iter()
        .enumerate()
        .filter(|(_, r)| !r.trace.is_empty())
        .map(|(idx, r)| {
            let f_min = best[&pair_key(&r.summary)];
            (
                idx,
                r.trace
                    .iter()
                    .map(|t| (t.k, (t.f - f_min).max(0.0), t.elapsed))
                    .collect(),
            )
        })
        .collect()
}

pub fn curves_csv(runs: &[RunOutput]) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for (idx, curve) in error_curves(runs) {
        let s = &runs[idx].summary;
        for (k, e, t) in curve {
            writeln!(out, "{},{},{},{k},{e},{t}", s.problem, s.start, s.algorithm).unwrap();
        }
    }
    out
}

/// Error averaged over runs per algorithm and iteration; a finished run keeps
/// contributing its last error.
pub fn mean_curves_csv(runs: &[RunOutput]) -> String {
    let curves = error_curves(runs);
    let mut by_algo: BTreeMap<String, Vec<Vec<f64>>> = BTreeMap::new();
    for (idx, curve) in curves {
        by_algo
            .entry(runs[idx].summary.algorithm.clone())
            .or_default()
            .push(curve.iter().map(|c| c.1).collect());
    }
    let mut out = String::from(MEAN_CURVE_HEADER);
    out.push('\n');
    for (algo, curves) in by_algo {
        let len = curves.iter().map(Vec::len).max().unwrap_or(0);
        for k in 0..len {
            let sum: f64 = curves.iter().map(|c| c[k.min(c.len() - 1)]).sum();
            writeln!(
                out,
                "{algo},{k},{},{}",
                sum / curves.len() as f64,
                curves.len()
            )
            .unwrap();
        }
    }
    out
}

#[derive(Serialize)]
struct SummaryDocument<'a> {
    config: &'a ConfigRecord,
    instances: &'a [InstanceRecord],
    runs: Vec<&'a RunSummary>,
    errors: usize,
}

pub fn summary_json(report: &ExperimentReport) -> Result<String, BenchError> {
    let doc = SummaryDocument {
        config: &report.config,
        instances: &report.instances,
        runs: report.runs.iter().map(|r| &r.summary).collect(),
        errors: report.error_count(),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

pub fn write_outputs(report: &ExperimentReport, out_dir: &Path) -> Result<(), BenchError> {
    let traces = out_dir.join("traces");
    fs::create_dir_all(&traces)?;
    for r in &report.runs {
        fs::write(
            traces.join(trace_file_name(&r.summary)),
            trace_csv(&r.trace),
        )?;
    }
    fs::write(out_dir.join("summary.csv"), summary_csv(&report.runs))?;
    fs::write(out_dir.join("summary.json"), summary_json(report)?)?;
    fs::write(out_dir.join("error_curves.csv"), curves_csv(&report.runs))?;
    fs::write(
        out_dir.join("error_mean.csv"),
        mean_curves_csv(&report.runs),
    )?;
    Ok(())
}
