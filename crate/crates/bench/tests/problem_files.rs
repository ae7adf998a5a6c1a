use simplexopt_bench::experiment::{build_instance, ExperimentConfig, Family};
use simplexopt_bench::problem::{Problem, ProblemFile};

fn round_trip(cfg: &ExperimentConfig) {
    let inst = build_instance(cfg, 1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    inst.file.write(&path).unwrap();
    let file = ProblemFile::read(&path).unwrap();
    assert_eq!(file, inst.file);
    let back = file.to_problem().unwrap();
    let (a, b) = (inst.problem.objective(), back.objective());
    assert_eq!(a.dim(), b.dim());
    assert_eq!(a.lipschitz().to_bits(), b.lipschitz().to_bits());
    let x = vec![1.0 / a.dim() as f64; a.dim()];
    assert_eq!(a.value(&x).to_bits(), b.value(&x).to_bits());
    assert_eq!(a.gradient(&x), b.gradient(&x));
    assert_eq!(file.planted().unwrap(), inst.planted);
}

#[test]
fn quadratic_files_round_trip_exactly() {
    round_trip(&ExperimentConfig {
        n: 40,
        ..Default::default()
    });
}

#[test]
fn chebyshev_files_round_trip_exactly() {
    let cfg = ExperimentConfig {
        family: Family::Chebyshev,
        n: 30,
        m: 4,
        ..Default::default()
    };
    round_trip(&cfg);
    let inst = build_instance(&cfg, 0).unwrap();
    assert!(matches!(inst.problem, Problem::Chebyshev(_)));
    let json = serde_json::to_value(&inst.file).unwrap();
    assert_eq!(json["kind"], "chebyshev");
    assert_eq!(json["metadata"]["columns"], "standard-normal");
}

#[test]
fn tampered_files_are_rejected() {
    let inst = build_instance(
        &ExperimentConfig {
            n: 10,
            ..Default::default()
        },
        0,
    )
    .unwrap();
    let mut json = serde_json::to_value(&inst.file).unwrap();
    json["n"] = 11.into();
    let file: ProblemFile = serde_json::from_value(json.clone()).unwrap();
    assert!(file.to_problem().is_err());
    json["n"] = 10.into();
    json["format"] = "something-else".into();
    let file: ProblemFile = serde_json::from_value(json).unwrap();
    assert!(file.to_problem().is_err());
}
