use std::fs;
use std::process::Command;

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_simplexopt"))
}

#[test]
fn generate_then_solve_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("q.json");
    let out = cli()
        .args([
            "generate",
            "--family",
            "quadratic",
            "--n",
            "40",
            "--rho",
            "0.1",
            "--seed",
            "3",
            "--out",
        ])
        .arg(&problem)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&problem).unwrap()).unwrap();
    assert_eq!(json["kind"], "quadratic");
    assert_eq!(json["n"], 40);
    assert!(json["metadata"]["planted"].is_object());

    let traces = dir.path().join("run");
    let out = cli()
        .args([
            "solve",
            "--algo",
            "as-pg",
            "--algo",
            "pg",
            "--maxit",
            "400",
            "--problem",
        ])
        .arg(&problem)
        .arg("--out")
        .arg(&traces)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("as-pg") && stdout.contains("converged"));
    assert_eq!(fs::read_dir(traces.join("traces")).unwrap().count(), 2);
}

#[test]
fn solve_with_exact_steps_on_chebyshev() {
    let out = cli()
        .args([
            "solve",
            "--family",
            "chebyshev",
            "--n",
            "30",
            "--m",
            "3",
            "--line-search",
            "exact",
            "--algo",
            "as-afw",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("converged"));
}

#[test]
fn bench_writes_summary_and_respects_thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli()
        .args([
            "bench",
            "--n",
            "30",
            "--instances",
            "2",
            "--starts",
            "2",
            "--algo",
            "afw",
            "--algo",
            "as-afw",
        ])
        .args(["--save-problems", "--out"])
        .arg(dir.path())
        .env("SIMPLEXOPT_THREADS", "2")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        fs::read_to_string(dir.path().join("summary.csv"))
            .unwrap()
            .lines()
            .count(),
        9
    );
    assert_eq!(
        fs::read_dir(dir.path().join("problems")).unwrap().count(),
        2
    );
}

#[test]
fn bad_arguments_fail_cleanly() {
    let out = cli().args(["solve", "--algo", "newton"]).output().unwrap();
    assert!(!out.status.success());
    let out = cli().args(["bench", "--n", "30"]).output().unwrap();
    assert!(!out.status.success(), "bench without --out must fail");
    let out = cli()
        .args(["bench", "--n", "30", "--out", "/nonexistent/dir/x"])
        .env("SIMPLEXOPT_THREADS", "zero")
        .output()
        .unwrap();
    assert!(!out.status.success());
}
