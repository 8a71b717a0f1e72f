use std::process::Command;

fn mobo(args: &[&str]) -> (bool, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mobo")).args(args).output().unwrap();
    (
        out.status.success(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn reference_then_score_self_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let z = dir.path().join("z.csv");
    let (ok, _, err) = mobo(&["reference", "--problem", "bnh", "--count", "200", "--out", z.to_str().unwrap()]);
    assert!(ok, "{err}");
    let (ok, out, _) = mobo(&["score", "--front", z.to_str().unwrap(), "--reference", z.to_str().unwrap()]);
    assert!(ok);
    assert_eq!(out.trim().parse::<f64>().unwrap(), 0.0);
}

#[test]
fn nsga2_writes_a_front() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("front.csv");
    let (ok, out, err) = mobo(&[
        "nsga2", "--problem", "zdt2", "--pop", "20", "--gens", "5", "--seed", "1", "--out", f.to_str().unwrap(),
    ]);
    assert!(ok, "{err}");
    assert!(out.starts_with("IGD+:"));
    assert!(std::fs::read_to_string(&f).unwrap().starts_with("f1,f2\n"));
}

#[test]
fn run_and_experiment_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (ok, out, err) = mobo(&[
        "run", "--problem", "zdt1", "--acq", "pi", "--reg", "max", "--beta", "50", "--budget", "8", "--doe", "5",
        "--inner-starts", "4", "--inner-evals", "50", "--pop", "20", "--gens", "5", "--out", d,
    ]);
    assert!(ok, "{err}");
    assert!(out.contains("evaluations: 8"));
    assert!(dir.path().join("rows_0.csv").exists());

    let e = dir.path().join("exp");
    let (ok, out, err) = mobo(&[
        "experiment", "--problem", "tnk", "--acq", "mpi", "--budget", "11", "--reps", "2", "--seed", "3", "--out",
        e.to_str().unwrap(),
    ]);
    assert!(ok, "{err}");
    assert!(out.contains("final front IGD+ mean"));
    assert!(e.join("trace.csv").exists() && e.join("run_4.json").exists());
}

#[test]
fn bad_arguments_fail() {
    assert!(!mobo(&["run", "--acq", "ucb", "--out", "/tmp/x"]).0);
    assert!(!mobo(&["run", "--problem", "dtlz2", "--out", "/tmp/x"]).0);
    assert!(!mobo(&["run", "--beta", "-1", "--out", "/tmp/x"]).0);
}
