use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../problems")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdsl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_reproduces_the_first_linear_potential_eigenvalue() {
    let p = problem("linear_potential.cfg");
    let out = run(&["solve", "-p", path_arg(&p), "-n", "1", "-m", "10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("97.90906881979826117698216754181417136074455773973"),
        "{text}"
    );
    assert!(out.stderr.is_empty());
}

#[test]
fn solve_on_zero_potentials_reports_vanishing_corrections() {
    let p = problem("zero.cfg");
    let out = run(&[
        "solve",
        "-p",
        path_arg(&p),
        "-n",
        "2",
        "-m",
        "5",
        "--digits",
        "60",
        "--print-digits",
        "30",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    // (2π/2)^4 = π^4
    assert!(text.contains("97.4090910340024372364403326887"), "{text}");
    assert!(text.contains("all corrections vanish"));
}

#[test]
fn solve_orders_output_by_index() {
    let p = problem("linear_potential.cfg");
    let out = run(&[
        "solve",
        "-p",
        path_arg(&p),
        "-n",
        "5,1,3",
        "-m",
        "2",
        "--digits",
        "60",
    ]);
    let rows: Vec<u32> = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(rows, [1, 3, 5]);
}

#[test]
fn solve_json_export() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("sol.json");
    let p = problem("linear_potential.cfg");
    let out = run(&[
        "solve",
        "-p",
        path_arg(&p),
        "-n",
        "2",
        "-m",
        "3",
        "--digits",
        "80",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let sol = &value[0];
    assert_eq!(sol["n"], 2);
    assert_eq!(sol["m"], 3);
    assert_eq!(sol["terms"].as_array().unwrap().len(), 4);
    assert_eq!(sol["lambda_corrections"].as_array().unwrap().len(), 3);
    // first correction is 1/2 for this potential
    let first: f64 = sol["lambda_corrections"][0]
        .as_str()
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(first, 0.5);
}

#[test]
fn sweep_residual_column_tracks_published_values() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("sweep.csv");
    let p = problem("linear_potential.cfg");
    let out = run(&[
        "sweep",
        "-p",
        path_arg(&p),
        "-n",
        "1",
        "-m",
        "10",
        "-o",
        csv_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let printed = [
        3.3e-5, 2.2e-9, 4.4e-13, 5.7e-17, 1.2e-20, 1.9e-24, 3.8e-28, 7.0e-32, 1.4e-35, 2.8e-39,
    ];
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let headers = reader.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        [
            "n",
            "m",
            "lambda",
            "residual",
            "quadrature_converged",
            "lambda_bound"
        ]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 11);
    assert_eq!(&rows[0][5], "");
    for (row, expected) in rows[1..].iter().zip(printed) {
        let delta: f64 = row[3].parse().unwrap();
        let ratio = delta / expected;
        assert!(
            (0.5..=2.0).contains(&ratio),
            "m = {}: {delta} vs {expected}",
            &row[1]
        );
    }
}

#[test]
fn sweep_csv_round_trips() {
    let p = problem("zero.cfg");
    let out = run(&[
        "sweep",
        "-p",
        path_arg(&p),
        "-n",
        "1,2",
        "-m",
        "3",
        "--digits",
        "40",
    ]);
    let text = stdout(&out);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(reader.headers().unwrap()).unwrap();
    for rec in reader.records() {
        let rec = rec.unwrap();
        let residual: f64 = rec[3].parse().unwrap();
        assert!(residual < 1e-20);
        writer.write_record(&rec).unwrap();
    }
    assert_eq!(
        String::from_utf8(writer.into_inner().unwrap()).unwrap(),
        text
    );
}

#[test]
fn check_verdicts() {
    let sq = problem("squared_harmonic.cfg");
    let out = run(&[
        "check",
        "-p",
        path_arg(&sq),
        "-n",
        "1,3",
        "--omega",
        "0.2",
        "-m",
        "10",
    ]);
    let text = stdout(&out);
    let (first, third) = text.split_once("n = 3").unwrap();
    assert!(first.contains("sufficient condition not met"));
    assert!(first.contains("may still converge"));
    assert!(third.contains("sufficient condition met"));
    assert!(third.contains("|lambda - lambda^10| <="));

    let lin = problem("linear_potential.cfg");
    let out = run(&["check", "-p", path_arg(&lin), "-n", "2", "--format", "json"]);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value[0]["sufficient_condition"], true);
}

#[test]
fn oracle_agrees_on_zero_potentials() {
    let p = problem("zero.cfg");
    let out = run(&[
        "oracle",
        "-p",
        path_arg(&p),
        "-n",
        "1-3",
        "-m",
        "2",
        "--size",
        "20",
        "--digits",
        "60",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for line in stdout(&out).lines().skip(1) {
        let digits: u32 = line.split_whitespace().last().unwrap().parse().unwrap();
        assert!(digits >= 45, "{line}");
    }
}

#[test]
fn errors_go_to_stderr_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "X = 1\nq0 = [0, one]\n").unwrap();
    let out = run(&["solve", "-p", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");

    let out = run(&["solve", "-p", "/nonexistent/problem.cfg"]);
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());

    let out = run(&["solve", "-p", bad.to_str().unwrap(), "--digits", "10"]);
    assert!(!out.status.success());
    let out = run(&["solve", "-p", bad.to_str().unwrap(), "-n", "0"]);
    assert_eq!(out.status.code(), Some(2));
}
