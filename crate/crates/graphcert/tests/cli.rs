//! End-to-end checks of the command-line interface: exit codes, output
//! formats, and byte determinism.

use std::path::Path;
use std::process::{Command, Output};

const TRIANGLE: &str = "dim 3\nvertices 3\nedge 1 2 2\nedge 1 3 1\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graphcert"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn analyze_reports_the_triangle_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "triangle.graph", TRIANGLE);
    let out = run(&["analyze", &graph]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("case1"), "{stdout}");
    assert!(stdout.contains("expectation sum 6"), "{stdout}");
    assert!(stdout.contains("f_min: 0.95"), "{stdout}");
}

#[test]
fn analyze_json_is_parseable_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "triangle.graph", TRIANGLE);
    let first = run(&["analyze", &graph, "--format", "json"]);
    let second = run(&["analyze", &graph, "--format", "json"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout, "output must be byte-identical");
    let value: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(value["covered"], serde_json::Value::Bool(true));
    assert!(value["certificate"]["claims"].as_array().unwrap().len() > 3);
}

#[test]
fn analyze_writes_certificates_that_verify() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "triangle.graph", TRIANGLE);
    let cert = dir.path().join("triangle.cert.json");
    let cert_str = cert.to_str().unwrap();

    let out = run(&["analyze", &graph, "--out", cert_str]);
    assert_eq!(out.status.code(), Some(0));
    assert!(cert.exists());

    let verify = run(&["verify", cert_str, &graph]);
    assert_eq!(verify.status.code(), Some(0));
    assert!(String::from_utf8(verify.stdout).unwrap().contains("accept"));
}

#[test]
fn verify_rejects_corruption_and_mismatched_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "triangle.graph", TRIANGLE);
    let cert = dir.path().join("triangle.cert.json");
    let cert_str = cert.to_str().unwrap();
    assert_eq!(
        run(&["analyze", &graph, "--out", cert_str]).status.code(),
        Some(0)
    );

    // flip one digit inside the certificate
    let text = std::fs::read_to_string(&cert).unwrap();
    let corrupted = text.replacen("\"phase\": 0", "\"phase\": 1", 1);
    assert_ne!(text, corrupted, "expected a phase field to corrupt");
    let bad = write(dir.path(), "bad.cert.json", &corrupted);
    let out = run(&["verify", &bad, &graph]);
    assert_eq!(out.status.code(), Some(4));

    // pair the good certificate with a different graph
    let other = write(
        dir.path(),
        "other.graph",
        "dim 3\nvertices 3\nedge 1 2 1\nedge 1 3 1\n",
    );
    let out = run(&["verify", cert_str, &other]);
    assert_eq!(out.status.code(), Some(4));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("different graph"), "{stderr}");
}

#[test]
fn uncovered_graph_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "tiny.graph", "dim 3\nvertices 2\nedge 1 2 1\n");
    let out = run(&["analyze", &graph]);
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("not covered"), "{stdout}");
}

#[test]
fn parse_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "bad.graph", "dim 4\nvertices 2\n");
    assert_eq!(run(&["analyze", &graph]).status.code(), Some(1));
    let missing = dir.path().join("missing.graph");
    assert_eq!(
        run(&["analyze", missing.to_str().unwrap()]).status.code(),
        Some(1)
    );
}

#[test]
fn bounds_match_the_published_numbers() {
    let out = run(&["bounds", "--d", "3", "--q-overlap", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("f_min: 0.95155"), "{stdout}");

    let out = run(&["bounds", "--analytic-limit", "--q-overlap", "1"]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("f_min: 0.90450"), "{stdout}");

    assert_eq!(run(&["bounds", "--d", "4"]).status.code(), Some(1));
}

#[test]
fn bounds_json_round_trips() {
    let out = run(&["bounds", "--d", "5", "--q-overlap", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["q_overlap"], 2);
    assert_eq!(value["dimension"], 5);
}

#[test]
fn selftest_passes_and_fault_injection_fails() {
    let out = run(&["selftest", "--max-d", "5", "--seed", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().filter(|l| l.starts_with("pass")).count() >= 6);

    let out = run(&["selftest", "--max-d", "5", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn selftest_is_deterministic_under_a_seed() {
    let a = run(&["selftest", "--max-d", "3", "--seed", "99"]);
    let b = run(&["selftest", "--max-d", "3", "--seed", "99"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn shipped_sample_graphs_all_analyze() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .join("graphs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("graph") {
            continue;
        }
        let out = run(&["analyze", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", path.display());
        seen += 1;
    }
    assert!(
        seen >= 4,
        "expected the shipped sample graphs, found {seen}"
    );
}
