use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_freiman"))
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().arg("--no-timing").args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn last_line(o: &Output) -> String {
    stdout(o).lines().last().unwrap_or_default().to_string()
}

struct Files {
    _dir: TempDir,
    s012: String,
    ap: String,
    pyth: String,
    squares: String,
}

fn files() -> Files {
    let dir = TempDir::new().unwrap();
    let p = |name: &str, body: &str| write(dir.path(), name, body).to_string_lossy().into_owned();
    Files {
        s012: p("s012.txt", "# three points\n0\n1\n2\n"),
        ap: p("ap.txt", "vars 3\nlinear: 1 1 -2 0\n"),
        pyth: p("pyth.txt", "0\n3\n4\n5\n"),
        squares: p("sq.txt", "vars 4\npoly: 1 2 0 0 0; 1 0 2 0 0; -1 0 0 2 0; -1 0 0 0 2\n"),
        _dir: dir,
    }
}

#[test]
fn count_prints_j() {
    let f = files();
    let o = run(&["count", "--s", "2", "--k", "2", &f.s012]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(last_line(&o), "RESULT J=15");
    let oracle = run(&["count", "--s", "2", "--k", "2", "--oracle", &f.s012]);
    assert_eq!(last_line(&oracle), "RESULT J=15");
}

#[test]
fn count_with_phi_file() {
    let f = files();
    let dir = TempDir::new().unwrap();
    let phi = write(dir.path(), "phi.txt", "vars 1\npoly: 1 1\npoly: 1 2\n");
    let o = run(&["count", "--s", "2", "--phi", phi.to_str().unwrap(), &f.s012]);
    assert_eq!(last_line(&o), "RESULT J=15");
}

#[test]
fn header_echoes_config() {
    let f = files();
    let o = run(&["count", "--s", "1", "--k", "1", &f.s012]);
    let first = stdout(&o).lines().next().unwrap().to_string();
    let json: serde_json::Value = serde_json::from_str(first.strip_prefix("# config ").unwrap()).unwrap();
    assert_eq!(json["command"]["subcommand"], "count");
    assert_eq!(json["no_timing"], true);
    assert_eq!(json["budget"], 100_000_000);
}

#[test]
fn verify_identity_and_negative() {
    let f = files();
    let dir = TempDir::new().unwrap();
    let id = write(dir.path(), "id.txt", "0 -> 0\n1 -> 1\n2 -> 2\n");
    let o = run(&["verify", &f.s012, &f.ap, id.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(last_line(&o), "RESULT iso=yes");
    let bad = write(dir.path(), "bad.txt", "0 -> 0\n1 -> 1\n2 -> 5\n");
    let o = run(&["verify", &f.s012, &f.ap, bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample solution lost"));
    assert_eq!(last_line(&o), "RESULT iso=no");
}

#[test]
fn malformed_input_exits_3_with_line() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "set.txt", "0\n1\nseven\n");
    let o = run(&["count", "--s", "1", "--k", "1", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    assert_eq!(last_line(&o), "RESULT status=input_error");
    let missing = run(&["count", "--s", "1", "--k", "1", "/nonexistent/set.txt"]);
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn budget_exits_2() {
    let f = files();
    let o = bin()
        .args([
            "--no-timing",
            "--budget",
            "10",
            "count",
            "--s",
            "3",
            "--k",
            "1",
            &f.s012,
        ])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(last_line(&o), "RESULT status=budget");
}

#[test]
fn condense_trace_and_map() {
    let dir = TempDir::new().unwrap();
    let set = write(dir.path(), "set.txt", "0\n1000000\n2000000\n3000000\n");
    let ap = write(dir.path(), "ap.txt", "vars 3\nlinear: 1 1 -2 0\n");
    let o = run(&[
        "condense",
        "--mode",
        "greedy",
        set.to_str().unwrap(),
        ap.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("step 1 mode=greedy"));
    assert!(text.contains("[map]\n0 -> 0\n1000000 -> 1\n"));
    assert_eq!(
        last_line(&o),
        "RESULT steps=1 env_initial=3000001 env_final=4 stop=no_strict_decrease"
    );
}

#[test]
fn diagonal_certificate() {
    let f = files();
    let o = run(&["condense", "--diagonal", "2", &f.pyth, &f.squares]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("certificate iso=yes solutions=36/36"));
    assert!(last_line(&o).contains("env_bound=10000"));
    let wrong = run(&["condense", "--diagonal", "3", &f.pyth, &f.squares]);
    assert_eq!(wrong.status.code(), Some(3));
}

#[test]
fn densify_single_step() {
    let dir = TempDir::new().unwrap();
    let set = write(dir.path(), "d.txt", "0\n1\n3\n");
    let ap = write(dir.path(), "ap.txt", "vars 3\nlinear: 1 1 -2 0\n");
    let o = run(&["densify", "--single", set.to_str().unwrap(), ap.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(last_line(&o).contains("counts=27/27 card=27"));
    let o = run(&[
        "densify",
        "--epsilon",
        "0.2",
        set.to_str().unwrap(),
        ap.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn minmodel_and_output_file() {
    let dir = TempDir::new().unwrap();
    let set = write(dir.path(), "s.txt", "0\n100\n200\n");
    let ap = write(dir.path(), "ap.txt", "vars 3\nlinear: 1 1 -2 0\n");
    let out = dir.path().join("report.txt");
    let o = bin()
        .args(["--no-timing", "--output", out.to_str().unwrap(), "minmodel"])
        .args([set.to_str().unwrap(), ap.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("[witness]\n-1\n0\n1\n"));
    assert!(text.ends_with("RESULT env=2 candidates=1\n"));
}

#[test]
fn timing_line_precedes_result() {
    let f = files();
    let o = bin().args(["count", "--s", "2", "--k", "2", &f.s012]).output().unwrap();
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[lines.len() - 2].starts_with("# elapsed_ms "));
    assert_eq!(lines[lines.len() - 1], "RESULT J=15");
}
