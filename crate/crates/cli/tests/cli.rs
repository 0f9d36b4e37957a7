use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_pgexplore");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn explore(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["explore", "--world", "builtin:two_rooms", "--seed", "3", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

const TRIANGLE: &str = "VERTEX_SE2 0 0 0 0\n\
VERTEX_SE2 1 1 0 0\n\
VERTEX_SE2 2 0 1 0\n\
EDGE_SE2 0 1 1 0 0 1 0 0 1 0 1\n\
EDGE_SE2 1 2 -1 1 0 1 0 0 1 0 1\n\
EDGE_SE2 2 0 0 -1 0 1 0 0 1 0 1\n";

#[test]
fn explore_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = explore(&out, &["--dump-candidates"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["episode.csv", "timing.csv", "map.pgm", "graph.txt"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let csv = fs::read_to_string(out.join("episode.csv")).unwrap();
    assert!(csv.starts_with("epoch,x_est,y_est,theta_est,"));
    assert!(fs::read(out.join("map.pgm")).unwrap().starts_with(b"P5"));
    assert!(fs::read_dir(out.join("candidates")).unwrap().count() > 0);
    assert!(stdout(&o).contains("status: complete"));
}

#[test]
fn explore_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(explore(&a, &[]).status.code(), Some(0));
    assert_eq!(explore(&b, &["--jobs", "3"]).status.code(), Some(0));
    for f in ["episode.csv", "graph.txt", "map.pgm"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn missing_world_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let world = dir.path().join("absent.txt");
    let o = run(&["explore", "--world", world.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("absent.txt"));
    assert!(!out.exists());
}

#[test]
fn epoch_cap_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = explore(&out, &["--epoch-cap", "1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(out.join("episode.csv").is_file());
}

#[test]
fn eval_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tri.g2o");
    fs::write(&path, TRIANGLE).unwrap();
    let o = run(&["eval", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("dopt_graph: 2.08008382"), "{text}");
    assert!(text.contains("log_tree_weight: 1.09861229"), "{text}");
}

#[test]
fn eval_disconnected_and_malformed() {
    let dir = tempfile::tempdir().unwrap();
    let split = dir.path().join("split.g2o");
    fs::write(&split, "VERTEX_SE2 0 0 0 0\nVERTEX_SE2 1 1 0 0\n").unwrap();
    let o = run(&["eval", split.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("dopt_graph: 0"));
    assert!(stdout(&o).contains("disconnected"));

    let mut text = String::new();
    for i in 0..13 {
        text.push_str(&format!("VERTEX_SE2 {i} {i} 0 0\n"));
    }
    text.push_str("EDGE_SE2 0 1 1 0 0 1 0 0 oops 0 1\n");
    let bad = dir.path().join("bad.g2o");
    fs::write(&bad, text).unwrap();
    let o = run(&["eval", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("parse error: line 14"), "{}", stderr(&o));
}

#[test]
fn oracle_suites() {
    let o = run(&["oracle", "trees"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("overall: PASS"));
    let o = run(&["oracle", "bogus"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_and_print() {
    let o = run(&["--print-config"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("mapping.bandwidth = 0.75"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tuned.cfg");
    fs::write(&cfg, "# tuned\nmapping.bandwidth = 1.25\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "--print-config", "explore", "--set", "planner.spacing=0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("mapping.bandwidth = 1.25"));
    assert!(text.contains("planner.spacing = 0.5"));

    fs::write(&cfg, "mapping.bandwidth = wide\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "--print-config"]);
    assert_eq!(o.status.code(), Some(1));
}
