//! Exit-code contract and file outputs of the `sddsolve` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sddsolve::cli::parse_report;
use sddsolve::io::{parse_edge_list, parse_vector, read_vector};
use sddsolve::solve::SolveStatus;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn sddsolve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sddsolve")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_figure_one_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let (out, report) = (dir.path().join("x"), dir.path().join("r.json"));
    let o = sddsolve(&[
        "solve",
        "--matrix",
        path_str(&fixture("figure1.edges")),
        "--rhs",
        path_str(&fixture("figure1.rhs")),
        "--eps",
        "1e-8",
        "--out",
        path_str(&out),
        "--report",
        path_str(&report),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let x = read_vector(&out).unwrap();
    let want = read_vector(&fixture("figure1.solution")).unwrap();
    for (a, b) in x.iter().zip(&want) {
        assert!((a - b).abs() < 1e-8, "{x:?} vs {want:?}");
    }
    let rep = parse_report(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep.status, SolveStatus::Verified);
    assert_eq!(rep.n, 4);
    assert_eq!(rep.seed, 0);
}

#[test]
fn solve_every_mode_and_knob() {
    for mode in ["recursive", "one-level", "pcg-tree"] {
        let o = sddsolve(&[
            "solve",
            "--matrix",
            path_str(&fixture("grid8.edges")),
            "--rhs",
            "random",
            "--mode",
            mode,
            "--tree",
            "max-weight",
            "--sparsifier",
            "identity",
            "--chi",
            "1",
            "--presparsify",
        ]);
        assert_eq!(code(&o), 0, "{mode}: {}", stderr(&o));
    }
}

#[test]
fn solve_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = sddsolve(&["solve", "--matrix", path_str(&fixture("grid8.edges")), "--rhs", "random", "--seed", "7", "--out", path_str(&p)]);
        assert_eq!(code(&o), 0);
        std::fs::read_to_string(p).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn solve_flagged_exits_two() {
    let o = sddsolve(&["solve", "--matrix", path_str(&fixture("grid8.edges")), "--rhs", "random", "--residual-tol", "1e-30"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn solve_input_errors_exit_one() {
    let o = sddsolve(&["solve", "--matrix", path_str(&fixture("nonsdd.mtx")), "--rhs", "ones"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("classification"), "{}", stderr(&o));

    let dir = tempfile::tempdir().unwrap();
    let short = dir.path().join("short");
    std::fs::write(&short, "1\n2\n").unwrap();
    let o = sddsolve(&["solve", "--matrix", path_str(&fixture("figure1.edges")), "--rhs", path_str(&short)]);
    assert_eq!(code(&o), 1);

    let o = sddsolve(&["solve", "--matrix", path_str(&dir.path().join("missing.mtx")), "--rhs", "ones"]);
    assert_eq!(code(&o), 1);

    let bad = dir.path().join("bad.edges");
    std::fs::write(&bad, "0 1 1\n1 2 oops\n").unwrap();
    let o = sddsolve(&["solve", "--matrix", path_str(&bad), "--rhs", "ones"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = sddsolve(&["solve", "--matrix", path_str(&fixture("figure1.edges")), "--rhs", "ones", "--mode", "magic"]);
    assert_eq!(code(&o), 1);
    assert_eq!(code(&sddsolve(&["frobnicate"])), 1);
    assert_eq!(code(&sddsolve(&["--help"])), 0);
}

#[test]
fn fiedler_star_and_single_edge() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v");
    let o = sddsolve(&["fiedler", "--graph", path_str(&fixture("star.edges")), "--eps", "0.1", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let rq: f64 = text.lines().next().unwrap().trim_start_matches("# rayleigh ").parse().unwrap();
    assert!(rq <= 1.1);
    let v = parse_vector(&text).unwrap();
    assert_eq!(v.len(), 4);
    assert!(v.iter().sum::<f64>().abs() < 1e-9);

    let o = sddsolve(&["fiedler", "--graph", path_str(&fixture("single_edge.edges")), "--out", path_str(&out)]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let v = parse_vector(&text).unwrap();
    assert!((v[0].abs() - 0.5f64.sqrt()).abs() < 1e-12 && (v[0] + v[1]).abs() < 1e-12);
    assert!(text.starts_with("# rayleigh 5e0"), "{text}");
}

#[test]
fn fiedler_disconnected_exits_one() {
    let o = sddsolve(&["fiedler", "--graph", path_str(&fixture("two_components.edges"))]);
    assert_eq!(code(&o), 1);
}

#[test]
fn precondition_tree_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("u");
    for method in ["ultra-simple", "ultra-sparsify"] {
        let o = sddsolve(&["precondition", "--graph", path_str(&fixture("tree.edges")), "--method", method, "--t", "2", "--k", "4", "--out", path_str(&out)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let got = parse_edge_list(&std::fs::read_to_string(&out).unwrap()).unwrap();
        let want = parse_edge_list(&std::fs::read_to_string(fixture("tree.edges")).unwrap()).unwrap();
        assert_eq!(got.edges(), want.edges());
    }
}

fn kappa_line(text: &str) -> (f64, f64) {
    let line = text.lines().find(|l| l.starts_with("# kappa")).expect("kappa line");
    let f: Vec<&str> = line.split_whitespace().collect();
    (f[2].parse().unwrap(), f[4].parse().unwrap())
}

#[test]
fn precondition_kappa_within_bounds() {
    let o = sddsolve(&["precondition", "--graph", path_str(&fixture("c5.edges")), "--method", "ultra-simple", "--t", "2", "--kappa"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (kappa, bound) = kappa_line(&String::from_utf8_lossy(&o.stdout));
    assert!(kappa <= bound && bound == 48.0, "{kappa} {bound}");

    let o = sddsolve(&["precondition", "--graph", path_str(&fixture("grid8.edges")), "--method", "ultra-sparsify", "--k", "16", "--kappa"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (kappa, bound) = kappa_line(&String::from_utf8_lossy(&o.stdout));
    assert!(kappa <= 16.0 && bound == 16.0);
}

#[test]
fn precondition_errors() {
    assert_eq!(code(&sddsolve(&["precondition", "--graph", path_str(&fixture("two_components.edges")), "--k", "4"])), 1);
    assert_eq!(code(&sddsolve(&["precondition", "--graph", path_str(&fixture("c5.edges")), "--method", "ultra-simple"])), 1);
    assert_eq!(code(&sddsolve(&["precondition", "--graph", path_str(&fixture("c5.edges"))])), 1);
}

#[test]
fn bench_table_shape_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("bench.json");
    let o = sddsolve(&["bench", "--family", "grid2d", "--sizes", "16,32", "--modes", "pcg-tree", "--report", path_str(&rep)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().count(), 3, "{stdout}");
    let rows: Vec<serde_json::Value> = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["n"], 1024);

    for family in ["path", "random-regular", "random-weighted"] {
        let o = sddsolve(&["bench", "--family", family, "--sizes", "50", "--modes", "recursive,one-level,pcg-tree"]);
        assert_eq!(code(&o), 0, "{family}: {}", stderr(&o));
        assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 4);
    }
}
