//! End-to-end checks of the binary: construct/verify round trips, the
//! exit-code contract, artifact streaming, JSON reports, and byte-stable
//! reruns in exact mode.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cubature"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cubature-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn construct_verify_roundtrip() {
    let file = tmp("oct.ps");
    let (code, stdout, _) =
        run(&["construct", "octahedron", "--out", file.to_str().unwrap(), "--check"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("verified_strength=3"));

    let (code, stdout, _) = run(&["verify", "--in", file.to_str().unwrap(), "--kmax", "5"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("strength=3 tight=yes"), "{stdout}");
    assert!(stdout.contains("mode=exact"));
    assert!(stdout.contains("criterion=kernel"));
}

#[test]
fn verify_is_byte_stable_in_exact_mode() {
    let file = tmp("cross4.ps");
    let (code, _, _) =
        run(&["construct", "cross_polytope(4)", "--out", file.to_str().unwrap()]);
    assert_eq!(code, 0);
    let args = ["verify", "--in", file.to_str().unwrap(), "--kmax", "4", "--criterion", "both"];
    let (c1, out1, _) = run(&args);
    let (c2, out2, _) = run(&args);
    assert_eq!(c1, 0);
    assert_eq!(c2, 0);
    assert_eq!(out1, out2, "exact-mode reports must be byte-identical");
    assert!(out1.contains("criteria_agree=yes"));
}

#[test]
fn exit_codes_follow_the_contract() {
    let file = tmp("ico-codes.ps");
    let (code, _, _) = run(&["construct", "icosahedron", "--out", file.to_str().unwrap()]);
    assert_eq!(code, 0);

    // verification failure
    let (code, _, stderr) = run(&[
        "verify",
        "--in",
        file.to_str().unwrap(),
        "--kmax",
        "6",
        "--expect-strength",
        "6",
    ]);
    assert_eq!(code, 1, "{stderr}");
    assert!(stderr.contains("verification failed"));

    // usage errors: unknown flag and missing input file
    let (code, _, _) = run(&["verify", "--in", file.to_str().unwrap()]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["verify", "--in", "/nonexistent.ps", "--kmax", "3"]);
    assert_eq!(code, 2);

    // budget guard
    let out = bin()
        .args(["lattice", "strength", "--name", "E8", "--m", "2", "--kmax", "4"])
        .env("CUBATURE_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn theta_scan_reports_no_zeros() {
    let (code, stdout, _) = run(&["theta-scan", "--sequence", "tau", "--max", "60"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("zeros: none"), "{stdout}");
}

#[test]
fn lattice_shell_and_catalog_listing() {
    let (code, stdout, _) = run(&["lattice", "shell", "--name", "E8", "--m", "2"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("shell_size=240"));

    let (code, stdout, _) = run(&["construct", "--list"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("icosahedron"));
    assert!(stdout.contains("e8_two_shell_s7"));
}

#[test]
fn artifact_streams_to_stdout() {
    let (code, stdout, stderr) = run(&["construct", "simplex(3)", "--out", "-"]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("pointset n=4"), "{stdout}");
    assert!(!stdout.contains("command:"), "report must move to stderr");
    assert!(stderr.contains("command:"));
}

#[test]
fn reduce_meets_the_dimension_bound() {
    let file = tmp("oct-reduce.ps");
    let (code, _, _) = run(&["construct", "octahedron", "--out", file.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, stdout, _) =
        run(&["reduce", "--in", file.to_str().unwrap(), "--space", "F:1"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("space_dim=4"));
    let final_line = stdout
        .lines()
        .find(|l| l.starts_with("final_points="))
        .expect("final_points line");
    let n: usize = final_line.trim_start_matches("final_points=").parse().unwrap();
    assert!(n <= 4, "{stdout}");
}

#[test]
fn search_finds_the_pentagon() {
    let (code, stdout, _) =
        run(&["search", "--n", "2", "--k", "4", "--N", "5", "--seed", "7"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("strength=4 tight=yes"), "{stdout}");
}

#[test]
fn json_report_is_written() {
    let file = tmp("tet.ps");
    let json = tmp("tet.json");
    let (code, _, _) = run(&["construct", "tetrahedron", "--out", file.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, _, _) = run(&[
        "verify",
        "--in",
        file.to_str().unwrap(),
        "--kmax",
        "3",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["exit"], 0);
    assert_eq!(doc["mode"], "exact");
    assert!(doc["results"].as_array().unwrap().iter().any(|r| r[1] == "strength=2 tight=yes"));
    assert_eq!(doc["inputs"][0]["path"], file.to_str().unwrap());
}

#[test]
fn markov_check_confirms_the_homothety() {
    let file = tmp("ico-markov.ps");
    let (code, _, _) = run(&["construct", "icosahedron", "--out", file.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, stdout, _) =
        run(&["markov", "check", "--in", file.to_str().unwrap(), "--l", "2"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("homothety=yes"));
    assert!(stdout.contains("factor=0.2"));
}
