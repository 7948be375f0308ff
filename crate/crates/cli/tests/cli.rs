use std::path::PathBuf;
use std::process::{Command, Output};

use discowalk::widgets::Widget;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_discowalk"));
    cmd.args(args)
        .env_remove("DISCOWALK_TOL")
        .env_remove("DISCOWALK_SEARCH_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| l.starts_with(key))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"));
    line[key.len()..]
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn sqrt_z_on_rail_one_is_a_phase_of_i() {
    let p = data("sqrt_z.circuit");
    let o = run(&["simulate", p.to_str().unwrap(), "--input", "1"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let line = out
        .lines()
        .find(|l| l.trim().starts_with("output 1"))
        .unwrap();
    let amp = line.split_whitespace().last().unwrap();
    let (re, im) = amp.split_once(',').unwrap();
    assert!(re.parse::<f64>().unwrap().abs() < 1e-12);
    assert!((im.parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    assert!(field(&out, "max-leakage") < 1e-9);
}

#[test]
fn malformed_diag_line_is_a_usage_error_with_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.circuit");
    std::fs::write(&p, "qubits 1\nlayer\ndiag sqrtq 0\n").unwrap();
    let o = run(&["simulate", p.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn missing_file_and_bad_input_are_usage_errors() {
    assert_eq!(
        run(&["simulate", "/nonexistent.circuit"], &[])
            .status
            .code(),
        Some(2)
    );
    let p = data("sqrt_z.circuit");
    assert_eq!(
        run(&["simulate", p.to_str().unwrap(), "--input", "10"], &[])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"], &[]).status.code(), Some(2));
}

#[test]
fn empty_circuit_reports_identity() {
    let p = data("empty.circuit");
    let o = run(&["simulate", p.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!((field(&out, "fidelity-to-ideal") - 1.0).abs() < 1e-15);
    assert!(out.contains("schedule phases 0"));
}

#[test]
fn full_simulation_matches_ideal_and_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    for name in ["cz.circuit", "ry.circuit", "three_qubit.circuit"] {
        let p = data(name);
        let o = run(
            &[
                "simulate",
                p.to_str().unwrap(),
                "--trace",
                trace.to_str().unwrap(),
            ],
            &[],
        );
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
        assert!(
            field(&stdout(&o), "fidelity-to-ideal") > 1.0 - 1e-8,
            "{name}"
        );
    }
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("input,phase,set,duration,vertex,re,im\n"));
    assert!(csv.lines().nth(1).unwrap().starts_with("000,0,g,"));
}

#[test]
fn tolerance_precedence_flag_then_env_then_default() {
    let p = data("sqrt_z.circuit");
    let p = p.to_str().unwrap();
    assert_eq!(run(&["simulate", p], &[]).status.code(), Some(0));
    assert_eq!(
        run(&["simulate", p], &[("DISCOWALK_TOL", "1e-40")])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(
            &["simulate", p, "--tol", "1e-9"],
            &[("DISCOWALK_TOL", "1e-40")]
        )
        .status
        .code(),
        Some(0)
    );
    assert_eq!(
        run(&["simulate", p], &[("DISCOWALK_TOL", "tiny")])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["simulate", p, "--tol", "-1"], &[]).status.code(),
        Some(2)
    );
}

#[test]
fn every_suite_passes() {
    for suite in ["widgets", "gates", "pipeline", "xy"] {
        let o = run(&["verify", "--suite", suite], &[]);
        assert_eq!(o.status.code(), Some(0), "{suite}:\n{}", stdout(&o));
        let out = stdout(&o);
        assert!(out.contains("PASS") && !out.contains("FAIL"), "{out}");
    }
    let gates = stdout(&run(&["verify", "--suite", "gates"], &[]));
    for claim in [
        "sqrt(Z) compiles",
        "RX compiles",
        "R_Y",
        "sqrt(CZ) compiles",
        "CZ from two",
    ] {
        assert!(gates.contains(claim), "{claim}");
    }
    assert_eq!(
        run(&["verify", "--suite", "bogus"], &[]).status.code(),
        Some(2)
    );
}

#[test]
fn search_recovers_the_rotation_weight_deterministically() {
    let p = data("rotation.problem");
    let args = [
        "search",
        p.to_str().unwrap(),
        "--seed",
        "7",
        "--restarts",
        "8",
    ];
    let first = run(&args, &[]);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let out = stdout(&first);
    assert!((field(&out, "parameter mu_R") - 2.0 * 3f64.sqrt()).abs() < 1e-6);
    assert!(out.contains("seed 7"));
    assert_eq!(first.stdout, run(&args, &[]).stdout);
}

#[test]
fn unsatisfiable_three_vertex_problem_fails() {
    let p = data("three_vertex.problem");
    let o = run(&["search", p.to_str().unwrap(), "--restarts", "4"], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(field(&stdout(&o), "objective") > 1.0);
    assert!(stderr(&o).contains("best objective"));
}

#[test]
fn compile_writes_layout_and_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let (l, s) = (
        dir.path().join("layout.txt"),
        dir.path().join("schedule.txt"),
    );
    let p = data("three_qubit.circuit");
    let o = run(
        &[
            "compile",
            p.to_str().unwrap(),
            "--layout",
            l.to_str().unwrap(),
            "--schedule",
            s.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let phases = field(&out, "phases") as usize;
    assert_eq!(phases, 2 * 2 * (3 + 1));
    let schedule = std::fs::read_to_string(&s).unwrap();
    assert_eq!(
        schedule.lines().filter(|l| l.starts_with("phase ")).count(),
        phases
    );
    let layout = std::fs::read_to_string(&l).unwrap();
    assert!(layout.lines().any(|l| l.starts_with("vertices ")));
    assert!(layout.lines().any(|l| l.ends_with("set b")));
}

#[test]
fn pipelined_walkers_match_their_solo_runs() {
    let p = data("three_qubit.circuit");
    let o = run(&["pipeline", p.to_str().unwrap(), "--walkers", "3"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("offset 4\n"));
    assert_eq!(out.matches("solo-deviation 0.00000000000000e0").count(), 3);

    let even = data("cz.circuit");
    let o = run(&["pipeline", even.to_str().unwrap(), "--walkers", "2"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("offset 6 (one-round fallback)"));
    assert_eq!(
        run(&["pipeline", even.to_str().unwrap(), "--walkers", "0"], &[])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn widget_listing_and_exchange_dump() {
    let o = run(&["widgets"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 6);

    let o = run(&["widgets", "--name", "phase"], &[]);
    let w = Widget::<f64>::from_exchange("phase", &stdout(&o)).unwrap();
    assert_eq!(w.graph().vertex_count(), 6);
    assert_eq!(w.ports().len(), 2);
    assert_eq!(
        run(&["widgets", "--name", "hadamard"], &[]).status.code(),
        Some(2)
    );
}
