use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use discowalk::format::{complex, complex_matrix, report};
use discowalk::layout::{build_schedule, pipeline_offset, pipeline_offset_or_fallback};
use discowalk::search::SearchProblem;
use discowalk::widgets::catalog;
use discowalk::{
    compile as compile_circuit, ideal_unitary, measure_and_eject, search as run_search,
    widget_port_matrix, HorizontalChoice, LogicalCircuit, MeasurementStatus, SearchConfig,
    VerticalChoice, WalkEngine, C,
};

use crate::{resolve_tol, Report, UsageError, DEFAULT_SEARCH_TOL, DEFAULT_TOL};

/// Largest difference allowed between a pipelined walker and its solo run.
const PIPELINE_MATCH_TOL: f64 = 1e-12;

fn read(path: &Path) -> Result<String, UsageError> {
    fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), UsageError> {
    fs::write(path, text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn load_circuit(path: &Path) -> Result<LogicalCircuit, UsageError> {
    LogicalCircuit::parse(&read(path)?).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn bits(rail: usize, n: usize) -> String {
    format!("{rail:0n$b}")
}

fn parse_bits(s: &str, n: usize) -> Result<usize, UsageError> {
    if s.len() != n || !s.chars().all(|c| c == '0' || c == '1') {
        return Err(UsageError(format!(
            "--input must be {n} binary digits, got `{s}`"
        )));
    }
    Ok(usize::from_str_radix(s, 2).expect("checked digits"))
}

fn rails_letters(h: &[HorizontalChoice]) -> String {
    h.iter()
        .map(|c| match c {
            HorizontalChoice::Identity => 'I',
            HorizontalChoice::Phase => 'P',
        })
        .collect()
}

fn vertical_letters(v: &[VerticalChoice]) -> String {
    v.iter()
        .map(|c| match c {
            VerticalChoice::Rotate => 'R',
            VerticalChoice::Skip => '-',
        })
        .collect()
}

pub fn simulate(
    path: &Path,
    input: Option<&str>,
    trace: Option<&Path>,
    tol: Option<f64>,
) -> Result<Report, UsageError> {
    let tol = resolve_tol(tol, "DISCOWALK_TOL", DEFAULT_TOL)?;
    let circuit = load_circuit(path)?;
    let n = circuit.n_qubits();
    let (layout, schedule) = compile_circuit::<f64>(&circuit)?;
    let engine = WalkEngine::new(&layout)?;
    let inputs: Vec<usize> = match input {
        Some(s) => vec![parse_bits(s, n)?],
        None => (0..layout.n_rails()).collect(),
    };

    let mut out = String::new();
    writeln!(out, "circuit qubits {n} layers {}", circuit.depth()).unwrap();
    writeln!(
        out,
        "schedule phases {} model-time {}",
        schedule.len(),
        report(schedule.total_duration())
    )
    .unwrap();
    writeln!(out, "leakage-tolerance {}", report(tol)).unwrap();

    let mut csv = String::from("input,phase,set,duration,vertex,re,im\n");
    let mut columns = Vec::new();
    let mut worst = 0.0f64;
    for &rail in &inputs {
        let (result, run_trace) = engine.run(&schedule, &engine.basis_input(rail)?)?;
        let m = measure_and_eject(&result, tol);
        writeln!(out, "input {}", bits(rail, n)).unwrap();
        for (r, (p, z)) in m
            .probabilities
            .iter()
            .zip(&result.output_amplitudes)
            .enumerate()
        {
            writeln!(
                out,
                "  output {} probability {} amplitude {}",
                bits(r, n),
                report(*p),
                complex(*z, 15)
            )
            .unwrap();
        }
        let status = match m.status {
            MeasurementStatus::Clean => "clean",
            MeasurementStatus::LeakageWarning => "leakage-warning",
        };
        writeln!(out, "  leakage {} status {status}", report(m.leakage)).unwrap();
        worst = worst.max(m.leakage);
        if trace.is_some() {
            for line in run_trace.to_csv().lines().skip(1) {
                writeln!(csv, "{},{line}", bits(rail, n)).unwrap();
            }
        }
        columns.push(result.output_amplitudes);
    }

    if input.is_none() {
        let ideal = ideal_unitary::<f64>(&circuit);
        let d = columns.len();
        let overlap: C<f64> = columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().enumerate().map(move |(r, z)| (r, c, *z)))
            .map(|(r, c, z)| ideal[[r, c]].conj() * z)
            .sum();
        writeln!(
            out,
            "fidelity-to-ideal {}",
            report(overlap.norm() / d as f64)
        )
        .unwrap();
    }
    writeln!(out, "max-leakage {}", report(worst)).unwrap();

    if let Some(p) = trace {
        write(p, &csv)?;
    }
    let ok = worst <= tol;
    Ok(Report {
        text: out,
        ok,
        failure: (!ok).then(|| {
            format!(
                "leakage {} exceeds tolerance {}",
                report(worst),
                report(tol)
            )
        }),
    })
}

pub fn compile(
    path: &Path,
    layout_out: Option<&Path>,
    schedule_out: Option<&Path>,
) -> Result<Report, UsageError> {
    let circuit = load_circuit(path)?;
    let (layout, schedule) = compile_circuit::<f64>(&circuit)?;
    let mut out = String::new();
    writeln!(out, "qubits {}", layout.n_qubits()).unwrap();
    writeln!(out, "rounds {}", layout.rounds().len()).unwrap();
    writeln!(out, "rails {}", layout.n_rails()).unwrap();
    writeln!(out, "vertices {}", layout.vertex_count()).unwrap();
    writeln!(out, "columns {}", layout.columns()).unwrap();
    writeln!(out, "phases {}", schedule.len()).unwrap();
    writeln!(out, "model-time {}", report(schedule.total_duration())).unwrap();
    let sets: String = schedule.sets().iter().map(|s| s.letter()).collect();
    writeln!(out, "sets {}", if sets.is_empty() { "-" } else { &sets }).unwrap();
    for (i, r) in layout.rounds().iter().enumerate() {
        writeln!(
            out,
            "round {i} horizontal {} vertical {}",
            rails_letters(&r.horizontal),
            vertical_letters(&r.vertical)
        )
        .unwrap();
    }
    if let Some(p) = layout_out {
        write(p, &layout.to_exchange())?;
    }
    if let Some(p) = schedule_out {
        write(p, &schedule.to_text())?;
    }
    Ok(Report::ok(out))
}

pub fn search(
    path: &Path,
    seed: u64,
    restarts: usize,
    max_iters: usize,
    tol: Option<f64>,
) -> Result<Report, UsageError> {
    let tol = resolve_tol(tol, "DISCOWALK_SEARCH_TOL", DEFAULT_SEARCH_TOL)?;
    let problem = SearchProblem::<f64>::from_text(&read(path)?)
        .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    let config = SearchConfig {
        restarts,
        max_iters,
        tol,
        seed,
        ..SearchConfig::default()
    };
    let result = run_search(&problem, &config)?;
    let mut out = String::new();
    for (name, w) in problem.parameter_names().iter().zip(&result.weights) {
        writeln!(out, "parameter {name} {}", report(*w)).unwrap();
    }
    writeln!(out, "objective {}", report(result.objective)).unwrap();
    writeln!(out, "leakage {}", report(result.leakage)).unwrap();
    writeln!(out, "restarts {}", result.restarts_used).unwrap();
    writeln!(out, "best-restart {}", result.best_restart).unwrap();
    writeln!(out, "seed {}", result.seed).unwrap();
    writeln!(out, "tolerance {}", report(tol)).unwrap();
    out.push_str("port-matrix\n");
    out.push_str(&complex_matrix(&result.achieved_port_matrix, 15));
    writeln!(
        out,
        "status {}",
        if result.converged {
            "converged"
        } else {
            "not-converged"
        }
    )
    .unwrap();
    Ok(Report {
        text: out,
        ok: result.converged,
        failure: (!result.converged).then(|| {
            format!(
                "search did not converge: best objective {} above tolerance {}",
                report(result.objective),
                report(tol)
            )
        }),
    })
}

pub fn pipeline(path: &Path, walkers: usize, tol: Option<f64>) -> Result<Report, UsageError> {
    if walkers == 0 {
        return Err(UsageError("--walkers must be at least 1".into()));
    }
    let tol = resolve_tol(tol, "DISCOWALK_TOL", DEFAULT_TOL)?;
    let circuit = load_circuit(path)?;
    let n = circuit.n_qubits();
    let (layout, solo) = compile_circuit::<f64>(&circuit)?;
    let engine = WalkEngine::new(&layout)?;
    let unit = pipeline_offset_or_fallback(n)?;
    let round = 2 * (n + 1);
    let extra = ((walkers - 1) * unit).div_ceil(round);
    let shared = build_schedule::<f64>(n, circuit.depth() + extra)?;

    let starts = (0..walkers)
        .map(|j| Ok((engine.basis_input(j % layout.n_rails())?, j * unit)))
        .collect::<Result<Vec<_>, UsageError>>()?;
    let results = engine.run_pipelined(&shared, &starts)?;

    let mut out = String::new();
    writeln!(out, "circuit qubits {n} layers {}", circuit.depth()).unwrap();
    let kind = if pipeline_offset(n).is_ok() {
        ""
    } else {
        " (one-round fallback)"
    };
    writeln!(out, "offset {unit}{kind}").unwrap();
    writeln!(out, "shared-phases {}", shared.len()).unwrap();
    let mut failures = Vec::new();
    for (j, (res, (psi, start))) in results.iter().zip(&starts).enumerate() {
        let (alone, _) = engine.run(&solo, psi)?;
        let deviation = res.final_state.max_abs_diff(&alone.final_state);
        let m = measure_and_eject(res, tol);
        writeln!(
            out,
            "walker {j} start {start} input {}",
            bits(j % layout.n_rails(), n)
        )
        .unwrap();
        let probs: Vec<String> = m.probabilities.iter().map(|p| report(*p)).collect();
        writeln!(out, "  probabilities {}", probs.join(" ")).unwrap();
        writeln!(out, "  leakage {}", report(m.leakage)).unwrap();
        writeln!(out, "  solo-deviation {}", report(deviation)).unwrap();
        if m.leakage > tol {
            failures.push(format!(
                "walker {j} leakage {} exceeds {}",
                report(m.leakage),
                report(tol)
            ));
        }
        if deviation > PIPELINE_MATCH_TOL {
            failures.push(format!(
                "walker {j} differs from its solo run by {}",
                report(deviation)
            ));
        }
    }
    Ok(Report {
        text: out,
        ok: failures.is_empty(),
        failure: (!failures.is_empty()).then(|| failures.join("; ")),
    })
}

pub fn widgets(name: Option<&str>) -> Result<Report, UsageError> {
    let all = catalog::<f64>();
    let mut out = String::new();
    match name {
        None => {
            out.push_str("name vertices edges ports time port-error leakage\n");
            for w in &all {
                let r = widget_port_matrix(w)?;
                writeln!(
                    out,
                    "{} {} {} {} {} {} {}",
                    w.name,
                    w.graph().vertex_count(),
                    w.graph().edges().len(),
                    w.ports().len(),
                    report(w.traversal_time()),
                    report(max_error(&r.matrix, w.ideal_port_matrix())),
                    report(r.leakage)
                )
                .unwrap();
            }
        }
        Some(name) => {
            let w = all.iter().find(|w| w.name == name).ok_or_else(|| {
                let names: Vec<&str> = all.iter().map(|w| w.name.as_str()).collect();
                UsageError(format!(
                    "unknown widget `{name}`; expected one of {}",
                    names.join(", ")
                ))
            })?;
            let r = widget_port_matrix(w)?;
            out.push_str(&w.to_exchange());
            out.push_str("# ideal port matrix\n");
            for line in complex_matrix(w.ideal_port_matrix(), 15).lines() {
                writeln!(out, "# {line}").unwrap();
            }
            out.push_str("# simulated port matrix\n");
            for line in complex_matrix(&r.matrix, 15).lines() {
                writeln!(out, "# {line}").unwrap();
            }
            writeln!(
                out,
                "# port-error {}",
                report(max_error(&r.matrix, w.ideal_port_matrix()))
            )
            .unwrap();
            writeln!(out, "# leakage {}", report(r.leakage)).unwrap();
        }
    }
    Ok(Report::ok(out))
}

pub fn max_error<'a, I, J>(a: I, b: J) -> f64
where
    I: IntoIterator<Item = &'a C<f64>>,
    J: IntoIterator<Item = &'a C<f64>>,
{
    a.into_iter()
        .zip(b)
        .fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}
