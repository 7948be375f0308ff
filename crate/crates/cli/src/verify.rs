use std::f64::consts::PI;
use std::fmt::Write as _;

use discowalk::format::report;
use discowalk::layout::{build_schedule, pipeline_offset};
use discowalk::logical::{native_rx, phase_aligned_distance, ry, sqrt_cz, sqrt_z, sqrt_z_dag};
use discowalk::widgets::catalog;
use discowalk::{
    christandl_chain, compile, extract_logical_unitary, fidelity_up_to_global_phase,
    widget_port_matrix, xy_single_excitation_block, LogicalCircuit, WalkEngine, WeightedGraph, C,
};

use crate::commands::max_error;
use crate::{Report, Suite};

struct Row {
    claim: String,
    measured: f64,
    tolerance: f64,
}

impl Row {
    fn new(claim: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            claim: claim.into(),
            measured,
            tolerance,
        }
    }

    fn failed(claim: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Self::new(format!("{} ({err})", claim.into()), f64::INFINITY, 0.0)
    }

    fn pass(&self) -> bool {
        self.measured <= self.tolerance
    }
}

pub fn run(suite: Suite) -> Report {
    let rows = match suite {
        Suite::Widgets => widgets(),
        Suite::Gates => gates(),
        Suite::Pipeline => pipeline(),
        Suite::Xy => xy(),
    };
    let width = rows.iter().map(|r| r.claim.len()).max().unwrap_or(5).max(5);
    let mut out = format!(
        "{:<width$}  {:>22}  {:>22}  result\n",
        "claim", "measured", "tolerance"
    );
    for r in &rows {
        writeln!(
            out,
            "{:<width$}  {:>22}  {:>22}  {}",
            r.claim,
            report(r.measured),
            report(r.tolerance),
            if r.pass() { "PASS" } else { "FAIL" }
        )
        .unwrap();
    }
    let failed = rows.iter().filter(|r| !r.pass()).count();
    writeln!(out, "{} of {} rows passed", rows.len() - failed, rows.len()).unwrap();
    Report {
        text: out,
        ok: failed == 0,
        failure: (failed > 0).then(|| format!("{failed} verification rows failed")),
    }
}

fn widgets() -> Vec<Row> {
    let mut rows = Vec::new();
    for w in catalog::<f64>() {
        match widget_port_matrix(&w) {
            Ok(r) => {
                let err = max_error(&r.matrix, w.ideal_port_matrix());
                rows.push(Row::new(
                    format!("{} port matrix equals ideal", w.name),
                    err,
                    1e-10,
                ));
                rows.push(Row::new(format!("{} leakage", w.name), r.leakage, 1e-10));
            }
            Err(e) => rows.push(Row::failed(format!("{} port matrix", w.name), e)),
        }
    }
    rows
}

fn circuit(text: &str) -> LogicalCircuit {
    LogicalCircuit::parse(text).expect("built-in circuit")
}

fn gates() -> Vec<Row> {
    let one = C::new(1.0, 0.0);
    let mut cz = sqrt_cz::<f64>();
    cz[[3, 3]] = -one;
    let ry_target = ry(2.0 * 3f64.sqrt() * PI);
    let cases = [
        (
            "sqrt(Z) compiles",
            circuit("qubits 1\nlayer\ndiag sqrtz 0\n"),
            sqrt_z(),
        ),
        (
            "sqrt(Z)^dag compiles",
            circuit("qubits 1\nlayer\ndiag sqrtzdag 0\n"),
            sqrt_z_dag(),
        ),
        (
            "RX compiles",
            circuit("qubits 1\nlayer\nrx 0\n"),
            native_rx(),
        ),
        (
            "R_Y from sqrt(Z) RX sqrt(Z)^dag",
            circuit("qubits 1\nlayer\ndiag sqrtzdag 0\nrx 0\nlayer\ndiag sqrtz 0\n"),
            ry_target.clone(),
        ),
        (
            "sqrt(CZ) compiles",
            circuit("qubits 2\nlayer\ndiag sqrtcz 0 1\n"),
            sqrt_cz(),
        ),
        (
            "CZ from two sqrt(CZ) layers",
            circuit("qubits 2\nlayer\ndiag sqrtcz 0 1\nlayer\ndiag sqrtcz 0 1\n"),
            cz,
        ),
    ];
    let mut rows = vec![Row::new(
        "sqrt(Z) RX sqrt(Z)^dag equals R_Y(2 sqrt(3) pi)",
        phase_aligned_distance(
            &sqrt_z::<f64>().dot(&native_rx()).dot(&sqrt_z_dag()),
            &ry_target,
        ),
        1e-12,
    )];
    for (claim, c, target) in cases {
        let infidelity = compile::<f64>(&c)
            .and_then(|(layout, schedule)| extract_logical_unitary(&layout, &schedule, 1e-9))
            .and_then(|u| fidelity_up_to_global_phase(&u, &target));
        rows.push(match infidelity {
            Ok(f) => Row::new(format!("{claim} (infidelity)"), (1.0 - f).max(0.0), 1e-8),
            Err(e) => Row::failed(claim, e),
        });
    }
    rows
}

fn pipeline_case(n: usize) -> Result<f64, discowalk::Error> {
    let rx_all: String = (0..n).map(|q| format!(" {q}")).collect();
    let c = circuit(&format!(
        "qubits {n}\nlayer\ndiag sqrtz 0\nlayer\nrx{rx_all}\n"
    ));
    let (layout, solo) = compile::<f64>(&c)?;
    let engine = WalkEngine::new(&layout)?;
    let unit = pipeline_offset(n)?;
    let walkers = layout.n_rails();
    let round = 2 * (n + 1);
    let shared = build_schedule::<f64>(n, c.depth() + ((walkers - 1) * unit).div_ceil(round))?;
    let starts = (0..walkers)
        .map(|j| Ok((engine.basis_input(j)?, j * unit)))
        .collect::<Result<Vec<_>, discowalk::Error>>()?;
    let mut worst = 0.0f64;
    for (res, (psi, _)) in engine.run_pipelined(&shared, &starts)?.iter().zip(&starts) {
        let (alone, _) = engine.run(&solo, psi)?;
        worst = worst.max(res.final_state.max_abs_diff(&alone.final_state));
    }
    Ok(worst)
}

fn pipeline() -> Vec<Row> {
    let mut rows = Vec::new();
    for n in [1, 3] {
        let claim = format!("N = {n}: walkers every 4 phases match solo runs");
        rows.push(match pipeline_case(n) {
            Ok(d) => Row::new(claim, d, 1e-12),
            Err(e) => Row::failed(claim, e),
        });
    }
    let even = match pipeline_offset(2) {
        Err(discowalk::Error::PipelineOffset { fallback, .. }) => (fallback as f64 - 6.0).abs(),
        _ => f64::INFINITY,
    };
    rows.push(Row::new(
        "N = 2: 4-phase offset refused, fallback is one round",
        even,
        0.0,
    ));
    rows
}

fn block_error(g: &WeightedGraph<f64>) -> Result<f64, discowalk::Error> {
    let block = xy_single_excitation_block(g)?;
    let adj = g.adjacency_matrix();
    Ok(block
        .iter()
        .zip(adj.iter())
        .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
}

fn xy() -> Vec<Row> {
    let graphs = catalog::<f64>()
        .into_iter()
        .map(|w| (format!("{} widget", w.name), w.graph().clone()))
        .chain((1..=4).map(|m| {
            (
                format!("coupled chain M = {m}"),
                christandl_chain(m, 1.0).expect("chain"),
            )
        }));
    graphs
        .map(|(label, g)| {
            let claim = format!("{label}: single-excitation block equals adjacency");
            match block_error(&g) {
                Ok(e) => Row::new(claim, e, 1e-12),
                Err(e) => Row::failed(claim, e),
            }
        })
        .collect()
}
