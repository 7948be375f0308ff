//! Piecewise-constant evolution of a walker through a rail layout.

use crate::error::{Error, Result};
use crate::layout::{
    build_schedule, pipeline_offset_or_fallback, RailLayout, Schedule, TransportSet,
};
use crate::scalar::{Real, C};
use crate::spectrum::Spectrum;
use crate::state::{evolve_with, StateVector};

/// Leakage thresholds for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Above this the measurement is flagged.
    pub warning: T,
    /// Above this unitary extraction refuses the run.
    pub assertion: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            warning: T::lit(1e-6),
            assertion: T::lit(1e-9),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    /// 0-based index of the phase within the run.
    pub phase: usize,
    pub set: TransportSet,
    pub duration: T,
    /// State after the phase.
    pub state: StateVector<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace<T> {
    pub snapshots: Vec<Snapshot<T>>,
    /// `column_marginals[k][x]`: probability on the rail vertices of column
    /// `x` after snapshot `k`.
    pub column_marginals: Vec<Vec<T>>,
}

impl<T: Real> SimulationTrace<T> {
    /// One row per (phase, vertex): `phase,set,duration,vertex,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("phase,set,duration,vertex,re,im\n");
        for s in &self.snapshots {
            let duration = crate::format::exact(s.duration);
            for (v, z) in s.state.amplitudes().iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    s.phase,
                    s.set,
                    duration,
                    v,
                    crate::format::exact(z.re),
                    crate::format::exact(z.im)
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult<T> {
    pub final_state: StateVector<T>,
    /// Amplitudes on the output column, indexed by rail.
    pub output_amplitudes: Vec<C<T>>,
    /// Probability off the output column.
    pub leakage: T,
}

/// The three phase Hamiltonians of a layout, diagonalized once.
#[derive(Debug, Clone)]
pub struct WalkEngine<'a, T> {
    layout: &'a RailLayout<T>,
    spectra: [Spectrum<T>; 3],
}

impl<'a, T: Real> WalkEngine<'a, T> {
    pub fn new(layout: &'a RailLayout<T>) -> Result<Self> {
        let spectrum = |s| Spectrum::of(&layout.active_hamiltonian(s));
        Ok(Self {
            layout,
            spectra: [
                spectrum(TransportSet::Solid)?,
                spectrum(TransportSet::Dashed)?,
                spectrum(TransportSet::Dotted)?,
            ],
        })
    }

    pub fn layout(&self) -> &RailLayout<T> {
        self.layout
    }

    pub fn spectrum(&self, set: TransportSet) -> &Spectrum<T> {
        &self.spectra[set as usize]
    }

    /// Applies every phase of `schedule` to `initial`.
    pub fn run(
        &self,
        schedule: &Schedule<T>,
        initial: &StateVector<T>,
    ) -> Result<(RunResult<T>, SimulationTrace<T>)> {
        let layout = self.layout;
        if initial.dim() != layout.vertex_count() {
            return Err(Error::DimensionMismatch {
                expected: layout.vertex_count(),
                found: initial.dim(),
            });
        }
        if schedule.len() > layout.depth() {
            return Err(Error::DimensionMismatch {
                expected: layout.depth(),
                found: schedule.len(),
            });
        }
        let mut psi = initial.clone();
        let mut trace = SimulationTrace {
            snapshots: Vec::with_capacity(schedule.len()),
            column_marginals: Vec::with_capacity(schedule.len()),
        };
        for (phase, p) in schedule.phases.iter().enumerate() {
            psi = evolve_with(self.spectrum(p.set), &psi, p.duration)?;
            trace.column_marginals.push(
                (0..layout.columns())
                    .map(|x| psi.probability_on(layout.column_vertices(x).iter().copied()))
                    .collect(),
            );
            trace.snapshots.push(Snapshot {
                phase,
                set: p.set,
                duration: p.duration,
                state: psi.clone(),
            });
        }
        Ok((self.result(psi), trace))
    }

    fn result(&self, final_state: StateVector<T>) -> RunResult<T> {
        let outputs = self.layout.output_vertices();
        let output_amplitudes = outputs.iter().map(|&v| final_state[v]).collect();
        let leakage = (0..final_state.dim())
            .filter(|v| !outputs.contains(v))
            .map(|v| final_state.probability(v))
            .sum();
        RunResult {
            final_state,
            output_amplitudes,
            leakage,
        }
    }

    /// Walker starting on input rail `rail`.
    pub fn basis_input(&self, rail: usize) -> Result<StateVector<T>> {
        let inputs = self.layout.input_vertices();
        let v = *inputs.get(rail).ok_or(Error::InvalidVertex {
            vertex: rail,
            vertex_count: inputs.len(),
        })?;
        StateVector::basis(self.layout.vertex_count(), v)
    }

    /// Walker in the superposition `sum_r amplitudes[r] |input rail r>`.
    pub fn input_state(&self, amplitudes: &[C<T>]) -> Result<StateVector<T>> {
        let inputs = self.layout.input_vertices();
        if amplitudes.len() != inputs.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                found: amplitudes.len(),
            });
        }
        let mut full = vec![C::new(T::zero(), T::zero()); self.layout.vertex_count()];
        for (&v, &a) in inputs.iter().zip(amplitudes) {
            full[v] = a;
        }
        StateVector::new(full)
    }

    /// Runs each walker against the schedule from its offset on, for exactly
    /// one traversal of the layout. Walkers never interact, so each run is
    /// an independent single-walker simulation.
    pub fn run_pipelined(
        &self,
        schedule: &Schedule<T>,
        starts: &[(StateVector<T>, usize)],
    ) -> Result<Vec<RunResult<T>>> {
        let layout = self.layout;
        let depth = layout.depth();
        let unit = pipeline_offset_or_fallback(layout.n_qubits())?;
        let solo = build_schedule::<T>(layout.n_qubits(), layout.rounds().len())?;
        starts
            .iter()
            .map(|(initial, offset)| {
                if offset % unit != 0 {
                    return Err(Error::InvalidArgument(format!(
                        "offset {offset} is not a multiple of the pipeline offset {unit}"
                    )));
                }
                if offset + depth > schedule.len() {
                    return Err(Error::InvalidArgument(format!(
                        "schedule of {} phases ends before a walker started at {offset} finishes",
                        schedule.len()
                    )));
                }
                let window = Schedule {
                    phases: schedule.phases[*offset..offset + depth].to_vec(),
                };
                if window != solo {
                    return Err(Error::InvalidArgument(format!(
                        "schedule from phase {offset} does not repeat the layout's own sequence"
                    )));
                }
                Ok(self.run(&window, initial)?.0)
            })
            .collect()
    }
}

/// Builds the propagators for `layout` and runs `schedule` on `initial`.
pub fn run_walk<T: Real>(
    layout: &RailLayout<T>,
    schedule: &Schedule<T>,
    initial: &StateVector<T>,
) -> Result<(RunResult<T>, SimulationTrace<T>)> {
    WalkEngine::new(layout)?.run(schedule, initial)
}

pub fn run_pipelined<T: Real>(
    layout: &RailLayout<T>,
    schedule: &Schedule<T>,
    starts: &[(StateVector<T>, usize)],
) -> Result<Vec<RunResult<T>>> {
    WalkEngine::new(layout)?.run_pipelined(schedule, starts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementStatus {
    Clean,
    LeakageWarning,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measurement<T> {
    /// Outcome probabilities over the `2^N` rail labels.
    pub probabilities: Vec<T>,
    pub leakage: T,
    pub status: MeasurementStatus,
}

/// Reads out the output column and removes the walker. Probabilities are
/// renormalized by the output weight `1 - leakage`.
pub fn measure_and_eject<T: Real>(result: &RunResult<T>, warning: T) -> Measurement<T> {
    let raw: Vec<T> = result
        .output_amplitudes
        .iter()
        .map(|z| z.norm_sqr())
        .collect();
    let total: T = raw.iter().copied().sum();
    let probabilities = if total > T::zero() {
        raw.iter().map(|p| *p / total).collect()
    } else {
        raw
    };
    let status = if result.leakage > warning || !(total > T::zero()) {
        MeasurementStatus::LeakageWarning
    } else {
        MeasurementStatus::Clean
    };
    Measurement {
        probabilities,
        leakage: result.leakage,
        status,
    }
}

/// Probability outside the ideally occupied column after each phase.
pub fn leakage_profile<T: Real>(trace: &SimulationTrace<T>, layout: &RailLayout<T>) -> Vec<T> {
    trace
        .snapshots
        .iter()
        .map(|s| {
            let column = layout.expected_column(s.phase);
            let occupied = layout.column_vertices(column);
            (0..s.state.dim())
                .filter(|v| !occupied.contains(v))
                .map(|v| s.state.probability(v))
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{
        build_layout, build_layout_with, HorizontalChoice::*, RoundSpec, VerticalChoice::*,
    };
    use crate::widgets::{mu_phase, phase_widget_with, WidgetSet};

    fn sqrt_z() -> RailLayout<f64> {
        build_layout(
            1,
            &[RoundSpec {
                horizontal: vec![Identity, Phase],
                vertical: vec![Skip],
            }],
        )
        .unwrap()
    }

    #[test]
    fn sqrt_z_round() {
        let layout = sqrt_z();
        let engine = WalkEngine::new(&layout).unwrap();
        let schedule = build_schedule(1, 1).unwrap();
        let (r0, trace) = engine
            .run(&schedule, &engine.basis_input(0).unwrap())
            .unwrap();
        assert!((r0.output_amplitudes[0].norm() - 1.0).abs() < 1e-9);
        assert!(r0.leakage < 1e-9);
        // identity: 1, transport: -i, skip: -1, transport: -i
        assert!((r0.output_amplitudes[0] - C::new(1.0, 0.0)).norm() < 1e-9);
        let (r1, _) = engine
            .run(&schedule, &engine.basis_input(1).unwrap())
            .unwrap();
        let ratio = r1.output_amplitudes[1] / r0.output_amplitudes[0];
        assert!((ratio - C::new(0.0, 1.0)).norm() < 1e-9);
        for s in &trace.snapshots {
            assert!((s.state.norm() - 1.0).abs() < 1e-10);
        }
        assert!(leakage_profile(&trace, &layout).iter().all(|&l| l < 1e-9));
        let m = measure_and_eject(&r0, 1e-6);
        assert_eq!(m.status, MeasurementStatus::Clean);
        assert!((m.probabilities[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_schedule_returns_initial() {
        let layout = build_layout::<f64>(1, &[]).unwrap();
        let psi = StateVector::basis(2, 1).unwrap();
        let (r, trace) = run_walk(&layout, &Schedule { phases: vec![] }, &psi).unwrap();
        assert_eq!(r.final_state, psi);
        assert_eq!(r.output_amplitudes[1], C::new(1.0, 0.0));
        assert_eq!(r.leakage, 0.0);
        assert!(leakage_profile(&trace, &layout).is_empty());
    }

    #[test]
    fn rotation_round_probabilities() {
        let layout = build_layout::<f64>(
            1,
            &[RoundSpec {
                horizontal: vec![Identity, Identity],
                vertical: vec![Rotate],
            }],
        )
        .unwrap();
        let engine = WalkEngine::new(&layout).unwrap();
        let (r, _) = engine
            .run(
                &build_schedule(1, 1).unwrap(),
                &engine.basis_input(0).unwrap(),
            )
            .unwrap();
        let m = measure_and_eject(&r, 1e-6);
        let a = 3f64.sqrt() * std::f64::consts::PI;
        assert!((m.probabilities[0] - a.cos().powi(2)).abs() < 1e-9);
        assert!((m.probabilities[1] - a.sin().powi(2)).abs() < 1e-9);
        assert!((m.probabilities[0] - 0.444).abs() < 1e-3);
    }

    #[test]
    fn uniform_output_measures_uniform() {
        let r = RunResult {
            final_state: StateVector::basis(1, 0).unwrap(),
            output_amplitudes: vec![
                C::new(0.5, 0.0),
                C::new(0.0, 0.5),
                C::new(-0.5, 0.0),
                C::new(0.0, -0.5),
            ],
            leakage: 0.0,
        };
        let m = measure_and_eject(&r, 1e-6);
        assert!(m
            .probabilities
            .iter()
            .all(|p: &f64| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn perturbed_phase_widget_leaks() {
        let (m1, m2, m3) = mu_phase::<f64>();
        let mut set = WidgetSet::standard();
        set.phase = phase_widget_with(m1, m2 + 0.1, m3).unwrap();
        let layout = build_layout_with(
            1,
            &[RoundSpec {
                horizontal: vec![Identity, Phase],
                vertical: vec![Skip],
            }],
            &set,
        )
        .unwrap();
        let engine = WalkEngine::new(&layout).unwrap();
        let (r, trace) = engine
            .run(
                &build_schedule(1, 1).unwrap(),
                &engine.basis_input(1).unwrap(),
            )
            .unwrap();
        let profile = leakage_profile(&trace, &layout);
        assert!(profile.iter().any(|&l| l > 1e-3));
        assert_eq!(
            measure_and_eject(&r, 1e-6).status,
            MeasurementStatus::LeakageWarning
        );
    }

    #[test]
    fn rejects_oversized_schedule_and_bad_state() {
        let layout = sqrt_z();
        let long = build_schedule(1, 2).unwrap();
        let engine = WalkEngine::new(&layout).unwrap();
        assert!(engine.run(&long, &engine.basis_input(0).unwrap()).is_err());
        assert!(engine
            .run(
                &build_schedule(1, 1).unwrap(),
                &StateVector::basis(3, 0).unwrap()
            )
            .is_err());
        assert!(engine.basis_input(2).is_err());
    }

    #[test]
    fn trace_csv_rows() {
        let layout = sqrt_z();
        let engine = WalkEngine::new(&layout).unwrap();
        let (_, trace) = engine
            .run(
                &build_schedule(1, 1).unwrap(),
                &engine.basis_input(0).unwrap(),
            )
            .unwrap();
        let csv = trace.to_csv();
        assert_eq!(csv.lines().count(), 1 + 4 * layout.vertex_count());
        assert!(csv.lines().nth(1).unwrap().starts_with("0,g,"));
    }
}
