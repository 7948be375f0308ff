//! Logical circuits over the native gate set, their compilation onto rails,
//! and comparison of simulated against ideal unitaries.

mod parse;
mod synth;

use ndarray::{linalg::kron, Array2};

use crate::engine::{leakage_profile, WalkEngine};
use crate::error::{Error, Result};
use crate::layout::{
    build_layout, build_schedule, qubit_mask, HorizontalChoice, RailLayout, RoundSpec, Schedule,
    VerticalChoice,
};
use crate::scalar::{cplx, Real, C};

pub use synth::{su2_distance, synthesize_su2, word_matrix, Generator, Synthesis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NativeGate {
    SqrtZ(usize),
    SqrtZDag(usize),
    SqrtCz(usize, usize),
    Rx(usize),
    Identity,
}

/// The horizontal stage of one layer.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Diagonal {
    #[default]
    None,
    SqrtZ(usize),
    SqrtZDag(usize),
    SqrtCz(usize, usize),
    /// Explicit choice per rail.
    Rails(Vec<HorizontalChoice>),
}

/// One round: a diagonal stage followed by rotations on a set of qubits.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Layer {
    pub diagonal: Diagonal,
    /// Sorted, without repeats.
    pub rotations: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalCircuit {
    n_qubits: usize,
    layers: Vec<Layer>,
}

impl LogicalCircuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument(
                "a circuit needs at least one qubit".into(),
            ));
        }
        Ok(Self {
            n_qubits,
            layers: Vec::new(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Appends a layer built from gates acting on disjoint qubits, with at
    /// most one diagonal gate.
    pub fn push_gates(&mut self, gates: &[NativeGate]) -> Result<()> {
        let mut layer = Layer::default();
        let mut used = vec![false; self.n_qubits];
        let mut claim = |q: usize| -> Result<()> {
            if q >= self.n_qubits {
                return Err(Error::InvalidArgument(format!(
                    "qubit {q} out of range for {} qubits",
                    self.n_qubits
                )));
            }
            if std::mem::replace(&mut used[q], true) {
                return Err(Error::InvalidArgument(format!(
                    "qubit {q} used twice in one layer"
                )));
            }
            Ok(())
        };
        for &g in gates {
            let diagonal = match g {
                NativeGate::Identity => continue,
                NativeGate::Rx(q) => {
                    claim(q)?;
                    layer.rotations.push(q);
                    continue;
                }
                NativeGate::SqrtZ(q) => {
                    claim(q)?;
                    Diagonal::SqrtZ(q)
                }
                NativeGate::SqrtZDag(q) => {
                    claim(q)?;
                    Diagonal::SqrtZDag(q)
                }
                NativeGate::SqrtCz(p, q) => {
                    claim(p)?;
                    claim(q)?;
                    Diagonal::SqrtCz(p, q)
                }
            };
            if layer.diagonal != Diagonal::None {
                return Err(Error::InvalidArgument(
                    "conflicting diagonal assignments in one layer".into(),
                ));
            }
            layer.diagonal = diagonal;
        }
        self.push_layer(layer)
    }

    /// Appends a layer after validating it.
    pub fn push_layer(&mut self, mut layer: Layer) -> Result<()> {
        let n = self.n_qubits;
        let check = |q: usize| {
            if q < n {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "qubit {q} out of range for {n} qubits"
                )))
            }
        };
        match &layer.diagonal {
            Diagonal::None => {}
            Diagonal::SqrtZ(q) | Diagonal::SqrtZDag(q) => check(*q)?,
            Diagonal::SqrtCz(p, q) => {
                check(*p)?;
                check(*q)?;
                if p == q {
                    return Err(Error::InvalidArgument(
                        "sqrtcz needs two distinct qubits".into(),
                    ));
                }
            }
            Diagonal::Rails(r) => {
                if r.len() != 1 << n {
                    return Err(Error::DimensionMismatch {
                        expected: 1 << n,
                        found: r.len(),
                    });
                }
            }
        }
        for &q in &layer.rotations {
            check(q)?;
        }
        layer.rotations.sort_unstable();
        if layer.rotations.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(
                "a qubit is rotated twice in one layer".into(),
            ));
        }
        self.layers.push(layer);
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse::parse_circuit(text)
    }

    pub fn to_text(&self) -> String {
        parse::circuit_text(self)
    }
}

/// Widget choice per rail for a diagonal stage.
pub fn rail_choices(n_qubits: usize, diagonal: &Diagonal) -> Vec<HorizontalChoice> {
    use HorizontalChoice::*;
    let bit = |rail: usize, q: usize| rail & qubit_mask(n_qubits, q) != 0;
    (0..1usize << n_qubits)
        .map(|rail| {
            let phased = match diagonal {
                Diagonal::None => false,
                Diagonal::SqrtZ(q) => bit(rail, *q),
                Diagonal::SqrtZDag(q) => !bit(rail, *q),
                Diagonal::SqrtCz(p, q) => bit(rail, *p) && bit(rail, *q),
                Diagonal::Rails(r) => return r[rail],
            };
            if phased {
                Phase
            } else {
                Identity
            }
        })
        .collect()
}

pub fn round_spec(n_qubits: usize, layer: &Layer) -> RoundSpec {
    RoundSpec {
        horizontal: rail_choices(n_qubits, &layer.diagonal),
        vertical: (0..n_qubits)
            .map(|q| {
                if layer.rotations.contains(&q) {
                    VerticalChoice::Rotate
                } else {
                    VerticalChoice::Skip
                }
            })
            .collect(),
    }
}

/// Rail layout and switching schedule realizing `circuit`.
pub fn compile<T: Real>(circuit: &LogicalCircuit) -> Result<(RailLayout<T>, Schedule<T>)> {
    let n = circuit.n_qubits();
    let rounds: Vec<RoundSpec> = circuit.layers().iter().map(|l| round_spec(n, l)).collect();
    Ok((build_layout(n, &rounds)?, build_schedule(n, rounds.len())?))
}

/// Simulated action on the rails: column `j` holds the output amplitudes of
/// the walker started on input rail `j`. Fails if any run leaks more than
/// `max_leakage` off the output column.
pub fn extract_logical_unitary<T: Real>(
    layout: &RailLayout<T>,
    schedule: &Schedule<T>,
    max_leakage: T,
) -> Result<Array2<C<T>>> {
    let engine = WalkEngine::new(layout)?;
    let d = layout.n_rails();
    let mut u = Array2::zeros((d, d));
    for j in 0..d {
        let (result, trace) = engine.run(schedule, &engine.basis_input(j)?)?;
        if !(result.leakage <= max_leakage) {
            return Err(Error::Leakage {
                leakage: result.leakage.to_f64_lossy(),
                tolerance: max_leakage.to_f64_lossy(),
                profile: leakage_profile(&trace, layout)
                    .into_iter()
                    .map(|l| l.to_f64_lossy())
                    .collect(),
            });
        }
        for (i, z) in result.output_amplitudes.into_iter().enumerate() {
            u[[i, j]] = z;
        }
    }
    Ok(u)
}

pub fn identity<T: Real>(d: usize) -> Array2<C<T>> {
    Array2::from_shape_fn((d, d), |(i, j)| {
        if i == j {
            cplx(T::one(), T::zero())
        } else {
            cplx(T::zero(), T::zero())
        }
    })
}

pub fn dagger<T: Real>(m: &Array2<C<T>>) -> Array2<C<T>> {
    m.t().mapv(|z| z.conj())
}

/// Largest entry of `|U^dagger U - I|`.
pub fn unitarity_error<T: Real>(m: &Array2<C<T>>) -> T {
    let p = dagger(m).dot(m) - identity::<T>(m.nrows());
    p.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
}

/// `diag(1, i)`.
pub fn sqrt_z<T: Real>() -> Array2<C<T>> {
    diagonal(&[cplx(T::one(), T::zero()), cplx(T::zero(), T::one())])
}

/// `diag(1, -i)`.
pub fn sqrt_z_dag<T: Real>() -> Array2<C<T>> {
    diagonal(&[cplx(T::one(), T::zero()), cplx(T::zero(), -T::one())])
}

/// `diag(1, 1, 1, i)`.
pub fn sqrt_cz<T: Real>() -> Array2<C<T>> {
    let one = cplx(T::one(), T::zero());
    diagonal(&[one, one, one, cplx(T::zero(), T::one())])
}

/// `exp(-i theta X / 2)`.
pub fn rx<T: Real>(theta: T) -> Array2<C<T>> {
    let h = theta / T::lit(2.0);
    let c = cplx(h.cos(), T::zero());
    let s = cplx(T::zero(), -h.sin());
    ndarray::array![[c, s], [s, c]]
}

/// `exp(-i theta Y / 2)`.
pub fn ry<T: Real>(theta: T) -> Array2<C<T>> {
    let h = theta / T::lit(2.0);
    let c = cplx(h.cos(), T::zero());
    let s = cplx(h.sin(), T::zero());
    ndarray::array![[c, -s], [s, c]]
}

/// The rotation realized by the vertical widget: `R_X(2 sqrt(3) pi)`.
pub fn native_rx<T: Real>() -> Array2<C<T>> {
    rx(T::lit(2.0) * T::lit(3.0).sqrt() * T::PI())
}

pub fn hadamard<T: Real>() -> Array2<C<T>> {
    let h = cplx(T::lit(0.5).sqrt(), T::zero());
    ndarray::array![[h, h], [h, -h]]
}

fn diagonal<T: Real>(entries: &[C<T>]) -> Array2<C<T>> {
    let mut m = Array2::zeros((entries.len(), entries.len()));
    for (i, &z) in entries.iter().enumerate() {
        m[[i, i]] = z;
    }
    m
}

/// `gate` acting on `qubits` (in that order) of an `n`-qubit register,
/// qubit 0 being the most significant bit.
pub fn embed<T: Real>(n: usize, qubits: &[usize], gate: &Array2<C<T>>) -> Array2<C<T>> {
    let d = 1usize << n;
    let k = qubits.len();
    let masks: Vec<usize> = qubits.iter().map(|&q| qubit_mask(n, q)).collect();
    let all: usize = masks.iter().sum();
    let local = |x: usize| {
        masks
            .iter()
            .fold(0usize, |acc, &m| (acc << 1) | usize::from(x & m != 0))
    };
    let mut out = Array2::zeros((d, d));
    for col in 0..d {
        let rest = col & !all;
        let lc = local(col);
        for lr in 0..1usize << k {
            let row = masks.iter().enumerate().fold(rest, |acc, (i, &m)| {
                if lr >> (k - 1 - i) & 1 == 1 {
                    acc | m
                } else {
                    acc
                }
            });
            out[[row, col]] = gate[[lr, lc]];
        }
    }
    out
}

fn diagonal_unitary<T: Real>(n: usize, diagonal: &Diagonal) -> Array2<C<T>> {
    match diagonal {
        Diagonal::None => identity(1 << n),
        Diagonal::SqrtZ(q) => embed(n, &[*q], &sqrt_z()),
        Diagonal::SqrtZDag(q) => embed(n, &[*q], &sqrt_z_dag()),
        Diagonal::SqrtCz(p, q) => embed(n, &[*p, *q], &sqrt_cz()),
        Diagonal::Rails(r) => self::diagonal(
            &r.iter()
                .map(|c| match c {
                    HorizontalChoice::Identity => cplx(T::one(), T::zero()),
                    HorizontalChoice::Phase => cplx(T::zero(), T::one()),
                })
                .collect::<Vec<_>>(),
        ),
    }
}

/// Exact matrix of one layer: the diagonal stage, then the rotations.
pub fn layer_unitary<T: Real>(n: usize, layer: &Layer) -> Array2<C<T>> {
    let mut u = diagonal_unitary(n, &layer.diagonal);
    if !layer.rotations.is_empty() {
        let x = native_rx::<T>();
        let r = (0..n).fold(identity::<T>(1), |acc, q| {
            let f = if layer.rotations.contains(&q) {
                x.clone()
            } else {
                identity(2)
            };
            kron(&acc, &f)
        });
        u = r.dot(&u);
    }
    u
}

pub fn ideal_unitary<T: Real>(circuit: &LogicalCircuit) -> Array2<C<T>> {
    let n = circuit.n_qubits();
    circuit
        .layers()
        .iter()
        .fold(identity(1 << n), |acc, l| layer_unitary(n, l).dot(&acc))
}

/// `|tr(U^dagger V)| / d`.
pub fn fidelity_up_to_global_phase<T: Real>(u: &Array2<C<T>>, v: &Array2<C<T>>) -> Result<T> {
    if u.dim() != v.dim() || u.nrows() != u.ncols() {
        return Err(Error::DimensionMismatch {
            expected: u.nrows() * u.ncols(),
            found: v.nrows() * v.ncols(),
        });
    }
    let tr = u
        .iter()
        .zip(v.iter())
        .fold(cplx(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
    Ok(tr.norm() / T::count(u.nrows()))
}

/// Largest entrywise difference after aligning the global phase of `u` to `v`.
pub fn phase_aligned_distance<T: Real>(u: &Array2<C<T>>, v: &Array2<C<T>>) -> T {
    let tr = u
        .iter()
        .zip(v.iter())
        .fold(cplx(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
    let phase = if tr.norm() > T::zero() {
        tr / tr.norm()
    } else {
        cplx(T::one(), T::zero())
    };
    u.iter()
        .zip(v.iter())
        .fold(T::zero(), |m, (a, b)| m.max((a * phase - b).norm()))
}
