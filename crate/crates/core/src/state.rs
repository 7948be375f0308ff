//! Walker states and continuous-time evolution on a single graph.

use std::ops::Index;

use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::scalar::{Real, C};
use crate::spectrum::Spectrum;

/// Complex amplitudes indexed by vertex. Unit norm is checked on
/// construction; evolution preserves it up to roundoff.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    amplitudes: Vec<C<T>>,
}

impl<T: Real> StateVector<T> {
    /// Walker localized on `vertex`.
    pub fn basis(dim: usize, vertex: usize) -> Result<Self> {
        if vertex >= dim {
            return Err(Error::InvalidVertex {
                vertex,
                vertex_count: dim,
            });
        }
        let mut amplitudes = vec![C::new(T::zero(), T::zero()); dim];
        amplitudes[vertex] = C::new(T::one(), T::zero());
        Ok(Self { amplitudes })
    }

    /// Wraps `amplitudes`, requiring unit norm within `sqrt(eps)`.
    pub fn new(amplitudes: Vec<C<T>>) -> Result<Self> {
        let state = Self { amplitudes };
        let norm = state.norm();
        if (norm - T::one()).abs() > T::epsilon().sqrt() {
            return Err(Error::InvalidArgument(format!(
                "state norm {norm} is not 1"
            )));
        }
        Ok(state)
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: Vec<C<T>>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if !(norm > T::zero()) {
            return Err(Error::InvalidArgument(
                "cannot normalize the zero vector".into(),
            ));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// Skips the norm check. Used for states produced by exact evolution.
    pub(crate) fn from_evolved(amplitudes: Vec<C<T>>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C<T>> {
        self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    pub fn probability(&self, vertex: usize) -> T {
        self.amplitudes[vertex].norm_sqr()
    }

    /// Total probability on `vertices`.
    pub fn probability_on<I: IntoIterator<Item = usize>>(&self, vertices: I) -> T {
        vertices
            .into_iter()
            .map(|v| self.amplitudes[v].norm_sqr())
            .sum()
    }

    pub fn inner(&self, other: &Self) -> C<T> {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(C::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            })
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm()))
    }
}

impl<T> Index<usize> for StateVector<T> {
    type Output = C<T>;

    fn index(&self, i: usize) -> &C<T> {
        &self.amplitudes[i]
    }
}

/// `exp(-i G t) psi`, computed from the graph's spectrum.
pub fn evolve<T: Real>(
    graph: &WeightedGraph<T>,
    psi: &StateVector<T>,
    t: T,
) -> Result<StateVector<T>> {
    if psi.dim() != graph.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: graph.vertex_count(),
            found: psi.dim(),
        });
    }
    check_time(t)?;
    let spectrum = Spectrum::of(graph)?;
    evolve_with(&spectrum, psi, t)
}

/// Same as [`evolve`] with a precomputed spectrum.
pub fn evolve_with<T: Real>(
    spectrum: &Spectrum<T>,
    psi: &StateVector<T>,
    t: T,
) -> Result<StateVector<T>> {
    check_time(t)?;
    if t == T::zero() {
        if psi.dim() != spectrum.dim() {
            return Err(Error::DimensionMismatch {
                expected: spectrum.dim(),
                found: psi.dim(),
            });
        }
        return Ok(psi.clone());
    }
    Ok(StateVector::from_evolved(
        spectrum.propagate(psi.amplitudes(), t)?,
    ))
}

fn check_time<T: Real>(t: T) -> Result<()> {
    if t >= T::zero() && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "evolution time must be finite and non-negative, got {t}"
        )))
    }
}

/// `<v_out| exp(-i G t) |v_in>`.
pub fn transfer_amplitude<T: Real>(
    graph: &WeightedGraph<T>,
    v_in: VertexId,
    v_out: VertexId,
    t: T,
) -> Result<C<T>> {
    graph.check_vertex(v_in)?;
    graph.check_vertex(v_out)?;
    let psi = StateVector::basis(graph.vertex_count(), v_in.index())?;
    Ok(evolve(graph, &psi, t)?[v_out.index()])
}
