//! Spin-network view of a walk graph: the XY model on one spin per vertex.
//!
//! `H = 1/2 sum_{(i,j)} w_ij (X_i X_j + Y_i Y_j)` conserves the number of
//! up spins; its single-excitation block reproduces the adjacency matrix.

use std::collections::BTreeMap;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::scalar::{Real, C};

pub const MAX_SPINS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pauli {
    X,
    Y,
}

/// Action of a single-site Pauli on bit value `b`: returns (phase, flipped bit).
fn pauli_on<T: Real>(p: Pauli, b: bool) -> C<T> {
    match (p, b) {
        (Pauli::X, _) => C::new(T::one(), T::zero()),
        // Y|0> = i|1>, Y|1> = -i|0>
        (Pauli::Y, false) => C::new(T::zero(), T::one()),
        (Pauli::Y, true) => C::new(T::zero(), -T::one()),
    }
}

/// Sparse XY Hamiltonian over the full `2^k` spin basis, keyed by (row, col).
/// Spin `i` corresponds to bit `i` of the basis index.
pub fn xy_hamiltonian<T: Real>(
    couplings: &WeightedGraph<T>,
) -> Result<BTreeMap<(usize, usize), C<T>>> {
    let k = couplings.vertex_count();
    if k > MAX_SPINS {
        return Err(Error::InvalidArgument(format!(
            "XY construction limited to {MAX_SPINS} spins, graph has {k}"
        )));
    }
    let half = T::lit(0.5);
    let mut entries: BTreeMap<(usize, usize), C<T>> = BTreeMap::new();
    for state in 0..(1usize << k) {
        for e in couplings.edges() {
            let (i, j) = (e.a.index(), e.b.index());
            for p in [Pauli::X, Pauli::Y] {
                let phase =
                    pauli_on::<T>(p, state >> i & 1 == 1) * pauli_on::<T>(p, state >> j & 1 == 1);
                let target = state ^ (1 << i) ^ (1 << j);
                let entry = entries
                    .entry((target, state))
                    .or_insert_with(|| C::new(T::zero(), T::zero()));
                *entry = *entry + phase * (half * e.weight);
            }
        }
    }
    entries.retain(|_, z| z.norm() > T::zero());
    Ok(entries)
}

/// Restriction of the XY Hamiltonian to the states with exactly one spin up.
/// Row/column `i` is the excitation on spin `i`.
pub fn xy_single_excitation_block<T: Real>(couplings: &WeightedGraph<T>) -> Result<Array2<T>> {
    let k = couplings.vertex_count();
    let full = xy_hamiltonian(couplings)?;
    let mut block = Array2::zeros((k, k));
    for (&(row, col), z) in &full {
        let (r1, c1) = (row.count_ones() == 1, col.count_ones() == 1);
        if r1 != c1 {
            return Err(Error::InvalidArgument(
                "XY Hamiltonian couples the single-excitation sector to another sector".into(),
            ));
        }
        if r1 {
            if z.im.abs() > T::epsilon() {
                return Err(Error::InvalidArgument(
                    "single-excitation block is not real".into(),
                ));
            }
            block[[row.trailing_zeros() as usize, col.trailing_zeros() as usize]] = z.re;
        }
    }
    Ok(block)
}
