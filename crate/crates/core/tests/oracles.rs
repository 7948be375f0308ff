//! Checks against independent constructions: a Taylor-series matrix
//! exponential and a dense Kronecker-product spin Hamiltonian.

use discowalk::xy::xy_hamiltonian;
use discowalk::{
    christandl_chain, evolve, xy_single_excitation_block, Spectrum, StateVector, VertexId,
    WeightedGraph,
};
use ndarray::{linalg::kron, Array2};
use num_complex::Complex64 as Z;
use proptest::prelude::*;
use std::f64::consts::FRAC_PI_2;

/// exp(-i G t) by scaling and squaring a truncated Taylor series.
fn taylor_propagator(g: &Array2<f64>, t: f64) -> Array2<Z> {
    let n = g.nrows();
    let a: Array2<Z> = g.mapv(|x| Z::new(0.0, -x * t));
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.25 {
        s += 1;
    }
    let a = a.mapv(|z| z / 2f64.powi(s));
    let mut result = Array2::<Z>::eye(n);
    let mut term = Array2::<Z>::eye(n);
    for k in 1..=30 {
        term = term.dot(&a).mapv(|z| z / k as f64);
        result += &term;
    }
    for _ in 0..s {
        result = result.dot(&result);
    }
    result
}

fn graph_strategy(max_n: usize) -> impl Strategy<Value = WeightedGraph<f64>> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        let m = pairs.len();
        (
            Just(n),
            Just(pairs),
            proptest::collection::vec(proptest::option::weighted(0.5, 0.1f64..3.0), m),
        )
            .prop_map(|(n, pairs, weights)| {
                let edges = pairs
                    .into_iter()
                    .zip(weights)
                    .filter_map(|((a, b), w)| w.map(|w| (a, b, w)));
                WeightedGraph::new(n, edges).unwrap()
            })
    })
}

fn max_diff(a: &Array2<Z>, b: &Array2<Z>) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

fn pauli(which: char) -> Array2<Z> {
    let o = Z::new(0.0, 0.0);
    let l = Z::new(1.0, 0.0);
    let i = Z::new(0.0, 1.0);
    match which {
        'x' => ndarray::array![[o, l], [l, o]],
        'y' => ndarray::array![[o, -i], [i, o]],
        _ => ndarray::array![[l, o], [o, l]],
    }
}

/// Dense XY Hamiltonian. Spin `i` is bit `i` of the basis index, so the
/// leftmost Kronecker factor is the highest spin.
fn dense_xy(g: &WeightedGraph<f64>) -> Array2<Z> {
    let k = g.vertex_count();
    let d = 1 << k;
    let mut h = Array2::<Z>::zeros((d, d));
    for e in g.edges() {
        for p in ['x', 'y'] {
            let mut op = Array2::<Z>::eye(1);
            for spin in (0..k).rev() {
                let f = if spin == e.a.index() || spin == e.b.index() {
                    pauli(p)
                } else {
                    pauli('1')
                };
                op = kron(&op, &f);
            }
            h = h + op.mapv(|z| z * 0.5 * e.weight);
        }
    }
    h
}

fn sparse_to_dense(g: &WeightedGraph<f64>) -> Array2<Z> {
    let d = 1 << g.vertex_count();
    let mut h = Array2::<Z>::zeros((d, d));
    for ((r, c), z) in xy_hamiltonian(g).unwrap() {
        h[[r, c]] = z;
    }
    h
}

#[test]
fn spectral_propagator_matches_taylor() {
    let g = WeightedGraph::new(
        6,
        [
            (0, 1, 1.0),
            (1, 2, 0.7),
            (2, 3, 2.3),
            (3, 0, 1.1),
            (3, 4, 0.4),
            (4, 5, 1.9),
            (1, 4, 0.25),
        ],
    )
    .unwrap();
    for t in [0.1, 1.0, 3.7] {
        let u = Spectrum::of(&g).unwrap().propagator(t);
        assert!(max_diff(&u, &taylor_propagator(&g.adjacency_matrix(), t)) < 1e-9);
    }
}

#[test]
fn three_spin_xy_matches_kronecker_construction() {
    let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.5f64.sqrt()), (0, 2, 0.3)]).unwrap();
    assert!(max_diff(&sparse_to_dense(&g), &dense_xy(&g)) < 1e-14);
    let block = xy_single_excitation_block(&g).unwrap();
    let h = dense_xy(&g);
    for i in 0..3 {
        for j in 0..3 {
            assert!((h[[1 << i, 1 << j]].re - block[[i, j]]).abs() < 1e-14);
            assert!((block[[i, j]] - g.adjacency_matrix()[[i, j]]).abs() < 1e-14);
        }
    }
}

#[test]
fn christandl_chains_transfer_with_phase() {
    for m in 1..=8usize {
        let g = christandl_chain(m, 1.0).unwrap();
        let out = evolve(&g, &StateVector::basis(m + 1, 0).unwrap(), FRAC_PI_2).unwrap();
        let expected = Z::new(0.0, -1.0).powu(m as u32);
        assert!((out[m] - expected).norm() < 1e-9, "m = {m}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evolution_matches_taylor(g in graph_strategy(8), t in 0.0f64..4.0) {
        let u = Spectrum::of(&g).unwrap().propagator(t);
        prop_assert!(max_diff(&u, &taylor_propagator(&g.adjacency_matrix(), t)) < 1e-9);
    }

    #[test]
    fn propagator_is_unitary(g in graph_strategy(40), t in 0.0f64..10.0) {
        let u = Spectrum::of(&g).unwrap().propagator(t);
        let n = g.vertex_count();
        let p = u.t().mapv(|z| z.conj()).dot(&u);
        prop_assert!(max_diff(&p, &Array2::eye(n)) < 1e-10);
    }

    #[test]
    fn evolution_composes(g in graph_strategy(12), s in 0.0f64..3.0, t in 0.0f64..3.0, v in 0usize..12) {
        let v = v % g.vertex_count();
        let psi = StateVector::basis(g.vertex_count(), v).unwrap();
        let two_step = evolve(&g, &evolve(&g, &psi, s).unwrap(), t).unwrap();
        let one_step = evolve(&g, &psi, s + t).unwrap();
        prop_assert!(two_step.max_abs_diff(&one_step) < 1e-10);
        prop_assert!((two_step.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn single_excitation_block_is_adjacency(g in graph_strategy(10)) {
        let block = xy_single_excitation_block(&g).unwrap();
        let adj = g.adjacency_matrix();
        prop_assert!(block.iter().zip(adj.iter()).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn sparse_xy_matches_dense(g in graph_strategy(5)) {
        prop_assert!(max_diff(&sparse_to_dense(&g), &dense_xy(&g)) < 1e-13);
    }
}

#[test]
fn transfer_amplitude_agrees_with_full_evolution() {
    let g = christandl_chain(5, 1.0).unwrap();
    let a = discowalk::transfer_amplitude(&g, VertexId(0), VertexId(5), FRAC_PI_2).unwrap();
    let u = taylor_propagator(&g.adjacency_matrix(), FRAC_PI_2);
    assert!((a - u[[5, 0]]).norm() < 1e-9);
}
