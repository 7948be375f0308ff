//! Exact propagators from real symmetric eigendecompositions.
//!
//! A graph Hamiltonian is block diagonal over its connected components, so
//! the spectrum is stored per component. Each block is diagonalized with the
//! cyclic Jacobi method, which keeps full relative accuracy on the small,
//! highly degenerate blocks that rail layouts produce.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::scalar::{phase_neg, Real, C};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a real symmetric matrix, `A = Q diag(values) Q^T`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Array1<T>,
    /// Orthonormal eigenvectors stored as columns.
    pub vectors: Array2<T>,
}

/// Cyclic Jacobi diagonalization. Eigenvalues come back in ascending order.
pub fn symmetric_eigen<T: Real>(matrix: &Array2<T>) -> Result<SymmetricEigen<T>> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: matrix.ncols(),
        });
    }
    let mut a = matrix.clone();
    let mut v = Array2::<T>::eye(n);
    let scale = a.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[[p, q]] * a[[p, q]];
            }
        }
        if off.sqrt() <= eps * eps * scale.max(T::min_positive_value()) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                if apq == T::zero() {
                    continue;
                }
                let app = a[[p, p]];
                let aqq = a[[q, q]];
                // Skip rotations whose effect is below roundoff of both diagonal entries.
                let tiny = T::lit(100.0) * apq.abs();
                if app.abs() + tiny == app.abs() && aqq.abs() + tiny == aqq.abs() {
                    a[[p, q]] = T::zero();
                    a[[q, p]] = T::zero();
                    continue;
                }
                let theta = (aqq - app) / (apq + apq);
                let t = {
                    let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() {
                        -t
                    } else {
                        t
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                a[[p, q]] = T::zero();
                a[[q, p]] = T::zero();
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[[i, i]]
            .partial_cmp(&a[[j, j]])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = Array1::from_iter(order.iter().map(|&i| a[[i, i]]));
    let mut vectors = Array2::zeros((n, n));
    for (col, &i) in order.iter().enumerate() {
        vectors.column_mut(col).assign(&v.column(i));
    }

    let eig = SymmetricEigen { values, vectors };
    let residual = eig.reconstruction_error(matrix);
    let tolerance = residual_tolerance::<T>(scale);
    if !(residual <= tolerance) {
        return Err(Error::Numerical {
            residual: residual.to_f64_lossy(),
            tolerance: tolerance.to_f64_lossy(),
        });
    }
    Ok(eig)
}

fn residual_tolerance<T: Real>(scale: T) -> T {
    T::epsilon().powf(T::lit(2.0 / 3.0)) * scale.max(T::one())
}

impl<T: Real> SymmetricEigen<T> {
    /// `max |A - Q diag(values) Q^T|`.
    pub fn reconstruction_error(&self, matrix: &Array2<T>) -> T {
        let n = matrix.nrows();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let mut acc = T::zero();
                for k in 0..n {
                    acc += self.vectors[[i, k]] * self.values[k] * self.vectors[[j, k]];
                }
                worst = worst.max((acc - matrix[[i, j]]).abs());
            }
        }
        worst
    }

    /// `max |Q^T Q - I|`.
    pub fn orthonormality_error(&self) -> T {
        let gram = self.vectors.t().dot(&self.vectors);
        let n = gram.nrows();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((gram[[i, j]] - target).abs());
            }
        }
        worst
    }
}

#[derive(Debug, Clone)]
struct Block<T> {
    vertices: Vec<usize>,
    eigen: SymmetricEigen<T>,
}

/// Spectrum of a graph Hamiltonian, one eigendecomposition per connected
/// component. Applying `exp(-i G t)` costs `sum n_c^2` per call.
#[derive(Debug, Clone)]
pub struct Spectrum<T> {
    dim: usize,
    blocks: Vec<Block<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn of(graph: &WeightedGraph<T>) -> Result<Self> {
        let full = graph.adjacency_matrix();
        let mut blocks = Vec::new();
        for vertices in graph.components() {
            let k = vertices.len();
            let mut sub = Array2::zeros((k, k));
            for (a, &i) in vertices.iter().enumerate() {
                for (b, &j) in vertices.iter().enumerate() {
                    sub[[a, b]] = full[[i, j]];
                }
            }
            let eigen = symmetric_eigen(&sub)?;
            blocks.push(Block { vertices, eigen });
        }
        Ok(Self {
            dim: graph.vertex_count(),
            blocks,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// All eigenvalues, paired column-for-column with [`Self::eigenvectors`].
    pub fn eigenvalues(&self) -> Array1<T> {
        Array1::from_iter(
            self.blocks
                .iter()
                .flat_map(|b| b.eigen.values.iter().copied()),
        )
    }

    /// Dense orthonormal eigenvector matrix assembled from the blocks.
    pub fn eigenvectors(&self) -> Array2<T> {
        let mut q = Array2::zeros((self.dim, self.dim));
        let mut col = 0;
        for b in &self.blocks {
            for k in 0..b.vertices.len() {
                for (a, &i) in b.vertices.iter().enumerate() {
                    q[[i, col]] = b.eigen.vectors[[a, k]];
                }
                col += 1;
            }
        }
        q
    }

    pub fn as_dense(&self) -> SymmetricEigen<T> {
        SymmetricEigen {
            values: self.eigenvalues(),
            vectors: self.eigenvectors(),
        }
    }

    /// Returns `exp(-i G t) psi`.
    pub fn propagate(&self, psi: &[C<T>], t: T) -> Result<Vec<C<T>>> {
        if psi.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: psi.len(),
            });
        }
        let mut out = vec![C::new(T::zero(), T::zero()); self.dim];
        for b in &self.blocks {
            let k = b.vertices.len();
            if k == 1 {
                // Isolated vertex: eigenvalue zero, amplitude untouched.
                let v = b.vertices[0];
                out[v] = psi[v] * phase_neg(b.eigen.values[0] * t);
                continue;
            }
            let q = &b.eigen.vectors;
            // coefficients c = Q^T psi, then scaled by exp(-i lambda t)
            let mut coeffs = vec![C::new(T::zero(), T::zero()); k];
            for (m, coeff) in coeffs.iter_mut().enumerate() {
                let mut acc = C::new(T::zero(), T::zero());
                for (a, &i) in b.vertices.iter().enumerate() {
                    acc = acc + psi[i] * q[[a, m]];
                }
                *coeff = acc * phase_neg(b.eigen.values[m] * t);
            }
            for (a, &i) in b.vertices.iter().enumerate() {
                let mut acc = C::new(T::zero(), T::zero());
                for (m, coeff) in coeffs.iter().enumerate() {
                    acc = acc + *coeff * q[[a, m]];
                }
                out[i] = acc;
            }
        }
        Ok(out)
    }

    /// Dense propagator `exp(-i G t)`.
    pub fn propagator(&self, t: T) -> Array2<C<T>> {
        let mut u = Array2::from_elem((self.dim, self.dim), C::new(T::zero(), T::zero()));
        let mut basis = vec![C::new(T::zero(), T::zero()); self.dim];
        for j in 0..self.dim {
            basis[j] = C::new(T::one(), T::zero());
            let col = self.propagate(&basis, t).expect("dimension matches");
            for (i, z) in col.into_iter().enumerate() {
                u[[i, j]] = z;
            }
            basis[j] = C::new(T::zero(), T::zero());
        }
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::christandl_chain;
    use ndarray::array;

    #[test]
    fn two_by_two_eigen() {
        let eig = symmetric_eigen(&array![[0.0f64, 1.0], [1.0, 0.0]]).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-15);
        assert!((eig.values[1] - 1.0).abs() < 1e-15);
        assert!(eig.orthonormality_error() < 1e-15);
    }

    #[test]
    fn degenerate_spectrum_is_handled() {
        // K4: eigenvalues -1 (x3) and 3
        let mut m = Array2::from_elem((4, 4), 1.0f64);
        for i in 0..4 {
            m[[i, i]] = 0.0;
        }
        let eig = symmetric_eigen(&m).unwrap();
        for k in 0..3 {
            assert!((eig.values[k] + 1.0).abs() < 1e-14);
        }
        assert!((eig.values[3] - 3.0).abs() < 1e-14);
        assert!(eig.reconstruction_error(&m) < 1e-14);
        assert!(eig.orthonormality_error() < 1e-14);
    }

    #[test]
    fn block_spectrum_matches_dense_invariants() {
        let g = christandl_chain(6, 1.0)
            .unwrap()
            .union(&WeightedGraph::empty(7))
            .unwrap();
        let dense = Spectrum::of(&g).unwrap().as_dense();
        assert!(dense.reconstruction_error(&g.adjacency_matrix()) < 1e-10);
        assert!(dense.orthonormality_error() < 1e-10);
    }

    #[test]
    fn propagate_rejects_wrong_length() {
        let g = christandl_chain(2, 1.0f64).unwrap();
        let s = Spectrum::of(&g).unwrap();
        assert!(s.propagate(&[C::new(1.0, 0.0)], 1.0).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let g = christandl_chain(5, 1.0f32).unwrap();
        let eig = symmetric_eigen(&g.adjacency_matrix()).unwrap();
        // spectrum of the chain is -M, -M+2, ..., M
        for (k, v) in eig.values.iter().enumerate() {
            let expected = -5.0 + 2.0 * k as f32;
            assert!((v - expected).abs() < 1e-5, "{v} vs {expected}");
        }
    }
}
