use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hamiltonian::{DenseMatrix, OperatorMatrix};
use crate::scalar::{Real, C};
use crate::spin_basis::Basis;

use super::PureState;

/// Largest dimension accepted by the dense eigensolver.
pub const DEFAULT_DENSE_CAP: usize = 8192;

/// Spectral decomposition `H = V diag(values) V^dagger`.
///
/// The solve runs on `H - shift`, `shift` being the mean diagonal entry, and
/// the eigenvalues relative to it are kept. Phases `exp(-i E t)` built from the
/// relative values stay accurate to `eps * ||H - shift|| * t` instead of
/// `eps * ||H|| * t`, which matters when a large Zeeman offset is propagated over
/// long times.
#[derive(Debug, Clone)]
pub struct EigenSystem<T> {
    values: Vec<T>,
    relative: Vec<T>,
    shift: T,
    vectors: DenseMatrix<T>,
    basis: Basis,
}

pub fn eigendecompose<T: Real>(op: &OperatorMatrix<T>) -> Result<EigenSystem<T>> {
    eigendecompose_capped(op, DEFAULT_DENSE_CAP)
}

pub fn eigendecompose_capped<T: Real>(
    op: &OperatorMatrix<T>,
    cap: usize,
) -> Result<EigenSystem<T>> {
    let dim = op.dim();
    if dim > cap {
        return Err(Error::Capacity { dim, cap });
    }
    let mut dense = op.to_dense();
    let shift = if dim == 0 {
        T::zero()
    } else {
        (0..dim).map(|i| dense.get(i, i).re).sum::<T>() / T::of(dim as f64)
    };
    for i in 0..dim {
        dense.add_at(i, i, C::from(-shift));
    }
    let (relative, vectors) = T::hermitian_eigen(dim, dense.as_slice())
        .ok_or_else(|| Error::Eigen(format!("no convergence at dim {dim}")))?;
    Ok(EigenSystem {
        values: relative.iter().map(|&r| r + shift).collect(),
        relative,
        shift,
        vectors: DenseMatrix::from_column_major(dim, vectors)?,
        basis: op.basis().clone(),
    })
}

impl<T: Real> EigenSystem<T> {
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Eigenvalues minus [`EigenSystem::shift`], as computed.
    pub fn relative_values(&self) -> &[T] {
        &self.relative
    }

    pub fn shift(&self) -> T {
        self.shift
    }

    pub fn vectors(&self) -> &DenseMatrix<T> {
        &self.vectors
    }

    pub fn vector(&self, n: usize) -> &[C<T>] {
        self.vectors.column(n)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Largest eigenvalue magnitude, the spectral norm of `H`.
    pub fn spectral_radius(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Eigenbasis coefficients `V^dagger psi`.
    pub fn coefficients(&self, psi: &PureState<T>) -> Result<Vec<C<T>>> {
        self.basis.ensure_same(psi.basis(), "eigen coefficients")?;
        Ok((0..self.dim())
            .map(|n| {
                self.vector(n)
                    .iter()
                    .zip(psi.amplitudes())
                    .map(|(v, a)| v.conj() * a)
                    .sum()
            })
            .collect())
    }

    /// `max |H - V diag V^dagger|` over entries.
    pub fn reconstruction_residual(&self, op: &OperatorMatrix<T>) -> T {
        let d = self.dim();
        let scaled = DenseMatrix::from_fn(d, |i, n| self.vectors.get(i, n).scale(self.values[n]));
        let rebuilt = scaled.matmul(&self.vectors.adjoint());
        rebuilt.sub(&op.to_dense()).max_abs()
    }

    /// `max |V^dagger V - I|` over entries.
    pub fn orthonormality_defect(&self) -> T {
        let d = self.dim();
        let gram = self.vectors.adjoint().matmul(&self.vectors);
        gram.sub(&DenseMatrix::identity(d)).max_abs()
    }

    /// Index ranges of eigenvalues equal within `tol`.
    pub fn degenerate_groups(&self, tol: T) -> Vec<std::ops::Range<usize>> {
        let mut groups = Vec::new();
        let mut start = 0;
        for n in 1..=self.dim() {
            if n == self.dim() || self.relative[n] - self.relative[n - 1] > tol {
                groups.push(start..n);
                start = n;
            }
        }
        groups
    }

    /// Within every degenerate eigenspace, rotates the eigenvectors so that the
    /// diagonal observable `obs` (given by its basis-state values) is diagonal.
    ///
    /// Returns the number of eigenspaces that were rotated.
    pub fn resolve_degeneracies(&mut self, obs: &[T], tol: T) -> Result<usize> {
        if obs.len() != self.dim() {
            return Err(Error::usage(
                "observable length does not match the eigensystem",
            ));
        }
        let d = self.dim();
        let mut rotated = 0;
        for group in self.degenerate_groups(tol) {
            let g = group.len();
            if g < 2 {
                continue;
            }
            let cols: Vec<usize> = group.clone().collect();
            let mut m = vec![C::<T>::zero(); g * g];
            for (b, &cb) in cols.iter().enumerate() {
                for (a, &ca) in cols.iter().enumerate() {
                    let va = self.vectors.column(ca);
                    let vb = self.vectors.column(cb);
                    m[b * g + a] = (0..d).map(|i| va[i].conj() * vb[i].scale(obs[i])).sum();
                }
            }
            let (_, w) = T::hermitian_eigen(g, &m)
                .ok_or_else(|| Error::Eigen("degenerate block did not converge".into()))?;
            let mut block = vec![C::<T>::zero(); d * g];
            for (b, &cb) in cols.iter().enumerate() {
                block[b * d..(b + 1) * d].copy_from_slice(self.vectors.column(cb));
            }
            let mut out = vec![C::<T>::zero(); d * g];
            T::complex_matmul(d, g, g, &block, &w, &mut out);
            for (b, &cb) in cols.iter().enumerate() {
                for i in 0..d {
                    self.vectors.set(i, cb, out[b * d + i]);
                }
            }
            rotated += 1;
        }
        Ok(rotated)
    }

    /// Default degeneracy tolerance, `1e-10 * ||H||`.
    pub fn degeneracy_tolerance(&self) -> T {
        T::of(1e-10) * self.spectral_radius().max(T::min_positive_value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::SparseMatrix;

    #[test]
    fn diagonal_input() {
        let diag: Vec<C<f64>> = [3.0, -1.0, 2.0].iter().map(|&x| C::new(x, 0.0)).collect();
        let op = OperatorMatrix::sparse(
            Basis::full(1),
            SparseMatrix::diagonal_matrix(&[diag, vec![C::new(0.5, 0.0)]].concat()),
        )
        .unwrap();
        let e = eigendecompose(&op).unwrap();
        assert_eq!(e.values(), &[-1.0, 0.5, 2.0, 3.0]);
        // eigenvectors are basis vectors up to phase
        for n in 0..4 {
            let big = e.vector(n).iter().filter(|z| z.norm() > 0.5).count();
            assert_eq!(big, 1);
        }
    }

    #[test]
    fn pauli_x() {
        let x = crate::hamiltonian::Pauli::X.matrix::<f64>();
        let m = DenseMatrix::from_fn(2, |i, j| x[i][j]);
        // a 2x2 operator needs a 2-dim basis: use the N = 1, k = 0 subspace's neighbour sizes
        let sub = crate::spin_basis::AccessibleSubspace::new(1, 0).unwrap();
        let op = OperatorMatrix::dense(Basis::subspace(sub), m).unwrap();
        let e = eigendecompose(&op).unwrap();
        assert!((e.values()[0] + 1.0).abs() < 1e-15);
        assert!((e.values()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn capacity_error() {
        let op = OperatorMatrix::<f64>::zero(Basis::full(6));
        assert!(matches!(
            eigendecompose_capped(&op, 64),
            Err(Error::Capacity { dim: 128, cap: 64 })
        ));
    }
}
