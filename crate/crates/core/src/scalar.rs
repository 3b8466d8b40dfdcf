//! Scalar abstraction.
//!
//! Everything numeric in the crate is generic over [`Real`], which is
//! implemented for `f32` and `f64`. Dense factorizations and products are
//! delegated to faer through the trait so that generic code never has to
//! name faer's own field traits.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use faer::{Mat, MatRef, Side};
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Complex amplitude over a real scalar.
pub type C<T> = Complex<T>;

/// Floating point scalar usable throughout the simulator.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal or parameter into this type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Real")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }

    /// Eigendecomposition of a Hermitian matrix stored column-major.
    ///
    /// Returns ascending eigenvalues and the eigenvectors as the columns of a
    /// column-major `dim * dim` buffer, or `None` if the solver did not converge.
    fn hermitian_eigen(dim: usize, data: &[C<Self>]) -> Option<(Vec<Self>, Vec<C<Self>>)>;

    /// Eigendecomposition of a real symmetric matrix stored column-major.
    fn symmetric_eigen(dim: usize, data: &[Self]) -> Option<(Vec<Self>, Vec<Self>)>;

    /// `out = a * b` with `a` of shape `m x k`, `b` of shape `k x n`, all column-major.
    fn complex_matmul(
        m: usize,
        k: usize,
        n: usize,
        a: &[C<Self>],
        b: &[C<Self>],
        out: &mut [C<Self>],
    );
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn hermitian_eigen(dim: usize, data: &[C<Self>]) -> Option<(Vec<Self>, Vec<C<Self>>)> {
                assert_eq!(data.len(), dim * dim);
                if dim == 0 {
                    return Some((Vec::new(), Vec::new()));
                }
                let mat = MatRef::from_column_major_slice(data, dim, dim);
                let evd = mat.self_adjoint_eigen(Side::Lower).ok()?;
                let values: Vec<Self> = evd.S().column_vector().iter().map(|z| z.re).collect();
                let u = evd.U();
                let mut vectors = Vec::with_capacity(dim * dim);
                for j in 0..dim {
                    vectors.extend(u.col(j).iter().copied());
                }
                Some((values, vectors))
            }

            fn symmetric_eigen(dim: usize, data: &[Self]) -> Option<(Vec<Self>, Vec<Self>)> {
                assert_eq!(data.len(), dim * dim);
                if dim == 0 {
                    return Some((Vec::new(), Vec::new()));
                }
                let mat = MatRef::from_column_major_slice(data, dim, dim);
                let evd = mat.self_adjoint_eigen(Side::Lower).ok()?;
                let values: Vec<Self> = evd.S().column_vector().iter().copied().collect();
                let u = evd.U();
                let mut vectors = Vec::with_capacity(dim * dim);
                for j in 0..dim {
                    vectors.extend(u.col(j).iter().copied());
                }
                Some((values, vectors))
            }

            fn complex_matmul(
                m: usize,
                k: usize,
                n: usize,
                a: &[C<Self>],
                b: &[C<Self>],
                out: &mut [C<Self>],
            ) {
                assert_eq!(a.len(), m * k);
                assert_eq!(b.len(), k * n);
                assert_eq!(out.len(), m * n);
                let a = MatRef::from_column_major_slice(a, m, k);
                let b = MatRef::from_column_major_slice(b, k, n);
                let prod: Mat<C<Self>> = a * b;
                for j in 0..n {
                    for (dst, src) in out[j * m..(j + 1) * m].iter_mut().zip(prod.col(j).iter()) {
                        *dst = *src;
                    }
                }
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_x_spectrum() {
        let one = C::new(1.0, 0.0);
        let zero = C::new(0.0, 0.0);
        let (vals, vecs) = f64::hermitian_eigen(2, &[zero, one, one, zero]).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        // eigenvector of +1 is (1,1)/sqrt 2 up to phase
        let v = &vecs[2..4];
        assert!((v[0].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn matmul_matches_naive() {
        let a: Vec<C<f32>> = (0..6).map(|i| C::new(i as f32, 1.0)).collect();
        let b: Vec<C<f32>> = (0..6).map(|i| C::new(1.0, -(i as f32))).collect();
        let mut out = vec![C::new(0.0, 0.0); 4];
        f32::complex_matmul(2, 3, 2, &a, &b, &mut out);
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = C::new(0.0f32, 0.0);
                for l in 0..3 {
                    acc += a[l * 2 + i] * b[j * 3 + l];
                }
                assert!((acc - out[j * 2 + i]).norm() < 1e-4);
            }
        }
    }
}
