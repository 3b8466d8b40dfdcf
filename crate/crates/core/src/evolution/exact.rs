use num_traits::Zero;

use crate::error::Result;
use crate::scalar::{Real, C};

use super::{EigenSystem, PureState};

/// Propagation through the spectral decomposition, `psi(t) = V e^{-i Lambda t} V^dagger psi0`.
#[derive(Debug, Clone)]
pub struct ExactPropagator<'a, T> {
    eig: &'a EigenSystem<T>,
    coeffs: Vec<C<T>>,
}

const BATCH: usize = 128;

impl<'a, T: Real> ExactPropagator<'a, T> {
    pub fn new(eig: &'a EigenSystem<T>, psi0: &PureState<T>) -> Result<Self> {
        Ok(Self {
            eig,
            coeffs: eig.coefficients(psi0)?,
        })
    }

    /// Eigenbasis coefficients of the initial state.
    pub fn coefficients(&self) -> &[C<T>] {
        &self.coeffs
    }

    /// `exp(-i shift t) exp(-i (E_n - shift) t) c_n`; the common factor carries
    /// the roundoff of the large offset and drops out of every observable.
    fn phased(&self, t: T, out: &mut [C<T>]) {
        let g = -self.eig.shift() * t;
        let global = C::new(g.cos(), g.sin());
        for ((o, c), &lam) in out
            .iter_mut()
            .zip(&self.coeffs)
            .zip(self.eig.relative_values())
        {
            let phase = -lam * t;
            *o = c * C::new(phase.cos(), phase.sin()) * global;
        }
    }

    pub fn state_at(&self, t: T) -> PureState<T> {
        let d = self.eig.dim();
        let mut phased = vec![C::zero(); d];
        self.phased(t, &mut phased);
        let mut amps = vec![C::zero(); d];
        self.eig.vectors().matvec_into(&phased, &mut amps);
        PureState::new(self.eig.basis().clone(), amps).expect("dimension preserved")
    }

    /// Visits `psi(t)` for every time in order, reconstructing states in batches.
    pub fn for_each_state(
        &self,
        times: &[T],
        mut visit: impl FnMut(usize, T, &PureState<T>) -> Result<()>,
    ) -> Result<()> {
        let d = self.eig.dim();
        let mut phased = vec![C::zero(); d * BATCH];
        let mut out = vec![C::zero(); d * BATCH];
        for (chunk_index, chunk) in times.chunks(BATCH).enumerate() {
            let n = chunk.len();
            for (j, &t) in chunk.iter().enumerate() {
                self.phased(t, &mut phased[j * d..(j + 1) * d]);
            }
            T::complex_matmul(
                d,
                d,
                n,
                self.eig.vectors().as_slice(),
                &phased[..d * n],
                &mut out[..d * n],
            );
            for (j, &t) in chunk.iter().enumerate() {
                let state =
                    PureState::new(self.eig.basis().clone(), out[j * d..(j + 1) * d].to_vec())?;
                visit(chunk_index * BATCH + j, t, &state)?;
            }
        }
        Ok(())
    }
}

/// States at each of `times` by exact spectral propagation.
pub fn propagate_exact<T: Real>(
    eig: &EigenSystem<T>,
    psi0: &PureState<T>,
    times: &[T],
) -> Result<Vec<PureState<T>>> {
    let prop = ExactPropagator::new(eig, psi0)?;
    let mut out = Vec::with_capacity(times.len());
    prop.for_each_state(times, |_, _, s| {
        out.push(s.clone());
        Ok(())
    })?;
    Ok(out)
}
