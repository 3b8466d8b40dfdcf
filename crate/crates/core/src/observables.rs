//! Central-spin observables: partial trace, time averages, the diagonal
//! ensemble, and eigenstate statistics.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::evolution::{EigenSystem, PureState, Trajectory};
use crate::hamiltonian::CouplingKind;
use crate::scalar::{Real, C};
use crate::spin_basis::Basis;

/// 2x2 density matrix of the central spin in the basis `[|1>, |0>]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedSpinState<T> {
    pub rho: [[C<T>; 2]; 2],
    /// `(Tr sigma_x rho, Tr sigma_y rho, Tr sigma_z rho)`.
    pub bloch: [T; 3],
}

impl<T: Real> ReducedSpinState<T> {
    pub fn from_rho(rho: [[C<T>; 2]; 2]) -> Self {
        let two = T::of(2.0);
        let ud = rho[0][1];
        let bloch = [two * ud.re, -two * ud.im, rho[0][0].re - rho[1][1].re];
        Self { rho, bloch }
    }

    /// Diagonal state with populations `p_up` of `|1>` and `p_down` of `|0>`.
    pub fn diagonal(p_up: T, p_down: T) -> Self {
        let z = C::zero();
        Self::from_rho([[C::from(p_up), z], [z, C::from(p_down)]])
    }

    pub fn trace(&self) -> C<T> {
        self.rho[0][0] + self.rho[1][1]
    }

    pub fn bloch_length(&self) -> T {
        self.bloch.iter().map(|b| *b * *b).sum::<T>().sqrt()
    }

    /// Eigenvalues `(1 -+ |b|) / 2`, ascending.
    pub fn eigenvalues(&self) -> [T; 2] {
        let half = T::of(0.5);
        let r = self.bloch_length();
        [half * (T::one() - r), half * (T::one() + r)]
    }

    /// Unit trace, Hermiticity, positivity and Bloch length within `tol`.
    pub fn is_valid(&self, tol: T) -> bool {
        let tr = self.trace();
        (tr.re - T::one()).abs() <= tol
            && tr.im.abs() <= tol
            && (self.rho[0][1] - self.rho[1][0].conj()).norm() <= tol
            && self.rho[0][0].im.abs() <= tol
            && self.rho[1][1].im.abs() <= tol
            && self.eigenvalues()[0] >= -tol
            && self.bloch_length() <= T::one() + tol
    }
}

/// Partial trace over the environment.
///
/// Subspace states are traced through their embedding; since the two blocks
/// carry environments of different weight, their coherences vanish exactly.
pub fn reduce_central<T: Real>(psi: &PureState<T>) -> Result<ReducedSpinState<T>> {
    let norm2: T = psi.amplitudes().iter().map(|z| z.norm_sqr()).sum();
    if (norm2.sqrt() - T::one()).abs() > T::of(1e-8) {
        return Err(Error::usage(format!(
            "reduce_central: state norm {} is not 1",
            norm2.sqrt()
        )));
    }
    let a = psi.amplitudes();
    let z = C::zero();
    let rho = match psi.basis() {
        Basis::Full { .. } => {
            let mut uu = T::zero();
            let mut dd = T::zero();
            let mut ud = C::zero();
            for pair in a.chunks_exact(2) {
                let (down, up) = (pair[0], pair[1]);
                uu += up.norm_sqr();
                dd += down.norm_sqr();
                ud += up * down.conj();
            }
            [[C::from(uu), ud], [ud.conj(), C::from(dd)]]
        }
        Basis::Subspace(s) => {
            let (upper, lower) = a.split_at(s.upper_len());
            let uu: T = upper.iter().map(|z| z.norm_sqr()).sum();
            let dd: T = lower.iter().map(|z| z.norm_sqr()).sum();
            [[C::from(uu), z], [z, C::from(dd)]]
        }
    };
    Ok(ReducedSpinState::from_rho(rho))
}

/// Finite-time average of the Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeAverage<T> {
    pub mean: [T; 3],
    /// Standard deviation over the retained samples (fluctuation amplitude).
    pub std: [T; 3],
    /// Standard error of the mean from batch means, accounting for correlation in time.
    pub std_error: [T; 3],
    pub samples: usize,
}

/// Samples required after discarding the transient.
pub const MIN_AVERAGE_SAMPLES: usize = 100;
const BATCHES: usize = 20;

/// Mean and spread of a trajectory after dropping its first `discard_fraction`.
pub fn numeric_time_average<T: Real>(
    traj: &Trajectory<T>,
    discard_fraction: f64,
) -> Result<TimeAverage<T>> {
    if !(0.0..1.0).contains(&discard_fraction) {
        return Err(Error::usage(format!(
            "discard fraction {discard_fraction} outside [0, 1)"
        )));
    }
    let skip = (traj.len() as f64 * discard_fraction).floor() as usize;
    let kept = &traj.bloch[skip.min(traj.len())..];
    let n = kept.len();
    if n < MIN_AVERAGE_SAMPLES {
        return Err(Error::usage(format!(
            "time average needs at least {MIN_AVERAGE_SAMPLES} samples, have {n}"
        )));
    }
    let mut out = TimeAverage {
        mean: [T::zero(); 3],
        std: [T::zero(); 3],
        std_error: [T::zero(); 3],
        samples: n,
    };
    let nt = T::of(n as f64);
    let batch = n / BATCHES;
    for axis in 0..3 {
        let mean = kept.iter().map(|b| b[axis]).sum::<T>() / nt;
        let var = kept.iter().map(|b| (b[axis] - mean).powi(2)).sum::<T>() / nt;
        let means: Vec<T> = (0..BATCHES)
            .map(|j| {
                kept[j * batch..(j + 1) * batch]
                    .iter()
                    .map(|b| b[axis])
                    .sum::<T>()
                    / T::of(batch as f64)
            })
            .collect();
        let bm = means.iter().copied().sum::<T>() / T::of(BATCHES as f64);
        let bvar = means.iter().map(|m| (*m - bm).powi(2)).sum::<T>() / T::of((BATCHES - 1) as f64);
        out.mean[axis] = mean;
        out.std[axis] = var.sqrt();
        out.std_error[axis] = (bvar / T::of(BATCHES as f64)).sqrt();
    }
    Ok(out)
}

/// `sigma_z` of the central spin on each basis vector.
pub fn central_sz_diagonal<T: Real>(basis: &Basis) -> Vec<T> {
    (0..basis.dim())
        .map(|i| T::of(basis.central_sz(i) as f64))
        .collect()
}

/// Infinite-time average of `<sigma_z>`: `sum_n |<e_n|psi0>|^2 lambda_{z,n}`.
///
/// Eigenvalues closer than `1e-10 ||H||` are treated as one eigenspace `P`,
/// contributing `<psi0|P sigma_z P|psi0>`; this equals the weighting in a basis
/// of the eigenspace that diagonalizes the projected `sigma_z`.
pub fn diagonal_ensemble_average<T: Real>(eig: &EigenSystem<T>, psi0: &PureState<T>) -> Result<T> {
    let coeffs = eig.coefficients(psi0)?;
    let sz = central_sz_diagonal::<T>(eig.basis());
    let d = eig.dim();
    let mut total = T::zero();
    let mut projected = vec![C::<T>::zero(); d];
    for group in eig.degenerate_groups(eig.degeneracy_tolerance()) {
        if group.len() == 1 {
            let n = group.start;
            let lz: T = eig
                .vector(n)
                .iter()
                .zip(&sz)
                .map(|(v, s)| v.norm_sqr() * *s)
                .sum();
            total += coeffs[n].norm_sqr() * lz;
            continue;
        }
        projected.iter_mut().for_each(|p| *p = C::zero());
        for n in group {
            let c = coeffs[n];
            for (p, v) in projected.iter_mut().zip(eig.vector(n)) {
                *p += v * c;
            }
        }
        total += projected
            .iter()
            .zip(&sz)
            .map(|(p, s)| p.norm_sqr() * *s)
            .sum::<T>();
    }
    Ok(total)
}

/// Provenance of a λ_z sample.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampleMeta {
    pub coupling: Option<CouplingKind>,
    pub gamma: f64,
    pub seed: u64,
}

/// z-Bloch components `lambda_{z,n}` of the reduced eigenstates of one Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaZSample<T> {
    pub values: Vec<T>,
    pub meta: SampleMeta,
}

impl<T: Real> LambdaZSample<T> {
    pub fn mean(&self) -> T {
        mean(&self.values)
    }
}

/// `lambda_{z,n} = Tr(sigma_z Tr_C |e_n><e_n|)` for every eigenstate of a subspace Hamiltonian.
///
/// Degenerate eigenspaces are first rotated to diagonalize the projected `sigma_z`.
pub fn eigenstate_lambdas<T: Real>(eig: &EigenSystem<T>) -> Result<LambdaZSample<T>> {
    if eig.basis().as_subspace().is_none() {
        return Err(Error::usage(
            "eigenstate lambdas are taken over the accessible subspace",
        ));
    }
    let sz = central_sz_diagonal::<T>(eig.basis());
    let mut eig = eig.clone();
    let tol = eig.degeneracy_tolerance();
    eig.resolve_degeneracies(&sz, tol)?;
    let rounding = T::of(1e-9);
    let values = (0..eig.dim())
        .map(|n| {
            let lz: T = eig
                .vector(n)
                .iter()
                .zip(&sz)
                .map(|(v, s)| v.norm_sqr() * *s)
                .sum();
            if lz.abs() > T::one() && lz.abs() <= T::one() + rounding {
                lz.signum()
            } else {
                lz
            }
        })
        .collect();
    Ok(LambdaZSample {
        values,
        meta: SampleMeta::default(),
    })
}

/// Fixed-width histogram over `[lo, hi)` with half-open bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub width: f64,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn centers(&self) -> Vec<f64> {
        (0..self.counts.len())
            .map(|i| self.lo + (i as f64 + 0.5) * self.width)
            .collect()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

pub const DEFAULT_BIN_WIDTH: f64 = 0.02;
pub const DEFAULT_RANGE: (f64, f64) = (-1.0, 1.0);

/// Bins `values` into `[lo + i w, lo + (i+1) w)`.
///
/// Values outside the range are counted in the nearest edge bin, so the counts
/// always partition the input; in particular `lambda_z = 1` lands in the last bin.
pub fn histogram<T: Real>(values: &[T], bin_width: f64, range: (f64, f64)) -> Result<Histogram> {
    let (lo, hi) = range;
    if bin_width.is_nan() || bin_width <= 0.0 {
        return Err(Error::domain(format!(
            "bin width {bin_width} must be positive"
        )));
    }
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return Err(Error::domain(format!("empty histogram range [{lo}, {hi})")));
    }
    if values.is_empty() {
        return Ok(Histogram {
            lo,
            width: bin_width,
            counts: Vec::new(),
        });
    }
    let bins = (((hi - lo) / bin_width) - 1e-9).ceil().max(1.0) as usize;
    let mut counts = vec![0usize; bins];
    for v in values {
        let x = v.to_f64_lossy();
        if x.is_nan() {
            return Err(Error::domain("histogram of NaN"));
        }
        let i = ((x - lo) / bin_width).floor();
        let i = if i < 0.0 {
            0
        } else {
            (i as usize).min(bins - 1)
        };
        counts[i] += 1;
    }
    Ok(Histogram {
        lo,
        width: bin_width,
        counts,
    })
}

pub fn mean<T: Real>(values: &[T]) -> T {
    if values.is_empty() {
        return T::nan();
    }
    values.iter().copied().sum::<T>() / T::of(values.len() as f64)
}

/// Population standard deviation.
pub fn std_dev<T: Real>(values: &[T]) -> T {
    let m = mean(values);
    (values.iter().map(|v| (*v - m).powi(2)).sum::<T>() / T::of(values.len() as f64)).sqrt()
}

/// Fraction of values strictly below `threshold`.
pub fn fraction_below<T: Real>(values: &[T], threshold: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values
        .iter()
        .filter(|v| v.to_f64_lossy() < threshold)
        .count() as f64
        / values.len() as f64
}
