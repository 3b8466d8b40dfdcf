//! Product basis of the central spin plus `N` environment spins.
//!
//! A basis state of the full `2^(N+1)` dimensional space is a bit pattern:
//! bit 0 is the central spin, bits `1..=N` are the environment spins, and a
//! set bit means `sigma_z = +1` (the upper Zeeman level). The full-space index
//! of a state is the bit pattern itself, i.e. `(env << 1) | central`.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Largest `n` accepted by [`binomial`].
pub const MAX_BINOMIAL_N: u32 = 62;

/// Largest environment handled by the bit encoding (full space `2^(N+1)` must index into `usize`).
pub const MAX_ENV_SPINS: usize = 30;

/// Exact binomial coefficient `C(n, k)` for `0 <= k <= n <= 62`.
pub fn binomial(n: u32, k: u32) -> Result<u64> {
    if n > MAX_BINOMIAL_N {
        return Err(Error::domain(format!(
            "binomial: n = {n} exceeds {MAX_BINOMIAL_N}"
        )));
    }
    if k > n {
        return Err(Error::domain(format!("binomial: k = {k} exceeds n = {n}")));
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc * (n - i) / (i + 1);
    }
    Ok(acc as u64)
}

fn check_env(n_env: usize) -> Result<()> {
    if n_env == 0 || n_env > MAX_ENV_SPINS {
        return Err(Error::domain(format!(
            "environment size {n_env} outside 1..={MAX_ENV_SPINS}"
        )));
    }
    Ok(())
}

/// All `N`-bit environment patterns with `k` set bits, in increasing order.
///
/// The position of a pattern in the returned list is its intra-band index `m`.
pub fn enumerate_band(n_env: usize, k: usize) -> Result<Vec<u64>> {
    check_env(n_env)?;
    if k > n_env {
        return Err(Error::domain(format!("band index {k} exceeds N = {n_env}")));
    }
    let count = binomial(n_env as u32, k as u32)? as usize;
    let mut out = Vec::with_capacity(count);
    if k == 0 {
        out.push(0);
        return Ok(out);
    }
    let limit = 1u64 << n_env;
    let mut v: u64 = (1u64 << k) - 1;
    while v < limit {
        out.push(v);
        // next larger integer with the same popcount
        let t = v | (v - 1);
        v = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
    }
    debug_assert_eq!(out.len(), count);
    Ok(out)
}

/// One product basis state `|s> (x) |env>` of the central spin and environment.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinConfiguration {
    bits: u64,
    n_env: usize,
}

impl SpinConfiguration {
    pub fn new(n_env: usize, bits: u64) -> Result<Self> {
        check_env(n_env)?;
        if bits >> (n_env + 1) != 0 {
            return Err(Error::domain(format!(
                "bit pattern {bits:#b} longer than N + 1 = {}",
                n_env + 1
            )));
        }
        Ok(Self { bits, n_env })
    }

    pub fn from_parts(n_env: usize, central_up: bool, env: u64) -> Result<Self> {
        Self::new(n_env, (env << 1) | u64::from(central_up))
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn n_env(&self) -> usize {
        self.n_env
    }

    /// Index of this state in the full product basis.
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn central_up(&self) -> bool {
        self.bits & 1 == 1
    }

    pub fn env(&self) -> u64 {
        self.bits >> 1
    }

    /// Environment band index `k`, the number of up environment spins.
    pub fn band(&self) -> usize {
        self.env().count_ones() as usize
    }

    /// `sigma_z` eigenvalue (+1 or -1) of site `site` (0 = central spin).
    pub fn sz(&self, site: usize) -> i32 {
        if (self.bits >> site) & 1 == 1 {
            1
        } else {
            -1
        }
    }

    /// The state with every spin flipped.
    pub fn flipped(&self) -> Self {
        let mask = (1u64 << (self.n_env + 1)) - 1;
        Self {
            bits: !self.bits & mask,
            n_env: self.n_env,
        }
    }
}

impl fmt::Debug for SpinConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|{}>|{:0width$b}>",
            self.bits & 1,
            self.env(),
            width = self.n_env
        )
    }
}

/// An environment energy band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSpec {
    pub k: usize,
    /// `C(N, k)`, exact.
    pub degeneracy: u64,
    /// `k * delta_C`, in units of `delta_C`.
    pub energy: f64,
}

impl BandSpec {
    pub fn new(n_env: usize, k: usize) -> Result<Self> {
        check_env(n_env)?;
        if k > n_env {
            return Err(Error::domain(format!("band index {k} exceeds N = {n_env}")));
        }
        Ok(Self {
            k,
            degeneracy: binomial(n_env as u32, k as u32)?,
            energy: k as f64,
        })
    }
}

/// The resonant two-band subspace spanned by `|1>|k,m>` and `|0>|k+1,m'>`.
///
/// Members are stored as full-space indices: first the `C(N,k)` states with
/// the central spin up, then the `C(N,k+1)` states with the central spin down,
/// each block in increasing order.
#[derive(Clone, PartialEq, Eq)]
pub struct AccessibleSubspace {
    n_env: usize,
    k: usize,
    members: Vec<usize>,
    upper_len: usize,
}

impl AccessibleSubspace {
    pub fn new(n_env: usize, k: usize) -> Result<Self> {
        check_env(n_env)?;
        if k >= n_env {
            return Err(Error::domain(format!(
                "band index {k} has no upper neighbour for N = {n_env}"
            )));
        }
        let upper = enumerate_band(n_env, k)?;
        let lower = enumerate_band(n_env, k + 1)?;
        let upper_len = upper.len();
        let members = upper
            .into_iter()
            .map(|e| ((e << 1) | 1) as usize)
            .chain(lower.into_iter().map(|e| (e << 1) as usize))
            .collect();
        Ok(Self {
            n_env,
            k,
            members,
            upper_len,
        })
    }

    pub fn n_env(&self) -> usize {
        self.n_env
    }

    /// Lower band index `k`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Number of members with the central spin up, `C(N,k)`.
    pub fn upper_len(&self) -> usize {
        self.upper_len
    }

    /// Number of members with the central spin down, `C(N,k+1)`.
    pub fn lower_len(&self) -> usize {
        self.members.len() - self.upper_len
    }

    /// Dimension of the full product space, `2^(N+1)`.
    pub fn full_dim(&self) -> usize {
        1usize << (self.n_env + 1)
    }

    /// `sigma_z` of the central spin for the member at subspace position `i`.
    pub fn central_sz(&self, i: usize) -> i32 {
        if i < self.upper_len {
            1
        } else {
            -1
        }
    }

    /// Subspace position of a full-space index, if it is a member.
    pub fn position(&self, full_index: usize) -> Option<usize> {
        let env_weight = (full_index >> 1).count_ones() as usize;
        if full_index & 1 == 1 {
            if env_weight != self.k {
                return None;
            }
            self.members[..self.upper_len]
                .binary_search(&full_index)
                .ok()
        } else {
            if env_weight != self.k + 1 {
                return None;
            }
            self.members[self.upper_len..]
                .binary_search(&full_index)
                .ok()
                .map(|p| p + self.upper_len)
        }
    }

    /// Places subspace amplitudes at their member indices of the full space.
    pub fn embed<T: Real>(&self, amps: &[C<T>]) -> Result<Vec<C<T>>> {
        if amps.len() != self.dim() {
            return Err(Error::usage(format!(
                "embed: vector of length {} on subspace of dim {}",
                amps.len(),
                self.dim()
            )));
        }
        let mut full = vec![C::zero(); self.full_dim()];
        for (&idx, &a) in self.members.iter().zip(amps) {
            full[idx] = a;
        }
        Ok(full)
    }

    /// Gathers member amplitudes of a full-space vector.
    ///
    /// Also returns the norm of the discarded component.
    pub fn restrict<T: Real>(&self, full: &[C<T>]) -> Result<(Vec<C<T>>, T)> {
        if full.len() != self.full_dim() {
            return Err(Error::usage(format!(
                "restrict: vector of length {} on full space of dim {}",
                full.len(),
                self.full_dim()
            )));
        }
        let kept: Vec<C<T>> = self.members.iter().map(|&i| full[i]).collect();
        let mut outside = full.iter().map(|z| z.norm_sqr()).collect::<Vec<T>>();
        for &i in &self.members {
            outside[i] = T::zero();
        }
        let residual = outside.into_iter().sum::<T>().sqrt();
        Ok((kept, residual))
    }

    /// The subspace reached by flipping every spin: `(N, N-1-k)`.
    pub fn dual(&self) -> Self {
        Self::new(self.n_env, self.n_env - 1 - self.k).expect("dual band index is valid")
    }
}

impl fmt::Debug for AccessibleSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AccessibleSubspace")
            .field("n_env", &self.n_env)
            .field("k", &self.k)
            .field("dim", &self.dim())
            .finish()
    }
}

/// Which space a vector or operator lives on.
#[derive(Debug, Clone)]
pub enum Basis {
    /// The full `2^(N+1)` product space.
    Full { n_env: usize },
    /// An accessible two-band subspace.
    Subspace(Arc<AccessibleSubspace>),
}

impl Basis {
    pub fn full(n_env: usize) -> Self {
        Basis::Full { n_env }
    }

    pub fn subspace(sub: AccessibleSubspace) -> Self {
        Basis::Subspace(Arc::new(sub))
    }

    pub fn dim(&self) -> usize {
        match self {
            Basis::Full { n_env } => 1usize << (n_env + 1),
            Basis::Subspace(s) => s.dim(),
        }
    }

    pub fn n_env(&self) -> usize {
        match self {
            Basis::Full { n_env } => *n_env,
            Basis::Subspace(s) => s.n_env(),
        }
    }

    pub fn is_full(&self) -> bool {
        matches!(self, Basis::Full { .. })
    }

    pub fn as_subspace(&self) -> Option<&Arc<AccessibleSubspace>> {
        match self {
            Basis::Subspace(s) => Some(s),
            Basis::Full { .. } => None,
        }
    }

    /// `sigma_z` of the central spin for basis vector `i`.
    pub fn central_sz(&self, i: usize) -> i32 {
        match self {
            Basis::Full { .. } => {
                if i & 1 == 1 {
                    1
                } else {
                    -1
                }
            }
            Basis::Subspace(s) => s.central_sz(i),
        }
    }

    pub fn same_as(&self, other: &Basis) -> bool {
        match (self, other) {
            (Basis::Full { n_env: a }, Basis::Full { n_env: b }) => a == b,
            (Basis::Subspace(a), Basis::Subspace(b)) => a.n_env() == b.n_env() && a.k() == b.k(),
            _ => false,
        }
    }

    pub(crate) fn ensure_same(&self, other: &Basis, what: &str) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::usage(format!(
                "{what}: basis mismatch ({self:?} vs {other:?})"
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(14, 2).unwrap(), 91);
        assert_eq!(binomial(14, 3).unwrap(), 364);
        for n in 0..=62 {
            assert_eq!(binomial(n, 0).unwrap(), 1);
        }
        assert_eq!(binomial(62, 31).unwrap(), 465_428_353_255_261_088);
    }

    #[test]
    fn binomial_rejects_out_of_range() {
        assert!(matches!(binomial(63, 1), Err(Error::Domain(_))));
        assert!(matches!(binomial(5, 6), Err(Error::Domain(_))));
    }

    #[test]
    fn binomial_row_sums() {
        for n in 0..=20u32 {
            let s: u64 = (0..=n).map(|k| binomial(n, k).unwrap()).sum();
            assert_eq!(s, 1u64 << n);
        }
    }

    #[test]
    fn small_bands() {
        assert_eq!(enumerate_band(3, 1).unwrap(), vec![0b001, 0b010, 0b100]);
        assert_eq!(enumerate_band(3, 0).unwrap(), vec![0]);
        assert_eq!(enumerate_band(3, 3).unwrap(), vec![0b111]);
        assert_eq!(enumerate_band(14, 2).unwrap().len(), 91);
        assert!(enumerate_band(3, 4).is_err());
    }

    #[test]
    fn band_enumeration_matches_filter() {
        for n in 1..=10 {
            for k in 0..=n {
                let expect: Vec<u64> = (0..1u64 << n)
                    .filter(|b| b.count_ones() as usize == k)
                    .collect();
                assert_eq!(enumerate_band(n, k).unwrap(), expect);
            }
        }
    }

    #[test]
    fn subspace_dimensions() {
        assert_eq!(AccessibleSubspace::new(14, 2).unwrap().dim(), 455);
        assert_eq!(AccessibleSubspace::new(14, 11).unwrap().dim(), 455);
        assert_eq!(AccessibleSubspace::new(2, 0).unwrap().dim(), 3);
        assert!(matches!(
            AccessibleSubspace::new(4, 4),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn subspace_blocks() {
        for n in 2..=9 {
            for k in 0..n {
                let s = AccessibleSubspace::new(n, k).unwrap();
                assert_eq!(s.upper_len() as u64, binomial(n as u32, k as u32).unwrap());
                assert_eq!(
                    s.lower_len() as u64,
                    binomial(n as u32, k as u32 + 1).unwrap()
                );
                for (p, &m) in s.members().iter().enumerate() {
                    let c = SpinConfiguration::new(n, m as u64).unwrap();
                    if c.central_up() {
                        assert_eq!(c.band(), k);
                    } else {
                        assert_eq!(c.band(), k + 1);
                    }
                    assert_eq!(s.position(m), Some(p));
                }
                let up = &s.members()[..s.upper_len()];
                let down = &s.members()[s.upper_len()..];
                assert!(up.windows(2).all(|w| w[0] < w[1]));
                assert!(down.windows(2).all(|w| w[0] < w[1]));
                let hits = (0..s.full_dim())
                    .filter(|&i| s.position(i).is_some())
                    .count();
                assert_eq!(hits, s.dim());
            }
        }
    }

    #[test]
    fn restrict_outside_is_zero() {
        let s = AccessibleSubspace::new(3, 1).unwrap();
        let mut full = vec![C::<f64>::zero(); s.full_dim()];
        // all spins down is outside the subspace
        full[0] = C::new(1.0, 0.0);
        let (kept, residual) = s.restrict(&full).unwrap();
        assert!(kept.iter().all(|z| z.norm() == 0.0));
        assert!((residual - 1.0).abs() < 1e-15);
        assert!(s.restrict::<f64>(&full[..4]).is_err());
        assert!(s.embed::<f64>(&full).is_err());
    }

    #[test]
    fn flip_maps_subspace_to_dual() {
        let s = AccessibleSubspace::new(6, 1).unwrap();
        let d = s.dual();
        assert_eq!(d.k(), 4);
        for &m in s.members() {
            let f = SpinConfiguration::new(6, m as u64).unwrap().flipped();
            assert!(d.position(f.index()).is_some());
        }
    }
}
