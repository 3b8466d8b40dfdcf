use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::config::{CouplingKind, ModelConfig, RingKind};
use super::operator::{DenseMatrix, OperatorMatrix, SparseMatrix, DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::{Real, C};
use crate::spin_basis::{AccessibleSubspace, Basis};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// Matrix in the single-spin bit basis `[down, up]`, indexed `[row][col]`.
    pub fn matrix<T: Real>(self) -> [[C<T>; 2]; 2] {
        let o = C::zero();
        let one = C::one();
        let i = C::i();
        match self {
            Pauli::X => [[o, one], [one, o]],
            Pauli::Y => [[o, i], [-i, o]],
            Pauli::Z => [[-one, o], [o, one]],
        }
    }
}

/// Operator on two spins, indexed by `2 * bit_a + bit_b`.
pub type TwoSite<T> = [[C<T>; 4]; 4];

pub fn kron2<T: Real>(a: Pauli, b: Pauli) -> TwoSite<T> {
    let (ma, mb) = (a.matrix::<T>(), b.matrix::<T>());
    let mut out = [[C::zero(); 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = ma[r >> 1][c >> 1] * mb[r & 1][c & 1];
        }
    }
    out
}

fn accumulate<T: Real>(acc: &mut TwoSite<T>, term: &TwoSite<T>, w: T) {
    for (ra, rt) in acc.iter_mut().zip(term) {
        for (a, t) in ra.iter_mut().zip(rt) {
            *a += t.scale(w);
        }
    }
}

/// Basis vectors a builder iterates over, as (position, full index) pairs.
fn columns(basis: &Basis) -> Box<dyn Iterator<Item = (usize, usize)> + '_> {
    match basis {
        Basis::Full { .. } => Box::new((0..basis.dim()).map(|i| (i, i))),
        Basis::Subspace(s) => Box::new(s.members().iter().copied().enumerate()),
    }
}

fn row_position(basis: &Basis, full: usize) -> Option<usize> {
    match basis {
        Basis::Full { .. } => Some(full),
        Basis::Subspace(s) => s.position(full),
    }
}

/// Appends the matrix elements of a two-site operator, restricted to `basis`.
fn push_two_site<T: Real>(
    basis: &Basis,
    site_a: usize,
    site_b: usize,
    local: &TwoSite<T>,
    out: &mut Vec<(usize, usize, C<T>)>,
) {
    let clear = !((1usize << site_a) | (1usize << site_b));
    for (col, full) in columns(basis) {
        let ba = (full >> site_a) & 1;
        let bb = (full >> site_b) & 1;
        let c = 2 * ba + bb;
        for (r, row) in local.iter().enumerate() {
            let v = row[c];
            if v.is_zero() {
                continue;
            }
            let target = (full & clear) | ((r >> 1) << site_a) | ((r & 1) << site_b);
            if let Some(p) = row_position(basis, target) {
                out.push((p, col, v));
            }
        }
    }
}

/// `(delta_s/2) sigma_z^S + (delta_c/2) sum_nu sigma_z^(nu)`, diagonal.
pub fn zeeman_hamiltonian<T: Real>(basis: &Basis, delta_s: f64, delta_c: f64) -> OperatorMatrix<T> {
    let n_env = basis.n_env();
    let hs = T::of(delta_s / 2.0);
    let hc = T::of(delta_c / 2.0);
    let diag: Vec<C<T>> = columns(basis)
        .map(|(_, full)| {
            let s0 = if full & 1 == 1 { T::one() } else { -T::one() };
            let up = (full >> 1).count_ones() as i64;
            let jz = T::of((2 * up - n_env as i64) as f64);
            C::from(hs * s0 + hc * jz)
        })
        .collect();
    OperatorMatrix::sparse(basis.clone(), SparseMatrix::diagonal_matrix(&diag))
        .expect("diagonal matches basis")
}

/// Hermitian GUE sample scaled by `scale`.
///
/// Before scaling, diagonal entries are `Normal(0, 1)` and off-diagonal entries
/// have independent real and imaginary parts `Normal(0, 1/2)`, so every entry
/// has unit mean square. Entries are drawn column by column over the upper
/// triangle (`i <= j`).
pub fn sample_gue<T: Real, R: Rng + ?Sized>(
    basis: &Basis,
    scale: f64,
    rng: &mut R,
) -> Result<OperatorMatrix<T>> {
    let dim = basis.dim();
    if dim == 0 {
        return Err(Error::domain("GUE on an empty space"));
    }
    if dim > DENSE_LIMIT {
        return Err(Error::Capacity {
            dim,
            cap: DENSE_LIMIT,
        });
    }
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = DenseMatrix::<T>::zeros(dim);
    for j in 0..dim {
        for i in 0..=j {
            if i == j {
                let x: f64 = StandardNormal.sample(rng);
                m.set(i, i, C::new(T::of(scale * x), T::zero()));
            } else {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                let z = C::new(T::of(scale * half * re), T::of(scale * half * im));
                m.set(i, j, z);
                m.set(j, i, z.conj());
            }
        }
    }
    OperatorMatrix::dense(basis.clone(), m)
}

/// Coefficients `gamma_ij^(nu)` of the star coupling, one 3x3 block per environment spin.
#[derive(Debug, Clone, PartialEq)]
pub struct StarCoefficients {
    pub blocks: Vec<[[f64; 3]; 3]>,
}

impl StarCoefficients {
    /// Independent `Normal(0, 1)` draws, ordered by spin, then `i`, then `j`.
    pub fn sample<R: Rng + ?Sized>(n_env: usize, rng: &mut R) -> Self {
        let blocks = (0..n_env)
            .map(|_| {
                let mut b = [[0.0; 3]; 3];
                for row in b.iter_mut() {
                    for v in row.iter_mut() {
                        *v = StandardNormal.sample(rng);
                    }
                }
                b
            })
            .collect();
        Self { blocks }
    }

    /// Coefficients with a single nonzero entry, useful for tests.
    pub fn single(n_env: usize, spin: usize, i: Pauli, j: Pauli, value: f64) -> Self {
        let mut blocks = vec![[[0.0; 3]; 3]; n_env];
        blocks[spin][i as usize][j as usize] = value;
        Self { blocks }
    }

    fn local<T: Real>(&self, spin: usize) -> TwoSite<T> {
        let mut acc = [[C::zero(); 4]; 4];
        for (a, pa) in Pauli::ALL.iter().enumerate() {
            for (b, pb) in Pauli::ALL.iter().enumerate() {
                let g = self.blocks[spin][a][b];
                if g != 0.0 {
                    accumulate(&mut acc, &kron2(*pa, *pb), T::of(g));
                }
            }
        }
        acc
    }
}

/// `alpha * sum_nu sum_ij gamma_ij^(nu) sigma_i^S sigma_j^(nu)`, sparse.
pub fn star_coupling<T: Real>(
    basis: &Basis,
    coeffs: &StarCoefficients,
    alpha: f64,
) -> Result<OperatorMatrix<T>> {
    let n_env = basis.n_env();
    if coeffs.blocks.len() != n_env {
        return Err(Error::usage(format!(
            "{} star coefficient blocks for {n_env} environment spins",
            coeffs.blocks.len()
        )));
    }
    let mut triplets = Vec::new();
    for nu in 1..=n_env {
        let mut local = coeffs.local::<T>(nu - 1);
        for row in local.iter_mut() {
            for v in row.iter_mut() {
                *v = v.scale(T::of(alpha));
            }
        }
        push_two_site(basis, 0, nu, &local, &mut triplets);
    }
    OperatorMatrix::sparse(
        basis.clone(),
        SparseMatrix::from_triplets(basis.dim(), triplets),
    )
}

impl RingKind {
    pub fn bond_terms(self) -> &'static [Pauli] {
        match self {
            RingKind::IsingXx => &[Pauli::X],
            RingKind::Xy => &[Pauli::X, Pauli::Y],
            RingKind::Heisenberg => &[Pauli::X, Pauli::Y, Pauli::Z],
            RingKind::IsingZz => &[Pauli::Z],
        }
    }
}

/// `gamma * sum_nu h(nu, nu+1)` over environment spins with periodic boundary.
pub fn ring_coupling<T: Real>(
    basis: &Basis,
    kind: RingKind,
    gamma: f64,
) -> Result<OperatorMatrix<T>> {
    let n_env = basis.n_env();
    if n_env < 3 {
        return Err(Error::domain(format!(
            "ring needs at least 3 spins, got {n_env}"
        )));
    }
    let mut local = [[C::zero(); 4]; 4];
    for &p in kind.bond_terms() {
        accumulate(&mut local, &kron2(p, p), T::of(gamma));
    }
    let mut triplets = Vec::new();
    for nu in 1..=n_env {
        let next = if nu == n_env { 1 } else { nu + 1 };
        push_two_site(basis, nu, next, &local, &mut triplets);
    }
    OperatorMatrix::sparse(
        basis.clone(),
        SparseMatrix::from_triplets(basis.dim(), triplets),
    )
}

/// `P H P` restricted to the members of `subspace`, dense.
pub fn project<T: Real>(
    op: &OperatorMatrix<T>,
    subspace: &AccessibleSubspace,
) -> Result<OperatorMatrix<T>> {
    let n_env = match op.basis() {
        Basis::Full { n_env } => *n_env,
        Basis::Subspace(s) => {
            if s.n_env() == subspace.n_env() && s.k() == subspace.k() {
                return OperatorMatrix::dense(op.basis().clone(), op.to_dense());
            }
            return Err(Error::usage(
                "project: operator lives on a different subspace",
            ));
        }
    };
    if n_env != subspace.n_env() {
        return Err(Error::usage(format!(
            "project: operator on N = {n_env}, subspace on N = {}",
            subspace.n_env()
        )));
    }
    let dim = subspace.dim();
    if dim > DENSE_LIMIT {
        return Err(Error::Capacity {
            dim,
            cap: DENSE_LIMIT,
        });
    }
    let mut m = DenseMatrix::zeros(dim);
    match op.as_sparse() {
        Some(sp) => {
            for (p, &full) in subspace.members().iter().enumerate() {
                for (col, v) in sp.row(full) {
                    if let Some(q) = subspace.position(col) {
                        m.set(p, q, v);
                    }
                }
            }
        }
        None => {
            let members = subspace.members();
            for q in 0..dim {
                for p in 0..dim {
                    m.set(p, q, op.get(members[p], members[q]));
                }
            }
        }
    }
    OperatorMatrix::dense(Basis::subspace(subspace.clone()), m)
}

/// A model Hamiltonian split into its parts.
#[derive(Debug, Clone)]
pub struct ModelHamiltonian<T> {
    pub total: OperatorMatrix<T>,
    /// `H^S + H^C`, the Zeeman part.
    pub free: OperatorMatrix<T>,
    /// `alpha * H^int`.
    pub interaction: OperatorMatrix<T>,
    /// `H^CC`, present for ring-star models.
    pub ring: Option<OperatorMatrix<T>>,
    pub subspace: AccessibleSubspace,
}

impl<T: Real> ModelHamiltonian<T> {
    pub fn basis(&self) -> &Basis {
        self.total.basis()
    }
}

/// Builds the model Hamiltonian on `basis` (full space or the config's subspace).
///
/// Randomness comes from `config.seed`: the star coefficients and the GUE
/// sample use separate streams, so models differing only in `gamma` share
/// their star coupling.
pub fn assemble_on<T: Real>(config: &ModelConfig, basis: &Basis) -> Result<ModelHamiltonian<T>> {
    config.validate()?;
    let subspace = AccessibleSubspace::new(config.n_env, config.k)?;
    if subspace.dim() == 0 {
        return Err(Error::domain("empty accessible subspace"));
    }
    let free = zeeman_hamiltonian::<T>(basis, config.delta_s, config.delta_c);
    let (interaction, ring) = match config.coupling {
        CouplingKind::Gue => {
            if basis.is_full() {
                return Err(Error::usage(
                    "the GUE interaction is sampled on the accessible subspace only",
                ));
            }
            let mut r = rng::stream(config.seed, rng::STREAM_GUE);
            (sample_gue::<T, _>(basis, config.alpha, &mut r)?, None)
        }
        CouplingKind::Star | CouplingKind::RingStar => {
            let mut r = rng::stream(config.seed, rng::STREAM_STAR);
            let coeffs = StarCoefficients::sample(config.n_env, &mut r);
            let star = star_coupling::<T>(basis, &coeffs, config.alpha)?;
            let ring = if config.coupling == CouplingKind::RingStar {
                Some(ring_coupling::<T>(
                    basis,
                    config.ring,
                    config.gamma_energy(),
                )?)
            } else {
                None
            };
            (star, ring)
        }
    };
    let mut total = free.add(&interaction)?;
    if let Some(r) = &ring {
        total = total.add(r)?;
    }
    if let Basis::Subspace(_) = basis {
        total = OperatorMatrix::dense(basis.clone(), total.to_dense())?;
    }
    Ok(ModelHamiltonian {
        total,
        free,
        interaction,
        ring,
        subspace,
    })
}

/// GUE models on the accessible subspace, star and ring-star models on the full space.
pub fn assemble<T: Real>(config: &ModelConfig) -> Result<ModelHamiltonian<T>> {
    let basis = match config.coupling {
        CouplingKind::Gue => Basis::subspace(AccessibleSubspace::new(config.n_env, config.k)?),
        _ => Basis::full(config.n_env),
    };
    assemble_on(config, &basis)
}

/// Any model restricted to its accessible subspace (dense).
pub fn assemble_projected<T: Real>(config: &ModelConfig) -> Result<ModelHamiltonian<T>> {
    let basis = Basis::subspace(AccessibleSubspace::new(config.n_env, config.k)?);
    assemble_on(config, &basis)
}
