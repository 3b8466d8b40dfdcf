//! Dense and sparse Hermitian operator storage.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};
use crate::spin_basis::Basis;

/// Square complex matrix, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C::one());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for j in 0..dim {
            for i in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_column_major(dim: usize, data: Vec<C<T>>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::usage(format!(
                "dense matrix: {} entries for dim {dim}",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.data[j * self.dim + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C<T>) {
        self.data[j * self.dim + i] = v;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: C<T>) {
        self.data[j * self.dim + i] += v;
    }

    pub fn column(&self, j: usize) -> &[C<T>] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    pub fn matvec_into(&self, x: &[C<T>], y: &mut [C<T>]) {
        y.iter_mut().for_each(|v| *v = C::zero());
        for (j, &xj) in x.iter().enumerate() {
            if xj.is_zero() {
                continue;
            }
            for (yi, &a) in y.iter_mut().zip(self.column(j)) {
                *yi += a * xj;
            }
        }
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for j in 0..self.dim {
            for i in 0..=j {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let mut out = vec![C::zero(); self.dim * self.dim];
        T::complex_matmul(
            self.dim,
            self.dim,
            self.dim,
            &self.data,
            &other.data,
            &mut out,
        );
        Self {
            dim: self.dim,
            data: out,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Compressed sparse row matrix with unique, column-sorted entries per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C<T>>,
}

impl<T: Real> SparseMatrix<T> {
    /// Builds from triplets, summing duplicates and dropping exact zeros.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C<T>)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C<T>> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        let mut iter = triplets.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) outside dim {dim}");
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if r2 == r && c2 == c {
                    v += v2;
                    iter.next();
                } else {
                    break;
                }
            }
            if !v.is_zero() {
                rows.push(r);
                cols.push(c);
                vals.push(v);
            }
        }
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn diagonal_matrix(diag: &[C<T>]) -> Self {
        let triplets = diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(diag.len(), triplets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C<T>)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[range.clone()]
            .iter()
            .copied()
            .zip(self.vals[range].iter().copied())
    }

    pub fn row_len(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn get(&self, i: usize, j: usize) -> C<T> {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[range.clone()].binary_search(&j) {
            Ok(p) => self.vals[range.start + p],
            Err(_) => C::zero(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C<T>)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn matvec_into(&self, x: &[C<T>], y: &mut [C<T>]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = C::zero();
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[p] * x[self.cols[p]];
            }
            *yi = acc;
        }
    }

    pub fn hermiticity_defect(&self) -> T {
        self.entries()
            .map(|(i, j, v)| (v - self.get(j, i).conj()).norm())
            .fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.vals.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut m = DenseMatrix::zeros(self.dim);
        for (i, j, v) in self.entries() {
            m.set(i, j, v);
        }
        m
    }

    pub fn has_off_diagonal(&self) -> bool {
        self.entries().any(|(i, j, _)| i != j)
    }

    fn map_values(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self {
            dim: self.dim,
            row_ptr: self.row_ptr.clone(),
            cols: self.cols.clone(),
            vals: self.vals.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Storage backing an [`OperatorMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub enum Storage<T> {
    Dense(DenseMatrix<T>),
    Sparse(SparseMatrix<T>),
}

/// Hermitian operator tagged with the basis it acts on.
#[derive(Debug, Clone)]
pub struct OperatorMatrix<T> {
    basis: Basis,
    storage: Storage<T>,
}

/// Operators on spaces above this dimension are kept sparse.
pub const DENSE_LIMIT: usize = 4096;

impl<T: Real> OperatorMatrix<T> {
    pub fn new(basis: Basis, storage: Storage<T>) -> Result<Self> {
        let dim = match &storage {
            Storage::Dense(m) => m.dim(),
            Storage::Sparse(m) => m.dim(),
        };
        if dim != basis.dim() {
            return Err(Error::usage(format!(
                "operator of dim {dim} tagged with basis of dim {}",
                basis.dim()
            )));
        }
        if dim > DENSE_LIMIT && matches!(storage, Storage::Dense(_)) {
            return Err(Error::usage(format!(
                "dense storage requested for dim {dim} > {DENSE_LIMIT}"
            )));
        }
        Ok(Self { basis, storage })
    }

    pub fn dense(basis: Basis, m: DenseMatrix<T>) -> Result<Self> {
        Self::new(basis, Storage::Dense(m))
    }

    pub fn sparse(basis: Basis, m: SparseMatrix<T>) -> Result<Self> {
        Self::new(basis, Storage::Sparse(m))
    }

    pub fn zero(basis: Basis) -> Self {
        let dim = basis.dim();
        Self {
            basis,
            storage: Storage::Sparse(SparseMatrix::from_triplets(dim, Vec::new())),
        }
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn storage(&self) -> &Storage<T> {
        &self.storage
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn as_sparse(&self) -> Option<&SparseMatrix<T>> {
        match &self.storage {
            Storage::Sparse(m) => Some(m),
            Storage::Dense(_) => None,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> C<T> {
        match &self.storage {
            Storage::Dense(m) => m.get(i, j),
            Storage::Sparse(m) => m.get(i, j),
        }
    }

    pub fn apply_into(&self, x: &[C<T>], y: &mut [C<T>]) {
        match &self.storage {
            Storage::Dense(m) => m.matvec_into(x, y),
            Storage::Sparse(m) => m.matvec_into(x, y),
        }
    }

    pub fn apply(&self, x: &[C<T>]) -> Vec<C<T>> {
        let mut y = vec![C::zero(); x.len()];
        self.apply_into(x, &mut y);
        y
    }

    /// `Re <x|H|x>`.
    pub fn expectation(&self, x: &[C<T>]) -> T {
        let hx = self.apply(x);
        x.iter().zip(&hx).map(|(a, b)| (a.conj() * b).re).sum()
    }

    pub fn hermiticity_defect(&self) -> T {
        match &self.storage {
            Storage::Dense(m) => m.hermiticity_defect(),
            Storage::Sparse(m) => m.hermiticity_defect(),
        }
    }

    pub fn max_abs(&self) -> T {
        match &self.storage {
            Storage::Dense(m) => m.max_abs(),
            Storage::Sparse(m) => m.max_abs(),
        }
    }

    /// Hermiticity relative to the largest entry.
    pub fn is_hermitian(&self, rel_tol: T) -> bool {
        self.hermiticity_defect() <= rel_tol * self.max_abs().max(T::min_positive_value())
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(m) => m.to_dense(),
        }
    }

    pub fn diagonal(&self) -> Vec<C<T>> {
        (0..self.dim()).map(|i| self.get(i, i)).collect()
    }

    /// True when no off-diagonal entry is stored (sparse) or nonzero (dense).
    pub fn is_diagonal(&self) -> bool {
        match &self.storage {
            Storage::Sparse(m) => !m.has_off_diagonal(),
            Storage::Dense(m) => {
                (0..m.dim()).all(|j| (0..m.dim()).all(|i| i == j || m.get(i, j).is_zero()))
            }
        }
    }

    pub fn scaled(&self, s: T) -> Self {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(DenseMatrix {
                dim: m.dim,
                data: m.data.iter().map(|v| v.scale(s)).collect(),
            }),
            Storage::Sparse(m) => Storage::Sparse(m.map_values(|v| v.scale(s))),
        };
        Self {
            basis: self.basis.clone(),
            storage,
        }
    }

    /// Sum of two operators on the same basis; dense if either operand is.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.basis.ensure_same(&other.basis, "operator sum")?;
        let storage = match (&self.storage, &other.storage) {
            (Storage::Sparse(a), Storage::Sparse(b)) => {
                let triplets = a.entries().chain(b.entries()).collect();
                Storage::Sparse(SparseMatrix::from_triplets(a.dim(), triplets))
            }
            _ => {
                let mut m = self.to_dense();
                match &other.storage {
                    Storage::Dense(b) => {
                        for (x, y) in m.data.iter_mut().zip(&b.data) {
                            *x += y;
                        }
                    }
                    Storage::Sparse(b) => {
                        for (i, j, v) in b.entries() {
                            m.add_at(i, j, v);
                        }
                    }
                }
                Storage::Dense(m)
            }
        };
        Self::new(self.basis.clone(), storage)
    }

    /// Conjugation by the global flip `sigma_x` on all `N + 1` sites.
    ///
    /// On the full space the flip permutes indices `i -> i ^ mask`; a subspace
    /// operator maps to the dual subspace `(N, N - 1 - k)`.
    pub fn flip_conjugated(&self) -> Result<Self> {
        let (basis, source): (Basis, Vec<usize>) = match &self.basis {
            Basis::Full { n_env } => {
                let mask = (1usize << (n_env + 1)) - 1;
                (
                    self.basis.clone(),
                    (0..self.dim()).map(|i| i ^ mask).collect(),
                )
            }
            Basis::Subspace(s) => {
                let dual = s.dual();
                let mask = s.full_dim() - 1;
                let source = dual
                    .members()
                    .iter()
                    .map(|&m| {
                        s.position(m ^ mask)
                            .expect("flip maps onto the dual subspace")
                    })
                    .collect();
                (Basis::subspace(dual), source)
            }
        };
        let mut target = vec![0usize; source.len()];
        for (a, &p) in source.iter().enumerate() {
            target[p] = a;
        }
        let storage = match &self.storage {
            Storage::Sparse(m) => Storage::Sparse(SparseMatrix::from_triplets(
                m.dim(),
                m.entries()
                    .map(|(i, j, v)| (target[i], target[j], v))
                    .collect(),
            )),
            Storage::Dense(m) => Storage::Dense(DenseMatrix::from_fn(m.dim(), |a, b| {
                m.get(source[a], source[b])
            })),
        };
        Self::new(basis, storage)
    }
}
