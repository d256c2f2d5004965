//! Dense complex linear algebra on composite Hilbert spaces.
//!
//! Every operator, propagator and density matrix in the crate is a
//! [`ComplexMatrix`] stored row-major. Composite spaces follow the standard
//! Kronecker ordering: the first subsystem is the most significant digit of
//! a basis index and the last subsystem the least significant.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Absolute Hermiticity tolerance, scaled by `max(1, max|A|)`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance on `‖ψ‖ - 1` when constructing a [`PureState`].
pub const NORM_TOL: f64 = 1e-9;
/// Tolerance on `tr ρ - 1` when constructing a [`DensityMatrix`].
pub const TRACE_TOL: f64 = 1e-9;
/// Smallest eigenvalue accepted in a [`DensityMatrix`].
pub const MIN_EIGENVALUE_TOL: f64 = -1e-9;

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &[C64], bra: &[C64]) -> Self {
        Self::from_fn(ket.len(), bra.len(), |i, j| ket[i] * bra[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: C64, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.rows];
        self.apply_into(v, &mut out);
        out
    }

    /// `out = self * v`.
    pub fn apply_into(&self, v: &[C64], out: &mut [C64]) {
        assert_eq!(v.len(), self.cols);
        assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            *o = self
                .row(i)
                .iter()
                .zip(v)
                .fold(ZERO, |acc, (&a, &b)| acc + a * b);
        }
    }

    /// `out += s * self * v`.
    pub fn apply_add_scaled(&self, s: C64, v: &[C64], out: &mut [C64]) {
        assert_eq!(v.len(), self.cols);
        assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            let dot = self
                .row(i)
                .iter()
                .zip(v)
                .fold(ZERO, |acc, (&a, &b)| acc + a * b);
            *o += s * dot;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |A - A†|`; infinite for non-square input.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut err: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                err = err.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        err
    }

    /// Hermitian within `tol * max(1, max|A|)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol * self.max_abs().max(1.0)
    }

    /// `max |U†U - I|`.
    pub fn unitarity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows))
    }

    /// Maximum absolute row sum, an upper bound on the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn commutator(a: &Self, b: &Self) -> Self {
        &(a * b) - &(b * a)
    }

    /// Eigenvalues (ascending) and orthonormal eigenvectors (as columns) of a
    /// Hermitian matrix. Only Hermiticity of the input is checked.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "eigendecomposition of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        if !self.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::NotHermitian(self.hermiticity_error()));
        }
        let n = self.rows;
        let eig = DMatrix::from_row_slice(n, n, &self.data).symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = Self::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok((values, vectors))
    }

    /// Eigenvalues (ascending) of a Hermitian matrix.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        self.hermitian_eigen().map(|(values, _)| values)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self * &rhs
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(mut self, rhs: ComplexMatrix) -> ComplexMatrix {
        self += &rhs;
        self
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.add_scaled(ONE, rhs);
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(-ONE, rhs);
        out
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self - &rhs
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale(-ONE)
    }
}

// Single-qubit operators in the ordered basis {|0⟩, |1⟩}.

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![ZERO, -I, I, ZERO]).unwrap()
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
}

/// `σ⁺ = |1⟩⟨0|`.
pub fn sigma_plus() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 0.0, 1.0, 0.0]).unwrap()
}

/// `σ⁻ = |0⟩⟨1|`.
pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap()
}

/// Photon annihilation operator on the Fock space truncated at `cutoff` photons.
pub fn annihilation(cutoff: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(cutoff + 1, cutoff + 1);
    for n in 1..=cutoff {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// `a†a` on the Fock space truncated at `cutoff` photons.
pub fn number_operator(cutoff: usize) -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(&(0..=cutoff).map(|n| n as f64).collect::<Vec<_>>())
}

/// Ordered list of subsystem dimensions of a composite space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    dims: Vec<usize>,
}

impl HilbertSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidSubsystem("space needs at least one subsystem".into()));
        }
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidSubsystem(format!("subsystem {pos} has dimension 0")));
        }
        Ok(Self { dims })
    }

    /// `n` qubits.
    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    /// `n` qubits followed by a cavity truncated at `cutoff` photons.
    pub fn qubits_with_cavity(n: usize, cutoff: usize) -> Result<Self> {
        let mut dims = vec![2; n];
        dims.push(cutoff + 1);
        Self::new(dims)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Flat basis index of a product basis state given one level per subsystem.
    pub fn basis_index(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} levels given for {} subsystems",
                levels.len(),
                self.dims.len()
            )));
        }
        let mut index = 0;
        for (k, (&level, &dim)) in levels.iter().zip(&self.dims).enumerate() {
            if level >= dim {
                return Err(Error::InvalidSubsystem(format!(
                    "level {level} out of range for subsystem {k} of dimension {dim}"
                )));
            }
            index = index * dim + level;
        }
        Ok(index)
    }

    /// Per-subsystem levels of a flat basis index.
    pub fn levels(&self, mut index: usize) -> Vec<usize> {
        let mut levels = vec![0; self.dims.len()];
        for (slot, &dim) in levels.iter_mut().zip(&self.dims).rev() {
            *slot = index % dim;
            index /= dim;
        }
        levels
    }

    /// Sorted, deduplicated subsystem selection, validated against this space.
    fn selection(&self, keep: &[usize]) -> Result<Vec<usize>> {
        if keep.is_empty() {
            return Err(Error::InvalidSubsystem("empty subsystem selection".into()));
        }
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&bad) = keep.iter().find(|&&k| k >= self.dims.len()) {
            return Err(Error::InvalidSubsystem(format!(
                "subsystem {bad} out of range for {} subsystems",
                self.dims.len()
            )));
        }
        Ok(keep)
    }

    /// Sub-space made of the selected subsystems, in ascending order.
    pub fn subspace(&self, keep: &[usize]) -> Result<Self> {
        let keep = self.selection(keep)?;
        Self::new(keep.iter().map(|&k| self.dims[k]).collect())
    }
}

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    space: HilbertSpace,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(space: HilbertSpace, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for space of dimension {}",
                amplitudes.len(),
                space.dim()
            )));
        }
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm:.12} is not 1")));
        }
        Ok(Self { space, amplitudes })
    }

    /// Normalizes `amplitudes` before construction.
    pub fn normalized(space: HilbertSpace, mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= n);
        Self::new(space, amplitudes)
    }

    /// Product basis state with the given level on each subsystem.
    pub fn basis(space: HilbertSpace, levels: &[usize]) -> Result<Self> {
        let index = space.basis_index(levels)?;
        let mut amplitudes = vec![ZERO; space.dim()];
        amplitudes[index] = ONE;
        Ok(Self { space, amplitudes })
    }

    /// Integrator output; the norm is a measured diagnostic, not enforced.
    pub(crate) fn from_evolved(space: HilbertSpace, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(space.dim(), amplitudes.len());
        Self { space, amplitudes }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.space.dim() != other.space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "inner product of dimensions {} and {}",
                self.space.dim(),
                other.space.dim()
            )));
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// Expectation value `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<C64> {
        if op.rows() != self.space.dim() || !op.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator {}x{} on space of dimension {}",
                op.rows(),
                op.cols(),
                self.space.dim()
            )));
        }
        Ok(inner(&self.amplitudes, &op.apply(&self.amplitudes)))
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        DensityMatrix {
            space: self.space.clone(),
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    /// Reduced state on the selected subsystems.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let (sub, groups) = trace_groups(&self.space, keep)?;
        let mut out = ComplexMatrix::zeros(sub.dim(), sub.dim());
        for group in &groups {
            for &(a, ka) in group {
                let psi_a = self.amplitudes[a];
                if psi_a == ZERO {
                    continue;
                }
                for &(b, kb) in group {
                    out[(ka, kb)] += psi_a * self.amplitudes[b].conj();
                }
            }
        }
        Ok(DensityMatrix::from_evolved(sub, out))
    }
}

/// Numerical health of a density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateDiagnostics {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: HilbertSpace,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(space: HilbertSpace, matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::checked_dims(space, matrix)?;
        let d = rho.diagnose()?;
        if d.hermiticity_error > HERMITIAN_TOL {
            return Err(Error::NotHermitian(d.hermiticity_error));
        }
        if d.trace_error > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace differs from 1 by {:.3e}",
                d.trace_error
            )));
        }
        if d.min_eigenvalue < MIN_EIGENVALUE_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:.3e}",
                d.min_eigenvalue
            )));
        }
        Ok(rho)
    }

    fn checked_dims(space: HilbertSpace, matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for space of dimension {}",
                matrix.rows(),
                matrix.cols(),
                space.dim()
            )));
        }
        Ok(Self { space, matrix })
    }

    /// Integrator output; validity is checked by the caller's diagnostics.
    pub(crate) fn from_evolved(space: HilbertSpace, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(space.dim(), matrix.rows());
        Self { space, matrix }
    }

    pub fn maximally_mixed(space: HilbertSpace) -> Self {
        let d = space.dim();
        Self {
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
            space,
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Trace drift, Hermiticity error and smallest eigenvalue (of the
    /// Hermitian part).
    pub fn diagnose(&self) -> Result<StateDiagnostics> {
        let hermiticity_error = self.matrix.hermiticity_error();
        let herm_part = (&self.matrix + &self.matrix.adjoint()).scale_real(0.5);
        let eigenvalues = herm_part.hermitian_eigenvalues()?;
        Ok(StateDiagnostics {
            trace_error: (self.trace() - ONE).norm(),
            hermiticity_error,
            min_eigenvalue: eigenvalues.first().copied().unwrap_or(0.0),
        })
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(psi: &PureState) -> Self {
        psi.to_density_matrix()
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Kronecker product of a non-empty list of factors, left to right.
pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let (first, rest) = factors.split_first().expect("kron_all needs at least one factor");
    rest.iter().fold((*first).clone(), |acc, m| kron(&acc, m))
}

/// Lifts `op` acting on subsystem `at` to the full space, identity elsewhere.
pub fn embed(op: &ComplexMatrix, at: usize, space: &HilbertSpace) -> Result<ComplexMatrix> {
    let dims = space.dims();
    let Some(&dim) = dims.get(at) else {
        return Err(Error::InvalidSubsystem(format!(
            "subsystem {at} out of range for {} subsystems",
            dims.len()
        )));
    };
    if op.rows() != dim || op.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator on subsystem {at} of dimension {dim}",
            op.rows(),
            op.cols()
        )));
    }
    let left: usize = dims[..at].iter().product();
    let right: usize = dims[at + 1..].iter().product();
    Ok(kron(
        &kron(&ComplexMatrix::identity(left), op),
        &ComplexMatrix::identity(right),
    ))
}

/// `U(t) = exp(-i t H)` for Hermitian `H`, via eigendecomposition.
pub fn expm_propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    Ok(Spectral::new(h)?.propagator(t))
}

/// Cached eigendecomposition of a Hermitian generator, for repeated
/// propagator evaluations.
#[derive(Clone, Debug)]
pub struct Spectral {
    values: Vec<f64>,
    vectors: ComplexMatrix,
    vectors_adj: ComplexMatrix,
}

impl Spectral {
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        let (values, vectors) = h.hermitian_eigen()?;
        let vectors_adj = vectors.adjoint();
        Ok(Self {
            values,
            vectors,
            vectors_adj,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        let phases: Vec<C64> = self
            .values
            .iter()
            .map(|&e| C64::from_polar(1.0, -e * t))
            .collect();
        let scaled = ComplexMatrix::from_fn(self.vectors.rows(), self.vectors.cols(), |i, j| {
            self.vectors[(i, j)] * phases[j]
        });
        &scaled * &self.vectors_adj
    }

    /// `exp(-i t H) ψ` without forming the propagator.
    pub fn evolve(&self, psi: &[C64], t: f64) -> Vec<C64> {
        let mut coeffs = self.vectors_adj.apply(psi);
        for (c, &e) in coeffs.iter_mut().zip(&self.values) {
            *c *= C64::from_polar(1.0, -e * t);
        }
        self.vectors.apply(&coeffs)
    }
}

/// Pairs every full basis index with its index in the kept subspace, grouped
/// by the configuration of the traced-out subsystems.
fn trace_groups(
    space: &HilbertSpace,
    keep: &[usize],
) -> Result<(HilbertSpace, Vec<Vec<(usize, usize)>>)> {
    let keep = space.selection(keep)?;
    let sub = space.subspace(&keep)?;
    let traced_dims: Vec<usize> = (0..space.num_subsystems())
        .filter(|k| !keep.contains(k))
        .map(|k| space.dims()[k])
        .collect();
    let traced_dim: usize = traced_dims.iter().product();
    let mut groups = vec![Vec::with_capacity(sub.dim()); traced_dim];
    for full in 0..space.dim() {
        let levels = space.levels(full);
        let (mut kept, mut traced) = (0, 0);
        for (k, (&level, &dim)) in levels.iter().zip(space.dims()).enumerate() {
            if keep.contains(&k) {
                kept = kept * dim + level;
            } else {
                traced = traced * dim + level;
            }
        }
        groups[traced].push((full, kept));
    }
    Ok((sub, groups))
}

/// Partial trace keeping the subsystems in `keep` (returned in ascending
/// subsystem order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let (sub, groups) = trace_groups(rho.space(), keep)?;
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(sub.dim(), sub.dim());
    for group in &groups {
        for &(a, ka) in group {
            for &(b, kb) in group {
                out[(ka, kb)] += m[(a, b)];
            }
        }
    }
    Ok(DensityMatrix::from_evolved(sub, out))
}

/// States whose overlap with a pure target can be measured.
pub trait QuantumState {
    fn dim(&self) -> usize;

    /// `⟨target|ρ|target⟩`, unclamped.
    fn raw_overlap(&self, target: &[C64]) -> f64;
}

impl QuantumState for PureState {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn raw_overlap(&self, target: &[C64]) -> f64 {
        inner(target, &self.amplitudes).norm_sqr()
    }
}

impl QuantumState for DensityMatrix {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn raw_overlap(&self, target: &[C64]) -> f64 {
        inner(target, &self.matrix.apply(target)).re
    }
}

/// Fidelity with a pure target: `|⟨target|ψ⟩|²` or `⟨target|ρ|target⟩`,
/// clamped to `[0, 1]`.
pub fn fidelity<S: QuantumState + ?Sized>(state: &S, target: &PureState) -> Result<f64> {
    if state.dim() != target.space().dim() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity between dimensions {} and {}",
            state.dim(),
            target.space().dim()
        )));
    }
    Ok(state.raw_overlap(target.amplitudes()).clamp(0.0, 1.0))
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.space().dim() != 4 || rho.space().dims().iter().any(|&d| d != 2 && d != 4) {
        return Err(Error::DimensionMismatch(format!(
            "concurrence needs a two-qubit state, got dims {:?}",
            rho.space().dims()
        )));
    }
    let d = rho.diagnose()?;
    if d.hermiticity_error > HERMITIAN_TOL
        || d.trace_error > TRACE_TOL
        || d.min_eigenvalue < MIN_EIGENVALUE_TOL
    {
        return Err(Error::InvalidState(format!(
            "concurrence of invalid density matrix ({d:?})"
        )));
    }
    let yy = kron(&sigma_y(), &sigma_y());
    let m = rho.matrix();
    let flipped = &(&yy * &m.conj()) * &yy;
    // R = sqrt(ρ) ρ̃ sqrt(ρ) is Hermitian and shares its spectrum with ρ ρ̃.
    let sqrt_rho = psd_sqrt(m)?;
    let r = &(&sqrt_rho * &flipped) * &sqrt_rho;
    let r = (&r + &r.adjoint()).scale_real(0.5);
    let mut lambdas: Vec<f64> = r
        .hermitian_eigenvalues()?
        .into_iter()
        .map(|v| clip_negative(v).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0))
}

/// Eigenvalues in `(-1e-9, 0)` are numerical noise.
fn clip_negative(v: f64) -> f64 {
    if v < 0.0 && v >= MIN_EIGENVALUE_TOL {
        0.0
    } else {
        v.max(0.0)
    }
}

fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let herm = (m + &m.adjoint()).scale_real(0.5);
    let (values, vectors) = herm.hermitian_eigen()?;
    let roots: Vec<C64> = values
        .iter()
        .map(|&v| C64::new(clip_negative(v).sqrt(), 0.0))
        .collect();
    Ok(&(&vectors * &ComplexMatrix::from_diagonal(&roots)) * &vectors.adjoint())
}

/// `⟨a|b⟩`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
