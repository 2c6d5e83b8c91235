use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{qubits_for_dim, ONE, ZERO};
use crate::error::{Error, Result};

/// Tolerance on `‖ψ‖² − 1` accepted by [`PureState::new`].
pub const STATE_NORM_TOL: f64 = 1e-12;

/// Dense `2^n × 2^n` complex operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    mat: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                left: mat.nrows(),
                right: mat.ncols(),
            });
        }
        if qubits_for_dim(mat.nrows()).is_none() {
            return Err(Error::NotPowerOfTwo(mat.nrows()));
        }
        Ok(Self { mat })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self {
            mat: DMatrix::from_fn(dim, dim, f),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut op = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            op.mat[(i, i)] = Complex64::new(d, 0.0);
        }
        op
    }

    /// Outer product `|ket⟩⟨bra|`.
    pub fn outer(ket: &PureState, bra: &PureState) -> Self {
        Self {
            mat: ket.amplitudes() * bra.amplitudes().adjoint(),
        }
    }

    pub fn projector(psi: &PureState) -> Self {
        Self::outer(psi, psi)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub(crate) fn as_matrix_mut(&mut self) -> &mut DMatrix<Complex64> {
        &mut self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim() == other {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other,
            })
        }
    }

    pub fn matmul(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_dim(other.dim())?;
        Ok(Self {
            mat: &self.mat * &other.mat,
        })
    }

    /// `A·v` for an arbitrary (not necessarily normalized) vector.
    pub fn apply_vector(&self, v: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        self.check_dim(v.len())?;
        Ok(&self.mat * v)
    }

    pub fn adjoint(&self) -> DenseOperator {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &DenseOperator) -> DenseOperator {
        Self {
            mat: self.mat.kronecker(&other.mat),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest elementwise modulus of `A − A†`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for c in 0..d {
            for r in 0..=c {
                worst = worst.max((self.mat[(r, c)] - self.mat[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn ensure_hermitian(&self, tol: f64) -> Result<()> {
        let dev = self.hermiticity_deviation();
        if dev <= tol {
            Ok(())
        } else {
            Err(Error::NotHermitian(dev))
        }
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> DenseOperator {
        Self {
            mat: (&self.mat + self.mat.adjoint()) * Complex64::new(0.5, 0.0),
        }
    }

    pub fn scale(&self, s: Complex64) -> DenseOperator {
        Self { mat: &self.mat * s }
    }

    /// Count of entries that are not exactly zero.
    pub fn nonzero_count(&self) -> usize {
        self.mat.iter().filter(|z| **z != ZERO).count()
    }
}

impl Add for &DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: &DenseOperator) -> DenseOperator {
        DenseOperator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        DenseOperator {
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl Mul<f64> for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: f64) -> DenseOperator {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

impl Mul<Complex64> for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: Complex64) -> DenseOperator {
        self.scale(rhs)
    }
}

/// Normalized state vector of dimension `2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: DVector<Complex64>,
}

impl PureState {
    /// Validates that the squared norm is 1 within 1e-12.
    pub fn new(amps: DVector<Complex64>) -> Result<Self> {
        if qubits_for_dim(amps.len()).is_none() {
            return Err(Error::NotPowerOfTwo(amps.len()));
        }
        let n2 = amps.norm_squared();
        if (n2 - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amps })
    }

    pub fn normalized(amps: DVector<Complex64>) -> Result<Self> {
        if qubits_for_dim(amps.len()).is_none() {
            return Err(Error::NotPowerOfTwo(amps.len()));
        }
        let n = amps.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        Ok(Self { amps: amps / Complex64::new(n, 0.0) })
    }

    pub fn from_slice(amps: &[Complex64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(amps))
    }

    pub(crate) fn from_vector_unchecked(amps: DVector<Complex64>) -> Self {
        Self { amps }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = DVector::zeros(dim);
        amps[index] = ONE;
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    /// Normalized superposition `a·self + b·other`.
    pub fn superpose(&self, a: Complex64, other: &PureState, b: Complex64) -> Result<PureState> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Self::normalized(&self.amps * a + &other.amps * b)
    }

    /// `self ⊗ other`.
    pub fn kron(&self, other: &PureState) -> PureState {
        Self {
            amps: self.amps.kronecker(&other.amps),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// Tolerances for [`DensityMatrix::new`].
pub const DENSITY_HERMITIAN_TOL: f64 = 1e-10;
pub const DENSITY_TRACE_TOL: f64 = 1e-8;
pub const DENSITY_EIGEN_TOL: f64 = 1e-8;

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        let op = DenseOperator::new(mat)?;
        let dev = op.hermiticity_deviation();
        if dev > DENSITY_HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {dev:.3e})"
            )));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > DENSITY_TRACE_TOL || tr.im.abs() > DENSITY_TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let rho = Self { mat: op.into_matrix() };
        let lmin = rho.min_eigenvalue();
        if lmin < -DENSITY_EIGEN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {lmin:.3e}"
            )));
        }
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(mat: DMatrix<Complex64>) -> Self {
        Self { mat }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            mat: psi.amplitudes() * psi.amplitudes().adjoint(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn as_operator(&self) -> DenseOperator {
        DenseOperator {
            mat: self.mat.clone(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.mat + self.mat.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `Tr(O·ρ)`.
    pub fn expectation(&self, op: &DenseOperator) -> Result<Complex64> {
        op.check_dim(self.dim())?;
        let m = op.as_matrix();
        let d = self.dim();
        let mut acc = ZERO;
        for r in 0..d {
            for c in 0..d {
                acc += m[(r, c)] * self.mat[(c, r)];
            }
        }
        Ok(acc)
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Tolerance on the imaginary part of `⟨ψ|ρ|ψ⟩`.
pub const FIDELITY_IMAG_TOL: f64 = 1e-10;

/// `⟨ψ|ρ|ψ⟩`, clamped to `[0, 1]`.
pub fn fidelity(psi: &PureState, rho: &DensityMatrix) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: psi.dim(),
            right: rho.dim(),
        });
    }
    let v = psi.amplitudes();
    let f = v.dotc(&(rho.as_matrix() * v));
    if f.im.abs() > FIDELITY_IMAG_TOL {
        return Err(Error::InvalidDensityMatrix(format!(
            "complex fidelity {f}"
        )));
    }
    Ok(f.re.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn fidelity_examples() {
        let zero = PureState::basis(2, 0);
        let one = PureState::basis(2, 1);
        assert_eq!(fidelity(&zero, &zero.to_density()).unwrap(), 1.0);
        assert_eq!(fidelity(&zero, &one.to_density()).unwrap(), 0.0);
        assert!((fidelity(&zero, &DensityMatrix::maximally_mixed(2)).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fidelity_dim_mismatch() {
        let zero = PureState::basis(2, 0);
        assert!(fidelity(&zero, &DensityMatrix::maximally_mixed(4)).is_err());
    }

    #[test]
    fn state_validation() {
        assert!(PureState::from_slice(&[c(1.0), c(1.0)]).is_err());
        assert!(PureState::from_slice(&[c(1.0), c(0.0), c(0.0)]).is_err());
        let s = PureState::normalized(DVector::from_vec(vec![c(1.0), c(1.0)])).unwrap();
        assert!((s.inner(&s).re - 1.0).abs() < 1e-15);
        assert!(PureState::normalized(DVector::zeros(2)).is_err());
    }

    #[test]
    fn density_validation() {
        let bad_trace = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(1.0)]));
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.5), c(-0.5)]));
        assert!(DensityMatrix::new(negative).is_err());
        let mut nonherm = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5), c(0.5)]));
        nonherm[(0, 1)] = c(0.1);
        assert!(DensityMatrix::new(nonherm).is_err());
        assert!(DensityMatrix::new(DensityMatrix::maximally_mixed(4).as_matrix().clone()).is_ok());
    }

    #[test]
    fn operator_rejects_bad_dims() {
        assert!(matches!(
            DenseOperator::new(DMatrix::zeros(3, 3)),
            Err(Error::NotPowerOfTwo(3))
        ));
        assert!(DenseOperator::new(DMatrix::zeros(2, 4)).is_err());
        assert!(DenseOperator::zeros(2).matmul(&DenseOperator::zeros(4)).is_err());
    }
}
