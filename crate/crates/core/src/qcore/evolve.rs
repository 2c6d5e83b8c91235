use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::dense::{DenseOperator, PureState};
use crate::error::{Error, Result};

/// Hermiticity tolerance accepted by the unitary propagators.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// `exp(−iHt)` through the Hermitian eigendecomposition `H = V Λ V†`.
pub fn unitary_propagator(h: &DenseOperator, t: f64) -> Result<DenseOperator> {
    h.ensure_hermitian(HERMITIAN_TOL)?;
    let eig = SymmetricEigen::new(h.hermitian_part().into_matrix());
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * t)));
    DenseOperator::new(v * phases * v.adjoint())
}

/// `exp(−iHt)·ψ`.
pub fn evolve_unitary(h: &DenseOperator, t: f64, psi: &PureState) -> Result<PureState> {
    if h.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            left: h.dim(),
            right: psi.dim(),
        });
    }
    if t == 0.0 {
        h.ensure_hermitian(HERMITIAN_TOL)?;
        return Ok(psi.clone());
    }
    let u = unitary_propagator(h, t)?;
    Ok(PureState::from_vector_unchecked(u.apply_vector(psi.amplitudes())?))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    use super::*;
    use crate::qcore::PauliString;

    fn plus() -> PureState {
        PureState::from_slice(&[Complex64::new(FRAC_1_SQRT_2, 0.0); 2]).unwrap()
    }

    #[test]
    fn full_period_of_z_flips_sign() {
        let omega = 1.7;
        let h = &"Z".parse::<PauliString>().unwrap().to_dense() * omega;
        let out = evolve_unitary(&h, PI / omega, &plus()).unwrap();
        for a in out.amplitudes().iter() {
            assert!((a - Complex64::new(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn quarter_period_of_x_maps_zero_to_minus_i_one() {
        let omega = 0.6;
        let h = &"X".parse::<PauliString>().unwrap().to_dense() * omega;
        let out = evolve_unitary(&h, PI / (2.0 * omega), &PureState::basis(2, 0)).unwrap();
        assert!(out.amplitudes()[0].norm() < 1e-12);
        assert!((out.amplitudes()[1] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn zero_time_is_identity() {
        let h = "X".parse::<PauliString>().unwrap().to_dense();
        assert_eq!(evolve_unitary(&h, 0.0, &plus()).unwrap(), plus());
    }

    #[test]
    fn non_hermitian_rejected() {
        let h = "iX".parse::<PauliString>().unwrap().to_dense();
        assert!(matches!(
            evolve_unitary(&h, 1.0, &plus()),
            Err(Error::NotHermitian(_))
        ));
    }
}
