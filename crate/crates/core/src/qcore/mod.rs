//! Dense linear algebra and Pauli-string algebra.

mod decompose;
mod dense;
mod evolve;
mod pauli;

pub use decompose::{pauli_decompose, reconstruct, PauliTerm, DECOMPOSE_CUTOFF};
pub use dense::{fidelity, DenseOperator, DensityMatrix, PureState};
pub use evolve::{evolve_unitary, unitary_propagator};
pub use pauli::{pauli_mul, Pauli, PauliString, Phase};

use num_complex::Complex64;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Number of qubits for a Hilbert-space dimension, if it is `2^n` with `n >= 1`.
pub fn qubits_for_dim(dim: usize) -> Option<usize> {
    (dim >= 2 && dim.is_power_of_two()).then(|| dim.trailing_zeros() as usize)
}
