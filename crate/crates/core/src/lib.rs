//! Error-transparent Hamiltonians (ETHs) for stabilizer-encoded qubits.
//!
//! The crate is organised bottom-up:
//!
//! * [`qcore`]: dense complex linear algebra and Pauli-string algebra.
//! * [`codes`]: the 3-qubit bit-flip, 5-qubit perfect and 7-qubit CSS codes,
//!   syndromes, error spaces and the ideal recovery channel.
//! * [`eth`]: ETH construction, the exact transparency check and body-ness.
//! * [`dynamics`]: RK4 Lindblad integration and quantum-jump trajectories.
//! * [`experiments`]: sweep scenarios and the perturbative scaling formulas.
//!
//! Units: ħ = 1, all rates and frequencies share one time unit.

pub mod codes;
pub mod dynamics;
pub mod error;
pub mod eth;
pub mod experiments;
pub mod qcore;

pub use error::{Error, Result};
pub use num_complex::Complex64;
