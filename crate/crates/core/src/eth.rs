//! Error-transparent Hamiltonians.
//!
//! Given a code-space Hamiltonian `H₀` and a set of correctable errors
//! `{Eᵢ}`, the ETH is `H = H₀ + Σᵢ Eᵢ·H₀·Eᵢ†`. On every single-error sector it
//! satisfies `H·Eᵢ|ψ⟩ = Eᵢ·H₀|ψ⟩` for all code-space `|ψ⟩`, so an error that
//! strikes mid-evolution does not disturb the logical dynamics.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::codes::{ErrorSet, StabilizerCode, OVERLAP_TOL};
use crate::error::{Error, Result};
use crate::qcore::{pauli_decompose, DenseOperator, PauliString, PureState};

/// Coefficients at or below this modulus do not count towards body-ness.
pub const BODYNESS_CUTOFF: f64 = 1e-10;

/// Hermiticity tolerance for constructed ETHs.
pub const ETH_HERMITIAN_TOL: f64 = 1e-12;

/// Two errors whose actions on the protected basis agree up to a global phase
/// within this tolerance are treated as one.
const DEGENERACY_TOL: f64 = 1e-10;

/// 2×2 logical Hamiltonian `a|0_L⟩⟨0_L| + b|1_L⟩⟨1_L| + c|1_L⟩⟨0_L| + c*|0_L⟩⟨1_L|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogicalHamiltonian {
    pub a: f64,
    pub b: f64,
    pub c: Complex64,
}

impl LogicalHamiltonian {
    pub fn new(a: f64, b: f64, c: Complex64) -> Self {
        Self { a, b, c }
    }

    /// `ω·Z_L = ω(|0_L⟩⟨0_L| − |1_L⟩⟨1_L|)`.
    pub fn z_rotation(omega: f64) -> Self {
        Self::new(omega, -omega, Complex64::new(0.0, 0.0))
    }
}

/// Embeds a logical Hamiltonian into the code space.
pub fn encode_logical(code: &StabilizerCode, lh: &LogicalHamiltonian) -> DenseOperator {
    let [c0, c1] = code.codewords();
    let p00 = DenseOperator::outer(c0, c0);
    let p11 = DenseOperator::outer(c1, c1);
    let p10 = DenseOperator::outer(c1, c0);
    let p01 = DenseOperator::outer(c0, c1);
    let mut h = &(&p00 * lh.a) + &(&p11 * lh.b);
    h = &h + &(&p10 * lh.c);
    &h + &(&p01 * lh.c.conj())
}

/// Result of an ETH construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Eth {
    pub hamiltonian: DenseOperator,
    /// Conjugated copies of `H₀` that were summed, `H₀` itself included.
    pub terms: usize,
    /// Errors dropped because they act like an earlier error (or like the
    /// identity) on the protected subspace.
    pub duplicates: usize,
}

/// `H = H₀ + Σᵢ Eᵢ·H₀·Eᵢ†` over the deduplicated error set.
pub fn make_eth(code: &StabilizerCode, h0: &DenseOperator, errors: &ErrorSet) -> Result<Eth> {
    let basis: Vec<PureState> = code.codewords().into_iter().cloned().collect();
    make_eth_on(&basis, h0, errors.errors())
}

/// ETH construction for an arbitrary protected subspace spanned by `basis`.
pub fn make_eth_on(basis: &[PureState], h0: &DenseOperator, errors: &[PauliString]) -> Result<Eth> {
    let dim = h0.dim();
    for e in errors {
        if e.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: e.dim(),
            });
        }
    }
    let (reps, duplicates) = distinct_actions(basis, errors)?;
    let mut h = h0.clone();
    for e in &reps {
        h = &h + &e.conjugate(h0)?;
    }
    h.ensure_hermitian(ETH_HERMITIAN_TOL)?;
    Ok(Eth {
        hamiltonian: h,
        terms: reps.len() + 1,
        duplicates,
    })
}

/// Keeps one representative per distinct action on `basis`, with the identity
/// as the implicit first class. Rejects partially overlapping error spaces.
fn distinct_actions(basis: &[PureState], errors: &[PauliString]) -> Result<(Vec<PauliString>, usize)> {
    let images = |e: &PauliString| -> Result<Vec<DVector<Complex64>>> {
        basis.iter().map(|b| Ok(e.apply(b)?.amplitudes().clone())).collect()
    };
    let identity: Vec<DVector<Complex64>> = basis.iter().map(|b| b.amplitudes().clone()).collect();

    let mut classes: Vec<Vec<DVector<Complex64>>> = vec![identity];
    let mut reps = Vec::new();
    let mut duplicates = 0;
    for e in errors {
        let img = images(e)?;
        if classes.iter().any(|c| same_up_to_phase(c, &img)) {
            duplicates += 1;
            continue;
        }
        let overlap = classes
            .iter()
            .flat_map(|c| c.iter().flat_map(|u| img.iter().map(move |v| u.dotc(v).norm())))
            .fold(0.0, f64::max);
        if overlap > OVERLAP_TOL {
            return Err(Error::OverlappingErrorSpaces(overlap));
        }
        classes.push(img);
        reps.push(e.clone());
    }
    Ok((reps, duplicates))
}

fn same_up_to_phase(a: &[DVector<Complex64>], b: &[DVector<Complex64>]) -> bool {
    // b = φ·a for one common phase φ
    let phase = a[0].dotc(&b[0]);
    if (phase.norm() - 1.0).abs() > DEGENERACY_TOL {
        return false;
    }
    a.iter()
        .zip(b)
        .all(|(u, v)| (v - u * phase).iter().all(|z| z.norm() <= DEGENERACY_TOL))
}

/// Spanning set used by [`verify_et_on`]: every basis vector plus
/// `(bᵢ ± bⱼ)/√2` and `(bᵢ ± i·bⱼ)/√2` for each pair.
pub fn spanning_states(basis: &[PureState]) -> Result<Vec<PureState>> {
    let mut out: Vec<PureState> = basis.to_vec();
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    for (i, bi) in basis.iter().enumerate() {
        for bj in &basis[i + 1..] {
            for w in [
                Complex64::new(1.0, 0.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
            ] {
                out.push(bi.superpose(s, bj, s * w)?);
            }
        }
    }
    Ok(out)
}

/// Max over errors `Eᵢ` and spanning code states `ψ` of `‖H·Eᵢψ − Eᵢ·H₀ψ‖`.
pub fn verify_et(
    h: &DenseOperator,
    h0: &DenseOperator,
    code: &StabilizerCode,
    errors: &ErrorSet,
) -> Result<f64> {
    let basis: Vec<PureState> = code.codewords().into_iter().cloned().collect();
    verify_et_on(h, h0, &basis, errors.errors())
}

pub fn verify_et_on(
    h: &DenseOperator,
    h0: &DenseOperator,
    basis: &[PureState],
    errors: &[PauliString],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for psi in spanning_states(basis)? {
        let h0psi = h0.apply_vector(psi.amplitudes())?;
        for e in errors {
            let act = e.action();
            let lhs = h.apply_vector(&act.apply_vector(psi.amplitudes()))?;
            let rhs = act.apply_vector(&h0psi);
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

/// Largest Pauli weight carrying a coefficient above [`BODYNESS_CUTOFF`].
pub fn bodyness(h: &DenseOperator) -> Result<usize> {
    Ok(pauli_decompose(h)?
        .iter()
        .filter(|t| t.coeff.norm() > BODYNESS_CUTOFF)
        .map(|t| t.pauli.weight())
        .max()
        .unwrap_or(0))
}

/// Target basis: `|g⟩ = |0⟩`, `|e⟩ = |1⟩`; the target is the last qubit.
pub fn target_ground() -> PureState {
    PureState::basis(2, 0)
}

pub fn target_excited() -> PureState {
    PureState::basis(2, 1)
}

/// Basis `{|a_L⟩⊗|t⟩}` of the code ⊗ target subspace.
pub fn controlled_basis(code: &StabilizerCode) -> Vec<PureState> {
    let mut out = Vec::with_capacity(4);
    for c in code.codewords() {
        for t in [target_ground(), target_excited()] {
            out.push(c.kron(&t));
        }
    }
    out
}

/// Swap coupling `ω(L₋⊗σ₊ + L₊⊗σ₋)` with `L₋ = |0_L⟩⟨1_L|` and `σ₊ = |e⟩⟨g|`.
pub fn swap_coupling(code: &StabilizerCode, omega: f64) -> DenseOperator {
    let [c0, c1] = code.codewords();
    let lower = DenseOperator::outer(c0, c1);
    let raise = DenseOperator::outer(&target_excited(), &target_ground());
    let term = lower.kron(&raise);
    &(&term + &term.adjoint()) * omega
}

/// ETH for a logical controller swapping an excitation into a target qubit:
/// the swap coupling plus its conjugates by every `Eᵢ⊗I`.
pub fn controlled_eth(code: &StabilizerCode, errors: &ErrorSet, omega: f64) -> Result<DenseOperator> {
    Ok(controlled_eth_build(code, errors, omega)?.hamiltonian)
}

pub fn controlled_eth_build(code: &StabilizerCode, errors: &ErrorSet, omega: f64) -> Result<Eth> {
    let h0 = swap_coupling(code, omega);
    let lifted = errors.extend_identity(1);
    make_eth_on(&controlled_basis(code), &h0, lifted.errors())
}

/// Summary of one ETH construction.
#[derive(Debug, Clone, PartialEq)]
pub struct EthReport {
    pub hamiltonian: DenseOperator,
    pub max_residual: f64,
    pub bodyness: usize,
    pub term_count: usize,
}

pub fn eth_report(code: &StabilizerCode, lh: &LogicalHamiltonian, errors: &ErrorSet) -> Result<EthReport> {
    let h0 = encode_logical(code, lh);
    let eth = make_eth(code, &h0, errors)?;
    Ok(EthReport {
        max_residual: verify_et(&eth.hamiltonian, &h0, code, errors)?,
        bodyness: bodyness(&eth.hamiltonian)?,
        term_count: pauli_decompose(&eth.hamiltonian)?.len(),
        hamiltonian: eth.hamiltonian,
    })
}

pub fn controlled_report(code: &StabilizerCode, errors: &ErrorSet, omega: f64) -> Result<EthReport> {
    let h0 = swap_coupling(code, omega);
    let h = controlled_eth(code, errors, omega)?;
    let lifted = errors.extend_identity(1);
    Ok(EthReport {
        max_residual: verify_et_on(&h, &h0, &controlled_basis(code), lifted.errors())?,
        bodyness: bodyness(&h)?,
        term_count: pauli_decompose(&h)?.len(),
        hamiltonian: h,
    })
}

/// Sign `s` with `C·O·C† = s·O`, computed with dense matrices.
pub fn conjugation_sign(conjugator: &PauliString, op: &PauliString) -> Result<i8> {
    let c = conjugator.to_dense();
    let o = op.to_dense();
    let conj = c.matmul(&o)?.matmul(&c.adjoint())?;
    if conj.max_abs_diff(&o) == 0.0 {
        Ok(1)
    } else if conj.max_abs_diff(&(&o * -1.0)) == 0.0 {
        Ok(-1)
    } else {
        Err(Error::InvalidParameter(format!(
            "{conjugator} does not map {op} to ±{op}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Css7Report {
    pub conjugated_sign: i8,
    pub naive_sum_is_zero: bool,
}

/// Conjugating `X̄ = IIIIXXX` by the Z error on qubit 5 flips its sign, so
/// the naive ETH `X̄ + Z₅X̄Z₅` vanishes: the weight-3 logical X cannot be made
/// error transparent on the 7-qubit code.
pub fn css7_counterexample() -> Result<Css7Report> {
    let xbar: PauliString = "IIIIXXX".parse()?;
    let z5: PauliString = "IIIIZII".parse()?;
    let sign = conjugation_sign(&z5, &xbar)?;
    let x = xbar.to_dense();
    let zd = z5.to_dense();
    let conj = zd.matmul(&x)?.matmul(&zd)?;
    let sum = &x + &conj;
    Ok(Css7Report {
        conjugated_sign: sign,
        naive_sum_is_zero: sum.max_abs() == 0.0,
    })
}
