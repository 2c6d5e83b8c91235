use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex64;

use super::dense::{DenseOperator, PureState};
use crate::error::{Error, Result};

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn is_identity(self) -> bool {
        self == Pauli::I
    }

    fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn has_z(self) -> bool {
        matches!(self, Pauli::Y | Pauli::Z)
    }

    /// Product `self * other` as (power of i, letter).
    fn product(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (X, X) | (Y, Y) | (Z, Z) => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Global phase of a Pauli string: one of the fourth roots of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    fn from_power(p: u8) -> Phase {
        match p % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    fn power(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        i_pow(self.power())
    }

    pub fn conj(self) -> Phase {
        Phase::from_power(4 - self.power())
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_power(self.power() + rhs.power())
    }
}

fn i_pow(p: u8) -> Complex64 {
    match p % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Phased tensor product of single-qubit Pauli letters.
///
/// The first letter acts on qubit 1, which is the most significant bit of a
/// computational-basis index (Kronecker order, left to right).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    phase: Phase,
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(phase: Phase, letters: Vec<Pauli>) -> Self {
        Self { phase, letters }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(Phase::PlusOne, vec![Pauli::I; n])
    }

    /// Weight-1 string with `letter` on `qubit` (0-based).
    pub fn single(n: usize, qubit: usize, letter: Pauli) -> Self {
        let mut letters = vec![Pauli::I; n];
        letters[qubit] = letter;
        Self::new(Phase::PlusOne, letters)
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.letters.len()
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|p| !p.is_identity()).count()
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn dagger(&self) -> Self {
        Self::new(self.phase.conj(), self.letters.clone())
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &PauliString) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self::new(self.phase * other.phase, letters)
    }

    /// Group product `self · other`.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.len_mismatch(other) {
            return Err(Error::LengthMismatch {
                left: self.num_qubits(),
                right: other.num_qubits(),
            });
        }
        let mut power = self.phase.power() + other.phase.power();
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (p, l) = a.product(b);
                power += p;
                l
            })
            .collect();
        Ok(PauliString::new(Phase::from_power(power % 4), letters))
    }

    pub fn commutes_with(&self, other: &PauliString) -> Result<bool> {
        if self.len_mismatch(other) {
            return Err(Error::LengthMismatch {
                left: self.num_qubits(),
                right: other.num_qubits(),
            });
        }
        let clashes = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| !a.is_identity() && !b.is_identity() && a != b)
            .count();
        Ok(clashes % 2 == 0)
    }

    fn len_mismatch(&self, other: &PauliString) -> bool {
        self.letters.len() != other.letters.len()
    }

    fn bit(&self, k: usize) -> usize {
        1 << (self.letters.len() - 1 - k)
    }

    /// Basis-index mask of the bit flips (X or Y letters).
    pub fn x_mask(&self) -> usize {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, p)| p.has_x())
            .fold(0, |m, (k, _)| m | self.bit(k))
    }

    /// Basis-index mask of the phase flips (Z or Y letters).
    pub fn z_mask(&self) -> usize {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, p)| p.has_z())
            .fold(0, |m, (k, _)| m | self.bit(k))
    }

    /// Compiled action `P|b⟩ = phase(b)|b ⊕ x⟩`.
    pub(crate) fn action(&self) -> PauliAction {
        let n_y = self.letters.iter().filter(|&&p| p == Pauli::Y).count() as u8;
        PauliAction {
            x_mask: self.x_mask(),
            z_mask: self.z_mask(),
            base_power: (self.phase.power() + n_y) % 4,
        }
    }

    /// Image of basis state `b`: returns `(amplitude, b')` with `P|b⟩ = amplitude·|b'⟩`.
    pub fn apply_to_index(&self, b: usize) -> (Complex64, usize) {
        self.action().apply_index(b)
    }

    pub fn to_dense(&self) -> DenseOperator {
        let dim = self.dim();
        let act = self.action();
        let mut op = DenseOperator::zeros(dim);
        for b in 0..dim {
            let (amp, r) = act.apply_index(b);
            op.as_matrix_mut()[(r, b)] = amp;
        }
        op
    }

    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: psi.dim(),
            });
        }
        Ok(PureState::from_vector_unchecked(
            self.action().apply_vector(psi.amplitudes()),
        ))
    }

    /// Exact conjugation `P·A·P†` as a signed permutation of the entries.
    pub fn conjugate(&self, a: &DenseOperator) -> Result<DenseOperator> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: a.dim(),
            });
        }
        Ok(self.action().conjugate(a))
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct PauliAction {
    x_mask: usize,
    z_mask: usize,
    base_power: u8,
}

impl PauliAction {
    #[inline]
    pub(crate) fn apply_index(&self, b: usize) -> (Complex64, usize) {
        let sign = ((b & self.z_mask).count_ones() % 2) as u8 * 2;
        (i_pow(self.base_power + sign), b ^ self.x_mask)
    }

    pub(crate) fn apply_vector(
        &self,
        v: &nalgebra::DVector<Complex64>,
    ) -> nalgebra::DVector<Complex64> {
        let mut out = nalgebra::DVector::zeros(v.len());
        for (b, &amp) in v.iter().enumerate() {
            let (ph, r) = self.apply_index(b);
            out[r] = ph * amp;
        }
        out
    }

    pub(crate) fn conjugate(&self, a: &DenseOperator) -> DenseOperator {
        let dim = a.dim();
        let src = a.as_matrix();
        let phases: Vec<(Complex64, usize)> = (0..dim).map(|b| self.apply_index(b)).collect();
        let mut out = DenseOperator::zeros(dim);
        let dst = out.as_matrix_mut();
        for (c, &(pc, cc)) in phases.iter().enumerate() {
            let pc = pc.conj();
            for (r, &(pr, rr)) in phases.iter().enumerate() {
                let v = src[(r, c)];
                if v != super::ZERO {
                    dst[(rr, cc)] = pr * v * pc;
                }
            }
        }
        out
    }
}

/// Group product of two Pauli strings of equal length.
pub fn pauli_mul(p: &PauliString, q: &PauliString) -> Result<PauliString> {
    p.mul(q)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            Phase::PlusOne => "",
            Phase::PlusI => "i",
            Phase::MinusOne => "-",
            Phase::MinusI => "-i",
        };
        f.write_str(prefix)?;
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses strings such as `XZZXI`, `-IXI`, `+iZ` or `-iYY`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (sign, rest) = match t.strip_prefix('-') {
            Some(r) => (2u8, r),
            None => (0u8, t.strip_prefix('+').unwrap_or(t)),
        };
        let (imag, rest) = match rest.strip_prefix('i') {
            Some(r) => (1u8, r),
            None => (0u8, rest),
        };
        let letters = rest
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::ParsePauli(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::ParsePauli(s.to_string()));
        }
        Ok(PauliString::new(Phase::from_power(sign + imag), letters))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn dense_product(a: &PauliString, b: &PauliString) -> DenseOperator {
        a.to_dense().matmul(&b.to_dense()).unwrap()
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let r = pauli_mul(&ps("X"), &ps("Z")).unwrap();
        assert_eq!(r, ps("-iY"));
        assert!(r.to_dense().max_abs_diff(&dense_product(&ps("X"), &ps("Z"))) == 0.0);
    }

    #[test]
    fn identity_is_neutral() {
        let p = ps("-iXYZI");
        assert_eq!(pauli_mul(&PauliString::identity(4), &p).unwrap(), p);
    }

    #[test]
    fn seven_qubit_product_matches_dense() {
        let p = ps("IIIIZII");
        let q = ps("IIIIXXX");
        let r = pauli_mul(&p, &q).unwrap();
        // Z·X = iY on qubit 5
        assert_eq!(r, ps("iIIIIYXX"));
        assert!(r.to_dense().max_abs_diff(&dense_product(&p, &q)) < 1e-12);
    }

    #[test]
    fn weight_counts_non_identity() {
        assert_eq!(ps("III").weight(), 0);
        assert_eq!(ps("IIXYI").weight(), 2);
        assert_eq!(ps("XZZXI").weight(), 4);
    }

    #[test]
    fn dense_matrices() {
        let z = ps("Z").to_dense();
        assert_eq!(z.as_matrix()[(0, 0)].re, 1.0);
        assert_eq!(z.as_matrix()[(1, 1)].re, -1.0);
        let zz = ps("ZZ").to_dense();
        let diag: Vec<f64> = (0..4).map(|i| zz.as_matrix()[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
        let mx = ps("-X").to_dense();
        assert_eq!(mx.as_matrix()[(0, 1)].re, -1.0);
        assert_eq!(mx.as_matrix()[(1, 0)].re, -1.0);
        assert_eq!(mx.as_matrix()[(0, 0)].norm(), 0.0);
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(matches!(
            pauli_mul(&ps("XX"), &ps("X")),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["XZZXI", "-IXI", "iZ", "-iYY"] {
            assert_eq!(ps(s).to_string(), s);
        }
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
    }

    #[test]
    fn commutation() {
        assert!(ps("ZZI").commutes_with(&ps("XXX")).unwrap());
        assert!(!ps("ZII").commutes_with(&ps("XXX")).unwrap());
        assert!(ps("XZZXI").commutes_with(&ps("IXZZX")).unwrap());
    }

    #[test]
    fn conjugation_matches_dense() {
        let p = ps("iXYZ");
        let a = DenseOperator::from_fn(8, |r, c| Complex64::new(r as f64 + 0.5, c as f64 - 1.0));
        let exact = p.conjugate(&a).unwrap();
        let dense = p
            .to_dense()
            .matmul(&a)
            .unwrap()
            .matmul(&p.to_dense().adjoint())
            .unwrap();
        assert!(exact.max_abs_diff(&dense) < 1e-12);
    }
}
