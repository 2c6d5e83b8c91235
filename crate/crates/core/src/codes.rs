//! Stabilizer codes encoding one logical qubit.
//!
//! Three codes are built in:
//!
//! | code        | n | generators                         | logical X  |
//! |-------------|---|------------------------------------|------------|
//! | `bitflip3`  | 3 | `ZZI`, `IZZ`                       | `XXX`      |
//! | `perfect5`  | 5 | `XZZXI` and its cyclic shifts      | `XXXXX`    |
//! | `steane7`   | 7 | X and Z checks on `{1,2,3,4}`, `{1,2,5,6}`, `{1,3,5,7}` | `IIIIXXX` |
//!
//! The Steane qubit ordering places a weight-3 Hamming codeword on qubits
//! 5, 6, 7 so that `IIIIXXX` is a logical X (with `IIIIZZZ` as logical Z).
//!
//! Codeword 0 is the normalized stabilizer projection of a computational
//! basis seed with its largest-magnitude amplitude made real and positive;
//! codeword 1 is `logical_x · codeword0`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{DenseOperator, DensityMatrix, Pauli, PauliString, PureState};

/// Tolerance for the stabilizer eigenvalue and orthonormality checks.
pub const CODE_TOL: f64 = 1e-10;

/// Maximum overlap accepted between distinct error spaces.
pub const OVERLAP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerCode {
    name: String,
    n: usize,
    generators: Vec<PauliString>,
    logical_x: PauliString,
    logical_z: PauliString,
    codeword0: PureState,
    codeword1: PureState,
}

impl StabilizerCode {
    /// Builds a code from its generators and logical operators, deriving the
    /// codewords from the computational basis state `seed`.
    pub fn new(
        name: &str,
        generators: Vec<PauliString>,
        logical_x: PauliString,
        logical_z: PauliString,
        seed: usize,
    ) -> Result<Self> {
        let n = logical_x.num_qubits();
        for g in generators.iter().chain([&logical_z]) {
            if g.num_qubits() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: g.num_qubits(),
                });
            }
        }
        for g in &generators {
            for l in [&logical_x, &logical_z] {
                if !g.commutes_with(l)? {
                    return Err(Error::NonCommuting(g.to_string(), l.to_string()));
                }
            }
        }
        if logical_x.commutes_with(&logical_z)? {
            return Err(Error::InvalidParameter(format!(
                "logical operators {logical_x} and {logical_z} must anticommute"
            )));
        }
        let (codeword0, codeword1) = codewords_from_stabilizers(&generators, &logical_x, seed)?;
        Ok(Self {
            name: name.to_string(),
            n,
            generators,
            logical_x,
            logical_z,
            codeword0,
            codeword1,
        })
    }

    /// Majority code against bit flips: `|0_L⟩ = |000⟩`, `|1_L⟩ = |111⟩`.
    pub fn bitflip3() -> Self {
        Self::new("bitflip3", strings(&["ZZI", "IZZ"]), ps("XXX"), ps("ZII"), 0)
            .expect("bitflip3 is a valid code")
    }

    /// The [[5,1,3]] perfect code.
    pub fn perfect5() -> Self {
        Self::new(
            "perfect5",
            strings(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]),
            ps("XXXXX"),
            ps("ZZZZZ"),
            0,
        )
        .expect("perfect5 is a valid code")
    }

    /// The [[7,1,3]] CSS code with `IIIIXXX` as logical X.
    pub fn steane7() -> Self {
        Self::new(
            "steane7",
            strings(&[
                "XXXXIII", "XXIIXXI", "XIXIXIX", "ZZZZIII", "ZZIIZZI", "ZIZIZIZ",
            ]),
            ps("IIIIXXX"),
            ps("IIIIZZZ"),
            0,
        )
        .expect("steane7 is a valid code")
    }

    /// An unencoded physical qubit, `|0⟩` and `|1⟩`, with no stabilizers.
    pub fn bare_qubit() -> Self {
        Self::new("bare", Vec::new(), ps("X"), ps("Z"), 0).expect("bare qubit is a valid code")
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "bitflip3" => Some(Self::bitflip3()),
            "perfect5" => Some(Self::perfect5()),
            "steane7" => Some(Self::steane7()),
            "bare" => Some(Self::bare_qubit()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn logical_x(&self) -> &PauliString {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &PauliString {
        &self.logical_z
    }

    pub fn codeword0(&self) -> &PureState {
        &self.codeword0
    }

    pub fn codeword1(&self) -> &PureState {
        &self.codeword1
    }

    pub fn codewords(&self) -> [&PureState; 2] {
        [&self.codeword0, &self.codeword1]
    }

    /// Encoded state `α|0_L⟩ + β|1_L⟩` (normalized).
    pub fn logical_state(&self, alpha: Complex64, beta: Complex64) -> Result<PureState> {
        self.codeword0.superpose(alpha, &self.codeword1, beta)
    }

    /// Projector `Π₀` onto the code space.
    pub fn code_projector(&self) -> DenseOperator {
        &DenseOperator::projector(&self.codeword0) + &DenseOperator::projector(&self.codeword1)
    }
}

fn ps(s: &str) -> PauliString {
    s.parse().expect("valid Pauli literal")
}

fn strings(s: &[&str]) -> Vec<PauliString> {
    s.iter().map(|x| ps(x)).collect()
}

/// Codewords from the stabilizer projector `Π(I+Sᵢ)/2` applied to `|seed⟩`.
pub fn codewords_from_stabilizers(
    generators: &[PauliString],
    logical_x: &PauliString,
    seed: usize,
) -> Result<(PureState, PureState)> {
    for (i, a) in generators.iter().enumerate() {
        for b in &generators[i + 1..] {
            if !a.commutes_with(b)? {
                return Err(Error::NonCommuting(a.to_string(), b.to_string()));
            }
        }
    }
    let dim = logical_x.dim();
    if seed >= dim {
        return Err(Error::InvalidParameter(format!(
            "seed basis state {seed} out of range for dimension {dim}"
        )));
    }
    let mut v = PureState::basis(dim, seed).amplitudes().clone();
    for g in generators {
        if g.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: g.dim(),
            });
        }
        let sv = g.action().apply_vector(&v);
        v = (v + sv) * Complex64::new(0.5, 0.0);
    }
    if v.norm() < 1e-12 {
        return Err(Error::ZeroProjection(seed));
    }
    let v = fix_global_phase(v);
    let c0 = PureState::normalized(v)?;
    let c1 = logical_x.apply(&c0)?;
    Ok((c0, c1))
}

/// Rotates `v` so its largest-magnitude entry (first one on ties) is real positive.
fn fix_global_phase(v: DVector<Complex64>) -> DVector<Complex64> {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = v
        .iter()
        .find(|z| z.norm() >= max * (1.0 - 1e-12))
        .copied()
        .expect("nonempty vector");
    let phase = pivot.conj() / pivot.norm();
    v * phase
}

/// Set of weight-1 Pauli errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSet {
    errors: Vec<PauliString>,
    kinds: Vec<Pauli>,
}

impl ErrorSet {
    /// Wraps an explicit list of errors; duplicates are removed (first kept).
    pub fn from_errors(errors: Vec<PauliString>) -> Self {
        let mut uniq: Vec<PauliString> = Vec::with_capacity(errors.len());
        for e in errors {
            if !uniq.contains(&e) {
                uniq.push(e);
            }
        }
        let mut kinds: Vec<Pauli> = uniq
            .iter()
            .flat_map(|e| e.letters().iter().copied().filter(|p| !p.is_identity()))
            .collect();
        kinds.sort();
        kinds.dedup();
        Self { errors: uniq, kinds }
    }

    pub fn errors(&self) -> &[PauliString] {
        &self.errors
    }

    pub fn kinds(&self) -> &[Pauli] {
        &self.kinds
    }

    pub fn len(&self) -> usize {
        self.errors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.errors.is_empty()
    }

    /// Each error tensored with identity on `extra` trailing qubits.
    pub fn extend_identity(&self, extra: usize) -> ErrorSet {
        let pad = PauliString::identity(extra);
        ErrorSet {
            errors: self.errors.iter().map(|e| e.tensor(&pad)).collect(),
            kinds: self.kinds.clone(),
        }
    }
}

/// All weight-1 errors of the given kinds, qubit-major then X < Y < Z.
pub fn error_set(code: &StabilizerCode, kinds: &[Pauli]) -> Result<ErrorSet> {
    let mut ks: Vec<Pauli> = kinds.iter().copied().filter(|p| !p.is_identity()).collect();
    ks.sort();
    ks.dedup();
    if ks.is_empty() {
        return Err(Error::InvalidParameter(
            "error kinds must contain at least one of X, Y, Z".into(),
        ));
    }
    let errors = (0..code.n())
        .flat_map(|q| ks.iter().map(move |&k| PauliString::single(code.n(), q, k)))
        .collect();
    Ok(ErrorSet { errors, kinds: ks })
}

/// Bit `i` is 1 iff `e` anticommutes with generator `i`.
pub fn syndrome(code: &StabilizerCode, e: &PauliString) -> Result<Vec<u8>> {
    code.generators()
        .iter()
        .map(|g| g.commutes_with(e).map(|c| u8::from(!c)))
        .collect()
}

/// Largest overlap between distinct error spaces, including the code space
/// itself as the image of the identity.
///
/// Returns `max |⟨ψ_a|Eᵢ†Eⱼ|ψ_b⟩|` over `i ≠ j` (with `E₀ = I`) and all
/// codeword pairs `(a, b)`.
pub fn error_spaces_orthogonal(code: &StabilizerCode, errors: &ErrorSet) -> Result<f64> {
    let images = error_images(code, errors.errors())?;
    let mut worst: f64 = 0.0;
    for (i, ei) in images.iter().enumerate() {
        for ej in &images[i + 1..] {
            for a in ei {
                for b in ej {
                    worst = worst.max(a.dotc(b).norm());
                }
            }
        }
    }
    Ok(worst)
}

/// `[Eψ₀, Eψ₁]` for `E = I` followed by every error.
fn error_images(code: &StabilizerCode, errors: &[PauliString]) -> Result<Vec<[DVector<Complex64>; 2]>> {
    let mut out = vec![[
        code.codeword0().amplitudes().clone(),
        code.codeword1().amplitudes().clone(),
    ]];
    for e in errors {
        if e.num_qubits() != code.n() {
            return Err(Error::LengthMismatch {
                left: code.n(),
                right: e.num_qubits(),
            });
        }
        out.push([
            e.apply(code.codeword0())?.amplitudes().clone(),
            e.apply(code.codeword1())?.amplitudes().clone(),
        ]);
    }
    Ok(out)
}

/// Ideal recovery channel for a code and a set of correctable errors.
///
/// `ρ ↦ Π₀ρΠ₀ + Σⱼ Eⱼ†ΠⱼρΠⱼEⱼ + Π_rest ρ Π_rest`, where `Πⱼ` projects onto
/// the image of the code space under `Eⱼ` and `Π_rest` onto everything else.
/// States in the residual subspace are left untouched, so the channel is
/// trace preserving on all inputs.
#[derive(Debug, Clone)]
pub struct Recovery {
    dim: usize,
    codewords: [DVector<Complex64>; 2],
    // error images [Eψ₀, Eψ₁], identity first
    images: Vec<[DVector<Complex64>; 2]>,
    rest: Option<DMatrix<Complex64>>,
}

impl Recovery {
    pub fn new(code: &StabilizerCode, errors: &ErrorSet) -> Result<Self> {
        let overlap = error_spaces_orthogonal(code, errors)?;
        if overlap > OVERLAP_TOL {
            return Err(Error::OverlappingErrorSpaces(overlap));
        }
        let images = error_images(code, errors.errors())?;
        let dim = code.dim();
        let mut covered = DMatrix::<Complex64>::zeros(dim, dim);
        for pair in &images {
            for v in pair {
                covered += v * v.adjoint();
            }
        }
        let rest = DMatrix::identity(dim, dim) - covered;
        let rest = (rest.iter().map(|z| z.norm()).fold(0.0, f64::max) > 1e-12).then_some(rest);
        Ok(Self {
            dim,
            codewords: [
                code.codeword0().amplitudes().clone(),
                code.codeword1().amplitudes().clone(),
            ],
            images,
            rest,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Applies the channel to `ρ`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rho.dim(),
            });
        }
        let m = rho.as_matrix();
        // Each branch lands in the code space: accumulate the 2×2 logical block
        // ⟨Eψ_a|ρ|Eψ_b⟩ and re-embed it once.
        let mut block = [[Complex64::new(0.0, 0.0); 2]; 2];
        for [e0, e1] in &self.images {
            let me = [m * e0, m * e1];
            for (a, ea) in [e0, e1].into_iter().enumerate() {
                for (b, mb) in me.iter().enumerate() {
                    block[a][b] += ea.dotc(mb);
                }
            }
        }
        let mut out = DMatrix::<Complex64>::zeros(self.dim, self.dim);
        for a in 0..2 {
            for b in 0..2 {
                out += &self.codewords[a] * self.codewords[b].adjoint() * block[a][b];
            }
        }
        if let Some(rest) = &self.rest {
            out += rest * m * rest;
        }
        Ok(DensityMatrix::from_matrix_unchecked(out))
    }

    /// Heisenberg-picture channel `O ↦ Σ K†OK`, so that
    /// `Tr(O·R(ρ)) = Tr(R†(O)·ρ)`.
    pub fn adjoint_apply(&self, op: &DenseOperator) -> Result<DenseOperator> {
        if op.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: op.dim(),
            });
        }
        let o = op.as_matrix();
        // logical block ⟨ψ_a|O|ψ_b⟩ of the code-space compression Π₀OΠ₀
        let mut block = [[Complex64::new(0.0, 0.0); 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                block[a][b] = self.codewords[a].dotc(&(o * &self.codewords[b]));
            }
        }
        let mut out = DMatrix::<Complex64>::zeros(self.dim, self.dim);
        for [e0, e1] in &self.images {
            let e = [e0, e1];
            for a in 0..2 {
                for b in 0..2 {
                    out += e[a] * e[b].adjoint() * block[a][b];
                }
            }
        }
        if let Some(rest) = &self.rest {
            out += rest * o * rest;
        }
        DenseOperator::new(out)
    }
}

/// Applies the ideal recovery channel for `errors` to `ρ`.
pub fn recover(code: &StabilizerCode, errors: &ErrorSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    Recovery::new(code, errors)?.apply(rho)
}
