use num_complex::Complex64;

use super::dense::DenseOperator;
use super::pauli::{Pauli, PauliString, Phase};
use super::qubits_for_dim;
use crate::error::{Error, Result};

/// Coefficients with modulus below this are dropped from a decomposition.
pub const DECOMPOSE_CUTOFF: f64 = 1e-12;

/// One term `coeff · pauli` of a Pauli expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coeff: Complex64,
    pub pauli: PauliString,
}

/// Expands `A = Σ_P c_P·P` with `c_P = Tr(P†A)/2^n`.
///
/// For a fixed bit-flip mask `x` the coefficients over all phase masks `z`
/// are a Walsh–Hadamard transform of the shifted diagonal `A[b⊕x, b]`, so the
/// full expansion costs `O(4^n · n)`. Terms are returned in lexicographic
/// order of their letters (I < X < Y < Z).
pub fn pauli_decompose(a: &DenseOperator) -> Result<Vec<PauliTerm>> {
    let dim = a.dim();
    let n = qubits_for_dim(dim).ok_or(Error::NotPowerOfTwo(dim))?;
    let m = a.as_matrix();
    let norm = 1.0 / dim as f64;

    let mut terms = Vec::new();
    let mut buf = vec![Complex64::new(0.0, 0.0); dim];
    for x in 0..dim {
        for (b, slot) in buf.iter_mut().enumerate() {
            *slot = m[(b ^ x, b)];
        }
        walsh_hadamard(&mut buf);
        for (z, &sum) in buf.iter().enumerate() {
            // P = i^{nY} X^x Z^z, so c_P = conj(i^{nY}) · Σ_b (−1)^{b·z} A[b⊕x, b] / d
            let n_y = (x & z).count_ones() % 4;
            let coeff = sum * conj_i_pow(n_y) * norm;
            if coeff.norm() >= DECOMPOSE_CUTOFF {
                terms.push(PauliTerm {
                    coeff,
                    pauli: string_from_masks(n, x, z),
                });
            }
        }
    }
    terms.sort_by(|p, q| p.pauli.letters().cmp(q.pauli.letters()));
    Ok(terms)
}

/// `Σ c_P·P` as a dense operator on `n` qubits.
pub fn reconstruct(terms: &[PauliTerm], n: usize) -> DenseOperator {
    let dim = 1usize << n;
    let mut out = DenseOperator::zeros(dim);
    for t in terms {
        let act = t.pauli.action();
        let m = out.as_matrix_mut();
        for b in 0..dim {
            let (amp, r) = act.apply_index(b);
            m[(r, b)] += t.coeff * amp;
        }
    }
    out
}

fn conj_i_pow(p: u32) -> Complex64 {
    match p % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

fn string_from_masks(n: usize, x: usize, z: usize) -> PauliString {
    let letters = (0..n)
        .map(|k| {
            let bit = 1 << (n - 1 - k);
            match (x & bit != 0, z & bit != 0) {
                (false, false) => Pauli::I,
                (true, false) => Pauli::X,
                (true, true) => Pauli::Y,
                (false, true) => Pauli::Z,
            }
        })
        .collect();
    PauliString::new(Phase::PlusOne, letters)
}

/// In-place unnormalized Walsh–Hadamard transform: `out[z] = Σ_b (−1)^{popcount(b&z)} in[b]`.
fn walsh_hadamard(v: &mut [Complex64]) {
    let mut h = 1;
    while h < v.len() {
        for start in (0..v.len()).step_by(2 * h) {
            for i in start..start + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(a: &DenseOperator) -> Vec<(Complex64, PauliString)> {
        // Oracle: Tr(P†A)/d over every Pauli string, via dense products.
        let n = a.num_qubits();
        let mut out = Vec::new();
        let mut idx = vec![0usize; n];
        loop {
            let p = PauliString::new(Phase::PlusOne, idx.iter().map(|&i| Pauli::ALL[i]).collect());
            let c = p.to_dense().adjoint().matmul(a).unwrap().trace() / a.dim() as f64;
            if c.norm() >= DECOMPOSE_CUTOFF {
                out.push((c, p));
            }
            let mut k = n;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < 4 {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    #[test]
    fn sigma_z() {
        let terms = pauli_decompose(&DenseOperator::from_real_diagonal(&[1.0, -1.0])).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].pauli.to_string(), "Z");
        assert!((terms[0].coeff - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn identity() {
        for dim in [2, 4, 8, 16] {
            let terms = pauli_decompose(&DenseOperator::identity(dim)).unwrap();
            assert_eq!(terms.len(), 1);
            assert_eq!(terms[0].pauli.weight(), 0);
            assert!((terms[0].coeff.re - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn majority_sign_hamiltonian() {
        // +1 on {000,001,010,100}, −1 on the rest.
        let diag: Vec<f64> = (0..8u32)
            .map(|b| if b.count_ones() <= 1 { 1.0 } else { -1.0 })
            .collect();
        let h = DenseOperator::from_real_diagonal(&diag);
        let fast = pauli_decompose(&h).unwrap();
        let slow = brute_force(&h);
        let got: Vec<(String, f64)> =
            fast.iter().map(|t| (t.pauli.to_string(), t.coeff.re)).collect();
        assert_eq!(
            got,
            vec![
                ("IIZ".to_string(), 0.5),
                ("IZI".to_string(), 0.5),
                ("ZII".to_string(), 0.5),
                ("ZZZ".to_string(), -0.5)
            ]
        );
        assert_eq!(fast.len(), slow.len());
        for (t, (c, p)) in fast.iter().zip(&slow) {
            assert_eq!(&t.pauli, p);
            assert!((t.coeff - c).norm() < 1e-14);
        }
    }

    #[test]
    fn matches_brute_force_on_dense_operator() {
        let a = DenseOperator::from_fn(8, |r, c| {
            Complex64::new((r * 3 + c) as f64 * 0.1, (r as f64 - c as f64) * 0.07)
        });
        let fast = pauli_decompose(&a).unwrap();
        let slow = brute_force(&a);
        assert_eq!(fast.len(), slow.len());
        for (t, (c, p)) in fast.iter().zip(&slow) {
            assert_eq!(&t.pauli, p);
            assert!((t.coeff - c).norm() < 1e-13);
        }
        assert!(reconstruct(&fast, 3).max_abs_diff(&a) < 1e-12);
    }
}
