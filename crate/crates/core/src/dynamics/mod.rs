//! Open-system time evolution.
//!
//! Two independent routes to the same Markovian dynamics:
//!
//! * [`integrate_lindblad`]: fixed-step RK4 on the master equation
//!   `dρ/dt = −i[H,ρ] + Σₖ γₖ(LₖρLₖ† − ½{Lₖ†Lₖ, ρ})`.
//! * [`mc_trajectories`]: quantum-jump unravelling of the same equation,
//!   averaged over seeded trajectories.

mod lindblad;
mod sparse;
mod trajectories;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::DenseOperator;

pub use lindblad::{integrate_lindblad, lindblad_rhs, LindbladSeries, TRACE_FAILURE_TOL};
pub use trajectories::{mc_trajectories, McResult, TrajectoryConfig};

/// One dissipative channel: jump operator `L` applied at rate `γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub jump: DenseOperator,
    pub rate: f64,
    pub label: String,
}

/// Collection of independent channels sharing one Hilbert space.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NoiseModel {
    channels: Vec<Channel>,
}

impl NoiseModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, jump: DenseOperator, rate: f64, label: impl Into<String>) -> Result<()> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!("rate {rate} must be finite and >= 0")));
        }
        if let Some(first) = self.channels.first() {
            if first.jump.dim() != jump.dim() {
                return Err(Error::DimensionMismatch {
                    left: first.jump.dim(),
                    right: jump.dim(),
                });
            }
        }
        self.channels.push(Channel {
            jump,
            rate,
            label: label.into(),
        });
        Ok(())
    }

    pub fn with(mut self, jump: DenseOperator, rate: f64, label: impl Into<String>) -> Result<Self> {
        self.add(jump, rate, label)?;
        Ok(self)
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn max_rate(&self) -> f64 {
        self.channels.iter().map(|c| c.rate).fold(0.0, f64::max)
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        match self.channels.first() {
            Some(c) if c.jump.dim() != dim => Err(Error::DimensionMismatch {
                left: dim,
                right: c.jump.dim(),
            }),
            _ => Ok(()),
        }
    }

    /// Adds `op` acting on each listed qubit of an `n`-qubit register.
    pub fn add_on_qubits(
        &mut self,
        n: usize,
        qubits: impl IntoIterator<Item = usize>,
        op: &DenseOperator,
        rate: f64,
        label: &str,
    ) -> Result<()> {
        for q in qubits {
            self.add(embed_single(n, q, op)?, rate, format!("{label}{}", q + 1))?;
        }
        Ok(())
    }
}

/// `I⊗…⊗op⊗…⊗I` with the 2×2 `op` on `qubit` (0-based, qubit 0 most significant).
pub fn embed_single(n: usize, qubit: usize, op: &DenseOperator) -> Result<DenseOperator> {
    if op.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: op.dim(),
        });
    }
    if qubit >= n {
        return Err(Error::InvalidParameter(format!("qubit {qubit} out of range for {n} qubits")));
    }
    let left = DenseOperator::identity(1 << qubit);
    let right = DenseOperator::identity(1 << (n - 1 - qubit));
    Ok(left.kron(op).kron(&right))
}

/// `σ₋ = |0⟩⟨1|` (damping, `|e⟩ = |1⟩ → |g⟩ = |0⟩`).
pub fn lowering() -> DenseOperator {
    DenseOperator::from_fn(2, |r, c| {
        if (r, c) == (0, 1) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `σ₊ = |1⟩⟨0|` (excitation).
pub fn raising() -> DenseOperator {
    lowering().adjoint()
}

/// Fixed-step integration schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Record every `record_stride` steps; 0 records only the endpoints.
    pub record_stride: usize,
}

impl IntegrationConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        Self {
            dt,
            t_final,
            record_stride: 0,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_schedule(self.dt, self.t_final)
    }

    /// Step sizes: `ceil(t_final/dt)` steps, the last one shortened so the
    /// schedule lands exactly on `t_final`.
    pub fn steps(&self) -> Vec<f64> {
        step_schedule(self.dt, self.t_final)
    }
}

pub(crate) fn validate_schedule(dt: f64, t_final: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt = {dt} must be > 0")));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_final = {t_final} must be >= 0")));
    }
    Ok(())
}

pub(crate) fn step_schedule(dt: f64, t_final: f64) -> Vec<f64> {
    if t_final == 0.0 {
        return Vec::new();
    }
    let n = ((t_final / dt) - 1e-9).ceil().max(1.0) as usize;
    let mut steps = vec![dt; n];
    steps[n - 1] = t_final - dt * (n - 1) as f64;
    steps
}

/// `(1/2000)·min(π/ω, 1/max_rate)`, ignoring a zero `ω` or zero rate.
pub fn default_dt(omega: f64, max_rate: f64) -> f64 {
    let mut scale = f64::INFINITY;
    if omega > 0.0 {
        scale = scale.min(PI / omega);
    }
    if max_rate > 0.0 {
        scale = scale.min(1.0 / max_rate);
    }
    if scale.is_infinite() {
        scale = 1.0;
    }
    scale / 2000.0
}

/// Operators compiled for the time-stepping kernels: the non-Hermitian
/// effective Hamiltonian `H − (i/2)Σγₖ Lₖ†Lₖ` and the scaled jumps `√γₖ·Lₖ`.
pub(crate) struct Generator {
    pub(crate) dim: usize,
    pub(crate) h_eff: sparse::Csr,
    pub(crate) jumps: Vec<sparse::Csr>,
}

impl Generator {
    pub(crate) fn new(h: &DenseOperator, noise: &NoiseModel) -> Result<Self> {
        noise.check_dim(h.dim())?;
        let mut h_eff = h.as_matrix().clone();
        let mut jumps = Vec::new();
        for ch in noise.channels() {
            if ch.rate == 0.0 {
                continue;
            }
            let l = ch.jump.as_matrix();
            h_eff -= (l.adjoint() * l) * Complex64::new(0.0, 0.5 * ch.rate);
            jumps.push(sparse::Csr::from_dense(&(l * Complex64::new(ch.rate.sqrt(), 0.0))));
        }
        Ok(Self {
            dim: h.dim(),
            h_eff: sparse::Csr::from_dense(&h_eff),
            jumps,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_lands_on_final_time() {
        let s = step_schedule(0.3, 1.0);
        assert_eq!(s.len(), 4);
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((s[3] - 0.1).abs() < 1e-12);
        assert_eq!(step_schedule(0.25, 1.0), vec![0.25; 4]);
        assert!(step_schedule(0.1, 0.0).is_empty());
    }

    #[test]
    fn default_dt_uses_fastest_scale() {
        assert!((default_dt(1.0, 0.0) - PI / 2000.0).abs() < 1e-15);
        assert!((default_dt(1.0, 10.0) - 0.1 / 2000.0).abs() < 1e-15);
    }

    #[test]
    fn noise_model_validation() {
        let mut nm = NoiseModel::new();
        assert!(nm.add(lowering(), -1.0, "bad").is_err());
        nm.add(lowering(), 1.0, "a").unwrap();
        assert!(nm.add(DenseOperator::identity(4), 1.0, "b").is_err());
        assert!(embed_single(3, 3, &lowering()).is_err());
    }

    #[test]
    fn embedding_order() {
        // σ₋ on the first of two qubits maps |10⟩ → |00⟩
        let l = embed_single(2, 0, &lowering()).unwrap();
        assert_eq!(l.entry(0b00, 0b10).re, 1.0);
        assert_eq!(l.nonzero_count(), 2);
    }
}
