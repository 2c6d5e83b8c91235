//! Closed-form estimates for ETHs realized perturbatively from 2-body
//! couplings through an auxiliary gap `Δ`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbativeParams {
    /// Physical qubits.
    pub n: usize,
    pub gamma: f64,
    /// 2-body interaction rate.
    pub omega: f64,
    /// Auxiliary gap.
    pub delta: f64,
    /// Target body-ness.
    pub k: u32,
}

impl PerturbativeParams {
    pub fn new(n: usize, gamma: f64, omega: f64, delta: f64, k: u32) -> Result<Self> {
        let p = Self {
            n,
            gamma,
            omega,
            delta,
            k,
        };
        p.validate()?;
        Ok(p)
    }

    /// `γ` may be zero; everything else must be positive and finite.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k == 0 {
            return Err(Error::InvalidParameter("n and k must be >= 1".into()));
        }
        for (name, v) in [("omega", self.omega), ("delta", self.delta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be > 0")));
            }
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma = {} must be >= 0", self.gamma)));
        }
        Ok(())
    }

    /// Perturbation theory needs `ω < Δ`; outside that the estimates are
    /// only indicative.
    pub fn is_perturbative(&self) -> bool {
        self.omega < self.delta
    }
}

/// `ωₖ = ω(ω/Δ)^{k−1}`, evaluated as `ω^k/Δ^{k−1}`.
pub fn effective_rate(omega: f64, delta: f64, k: u32) -> f64 {
    let k = k as i32;
    omega.powi(k) / delta.powi(k - 1)
}

/// Bare error probability `p = γ/ω` and the effective `p′`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorProbabilities {
    pub p: f64,
    /// `n(γ/ωₖ)²`
    pub p_prime: f64,
    /// `n·p²·(Δ/ω)^{2k−2}`, equal to `p_prime` up to rounding.
    pub p_prime_scaled: f64,
}

pub fn effective_error_prob(params: &PerturbativeParams) -> Result<ErrorProbabilities> {
    params.validate()?;
    let PerturbativeParams {
        n,
        gamma,
        omega,
        delta,
        k,
    } = *params;
    let n = n as f64;
    let p = gamma / omega;
    let wk = effective_rate(omega, delta, k);
    Ok(ErrorProbabilities {
        p,
        p_prime: n * (gamma / wk).powi(2),
        p_prime_scaled: n * p * p * (delta / omega).powi(2 * k as i32 - 2),
    })
}

/// `n(γ/ω) < (ω/Δ)^{2k−2}`; equality does not count.
pub fn breakeven(params: &PerturbativeParams) -> Result<bool> {
    params.validate()?;
    let lhs = params.n as f64 * params.gamma / params.omega;
    let rhs = (params.omega / params.delta).powi(2 * params.k as i32 - 2);
    Ok(lhs < rhs)
}

/// Logical error rate `3αγ = 3γ²τ` of the bit-flip code, with `α = γτ`.
pub fn predicted_logical_rate(gamma: f64, tau: f64) -> Result<f64> {
    if !(gamma >= 0.0 && tau >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma = {gamma} and tau = {tau} must be >= 0"
        )));
    }
    Ok(3.0 * gamma * gamma * tau)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, p: f64, delta: f64, k: u32) -> PerturbativeParams {
        PerturbativeParams::new(n, p, 1.0, delta, k).unwrap()
    }

    #[test]
    fn effective_rate_examples() {
        assert_eq!(effective_rate(3.7, 11.0, 1), 3.7);
        assert_eq!(effective_rate(1.0, 10.0, 3), 0.01);
        assert_eq!(effective_rate(2.0, 20.0, 2), 0.2);
    }

    #[test]
    fn effective_error_probability() {
        let e = effective_error_prob(&params(3, 1e-3, 10.0, 3)).unwrap();
        assert!((e.p_prime - 0.03).abs() < 1e-12);
        assert!((e.p_prime - e.p_prime_scaled).abs() < 1e-12);
        assert_eq!(e.p, 1e-3);

        let e = effective_error_prob(&params(5, 0.02, 7.0, 1)).unwrap();
        assert!((e.p_prime - 5.0 * 0.02 * 0.02).abs() < 1e-15);
    }

    #[test]
    fn breakeven_examples() {
        assert!(!breakeven(&params(3, 1e-4, 10.0, 3)).unwrap());
        assert!(breakeven(&params(3, 1e-6, 10.0, 3)).unwrap());
        assert!(breakeven(&params(9, 0.0, 2.0, 5)).unwrap());
        // n·p = 1e-2 = (ω/Δ)² exactly
        assert!(!breakeven(&params(1, 0.25, 2.0, 2)).unwrap());
    }

    #[test]
    fn logical_rate() {
        let tau = 0.01;
        let g = 1.0;
        assert!((predicted_logical_rate(g, tau).unwrap() - 0.03 * g).abs() < 1e-15);
        assert_eq!(predicted_logical_rate(0.0, 3.0).unwrap(), 0.0);
        assert!(predicted_logical_rate(-1.0, 1.0).is_err());
    }

    #[test]
    fn validation() {
        assert!(PerturbativeParams::new(0, 0.1, 1.0, 10.0, 2).is_err());
        assert!(PerturbativeParams::new(3, 0.1, 0.0, 10.0, 2).is_err());
        assert!(PerturbativeParams::new(3, -0.1, 1.0, 10.0, 2).is_err());
        assert!(!params(3, 0.1, 0.5, 2).is_perturbative());
    }
}
