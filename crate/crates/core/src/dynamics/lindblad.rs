use num_complex::Complex64;

use super::sparse::{from_row_major, to_row_major};
use super::{validate_schedule, step_schedule, Generator, IntegrationConfig, NoiseModel};
use crate::error::{Error, Result};
use crate::qcore::{DenseOperator, DensityMatrix};

/// Trace drift beyond this aborts the integration.
pub const TRACE_FAILURE_TOL: f64 = 1e-5;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Recorded states of a Lindblad integration.
#[derive(Debug, Clone)]
pub struct LindbladSeries {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl LindbladSeries {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("series always holds the initial state")
    }
}

/// Dense-kernel evaluation of the master-equation right-hand side.
///
/// Writes `−i(H_eff·ρ − ρ·H_eff†) + Σₖ JₖρJₖ†` with `Jₖ = √γₖLₖ`, using that
/// `ρ·H_eff† = (H_eff·ρ)†` for Hermitian `ρ`.
struct Rhs<'a> {
    gen: &'a Generator,
    a: Vec<Complex64>,
    c: Vec<Complex64>,
    ct: Vec<Complex64>,
}

impl<'a> Rhs<'a> {
    fn new(gen: &'a Generator) -> Self {
        let n = gen.dim * gen.dim;
        Self {
            gen,
            a: vec![ZERO; n],
            c: vec![ZERO; n],
            ct: vec![ZERO; n],
        }
    }

    fn eval(&mut self, rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.gen.dim;
        self.gen.h_eff.mul_dense(rho, &mut self.a);
        let mi = Complex64::new(0.0, -1.0);
        for r in 0..d {
            for c in 0..d {
                out[r * d + c] = mi * (self.a[r * d + c] - self.a[c * d + r].conj());
            }
        }
        for j in &self.gen.jumps {
            j.mul_dense(rho, &mut self.c);
            for r in 0..d {
                for c in 0..d {
                    self.ct[r * d + c] = self.c[c * d + r].conj();
                }
            }
            // J·(Jρ)† = JρJ†
            j.mul_dense(&self.ct, &mut self.c);
            for (o, v) in out.iter_mut().zip(&self.c) {
                *o += v;
            }
        }
    }
}

/// `dρ/dt` for the given Hamiltonian and noise model.
pub fn lindblad_rhs(rho: &DensityMatrix, h: &DenseOperator, noise: &NoiseModel) -> Result<DenseOperator> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            left: h.dim(),
            right: rho.dim(),
        });
    }
    let gen = Generator::new(h, noise)?;
    let mut rhs = Rhs::new(&gen);
    let mut out = vec![ZERO; h.dim() * h.dim()];
    rhs.eval(&to_row_major(rho.as_matrix()), &mut out);
    DenseOperator::new(from_row_major(h.dim(), &out))
}

fn symmetrize(d: usize, rho: &mut [Complex64]) {
    for r in 0..d {
        rho[r * d + r].im = 0.0;
        for c in r + 1..d {
            let avg = (rho[r * d + c] + rho[c * d + r].conj()) * 0.5;
            rho[r * d + c] = avg;
            rho[c * d + r] = avg.conj();
        }
    }
}

fn trace(d: usize, rho: &[Complex64]) -> f64 {
    (0..d).map(|i| rho[i * d + i].re).sum()
}

/// Classical RK4 integration of the Lindblad equation.
///
/// After every step `ρ` is re-symmetrized to `(ρ + ρ†)/2`. A trace drift
/// beyond [`TRACE_FAILURE_TOL`] returns [`Error::TraceDrift`].
pub fn integrate_lindblad(
    rho0: &DensityMatrix,
    h: &DenseOperator,
    noise: &NoiseModel,
    config: &IntegrationConfig,
) -> Result<LindbladSeries> {
    config.validate()?;
    validate_schedule(config.dt, config.t_final)?;
    if rho0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            left: h.dim(),
            right: rho0.dim(),
        });
    }
    h.ensure_hermitian(1e-10)?;
    let gen = Generator::new(h, noise)?;
    let d = gen.dim;
    let mut rhs = Rhs::new(&gen);

    let mut rho = to_row_major(rho0.as_matrix());
    let n = d * d;
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]);

    let mut series = LindbladSeries {
        times: vec![0.0],
        states: vec![rho0.clone()],
    };
    let steps = step_schedule(config.dt, config.t_final);
    let mut t = 0.0;
    for (i, &dt) in steps.iter().enumerate() {
        rhs.eval(&rho, &mut k1);
        axpy(&rho, 0.5 * dt, &k1, &mut tmp);
        rhs.eval(&tmp, &mut k2);
        axpy(&rho, 0.5 * dt, &k2, &mut tmp);
        rhs.eval(&tmp, &mut k3);
        axpy(&rho, dt, &k3, &mut tmp);
        rhs.eval(&tmp, &mut k4);
        let w = dt / 6.0;
        for idx in 0..n {
            rho[idx] += (k1[idx] + (k2[idx] + k3[idx]) * 2.0 + k4[idx]) * w;
        }
        symmetrize(d, &mut rho);
        t += dt;

        let tr = trace(d, &rho);
        if (tr - 1.0).abs() > TRACE_FAILURE_TOL || !tr.is_finite() {
            return Err(Error::TraceDrift { trace: tr, time: t });
        }
        let last = i + 1 == steps.len();
        let stride_hit = config.record_stride > 0 && (i + 1) % config.record_stride == 0;
        if last || stride_hit {
            series.times.push(if last { config.t_final } else { t });
            series
                .states
                .push(DensityMatrix::from_matrix_unchecked(from_row_major(d, &rho)));
        }
    }
    Ok(series)
}

fn axpy(x: &[Complex64], a: f64, y: &[Complex64], out: &mut [Complex64]) {
    for ((o, xi), yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + yi * a;
    }
}
