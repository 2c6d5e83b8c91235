//! `etlab verify`: fast invariant checks over every module.

use std::f64::consts::PI;
use std::time::Instant;

use etlab_core::codes::{error_set, recover, syndrome, ErrorSet, Recovery, StabilizerCode};
use etlab_core::dynamics::{
    default_dt, integrate_lindblad, lowering, mc_trajectories, IntegrationConfig, NoiseModel, TrajectoryConfig,
};
use etlab_core::eth::{controlled_report, css7_counterexample, eth_report, LogicalHamiltonian};
use etlab_core::experiments::{
    breakeven, double_error_residual, effective_error_prob, effective_rate, fig1a_sweep, fig1b_scenarios, run_sweep,
    Method, PerturbativeParams, SweepOptions,
};
use etlab_core::qcore::{
    evolve_unitary, fidelity, pauli_decompose, reconstruct, unitary_propagator, DenseOperator, Pauli, PauliString,
    PureState,
};
use etlab_core::{Complex64, Result};

use crate::output::{csv_string, parse_csv};

/// Outcome of one check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = fn() -> Result<(bool, String)>;

const CHECKS: &[(&str, Check)] = &[
    ("pauli algebra", pauli_algebra),
    ("pauli decomposition", decomposition),
    ("unitary propagator", propagator),
    ("stabilizer codes", stabilizer_codes),
    ("recovery channel", recovery_channel),
    ("eth exactness", eth_exactness),
    ("eth body-ness", eth_bodyness),
    ("css7 counterexample", css7),
    ("two-error cancellation", two_errors),
    ("lindblad analytic decay", lindblad_decay),
    ("lindblad rk4 order", lindblad_order),
    ("lindblad positivity", lindblad_positivity),
    ("trajectory statistics", trajectories),
    ("noiseless sweeps", noiseless_sweeps),
    ("perturbative formulas", perturbative),
    ("csv round trip", csv_round_trip),
];

pub fn run_checks() -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|(name, f)| {
            let start = Instant::now();
            let (passed, detail) = match f() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckResult {
                name,
                passed,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

pub fn render_table(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in results {
        out.push_str(&format!(
            "{:<width$}  {}  {:>7.2}s  {}\n",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.seconds,
            r.detail
        ));
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    out.push_str(&format!("{} checks, {} failed\n", results.len(), failed));
    out
}

fn all_kinds() -> [Pauli; 3] {
    [Pauli::X, Pauli::Y, Pauli::Z]
}

fn code_sets() -> Result<Vec<(StabilizerCode, ErrorSet)>> {
    let b = StabilizerCode::bitflip3();
    let p = StabilizerCode::perfect5();
    let s = StabilizerCode::steane7();
    Ok(vec![
        (b.clone(), error_set(&b, &[Pauli::X])?),
        (p.clone(), error_set(&p, &all_kinds())?),
        (s.clone(), error_set(&s, &all_kinds())?),
    ])
}

/// Deterministic spread of logical states over the Bloch sphere.
pub fn sample_logical(code: &StabilizerCode, k: usize) -> Result<PureState> {
    let golden = 0.618_033_988_749_895;
    let theta = PI * ((k as f64 + 0.5) * golden).fract();
    let phi = 2.0 * PI * ((k as f64 + 0.5) * 0.414_213_562_373_095).fract();
    code.logical_state(
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    )
}

fn pauli_algebra() -> Result<(bool, String)> {
    let x: PauliString = "X".parse()?;
    let z: PauliString = "Z".parse()?;
    let y: PauliString = "Y".parse()?;
    let minus_iy: PauliString = "-iY".parse()?;
    let xz_ok = x.mul(&z)? == minus_iy;
    let yy_ok = y.mul(&y)? == PauliString::identity(1);
    let dense_ok = x.mul(&z)?.to_dense().max_abs_diff(&x.to_dense().matmul(&z.to_dense())?) == 0.0;
    let p: PauliString = "XYZIX".parse()?;
    let q: PauliString = "ZZXYI".parse()?;
    let pq = p.mul(&q)?.to_dense();
    let closure_ok = pq.max_abs_diff(&p.to_dense().matmul(&q.to_dense())?) == 0.0;
    let ok = xz_ok && yy_ok && dense_ok && closure_ok;
    Ok((ok, "X·Z = −iY, Y² = I, products match dense".into()))
}

fn decomposition() -> Result<(bool, String)> {
    let h = &(&"XZY".parse::<PauliString>()?.to_dense() * 0.3) + &(&"ZIZ".parse::<PauliString>()?.to_dense() * -1.2);
    let terms = pauli_decompose(&h)?;
    let err = reconstruct(&terms, 3).max_abs_diff(&h);
    Ok((terms.len() == 2 && err < 1e-12, format!("2 terms, reconstruction error {err:.1e}")))
}

fn propagator() -> Result<(bool, String)> {
    let h = &(&"XZ".parse::<PauliString>()?.to_dense() * 0.7) + &(&"ZI".parse::<PauliString>()?.to_dense() * 0.4);
    let u1 = unitary_propagator(&h, 0.3)?;
    let u2 = unitary_propagator(&h, 0.5)?;
    let err = u1.matmul(&u2)?.max_abs_diff(&unitary_propagator(&h, 0.8)?);
    let plus = PureState::from_slice(&[Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0); 2])?;
    let z = "Z".parse::<PauliString>()?.to_dense();
    let back = evolve_unitary(&z, PI, &plus)?;
    let period = (back.inner(&plus) + 1.0).norm();
    Ok((err < 1e-12 && period < 1e-12, format!("U(a)U(b) − U(a+b) = {err:.1e}")))
}

fn stabilizer_codes() -> Result<(bool, String)> {
    let mut ok = true;
    let mut notes = Vec::new();
    for (code, errors) in code_sets()? {
        let proj = code.code_projector();
        for c in code.codewords() {
            let v = DenseOperator::projector(c);
            ok &= proj.matmul(&v)?.max_abs_diff(&v) < 1e-10;
        }
        let mut syndromes = Vec::new();
        for e in errors.errors() {
            syndromes.push(syndrome(&code, e)?);
        }
        let distinct = {
            let mut s = syndromes.clone();
            s.sort();
            s.dedup();
            s.len()
        };
        if code.name() == "steane7" {
            ok &= distinct == 21;
        }
        if code.name() == "perfect5" {
            ok &= distinct == 15;
        }
        notes.push(format!("{} {distinct} syndromes", code.name()));
    }
    Ok((ok, notes.join(", ")))
}

fn recovery_channel() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for (code, errors) in code_sets()? {
        let channel = Recovery::new(&code, &errors)?;
        for k in 0..20 {
            let psi = sample_logical(&code, k)?;
            for e in errors.errors() {
                let hit = e.apply(&psi)?.to_density();
                let f = fidelity(&psi, &channel.apply(&hit)?)?;
                worst = worst.max((1.0 - f).abs());
            }
        }
    }
    let b = StabilizerCode::bitflip3();
    let out = recover(&b, &error_set(&b, &[Pauli::X])?, &PureState::basis(8, 0b011).to_density())?;
    let mis = out.max_abs_diff(&PureState::basis(8, 0b111).to_density());
    Ok((worst < 1e-10 && mis < 1e-12, format!("max 1 − F = {worst:.1e}, |011⟩ → |111⟩")))
}

fn eth_exactness() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for (code, errors) in code_sets()? {
        let lh = LogicalHamiltonian::new(0.4, -0.9, Complex64::new(0.3, -0.2));
        worst = worst.max(eth_report(&code, &lh, &errors)?.max_residual);
        worst = worst.max(controlled_report(&code, &errors, 1.0)?.max_residual);
    }
    Ok((worst < 1e-10, format!("max residual {worst:.1e}")))
}

fn eth_bodyness() -> Result<(bool, String)> {
    let sets = code_sets()?;
    let z = LogicalHamiltonian::z_rotation(1.0);
    let got = [
        eth_report(&sets[0].0, &z, &sets[0].1)?.bodyness,
        eth_report(&sets[1].0, &z, &sets[1].1)?.bodyness,
        controlled_report(&sets[0].0, &sets[0].1, 1.0)?.bodyness,
        controlled_report(&sets[1].0, &sets[1].1, 1.0)?.bodyness,
    ];
    Ok((got == [3, 5, 4, 6], format!("bitflip3 {}, perfect5 {}, controlled {} / {}", got[0], got[1], got[2], got[3])))
}

fn css7() -> Result<(bool, String)> {
    let r = css7_counterexample()?;
    Ok((
        r.conjugated_sign == -1 && r.naive_sum_is_zero,
        format!("sign {}, naive sum zero: {}", r.conjugated_sign, r.naive_sum_is_zero),
    ))
}

fn two_errors() -> Result<(bool, String)> {
    let b = StabilizerCode::bitflip3();
    let r = double_error_residual(&b, &error_set(&b, &[Pauli::X])?, &LogicalHamiltonian::z_rotation(1.0), 1.1)?;
    Ok((r < 1e-10, format!("residual {r:.1e}")))
}

fn x_noise(g: f64) -> Result<NoiseModel> {
    NoiseModel::new().with("X".parse::<PauliString>()?.to_dense(), g, "X")
}

fn lindblad_decay() -> Result<(bool, String)> {
    let g = 0.5;
    let t = 1.0 / g;
    let steps = 2000;
    let cfg = IntegrationConfig::new(t / steps as f64, t).with_stride(steps / 10);
    let s = integrate_lindblad(&PureState::basis(2, 0).to_density(), &DenseOperator::zeros(2), &x_noise(g)?, &cfg)?;
    let mut worst: f64 = 0.0;
    for (t, rho) in s.times.iter().zip(&s.states).skip(1) {
        let exact = (1.0 + (-2.0 * g * t).exp()) / 2.0;
        worst = worst.max((rho.as_matrix()[(0, 0)].re - exact).abs());
    }
    Ok((s.times.len() == 11 && worst < 1e-6, format!("10 points, max error {worst:.1e}")))
}

fn two_qubit_error(dt: f64) -> Result<f64> {
    let g = 1.0;
    let t = 2.0;
    let mut noise = NoiseModel::new();
    noise.add_on_qubits(2, 0..2, &"X".parse::<PauliString>()?.to_dense(), g, "X")?;
    let s = integrate_lindblad(&PureState::basis(4, 0).to_density(), &DenseOperator::zeros(4), &noise, &IntegrationConfig::new(dt, t))?;
    let p = (1.0 + (-2.0 * g * t).exp()) / 2.0;
    let exact = DenseOperator::from_real_diagonal(&[p * p, p * (1.0 - p), (1.0 - p) * p, (1.0 - p) * (1.0 - p)]);
    Ok(s.final_state().as_operator().max_abs_diff(&exact))
}

fn lindblad_order() -> Result<(bool, String)> {
    let ratio = two_qubit_error(0.2)? / two_qubit_error(0.1)?;
    Ok((ratio >= 12.0, format!("dt-halving error ratio {ratio:.1}")))
}

fn lindblad_positivity() -> Result<(bool, String)> {
    let h = &"ZI".parse::<PauliString>()?.to_dense() + &(&"XX".parse::<PauliString>()?.to_dense() * 0.4);
    let mut noise = NoiseModel::new();
    noise.add_on_qubits(2, 0..2, &lowering(), 0.3, "damp")?;
    let cfg = IntegrationConfig::new(1e-3, 5.0).with_stride(100);
    let s = integrate_lindblad(&PureState::basis(4, 3).to_density(), &h, &noise, &cfg)?;
    let min = s.states.iter().map(|r| r.min_eigenvalue()).fold(f64::INFINITY, f64::min);
    Ok((min >= -1e-7, format!("min eigenvalue {min:.1e}")))
}

fn trajectories() -> Result<(bool, String)> {
    let g = 1.0;
    let p0 = DenseOperator::from_real_diagonal(&[1.0, 0.0]);
    let cfg = TrajectoryConfig::new(2000, 7, default_dt(0.0, g));
    let psi = PureState::basis(2, 0);
    let res = mc_trajectories(&psi, &DenseOperator::zeros(2), &x_noise(g)?, 1.0, std::slice::from_ref(&p0), &cfg)?;
    let again = mc_trajectories(&psi, &DenseOperator::zeros(2), &x_noise(g)?, 1.0, std::slice::from_ref(&p0), &cfg)?;
    let exact = (1.0 + (-2.0f64).exp()) / 2.0;
    let z = (res.means[0] - exact) / res.stderrs[0];
    let quiet = mc_trajectories(&psi, &"X".parse::<PauliString>()?.to_dense(), &NoiseModel::new(), 1.0, &[p0], &TrajectoryConfig::new(10, 1, 1e-3))?;
    Ok((
        z.abs() < 3.0 && res == again && quiet.stderrs[0] == 0.0,
        format!("mean {:.4} vs {exact:.4} ({z:+.2} se)", res.means[0]),
    ))
}

fn noiseless_sweeps() -> Result<(bool, String)> {
    let a = fig1a_sweep(&[0.0], 1.0, &SweepOptions::new(Method::Lindblad))?;
    let worst_a = a.rows.iter().map(|r| (1.0 - r.probability).abs()).fold(0.0, f64::max);
    let eth5: Vec<_> = fig1b_scenarios().into_iter().filter(|s| s.label == "eth5").collect();
    let b = run_sweep(&eth5, &[0.0], 1.0, &SweepOptions::new(Method::Lindblad))?;
    let p = b.rows[0].probability;
    Ok((worst_a < 1e-8 && p >= 0.999, format!("memory max 1 − P {worst_a:.1e}, eth5 swap {p:.6}")))
}

fn perturbative() -> Result<(bool, String)> {
    let p = effective_error_prob(&PerturbativeParams::new(3, 1e-3, 1.0, 10.0, 3)?)?;
    let ok = effective_rate(1.0, 10.0, 3) == 0.01
        && effective_rate(2.0, 20.0, 2) == 0.2
        && (p.p_prime - 0.03).abs() < 1e-12
        && (p.p_prime - p.p_prime_scaled).abs() < 1e-12
        && !breakeven(&PerturbativeParams::new(3, 1e-4, 1.0, 10.0, 3)?)?
        && breakeven(&PerturbativeParams::new(3, 1e-6, 1.0, 10.0, 3)?)?;
    Ok((ok, format!("p′ = {:.3}", p.p_prime)))
}

fn csv_round_trip() -> Result<(bool, String)> {
    let r = fig1a_sweep(&[0.0, 0.05], 1.0, &SweepOptions::new(Method::Lindblad).with_dt(0.01))?;
    let text = csv_string(&r);
    let ok = match parse_csv(text.as_bytes()) {
        Ok(back) => csv_string(&back) == text,
        Err(_) => false,
    };
    Ok((ok, format!("{} rows", r.rows.len())))
}
