//! Acceptance criteria. Runs every criterion (or those whose name contains
//! one of the command-line filters), prints one `criterion N: PASS|FAIL ...`
//! line each and exits non-zero if any fails.

use std::f64::consts::PI;
use std::fs;
use std::panic;
use std::process::{Command, ExitCode};
use std::time::Instant;

use etlab::verify::sample_logical;
use etlab_core::codes::{error_set, Recovery, StabilizerCode};
use etlab_core::dynamics::{integrate_lindblad, IntegrationConfig, NoiseModel};
use etlab_core::eth::{
    bodyness, controlled_basis, controlled_eth, css7_counterexample, encode_logical, make_eth, swap_coupling,
    verify_et, verify_et_on, LogicalHamiltonian,
};
use etlab_core::experiments::{
    breakeven, default_gamma_grid, effective_error_prob, effective_rate, fig1a_scenarios, fig1b_scenarios, log_grid,
    Method, PerturbativeParams, SweepOptions,
};
use etlab_core::qcore::{fidelity, DenseOperator, Pauli, PauliString, PureState};

type Outcome = (bool, String);

fn report(pass: bool, detail: &str) -> Outcome {
    (pass, detail.to_string())
}

const CRITERIA: [(&str, fn() -> Outcome); 9] = [
    ("criterion_1_et_exactness", criterion_1_et_exactness),
    ("criterion_2_bodyness", criterion_2_bodyness),
    ("criterion_3_analytic_dynamics", criterion_3_analytic_dynamics),
    ("criterion_4_fig1a_scaling", criterion_4_fig1a_scaling),
    ("criterion_5_fig1b_ordering", criterion_5_fig1b_ordering),
    ("criterion_6_mc_lindblad_agreement", criterion_6_mc_lindblad_agreement),
    ("criterion_7_perturbative_formulas", criterion_7_perturbative_formulas),
    ("criterion_8_recovery", criterion_8_recovery),
    ("criterion_9_determinism", criterion_9_determinism),
];

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, run)) in CRITERIA.iter().enumerate() {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let (pass, detail) = panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        println!("criterion {}: {} {detail}", i + 1, if pass { "PASS" } else { "FAIL" });
        if !pass {
            failed += 1;
        }
    }
    println!("\nacceptance: {} passed; {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn code_sets() -> Vec<(StabilizerCode, Vec<Pauli>)> {
    vec![
        (StabilizerCode::bitflip3(), vec![Pauli::X]),
        (StabilizerCode::perfect5(), vec![Pauli::X, Pauli::Y, Pauli::Z]),
        (StabilizerCode::steane7(), vec![Pauli::X, Pauli::Y, Pauli::Z]),
    ]
}

/// Least-squares slope and intercept of `ln y` against `ln x`.
fn loglog_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn criterion_1_et_exactness() -> Outcome {
    let start = Instant::now();
    let lh = LogicalHamiltonian::new(0.4, -0.9, etlab_core::Complex64::new(0.3, -0.2));
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (code, kinds) in code_sets() {
        let errors = error_set(&code, &kinds).unwrap();
        let h0 = encode_logical(&code, &lh);
        let eth = make_eth(&code, &h0, &errors).unwrap();
        let memory = verify_et(&eth.hamiltonian, &h0, &code, &errors).unwrap();
        let swap = verify_et_on(
            &controlled_eth(&code, &errors, 1.0).unwrap(),
            &swap_coupling(&code, 1.0),
            &controlled_basis(&code),
            errors.extend_identity(1).errors(),
        )
        .unwrap();
        parts.push(format!("{} {memory:.1e}/{swap:.1e}", code.name()));
        worst = worst.max(memory).max(swap);
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        worst < 1e-10 && secs < 10.0,
        &format!("max residual {worst:.1e} ({}), {secs:.1}s", parts.join(", ")),
    )
}

fn criterion_2_bodyness() -> Outcome {
    let z = LogicalHamiltonian::z_rotation(1.0);
    let b3 = StabilizerCode::bitflip3();
    let p5 = StabilizerCode::perfect5();
    let e3 = error_set(&b3, &[Pauli::X]).unwrap();
    let e5 = error_set(&p5, &[Pauli::X, Pauli::Y, Pauli::Z]).unwrap();
    let got = [
        bodyness(&make_eth(&b3, &encode_logical(&b3, &z), &e3).unwrap().hamiltonian).unwrap(),
        bodyness(&make_eth(&p5, &encode_logical(&p5, &z), &e5).unwrap().hamiltonian).unwrap(),
        bodyness(&controlled_eth(&b3, &e3, 1.0).unwrap()).unwrap(),
        bodyness(&controlled_eth(&p5, &e5, 1.0).unwrap()).unwrap(),
    ];
    let css = css7_counterexample().unwrap();
    let pass = got == [3, 5, 4, 6] && css.conjugated_sign == -1 && css.naive_sum_is_zero;
    report(
        pass,
        &format!(
            "body-ness {got:?} (want [3, 5, 4, 6]), css7 sign {}, naive sum zero {}",
            css.conjugated_sign, css.naive_sum_is_zero
        ),
    )
}

fn two_qubit_flip_error(dt: f64) -> f64 {
    let (g, t) = (1.0, 2.0);
    let mut noise = NoiseModel::new();
    noise
        .add_on_qubits(2, 0..2, &PauliString::single(1, 0, Pauli::X).to_dense(), g, "X")
        .unwrap();
    let series = integrate_lindblad(
        &PureState::basis(4, 0).to_density(),
        &DenseOperator::zeros(4),
        &noise,
        &IntegrationConfig::new(dt, t),
    )
    .unwrap();
    let p = (1.0 + (-2.0 * g * t).exp()) / 2.0;
    let exact = DenseOperator::from_real_diagonal(&[p * p, p * (1.0 - p), (1.0 - p) * p, (1.0 - p) * (1.0 - p)]);
    series.final_state().as_operator().max_abs_diff(&exact)
}

fn criterion_3_analytic_dynamics() -> Outcome {
    let g = 0.5;
    let t_final = 2.0 / g;
    let noise = NoiseModel::new()
        .with(PauliString::single(1, 0, Pauli::X).to_dense(), g, "X")
        .unwrap();
    let dt = etlab_core::dynamics::default_dt(0.0, g);
    let cfg = IntegrationConfig::new(dt, t_final);
    let stride = cfg.steps().len() / 10;
    let series = integrate_lindblad(
        &PureState::basis(2, 0).to_density(),
        &DenseOperator::zeros(2),
        &noise,
        &cfg.with_stride(stride),
    )
    .unwrap();
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for (t, rho) in series.times.iter().zip(&series.states).skip(1) {
        let p0 = rho.as_matrix()[(0, 0)].re;
        worst = worst.max((p0 - (1.0 + (-2.0 * g * t).exp()) / 2.0).abs());
        points += 1;
    }
    let ratio = two_qubit_flip_error(0.2) / two_qubit_flip_error(0.1);
    report(
        points >= 10 && worst < 1e-6 && ratio >= 12.0,
        &format!("{points} time points, max |ΔP₀| {worst:.1e}; dt-halving error ratio {ratio:.1}"),
    )
}

fn criterion_4_fig1a_scaling() -> Outcome {
    let start = Instant::now();
    let omega = 1.0;
    let tau = PI / omega;
    let opts = SweepOptions::new(Method::Lindblad);
    let scenarios = fig1a_scenarios(true);
    let prepare = |label: &str| {
        scenarios
            .iter()
            .find(|s| s.label == label)
            .unwrap()
            .prepare(omega)
            .unwrap()
    };
    let single = prepare("single");
    let eth = prepare("bitflip3_eth");

    let gt = log_grid(1e-3, 1e-2, 11);
    let infidelity = |p: &etlab_core::experiments::Problem| -> Vec<f64> {
        gt.iter().map(|x| 1.0 - p.solve(x / tau, &opts).unwrap().0).collect()
    };
    let (slope_i, _) = loglog_fit(&gt, &infidelity(&single));
    let eth_inf = infidelity(&eth);
    let (slope_iv, intercept_iv) = loglog_fit(&gt, &eth_inf);
    // p_L = A·(γτ)², read off at the fitted slope and with the slope pinned to 2
    let prefactor_fit = intercept_iv.exp();
    let prefactor = eth_inf.iter().zip(&gt).map(|(i, x)| i / (x * x)).sum::<f64>() / gt.len() as f64;

    let mut match_worst: f64 = 0.0;
    for x in log_grid(1e-3, 2e-2, 12) {
        let gamma = x / tau;
        let logical = eth.solve(gamma, &opts).unwrap().0;
        let reduced = single.solve(3.0 * gamma * gamma * tau, &opts).unwrap().0;
        match_worst = match_worst.max((logical - reduced).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    let checks = [
        (slope_i - 1.0).abs() <= 0.1,
        (slope_iv - 2.0).abs() <= 0.1,
        (prefactor - 3.0).abs() <= 0.9,
        match_worst <= 0.01,
        secs < 120.0,
    ];
    report(
        checks.iter().all(|&c| c),
        &format!(
            "slope(i) {slope_i:.3}, slope(iv) {slope_iv:.3}, prefactor(iv) {prefactor:.3} \
             (fit intercept {prefactor_fit:.3}, want 3 ± 30%), \
             |iv − single at 3γ²τ| ≤ {match_worst:.1e}, {secs:.1}s; checks {checks:?}"
        ),
    )
}

/// Trajectory budget for the ETH controllers at one γ/ω: the ETH-5/ETH-7 gap
/// is small next to the per-trajectory spread, so it takes many samples to
/// resolve at 2 combined standard errors.
fn eth_budget(g: f64) -> usize {
    match g {
        g if g <= 0.02 => 100_000,
        g if g <= 0.05 => 20_000,
        _ => 10_000,
    }
}

fn criterion_5_fig1b_ordering() -> Outcome {
    let start = Instant::now();
    let omega = 1.0;
    let scenarios = fig1b_scenarios();
    let problems: Vec<_> = scenarios
        .iter()
        .map(|s| (s.label.as_str(), s.prepare(omega).unwrap()))
        .collect();
    let mut lines = Vec::new();
    let mut pass = true;
    for g in [0.02, 0.05, 0.1] {
        let mut est = std::collections::HashMap::new();
        for (label, problem) in &problems {
            let n = if label.starts_with("eth") { eth_budget(g) } else { 4000 };
            let opts = SweepOptions::new(Method::Mc).with_traj(n);
            est.insert(*label, problem.solve(g * omega, &opts).unwrap());
        }
        let (p5, p7, ps) = (est["eth5"], est["eth7"], est["single_controller"]);
        let worst_non = if est["nonet5"].0 >= est["nonet7"].0 {
            est["nonet5"]
        } else {
            est["nonet7"]
        };
        let separated = |a: (f64, f64), b: (f64, f64)| a.0 - b.0 > 2.0 * (a.1 * a.1 + b.1 * b.1).sqrt();
        let ok = separated(p5, p7) && separated(p7, ps) && separated(ps, worst_non);
        pass &= ok;
        let fmt = |x: (f64, f64)| format!("{:.5}±{:.1e}", x.0, x.1);
        lines.push(format!(
            "γ/ω={g}: eth5 {} > eth7 {} > single {} > max(non-ET) {} [{}]",
            fmt(p5),
            fmt(p7),
            fmt(ps),
            fmt(worst_non),
            if ok { "ok" } else { "violated" }
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    report(pass && secs < 900.0, &format!("{}; {secs:.0}s", lines.join("; ")))
}

fn criterion_6_mc_lindblad_agreement() -> Outcome {
    let omega = 1.0;
    let eth5 = fig1b_scenarios()
        .into_iter()
        .find(|s| s.label == "eth5")
        .unwrap()
        .prepare(omega)
        .unwrap();
    let mut worst: f64 = 0.0;
    let mut worst_at = String::new();
    let mut failures = Vec::new();
    let grid = default_gamma_grid();
    for &g in &grid {
        let (pl, _) = eth5.solve(g * omega, &SweepOptions::new(Method::Lindblad)).unwrap();
        // enough trajectories to expect several failures, so the sample
        // standard error is informative
        let n = 2000usize.max((8.0 / (1.0 - pl)).ceil() as usize);
        let (pm, se) = eth5
            .solve(g * omega, &SweepOptions::new(Method::Mc).with_traj(n))
            .unwrap();
        let z = if se > 0.0 {
            (pm - pl).abs() / se
        } else if pm == pl {
            0.0
        } else {
            f64::INFINITY
        };
        if z > worst {
            worst = z;
            worst_at = format!("γ/ω={g:.4}, N={n}: MC {pm:.6}±{se:.1e} vs {pl:.6}");
        }
        if z > 4.0 {
            failures.push(format!("γ/ω={g:.4}: MC {pm:.6}±{se:.1e} vs {pl:.6}"));
        }
    }
    report(
        failures.is_empty(),
        &format!(
            "{} grid points, worst |ΔP|/stderr {worst:.2} at {worst_at}; failing: [{}]",
            grid.len(),
            failures.join("; ")
        ),
    )
}

fn criterion_7_perturbative_formulas() -> Outcome {
    let params = |n, g: f64, d: f64, k| PerturbativeParams::new(n, g, 1.0, d, k).unwrap();
    let rate = [
        effective_rate(3.7, 11.0, 1) == 3.7,
        effective_rate(1.0, 10.0, 3) == 0.01,
        effective_rate(2.0, 20.0, 2) == 0.2,
    ];
    let e = effective_error_prob(&params(3, 1e-3, 10.0, 3)).unwrap();
    let e1 = effective_error_prob(&params(4, 0.05, 10.0, 1)).unwrap();
    let prob = [
        (e.p_prime - 0.03).abs() <= 1e-12,
        (e1.p_prime - 4.0 * 0.05 * 0.05).abs() <= 1e-12,
        (e.p_prime - e.p_prime_scaled).abs() <= 1e-12,
        (e1.p_prime - e1.p_prime_scaled).abs() <= 1e-12,
    ];
    let even = [
        !breakeven(&params(3, 1e-4, 10.0, 3)).unwrap(),
        breakeven(&params(3, 1e-6, 10.0, 3)).unwrap(),
        breakeven(&params(7, 0.0, 4.0, 4)).unwrap(),
    ];
    let pass = rate.iter().chain(&prob).chain(&even).all(|&c| c);
    report(
        pass,
        &format!(
            "rates {rate:?}, p′ = {:e} (closed forms differ by {:.1e}), breakeven {even:?}",
            e.p_prime,
            (e.p_prime - e.p_prime_scaled).abs()
        ),
    )
}

fn criterion_8_recovery() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for (code, kinds) in code_sets() {
        let errors = error_set(&code, &kinds).unwrap();
        let channel = Recovery::new(&code, &errors).unwrap();
        for k in 0..20 {
            let psi = sample_logical(&code, k).unwrap();
            for e in errors.errors() {
                let f = fidelity(&psi, &channel.apply(&e.apply(&psi).unwrap().to_density()).unwrap()).unwrap();
                worst = worst.max((1.0 - f).abs());
                cases += 1;
            }
        }
    }
    let b = StabilizerCode::bitflip3();
    let out = Recovery::new(&b, &error_set(&b, &[Pauli::X]).unwrap())
        .unwrap()
        .apply(&PureState::basis(8, 0b011).to_density())
        .unwrap();
    let mis = out.max_abs_diff(&PureState::basis(8, 0b111).to_density());
    report(
        worst < 1e-10 && mis == 0.0,
        &format!("{cases} error/state pairs, max 1 − F {worst:.1e}; |011⟩ → |111⟩ deviation {mis:.1e}"),
    )
}

fn criterion_9_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_etlab"))
            .args(["sweep", "fig1a", "--seed", "42", "--out", out])
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        fs::read(dir.path().join(out).join("fig1a.csv")).unwrap()
    };
    let a = run("first");
    let b = run("second");
    report(
        a == b && !a.is_empty(),
        &format!("two runs, {} bytes each, identical: {}", a.len(), a == b),
    )
}
