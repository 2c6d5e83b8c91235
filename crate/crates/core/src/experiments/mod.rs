//! Sweep scenarios for logical memory (`fig1a`) and a logically controlled
//! excitation swap (`fig1b`), plus the perturbative scaling formulas.
//!
//! A [`ScenarioSpec`] describes one curve. [`ScenarioSpec::prepare`] compiles
//! it into a [`Problem`] once; the problem is then solved at every decoherence
//! rate of the grid with either the Lindblad integrator or trajectories.

mod perturbative;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::codes::{error_set, ErrorSet, Recovery, StabilizerCode};
use crate::dynamics::{
    default_dt, embed_single, integrate_lindblad, lowering, mc_trajectories, raising, IntegrationConfig, NoiseModel,
    TrajectoryConfig,
};
use crate::error::{Error, Result};
use crate::eth::{controlled_eth, encode_logical, make_eth, swap_coupling, target_excited, target_ground, LogicalHamiltonian};
use crate::qcore::{evolve_unitary, DenseOperator, Pauli, PauliString, PureState};

pub use perturbative::{
    breakeven, effective_error_prob, effective_rate, predicted_logical_rate, ErrorProbabilities, PerturbativeParams,
};

/// Pre-clamp probabilities may stray this far outside `[0, 1]`.
pub const PROBABILITY_SLACK: f64 = 1e-6;

/// Fixed target-qubit excitation rate in units of `ω`.
pub const TARGET_EXCITATION_RATE: f64 = 1e-4;
/// Fixed target-qubit damping rate in units of `ω`.
pub const TARGET_DAMPING_RATE: f64 = 2e-4;

/// Default seed for trajectory runs.
pub const DEFAULT_SEED: u64 = 20_160_913;
pub const DEFAULT_TRAJECTORIES: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Lindblad,
    Mc,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Lindblad => "lindblad",
            Method::Mc => "mc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lindblad" => Ok(Method::Lindblad),
            "mc" => Ok(Method::Mc),
            other => Err(Error::InvalidParameter(format!("unknown method '{other}' (lindblad|mc)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Logical memory over one `Z_L` period.
    Fig1a,
    /// Logical controller swapping an excitation into a target qubit.
    Fig1b,
}

/// Noise on every physical controller qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControllerNoise {
    /// Jump `X`.
    BitFlip,
    /// Jump `σ₋`.
    Damping,
}

#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub label: String,
    pub figure: Figure,
    /// `None` is a single unencoded qubit.
    pub code: Option<StabilizerCode>,
    pub use_eth: bool,
    /// Error kinds the ETH is made transparent to.
    pub eth_errors: Vec<Pauli>,
    pub noise: ControllerNoise,
    /// Controller rate is `rate_factor·γ`.
    pub rate_factor: f64,
    /// Apply ideal recovery before scoring (memory scenarios only).
    pub recovery: bool,
}

impl ScenarioSpec {
    fn code(&self) -> StabilizerCode {
        self.code.clone().unwrap_or_else(StabilizerCode::bare_qubit)
    }

    /// Builds Hamiltonian, initial state, scoring observable and noise
    /// operators for frequency `omega`.
    pub fn prepare(&self, omega: f64) -> Result<Problem> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!("omega = {omega} must be > 0")));
        }
        if !(self.rate_factor >= 0.0 && self.rate_factor.is_finite()) {
            return Err(Error::InvalidParameter(format!("rate factor {} must be >= 0", self.rate_factor)));
        }
        let code = self.code();
        let n = code.n();
        let errors = || error_set(&code, &self.eth_errors);
        let controller_op = match self.noise {
            ControllerNoise::BitFlip => PauliString::single(1, 0, Pauli::X).to_dense(),
            ControllerNoise::Damping => lowering(),
        };
        match self.figure {
            Figure::Fig1a => {
                let h0 = encode_logical(&code, &LogicalHamiltonian::z_rotation(omega));
                let h = if self.use_eth { make_eth(&code, &h0, &errors()?)?.hamiltonian } else { h0 };
                let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                let psi0 = code.logical_state(s, s)?;
                let target = DenseOperator::projector(&psi0);
                let observable = if self.recovery && n > 1 {
                    let recovery_errors = error_set(&code, &[Pauli::X])?;
                    Recovery::new(&code, &recovery_errors)?.adjoint_apply(&target)?
                } else {
                    target
                };
                let controller = (0..n).map(|q| embed_single(n, q, &controller_op)).collect::<Result<_>>()?;
                Ok(Problem {
                    h,
                    psi0,
                    observable,
                    t_final: PI / omega,
                    omega,
                    rate_factor: self.rate_factor,
                    controller,
                    fixed: NoiseModel::new(),
                })
            }
            Figure::Fig1b => {
                let h = if self.use_eth {
                    controlled_eth(&code, &errors()?, omega)?
                } else {
                    swap_coupling(&code, omega)
                };
                let psi0 = code.codeword1().kron(&target_ground());
                let observable = DenseOperator::identity(code.dim()).kron(&DenseOperator::projector(&target_excited()));
                let controller = (0..n).map(|q| embed_single(n + 1, q, &controller_op)).collect::<Result<_>>()?;
                let mut fixed = NoiseModel::new();
                fixed.add(embed_single(n + 1, n, &raising())?, TARGET_EXCITATION_RATE * omega, "target_excite")?;
                fixed.add(embed_single(n + 1, n, &lowering())?, TARGET_DAMPING_RATE * omega, "target_damp")?;
                Ok(Problem {
                    h,
                    psi0,
                    observable,
                    t_final: PI / (2.0 * omega),
                    omega,
                    rate_factor: self.rate_factor,
                    controller,
                    fixed,
                })
            }
        }
    }
}

/// A scenario compiled for one `ω`, still parametric in `γ`.
#[derive(Debug, Clone)]
pub struct Problem {
    pub h: DenseOperator,
    pub psi0: PureState,
    /// Success probability is `⟨observable⟩` at `t_final`.
    pub observable: DenseOperator,
    pub t_final: f64,
    pub omega: f64,
    rate_factor: f64,
    controller: Vec<DenseOperator>,
    fixed: NoiseModel,
}

impl Problem {
    /// Controller channels at rate `rate_factor·γ` followed by the fixed ones.
    pub fn noise(&self, gamma: f64) -> Result<NoiseModel> {
        let mut noise = NoiseModel::new();
        for (q, l) in self.controller.iter().enumerate() {
            noise.add(l.clone(), self.rate_factor * gamma, format!("controller{}", q + 1))?;
        }
        for ch in self.fixed.channels() {
            noise.add(ch.jump.clone(), ch.rate, ch.label.clone())?;
        }
        Ok(noise)
    }

    /// Success probability and its standard error at rate `gamma`.
    pub fn solve(&self, gamma: f64, opts: &SweepOptions) -> Result<(f64, f64)> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma = {gamma} must be >= 0")));
        }
        let noise = self.noise(gamma)?;
        let dt = opts.dt.unwrap_or_else(|| default_dt(self.omega, noise.max_rate()));
        let (p, se) = match opts.method {
            Method::Lindblad => {
                let series = integrate_lindblad(
                    &self.psi0.to_density(),
                    &self.h,
                    &noise,
                    &IntegrationConfig::new(dt, self.t_final),
                )?;
                (series.final_state().expectation(&self.observable)?.re, 0.0)
            }
            Method::Mc => {
                let cfg = TrajectoryConfig::new(opts.n_traj, opts.seed, dt);
                let res = mc_trajectories(&self.psi0, &self.h, &noise, self.t_final, std::slice::from_ref(&self.observable), &cfg)?;
                (res.means[0], res.stderrs[0])
            }
        };
        Ok((clamp_probability(p)?, se))
    }
}

/// Clamps into `[0, 1]`, failing on excursions beyond [`PROBABILITY_SLACK`].
pub fn clamp_probability(p: f64) -> Result<f64> {
    if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    Ok(p.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub method: Method,
    pub n_traj: usize,
    /// Every grid point reuses this seed, so curves share random numbers.
    pub seed: u64,
    /// Overrides the default step `(1/2000)·min(π/ω, 1/max rate)`.
    pub dt: Option<f64>,
}

impl SweepOptions {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            n_traj: DEFAULT_TRAJECTORIES,
            seed: DEFAULT_SEED,
            dt: None,
        }
    }

    pub fn with_traj(mut self, n_traj: usize) -> Self {
        self.n_traj = n_traj;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub gamma_over_omega: f64,
    pub scenario: String,
    pub probability: f64,
    pub stderr: f64,
    pub method: Method,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Orders rows by scenario label, then by `γ/ω`.
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            a.scenario
                .cmp(&b.scenario)
                .then(a.gamma_over_omega.total_cmp(&b.gamma_over_omega))
                .then(a.method.cmp(&b.method))
        });
    }

    /// Scenario labels in first-appearance order.
    pub fn scenarios(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.scenario.as_str()) {
                out.push(&r.scenario);
            }
        }
        out
    }

    pub fn series(&self, scenario: &str) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.scenario == scenario).collect()
    }

    pub fn get(&self, scenario: &str, gamma_over_omega: f64) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.scenario == scenario && (r.gamma_over_omega - gamma_over_omega).abs() <= 1e-12 * gamma_over_omega.max(1.0))
    }
}

/// Memory scenarios, in order: a bare qubit under X noise at `γ`, the same at
/// `0.03γ`, the 3-qubit bit-flip code under the bare encoded Hamiltonian, and
/// the same under its ETH.
pub fn fig1a_scenarios(recovery: bool) -> Vec<ScenarioSpec> {
    let base = |label: &str, code: Option<StabilizerCode>, use_eth: bool, rate_factor: f64| ScenarioSpec {
        label: label.to_string(),
        figure: Figure::Fig1a,
        code,
        use_eth,
        eth_errors: vec![Pauli::X],
        noise: ControllerNoise::BitFlip,
        rate_factor,
        recovery,
    };
    vec![
        base("single", None, false, 1.0),
        base("single_slow", None, false, 0.03),
        base("bitflip3", Some(StabilizerCode::bitflip3()), false, 1.0),
        base("bitflip3_eth", Some(StabilizerCode::bitflip3()), true, 1.0),
    ]
}

/// Swap scenarios: 5- and 7-qubit controllers with and without a full
/// `{X, Y, Z}` ETH, and a single physical controller.
pub fn fig1b_scenarios() -> Vec<ScenarioSpec> {
    let base = |label: &str, code: Option<StabilizerCode>, use_eth: bool| ScenarioSpec {
        label: label.to_string(),
        figure: Figure::Fig1b,
        code,
        use_eth,
        eth_errors: vec![Pauli::X, Pauli::Y, Pauli::Z],
        noise: ControllerNoise::Damping,
        rate_factor: 1.0,
        recovery: false,
    };
    vec![
        base("eth5", Some(StabilizerCode::perfect5()), true),
        base("eth7", Some(StabilizerCode::steane7()), true),
        base("nonet5", Some(StabilizerCode::perfect5()), false),
        base("nonet7", Some(StabilizerCode::steane7()), false),
        base("single_controller", None, false),
    ]
}

/// `{0} ∪ 21 log-spaced points in [10⁻³, 10⁻¹]`, as `γ/ω`.
pub fn default_gamma_grid() -> Vec<f64> {
    let mut out = vec![0.0];
    out.extend(log_grid(1e-3, 1e-1, 21));
    out
}

/// `points` log-spaced values from `min` to `max` inclusive.
pub fn log_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let (a, b) = (min.ln(), max.ln());
            (0..points)
                .map(|i| {
                    if i == 0 {
                        min
                    } else if i + 1 == points {
                        max
                    } else {
                        (a + (b - a) * i as f64 / (points - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Solves every scenario at every rate in `gammas` (absolute rates).
pub fn run_sweep(scenarios: &[ScenarioSpec], gammas: &[f64], omega: f64, opts: &SweepOptions) -> Result<SweepResult> {
    for (i, s) in scenarios.iter().enumerate() {
        if scenarios[..i].iter().any(|o| o.label == s.label) {
            return Err(Error::InvalidParameter(format!("duplicate scenario label '{}'", s.label)));
        }
    }
    if let Some(g) = gammas.iter().find(|g| !(**g >= 0.0 && g.is_finite())) {
        return Err(Error::InvalidParameter(format!("gamma = {g} must be >= 0")));
    }
    let problems: Vec<Problem> = scenarios.iter().map(|s| s.prepare(omega)).collect::<Result<_>>()?;
    let jobs: Vec<(usize, f64)> = (0..scenarios.len())
        .flat_map(|s| gammas.iter().map(move |&g| (s, g)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(s, g)| {
            let (probability, stderr) = problems[s].solve(g, opts).map_err(|e| Error::Scenario {
                scenario: scenarios[s].label.clone(),
                gamma: g,
                source: Box::new(e),
            })?;
            Ok(SweepRow {
                gamma_over_omega: g / omega,
                scenario: scenarios[s].label.clone(),
                probability,
                stderr,
                method: opts.method,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut result = SweepResult { rows };
    result.sort();
    Ok(result)
}

pub fn fig1a_sweep(gammas: &[f64], omega: f64, opts: &SweepOptions) -> Result<SweepResult> {
    run_sweep(&fig1a_scenarios(true), gammas, omega, opts)
}

pub fn fig1b_sweep(gammas: &[f64], omega: f64, opts: &SweepOptions) -> Result<SweepResult> {
    run_sweep(&fig1b_scenarios(), gammas, omega, opts)
}

/// Largest deviation, over all errors `E` in the set and both codewords, between
/// evolving `E·E|ψ⟩` under the ETH and evolving `|ψ⟩` under the bare Hamiltonian.
/// Both sides coincide exactly because every Pauli error squares to the identity.
pub fn double_error_residual(code: &StabilizerCode, errors: &ErrorSet, lh: &LogicalHamiltonian, t: f64) -> Result<f64> {
    let h0 = encode_logical(code, lh);
    let h = make_eth(code, &h0, errors)?.hamiltonian;
    let mut worst: f64 = 0.0;
    for e in errors.errors() {
        let twice = e.mul(e)?;
        if twice != PauliString::identity(code.n()) {
            return Err(Error::InvalidParameter(format!("{e} does not square to the identity")));
        }
        for psi in code.codewords() {
            let hit = e.apply(&e.apply(psi)?)?;
            let lhs = evolve_unitary(&h, t, &hit)?;
            let rhs = evolve_unitary(&h0, t, psi)?;
            let diff = lhs.amplitudes() - rhs.amplitudes();
            worst = diff.iter().map(|z| z.norm()).fold(worst, f64::max);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lindblad() -> SweepOptions {
        SweepOptions::new(Method::Lindblad)
    }

    #[test]
    fn method_round_trip() {
        for m in [Method::Lindblad, Method::Mc] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!("exact".parse::<Method>().is_err());
    }

    #[test]
    fn grid_shape() {
        let g = default_gamma_grid();
        assert_eq!(g.len(), 22);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[1], 1e-3);
        assert_eq!(g[21], 1e-1);
        assert!((g[11] - 1e-2).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn clamping() {
        assert_eq!(clamp_probability(1.0 + 5e-7).unwrap(), 1.0);
        assert_eq!(clamp_probability(-5e-7).unwrap(), 0.0);
        assert!(clamp_probability(1.0 + 2e-6).is_err());
        assert!(clamp_probability(f64::NAN).is_err());
    }

    #[test]
    fn memory_is_perfect_without_noise() {
        let res = fig1a_sweep(&[0.0], 1.0, &lindblad()).unwrap();
        assert_eq!(res.rows.len(), 4);
        for r in &res.rows {
            assert!((r.probability - 1.0).abs() < 1e-8, "{r:?}");
            assert_eq!(r.stderr, 0.0);
        }
    }

    #[test]
    fn memory_curves_decrease() {
        let gammas = [0.0, 0.01, 0.03, 0.1];
        let res = fig1a_sweep(&gammas, 1.0, &lindblad()).unwrap();
        for s in res.scenarios() {
            let series = res.series(s);
            assert!(series.windows(2).all(|w| w[1].probability <= w[0].probability + 1e-6), "{s}");
        }
    }

    #[test]
    fn rows_sorted_by_scenario_then_gamma() {
        let res = fig1a_sweep(&[0.02, 0.0], 1.0, &lindblad().with_dt(0.01)).unwrap();
        let keys: Vec<(&str, f64)> = res.rows.iter().map(|r| (r.scenario.as_str(), r.gamma_over_omega)).collect();
        assert_eq!(keys[0], ("bitflip3", 0.0));
        assert_eq!(keys[1], ("bitflip3", 0.02));
        assert_eq!(keys.last().unwrap().0, "single_slow");
    }

    #[test]
    fn duplicate_labels_rejected() {
        let mut s = fig1a_scenarios(true);
        s.push(s[0].clone());
        assert!(run_sweep(&s, &[0.0], 1.0, &lindblad()).is_err());
    }

    #[test]
    fn swap_completes_without_controller_noise() {
        let specs: Vec<ScenarioSpec> = fig1b_scenarios()
            .into_iter()
            .filter(|s| s.label == "eth5" || s.label == "single_controller" || s.label == "nonet5")
            .collect();
        let res = run_sweep(&specs, &[0.0], 1.0, &lindblad()).unwrap();
        for r in &res.rows {
            assert!(r.probability >= 0.999 && r.probability < 1.0, "{r:?}");
        }
    }

    #[test]
    fn fig1b_problem_layout() {
        let p = fig1b_scenarios()[0].prepare(1.0).unwrap();
        assert_eq!(p.h.dim(), 64);
        let noise = p.noise(0.05).unwrap();
        assert_eq!(noise.channels().len(), 7);
        assert_eq!(noise.channels()[0].rate, 0.05);
        assert_eq!(noise.channels()[5].rate, 1e-4);
        assert_eq!(noise.channels()[6].rate, 2e-4);
        assert!((p.t_final - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn double_errors_cancel() {
        let code = StabilizerCode::bitflip3();
        let errors = error_set(&code, &[Pauli::X]).unwrap();
        let r = double_error_residual(&code, &errors, &LogicalHamiltonian::z_rotation(1.0), 0.7).unwrap();
        assert!(r < 1e-12, "{r}");
    }

    #[test]
    fn mc_sweep_is_seeded() {
        let specs = vec![fig1a_scenarios(true).remove(3)];
        let opts = SweepOptions::new(Method::Mc).with_traj(50).with_seed(9);
        let a = run_sweep(&specs, &[0.05], 1.0, &opts).unwrap();
        let b = run_sweep(&specs, &[0.05], 1.0, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows[0].method, Method::Mc);
    }
}
