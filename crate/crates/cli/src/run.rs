use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use etlab_core::codes::{error_set, StabilizerCode};
use etlab_core::eth::{controlled_report, css7_counterexample, eth_report, LogicalHamiltonian};
use etlab_core::experiments::{
    breakeven, effective_error_prob, effective_rate, fig1a_sweep, fig1b_sweep, predicted_logical_rate,
    PerturbativeParams, SweepOptions, SweepResult,
};
use etlab_core::qcore::Pauli;
use thiserror::Error;

use crate::args::Cli;
use crate::config::{ConfigError, ConfigFile, ExperimentKind, RunConfig};
use crate::output::{emit_csv, OutputError};
use crate::plot::emit_plot;
use crate::verify::{render_table, run_checks};

/// Residuals above this fail `eth inspect`.
pub const INSPECT_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Input(etlab_core::Error),
    #[error("numerical failure: {0}")]
    Numerical(etlab_core::Error),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("cannot create output directory {path}: {source}")]
    OutputDir { path: PathBuf, source: io::Error },
    #[error("invariant check failed: {0}")]
    Invariant(String),
    #[error("{0}")]
    Usage(String),
}

impl RunError {
    /// 1 for configuration and I/O problems, 2 for numerical failures,
    /// 3 for failed invariants.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) | RunError::Input(_) | RunError::Output(_) | RunError::OutputDir { .. } | RunError::Usage(_) => 1,
            RunError::Numerical(_) => 2,
            RunError::Invariant(_) => 3,
        }
    }
}

impl From<etlab_core::Error> for RunError {
    fn from(e: etlab_core::Error) -> Self {
        match e.root() {
            etlab_core::Error::InvalidParameter(_) | etlab_core::Error::ParsePauli(_) => RunError::Input(e),
            _ => RunError::Numerical(e),
        }
    }
}

/// Loads `--config` (if any), overlays the flags and resolves defaults.
pub fn resolve_cli(cli: Cli) -> Result<RunConfig, RunError> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    Ok(RunConfig::resolve(cli.merge(file))?)
}

pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<(), RunError> {
    match config.experiment {
        ExperimentKind::Fig1a | ExperimentKind::Fig1b => sweep(config, out),
        ExperimentKind::Verify => verify(out),
        ExperimentKind::EthInspect => inspect(config, out),
        ExperimentKind::Perturbative => perturbative(config, out),
    }
}

fn io_err(e: io::Error) -> RunError {
    RunError::Output(OutputError::Write {
        path: PathBuf::from("<stdout>"),
        source: e,
    })
}

pub fn sweep_result(config: &RunConfig) -> Result<SweepResult, RunError> {
    let mut opts = SweepOptions::new(config.method).with_traj(config.n_traj).with_seed(config.seed);
    opts.dt = config.dt_override;
    let gammas: Vec<f64> = config.gamma_grid.iter().map(|g| g * config.omega).collect();
    let result = match config.experiment {
        ExperimentKind::Fig1a => fig1a_sweep(&gammas, config.omega, &opts)?,
        ExperimentKind::Fig1b => fig1b_sweep(&gammas, config.omega, &opts)?,
        other => return Err(RunError::Usage(format!("{} is not a sweep", other.as_str()))),
    };
    Ok(result)
}

fn sweep(config: &RunConfig, out: &mut dyn Write) -> Result<(), RunError> {
    fs::create_dir_all(&config.output_dir).map_err(|source| RunError::OutputDir {
        path: config.output_dir.clone(),
        source,
    })?;
    let result = sweep_result(config)?;
    let name = config.experiment.as_str();
    let csv_path = config.output_dir.join(format!("{name}.csv"));
    emit_csv(&result, &csv_path)?;
    writeln!(out, "wrote {} ({} rows, method {})", csv_path.display(), result.rows.len(), config.method).map_err(io_err)?;
    if config.emit_plot {
        let svg_path = config.output_dir.join(format!("{name}.svg"));
        emit_plot(&result, &svg_path, &format!("{name} ({})", config.method))?;
        writeln!(out, "wrote {}", svg_path.display()).map_err(io_err)?;
    }
    for s in result.scenarios() {
        let series = result.series(s);
        let last = series.last().expect("scenario has rows");
        writeln!(
            out,
            "  {s:<18} P(γ/ω = {:.4}) = {:.6} ± {:.1e}",
            last.gamma_over_omega, last.probability, last.stderr
        )
        .map_err(io_err)?;
    }
    Ok(())
}

fn verify(out: &mut dyn Write) -> Result<(), RunError> {
    let results = run_checks();
    out.write_all(render_table(&results).as_bytes()).map_err(io_err)?;
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(RunError::Invariant(failed.join(", ")))
    }
}

fn default_kinds(code: &StabilizerCode) -> Vec<Pauli> {
    if code.name() == "bitflip3" {
        vec![Pauli::X]
    } else {
        vec![Pauli::X, Pauli::Y, Pauli::Z]
    }
}

fn inspect(config: &RunConfig, out: &mut dyn Write) -> Result<(), RunError> {
    let name = config.code.as_deref().unwrap_or_default();
    let code = StabilizerCode::by_name(name)
        .ok_or_else(|| RunError::Usage(format!("unknown code `{name}` (bitflip3, perfect5, steane7)")))?;
    let kinds = default_kinds(&code);
    let errors = error_set(&code, &kinds)?;
    let gens: Vec<String> = code.generators().iter().map(|g| g.to_string()).collect();
    let kinds_str: String = kinds.iter().map(|k| format!("{k:?}")).collect();
    let mut lines = vec![
        format!("code {}: {} physical qubits", code.name(), code.n()),
        format!("  generators  {}", gens.join(" ")),
        format!("  logical X   {}", code.logical_x()),
        format!("  logical Z   {}", code.logical_z()),
        format!("  errors      {} single-qubit {kinds_str}", errors.len()),
    ];
    let memory = eth_report(&code, &LogicalHamiltonian::z_rotation(config.omega), &errors)?;
    lines.push(format!(
        "memory ETH (ωZ_L): body-ness {}, {} Pauli terms, max residual {:.1e}",
        memory.bodyness, memory.term_count, memory.max_residual
    ));
    let swap = controlled_report(&code, &errors, config.omega)?;
    lines.push(format!(
        "controlled swap ETH: body-ness {}, {} Pauli terms, max residual {:.1e}",
        swap.bodyness, swap.term_count, swap.max_residual
    ));
    if code.name() == "steane7" {
        let c = css7_counterexample()?;
        lines.push(format!(
            "weight-3 logical X IIIIXXX under Z on qubit 5: sign {}, naive ETH sum vanishes: {}",
            c.conjugated_sign, c.naive_sum_is_zero
        ));
    }
    for l in lines {
        writeln!(out, "{l}").map_err(io_err)?;
    }
    let worst = memory.max_residual.max(swap.max_residual);
    if worst > INSPECT_RESIDUAL_TOL {
        return Err(RunError::Invariant(format!("transparency residual {worst:.3e}")));
    }
    Ok(())
}

fn perturbative(config: &RunConfig, out: &mut dyn Write) -> Result<(), RunError> {
    let s = config.perturbative.as_ref().ok_or(ConfigError::Missing {
        key: "perturbative",
        experiment: "perturbative",
    })?;
    let omega = config.omega;
    let params = PerturbativeParams::new(s.n, s.gamma_over_omega * omega, omega, s.delta_over_omega * omega, s.k)?;
    let probs = effective_error_prob(&params)?;
    let tau = PI / omega;
    let lines = [
        format!("n = {}, γ/ω = {}, Δ/ω = {}, k = {}", s.n, s.gamma_over_omega, s.delta_over_omega, s.k),
        format!("effective rate ω_k     {:.6e}", effective_rate(omega, params.delta, s.k)),
        format!("bare error p = γ/ω     {:.6e}", probs.p),
        format!("effective error p′     {:.6e}", probs.p_prime),
        format!("  via n·p²(Δ/ω)^(2k−2) {:.6e}", probs.p_prime_scaled),
        format!("ETH beneficial         {}", breakeven(&params)?),
        format!("logical rate 3γ²τ      {:.6e} (τ = π/ω)", predicted_logical_rate(params.gamma, tau)?),
    ];
    for l in lines {
        writeln!(out, "{l}").map_err(io_err)?;
    }
    if !params.is_perturbative() {
        writeln!(out, "warning: ω ≥ Δ, outside the perturbative regime").map_err(io_err)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ConfigFile;

    fn config(text: &str) -> RunConfig {
        RunConfig::resolve(ConfigFile::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn exit_codes() {
        assert_eq!(RunError::from(etlab_core::Error::TraceDrift { trace: 2.0, time: 1.0 }).exit_code(), 2);
        assert_eq!(RunError::from(etlab_core::Error::InvalidParameter("x".into())).exit_code(), 1);
        assert_eq!(RunError::Invariant("x".into()).exit_code(), 3);
        let wrapped = etlab_core::Error::Scenario {
            scenario: "eth5".into(),
            gamma: 0.1,
            source: Box::new(etlab_core::Error::ZeroJumpRate(0.0)),
        };
        let e = RunError::from(wrapped);
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("eth5"));
    }

    #[test]
    fn perturbative_report() {
        let c = config("experiment = \"perturbative\"\n[perturbative]\nn = 3\ngamma = 1e-3\ndelta = 10.0\nk = 3");
        let mut buf = Vec::new();
        run(&c, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("effective error p′     3.000000e-2"), "{text}");
        assert!(text.contains("ETH beneficial         false"));
    }

    #[test]
    fn inspect_bitflip() {
        let c = config("experiment = \"eth-inspect\"\ncode = \"bitflip3\"");
        let mut buf = Vec::new();
        run(&c, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("memory ETH (ωZ_L): body-ness 3"), "{text}");
        assert!(text.contains("controlled swap ETH: body-ness 4"), "{text}");
    }

    #[test]
    fn inspect_unknown_code() {
        let c = config("experiment = \"eth-inspect\"\ncode = \"golay\"");
        assert_eq!(run(&c, &mut Vec::new()).unwrap_err().exit_code(), 1);
    }
}
