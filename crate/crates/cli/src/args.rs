use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{ConfigFile, ExperimentKind, MethodName};

#[derive(Debug, Parser)]
#[command(name = "etlab", version, about = "Error-transparent Hamiltonians: construction, checks and open-system sweeps")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the invariant suite and print a summary table.
    Verify,
    /// Sweep the decoherence rate and write CSV (and optionally SVG).
    Sweep {
        #[arg(value_enum)]
        figure: Figure,
        #[command(flatten)]
        opts: SweepArgs,
    },
    /// Inspect constructed Hamiltonians.
    Eth {
        #[command(subcommand)]
        action: EthCommand,
    },
    /// Evaluate the perturbative scaling estimates.
    Perturbative(PerturbativeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig1a,
    Fig1b,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Lindblad,
    Mc,
}

#[derive(Debug, Default, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Trajectories per grid point.
    #[arg(long)]
    pub traj: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Also write an SVG plot.
    #[arg(long)]
    pub plot: bool,
    /// Smallest nonzero γ/ω.
    #[arg(long)]
    pub gamma_min: Option<f64>,
    #[arg(long)]
    pub gamma_max: Option<f64>,
    /// Log-spaced points between min and max (γ = 0 is always added).
    #[arg(long)]
    pub gamma_points: Option<usize>,
    #[arg(long)]
    pub omega: Option<f64>,
    /// Fixed integration step.
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum EthCommand {
    /// Body-ness and transparency report for one code.
    Inspect {
        /// bitflip3, perfect5 or steane7
        #[arg(long)]
        code: Option<String>,
    },
}

#[derive(Debug, Default, Args)]
pub struct PerturbativeArgs {
    /// Physical qubits.
    #[arg(long)]
    pub n: Option<usize>,
    /// γ/ω
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Δ/ω
    #[arg(long)]
    pub delta: Option<f64>,
    /// Target body-ness.
    #[arg(long)]
    pub k: Option<u32>,
}

impl Cli {
    /// Overlays the command line onto the file contents.
    pub fn merge(self, mut file: ConfigFile) -> ConfigFile {
        let Some(command) = self.command else {
            return file;
        };
        match command {
            Command::Verify => file.experiment = Some(ExperimentKind::Verify),
            Command::Sweep { figure, opts } => {
                file.experiment = Some(match figure {
                    Figure::Fig1a => ExperimentKind::Fig1a,
                    Figure::Fig1b => ExperimentKind::Fig1b,
                });
                if let Some(m) = opts.method {
                    file.method = Some(match m {
                        MethodArg::Lindblad => MethodName::Lindblad,
                        MethodArg::Mc => MethodName::Mc,
                    });
                }
                file.n_traj = opts.traj.or(file.n_traj);
                file.seed = opts.seed.or(file.seed);
                file.output_dir = opts.out.or(file.output_dir);
                file.omega = opts.omega.or(file.omega);
                file.dt = opts.dt.or(file.dt);
                if opts.plot {
                    file.emit_plot = Some(true);
                }
                if opts.gamma_min.is_some() || opts.gamma_max.is_some() || opts.gamma_points.is_some() {
                    let mut grid = file.gamma_grid.take().unwrap_or_default();
                    grid.values = None;
                    grid.min = opts.gamma_min.or(grid.min);
                    grid.max = opts.gamma_max.or(grid.max);
                    grid.points = opts.gamma_points.or(grid.points);
                    file.gamma_grid = Some(grid);
                }
            }
            Command::Eth {
                action: EthCommand::Inspect { code },
            } => {
                file.experiment = Some(ExperimentKind::EthInspect);
                file.code = code.or(file.code);
            }
            Command::Perturbative(p) => {
                file.experiment = Some(ExperimentKind::Perturbative);
                let mut pf = file.perturbative.take().unwrap_or_default();
                pf.n = p.n.or(pf.n);
                pf.gamma = p.gamma.or(pf.gamma);
                pf.delta = p.delta.or(pf.delta);
                pf.k = p.k.or(pf.k);
                file.perturbative = Some(pf);
            }
        }
        file
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    use super::*;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_override_file() {
        let cli = Cli::try_parse_from(["etlab", "sweep", "fig1b", "--method", "lindblad", "--seed", "7", "--gamma-points", "3"]).unwrap();
        let file = ConfigFile::parse("experiment = \"fig1a\"\nseed = 1\nn_traj = 50\n[gamma_grid]\nvalues = [0.1]").unwrap();
        let merged = cli.merge(file);
        assert_eq!(merged.experiment, Some(ExperimentKind::Fig1b));
        assert_eq!(merged.seed, Some(7));
        assert_eq!(merged.n_traj, Some(50));
        assert_eq!(merged.method, Some(MethodName::Lindblad));
        let grid = merged.gamma_grid.unwrap();
        assert_eq!(grid.values, None);
        assert_eq!(grid.points, Some(3));
    }

    #[test]
    fn no_command_keeps_file() {
        let cli = Cli::try_parse_from(["etlab", "--config", "x.toml"]).unwrap();
        let file = ConfigFile::parse("experiment = \"verify\"").unwrap();
        assert_eq!(cli.merge(file.clone()), file);
    }
}
