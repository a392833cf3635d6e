//! Batch front end for movable-antenna trajectory design and evaluation.
//!
//! One subcommand per experiment. Every run is deterministic for a fixed
//! config and seed; each JSON report embeds the fully resolved
//! configuration so artifacts are self-describing. Exit codes: 0 success,
//! 2 config error, 3 solver failure, 4 I/O error, with a machine-readable
//! error JSON on standard error.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};

use crate::config::{CliError, RawSettings};

#[derive(Parser)]
#[command(name = "masense", version, about = "Movable-antenna trajectory design and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand. Precedence: defaults, then the config
/// file, then these flags.
#[derive(Args)]
struct CommonOpts {
    /// Config file: flat `key = value` lines or a JSON object.
    #[arg(long, value_name = "PATH")]
    config: Option<String>,
    /// Output path; sidecar artifacts derive their names from it.
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
    /// Data artifact format.
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Master seed for randomized trials.
    #[arg(long)]
    seed: Option<u64>,
    /// Carrier wavelength in meters.
    #[arg(long, allow_negative_numbers = true)]
    wavelength: Option<f64>,
    /// Snapshot interval in seconds.
    #[arg(long, allow_negative_numbers = true)]
    ts: Option<f64>,
    /// Number of snapshots.
    #[arg(long)]
    n: Option<usize>,
    /// Antenna speed bound in meters per second.
    #[arg(long, allow_negative_numbers = true)]
    vmax: Option<f64>,
    /// Movement region: `A` for a segment, `AXxAY` for a rectangle (meters).
    #[arg(long)]
    region: Option<String>,
    /// Average SNR in dB.
    #[arg(long, allow_negative_numbers = true)]
    snr_db: Option<f64>,
    /// Fixed-array element count for comparisons.
    #[arg(long)]
    m_fpa: Option<usize>,
    /// Polar angle of arrival in degrees.
    #[arg(long, allow_negative_numbers = true)]
    theta_deg: Option<f64>,
    /// Azimuth angle of arrival in degrees (2D geometries).
    #[arg(long, allow_negative_numbers = true)]
    phi_deg: Option<f64>,
}

impl CommonOpts {
    fn into_raw(self) -> (Option<String>, RawSettings) {
        let raw = RawSettings {
            wavelength: self.wavelength,
            ts: self.ts,
            n: self.n,
            vmax: self.vmax,
            region: self.region,
            snr_db: self.snr_db,
            seed: self.seed,
            m_fpa: self.m_fpa,
            theta_deg: self.theta_deg,
            phi_deg: self.phi_deg,
            out: self.out,
            format: self.format,
            ..RawSettings::default()
        };
        (self.config, raw)
    }
}

/// Alternating-designer controls (rectangle regions).
#[derive(Args)]
struct DesignerOpts {
    /// Adjacent velocity columns sharing one value during design.
    #[arg(long)]
    group_size: Option<usize>,
    /// Outer-loop improvement tolerance in square meters.
    #[arg(long, allow_negative_numbers = true)]
    eps_outer: Option<f64>,
    /// x-row inner-loop improvement tolerance in square meters.
    #[arg(long, allow_negative_numbers = true)]
    eps_x: Option<f64>,
    /// y-row inner-loop improvement tolerance in square meters.
    #[arg(long, allow_negative_numbers = true)]
    eps_y: Option<f64>,
    /// Outer alternation cap.
    #[arg(long)]
    max_outer: Option<usize>,
    /// Inner loop cap per axis pass.
    #[arg(long)]
    max_inner: Option<usize>,
    /// Conic solver convergence tolerance.
    #[arg(long, allow_negative_numbers = true)]
    solver_tol: Option<f64>,
    /// Designer starting trajectory.
    #[arg(long, value_parser = ["circle", "diagonal"])]
    init: Option<String>,
}

impl DesignerOpts {
    fn apply(self, raw: &mut RawSettings) {
        raw.group_size = self.group_size.or(raw.group_size.take());
        raw.eps_outer = self.eps_outer.or(raw.eps_outer.take());
        raw.eps_x = self.eps_x.or(raw.eps_x.take());
        raw.eps_y = self.eps_y.or(raw.eps_y.take());
        raw.max_outer = self.max_outer.or(raw.max_outer.take());
        raw.max_inner = self.max_inner.or(raw.max_inner.take());
        raw.solver_tol = self.solver_tol.or(raw.solver_tol.take());
        raw.init = self.init.or(raw.init.take());
    }
}

/// Maximum-likelihood search and Monte-Carlo controls.
#[derive(Args)]
struct EstimatorOpts {
    /// Monte-Carlo trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Coarse search grid step in u-units.
    #[arg(long, allow_negative_numbers = true)]
    grid_step: Option<f64>,
    /// Tenfold refinement levels after the coarse pass.
    #[arg(long)]
    refine_levels: Option<usize>,
}

impl EstimatorOpts {
    fn apply(self, raw: &mut RawSettings) {
        raw.trials = self.trials.or(raw.trials.take());
        raw.grid_step = self.grid_step.or(raw.grid_step.take());
        raw.refine_levels = self.refine_levels.or(raw.refine_levels.take());
    }
}

/// Which trajectory the command evaluates.
#[derive(Args)]
struct SourceOpts {
    /// proposed (optimal design), forward, bounce (segment benchmarks),
    /// circle, upa (rectangle benchmarks).
    #[arg(long, value_parser = ["proposed", "forward", "bounce", "circle", "upa"])]
    traj: Option<String>,
    /// Trajectory CSV produced by optimize1d/optimize2d; overrides --traj.
    #[arg(long, value_name = "PATH")]
    traj_file: Option<String>,
}

impl SourceOpts {
    fn apply(self, raw: &mut RawSettings) {
        raw.traj = self.traj.or(raw.traj.take());
        raw.traj_file = self.traj_file.or(raw.traj_file.take());
    }
}

#[derive(Subcommand)]
enum Command {
    /// Design the bound-optimal 1D trajectory and report its bound.
    Optimize1d {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the alternating 2D designer; emits trajectory and ascent trace.
    Optimize2d {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        designer: DesignerOpts,
    },
    /// Tabulate bounds (and optional MSE) against sensing time or SNR.
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        estimator: EstimatorOpts,
        /// Sweep variable.
        #[arg(long, value_parser = ["time", "snr"])]
        sweep: Option<String>,
        /// Comma-separated sweep points (seconds for time, dB for snr).
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
    },
    /// Monte-Carlo maximum-likelihood trials on a chosen trajectory.
    Simulate {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        estimator: EstimatorOpts,
        #[command(flatten)]
        source: SourceOpts,
        #[command(flatten)]
        designer: DesignerOpts,
    },
    /// Correlation pattern of a chosen trajectory around the true angle.
    Correlation {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        source: SourceOpts,
        #[command(flatten)]
        designer: DesignerOpts,
        /// Probe grid spacing in u-units.
        #[arg(long, allow_negative_numbers = true)]
        probe_step: Option<f64>,
        /// Probe half-span around the true angle in u-units.
        #[arg(long, allow_negative_numbers = true)]
        probe_span: Option<f64>,
    },
    /// Movable-vs-fixed crossover time and its numerical verification.
    Crossover {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Bound report for a chosen trajectory.
    Crb {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        source: SourceOpts,
        #[command(flatten)]
        designer: DesignerOpts,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Optimize1d { common } => {
            let (path, raw) = common.into_raw();
            commands::optimize1d(&config::resolve("optimize1d", path, raw)?)
        }
        Command::Optimize2d { common, designer } => {
            let (path, mut raw) = common.into_raw();
            designer.apply(&mut raw);
            commands::optimize2d(&config::resolve("optimize2d", path, raw)?)
        }
        Command::Sweep { common, estimator, sweep, points } => {
            let (path, mut raw) = common.into_raw();
            estimator.apply(&mut raw);
            if sweep.is_some() {
                raw.sweep = sweep;
            }
            if points.is_some() {
                raw.points = points;
            }
            commands::sweep(&config::resolve("sweep", path, raw)?)
        }
        Command::Simulate { common, estimator, source, designer } => {
            let (path, mut raw) = common.into_raw();
            estimator.apply(&mut raw);
            source.apply(&mut raw);
            designer.apply(&mut raw);
            commands::simulate(&config::resolve("simulate", path, raw)?)
        }
        Command::Correlation { common, source, designer, probe_step, probe_span } => {
            let (path, mut raw) = common.into_raw();
            source.apply(&mut raw);
            designer.apply(&mut raw);
            if probe_step.is_some() {
                raw.probe_step = probe_step;
            }
            if probe_span.is_some() {
                raw.probe_span = probe_span;
            }
            commands::correlation(&config::resolve("correlation", path, raw)?)
        }
        Command::Crossover { common } => {
            let (path, raw) = common.into_raw();
            commands::crossover(&config::resolve("crossover", path, raw)?)
        }
        Command::Crb { common, source, designer } => {
            let (path, mut raw) = common.into_raw();
            source.apply(&mut raw);
            designer.apply(&mut raw);
            commands::crb(&config::resolve("crb", path, raw)?)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("{}", err.to_error_json());
        std::process::exit(err.exit_code());
    }
}
