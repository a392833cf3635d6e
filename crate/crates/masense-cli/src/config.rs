//! Configuration loading and resolution.
//!
//! Precedence is built-in defaults, then the optional config file, then
//! command-line flags. Config files are either flat `key = value` text or a
//! JSON object with the same keys; unknown keys are rejected so typos
//! surface instead of silently falling back to defaults.

use std::path::PathBuf;

use masense_core::estimator::MleSettings;
use masense_core::model::{Region, SensingConfig};
use masense_core::traj2d::{Init2D, ScaSettings};
use serde::Serialize;

/// Failure classified by exit code: config 2, solver 3, I/O 4.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Solver(String),
    Io(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Solver(_) => "solver",
            CliError::Io(_) => "io",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Solver(m) | CliError::Io(m) => m,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    /// Machine-readable form emitted on standard error.
    pub fn to_error_json(&self) -> String {
        serde_json::json!({ "error": { "kind": self.kind(), "message": self.message() } })
            .to_string()
    }
}

impl From<masense_core::Error> for CliError {
    fn from(err: masense_core::Error) -> Self {
        use masense_core::Error::*;
        match err {
            InvalidParameter(_) | DimensionMismatch(_) | RegimeMismatch(_)
            | RegionTooSmall(_) | SpeedInfeasible(_) => CliError::Config(err.to_string()),
            SolverFailure(_) | Degenerate(_) | SearchBudgetExceeded { .. } => {
                CliError::Solver(err.to_string())
            }
        }
    }
}

/// Everything a config file or the flags may set; `None` means "use the
/// next-lower precedence level".
#[derive(Debug, Default, Clone)]
pub struct RawSettings {
    pub wavelength: Option<f64>,
    pub ts: Option<f64>,
    pub n: Option<usize>,
    pub vmax: Option<f64>,
    pub region: Option<String>,
    pub snr_db: Option<f64>,
    pub seed: Option<u64>,
    pub m_fpa: Option<usize>,
    pub theta_deg: Option<f64>,
    pub phi_deg: Option<f64>,
    pub out: Option<String>,
    pub format: Option<String>,
    pub trials: Option<usize>,
    pub grid_step: Option<f64>,
    pub refine_levels: Option<usize>,
    pub group_size: Option<usize>,
    pub eps_outer: Option<f64>,
    pub eps_x: Option<f64>,
    pub eps_y: Option<f64>,
    pub max_outer: Option<usize>,
    pub max_inner: Option<usize>,
    pub solver_tol: Option<f64>,
    pub init: Option<String>,
    pub sweep: Option<String>,
    pub points: Option<String>,
    pub probe_step: Option<f64>,
    pub probe_span: Option<f64>,
    pub traj: Option<String>,
    pub traj_file: Option<String>,
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .parse::<f64>()
        .map_err(|_| CliError::Config(format!("config key {key}: `{value}` is not a number")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, CliError> {
    value
        .parse::<usize>()
        .map_err(|_| CliError::Config(format!("config key {key}: `{value}` is not a nonnegative integer")))
}

fn parse_u64(key: &str, value: &str) -> Result<u64, CliError> {
    value
        .parse::<u64>()
        .map_err(|_| CliError::Config(format!("config key {key}: `{value}` is not a nonnegative integer")))
}

impl RawSettings {
    /// Sets one key from its text form; keys use underscores (dashes are
    /// normalized away by the loaders).
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        match key {
            "wavelength" => self.wavelength = Some(parse_f64(key, v)?),
            "ts" => self.ts = Some(parse_f64(key, v)?),
            "n" => self.n = Some(parse_usize(key, v)?),
            "vmax" => self.vmax = Some(parse_f64(key, v)?),
            "region" => self.region = Some(v.to_string()),
            "snr_db" => self.snr_db = Some(parse_f64(key, v)?),
            "seed" => self.seed = Some(parse_u64(key, v)?),
            "m_fpa" => self.m_fpa = Some(parse_usize(key, v)?),
            "theta_deg" => self.theta_deg = Some(parse_f64(key, v)?),
            "phi_deg" => self.phi_deg = Some(parse_f64(key, v)?),
            "out" => self.out = Some(v.to_string()),
            "format" => self.format = Some(v.to_string()),
            "trials" => self.trials = Some(parse_usize(key, v)?),
            "grid_step" => self.grid_step = Some(parse_f64(key, v)?),
            "refine_levels" => self.refine_levels = Some(parse_usize(key, v)?),
            "group_size" => self.group_size = Some(parse_usize(key, v)?),
            "eps_outer" => self.eps_outer = Some(parse_f64(key, v)?),
            "eps_x" => self.eps_x = Some(parse_f64(key, v)?),
            "eps_y" => self.eps_y = Some(parse_f64(key, v)?),
            "max_outer" => self.max_outer = Some(parse_usize(key, v)?),
            "max_inner" => self.max_inner = Some(parse_usize(key, v)?),
            "solver_tol" => self.solver_tol = Some(parse_f64(key, v)?),
            "init" => self.init = Some(v.to_string()),
            "sweep" => self.sweep = Some(v.to_string()),
            "points" => self.points = Some(v.to_string()),
            "probe_step" => self.probe_step = Some(parse_f64(key, v)?),
            "probe_span" => self.probe_span = Some(parse_f64(key, v)?),
            "traj" => self.traj = Some(v.to_string()),
            "traj_file" => self.traj_file = Some(v.to_string()),
            _ => return Err(CliError::Config(format!("unknown config key: {key}"))),
        }
        Ok(())
    }

    /// Overlays `other` on top of `self`; set fields in `other` win.
    pub fn merge_from(&mut self, other: RawSettings) {
        macro_rules! take {
            ($($field:ident),* $(,)?) => {
                $( if other.$field.is_some() { self.$field = other.$field; } )*
            };
        }
        take!(
            wavelength, ts, n, vmax, region, snr_db, seed, m_fpa, theta_deg, phi_deg,
            out, format, trials, grid_step, refine_levels, group_size, eps_outer,
            eps_x, eps_y, max_outer, max_inner, solver_tol, init, sweep, points,
            probe_step, probe_span, traj, traj_file,
        );
    }
}

fn normalize_key(key: &str) -> String {
    key.trim().replace('-', "_")
}

/// Loads a config file: a JSON object when the content starts with `{`,
/// otherwise flat `key = value` lines with `#` comments.
pub fn load_file(path: &str) -> Result<RawSettings, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("read config {path}: {e}")))?;
    let mut raw = RawSettings::default();
    if text.trim_start().starts_with('{') {
        let map: serde_json::Map<String, serde_json::Value> = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config JSON: {e}")))?;
        for (key, value) in &map {
            let scalar = match value {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(x) => x.to_string(),
                serde_json::Value::Bool(b) => b.to_string(),
                _ => {
                    return Err(CliError::Config(format!("config key {key}: expected a scalar")))
                }
            };
            raw.set(&normalize_key(key), &scalar)?;
        }
    } else {
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "config line {}: expected `key = value`",
                    idx + 1
                )));
            };
            raw.set(&normalize_key(key), value.trim())?;
        }
    }
    Ok(raw)
}

fn parse_region(text: &str) -> Result<Region, CliError> {
    let t = text.trim();
    if let Some((w, h)) = t.split_once(['x', 'X']) {
        let ax = parse_f64("region width", w)?;
        let ay = parse_f64("region height", h)?;
        Ok(Region::rectangle(ax, ay))
    } else {
        Ok(Region::segment(parse_f64("region", t)?))
    }
}

/// Primary data artifact encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Time,
    Snr,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Time => "time",
            SweepKind::Snr => "snr",
        }
    }
}

/// Which trajectory a command evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajKind {
    /// Bound-optimal design: closed form on a segment, alternating designer
    /// on a rectangle.
    Proposed,
    /// Max-speed one-way sweep (segment benchmark).
    Forward,
    /// Max-speed back-and-forth sweep (segment benchmark).
    Bounce,
    /// Chord-per-snapshot circle (rectangle benchmark).
    Circle,
    /// Boustrophedon grid sweep (rectangle benchmark).
    Upa,
}

impl TrajKind {
    pub fn name(self) -> &'static str {
        match self {
            TrajKind::Proposed => "proposed",
            TrajKind::Forward => "forward",
            TrajKind::Bounce => "bounce",
            TrajKind::Circle => "circle",
            TrajKind::Upa => "upa",
        }
    }
}

/// Fully resolved run parameters with every default applied.
pub struct Resolved {
    pub command: &'static str,
    pub cfg: SensingConfig,
    pub snr_db: f64,
    pub seed: u64,
    pub m_fpa: usize,
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub grid_step: f64,
    pub refine_levels: usize,
    /// Trial count only when the user asked for one; commands that always
    /// simulate fall back to a default, sweeps add MSE columns only when set.
    pub trials_requested: Option<usize>,
    pub sca: ScaSettings,
    pub sweep: Option<SweepKind>,
    pub points: Vec<f64>,
    pub probe_step: Option<f64>,
    pub probe_span: Option<f64>,
    pub traj: TrajKind,
    pub traj_file: Option<PathBuf>,
}

impl Resolved {
    pub fn is_segment(&self) -> bool {
        matches!(self.cfg.region, Region::Segment { .. })
    }

    /// Spatial angle u = cos(theta) for the 1D geometry.
    pub fn aoa_1d(&self) -> f64 {
        self.theta_deg.to_radians().cos()
    }

    /// Spatial angles (u, v) = (sin(theta)cos(phi), cos(theta)) for 2D.
    pub fn aoa_2d(&self) -> (f64, f64) {
        let theta = self.theta_deg.to_radians();
        let phi = self.phi_deg.to_radians();
        (theta.sin() * phi.cos(), theta.cos())
    }

    pub fn mle_settings(&self) -> MleSettings {
        MleSettings {
            coarse_grid_step: self.grid_step,
            refine_levels: self.refine_levels,
            trials: self.trials_requested.unwrap_or(1000),
            seed: self.seed,
        }
    }

    /// Base config echo embedded in every JSON report.
    pub fn echo(&self) -> ConfigEcho {
        let (u_true, v_true) = if self.is_segment() {
            (self.aoa_1d(), None)
        } else {
            let (u, v) = self.aoa_2d();
            (u, Some(v))
        };
        ConfigEcho {
            command: self.command,
            wavelength_m: self.cfg.wavelength_m,
            snapshot_interval_s: self.cfg.snapshot_interval_s,
            num_snapshots: self.cfg.num_snapshots,
            max_speed_mps: self.cfg.max_speed_mps,
            region: RegionEcho::from(self.cfg.region),
            snr_db: self.snr_db,
            snr_linear: self.cfg.snr_linear,
            seed: self.seed,
            theta_deg: self.theta_deg,
            phi_deg: self.phi_deg,
            u_true,
            v_true,
            m_fpa: self.m_fpa,
            format: self.format.name(),
            traj: None,
            traj_file: None,
            estimator: None,
            designer: None,
            sweep: None,
            probes: None,
        }
    }

    /// Echo extended with the trajectory source fields.
    pub fn echo_with_source(&self) -> ConfigEcho {
        let mut echo = self.echo();
        echo.traj = Some(self.traj.name());
        echo.traj_file = self.traj_file.as_ref().map(|p| p.display().to_string());
        echo
    }

    pub fn estimator_echo(&self, settings: &MleSettings) -> EstimatorEcho {
        EstimatorEcho {
            trials: settings.trials,
            coarse_grid_step: settings.coarse_grid_step,
            refine_levels: settings.refine_levels,
        }
    }

    pub fn designer_echo(&self) -> DesignerEcho {
        DesignerEcho {
            group_size: self.sca.velocity_group_size,
            eps_outer: self.sca.eps_outer,
            eps_x: self.sca.eps_x,
            eps_y: self.sca.eps_y,
            max_outer: self.sca.max_outer,
            max_inner: self.sca.max_inner,
            solver_tol: self.sca.solver_tol,
            init: match self.sca.init {
                Init2D::Circle => "circle",
                Init2D::Diagonal => "diagonal",
                Init2D::Provided(_) => "provided",
            },
        }
    }
}

/// Region in explicit machine-readable form for report provenance.
#[derive(Serialize)]
#[serde(tag = "kind")]
pub enum RegionEcho {
    #[serde(rename = "segment")]
    Segment { length_m: f64 },
    #[serde(rename = "rectangle")]
    Rectangle { width_m: f64, height_m: f64 },
}

impl From<Region> for RegionEcho {
    fn from(region: Region) -> Self {
        match region {
            Region::Segment { length_m } => RegionEcho::Segment { length_m },
            Region::Rectangle { width_m, height_m } => RegionEcho::Rectangle { width_m, height_m },
        }
    }
}

#[derive(Serialize)]
pub struct EstimatorEcho {
    pub trials: usize,
    pub coarse_grid_step: f64,
    pub refine_levels: usize,
}

#[derive(Serialize)]
pub struct DesignerEcho {
    pub group_size: usize,
    pub eps_outer: f64,
    pub eps_x: f64,
    pub eps_y: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub solver_tol: f64,
    pub init: &'static str,
}

#[derive(Serialize)]
pub struct SweepEcho {
    pub kind: &'static str,
    pub points: Vec<f64>,
}

#[derive(Serialize)]
pub struct ProbeEcho {
    pub step: f64,
    pub half_span: f64,
}

/// Fully resolved configuration, embedded in every JSON report so each
/// artifact is self-describing.
#[derive(Serialize)]
pub struct ConfigEcho {
    pub command: &'static str,
    pub wavelength_m: f64,
    pub snapshot_interval_s: f64,
    pub num_snapshots: usize,
    pub max_speed_mps: f64,
    pub region: RegionEcho,
    pub snr_db: f64,
    pub snr_linear: f64,
    pub seed: u64,
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub u_true: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_true: Option<f64>,
    pub m_fpa: usize,
    pub format: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traj: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traj_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimator: Option<EstimatorEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub designer: Option<DesignerEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probes: Option<ProbeEcho>,
}

fn parse_points(text: &str) -> Result<Vec<f64>, CliError> {
    let mut points = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        points.push(parse_f64("points", token)?);
    }
    Ok(points)
}

/// Applies precedence and builds the validated run parameters.
pub fn resolve(
    command: &'static str,
    config_path: Option<String>,
    flags: RawSettings,
) -> Result<Resolved, CliError> {
    let mut raw = match config_path {
        Some(path) => load_file(&path)?,
        None => RawSettings::default(),
    };
    raw.merge_from(flags);

    let wavelength = raw.wavelength.unwrap_or(0.05);
    let ts = raw.ts.unwrap_or(1e-4);
    let n = raw.n.unwrap_or(1000);
    let vmax = raw.vmax.unwrap_or(10.0);
    let region_text = raw.region.unwrap_or_else(|| "0.5".to_string());
    let region = parse_region(&region_text)?;
    let snr_db = raw.snr_db.unwrap_or(0.0);
    let snr_linear = 10f64.powf(snr_db / 10.0);
    let cfg = SensingConfig::new(wavelength, ts, n, vmax, snr_linear, region)?;

    let format = match raw.format.as_deref().unwrap_or("csv") {
        "csv" => OutputFormat::Csv,
        "json" => OutputFormat::Json,
        other => return Err(CliError::Config(format!("format must be csv or json, got `{other}`"))),
    };

    let defaults = ScaSettings::default();
    let init = match raw.init.as_deref().unwrap_or("circle") {
        "circle" => Init2D::Circle,
        "diagonal" => Init2D::Diagonal,
        other => {
            return Err(CliError::Config(format!("init must be circle or diagonal, got `{other}`")))
        }
    };
    let sca = ScaSettings {
        eps_outer: raw.eps_outer.unwrap_or(defaults.eps_outer),
        eps_x: raw.eps_x.unwrap_or(defaults.eps_x),
        eps_y: raw.eps_y.unwrap_or(defaults.eps_y),
        max_outer: raw.max_outer.unwrap_or(defaults.max_outer),
        max_inner: raw.max_inner.unwrap_or(defaults.max_inner),
        velocity_group_size: raw.group_size.unwrap_or(defaults.velocity_group_size),
        solver_tol: raw.solver_tol.unwrap_or(defaults.solver_tol),
        init,
    };

    let sweep = match raw.sweep.as_deref() {
        None => None,
        Some("time") => Some(SweepKind::Time),
        Some("snr") => Some(SweepKind::Snr),
        Some(other) => {
            return Err(CliError::Config(format!("sweep must be time or snr, got `{other}`")))
        }
    };
    let points = match raw.points.as_deref() {
        Some(text) => parse_points(text)?,
        None => Vec::new(),
    };

    let traj = match raw.traj.as_deref().unwrap_or("proposed") {
        "proposed" => TrajKind::Proposed,
        "forward" => TrajKind::Forward,
        "bounce" => TrajKind::Bounce,
        "circle" => TrajKind::Circle,
        "upa" => TrajKind::Upa,
        other => {
            return Err(CliError::Config(format!(
                "traj must be proposed, forward, bounce, circle, or upa, got `{other}`"
            )))
        }
    };

    Ok(Resolved {
        command,
        cfg,
        snr_db,
        seed: raw.seed.unwrap_or(0),
        m_fpa: raw.m_fpa.unwrap_or(16),
        theta_deg: raw.theta_deg.unwrap_or(45.0),
        phi_deg: raw.phi_deg.unwrap_or(30.0),
        out: raw.out.map(PathBuf::from),
        format,
        grid_step: raw.grid_step.unwrap_or(1e-3),
        refine_levels: raw.refine_levels.unwrap_or(3),
        trials_requested: raw.trials,
        sca,
        sweep,
        points,
        probe_step: raw.probe_step,
        probe_span: raw.probe_span,
        traj,
        traj_file: raw.traj_file.map(PathBuf::from),
    })
}
