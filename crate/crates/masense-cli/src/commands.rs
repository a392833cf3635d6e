//! One function per subcommand. Each builds its artifacts from the core
//! library, embeds the resolved config in the JSON report, and leaves all
//! file emission to `output`.

use std::path::Path;

use masense_core::analysis::{
    centered_probe_grid, correlation_1d, correlation_2d, crossover_time, verify_crossover,
    ArrayDim,
};
use masense_core::crb::{crb_1d, crb_2d, crb_fpa_ula, crb_fpa_upa, Regime};
use masense_core::estimator::{monte_carlo_1d, monte_carlo_2d, MleSettings};
use masense_core::model::{SensingConfig, Trajectory1D, Trajectory2D};
use masense_core::traj1d::{benchmark_1d, optimal_trajectory, Benchmark1D};
use masense_core::traj2d::{benchmark_2d, optimize_2d, Benchmark2D};
use serde_json::{json, Value};

use crate::config::{CliError, ProbeEcho, Resolved, SweepEcho, SweepKind, TrajKind};
use crate::output::{emit_data, emit_report, read_traj1d, read_traj2d, Cell, DataArtifact};

fn require_out(r: &Resolved) -> Result<&Path, CliError> {
    r.out.as_deref().ok_or_else(|| {
        CliError::Config("out path required: pass --out or set `out` in the config file".into())
    })
}

fn regime_name(regime: Regime) -> &'static str {
    match regime {
        Regime::TimeConstrained => "time_constrained",
        Regime::SpaceConstrained => "space_constrained",
    }
}

fn echo_value(echo: &crate::config::ConfigEcho) -> Value {
    serde_json::to_value(echo).expect("config echo serializes")
}

/// Trajectory rows (n, t_n, x_n, v_n); the final row's velocity is empty.
fn traj1d_artifact(traj: &Trajectory1D, ts: f64) -> DataArtifact {
    let x = traj.positions();
    let v = traj.velocities();
    let mut rows = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let vel = if i < v.len() { Cell::Num(v[i]) } else { Cell::Empty };
        rows.push(vec![Cell::Int(i as i64), Cell::Num(i as f64 * ts), Cell::Num(x[i]), vel]);
    }
    DataArtifact { kind: "trajectory1d", header: &["n", "t_n", "x_n", "v_n"], rows }
}

/// Trajectory rows (n, t_n, x_n, y_n, vx_n, vy_n); final velocities empty.
fn traj2d_artifact(traj: &Trajectory2D, ts: f64) -> DataArtifact {
    let (x, y) = (traj.x(), traj.y());
    let (vx, vy) = (traj.vx(), traj.vy());
    let mut rows = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let (cvx, cvy) = if i < vx.len() {
            (Cell::Num(vx[i]), Cell::Num(vy[i]))
        } else {
            (Cell::Empty, Cell::Empty)
        };
        rows.push(vec![
            Cell::Int(i as i64),
            Cell::Num(i as f64 * ts),
            Cell::Num(x[i]),
            Cell::Num(y[i]),
            cvx,
            cvy,
        ]);
    }
    DataArtifact {
        kind: "trajectory2d",
        header: &["n", "t_n", "x_n", "y_n", "vx_n", "vy_n"],
        rows,
    }
}

/// Resolves the trajectory a segment-region command evaluates.
fn build_traj_1d(r: &Resolved) -> Result<Trajectory1D, CliError> {
    if let Some(path) = &r.traj_file {
        return read_traj1d(path, &r.cfg);
    }
    match r.traj {
        TrajKind::Proposed => Ok(optimal_trajectory(&r.cfg)?),
        TrajKind::Forward => Ok(benchmark_1d(Benchmark1D::MoveForward, &r.cfg)?),
        TrajKind::Bounce => Ok(benchmark_1d(Benchmark1D::BackAndForth, &r.cfg)?),
        TrajKind::Circle | TrajKind::Upa => Err(CliError::Config(format!(
            "traj {} needs a rectangle region",
            r.traj.name()
        ))),
    }
}

/// Resolves the trajectory a rectangle-region command evaluates.
fn build_traj_2d(r: &Resolved) -> Result<Trajectory2D, CliError> {
    if let Some(path) = &r.traj_file {
        return read_traj2d(path, &r.cfg);
    }
    match r.traj {
        TrajKind::Proposed => {
            let (traj, trace) = optimize_2d(&r.cfg, &r.sca)?;
            if let Some(reason) = trace.aborted {
                return Err(CliError::Solver(format!("designer aborted: {reason}")));
            }
            Ok(traj)
        }
        TrajKind::Circle => Ok(benchmark_2d(Benchmark2D::Circle, &r.cfg)?),
        TrajKind::Upa => Ok(benchmark_2d(Benchmark2D::Upa, &r.cfg)?),
        TrajKind::Forward | TrajKind::Bounce => Err(CliError::Config(format!(
            "traj {} needs a segment region",
            r.traj.name()
        ))),
    }
}

pub fn optimize1d(r: &Resolved) -> Result<(), CliError> {
    let out = require_out(r)?;
    let traj = optimal_trajectory(&r.cfg)?;
    let report = crb_1d(&traj, &r.cfg)?;
    let data = traj1d_artifact(&traj, r.cfg.snapshot_interval_s);
    let report_json = json!({
        "config": echo_value(&r.echo()),
        "regime": report.regime.map(regime_name),
        "var": report.var_x,
        "crb": report.crb_u,
        "effective_aperture_m": report.effective_aperture_m,
    });
    emit_data(out, r.format, &data, &[], report_json)
}

/// Fraction of snapshots whose position sits on the rectangle boundary,
/// within a tolerance of 1e-4 of the longer side.
fn boundary_contact_fraction(traj: &Trajectory2D, cfg: &SensingConfig) -> Result<f64, CliError> {
    let (ax, ay) = cfg.rectangle_m()?;
    let tol = 1e-4 * ax.max(ay);
    let on_edge = |p: f64, len: f64| p <= tol || p >= len - tol;
    let count = traj
        .x()
        .iter()
        .zip(traj.y())
        .filter(|&(&x, &y)| on_edge(x, ax) || on_edge(y, ay))
        .count();
    Ok(count as f64 / traj.x().len() as f64)
}

pub fn optimize2d(r: &Resolved) -> Result<(), CliError> {
    let out = require_out(r)?;
    let (traj, trace) = optimize_2d(&r.cfg, &r.sca)?;
    if let Some(reason) = trace.aborted {
        return Err(CliError::Solver(format!("designer aborted: {reason}")));
    }
    let report = crb_2d(&traj, &r.cfg)?;
    let deltas = trace.deltas();
    let trace_rows = deltas
        .iter()
        .enumerate()
        .map(|(i, &d)| vec![Cell::Int(i as i64), Cell::Num(d)])
        .collect();
    let trace_table = DataArtifact {
        kind: "designer_trace",
        header: &["outer_iter", "delta"],
        rows: trace_rows,
    };
    let data = traj2d_artifact(&traj, r.cfg.snapshot_interval_s);
    let mut echo = r.echo();
    echo.designer = Some(r.designer_echo());
    let report_json = json!({
        "config": echo_value(&echo),
        "delta_m2": deltas.last().copied(),
        "crb_u": report.crb_u,
        "crb_v": report.crb_v,
        "var_x": report.var_x,
        "var_y": report.var_y,
        "cov_xy": report.cov_xy,
        "effective_aperture_m": report.effective_aperture_m,
        "outer_iterations": trace.outer.len(),
        "boundary_contact_fraction": boundary_contact_fraction(&traj, &r.cfg)?,
    });
    emit_data(out, r.format, &data, &[("trace", trace_table)], report_json)
}

fn point_cfg(r: &Resolved, num_snapshots: usize, snr_linear: f64) -> Result<SensingConfig, CliError> {
    Ok(SensingConfig::new(
        r.cfg.wavelength_m,
        r.cfg.snapshot_interval_s,
        num_snapshots,
        r.cfg.max_speed_mps,
        snr_linear,
        r.cfg.region,
    )?)
}

fn mse_settings(r: &Resolved, trials: usize, point_index: usize) -> MleSettings {
    MleSettings {
        coarse_grid_step: r.grid_step,
        refine_levels: r.refine_levels,
        trials,
        // Per-point seeds keep the table deterministic yet independent.
        seed: r.seed.wrapping_add(point_index as u64 + 1),
    }
}

fn sweep_time(r: &Resolved, out: &Path) -> Result<(), CliError> {
    let ts = r.cfg.snapshot_interval_s;
    let mse_trials = r.trials_requested;
    let u_true = r.aoa_1d();
    let mut rows = Vec::with_capacity(r.points.len());
    for (i, &t) in r.points.iter().enumerate() {
        if !(t > 0.0) {
            return Err(CliError::Config(format!("sweep point {t} is not a positive time")));
        }
        let n = (t / ts).round() as usize;
        if n < 2 {
            return Err(CliError::Config(format!(
                "sweep point {t} s covers fewer than two snapshots at ts = {ts} s"
            )));
        }
        let cfg = point_cfg(r, n, r.cfg.snr_linear)?;
        let traj = optimal_trajectory(&cfg)?;
        let crb_ma = crb_1d(&traj, &cfg)?.crb_u;
        let crb_fpa = crb_fpa_ula(r.m_fpa, &cfg)?;
        let mut row = vec![Cell::Num(t), Cell::Int(n as i64), Cell::Num(crb_ma), Cell::Num(crb_fpa)];
        if let Some(trials) = mse_trials {
            let mc = monte_carlo_1d(&traj, u_true, &cfg, &mse_settings(r, trials, i))?;
            row.push(Cell::Num(mc.mse_u));
        }
        rows.push(row);
    }
    let header: &'static [&'static str] = if mse_trials.is_some() {
        &["t_s", "n", "crb_ma", "crb_fpa", "mse_ma"]
    } else {
        &["t_s", "n", "crb_ma", "crb_fpa"]
    };
    let data = DataArtifact { kind: "sweep_time", header, rows };
    let mut echo = r.echo();
    echo.sweep = Some(SweepEcho { kind: SweepKind::Time.name(), points: r.points.clone() });
    if let Some(trials) = mse_trials {
        echo.estimator = Some(r.estimator_echo(&mse_settings(r, trials, 0)));
    }
    let report_json = json!({
        "config": echo_value(&echo),
        "rows": data.rows.len(),
    });
    emit_data(out, r.format, &data, &[], report_json)
}

fn sweep_snr(r: &Resolved, out: &Path) -> Result<(), CliError> {
    let mse_trials = r.trials_requested;
    let u_true = r.aoa_1d();
    // Trajectories do not depend on SNR; build each curve's design once.
    let proposed = optimal_trajectory(&r.cfg)?;
    let forward = benchmark_1d(Benchmark1D::MoveForward, &r.cfg)?;
    let bounce = benchmark_1d(Benchmark1D::BackAndForth, &r.cfg)?;
    let mut rows = Vec::with_capacity(r.points.len());
    for (i, &db) in r.points.iter().enumerate() {
        let snr = 10f64.powf(db / 10.0);
        let cfg = point_cfg(r, r.cfg.num_snapshots, snr)?;
        let mut row = vec![
            Cell::Num(db),
            Cell::Num(crb_1d(&proposed, &cfg)?.crb_u),
            Cell::Num(crb_1d(&forward, &cfg)?.crb_u),
            Cell::Num(crb_1d(&bounce, &cfg)?.crb_u),
        ];
        if let Some(trials) = mse_trials {
            let mc = monte_carlo_1d(&proposed, u_true, &cfg, &mse_settings(r, trials, i))?;
            row.push(Cell::Num(mc.mse_u));
        }
        rows.push(row);
    }
    let header: &'static [&'static str] = if mse_trials.is_some() {
        &["snr_db", "crb_proposed", "crb_move_forward", "crb_back_and_forth", "mse_proposed"]
    } else {
        &["snr_db", "crb_proposed", "crb_move_forward", "crb_back_and_forth"]
    };
    let data = DataArtifact { kind: "sweep_snr", header, rows };
    let mut echo = r.echo();
    echo.sweep = Some(SweepEcho { kind: SweepKind::Snr.name(), points: r.points.clone() });
    if let Some(trials) = mse_trials {
        echo.estimator = Some(r.estimator_echo(&mse_settings(r, trials, 0)));
    }
    let report_json = json!({
        "config": echo_value(&echo),
        "rows": data.rows.len(),
    });
    emit_data(out, r.format, &data, &[], report_json)
}

pub fn sweep(r: &Resolved) -> Result<(), CliError> {
    let out = require_out(r)?;
    let kind = r
        .sweep
        .ok_or_else(|| CliError::Config("sweep kind required: pass --sweep time|snr".into()))?;
    if r.points.is_empty() {
        return Err(CliError::Config("sweep points required: pass --points v1,v2,...".into()));
    }
    match kind {
        SweepKind::Time => sweep_time(r, out),
        SweepKind::Snr => sweep_snr(r, out),
    }
}

pub fn simulate(r: &Resolved) -> Result<(), CliError> {
    let out = require_out(r)?;
    let settings = r.mle_settings();
    let mut echo = r.echo_with_source();
    echo.estimator = Some(r.estimator_echo(&settings));
    if r.is_segment() {
        let traj = build_traj_1d(r)?;
        let mc = monte_carlo_1d(&traj, r.aoa_1d(), &r.cfg, &settings)?;
        let rows = mc
            .estimates_u
            .iter()
            .enumerate()
            .map(|(i, &u)| vec![Cell::Int(i as i64), Cell::Num(u)])
            .collect();
        let data = DataArtifact { kind: "estimates1d", header: &["trial", "u_hat"], rows };
        let report_json = json!({
            "config": echo_value(&echo),
            "trials": mc.trials,
            "mse_u": mc.mse_u,
            "crb_u": mc.crb_u,
        });
        emit_data(out, r.format, &data, &[], report_json)
    } else {
        if matches!(r.traj, TrajKind::Proposed) && r.traj_file.is_none() {
            echo.designer = Some(r.designer_echo());
        }
        let traj = build_traj_2d(r)?;
        let mc = monte_carlo_2d(&traj, r.aoa_2d(), &r.cfg, &settings)?;
        let rows = mc
            .estimates_u
            .iter()
            .zip(&mc.estimates_v)
            .enumerate()
            .map(|(i, (&u, &v))| vec![Cell::Int(i as i64), Cell::Num(u), Cell::Num(v)])
            .collect();
        let data =
            DataArtifact { kind: "estimates2d", header: &["trial", "u_hat", "v_hat"], rows };
        let report_json = json!({
            "config": echo_value(&echo),
            "trials": mc.trials,
            "mse_u": mc.mse_u,
            "mse_v": mc.mse_v,
            "crb_u": mc.crb_u,
            "crb_v": mc.crb_v,
        });
        emit_data(out, r.format, &data, &[], report_json)
    }
}

/// Probe grid centered on the true angle (so the exact-match probe is on the
/// grid), clipped to the physical range [-1, 1].
fn clipped_grid(center: f64, half_span: f64, step: f64) -> Result<Vec<f64>, CliError> {
    let grid = centered_probe_grid(center, half_span, step)?;
    let clipped: Vec<f64> = grid.into_iter().filter(|g| (-1.0..=1.0).contains(g)).collect();
    if clipped.len() < 2 {
        return Err(CliError::Config(
            "probe grid has fewer than two points inside [-1, 1]".into(),
        ));
    }
    Ok(clipped)
}

pub fn correlation(r: &Resolved) -> Result<(), CliError> {
    let out = require_out(r)?;
    let mut echo = r.echo_with_source();
    if r.is_segment() {
        let step = r.probe_step.unwrap_or(1e-4);
        let span = r.probe_span.unwrap_or(2.0);
        echo.probes = Some(ProbeEcho { step, half_span: span });
        let traj = build_traj_1d(r)?;
        let u_true = r.aoa_1d();
        let probes = clipped_grid(u_true, span, step)?;
        let pattern = correlation_1d(&traj, u_true, &probes, &r.cfg)?;
        let rows = pattern
            .grid
            .iter()
            .zip(&pattern.values)
            .map(|(&u, &q)| vec![Cell::Num(u), Cell::Num(q)])
            .collect();
        let data = DataArtifact { kind: "correlation1d", header: &["u", "q"], rows };
        let report_json = json!({
            "config": echo_value(&echo),
            "main_lobe_width": pattern.main_lobe_width,
            "peak_sidelobe": pattern.peak_sidelobe,
        });
        emit_data(out, r.format, &data, &[], report_json)
    } else {
        let step = r.probe_step.unwrap_or(1e-3);
        let span = r.probe_span.unwrap_or(0.08);
        echo.probes = Some(ProbeEcho { step, half_span: span });
        if matches!(r.traj, TrajKind::Proposed) && r.traj_file.is_none() {
            echo.designer = Some(r.designer_echo());
        }
        let traj = build_traj_2d(r)?;
        let (u_true, v_true) = r.aoa_2d();
        let probes_u = clipped_grid(u_true, span, step)?;
        let probes_v = clipped_grid(v_true, span, step)?;
        let pattern = correlation_2d(&traj, (u_true, v_true), &probes_u, &probes_v, &r.cfg)?;
        let nu = pattern.grid_u.len();
        let mut rows = Vec::with_capacity(pattern.values.len());
        for (ri, &v) in pattern.grid_v.iter().enumerate() {
            for (ci, &u) in pattern.grid_u.iter().enumerate() {
                rows.push(vec![
                    Cell::Num(u),
                    Cell::Num(v),
                    Cell::Num(pattern.values[ri * nu + ci]),
                ]);
            }
        }
        let data = DataArtifact { kind: "correlation2d", header: &["u", "v", "q"], rows };
        let report_json = json!({
            "config": echo_value(&echo),
            "main_lobe_area": pattern.main_lobe_area,
            "peak_sidelobe": pattern.peak_sidelobe,
        });
        emit_data(out, r.format, &data, &[], report_json)
    }
}

pub fn crossover(r: &Resolved) -> Result<(), CliError> {
    let dim = if r.is_segment() { ArrayDim::OneD } else { ArrayDim::TwoD };
    let threshold = crossover_time(dim, r.m_fpa, &r.cfg)?;
    // A fixed array needs at least two elements to carry aperture; below
    // that its bound is infinite and the moving antenna wins at any time.
    let degenerate = r.m_fpa < 2;
    let (crossing, below, above) = if degenerate {
        (None, false, true)
    } else {
        let check = verify_crossover(dim, r.m_fpa, &r.cfg)?;
        (Some(check.crossing_s), check.above_ok, check.below_ok)
    };
    let report = json!({
        "config": echo_value(&r.echo()),
        "dim": match dim { ArrayDim::OneD => "1d", ArrayDim::TwoD => "2d" },
        "m_fpa": r.m_fpa,
        "threshold_s": threshold,
        "crossing_s": crossing,
        "verified_below": below,
        "verified_above": above,
        "degenerate_fpa": degenerate,
    });
    emit_report(r.out.as_deref(), &report)
}

pub fn crb(r: &Resolved) -> Result<(), CliError> {
    let mut echo = r.echo_with_source();
    let (report, fpa) = if r.is_segment() {
        let traj = build_traj_1d(r)?;
        (crb_1d(&traj, &r.cfg)?, crb_fpa_ula(r.m_fpa, &r.cfg).ok())
    } else {
        if matches!(r.traj, TrajKind::Proposed) && r.traj_file.is_none() {
            echo.designer = Some(r.designer_echo());
        }
        let traj = build_traj_2d(r)?;
        (crb_2d(&traj, &r.cfg)?, crb_fpa_upa(r.m_fpa, &r.cfg).ok())
    };
    let report_json = json!({
        "config": echo_value(&echo),
        "regime": report.regime.map(regime_name),
        "crb_u": report.crb_u,
        "crb_v": report.crb_v,
        "var_x": report.var_x,
        "var_y": report.var_y,
        "cov_xy": report.cov_xy,
        "effective_aperture_m": report.effective_aperture_m,
        "crb_fpa": fpa,
    });
    emit_report(r.out.as_deref(), &report_json)
}
