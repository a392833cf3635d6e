//! Diagnostics over designed trajectories: steering-correlation patterns
//! (how impulse-like the virtual aperture is), log-log scaling-law fits, and
//! the sensing time beyond which a single moving antenna beats a fixed
//! half-wavelength array.
//!
//! Correlation q(ū|u) = |α(x,u)ᴴα(x,ū)|²/N² is evaluated in difference form,
//! with each probe's phases computed directly from ū−u. A probe equal to the
//! true AoA therefore has every phase exactly ±0.0 and q exactly 1.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::crb::upa_side;
use crate::model::{SensingConfig, SpatialAoA, Trajectory1D, Trajectory2D};
use crate::{Error, Result};

/// Default probe spacing in u-units.
pub const DEFAULT_PROBE_STEP: f64 = 1e-4;

/// Half-power (q = 0.5) level that delimits the main lobe.
const HALF_POWER: f64 = 0.5;

/// 1D correlation pattern over a sorted probe grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationPattern {
    /// Probe values ū, strictly increasing.
    pub grid: Vec<f64>,
    /// q(ū|u) per probe, in [0, 1] up to rounding.
    pub values: Vec<f64>,
    /// Distance between the half-power crossings bracketing the main peak,
    /// in u-units; clamped at the grid ends when q never falls below half.
    pub main_lobe_width: f64,
    /// Largest q outside the main lobe; 0 when every probe is inside.
    pub peak_sidelobe: f64,
}

/// 2D correlation pattern over the cartesian product of two sorted axes.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationPattern2D {
    pub grid_u: Vec<f64>,
    pub grid_v: Vec<f64>,
    /// Row-major values: `values[r * grid_u.len() + c]` is q at
    /// (grid_u[c], grid_v[r]).
    pub values: Vec<f64>,
    /// Area of the half-power region connected to the main peak, in
    /// u·v-units (sum of cell areas; cells clamp at the grid boundary).
    pub main_lobe_area: f64,
    /// Largest q outside that connected region; 0 when none is outside.
    pub peak_sidelobe: f64,
}

/// Least-squares line fit, optionally on log-log axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 1 for an exact fit.
    pub r2: f64,
}

/// Which moving-antenna geometry is compared against which fixed array.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrayDim {
    /// Max-speed line sweep versus an M-element half-wavelength ULA.
    OneD,
    /// Max-speed circular sweep versus a √M×√M half-wavelength UPA.
    TwoD,
}

/// Crossover threshold plus its verification against the exact bound curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverCheck {
    /// Closed-form threshold in seconds.
    pub threshold_s: f64,
    /// Time at which the exact (unapproximated) bound curves actually cross.
    pub crossing_s: f64,
    /// Moving antenna strictly better at 1.05 × threshold.
    pub below_ok: bool,
    /// Fixed array strictly better at 0.95 × threshold.
    pub above_ok: bool,
}

/// Uniform probe grid covering [−1, 1], both ends included.
pub fn symmetric_probe_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 2.0) || !step.is_finite() {
        return Err(Error::InvalidParameter("probe step must lie in (0, 2]"));
    }
    let k = (2.0 / step).floor() as usize;
    let mut grid: Vec<f64> = (0..=k).map(|i| -1.0 + i as f64 * step).collect();
    if *grid.last().unwrap() < 1.0 - 1e-12 * step {
        grid.push(1.0);
    } else {
        *grid.last_mut().unwrap() = grid.last().unwrap().min(1.0);
    }
    Ok(grid)
}

/// Uniform probe grid `center + k·step` for k = −K..=K with
/// K = round(half_span/step); the center value appears exactly.
pub fn centered_probe_grid(center: f64, half_span: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidParameter("probe step must be positive and finite"));
    }
    if !(half_span >= step) || !half_span.is_finite() {
        return Err(Error::InvalidParameter("half_span must be at least one step"));
    }
    let k = (half_span / step).round() as i64;
    Ok((-k..=k)
        .map(|i| if i == 0 { center } else { center + i as f64 * step })
        .collect())
}

fn check_probe_axis(probes: &[f64]) -> Result<()> {
    if probes.len() < 2 {
        return Err(Error::InvalidParameter("probe grid needs at least two points"));
    }
    for w in probes.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter("probe grid must be strictly increasing"));
        }
    }
    if probes.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidParameter("probe values must be finite"));
    }
    Ok(())
}

/// Index of the probe closest to `target`.
fn nearest_index(probes: &[f64], target: f64) -> usize {
    let mut best = (0usize, f64::INFINITY);
    for (i, &p) in probes.iter().enumerate() {
        let d = (p - target).abs();
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

/// |Σ_n exp(j·s_n·d)|²/N² with phases computed directly per probe.
fn correlation_values(scaled_pos: &[f64], true_val: f64, probes: &[f64]) -> Vec<f64> {
    let n2 = (scaled_pos.len() as f64) * (scaled_pos.len() as f64);
    probes
        .iter()
        .map(|&p| {
            let d = p - true_val;
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for &s in scaled_pos {
                let (sin, cos) = (s * d).sin_cos();
                re += cos;
                im += sin;
            }
            (re * re + im * im) / n2
        })
        .collect()
}

/// Linear interpolation of the half-power crossing between adjacent samples,
/// walking outward from `anchor`. Returns (crossing position, last index
/// still inside the lobe).
fn half_power_edge(grid: &[f64], values: &[f64], anchor: usize, rightward: bool) -> (f64, usize) {
    let mut inside = anchor;
    loop {
        let next = if rightward { inside + 1 } else { inside.wrapping_sub(1) };
        if next >= grid.len() {
            return (grid[inside], inside);
        }
        if values[next] < HALF_POWER {
            let (g0, g1) = (grid[inside], grid[next]);
            let (q0, q1) = (values[inside], values[next]);
            let t = (HALF_POWER - q0) / (q1 - q0);
            return (g0 + t * (g1 - g0), inside);
        }
        inside = next;
    }
}

/// Correlation of the steering vector at the true 1D AoA with steering
/// vectors over a probe grid, plus half-power main-lobe width and the
/// largest out-of-lobe value. The probe grid must be strictly increasing;
/// a probe bitwise-equal to `true_u` yields q = 1 exactly.
pub fn correlation_1d(
    traj: &Trajectory1D,
    true_u: f64,
    probes: &[f64],
    cfg: &SensingConfig,
) -> Result<CorrelationPattern> {
    SpatialAoA::one_d(true_u)?;
    check_probe_axis(probes)?;
    if traj.len() != cfg.num_snapshots {
        return Err(Error::DimensionMismatch("trajectory must match num_snapshots"));
    }
    let k_wave = 2.0 * PI / cfg.wavelength_m;
    let scaled: Vec<f64> = traj.positions().iter().map(|&x| k_wave * x).collect();
    let values = correlation_values(&scaled, true_u, probes);

    let anchor = nearest_index(probes, true_u);
    let (width, lobe) = if values[anchor] < HALF_POWER {
        (0.0, (anchor, anchor.wrapping_sub(1)))
    } else {
        let (right, r_idx) = half_power_edge(probes, &values, anchor, true);
        let (left, l_idx) = half_power_edge(probes, &values, anchor, false);
        (right - left, (l_idx, r_idx))
    };
    let mut peak_sidelobe = 0.0f64;
    for (i, &q) in values.iter().enumerate() {
        let outside = i < lobe.0 || i > lobe.1;
        if outside && q > peak_sidelobe {
            peak_sidelobe = q;
        }
    }
    Ok(CorrelationPattern { grid: probes.to_vec(), values, main_lobe_width: width, peak_sidelobe })
}

/// Cell width attributed to sample `j` of a sorted axis: half the distance
/// to each neighbor, one-sided at the ends.
fn cell_width(grid: &[f64], j: usize) -> f64 {
    let last = grid.len() - 1;
    match j {
        0 => grid[1] - grid[0],
        j if j == last => grid[last] - grid[last - 1],
        _ => (grid[j + 1] - grid[j - 1]) / 2.0,
    }
}

/// Correlation of the steering vector at the true 2D AoA pair against the
/// cartesian product of two probe axes. The half-power main lobe is the
/// 4-connected region of q ≥ 0.5 containing the probe nearest the true
/// pair; its area is reported in u·v-units.
pub fn correlation_2d(
    traj: &Trajectory2D,
    true_eta: (f64, f64),
    probes_u: &[f64],
    probes_v: &[f64],
    cfg: &SensingConfig,
) -> Result<CorrelationPattern2D> {
    SpatialAoA::two_d(true_eta.0, true_eta.1)?;
    check_probe_axis(probes_u)?;
    check_probe_axis(probes_v)?;
    if traj.len() != cfg.num_snapshots {
        return Err(Error::DimensionMismatch("trajectory must match num_snapshots"));
    }
    let k_wave = 2.0 * PI / cfg.wavelength_m;
    let n = traj.len();
    let nu = probes_u.len();
    let nv = probes_v.len();

    // Separable phase tables: eu[c] over snapshots for probe column c, ev[r]
    // for probe row r. A probe equal to the true value gives (1, ±0) terms.
    let table = |positions: &[f64], true_val: f64, probes: &[f64]| -> Vec<(f64, f64)> {
        let mut t = Vec::with_capacity(probes.len() * n);
        for &p in probes {
            let d = p - true_val;
            for &x in positions {
                let (sin, cos) = (k_wave * x * d).sin_cos();
                t.push((cos, sin));
            }
        }
        t
    };
    let eu = table(traj.x(), true_eta.0, probes_u);
    let ev = table(traj.y(), true_eta.1, probes_v);

    let n2 = (n as f64) * (n as f64);
    let mut values = vec![0.0f64; nu * nv];
    for r in 0..nv {
        let wv = &ev[r * n..(r + 1) * n];
        for c in 0..nu {
            let wu = &eu[c * n..(c + 1) * n];
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for i in 0..n {
                let (a, b) = wu[i];
                let (cc, d) = wv[i];
                re += a * cc - b * d;
                im += a * d + b * cc;
            }
            values[r * nu + c] = (re * re + im * im) / n2;
        }
    }

    let ac = nearest_index(probes_u, true_eta.0);
    let ar = nearest_index(probes_v, true_eta.1);
    let mut in_lobe = vec![false; nu * nv];
    let mut area = 0.0f64;
    if values[ar * nu + ac] >= HALF_POWER {
        let mut queue = VecDeque::new();
        in_lobe[ar * nu + ac] = true;
        queue.push_back((ar, ac));
        while let Some((r, c)) = queue.pop_front() {
            area += cell_width(probes_u, c) * cell_width(probes_v, r);
            let mut visit = |rr: usize, cc: usize| {
                let idx = rr * nu + cc;
                if !in_lobe[idx] && values[idx] >= HALF_POWER {
                    in_lobe[idx] = true;
                    queue.push_back((rr, cc));
                }
            };
            if r > 0 {
                visit(r - 1, c);
            }
            if r + 1 < nv {
                visit(r + 1, c);
            }
            if c > 0 {
                visit(r, c - 1);
            }
            if c + 1 < nu {
                visit(r, c + 1);
            }
        }
    }
    let mut peak_sidelobe = 0.0f64;
    for (idx, &q) in values.iter().enumerate() {
        if !in_lobe[idx] && q > peak_sidelobe {
            peak_sidelobe = q;
        }
    }
    Ok(CorrelationPattern2D {
        grid_u: probes_u.to_vec(),
        grid_v: probes_v.to_vec(),
        values,
        main_lobe_area: area,
        peak_sidelobe,
    })
}

/// Least-squares line through the series, on log-log axes when `log_log` is
/// set (all coordinates must then be positive). With constant y the fit is
/// the flat line and r² is 1.
pub fn scaling_fit(series: &[(f64, f64)], log_log: bool) -> Result<ScalingFit> {
    if series.len() < 2 {
        return Err(Error::InvalidParameter("scaling fit needs at least two points"));
    }
    let mut xs = Vec::with_capacity(series.len());
    let mut ys = Vec::with_capacity(series.len());
    for &(x, y) in series {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidParameter("scaling fit needs finite coordinates"));
        }
        if log_log {
            if !(x > 0.0 && y > 0.0) {
                return Err(Error::InvalidParameter(
                    "log-log scaling fit needs positive coordinates",
                ));
            }
            xs.push(x.ln());
            ys.push(y.ln());
        } else {
            xs.push(x);
            ys.push(y);
        }
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for i in 0..xs.len() {
        let dx = xs[i] - mx;
        let dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::Degenerate("scaling fit needs at least two distinct x values"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = (syy - slope * sxy).max(0.0);
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(ScalingFit { slope, intercept, r2 })
}

/// Sensing time beyond which the moving antenna's AoA bound drops below an
/// M-element fixed array's: M^{3/2}/2 · λ/v for the line sweep versus a ULA,
/// πM/√6 · λ/v for the circular sweep versus a UPA.
pub fn crossover_time(dim: ArrayDim, m: usize, cfg: &SensingConfig) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter("fixed array needs at least one element"));
    }
    let mf = m as f64;
    let ratio = cfg.wavelength_m / cfg.max_speed_mps;
    Ok(match dim {
        ArrayDim::OneD => (mf * mf * mf).sqrt() / 2.0 * ratio,
        ArrayDim::TwoD => PI * mf / 6.0f64.sqrt() * ratio,
    })
}

/// Exact per-snapshot bound pair (moving antenna, fixed array) at a real
/// snapshot count, up to the common positive factor 1/(π²·snr·N).
fn exact_bound_pair(dim: ArrayDim, m: usize, nf: f64, cfg: &SensingConfig) -> (f64, f64) {
    let mf = m as f64;
    let lambda = cfg.wavelength_m;
    let step = cfg.max_speed_mps * cfg.snapshot_interval_s;
    match dim {
        // Max-speed line sweep: positions uniform with spacing v·Ts, so the
        // variance is (v·Ts)²(N²−1)/12.
        ArrayDim::OneD => {
            let ma = 3.0 * lambda * lambda / (2.0 * step * step * (nf * nf - 1.0));
            let fpa = 6.0 / (mf * (mf * mf - 1.0));
            (ma, fpa)
        }
        // Max-speed circle: radius v·Ts/(2 sin(π/N)), variance R²/2 per axis.
        ArrayDim::TwoD => {
            let s = (PI / nf).sin();
            let ma = lambda * lambda * s * s / (step * step);
            let fpa = 6.0 / (mf * (mf - 1.0));
            (ma, fpa)
        }
    }
}

/// Closed-form threshold plus verification against the exact bound curves:
/// where those curves actually cross, and the strict ordering at ±5% around
/// the threshold. The gap between `crossing_s` and `threshold_s` measures
/// the large-M/large-N approximations baked into the closed form.
pub fn verify_crossover(dim: ArrayDim, m: usize, cfg: &SensingConfig) -> Result<CrossoverCheck> {
    match dim {
        ArrayDim::OneD => {
            if m < 2 {
                return Err(Error::InvalidParameter("ULA comparison needs M >= 2"));
            }
        }
        ArrayDim::TwoD => {
            upa_side(m)?;
            if m < 4 {
                return Err(Error::InvalidParameter("UPA comparison needs M >= 4"));
            }
        }
    }
    let threshold_s = crossover_time(dim, m, cfg)?;
    let mf = m as f64;
    let lambda = cfg.wavelength_m;
    let ts = cfg.snapshot_interval_s;
    let step = cfg.max_speed_mps * ts;

    let crossing_n = match dim {
        ArrayDim::OneD => {
            (1.0 + lambda * lambda * mf * (mf * mf - 1.0) / (4.0 * step * step)).sqrt()
        }
        ArrayDim::TwoD => {
            let arg = step / lambda * (6.0 / (mf * (mf - 1.0))).sqrt();
            if arg >= 1.0 {
                return Err(Error::Degenerate(
                    "per-snapshot step too coarse: the curves never cross",
                ));
            }
            PI / arg.asin()
        }
    };
    let crossing_s = crossing_n * ts;

    let at = |t: f64| exact_bound_pair(dim, m, t / ts, cfg);
    let (ma_hi, fpa_hi) = at(1.05 * threshold_s);
    let (ma_lo, fpa_lo) = at(0.95 * threshold_s);
    Ok(CrossoverCheck {
        threshold_s,
        crossing_s,
        below_ok: ma_hi < fpa_hi,
        above_ok: ma_lo > fpa_lo,
    })
}
