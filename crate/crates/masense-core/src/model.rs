//! Shared domain types: sensing configuration, trajectories, spatial AoAs,
//! steering vectors and received-signal synthesis.
//!
//! A movable antenna takes one complex snapshot at each of N positions; the
//! collected snapshot vector behaves like the output of a virtual array whose
//! element positions are the visited points. All kinematic bookkeeping lives
//! here: positions must stay inside the configured region, per-step speeds
//! must respect the actuator bound, and positions must be the running integral
//! of the velocities.
//!
//! ```
//! use masense_core::model::{Region, SensingConfig, SpatialAoA, Trajectory1D, steering_1d};
//!
//! let cfg = SensingConfig::new(0.05, 1e-3, 3, 10.0, 1.0, Region::segment(1.0)).unwrap();
//! let traj = Trajectory1D::from_start_and_velocities(0.0, &[10.0, 10.0], &cfg).unwrap();
//! let aoa = SpatialAoA::one_d(0.5).unwrap();
//! let a = steering_1d(&traj, &aoa, &cfg).unwrap();
//! assert_eq!(a.len(), 3);
//! assert!((a[0].norm() - 1.0).abs() < 1e-12);
//! ```

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Relative slack for box / speed validation; absorbs accumulated rounding
/// from kinematic reconstruction over long trajectories (N·ulp growth) and
/// conic-solver output repair, matching the kinematic tolerance scale.
const REL_SLACK: f64 = 1e-9;

/// Kinematic consistency tolerance, as a fraction of the region extent.
const KINEMATIC_TOL: f64 = 1e-9;

/// Antenna movement region, anchored at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// 1D segment [0, A].
    Segment { length_m: f64 },
    /// Axis-aligned rectangle [0, A_x] × [0, A_y] with a corner at the origin.
    Rectangle { width_m: f64, height_m: f64 },
}

impl Region {
    /// 1D segment of length `a` meters.
    pub fn segment(a: f64) -> Self {
        Region::Segment { length_m: a }
    }

    /// Rectangle of `ax` × `ay` meters.
    pub fn rectangle(ax: f64, ay: f64) -> Self {
        Region::Rectangle { width_m: ax, height_m: ay }
    }

    /// Largest coordinate extent of the region.
    pub fn max_extent_m(&self) -> f64 {
        match *self {
            Region::Segment { length_m } => length_m,
            Region::Rectangle { width_m, height_m } => width_m.max(height_m),
        }
    }
}

/// Full sensing setup: carrier, snapshot timing, speed bound, average SNR
/// (the ratio P|β|²/σ²), and the movement region.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingConfig {
    /// Carrier wavelength λ in meters.
    pub wavelength_m: f64,
    /// Snapshot interval T_s in seconds.
    pub snapshot_interval_s: f64,
    /// Number of snapshots N.
    pub num_snapshots: usize,
    /// Antenna speed bound v^m in meters per second.
    pub max_speed_mps: f64,
    /// Linear average received SNR, P|β|²/σ².
    pub snr_linear: f64,
    /// Movement region.
    pub region: Region,
}

impl SensingConfig {
    /// Validates positivity of every physical parameter. Region extents may
    /// be zero (a pinned antenna) but not negative.
    pub fn new(
        wavelength_m: f64,
        snapshot_interval_s: f64,
        num_snapshots: usize,
        max_speed_mps: f64,
        snr_linear: f64,
        region: Region,
    ) -> Result<Self> {
        if !(wavelength_m > 0.0) || !wavelength_m.is_finite() {
            return Err(Error::InvalidParameter("wavelength_m must be positive and finite"));
        }
        if !(snapshot_interval_s > 0.0) || !snapshot_interval_s.is_finite() {
            return Err(Error::InvalidParameter("snapshot_interval_s must be positive and finite"));
        }
        if num_snapshots == 0 {
            return Err(Error::InvalidParameter("num_snapshots must be at least 1"));
        }
        if !(max_speed_mps > 0.0) || !max_speed_mps.is_finite() {
            return Err(Error::InvalidParameter("max_speed_mps must be positive and finite"));
        }
        if !(snr_linear > 0.0) || !snr_linear.is_finite() {
            return Err(Error::InvalidParameter("snr_linear must be positive and finite"));
        }
        let extent_ok = match region {
            Region::Segment { length_m } => length_m >= 0.0 && length_m.is_finite(),
            Region::Rectangle { width_m, height_m } => {
                width_m >= 0.0 && width_m.is_finite() && height_m >= 0.0 && height_m.is_finite()
            }
        };
        if !extent_ok {
            return Err(Error::InvalidParameter("region extents must be nonnegative and finite"));
        }
        Ok(SensingConfig {
            wavelength_m,
            snapshot_interval_s,
            num_snapshots,
            max_speed_mps,
            snr_linear,
            region,
        })
    }

    /// Maximum inter-snapshot displacement Δ = v^m · T_s.
    pub fn step_bound_m(&self) -> f64 {
        self.max_speed_mps * self.snapshot_interval_s
    }

    /// Total sensing time T = N · T_s.
    pub fn total_time_s(&self) -> f64 {
        self.num_snapshots as f64 * self.snapshot_interval_s
    }

    /// Segment length A; errors when the region is a rectangle.
    pub fn segment_length_m(&self) -> Result<f64> {
        match self.region {
            Region::Segment { length_m } => Ok(length_m),
            Region::Rectangle { .. } => {
                Err(Error::InvalidParameter("operation needs a 1D segment region"))
            }
        }
    }

    /// Rectangle extents (A_x, A_y); errors when the region is a segment.
    pub fn rectangle_m(&self) -> Result<(f64, f64)> {
        match self.region {
            Region::Rectangle { width_m, height_m } => Ok((width_m, height_m)),
            Region::Segment { .. } => {
                Err(Error::InvalidParameter("operation needs a 2D rectangle region"))
            }
        }
    }
}

/// Direction of arrival in spatial-frequency coordinates: u = cos θ for a
/// linear geometry, (u, v) = (sin θ cos φ, cos θ) for a planar one. Values
/// live in [−1, 1]; the 2D pair additionally satisfies u² + v² ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpatialAoA {
    OneD { u: f64 },
    TwoD { u: f64, v: f64 },
}

impl SpatialAoA {
    /// 1D spatial AoA u ∈ [−1, 1].
    pub fn one_d(u: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&u) {
            return Err(Error::InvalidParameter("spatial AoA u must lie in [-1, 1]"));
        }
        Ok(SpatialAoA::OneD { u })
    }

    /// 2D spatial AoA with u² + v² ≤ 1.
    pub fn two_d(u: f64, v: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&u) || !(-1.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter("spatial AoA components must lie in [-1, 1]"));
        }
        if u * u + v * v > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter("2D spatial AoA requires u^2 + v^2 <= 1"));
        }
        Ok(SpatialAoA::TwoD { u, v })
    }

    /// 1D AoA from the physical angle θ (radians): u = cos θ.
    pub fn from_theta_1d(theta_rad: f64) -> Self {
        SpatialAoA::OneD { u: theta_rad.cos() }
    }

    /// 2D AoA from elevation θ and azimuth φ (radians):
    /// u = sin θ cos φ, v = cos θ.
    pub fn from_angles_2d(theta_rad: f64, phi_rad: f64) -> Self {
        let u = theta_rad.sin() * phi_rad.cos();
        let v = theta_rad.cos();
        SpatialAoA::TwoD { u, v }
    }

    /// First spatial coordinate u.
    pub fn u(&self) -> f64 {
        match *self {
            SpatialAoA::OneD { u } | SpatialAoA::TwoD { u, .. } => u,
        }
    }

    /// Second spatial coordinate v, when 2D.
    pub fn v(&self) -> Option<f64> {
        match *self {
            SpatialAoA::OneD { .. } => None,
            SpatialAoA::TwoD { v, .. } => Some(v),
        }
    }
}

/// Antenna position vector (APV) plus the velocity sequence that produced it.
/// Invariants: every position inside [0, A], every |v_n| ≤ v^m, and
/// x_{n+1} = x_n + T_s·v_n within 1e−9·A.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory1D {
    positions_m: Vec<f64>,
    velocities_mps: Vec<f64>,
}

impl Trajectory1D {
    /// Validates and wraps an explicit position/velocity pair.
    pub fn new(positions_m: Vec<f64>, velocities_mps: Vec<f64>, cfg: &SensingConfig) -> Result<Self> {
        let n = cfg.num_snapshots;
        let a = cfg.segment_length_m()?;
        if positions_m.len() != n {
            return Err(Error::DimensionMismatch("positions length must equal num_snapshots"));
        }
        if velocities_mps.len() + 1 != n {
            return Err(Error::DimensionMismatch("velocities length must equal num_snapshots - 1"));
        }
        let box_slack = REL_SLACK * a.max(cfg.step_bound_m());
        for &x in &positions_m {
            if !(x >= -box_slack && x <= a + box_slack) {
                return Err(Error::InvalidParameter("position outside the segment [0, A]"));
            }
        }
        let v_slack = REL_SLACK * cfg.max_speed_mps;
        for &v in &velocities_mps {
            if !(v.abs() <= cfg.max_speed_mps + v_slack) {
                return Err(Error::SpeedInfeasible("velocity magnitude exceeds max_speed_mps"));
            }
        }
        let kin_tol = KINEMATIC_TOL * a.max(cfg.step_bound_m());
        let mut xk = positions_m[0];
        for i in 0..velocities_mps.len() {
            xk += cfg.snapshot_interval_s * velocities_mps[i];
            if (positions_m[i + 1] - xk).abs() > kin_tol {
                return Err(Error::InvalidParameter(
                    "positions are not the running integral of the velocities",
                ));
            }
        }
        Ok(Trajectory1D { positions_m, velocities_mps })
    }

    /// Builds positions from a start point and velocities, then validates.
    pub fn from_start_and_velocities(x1: f64, velocities_mps: &[f64], cfg: &SensingConfig) -> Result<Self> {
        let mut positions = Vec::with_capacity(velocities_mps.len() + 1);
        let mut x = x1;
        positions.push(x);
        for &v in velocities_mps {
            x += cfg.snapshot_interval_s * v;
            positions.push(x);
        }
        Self::new(positions, velocities_mps.to_vec(), cfg)
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions_m
    }

    pub fn velocities(&self) -> &[f64] {
        &self.velocities_mps
    }

    pub fn len(&self) -> usize {
        self.positions_m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions_m.is_empty()
    }
}

/// Antenna position matrix (rows x, y) plus the velocity matrix. Same
/// invariants as [`Trajectory1D`] with the speed bound on the Euclidean norm
/// of each velocity column.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory2D {
    x_m: Vec<f64>,
    y_m: Vec<f64>,
    vx_mps: Vec<f64>,
    vy_mps: Vec<f64>,
}

impl Trajectory2D {
    /// Validates and wraps explicit rows.
    pub fn new(
        x_m: Vec<f64>,
        y_m: Vec<f64>,
        vx_mps: Vec<f64>,
        vy_mps: Vec<f64>,
        cfg: &SensingConfig,
    ) -> Result<Self> {
        let n = cfg.num_snapshots;
        let (ax, ay) = cfg.rectangle_m()?;
        if x_m.len() != n || y_m.len() != n {
            return Err(Error::DimensionMismatch("position rows must have length num_snapshots"));
        }
        if vx_mps.len() + 1 != n || vy_mps.len() + 1 != n {
            return Err(Error::DimensionMismatch("velocity rows must have length num_snapshots - 1"));
        }
        let slack = REL_SLACK * ax.max(ay).max(cfg.step_bound_m());
        for i in 0..n {
            if !(x_m[i] >= -slack && x_m[i] <= ax + slack && y_m[i] >= -slack && y_m[i] <= ay + slack) {
                return Err(Error::InvalidParameter("position outside the rectangle region"));
            }
        }
        let v_slack = REL_SLACK * cfg.max_speed_mps;
        for i in 0..n - 1 {
            let speed = vx_mps[i].hypot(vy_mps[i]);
            if !(speed <= cfg.max_speed_mps + v_slack) {
                return Err(Error::SpeedInfeasible("velocity norm exceeds max_speed_mps"));
            }
        }
        let kin_tol = KINEMATIC_TOL * ax.max(ay).max(cfg.step_bound_m());
        let (mut xk, mut yk) = (x_m[0], y_m[0]);
        for i in 0..n - 1 {
            xk += cfg.snapshot_interval_s * vx_mps[i];
            yk += cfg.snapshot_interval_s * vy_mps[i];
            if (x_m[i + 1] - xk).abs() > kin_tol || (y_m[i + 1] - yk).abs() > kin_tol {
                return Err(Error::InvalidParameter(
                    "positions are not the running integral of the velocities",
                ));
            }
        }
        Ok(Trajectory2D { x_m, y_m, vx_mps, vy_mps })
    }

    /// Builds positions from a start point and velocity rows, then validates.
    pub fn from_start_and_velocities(
        start: (f64, f64),
        vx_mps: &[f64],
        vy_mps: &[f64],
        cfg: &SensingConfig,
    ) -> Result<Self> {
        let mut x = Vec::with_capacity(vx_mps.len() + 1);
        let mut y = Vec::with_capacity(vy_mps.len() + 1);
        let (mut cx, mut cy) = start;
        x.push(cx);
        y.push(cy);
        for i in 0..vx_mps.len().min(vy_mps.len()) {
            cx += cfg.snapshot_interval_s * vx_mps[i];
            cy += cfg.snapshot_interval_s * vy_mps[i];
            x.push(cx);
            y.push(cy);
        }
        Self::new(x, y, vx_mps.to_vec(), vy_mps.to_vec(), cfg)
    }

    pub fn x(&self) -> &[f64] {
        &self.x_m
    }

    pub fn y(&self) -> &[f64] {
        &self.y_m
    }

    pub fn vx(&self) -> &[f64] {
        &self.vx_mps
    }

    pub fn vy(&self) -> &[f64] {
        &self.vy_mps
    }

    pub fn len(&self) -> usize {
        self.x_m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_m.is_empty()
    }
}

/// One received complex sample per snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotVector {
    samples: Vec<Complex64>,
}

impl SnapshotVector {
    pub fn new(samples: Vec<Complex64>) -> Self {
        SnapshotVector { samples }
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Steering vector of the time-synthesized virtual array: element n is
/// exp(j·2π/λ·x_n·u). Unit modulus per element.
pub fn steering_1d(traj: &Trajectory1D, aoa: &SpatialAoA, cfg: &SensingConfig) -> Result<Vec<Complex64>> {
    if traj.len() != cfg.num_snapshots {
        return Err(Error::DimensionMismatch("trajectory length must equal num_snapshots"));
    }
    let u = match aoa {
        SpatialAoA::OneD { u } => *u,
        SpatialAoA::TwoD { .. } => return Err(Error::InvalidParameter("steering_1d needs a 1D AoA")),
    };
    let k = 2.0 * core::f64::consts::PI / cfg.wavelength_m;
    Ok(traj.positions().iter().map(|&x| Complex64::from_polar(1.0, k * x * u)).collect())
}

/// 2D steering vector: element n is exp(j·2π/λ·(x_n·u + y_n·v)).
pub fn steering_2d(traj: &Trajectory2D, aoa: &SpatialAoA, cfg: &SensingConfig) -> Result<Vec<Complex64>> {
    if traj.len() != cfg.num_snapshots {
        return Err(Error::DimensionMismatch("trajectory length must equal num_snapshots"));
    }
    let (u, v) = match aoa {
        SpatialAoA::TwoD { u, v } => (*u, *v),
        SpatialAoA::OneD { .. } => return Err(Error::InvalidParameter("steering_2d needs a 2D AoA")),
    };
    let k = 2.0 * core::f64::consts::PI / cfg.wavelength_m;
    Ok(traj
        .positions_iter()
        .map(|(x, y)| Complex64::from_polar(1.0, k * (x * u + y * v)))
        .collect())
}

impl Trajectory2D {
    fn positions_iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.x_m.iter().zip(self.y_m.iter()).map(|(&x, &y)| (x, y))
    }
}

/// y = β̃·a + z with z circularly-symmetric complex Gaussian of total
/// variance σ² per sample (independent real/imaginary parts of variance σ²/2,
/// drawn real-first per snapshot). Noise power is fixed at σ² = 1; callers
/// encode the SNR through |β̃|² = snr_linear.
fn add_noise(mut signal: Vec<Complex64>, noise_var: f64, rng_seed: u64) -> Vec<Complex64> {
    if noise_var > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let scale = (noise_var / 2.0).sqrt();
        for s in signal.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *s += Complex64::new(scale * re, scale * im);
        }
    }
    signal
}

/// Received snapshots for a 1D trajectory, σ² = 1, deterministic in the seed.
pub fn synthesize_received_1d(
    traj: &Trajectory1D,
    aoa: &SpatialAoA,
    cfg: &SensingConfig,
    beta_s: Complex64,
    rng_seed: u64,
) -> Result<SnapshotVector> {
    let mut a = steering_1d(traj, aoa, cfg)?;
    for e in a.iter_mut() {
        *e *= beta_s;
    }
    Ok(SnapshotVector::new(add_noise(a, 1.0, rng_seed)))
}

/// Received snapshots for a 2D trajectory, σ² = 1, deterministic in the seed.
pub fn synthesize_received_2d(
    traj: &Trajectory2D,
    aoa: &SpatialAoA,
    cfg: &SensingConfig,
    beta_s: Complex64,
    rng_seed: u64,
) -> Result<SnapshotVector> {
    let mut a = steering_2d(traj, aoa, cfg)?;
    for e in a.iter_mut() {
        *e *= beta_s;
    }
    Ok(SnapshotVector::new(add_noise(a, 1.0, rng_seed)))
}

/// Noise-free received snapshots (the σ² = 0 path): y = β̃·a exactly.
pub fn noiseless_received_1d(
    traj: &Trajectory1D,
    aoa: &SpatialAoA,
    cfg: &SensingConfig,
    beta_s: Complex64,
) -> Result<SnapshotVector> {
    let mut a = steering_1d(traj, aoa, cfg)?;
    for e in a.iter_mut() {
        *e *= beta_s;
    }
    Ok(SnapshotVector::new(a))
}

/// Noise-free received snapshots for a 2D trajectory.
pub fn noiseless_received_2d(
    traj: &Trajectory2D,
    aoa: &SpatialAoA,
    cfg: &SensingConfig,
    beta_s: Complex64,
) -> Result<SnapshotVector> {
    let mut a = steering_2d(traj, aoa, cfg)?;
    for e in a.iter_mut() {
        *e *= beta_s;
    }
    Ok(SnapshotVector::new(a))
}

/// Power of a weighted phase ramp evaluated on a uniform index grid:
/// P_k = |Σ_n w_n · exp(j(φ_n + k·dφ_n))|² for k = 0..npts.
///
/// Used by the MLE grid search and the correlation patterns. The per-index
/// phase advance is applied as one complex multiplication per (n, k) pair, so
/// the whole grid costs two sin/cos per element rather than one per (n, k);
/// magnitude drift over k accumulates at the last-ulp level only.
pub(crate) fn phase_ramp_power(
    weights: &[Complex64],
    phase0: &[f64],
    dphase: &[f64],
    npts: usize,
) -> Vec<f64> {
    debug_assert_eq!(weights.len(), phase0.len());
    debug_assert_eq!(weights.len(), dphase.len());
    let mut acc = alloc::vec![Complex64::new(0.0, 0.0); npts];
    for n in 0..weights.len() {
        let mut t = weights[n] * Complex64::from_polar(1.0, phase0[n]);
        let w = Complex64::from_polar(1.0, dphase[n]);
        for a in acc.iter_mut() {
            *a += t;
            t *= w;
        }
    }
    acc.into_iter().map(|c| c.norm_sqr()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_1d(n: usize, a: f64) -> SensingConfig {
        SensingConfig::new(0.05, 1e-3, n, 10.0, 1.0, Region::segment(a)).unwrap()
    }

    fn cfg_2d(n: usize, ax: f64, ay: f64) -> SensingConfig {
        SensingConfig::new(0.05, 1e-3, n, 10.0, 1.0, Region::rectangle(ax, ay)).unwrap()
    }

    #[test]
    fn config_rejects_nonpositive_parameters() {
        assert!(SensingConfig::new(0.0, 1e-3, 4, 1.0, 1.0, Region::segment(1.0)).is_err());
        assert!(SensingConfig::new(0.05, -1.0, 4, 1.0, 1.0, Region::segment(1.0)).is_err());
        assert!(SensingConfig::new(0.05, 1e-3, 0, 1.0, 1.0, Region::segment(1.0)).is_err());
        assert!(SensingConfig::new(0.05, 1e-3, 4, 0.0, 1.0, Region::segment(1.0)).is_err());
        assert!(SensingConfig::new(0.05, 1e-3, 4, 1.0, 0.0, Region::segment(1.0)).is_err());
        assert!(SensingConfig::new(0.05, 1e-3, 4, 1.0, 1.0, Region::segment(-1.0)).is_err());
    }

    #[test]
    fn step_bound_and_total_time() {
        let cfg = cfg_1d(100, 1.0);
        assert!((cfg.step_bound_m() - 0.01).abs() < 1e-15);
        assert!((cfg.total_time_s() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn trajectory_1d_validates_box_speed_kinematics() {
        let cfg = cfg_1d(3, 1.0);
        // Fine trajectory.
        assert!(Trajectory1D::new(alloc::vec![0.0, 0.01, 0.02], alloc::vec![10.0, 10.0], &cfg).is_ok());
        // Out of the box.
        assert!(Trajectory1D::new(alloc::vec![0.0, 0.01, 1.02], alloc::vec![10.0, 1010.0], &cfg).is_err());
        // Too fast.
        assert!(Trajectory1D::new(alloc::vec![0.0, 0.02, 0.04], alloc::vec![20.0, 20.0], &cfg).is_err());
        // Positions not matching velocities.
        assert!(Trajectory1D::new(alloc::vec![0.0, 0.01, 0.03], alloc::vec![10.0, 10.0], &cfg).is_err());
    }

    #[test]
    fn kinematic_roundtrip_recovers_velocities() {
        let cfg = cfg_1d(6, 1.0);
        let v = [3.0, -2.0, 10.0, 0.0, 7.5];
        let t = Trajectory1D::from_start_and_velocities(0.25, &v, &cfg).unwrap();
        for i in 0..v.len() {
            let vr = (t.positions()[i + 1] - t.positions()[i]) / cfg.snapshot_interval_s;
            assert!((vr - v[i]).abs() < 1e-9, "i={i} vr={vr}");
        }
    }

    #[test]
    fn trajectory_2d_speed_is_norm_bounded() {
        let cfg = cfg_2d(2, 1.0, 1.0);
        // Each component below the bound but the norm above it.
        let r = Trajectory2D::from_start_and_velocities((0.0, 0.0), &[8.0], &[8.0], &cfg);
        assert!(matches!(r, Err(Error::SpeedInfeasible(_))));
        assert!(Trajectory2D::from_start_and_velocities((0.0, 0.0), &[7.0], &[7.0], &cfg).is_ok());
    }

    #[test]
    fn aoa_validation() {
        assert!(SpatialAoA::one_d(0.71).is_ok());
        assert!(SpatialAoA::one_d(1.2).is_err());
        assert!(SpatialAoA::two_d(0.61, 0.71).is_ok());
        assert!(SpatialAoA::two_d(0.9, 0.9).is_err());
        let a = SpatialAoA::from_angles_2d(0.8, 0.3);
        let (u, v) = (a.u(), a.v().unwrap());
        assert!(u * u + v * v <= 1.0 + 1e-12);
    }

    #[test]
    fn steering_1d_trivial_cases() {
        let cfg = cfg_1d(3, 1.0);
        let zero = Trajectory1D::new(alloc::vec![0.0; 3], alloc::vec![0.0; 2], &cfg).unwrap();
        let a = steering_1d(&zero, &SpatialAoA::one_d(0.37).unwrap(), &cfg).unwrap();
        for e in &a {
            assert!((e - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }

        // Broadside: u = 0 gives all ones for any positions.
        let cfg5 = cfg_1d(5, 1.0);
        let t = Trajectory1D::from_start_and_velocities(0.1, &[10.0, -5.0, 2.0, 10.0], &cfg5).unwrap();
        let a = steering_1d(&t, &SpatialAoA::one_d(0.0).unwrap(), &cfg5).unwrap();
        for e in &a {
            assert!((e - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }

        // Half-wavelength spacing at endfire flips the phase by π.
        let cfg2 = SensingConfig::new(0.05, 1e-3, 2, 30.0, 1.0, Region::segment(1.0)).unwrap();
        let t = Trajectory1D::new(alloc::vec![0.0, 0.025], alloc::vec![25.0], &cfg2).unwrap();
        let a = steering_1d(&t, &SpatialAoA::one_d(1.0).unwrap(), &cfg2).unwrap();
        assert!((a[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((a[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn steering_2d_reduces_to_1d_on_the_x_axis() {
        let cfg2 = cfg_2d(4, 1.0, 1.0);
        let t2 = Trajectory2D::from_start_and_velocities((0.0, 0.0), &[10.0, 5.0, 10.0], &[0.0; 3], &cfg2).unwrap();
        let a2 = steering_2d(&t2, &SpatialAoA::two_d(0.6, 0.0).unwrap(), &cfg2).unwrap();

        let cfg1 = cfg_1d(4, 1.0);
        let t1 = Trajectory1D::from_start_and_velocities(0.0, &[10.0, 5.0, 10.0], &cfg1).unwrap();
        let a1 = steering_1d(&t1, &SpatialAoA::one_d(0.6).unwrap(), &cfg1).unwrap();
        for (p, q) in a2.iter().zip(a1.iter()) {
            assert!((p - q).norm() < 1e-12);
        }

        // Diagonal two-point path at η = (1, 0): phase π from the x term only.
        let cfgd = SensingConfig::new(0.05, 1e-3, 2, 40.0, 1.0, Region::rectangle(1.0, 1.0)).unwrap();
        let t = Trajectory2D::new(
            alloc::vec![0.0, 0.025],
            alloc::vec![0.0, 0.025],
            alloc::vec![25.0],
            alloc::vec![25.0],
            &cfgd,
        )
        .unwrap();
        let a = steering_2d(&t, &SpatialAoA::two_d(1.0, 0.0).unwrap(), &cfgd).unwrap();
        assert!((a[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn steering_elements_have_unit_modulus() {
        let cfg = cfg_1d(64, 1.0);
        let mut vels = Vec::new();
        for i in 0..63 {
            vels.push(if i % 3 == 0 { 10.0 } else { -4.0 });
        }
        // Keep inside the box by starting mid-segment.
        let t = Trajectory1D::from_start_and_velocities(0.5, &vels, &cfg).unwrap();
        let a = steering_1d(&t, &SpatialAoA::one_d(-0.83).unwrap(), &cfg).unwrap();
        for e in &a {
            assert!((e.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn synthesis_is_deterministic_and_noiseless_path_exact() {
        let cfg = cfg_1d(16, 1.0);
        let t = Trajectory1D::from_start_and_velocities(0.0, &[10.0; 15], &cfg).unwrap();
        let aoa = SpatialAoA::one_d(0.71).unwrap();
        let beta = Complex64::new(2.0, -1.0);

        let y1 = synthesize_received_1d(&t, &aoa, &cfg, beta, 42).unwrap();
        let y2 = synthesize_received_1d(&t, &aoa, &cfg, beta, 42).unwrap();
        assert_eq!(y1, y2);
        let y3 = synthesize_received_1d(&t, &aoa, &cfg, beta, 43).unwrap();
        assert_ne!(y1, y3);

        let clean = noiseless_received_1d(&t, &aoa, &cfg, beta).unwrap();
        let a = steering_1d(&t, &aoa, &cfg).unwrap();
        for (yc, an) in clean.samples().iter().zip(a.iter()) {
            assert!((yc - beta * an).norm() < 1e-15);
        }
    }

    #[test]
    fn noise_variance_matches_sigma_squared() {
        let cfg = cfg_1d(100_000, 10_000.0);
        let t = Trajectory1D::from_start_and_velocities(0.0, &alloc::vec![10.0; 99_999], &cfg).unwrap();
        let aoa = SpatialAoA::one_d(0.3).unwrap();
        let beta = Complex64::new(1.0, 0.0);
        let y = synthesize_received_1d(&t, &aoa, &cfg, beta, 7).unwrap();
        let a = steering_1d(&t, &aoa, &cfg).unwrap();
        let mut acc = 0.0;
        for (yn, an) in y.samples().iter().zip(a.iter()) {
            acc += (yn - beta * an).norm_sqr();
        }
        let var = acc / y.len() as f64;
        assert!((var - 1.0).abs() < 0.02, "empirical noise variance {var}");
    }

    #[test]
    fn phase_ramp_power_matches_direct_evaluation() {
        let n = 17;
        let mut weights = Vec::new();
        let mut phase0 = Vec::new();
        let mut dphase = Vec::new();
        for i in 0..n {
            let fi = i as f64;
            weights.push(Complex64::new(0.3 + 0.01 * fi, -0.2 + 0.02 * fi));
            phase0.push(0.1 * fi * fi - 0.7 * fi);
            dphase.push(0.01 * fi + 0.002);
        }
        let npts = 40;
        let fast = phase_ramp_power(&weights, &phase0, &dphase, npts);
        for k in 0..npts {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..n {
                s += weights[i] * Complex64::from_polar(1.0, phase0[i] + k as f64 * dphase[i]);
            }
            assert!((fast[k] - s.norm_sqr()).abs() < 1e-9 * s.norm_sqr().max(1.0), "k={k}");
        }
    }
}
