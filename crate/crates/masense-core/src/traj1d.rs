//! Globally optimal 1D trajectories, their mirrored counterparts, benchmark
//! paths, and a brute-force variance-maximization oracle.
//!
//! The 1D CRB depends on the trajectory only through the position variance,
//! so maximizing the variance subject to the segment box, the speed bound,
//! and the kinematic law solves the design problem exactly. Two regimes
//! exist. When the segment is long enough that the region never binds
//! (A ≥ (N−1)Δ, time-constrained), the optimum is a max-speed ramp with
//! variance (N²−1)Δ²/12. Otherwise (space-constrained) the optimum parks
//! N_L snapshots at 0, crosses the segment with N_M full-speed steps plus one
//! fractional step, and parks N_R snapshots at A.
//!
//! The oracle searches monotone grid trajectories exhaustively via dynamic
//! programming over (index, grid point, partial sum) with integer-exact
//! scoring, so closed-form optimality claims can be validated without
//! trusting floating-point comparisons.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::crb::{classify_regime, crb_1d_from_variance, Regime};
use crate::model::{SensingConfig, Trajectory1D};
use crate::{Error, Result};

const PI: f64 = core::f64::consts::PI;

/// Upper bound on oracle DP table entries before the search refuses to run.
const ORACLE_STATE_BUDGET: usize = 50_000_000;

/// Partition of the N snapshots in the space-constrained optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupSizes {
    /// Snapshots parked at 0.
    pub n_left: usize,
    /// Full-speed interior steps; N_M = ⌈A/Δ⌉ − 1.
    pub n_mid: usize,
    /// Snapshots parked at A.
    pub n_right: usize,
}

/// Smallest integer k with k·Δ ≥ A, robust to the quotient A/Δ landing on
/// either side of an integer after rounding.
fn ceil_ratio(a: f64, delta: f64) -> i64 {
    let mut k = (a / delta).ceil() as i64;
    while (k - 1) as f64 * delta >= a {
        k -= 1;
    }
    while (k as f64) * delta < a {
        k += 1;
    }
    k
}

/// Group sizes of the space-constrained optimum. Requires A < (N−1)Δ.
pub fn group_sizes(cfg: &SensingConfig) -> Result<GroupSizes> {
    if classify_regime(cfg)? != Regime::SpaceConstrained {
        return Err(Error::RegimeMismatch("group sizes are defined in the space-constrained regime"));
    }
    let a = cfg.segment_length_m()?;
    let n = cfg.num_snapshots;
    let n_mid = (ceil_ratio(a, cfg.step_bound_m()) - 1).max(0) as usize;
    // A < (N−1)Δ guarantees n_mid ≤ N−2, so both outer groups are nonempty.
    let rest = n - n_mid;
    let n_left = rest.div_ceil(2);
    let n_right = rest / 2;
    Ok(GroupSizes { n_left, n_mid, n_right })
}

/// Max-speed ramp x_n = x1 + (n−1)Δ for the time-constrained regime.
/// `x1` must lie in [0, A − (N−1)Δ]; pass 0.0 for the canonical anchor.
pub fn optimal_trajectory_tc(cfg: &SensingConfig, x1: f64) -> Result<Trajectory1D> {
    if classify_regime(cfg)? != Regime::TimeConstrained {
        return Err(Error::RegimeMismatch("max-speed ramp requires A >= (N-1)*step_bound"));
    }
    let a = cfg.segment_length_m()?;
    let reach = (cfg.num_snapshots as f64 - 1.0) * cfg.step_bound_m();
    let slack = 1e-12 * a.max(cfg.step_bound_m());
    if !(x1 >= -slack && x1 <= a - reach + slack) {
        return Err(Error::InvalidParameter("x1 must lie in [0, A - (N-1)*step_bound]"));
    }
    let v = vec![cfg.max_speed_mps; cfg.num_snapshots - 1];
    Trajectory1D::from_start_and_velocities(x1, &v, cfg)
}

/// Three-group optimum for the space-constrained regime: N_L snapshots at 0,
/// N_M full-speed steps, one fractional step of (A − N_M·Δ)/T_s, and N_R
/// snapshots at A.
pub fn optimal_trajectory_sc(cfg: &SensingConfig) -> Result<Trajectory1D> {
    let g = group_sizes(cfg)?;
    let a = cfg.segment_length_m()?;
    let delta = cfg.step_bound_m();
    let n = cfg.num_snapshots;
    let mut v = vec![0.0; n - 1];
    for i in 0..g.n_mid {
        v[g.n_left - 1 + i] = cfg.max_speed_mps;
    }
    // Fractional crossing step; N_M·Δ < A ≤ (N_M+1)Δ keeps it in (0, v^m].
    v[g.n_left - 1 + g.n_mid] = (a - g.n_mid as f64 * delta) / cfg.snapshot_interval_s;
    Trajectory1D::from_start_and_velocities(0.0, &v, cfg)
}

/// Optimal trajectory for whichever regime the config is in.
pub fn optimal_trajectory(cfg: &SensingConfig) -> Result<Trajectory1D> {
    match classify_regime(cfg)? {
        Regime::TimeConstrained => optimal_trajectory_tc(cfg, 0.0),
        Regime::SpaceConstrained => optimal_trajectory_sc(cfg),
    }
}

/// Reflects a trajectory across the segment midpoint: x̃_n = A − x_n with
/// every velocity negated. An involution that preserves the position
/// multiset, hence variance and CRB.
pub fn mirror(traj: &Trajectory1D, cfg: &SensingConfig) -> Result<Trajectory1D> {
    let a = cfg.segment_length_m()?;
    let positions = traj.positions().iter().map(|&x| a - x).collect();
    let velocities = traj.velocities().iter().map(|&v| -v).collect();
    Trajectory1D::new(positions, velocities, cfg)
}

/// Variance of the max-speed ramp: (N²−1)Δ²/12.
pub fn tc_variance_closed(n: usize, delta: f64) -> f64 {
    let nf = n as f64;
    (nf * nf - 1.0) * delta * delta / 12.0
}

/// CRB of the max-speed ramp: 3λ²/(2π²·snr·Δ²·N(N²−1)). This is the formula
/// value; it equals the trajectory bound only in the time-constrained regime.
pub fn crb_tc_closed(cfg: &SensingConfig) -> f64 {
    let nf = cfg.num_snapshots as f64;
    let lam = cfg.wavelength_m;
    let delta = cfg.step_bound_m();
    if nf <= 1.0 {
        return f64::INFINITY;
    }
    3.0 * lam * lam / (2.0 * PI * PI * cfg.snr_linear * delta * delta * nf * (nf * nf - 1.0))
}

/// Variance of the space-constrained optimum in closed form:
/// Δ²·N_M(N_M+1)(2N_M+1)/(6N) + A²N_R/N − [Δ·N_M(N_M+1)/2 + N_R·A]²/N².
pub fn sc_variance_closed(cfg: &SensingConfig) -> Result<f64> {
    let g = group_sizes(cfg)?;
    let a = cfg.segment_length_m()?;
    let delta = cfg.step_bound_m();
    let n = cfg.num_snapshots as f64;
    let nm = g.n_mid as f64;
    let nr = g.n_right as f64;
    let sum_sq = delta * delta * nm * (nm + 1.0) * (2.0 * nm + 1.0) / 6.0 + a * a * nr;
    let sum = delta * nm * (nm + 1.0) / 2.0 + nr * a;
    Ok(sum_sq / n - (sum / n) * (sum / n))
}

/// CRB of the space-constrained optimum.
pub fn crb_sc_closed(cfg: &SensingConfig) -> Result<f64> {
    Ok(crb_1d_from_variance(sc_variance_closed(cfg)?, cfg))
}

/// Benchmark 1D motion patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark1D {
    /// Constant speed A/(T_s·N) from 0 toward A.
    MoveForward,
    /// Max-speed triangle wave bouncing between 0 and A.
    BackAndForth,
}

/// Builds a benchmark trajectory. MoveForward errors when the required
/// constant speed exceeds the bound; BackAndForth clamps the arriving step on
/// the boundary and reverses direction on the following step.
pub fn benchmark_1d(kind: Benchmark1D, cfg: &SensingConfig) -> Result<Trajectory1D> {
    let a = cfg.segment_length_m()?;
    let n = cfg.num_snapshots;
    match kind {
        Benchmark1D::MoveForward => {
            let speed = a / (cfg.snapshot_interval_s * n as f64);
            if speed > cfg.max_speed_mps * (1.0 + 1e-12) {
                return Err(Error::SpeedInfeasible("constant forward speed exceeds max_speed_mps"));
            }
            Trajectory1D::from_start_and_velocities(0.0, &vec![speed; n - 1], cfg)
        }
        Benchmark1D::BackAndForth => {
            let delta = cfg.step_bound_m();
            let mut positions = Vec::with_capacity(n);
            let mut velocities = Vec::with_capacity(n - 1);
            let mut pos = 0.0f64;
            let mut dir = 1.0f64;
            positions.push(pos);
            for _ in 1..n {
                let raw = pos + dir * delta;
                let new = raw.clamp(0.0, a);
                velocities.push((new - pos) / cfg.snapshot_interval_s);
                pos = new;
                positions.push(pos);
                if pos >= a && dir > 0.0 {
                    dir = -1.0;
                } else if pos <= 0.0 && dir < 0.0 {
                    dir = 1.0;
                }
            }
            Trajectory1D::new(positions, velocities, cfg)
        }
    }
}

/// Best monotone grid trajectory found by the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Lexicographically smallest optimal position vector, in meters.
    pub positions: Vec<f64>,
    /// Population variance of those positions, in m².
    pub variance: f64,
}

/// Exhaustive variance maximization over nondecreasing trajectories on the
/// grid {0, g, 2g, …, A} with g = A/(G·⌈A/Δ⌉) and per-step displacement ≤ Δ.
///
/// Monotonicity loses no generality: sorting any bounded-step sequence keeps
/// every sorted gap within the same step bound, and variance ignores visit
/// order. Scoring is integer-exact (maximize N·Σq² − (Σq)² in grid units) via
/// a suffix table over (index, grid point, suffix sum); ties resolve to the
/// lexicographically smallest position vector.
pub fn oracle_max_variance(cfg: &SensingConfig, grid_points_per_delta: usize) -> Result<OracleResult> {
    let a = cfg.segment_length_m()?;
    let n = cfg.num_snapshots;
    if grid_points_per_delta == 0 {
        return Err(Error::InvalidParameter("grid_points_per_delta must be at least 1"));
    }
    if a == 0.0 || n == 1 {
        return Ok(OracleResult { positions: vec![0.0; n], variance: 0.0 });
    }
    let delta = cfg.step_bound_m();
    let segments = ceil_ratio(a, delta).max(1) as usize;
    let p = grid_points_per_delta * segments + 1;
    let g = a / ((p - 1) as f64);
    // Largest admissible step in grid units.
    let dmax = {
        let mut d = (delta * (1.0 + 1e-12) / g) as usize;
        while (d + 1) as f64 * g <= delta * (1.0 + 1e-12) {
            d += 1;
        }
        while d > 0 && d as f64 * g > delta * (1.0 + 1e-12) {
            d -= 1;
        }
        d
    };
    let smax = (p - 1) * n;
    let states = n
        .checked_mul(p)
        .and_then(|x| x.checked_mul(smax + 1))
        .ok_or(Error::SearchBudgetExceeded { states: usize::MAX, budget: ORACLE_STATE_BUDGET })?;
    if states > ORACLE_STATE_BUDGET {
        return Err(Error::SearchBudgetExceeded { states, budget: ORACLE_STATE_BUDGET });
    }

    const NEG: i64 = i64::MIN / 2;
    // suf[idx][point][sum] = max Σq² over monotone suffixes q_idx..q_{N−1}
    // with q_idx = point and Σ q = sum; NEG marks infeasible.
    let mut suf: Vec<Vec<Vec<i64>>> = Vec::with_capacity(n);
    for _ in 0..n {
        suf.push(vec![vec![NEG; smax + 1]; p]);
    }
    for q in 0..p {
        suf[n - 1][q][q] = (q * q) as i64;
    }
    for idx in (0..n - 1).rev() {
        for q in 0..p {
            let hi = (q + dmax).min(p - 1);
            for s in q..=smax {
                let mut best = NEG;
                for q2 in q..=hi {
                    if s >= q {
                        let rest = s - q;
                        if rest <= smax {
                            let c = suf[idx + 1][q2][rest];
                            if c > best {
                                best = c;
                            }
                        }
                    }
                }
                if best > NEG {
                    suf[idx][q][s] = best + (q * q) as i64;
                }
            }
        }
    }

    // Optimal integer score over all starts and totals.
    let nf_i = n as i64;
    let mut best_score = i64::MIN;
    for q in 0..p {
        for s in 0..=smax {
            let quad = suf[0][q][s];
            if quad > NEG {
                let score = nf_i * quad - (s as i64) * (s as i64);
                if score > best_score {
                    best_score = score;
                }
            }
        }
    }

    // Lexicographically smallest reconstruction: walk forward keeping the set
    // of (remaining sum, remaining Σq²) pairs that still reach the optimum.
    let mut qs: Vec<usize> = Vec::with_capacity(n);
    let mut cands: Vec<(usize, i64)> = Vec::new();
    let mut first = None;
    for q in 0..p {
        for s in 0..=smax {
            let quad = suf[0][q][s];
            if quad > NEG && nf_i * quad - (s as i64) * (s as i64) == best_score {
                if first.is_none() {
                    first = Some(q);
                }
                if first == Some(q) {
                    cands.push((s, quad));
                }
            }
        }
        if first.is_some() {
            break;
        }
    }
    let q0 = first.expect("optimum exists");
    qs.push(q0);
    let mut cands: Vec<(usize, i64)> =
        cands.into_iter().map(|(s, quad)| (s - q0, quad - (q0 * q0) as i64)).collect();
    for idx in 1..n {
        let prev = *qs.last().expect("nonempty");
        let hi = (prev + dmax).min(p - 1);
        let mut chosen = None;
        for q in prev..=hi {
            if cands.iter().any(|&(s, quad)| s <= smax && suf[idx][q][s] == quad) {
                chosen = Some(q);
                break;
            }
        }
        let q = chosen.expect("candidate walk stays feasible");
        cands = cands
            .into_iter()
            .filter(|&(s, quad)| s <= smax && suf[idx][q][s] == quad)
            .map(|(s, quad)| (s - q, quad - (q * q) as i64))
            .collect();
        qs.push(q);
    }

    let positions: Vec<f64> = qs.iter().map(|&q| q as f64 * g).collect();
    // Exact integer score back to m²: (N·Σq² − S²)/N² in units of g².
    let s_total: i64 = qs.iter().map(|&q| q as i64).sum();
    let quad_total: i64 = qs.iter().map(|&q| (q * q) as i64).sum();
    debug_assert_eq!(nf_i * quad_total - s_total * s_total, best_score);
    let variance = best_score as f64 / (nf_i * nf_i) as f64 * g * g;
    Ok(OracleResult { positions, variance })
}
