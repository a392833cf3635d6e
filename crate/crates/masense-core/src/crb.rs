//! Cramér-Rao bounds for AoA estimation from movable-antenna snapshots and
//! from fixed arrays.
//!
//! With noise power normalized to σ² = 1 and `snr_linear` carrying P|β|²/σ²,
//! the bound on the spatial AoA u for a 1D trajectory is
//! λ² / (8π² · snr · N · var(x)); in 2D the variance is replaced by the
//! effective variance var(x) − cov²/var(y) (and symmetrically for v). Static
//! half-wavelength arrays admit the closed forms implemented by
//! [`crb_fpa_ula`] and [`crb_fpa_upa`], which include the M-fold array gain.
//!
//! Degeneracy convention: a bound is +∞ exactly when its effective variance
//! term vanishes. A coordinate row is treated as constant when its span is
//! exactly zero (the span test is immune to the last-ulp variance residue a
//! two-pass mean can leave), and a collinear 2D trajectory is detected by the
//! effective variance falling below 1e−12 of var(x).

#[allow(unused_imports)]
use num_traits::Float;

use crate::model::{SensingConfig, Trajectory1D, Trajectory2D};
use crate::stats::{variance_stats, VarianceStats};
use crate::{Error, Result};

const PI: f64 = core::f64::consts::PI;

/// Relative floor under which the 2D effective variance counts as zero.
const EFFECTIVE_VAR_REL_FLOOR: f64 = 1e-12;

/// Which of the two closed-form optimal-trajectory regimes a 1D config is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// A ≥ (N−1)Δ: the region never binds and the max-speed ramp fits.
    TimeConstrained,
    /// A < (N−1)Δ: the region is the binding constraint.
    SpaceConstrained,
}

/// CRB values plus the variance diagnostics they were computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct CrbReport {
    /// Bound on u, in u-units squared; +∞ when the effective variance is 0.
    pub crb_u: f64,
    /// Bound on v; absent for 1D trajectories.
    pub crb_v: Option<f64>,
    pub var_x: f64,
    pub var_y: f64,
    pub cov_xy: f64,
    /// Regime split of the 1D configuration; absent for 2D.
    pub regime: Option<Regime>,
    /// Largest coordinate span of the visited positions, in meters.
    pub effective_aperture_m: f64,
}

/// TimeConstrained iff A ≥ (N−1)Δ. Segment regions only.
pub fn classify_regime(cfg: &SensingConfig) -> Result<Regime> {
    let a = cfg.segment_length_m()?;
    let needed = (cfg.num_snapshots as f64 - 1.0) * cfg.step_bound_m();
    Ok(if a >= needed { Regime::TimeConstrained } else { Regime::SpaceConstrained })
}

fn span(v: &[f64]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in v {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if v.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// Core 1D bound: λ² / (8π² · snr · N · var_x); +∞ when var_x = 0.
pub fn crb_1d_from_variance(var_x: f64, cfg: &SensingConfig) -> f64 {
    if var_x <= 0.0 {
        return f64::INFINITY;
    }
    let lam = cfg.wavelength_m;
    lam * lam / (8.0 * PI * PI * cfg.snr_linear * cfg.num_snapshots as f64 * var_x)
}

/// Core 2D bounds from position statistics: the u bound uses the effective
/// variance var_x − cov²/var_y and the v bound its mirror image. A vanishing
/// partner variance with zero covariance drops the correction term.
pub fn crb_2d_from_stats(stats: &VarianceStats, cfg: &SensingConfig) -> (f64, f64) {
    let eff_u = effective_variance(stats.var_x, stats.var_y, stats.cov_xy);
    let eff_v = effective_variance(stats.var_y, stats.var_x, stats.cov_xy);
    (crb_1d_from_variance(eff_u, cfg), crb_1d_from_variance(eff_v, cfg))
}

/// var_own − cov²/var_other, with the degenerate conventions: the correction
/// is 0 when var_other = 0 and cov = 0, and the whole expression is 0 (bound
/// +∞) when var_other = 0 with cov ≠ 0 or when cancellation leaves less than
/// 1e−12 of var_own.
fn effective_variance(var_own: f64, var_other: f64, cov: f64) -> f64 {
    if var_own <= 0.0 {
        return 0.0;
    }
    let eff = if var_other <= 0.0 {
        if cov == 0.0 {
            var_own
        } else {
            0.0
        }
    } else {
        var_own - cov * cov / var_other
    };
    if eff <= EFFECTIVE_VAR_REL_FLOOR * var_own {
        0.0
    } else {
        eff
    }
}

/// CRB report for a 1D trajectory, with regime classification attached.
pub fn crb_1d(traj: &Trajectory1D, cfg: &SensingConfig) -> Result<CrbReport> {
    if traj.len() != cfg.num_snapshots {
        return Err(Error::DimensionMismatch("trajectory length must equal num_snapshots"));
    }
    let mut stats = variance_stats(traj.positions(), None)?;
    let aperture = span(traj.positions());
    if aperture == 0.0 {
        stats.var_x = 0.0;
    }
    Ok(CrbReport {
        crb_u: crb_1d_from_variance(stats.var_x, cfg),
        crb_v: None,
        var_x: stats.var_x,
        var_y: 0.0,
        cov_xy: 0.0,
        regime: Some(classify_regime(cfg)?),
        effective_aperture_m: aperture,
    })
}

/// CRB report for a 2D trajectory.
pub fn crb_2d(traj: &Trajectory2D, cfg: &SensingConfig) -> Result<CrbReport> {
    if traj.len() != cfg.num_snapshots {
        return Err(Error::DimensionMismatch("trajectory length must equal num_snapshots"));
    }
    let mut stats = variance_stats(traj.x(), Some(traj.y()))?;
    let span_x = span(traj.x());
    let span_y = span(traj.y());
    // A zero-span row is exactly constant; clear the rounding residue so the
    // degenerate conventions fire on the mathematical values.
    if span_x == 0.0 {
        stats.var_x = 0.0;
        stats.cov_xy = 0.0;
    }
    if span_y == 0.0 {
        stats.var_y = 0.0;
        stats.cov_xy = 0.0;
    }
    let (crb_u, crb_v) = crb_2d_from_stats(&stats, cfg);
    Ok(CrbReport {
        crb_u,
        crb_v: Some(crb_v),
        var_x: stats.var_x,
        var_y: stats.var_y,
        cov_xy: stats.cov_xy,
        regime: None,
        effective_aperture_m: span_x.max(span_y),
    })
}

/// Population variance of an M-element half-wavelength ULA: (λ/2)²(M²−1)/12.
pub fn ula_halfwave_variance(m: usize, wavelength_m: f64) -> f64 {
    let d = wavelength_m / 2.0;
    let mf = m as f64;
    d * d * (mf * mf - 1.0) / 12.0
}

/// CRB on u for a fixed half-wavelength M-element ULA observed over N
/// snapshots: 6 / (π² · snr · N · M(M² − 1)). Includes the M-fold array gain.
pub fn crb_fpa_ula(m: usize, cfg: &SensingConfig) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidParameter("crb_fpa_ula needs M >= 2"));
    }
    let mf = m as f64;
    Ok(6.0 / (PI * PI * cfg.snr_linear * cfg.num_snapshots as f64 * mf * (mf * mf - 1.0)))
}

/// CRB on u (and by symmetry v) for a fixed half-wavelength √M×√M UPA over N
/// snapshots: 6 / (π² · snr · N · M(M − 1)). Requires M a perfect square ≥ 4.
pub fn crb_fpa_upa(m: usize, cfg: &SensingConfig) -> Result<f64> {
    let side = (m as f64).sqrt().round() as usize;
    if side * side != m {
        return Err(Error::InvalidParameter("crb_fpa_upa needs M to be a perfect square"));
    }
    if m < 4 {
        return Err(Error::InvalidParameter("crb_fpa_upa needs M >= 4"));
    }
    let mf = m as f64;
    Ok(6.0 / (PI * PI * cfg.snr_linear * cfg.num_snapshots as f64 * mf * (mf - 1.0)))
}

/// Side length of the square UPA, erroring when M is not a perfect square.
pub fn upa_side(m: usize) -> Result<usize> {
    let side = (m as f64).sqrt().round() as usize;
    if side * side != m {
        return Err(Error::InvalidParameter("M must be a perfect square"));
    }
    Ok(side)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Region, SensingConfig, Trajectory1D, Trajectory2D};
    use alloc::vec;
    use alloc::vec::Vec;

    fn cfg_seg(n: usize, a: f64, snr: f64) -> SensingConfig {
        SensingConfig::new(0.05, 1e-3, n, 10.0, snr, Region::segment(a)).unwrap()
    }

    fn splitmix(state: &mut u64) -> f64 {
        *state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        (z ^ (z >> 31)) as f64 / u64::MAX as f64
    }

    #[test]
    fn constant_trajectory_has_infinite_bound() {
        let cfg = cfg_seg(8, 1.0, 2.0);
        let t = Trajectory1D::new(vec![0.3; 8], vec![0.0; 7], &cfg).unwrap();
        let r = crb_1d(&t, &cfg).unwrap();
        assert!(r.crb_u.is_infinite());
        assert_eq!(r.effective_aperture_m, 0.0);
    }

    #[test]
    fn ramp_matches_closed_form_over_random_draws() {
        // Max-speed ramp: var = (N²−1)Δ²/12, so the bound must equal
        // 3λ²/(2π²·snr·Δ²·N(N²−1)). 20 seeded draws, 1e−10 relative.
        let mut state = 11u64;
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let n = 3 + (splitmix(&mut state) * 60.0) as usize;
            let lam = 0.01 + 0.09 * splitmix(&mut state);
            let ts = 5e-4 + 1e-3 * splitmix(&mut state);
            let vm = 1.0 + 9.0 * splitmix(&mut state);
            let snr = 0.5 + 10.0 * splitmix(&mut state);
            let delta = vm * ts;
            let a = (n as f64) * delta * (1.0 + splitmix(&mut state));
            let cfg = SensingConfig::new(lam, ts, n, vm, snr, Region::segment(a)).unwrap();
            let t = Trajectory1D::from_start_and_velocities(0.0, &vec![vm; n - 1], &cfg).unwrap();
            let got = crb_1d(&t, &cfg).unwrap().crb_u;
            let nf = n as f64;
            let want =
                3.0 * lam * lam / (2.0 * PI * PI * snr * delta * delta * nf * (nf * nf - 1.0));
            worst = worst.max((got - want).abs() / want);
        }
        println!("ramp vs closed form: worst rel err {worst:.3e}");
        assert!(worst < 1e-10);
    }

    #[test]
    fn bound_scales_inversely_with_snr() {
        let cfg1 = cfg_seg(5, 1.0, 1.0);
        let cfg2 = cfg_seg(5, 1.0, 2.0);
        let t = Trajectory1D::from_start_and_velocities(0.0, &[10.0; 4], &cfg1).unwrap();
        let r1 = crb_1d(&t, &cfg1).unwrap().crb_u;
        let r2 = crb_1d(&t, &cfg2).unwrap().crb_u;
        assert!((r1 / r2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_in_variance() {
        // Nested trajectories: each widens the previous, so variance grows
        // and the bound must strictly drop.
        let cfg = cfg_seg(4, 1.0, 1.0);
        let mut prev = f64::INFINITY;
        for k in 1..=5 {
            let step = 2.0 * k as f64;
            let t = Trajectory1D::from_start_and_velocities(0.0, &[step; 3], &cfg).unwrap();
            let r = crb_1d(&t, &cfg).unwrap().crb_u;
            assert!(r < prev, "k={k}: {r} !< {prev}");
            prev = r;
        }
    }

    #[test]
    fn x_axis_motion_embeds_the_1d_bound() {
        let n = 9;
        let cfg2 = SensingConfig::new(0.05, 1e-3, n, 10.0, 3.0, Region::rectangle(1.0, 1.0)).unwrap();
        let vx = vec![7.0; n - 1];
        let t2 = Trajectory2D::from_start_and_velocities((0.0, 0.4), &vx, &vec![0.0; n - 1], &cfg2).unwrap();
        let r2 = crb_2d(&t2, &cfg2).unwrap();
        assert!(r2.crb_v.unwrap().is_infinite());

        let cfg1 = SensingConfig::new(0.05, 1e-3, n, 10.0, 3.0, Region::segment(1.0)).unwrap();
        let t1 = Trajectory1D::from_start_and_velocities(0.0, &vx, &cfg1).unwrap();
        let r1 = crb_1d(&t1, &cfg1).unwrap();
        assert!((r2.crb_u - r1.crb_u).abs() < 1e-12 * r1.crb_u);
    }

    #[test]
    fn axis_swap_swaps_the_bounds() {
        let n = 12;
        let cfg = SensingConfig::new(0.05, 1e-3, n, 10.0, 1.0, Region::rectangle(0.6, 0.6)).unwrap();
        let mut vx = Vec::new();
        let mut vy = Vec::new();
        let mut state = 5u64;
        for _ in 0..n - 1 {
            let ang = 2.0 * PI * splitmix(&mut state);
            vx.push(7.0 * ang.cos());
            vy.push(7.0 * ang.sin());
        }
        let t = Trajectory2D::from_start_and_velocities((0.3, 0.3), &vx, &vy, &cfg).unwrap();
        let ts = Trajectory2D::from_start_and_velocities((0.3, 0.3), &vy, &vx, &cfg).unwrap();
        let r = crb_2d(&t, &cfg).unwrap();
        let rs = crb_2d(&ts, &cfg).unwrap();
        assert_eq!(r.crb_u, rs.crb_v.unwrap());
        assert_eq!(r.crb_v.unwrap(), rs.crb_u);
        assert_eq!(r.cov_xy, rs.cov_xy);
    }

    #[test]
    fn collinear_rows_are_degenerate() {
        // Diagonal line: cov² = var_x·var_y, effective variance cancels.
        let n = 6;
        let cfg = SensingConfig::new(0.05, 1e-3, n, 10.0, 1.0, Region::rectangle(1.0, 1.0)).unwrap();
        let v = vec![7.0; n - 1];
        let t = Trajectory2D::from_start_and_velocities((0.0, 0.0), &v, &v, &cfg).unwrap();
        let r = crb_2d(&t, &cfg).unwrap();
        assert!(r.crb_u.is_infinite());
        assert!(r.crb_v.unwrap().is_infinite());
    }

    #[test]
    fn regime_classification() {
        // A=10, N=5, Δ=1.
        let cfg = SensingConfig::new(0.05, 1.0, 5, 1.0, 1.0, Region::segment(10.0)).unwrap();
        assert_eq!(classify_regime(&cfg).unwrap(), Regime::TimeConstrained);
        // A=2, N=5, Δ=1.
        let cfg = SensingConfig::new(0.05, 1.0, 5, 1.0, 1.0, Region::segment(2.0)).unwrap();
        assert_eq!(classify_regime(&cfg).unwrap(), Regime::SpaceConstrained);
        // Boundary A=(N−1)Δ exactly.
        let cfg = SensingConfig::new(0.05, 1.0, 5, 1.0, 1.0, Region::segment(4.0)).unwrap();
        assert_eq!(classify_regime(&cfg).unwrap(), Regime::TimeConstrained);
    }

    #[test]
    fn fpa_ula_closed_form_and_two_path() {
        let cfg = cfg_seg(50, 1.0, 2.5);
        // M=2 collapses to σ²/(π²·snr·N).
        let got = crb_fpa_ula(2, &cfg).unwrap();
        let want = 1.0 / (PI * PI * cfg.snr_linear * cfg.num_snapshots as f64);
        assert!((got - want).abs() < 1e-15 * want);
        assert!(crb_fpa_ula(1, &cfg).is_err());

        // Two-path: explicit half-wavelength positions, variance route,
        // M-fold array gain applied.
        for m in [2usize, 3, 4, 9, 16, 33] {
            let pos: Vec<f64> = (0..m).map(|i| i as f64 * cfg.wavelength_m / 2.0).collect();
            let var = crate::stats::variance_stats(&pos, None).unwrap().var_x;
            assert!((var - ula_halfwave_variance(m, cfg.wavelength_m)).abs() < 1e-12 * var);
            let via_var = crb_1d_from_variance(var, &cfg) / m as f64;
            let closed = crb_fpa_ula(m, &cfg).unwrap();
            assert!(
                (via_var - closed).abs() < 1e-10 * closed,
                "M={m}: {via_var} vs {closed}"
            );
        }

        // Doubling N halves the value.
        let cfg2 = cfg_seg(100, 1.0, 2.5);
        assert!((crb_fpa_ula(8, &cfg).unwrap() / crb_fpa_ula(8, &cfg2).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fpa_upa_closed_form_and_two_path() {
        let cfg = cfg_seg(20, 1.0, 1.5);
        // M=4 value.
        let got = crb_fpa_upa(4, &cfg).unwrap();
        let want = 6.0 / (PI * PI * cfg.snr_linear * cfg.num_snapshots as f64 * 4.0 * 3.0);
        assert!((got - want).abs() < 1e-15 * want);
        // Closed-form ratio M=4 vs M=16 is 20.
        let r = crb_fpa_upa(4, &cfg).unwrap() / crb_fpa_upa(16, &cfg).unwrap();
        assert!((r - 20.0).abs() < 1e-12);
        assert!(crb_fpa_upa(8, &cfg).is_err());
        assert!(crb_fpa_upa(1, &cfg).is_err());

        // Two-path on the explicit √M×√M grid with cov = 0.
        for m in [4usize, 9, 25, 64] {
            let side = upa_side(m).unwrap();
            let d = cfg.wavelength_m / 2.0;
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for r in 0..side {
                for c in 0..side {
                    xs.push(c as f64 * d);
                    ys.push(r as f64 * d);
                }
            }
            let st = crate::stats::variance_stats(&xs, Some(&ys)).unwrap();
            assert!(st.cov_xy.abs() < 1e-15);
            let eff = st.var_x - st.cov_xy * st.cov_xy / st.var_y;
            let via_var = crb_1d_from_variance(eff, &cfg) / m as f64;
            let closed = crb_fpa_upa(m, &cfg).unwrap();
            assert!(
                (via_var - closed).abs() < 1e-10 * closed,
                "M={m}: {via_var} vs {closed}"
            );
        }
    }

    #[test]
    fn circle_bound_approaches_inverse_cubic_rate() {
        // Circle of radius Δ/(2 sin(π/N)): var_x = var_y = R²/2, cov = 0.
        // crb_u·N³ must be within 1% of λ²/(snr·Δ²) at N = 10⁴.
        let n = 10_000usize;
        let cfg = SensingConfig::new(0.05, 1e-3, n, 10.0, 1.0, Region::rectangle(10.0, 10.0)).unwrap();
        let delta = cfg.step_bound_m();
        let r = delta / (2.0 * (PI / n as f64).sin());
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for i in 0..n {
            let ang = 2.0 * PI * i as f64 / n as f64;
            xs.push(r * ang.cos());
            ys.push(r * ang.sin());
        }
        let st = variance_stats(&xs, Some(&ys)).unwrap();
        assert!((st.var_x - r * r / 2.0).abs() < 1e-9 * r * r);
        assert!(st.cov_xy.abs() < 1e-12 * r * r);
        let (crb_u, crb_v) = crb_2d_from_stats(&st, &cfg);
        assert!((crb_u - crb_v).abs() < 1e-9 * crb_u);

        // Exact closed form for the circle.
        let s = (PI / n as f64).sin();
        let exact = cfg.wavelength_m * cfg.wavelength_m * s * s
            / (PI * PI * cfg.snr_linear * delta * delta * n as f64);
        assert!((crb_u - exact).abs() < 1e-9 * exact);

        let approx = cfg.wavelength_m * cfg.wavelength_m
            / (cfg.snr_linear * delta * delta * (n as f64).powi(3));
        let ratio = crb_u / approx;
        println!("circle crb·N³ ratio vs asymptote: {ratio:.6}");
        assert!((ratio - 1.0).abs() < 0.01);
    }
}
