//! End-to-end acceptance suite: scaling laws, closed-form/search-oracle
//! agreement, crossover thresholds, designer-versus-benchmark orderings,
//! estimator efficiency, correlation-pattern orderings, and conic-encoding
//! soundness, each with its stated tolerance and runtime budget.
//!
//! Run with `cargo test -p masense-core --test acceptance -- --nocapture`
//! to see one status line per check.

use std::f64::consts::PI;
use std::time::Instant;

use masense_core::analysis::{
    centered_probe_grid, correlation_1d, correlation_2d, crossover_time, scaling_fit,
    verify_crossover, ArrayDim,
};
use masense_core::crb::{crb_1d, crb_2d};
use masense_core::estimator::{monte_carlo_1d, MleSettings};
use masense_core::model::{Region, SensingConfig, Trajectory1D, Trajectory2D};
use masense_core::stats::variance_stats;
use masense_core::traj1d::{
    benchmark_1d, optimal_trajectory, optimal_trajectory_sc, optimal_trajectory_tc,
    oracle_max_variance, Benchmark1D,
};
use masense_core::traj2d::{
    benchmark_2d, centering_matrix, optimize_2d, solve_subproblem_x, surrogate_lower_bound,
    Benchmark2D, Init2D, ScaSettings,
};

fn splitmix(state: &mut u64) -> f64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64
}

/// Min-max of the two directional bounds.
fn minmax_crb_2d(traj: &Trajectory2D, cfg: &SensingConfig) -> f64 {
    let report = crb_2d(traj, cfg).unwrap();
    report.crb_u.max(report.crb_v.unwrap())
}

#[test]
fn a1_time_limited_bound_scales_cubically() {
    let start = Instant::now();
    let series: Vec<(f64, f64)> = [100usize, 1_000, 10_000]
        .iter()
        .map(|&n| {
            let cfg =
                SensingConfig::new(0.05, 1e-5, n, 10.0, 1.0, Region::segment(1.2)).unwrap();
            let traj = optimal_trajectory_tc(&cfg, 0.0).unwrap();
            (n as f64, crb_1d(&traj, &cfg).unwrap().crb_u)
        })
        .collect();
    let fit = scaling_fit(&series, true).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert!((fit.slope + 3.0).abs() <= 0.02, "slope {}", fit.slope);
    assert!(elapsed < 1.0, "took {elapsed:.2} s, budget 1 s");
    println!(
        "acceptance 1 PASS: time-limited bound slope {:.4} (target -3 +/- 0.02), {:.2} s",
        fit.slope, elapsed
    );
}

#[test]
fn a2_segment_limited_bound_scaling() {
    let start = Instant::now();
    // Per-step displacement 0.1 wavelength: 10 m/s at 0.5 ms.
    let mk = |n: usize, a: f64| {
        SensingConfig::new(0.05, 5e-4, n, 10.0, 1.0, Region::segment(a)).unwrap()
    };
    let n_series: Vec<(f64, f64)> = [1_000usize, 10_000, 100_000]
        .iter()
        .map(|&n| {
            let cfg = mk(n, 0.5);
            let traj = optimal_trajectory_sc(&cfg).unwrap();
            (n as f64, crb_1d(&traj, &cfg).unwrap().crb_u)
        })
        .collect();
    let n_fit = scaling_fit(&n_series, true).unwrap();
    assert!((n_fit.slope + 1.0).abs() <= 0.05, "N slope {}", n_fit.slope);

    let a_series: Vec<(f64, f64)> = [0.25f64, 0.5, 1.0, 2.0]
        .iter()
        .map(|&a| {
            let cfg = mk(100_000, a);
            let traj = optimal_trajectory_sc(&cfg).unwrap();
            (a, crb_1d(&traj, &cfg).unwrap().crb_u)
        })
        .collect();
    let a_fit = scaling_fit(&a_series, true).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert!((a_fit.slope + 2.0).abs() <= 0.1, "A slope {}", a_fit.slope);
    assert!(elapsed < 5.0, "took {elapsed:.2} s, budget 5 s");
    println!(
        "acceptance 2 PASS: segment-limited slopes {:.4} over N (target -1 +/- 0.05), \
         {:.4} over length (target -2 +/- 0.1), {:.2} s",
        n_fit.slope, a_fit.slope, elapsed
    );
}

#[test]
fn a3_closed_form_matches_search_oracle() {
    let start = Instant::now();
    let g = 50usize;
    let mut cases = 0usize;
    for &a in &[1.5f64, 2.3, 3.7] {
        for n in 3usize..=6 {
            // Unit per-step displacement: 1 m/s at 1 s.
            let cfg = SensingConfig::new(0.05, 1.0, n, 1.0, 1.0, Region::segment(a)).unwrap();
            let closed = optimal_trajectory(&cfg).unwrap();
            let var_closed = variance_stats(closed.positions(), None).unwrap().var_x;
            let oracle = oracle_max_variance(&cfg, g).unwrap();
            // First-order perturbation bound for a grid of pitch step/G.
            let bound = 3.0 * a * (1.0 / g as f64) * n as f64;
            assert!(
                (var_closed - oracle.variance).abs() <= bound,
                "A={a} N={n}: closed {var_closed} vs oracle {} beyond {bound}",
                oracle.variance
            );
            assert!(
                oracle.variance <= var_closed * (1.0 + 1e-12) + 1e-15,
                "A={a} N={n}: grid search beat the closed form: {} > {var_closed}",
                oracle.variance
            );
            cases += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "took {elapsed:.2} s, budget 60 s");
    println!(
        "acceptance 3 PASS: closed form matches the grid oracle on {cases} configs, {:.2} s",
        elapsed
    );
}

#[test]
fn a4_crossover_thresholds_and_curve_crossings() {
    let cfg = SensingConfig::new(0.01, 1e-3, 100, 1.0, 1.0, Region::segment(1.0)).unwrap();
    let t1 = crossover_time(ArrayDim::OneD, 64, &cfg).unwrap();
    assert!((t1 - 2.56).abs() <= 1e-12, "1D threshold {t1}");
    let t2 = crossover_time(ArrayDim::TwoD, 64, &cfg).unwrap();
    assert_eq!(t2, PI * 64.0 / 6.0f64.sqrt() * 0.01);
    assert!((t2 - 0.82).abs() <= 5e-3, "2D threshold {t2}");

    for dim in [ArrayDim::OneD, ArrayDim::TwoD] {
        let check = verify_crossover(dim, 64, &cfg).unwrap();
        assert!(check.below_ok && check.above_ok, "{dim:?}: ordering around threshold broken");
        let rel = (check.crossing_s - check.threshold_s).abs() / check.threshold_s;
        assert!(rel <= 0.05, "{dim:?}: exact crossing off by {:.2}%", 100.0 * rel);
    }
    println!(
        "acceptance 4 PASS: crossover thresholds {t1:.4} s and {t2:.4} s, exact curves cross \
         within 5%"
    );
}

#[test]
fn a5_bound_formulas_agree_on_both_paths() {
    let start = Instant::now();
    let mut state = 0x5eed_0005u64;
    // Time-limited line sweep: bound from the constructed trajectory versus
    // the closed form in (snapshots, per-step displacement).
    for draw in 0..20 {
        let lambda = 0.01 + 0.09 * splitmix(&mut state);
        let ts = 1e-5 * 10f64.powf(2.0 * splitmix(&mut state));
        let n = 50 + (1950.0 * splitmix(&mut state)) as usize;
        let v = 1.0 + 19.0 * splitmix(&mut state);
        let snr = 0.1 * 10f64.powf(3.0 * splitmix(&mut state));
        let step = v * ts;
        let a = (n as f64 - 1.0) * step * (1.1 + splitmix(&mut state));
        let cfg = SensingConfig::new(lambda, ts, n, v, snr, Region::segment(a)).unwrap();
        let traj = optimal_trajectory_tc(&cfg, 0.0).unwrap();
        let via_variance = crb_1d(&traj, &cfg).unwrap().crb_u;
        let nf = n as f64;
        let closed =
            3.0 * lambda * lambda / (2.0 * PI * PI * snr * nf * (nf * nf - 1.0) * step * step);
        let rel = (via_variance - closed).abs() / closed;
        assert!(rel <= 1e-9, "draw {draw}: 1D paths disagree by {rel:.3e}");
    }
    // Circular sweep: bound from the constructed circle versus the closed
    // form in (snapshots, per-step arc length).
    for draw in 0..20 {
        let lambda = 0.01 + 0.09 * splitmix(&mut state);
        let ts = 1e-5 * 10f64.powf(2.0 * splitmix(&mut state));
        let n = 8 + (2992.0 * splitmix(&mut state)) as usize;
        let v = 1.0 + 9.0 * splitmix(&mut state);
        let snr = 0.1 * 10f64.powf(3.0 * splitmix(&mut state));
        let step = v * ts;
        let r = step / (2.0 * (PI / n as f64).sin());
        let side = 2.0 * r * (1.05 + splitmix(&mut state));
        let cfg =
            SensingConfig::new(lambda, ts, n, v, snr, Region::rectangle(side, side)).unwrap();
        let circle = benchmark_2d(Benchmark2D::Circle, &cfg).unwrap();
        let report = crb_2d(&circle, &cfg).unwrap();
        let s = (PI / n as f64).sin();
        let closed = lambda * lambda * s * s / (PI * PI * snr * n as f64 * step * step);
        for (axis, got) in [("u", report.crb_u), ("v", report.crb_v.unwrap())] {
            let rel = (got - closed).abs() / closed;
            assert!(rel <= 1e-9, "draw {draw}: 2D {axis} paths disagree by {rel:.3e}");
        }
    }
    println!(
        "acceptance 5 PASS: trajectory-based and closed-form bounds agree to 1e-9 on 20+20 \
         draws, {:.2} s",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn a6_alternating_designer_ascends_and_beats_benchmarks() {
    let start = Instant::now();
    let mut state = 0xa19_0006u64;
    for case in 0..10 {
        let n = 300 + (1200.0 * splitmix(&mut state)) as usize;
        let groups_target = 30 + (90.0 * splitmix(&mut state)) as usize;
        let k = (n - 1).div_ceil(groups_target);
        let sx = 0.1 + 0.65 * splitmix(&mut state);
        let sy = 0.1 + 0.65 * splitmix(&mut state);
        let cfg =
            SensingConfig::new(0.05, 1e-4, n, 10.0, 1.0, Region::rectangle(sx, sy)).unwrap();
        let settings = ScaSettings {
            velocity_group_size: k,
            solver_tol: 1e-8,
            ..ScaSettings::default()
        };
        let (traj, trace) = optimize_2d(&cfg, &settings).unwrap();

        let tol = 10.0 * settings.solver_tol;
        let deltas = trace.deltas();
        for w in deltas.windows(2) {
            assert!(w[1] >= w[0] - tol, "case {case}: trace regressed {} -> {}", w[0], w[1]);
        }
        // Feasibility re-check at 1e-8, independent of constructor slack.
        let feas = 1e-8;
        let ts = cfg.snapshot_interval_s;
        for i in 0..n {
            assert!(traj.x()[i] >= -feas * sx && traj.x()[i] <= sx * (1.0 + feas));
            assert!(traj.y()[i] >= -feas * sy && traj.y()[i] <= sy * (1.0 + feas));
        }
        for i in 0..n - 1 {
            let speed = traj.vx()[i].hypot(traj.vy()[i]);
            assert!(speed <= 10.0 * (1.0 + feas), "case {case}: speed {speed}");
            let dx = traj.x()[i + 1] - traj.x()[i] - ts * traj.vx()[i];
            let dy = traj.y()[i + 1] - traj.y()[i] - ts * traj.vy()[i];
            assert!(dx.abs() <= feas * sx && dy.abs() <= feas * sy, "case {case}: kinematics");
        }
    }
    let random_done = start.elapsed().as_secs_f64();

    // Benchmark ordering on the large square setup: 126^2 snapshots so the
    // same count forms a square fixed grid.
    let side = 15.0 * 0.05;
    let cfg = SensingConfig::new(0.05, 1e-5, 15_876, 10.0, 1.0, Region::rectangle(side, side))
        .unwrap();
    let settings = ScaSettings {
        velocity_group_size: 250,
        eps_outer: 1e-7,
        max_outer: 150,
        solver_tol: 1e-8,
        init: Init2D::Diagonal,
        ..ScaSettings::default()
    };
    let (designed, trace) = optimize_2d(&cfg, &settings).unwrap();
    let ours = minmax_crb_2d(&designed, &cfg);
    let circle = minmax_crb_2d(&benchmark_2d(Benchmark2D::Circle, &cfg).unwrap(), &cfg);
    let upa = minmax_crb_2d(&benchmark_2d(Benchmark2D::Upa, &cfg).unwrap(), &cfg);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(ours <= circle, "designed {ours:.3e} worse than circle {circle:.3e}");
    assert!(ours <= upa, "designed {ours:.3e} worse than fixed grid {upa:.3e}");
    assert!(elapsed < 600.0, "took {elapsed:.1} s, budget 600 s");
    println!(
        "acceptance 6 PASS: 10 random designs ascend and stay feasible ({random_done:.1} s); \
         large-square min-max bound {ours:.3e} <= circle {circle:.3e} and fixed grid {upa:.3e} \
         after {} outer passes, {elapsed:.1} s total",
        trace.outer.len()
    );
}

#[test]
fn a7_estimator_mse_tracks_bound_over_snr() {
    let start = Instant::now();
    let snr_dbs = [-25.0f64, -20.0, -15.0, -10.0, -5.0, 0.0];
    let mut mses = Vec::new();
    let mut crb_at_0db = 0.0;
    for &db in &snr_dbs {
        let snr = 10f64.powf(db / 10.0);
        let cfg =
            SensingConfig::new(0.05, 1e-5, 1_000, 10.0, snr, Region::segment(0.12)).unwrap();
        let traj = optimal_trajectory_tc(&cfg, 0.0).unwrap();
        let settings = MleSettings { trials: 1_000, seed: 7, ..MleSettings::default() };
        let res = monte_carlo_1d(&traj, 0.71, &cfg, &settings).unwrap();
        mses.push(res.mse_u);
        crb_at_0db = res.crb_u;
    }
    let elapsed = start.elapsed().as_secs_f64();
    for (i, w) in mses.windows(2).enumerate() {
        assert!(
            w[1] <= w[0],
            "MSE rose from {:.3e} to {:.3e} between {} and {} dB",
            w[0],
            w[1],
            snr_dbs[i],
            snr_dbs[i + 1]
        );
    }
    let ratio = mses[mses.len() - 1] / crb_at_0db;
    assert!(ratio <= 3.0, "MSE/bound ratio at 0 dB is {ratio:.2}");
    assert!(elapsed < 300.0, "took {elapsed:.1} s, budget 300 s");
    println!(
        "acceptance 7 PASS: MSE non-increasing over -25..0 dB, ratio to bound {ratio:.2} at \
         0 dB, {elapsed:.1} s"
    );
}

#[test]
fn a8_correlation_patterns_order_as_expected() {
    let start = Instant::now();
    let mut state = 0xc0_0008u64;

    // Unit correlation at the true angle on random 1D and 2D walks.
    let mut checked = 0usize;
    for _ in 0..30 {
        let n = 8 + (60.0 * splitmix(&mut state)) as usize;
        let a = 0.1 + 0.4 * splitmix(&mut state);
        let cfg = SensingConfig::new(0.05, 1e-3, n, 10.0, 1.0, Region::segment(a)).unwrap();
        let ts = cfg.snapshot_interval_s;
        let mut pos = vec![a / 2.0];
        let mut vel = Vec::new();
        for _ in 1..n {
            let mut v = (2.0 * splitmix(&mut state) - 1.0) * 10.0;
            let last = *pos.last().unwrap();
            if last + v * ts < 0.0 || last + v * ts > a {
                v = -v;
            }
            vel.push(v);
            pos.push(last + v * ts);
        }
        let traj = Trajectory1D::new(pos, vel, &cfg).unwrap();
        let true_u = 2.0 * splitmix(&mut state) - 1.0;
        let grid = centered_probe_grid(true_u, 5e-3, 1e-3).unwrap();
        let pat = correlation_1d(&traj, true_u, &grid, &cfg).unwrap();
        assert!(
            (pat.values[grid.len() / 2] - 1.0).abs() <= 1e-12,
            "1D q at the true angle drifted: {}",
            pat.values[grid.len() / 2]
        );
        checked += 1;
    }
    for _ in 0..20 {
        let n = 8 + (60.0 * splitmix(&mut state)) as usize;
        let (ax, ay) = (0.1 + 0.4 * splitmix(&mut state), 0.1 + 0.4 * splitmix(&mut state));
        let cfg = SensingConfig::new(0.05, 1e-3, n, 10.0, 1.0, Region::rectangle(ax, ay)).unwrap();
        let ts = cfg.snapshot_interval_s;
        let (mut xs, mut ys) = (vec![ax / 2.0], vec![ay / 2.0]);
        let (mut vxs, mut vys) = (Vec::new(), Vec::new());
        for _ in 1..n {
            let ang = 2.0 * PI * splitmix(&mut state);
            let mag = 10.0 * splitmix(&mut state);
            let (mut vx, mut vy) = (mag * ang.cos(), mag * ang.sin());
            let (lx, ly) = (*xs.last().unwrap(), *ys.last().unwrap());
            if lx + vx * ts < 0.0 || lx + vx * ts > ax {
                vx = -vx;
            }
            if ly + vy * ts < 0.0 || ly + vy * ts > ay {
                vy = -vy;
            }
            vxs.push(vx);
            vys.push(vy);
            xs.push(lx + vx * ts);
            ys.push(ly + vy * ts);
        }
        let traj = Trajectory2D::new(xs, ys, vxs, vys, &cfg).unwrap();
        let ang = 2.0 * PI * splitmix(&mut state);
        let mag = splitmix(&mut state).sqrt();
        let eta = (mag * ang.cos(), mag * ang.sin());
        let gu = centered_probe_grid(eta.0, 5e-3, 1e-3).unwrap();
        let gv = centered_probe_grid(eta.1, 5e-3, 1e-3).unwrap();
        let pat = correlation_2d(&traj, eta, &gu, &gv, &cfg).unwrap();
        let q = pat.values[(gv.len() / 2) * gu.len() + gu.len() / 2];
        assert!((q - 1.0).abs() <= 1e-12, "2D q at the true pair drifted: {q}");
        checked += 1;
    }
    assert_eq!(checked, 50);

    // Half-power width ordering on the 10-wavelength segment, 0.1 s sweep.
    let cfg = SensingConfig::new(0.05, 1e-5, 10_000, 10.0, 1.0, Region::segment(0.5)).unwrap();
    let grid = centered_probe_grid(0.61, 0.12, 2e-4).unwrap();
    let w_ours =
        correlation_1d(&optimal_trajectory(&cfg).unwrap(), 0.61, &grid, &cfg).unwrap().main_lobe_width;
    let w_fwd = correlation_1d(
        &benchmark_1d(Benchmark1D::MoveForward, &cfg).unwrap(),
        0.61,
        &grid,
        &cfg,
    )
    .unwrap()
    .main_lobe_width;
    let w_bnf = correlation_1d(
        &benchmark_1d(Benchmark1D::BackAndForth, &cfg).unwrap(),
        0.61,
        &grid,
        &cfg,
    )
    .unwrap()
    .main_lobe_width;
    assert!(w_ours <= w_fwd && w_ours <= w_bnf, "widths {w_ours} vs {w_fwd}/{w_bnf}");

    // Half-power area ordering on the 15-wavelength square, 0.16 s sweep.
    let side = 0.75;
    let cfg2 = SensingConfig::new(0.05, 1e-5, 15_876, 10.0, 1.0, Region::rectangle(side, side))
        .unwrap();
    let settings = ScaSettings {
        velocity_group_size: 250,
        eps_outer: 1e-7,
        max_outer: 150,
        solver_tol: 1e-8,
        init: Init2D::Diagonal,
        ..ScaSettings::default()
    };
    let (designed, _) = optimize_2d(&cfg2, &settings).unwrap();
    let gu = centered_probe_grid(0.61, 0.08, 1e-3).unwrap();
    let gv = centered_probe_grid(0.71, 0.08, 1e-3).unwrap();
    let area_ours =
        correlation_2d(&designed, (0.61, 0.71), &gu, &gv, &cfg2).unwrap().main_lobe_area;
    let upa = benchmark_2d(Benchmark2D::Upa, &cfg2).unwrap();
    let area_upa = correlation_2d(&upa, (0.61, 0.71), &gu, &gv, &cfg2).unwrap().main_lobe_area;
    let elapsed = start.elapsed().as_secs_f64();
    assert!(area_ours < area_upa, "areas {area_ours} vs {area_upa}");
    println!(
        "acceptance 8 PASS: unit peak on 50 random walks; 1D widths {w_ours:.4} <= \
         {w_fwd:.4}/{w_bnf:.4}; 2D areas {area_ours:.5} < {area_upa:.5}; {elapsed:.1} s"
    );
}

#[test]
fn a9_cone_encoding_is_sound() {
    // Rotated-cone identity used by the subproblem encoder: a^2 <= b*c with
    // b, c >= 0 iff ||(2a, b - c)|| <= b + c.
    let mut state = 0x50c_0009u64;
    let mut feasible = 0usize;
    for _ in 0..1000 {
        let a = 4.0 * splitmix(&mut state) - 2.0;
        let b = 4.0 * splitmix(&mut state) - 2.0;
        let c = 4.0 * splitmix(&mut state) - 2.0;
        let direct = b >= 0.0 && c >= 0.0 && a * a <= b * c;
        let soc = (2.0 * a).hypot(b - c) <= b + c;
        assert_eq!(direct, soc, "verdicts split at a={a} b={b} c={c}");
        if direct {
            feasible += 1;
        }
    }
    assert!(feasible > 0, "sampler never hit the feasible set");

    // Three-snapshot toy: refined grid over the two free steps is an
    // independent optimum oracle for one coordinate subproblem.
    let cfg = SensingConfig::new(0.05, 0.03, 3, 10.0, 1.0, Region::rectangle(1.0, 1.0)).unwrap();
    let settings = ScaSettings { velocity_group_size: 1, ..ScaSettings::default() };
    let y = vec![0.1, 0.28, 0.46];
    let x_ref = vec![0.5, 0.62, 0.5];
    let res = solve_subproblem_x(&x_ref, &y, &cfg, &settings).unwrap();
    assert!(res.converged);

    let cap = (0.3f64 * 0.3 - 0.18 * 0.18).sqrt();
    let c_yy = variance_stats(&y, None).unwrap().var_x;
    let b = centering_matrix(3).unwrap();
    let eval = |d1: f64, d2: f64| -> f64 {
        let x = [0.0, d1, d1 + d2];
        let gbar = surrogate_lower_bound(&x, &x_ref).unwrap();
        if gbar <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let a = b.quad_form(&x, &y).unwrap();
        (gbar - a * a / c_yy).min(c_yy - a * a / gbar)
    };
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut center = (0.0, 0.0);
    let mut hw = cap;
    for _stage in 0..3 {
        for i in 0..=40 {
            for j in 0..=40 {
                let d1 = (center.0 - hw + 2.0 * hw * i as f64 / 40.0).clamp(-cap, cap);
                let d2 = (center.1 - hw + 2.0 * hw * j as f64 / 40.0).clamp(-cap, cap);
                let v = eval(d1, d2);
                if v > best.0 {
                    best = (v, d1, d2);
                }
            }
        }
        center = (best.1, best.2);
        hw /= 10.0;
    }
    let rel = (res.delta - best.0).abs() / best.0.max(1e-9);
    assert!(rel <= 1e-3, "solver delta {} vs grid oracle {}", res.delta, best.0);
    println!(
        "acceptance 9 PASS: cone and direct verdicts agree on 1000 samples ({feasible} \
         feasible); toy subproblem delta {:.6e} matches grid oracle {:.6e}",
        res.delta, best.0
    );
}
