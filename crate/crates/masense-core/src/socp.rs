//! Embedded second-order-cone programming solver.
//!
//! Solves min cᵀx subject to Gx + s = h with s constrained to a product cone
//! K = R₊^l × Q^{d₁} × … × Q^{dₖ}, where Q^d = {(s₀, s₁) : s₀ ≥ ‖s₁‖₂}. The
//! method is a standard infeasible-start primal-dual interior-point iteration
//! with Nesterov-Todd scaling and a Mehrotra predictor-corrector step. Each
//! iteration eliminates (Δs, Δz) from the Newton system and factors the
//! positive-definite normal matrix GᵀW⁻²G by dense Cholesky; the problems
//! this crate generates have at most a few hundred variables, so the dense
//! factorization is the fast path.
//!
//! The trajectory subproblems feed this solver rows of two kinds: sparse
//! nonnegative-orthant rows (boxes, step bounds, a guard row) and dense
//! three-dimensional cone rows encoding quadratic-over-linear constraints.
//! The normal matrix is assembled row-by-row (diagonal weights for the
//! orthant, a rank-four update per small cone), never forming W.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Conic program in inequality form. The first `nonneg` rows of `G`/`h` are
/// nonnegative-orthant slacks; the remaining rows are consumed in order by
/// the second-order cones listed in `soc_dims`.
#[derive(Debug, Clone, PartialEq)]
pub struct SocpProblem {
    pub num_vars: usize,
    /// Objective, minimized.
    pub c: Vec<f64>,
    /// Sparse rows of G: (column, value) pairs.
    pub rows: Vec<Vec<(usize, f64)>>,
    pub h: Vec<f64>,
    /// Number of leading nonnegative-orthant rows.
    pub nonneg: usize,
    /// Dimensions (each ≥ 2) of the trailing second-order cones.
    pub soc_dims: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// All convergence criteria met at `tol`.
    Optimal,
    /// Iteration limit hit; the best iterate seen is returned.
    MaxIterations,
    /// Numerical precision limit reached before `tol` (scaling breakdown or
    /// vanishing step near a boundary optimum); the best iterate is returned.
    Stalled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Relative tolerance on primal/dual residuals and duality gap.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings { tol: 1e-8, max_iter: 100 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<f64>,
    pub s: Vec<f64>,
    pub z: Vec<f64>,
    pub status: SolveStatus,
    pub iterations: usize,
    /// ‖Gx + s − h‖∞.
    pub primal_residual: f64,
    /// ‖c + Gᵀz‖∞.
    pub dual_residual: f64,
    /// sᵀz.
    pub gap: f64,
    pub objective: f64,
}

struct ConeLayout {
    nonneg: usize,
    soc_dims: Vec<usize>,
}

impl ConeLayout {
    fn total(&self) -> usize {
        self.nonneg + self.soc_dims.iter().sum::<usize>()
    }

    /// Barrier degree ν: one per orthant row, one per cone.
    fn degree(&self) -> f64 {
        (self.nonneg + self.soc_dims.len()) as f64
    }

    /// Identity element of the cone algebra: 1 on orthant rows, (1, 0, …)
    /// per cone.
    fn identity(&self) -> Vec<f64> {
        let mut e = vec![0.0; self.total()];
        for v in e.iter_mut().take(self.nonneg) {
            *v = 1.0;
        }
        let mut base = self.nonneg;
        for &d in &self.soc_dims {
            e[base] = 1.0;
            base += d;
        }
        e
    }
}

/// Nesterov-Todd scaling state. For orthant rows, W is diagonal with
/// w_i² = s_i/z_i. For a cone block, W = η·M(w̄) with w̄ a unit hyperbolic
/// vector (w̄ᵀJw̄ = 1) and M the standard arrow-shaped representation; then
/// W² = η²(2w̄w̄ᵀ − J) and W⁻² = η⁻²(2(Jw̄)(Jw̄)ᵀ − J). λ = Wz = W⁻¹s in both
/// geometries.
struct Scaling {
    lp_w2: Vec<f64>,
    socs: Vec<SocScaling>,
    lambda: Vec<f64>,
}

struct SocScaling {
    eta: f64,
    wbar: Vec<f64>,
}

fn validate(p: &SocpProblem) -> Result<()> {
    let m = p.rows.len();
    if p.h.len() != m {
        return Err(Error::DimensionMismatch("h length must equal the number of rows"));
    }
    if p.c.len() != p.num_vars {
        return Err(Error::DimensionMismatch("c length must equal num_vars"));
    }
    let cone_total = p.nonneg + p.soc_dims.iter().sum::<usize>();
    if cone_total != m {
        return Err(Error::DimensionMismatch("cone sizes must cover all rows exactly"));
    }
    if p.soc_dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidParameter("second-order cones need dimension >= 2"));
    }
    for row in &p.rows {
        for &(j, v) in row {
            if j >= p.num_vars {
                return Err(Error::DimensionMismatch("row references a column past num_vars"));
            }
            if !v.is_finite() {
                return Err(Error::InvalidParameter("matrix entries must be finite"));
            }
        }
    }
    if p.h.iter().chain(p.c.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("h and c entries must be finite"));
    }
    Ok(())
}

fn mat_vec(rows: &[Vec<(usize, f64)>], x: &[f64]) -> Vec<f64> {
    rows.iter()
        .map(|row| row.iter().map(|&(j, v)| v * x[j]).sum())
        .collect()
}

fn mat_t_vec(rows: &[Vec<(usize, f64)>], n: usize, y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (i, row) in rows.iter().enumerate() {
        let yi = y[i];
        if yi != 0.0 {
            for &(j, v) in row {
                out[j] += v * yi;
            }
        }
    }
    out
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// ρ = sqrt(v₀² − ‖v₁‖²) of a strictly interior cone point; errors outside.
fn soc_rho(v: &[f64]) -> Result<f64> {
    let tail: f64 = v[1..].iter().map(|&t| t * t).sum();
    let r2 = v[0] * v[0] - tail;
    if v[0] <= 0.0 || r2 <= 0.0 {
        return Err(Error::SolverFailure("iterate left the interior of a cone"));
    }
    Ok(r2.sqrt())
}

fn compute_scaling(layout: &ConeLayout, s: &[f64], z: &[f64]) -> Result<Scaling> {
    let mut lp_w2 = Vec::with_capacity(layout.nonneg);
    let mut lambda = vec![0.0; layout.total()];
    for i in 0..layout.nonneg {
        if s[i] <= 0.0 || z[i] <= 0.0 {
            return Err(Error::SolverFailure("iterate left the interior of the orthant"));
        }
        lp_w2.push(s[i] / z[i]);
        lambda[i] = (s[i] * z[i]).sqrt();
    }
    let mut socs = Vec::with_capacity(layout.soc_dims.len());
    let mut base = layout.nonneg;
    for &d in &layout.soc_dims {
        let sb = &s[base..base + d];
        let zb = &z[base..base + d];
        let rho_s = soc_rho(sb)?;
        let rho_z = soc_rho(zb)?;
        let sbar: Vec<f64> = sb.iter().map(|&v| v / rho_s).collect();
        let zbar: Vec<f64> = zb.iter().map(|&v| v / rho_z).collect();
        let gamma = ((1.0 + dot(&sbar, &zbar)) / 2.0).sqrt();
        // w̄ = (s̄ + Jz̄)/(2γ); J flips the sign of the tail.
        let mut wbar = vec![0.0; d];
        wbar[0] = (sbar[0] + zbar[0]) / (2.0 * gamma);
        for k in 1..d {
            wbar[k] = (sbar[k] - zbar[k]) / (2.0 * gamma);
        }
        let eta = (rho_s / rho_z).sqrt();
        let sc = SocScaling { eta, wbar };
        let lam = apply_arrow(&sc.wbar, zb);
        for (k, &v) in lam.iter().enumerate() {
            lambda[base + k] = v * eta;
        }
        socs.push(sc);
        base += d;
    }
    Ok(Scaling { lp_w2, socs, lambda })
}

/// M(w̄)·b with M(w̄) = [[w̄₀, w̄₁ᵀ], [w̄₁, I + w̄₁w̄₁ᵀ/(1+w̄₀)]].
fn apply_arrow(wbar: &[f64], b: &[f64]) -> Vec<f64> {
    let d = wbar.len();
    let tail_dot: f64 = (1..d).map(|k| wbar[k] * b[k]).sum();
    let mut out = vec![0.0; d];
    out[0] = wbar[0] * b[0] + tail_dot;
    let coef = b[0] + tail_dot / (1.0 + wbar[0]);
    for k in 1..d {
        out[k] = b[k] + coef * wbar[k];
    }
    out
}

/// W·v over the full cone vector.
fn apply_w(layout: &ConeLayout, sc: &Scaling, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; layout.total()];
    for i in 0..layout.nonneg {
        out[i] = sc.lp_w2[i].sqrt() * v[i];
    }
    let mut base = layout.nonneg;
    for (b, &d) in layout.soc_dims.iter().enumerate() {
        let r = apply_arrow(&sc.socs[b].wbar, &v[base..base + d]);
        for k in 0..d {
            out[base + k] = sc.socs[b].eta * r[k];
        }
        base += d;
    }
    out
}

/// W⁻¹·v: for cones, M(Jw̄)/η.
fn apply_w_inv(layout: &ConeLayout, sc: &Scaling, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; layout.total()];
    for i in 0..layout.nonneg {
        out[i] = v[i] / sc.lp_w2[i].sqrt();
    }
    let mut base = layout.nonneg;
    for (b, &d) in layout.soc_dims.iter().enumerate() {
        let wbar = &sc.socs[b].wbar;
        let mut jw = wbar.clone();
        for t in jw.iter_mut().skip(1) {
            *t = -*t;
        }
        let r = apply_arrow(&jw, &v[base..base + d]);
        for k in 0..d {
            out[base + k] = r[k] / sc.socs[b].eta;
        }
        base += d;
    }
    out
}

/// W⁻²·v: diagonal z/s on the orthant; η⁻²(2(Jw̄)(Jw̄)ᵀ − J) per cone.
fn apply_w_inv2(layout: &ConeLayout, sc: &Scaling, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; layout.total()];
    for i in 0..layout.nonneg {
        out[i] = v[i] / sc.lp_w2[i];
    }
    let mut base = layout.nonneg;
    for (b, &d) in layout.soc_dims.iter().enumerate() {
        let wbar = &sc.socs[b].wbar;
        let eta2 = sc.socs[b].eta * sc.socs[b].eta;
        let vb = &v[base..base + d];
        // (Jw̄)ᵀv
        let mut jdot = wbar[0] * vb[0];
        for k in 1..d {
            jdot -= wbar[k] * vb[k];
        }
        // Jv = (v₀, −v₁)
        out[base] = (2.0 * jdot * wbar[0] - vb[0]) / eta2;
        for k in 1..d {
            out[base + k] = (2.0 * jdot * (-wbar[k]) + vb[k]) / eta2;
        }
        base += d;
    }
    out
}

/// Jordan product u∘v blockwise: plain product on the orthant,
/// (uᵀv, u₀v₁ + v₀u₁) per cone.
fn jordan_prod(layout: &ConeLayout, u: &[f64], v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; layout.total()];
    for i in 0..layout.nonneg {
        out[i] = u[i] * v[i];
    }
    let mut base = layout.nonneg;
    for &d in &layout.soc_dims {
        let ub = &u[base..base + d];
        let vb = &v[base..base + d];
        out[base] = dot(ub, vb);
        for k in 1..d {
            out[base + k] = ub[0] * vb[k] + vb[0] * ub[k];
        }
        base += d;
    }
    out
}

/// Jordan division λ \ v: solve λ∘u = v via the closed-form inverse of the
/// arrow matrix L(λ), using a = λ₀² − ‖λ₁‖² > 0.
fn jordan_div_lambda(layout: &ConeLayout, lambda: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; layout.total()];
    for i in 0..layout.nonneg {
        if lambda[i] == 0.0 {
            return Err(Error::SolverFailure("zero scaling point in Jordan division"));
        }
        out[i] = v[i] / lambda[i];
    }
    let mut base = layout.nonneg;
    for &d in &layout.soc_dims {
        let lb = &lambda[base..base + d];
        let vb = &v[base..base + d];
        let tail2: f64 = (1..d).map(|k| lb[k] * lb[k]).sum();
        let a = lb[0] * lb[0] - tail2;
        if a <= 0.0 || lb[0] <= 0.0 {
            return Err(Error::SolverFailure("scaling point left the cone in Jordan division"));
        }
        let ldotv: f64 = (1..d).map(|k| lb[k] * vb[k]).sum();
        out[base] = (lb[0] * vb[0] - ldotv) / a;
        for k in 1..d {
            out[base + k] = (-vb[0] * lb[k] + (a * vb[k] + lb[k] * ldotv) / lb[0]) / a;
        }
        base += d;
    }
    Ok(out)
}

/// Largest α ≥ 0 keeping v + α·d inside the cone (∞ when unconstrained).
fn max_step(layout: &ConeLayout, v: &[f64], d: &[f64]) -> f64 {
    let mut alpha = f64::INFINITY;
    for i in 0..layout.nonneg {
        if d[i] < 0.0 {
            alpha = alpha.min(-v[i] / d[i]);
        }
    }
    let mut base = layout.nonneg;
    for &dim in &layout.soc_dims {
        let vb = &v[base..base + dim];
        let db = &d[base..base + dim];
        // q(α) = (v₀+αd₀)² − ‖v₁+αd₁‖² stays positive until the boundary.
        let a: f64 = db[0] * db[0] - (1..dim).map(|k| db[k] * db[k]).sum::<f64>();
        let b: f64 = 2.0 * (vb[0] * db[0] - (1..dim).map(|k| vb[k] * db[k]).sum::<f64>());
        let c: f64 = vb[0] * vb[0] - (1..dim).map(|k| vb[k] * vb[k]).sum::<f64>();
        let step = soc_boundary_step(a, b, c.max(0.0));
        alpha = alpha.min(step);
        base += dim;
    }
    alpha
}

/// Smallest positive root of aα² + bα + c (c ≥ 0 at the current point),
/// or ∞ when the quadratic never becomes negative for α ≥ 0.
fn soc_boundary_step(a: f64, b: f64, c: f64) -> f64 {
    if a.abs() < 1e-300 {
        if b < 0.0 {
            return -c / b;
        }
        return f64::INFINITY;
    }
    if a > 0.0 && b >= 0.0 {
        return f64::INFINITY;
    }
    let disc = b * b - 4.0 * a * c;
    if a > 0.0 {
        // b < 0 here; roots are real only if the parabola dips below zero.
        if disc <= 0.0 {
            return f64::INFINITY;
        }
        // Smallest positive root, in the numerically stable form.
        return 2.0 * c / (-b + disc.sqrt());
    }
    // a < 0: one sign change at the larger root.
    let disc = disc.max(0.0);
    (-b - disc.sqrt()) / (2.0 * a)
}

/// Dense lower-triangular Cholesky in place; errors on non-positive pivots.
fn cholesky(a: &mut [f64], n: usize) -> core::result::Result<(), ()> {
    for j in 0..n {
        let mut diag = a[j * n + j];
        for k in 0..j {
            diag -= a[j * n + k] * a[j * n + k];
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return Err(());
        }
        let diag = diag.sqrt();
        a[j * n + j] = diag;
        for i in j + 1..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = v / diag;
        }
    }
    Ok(())
}

fn cholesky_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= l[i * n + k] * b[k];
        }
        b[i] = v / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut v = b[i];
        for k in i + 1..n {
            v -= l[k * n + i] * b[k];
        }
        b[i] = v / l[i * n + i];
    }
}

/// Normal matrix GᵀW⁻²G, dense symmetric. Orthant rows contribute
/// (z_i/s_i)·g_i g_iᵀ; each cone block contributes
/// η⁻²(2uuᵀ − g₀g₀ᵀ + Σ_{k≥1} g_k g_kᵀ) with u = w̄₀g₀ − Σ_{k≥1} w̄_k g_k.
fn assemble_normal(p: &SocpProblem, layout: &ConeLayout, sc: &Scaling) -> Vec<f64> {
    let n = p.num_vars;
    let mut a = vec![0.0; n * n];
    let rank1_sparse = |row: &[(usize, f64)], weight: f64, a: &mut [f64]| {
        for &(j1, v1) in row {
            for &(j2, v2) in row {
                a[j1 * n + j2] += weight * v1 * v2;
            }
        }
    };
    for i in 0..layout.nonneg {
        rank1_sparse(&p.rows[i], 1.0 / sc.lp_w2[i], &mut a);
    }
    let mut base = layout.nonneg;
    for (b, &d) in layout.soc_dims.iter().enumerate() {
        let wbar = &sc.socs[b].wbar;
        let inv_eta2 = 1.0 / (sc.socs[b].eta * sc.socs[b].eta);
        let mut u = vec![0.0; n];
        for k in 0..d {
            let sign = if k == 0 { wbar[0] } else { -wbar[k] };
            for &(j, v) in &p.rows[base + k] {
                u[j] += sign * v;
            }
            let w = if k == 0 { -inv_eta2 } else { inv_eta2 };
            rank1_sparse(&p.rows[base + k], w, &mut a);
        }
        for j1 in 0..n {
            if u[j1] != 0.0 {
                let scale = 2.0 * inv_eta2 * u[j1];
                for j2 in 0..n {
                    a[j1 * n + j2] += scale * u[j2];
                }
            }
        }
        base += d;
    }
    a
}

/// Factor A (+ growing diagonal regularization on failure) and return a
/// solve closure input; also keeps the original matrix for one round of
/// iterative refinement.
struct NormalSystem {
    l: Vec<f64>,
    orig: Vec<f64>,
    n: usize,
}

impl NormalSystem {
    fn factor(a: Vec<f64>, n: usize) -> Result<Self> {
        let orig = a.clone();
        let mut trace = 0.0;
        for j in 0..n {
            trace += a[j * n + j];
        }
        let mut reg = 0.0;
        let mut attempt = a;
        for _ in 0..7 {
            let mut l = attempt.clone();
            if cholesky(&mut l, n).is_ok() {
                return Ok(NormalSystem { l, orig, n });
            }
            reg = if reg == 0.0 { 1e-12 * (1.0 + trace / n as f64) } else { reg * 100.0 };
            attempt = orig.clone();
            for j in 0..n {
                attempt[j * n + j] += reg;
            }
        }
        Err(Error::SolverFailure("normal-matrix factorization failed"))
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = rhs.to_vec();
        cholesky_solve(&self.l, n, &mut x);
        // One refinement step against the unregularized matrix.
        let mut r = rhs.to_vec();
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += self.orig[i * n + j] * x[j];
            }
            r[i] -= acc;
        }
        cholesky_solve(&self.l, n, &mut r);
        for i in 0..n {
            x[i] += r[i];
        }
        x
    }
}

/// Solves the conic program. The returned residuals are evaluated on the
/// problem as given. On `MaxIterations` or `Stalled` the best iterate seen
/// (smallest worst-case relative residual) is handed back so callers can
/// decide whether it is usable.
pub fn solve(p: &SocpProblem, settings: &SolverSettings) -> Result<Solution> {
    validate(p)?;
    let layout = ConeLayout { nonneg: p.nonneg, soc_dims: p.soc_dims.clone() };
    let m = layout.total();
    let n = p.num_vars;
    if m == 0 {
        return Err(Error::InvalidParameter("conic program needs at least one row"));
    }
    let nu = layout.degree();
    let e = layout.identity();

    let mut x = vec![0.0; n];
    let mut s = e.clone();
    let mut z = e.clone();

    let norm_h = norm_inf(&p.h);
    let norm_c = norm_inf(&p.c);

    let mut best: Option<Solution> = None;
    let mut best_score = f64::INFINITY;
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;
    for iter in 0..=settings.max_iter {
        iterations = iter;
        let gx = mat_vec(&p.rows, &x);
        let mut r_p = vec![0.0; m];
        for i in 0..m {
            r_p[i] = gx[i] + s[i] - p.h[i];
        }
        let gtz = mat_t_vec(&p.rows, n, &z);
        let mut r_d = vec![0.0; n];
        for j in 0..n {
            r_d[j] = p.c[j] + gtz[j];
        }
        let gap = dot(&s, &z);
        let obj = dot(&p.c, &x);

        let rel_p = norm_inf(&r_p) / (1.0 + norm_h);
        let rel_d = norm_inf(&r_d) / (1.0 + norm_c);
        let rel_gap = gap.max(0.0) / 1.0f64.max(obj.abs());
        let score = rel_p.max(rel_d).max(rel_gap);
        if !score.is_finite() {
            status = SolveStatus::Stalled;
            break;
        }
        if score < best_score {
            best_score = score;
            best = Some(Solution {
                x: x.clone(),
                s: s.clone(),
                z: z.clone(),
                status: SolveStatus::Optimal,
                iterations: iter,
                primal_residual: norm_inf(&r_p),
                dual_residual: norm_inf(&r_d),
                gap,
                objective: obj,
            });
        }
        if rel_p <= settings.tol && rel_d <= settings.tol && rel_gap <= settings.tol {
            status = SolveStatus::Optimal;
            break;
        }
        if iter == settings.max_iter {
            status = SolveStatus::MaxIterations;
            break;
        }

        let sc = match compute_scaling(&layout, &s, &z) {
            Ok(v) => v,
            Err(_) => {
                status = SolveStatus::Stalled;
                break;
            }
        };
        let normal = match NormalSystem::factor(assemble_normal(p, &layout, &sc), n) {
            Ok(v) => v,
            Err(_) => {
                status = SolveStatus::Stalled;
                break;
            }
        };
        let mu = gap / nu;

        // Affine (predictor) direction: b_s = −λ, so r_p + W b_s = Gx − h.
        let mut gx_h = vec![0.0; m];
        for i in 0..m {
            gx_h[i] = gx[i] - p.h[i];
        }
        let w2term = apply_w_inv2(&layout, &sc, &gx_h);
        let mut rhs = mat_t_vec(&p.rows, n, &w2term);
        for j in 0..n {
            rhs[j] = -r_d[j] - rhs[j];
        }
        let dx_a = normal.solve(&rhs);
        let g_dx = mat_vec(&p.rows, &dx_a);
        let mut dz_a = vec![0.0; m];
        for i in 0..m {
            dz_a[i] = g_dx[i] + gx_h[i];
        }
        let dz_a = apply_w_inv2(&layout, &sc, &dz_a);
        let mut ds_a = vec![0.0; m];
        for i in 0..m {
            ds_a[i] = -r_p[i] - g_dx[i];
        }

        let alpha_aff = 1.0f64.min(max_step(&layout, &s, &ds_a)).min(max_step(&layout, &z, &dz_a));
        let mut gap_aff = 0.0;
        for i in 0..m {
            gap_aff += (s[i] + alpha_aff * ds_a[i]) * (z[i] + alpha_aff * dz_a[i]);
        }
        let sigma = (gap_aff / gap).max(0.0).min(1.0).powi(3);

        // Corrector: d_λ = −λ∘λ − (W⁻¹Δs_a)∘(WΔz_a) + σμe.
        let winv_ds = apply_w_inv(&layout, &sc, &ds_a);
        let w_dz = apply_w(&layout, &sc, &dz_a);
        let cross = jordan_prod(&layout, &winv_ds, &w_dz);
        let lam2 = jordan_prod(&layout, &sc.lambda, &sc.lambda);
        let mut d_lambda = vec![0.0; m];
        for i in 0..m {
            d_lambda[i] = -lam2[i] - cross[i] + sigma * mu * e[i];
        }
        let b_s = match jordan_div_lambda(&layout, &sc.lambda, &d_lambda) {
            Ok(v) => v,
            Err(_) => {
                status = SolveStatus::Stalled;
                break;
            }
        };
        let w_bs = apply_w(&layout, &sc, &b_s);
        let mut rp_wbs = vec![0.0; m];
        for i in 0..m {
            rp_wbs[i] = r_p[i] + w_bs[i];
        }
        let w2term = apply_w_inv2(&layout, &sc, &rp_wbs);
        let mut rhs = mat_t_vec(&p.rows, n, &w2term);
        for j in 0..n {
            rhs[j] = -r_d[j] - rhs[j];
        }
        let dx = normal.solve(&rhs);
        let g_dx = mat_vec(&p.rows, &dx);
        let mut dz = vec![0.0; m];
        for i in 0..m {
            dz[i] = g_dx[i] + rp_wbs[i];
        }
        let dz = apply_w_inv2(&layout, &sc, &dz);
        let mut ds = vec![0.0; m];
        for i in 0..m {
            ds[i] = -r_p[i] - g_dx[i];
        }

        let alpha = 1.0f64.min(0.99 * max_step(&layout, &s, &ds).min(max_step(&layout, &z, &dz)));
        if !alpha.is_finite() || alpha <= 1e-10 {
            status = SolveStatus::Stalled;
            break;
        }
        for j in 0..n {
            x[j] += alpha * dx[j];
        }
        for i in 0..m {
            s[i] += alpha * ds[i];
            z[i] += alpha * dz[i];
        }
    }

    let mut sol = best.ok_or(Error::SolverFailure("no usable iterate was produced"))?;
    sol.status = status;
    sol.iterations = iterations;
    Ok(sol)
}

/// Membership test for the rotated-cone constraint a² ≤ s·t with s, t ≥ 0.
pub fn rotated_cone_member(a: f64, s: f64, t: f64) -> bool {
    s >= 0.0 && t >= 0.0 && a * a <= s * t
}

/// Membership test for the equivalent second-order cone point
/// (s + t, 2a, s − t) ∈ Q³.
pub fn rotated_cone_soc_image_member(a: f64, s: f64, t: f64) -> bool {
    let head = s + t;
    head >= 0.0 && (2.0 * a).hypot(s - t) <= head
}
