//! Position statistics and the centering quadratic form.
//!
//! Every bound in this crate depends on trajectories only through the
//! population variance of the visited positions (and, in 2D, the covariance
//! between the two coordinate rows). The quadratic form behind those
//! statistics is x'Bx with B = I/N − 11'/N², a positive-semidefinite matrix
//! whose null space is the all-ones vector; it is applied matrix-free so the
//! N = 10⁵ regimes never materialize an N × N array.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Population variance and covariance of the position rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceStats {
    /// Population variance of x: (1/N)Σ(x_n − x̄)².
    pub var_x: f64,
    /// Population variance of y; zero for 1D input.
    pub var_y: f64,
    /// Population covariance (1/N)Σ(x_n − x̄)(y_n − ȳ); zero for 1D input.
    pub cov_xy: f64,
    /// Mean of x.
    pub mean_x: f64,
    /// Mean of y; zero for 1D input.
    pub mean_y: f64,
}

/// Two-pass population variance/covariance. The two-pass form subtracts the
/// mean before squaring, so it does not suffer the catastrophic cancellation
/// of the naive (1/N)Σx² − x̄² formula when positions sit far from zero.
pub fn variance_stats(x: &[f64], y: Option<&[f64]>) -> Result<VarianceStats> {
    if x.is_empty() {
        return Err(Error::InvalidParameter("variance_stats needs at least one sample"));
    }
    if let Some(y) = y {
        if y.len() != x.len() {
            return Err(Error::DimensionMismatch("x and y rows must have the same length"));
        }
    }
    let n = x.len() as f64;
    let mean_x = pairwise_sum_slice(x) / n;
    let (mean_y, var_y, cov_xy);
    let mut dx2 = Vec::with_capacity(x.len());
    for &xi in x {
        let d = xi - mean_x;
        dx2.push(d * d);
    }
    let var_x = pairwise_sum_slice(&dx2) / n;
    match y {
        Some(yv) => {
            let my = pairwise_sum_slice(yv) / n;
            let mut dy2 = Vec::with_capacity(yv.len());
            let mut dxy = Vec::with_capacity(yv.len());
            for i in 0..yv.len() {
                let dy = yv[i] - my;
                dy2.push(dy * dy);
                dxy.push((x[i] - mean_x) * dy);
            }
            mean_y = my;
            var_y = pairwise_sum_slice(&dy2) / n;
            cov_xy = pairwise_sum_slice(&dxy) / n;
        }
        None => {
            mean_y = 0.0;
            var_y = 0.0;
            cov_xy = 0.0;
        }
    }
    Ok(VarianceStats { var_x, var_y, cov_xy, mean_x, mean_y })
}

/// The centering quadratic form B = I/N − 11'/N², held implicitly.
///
/// Properties used throughout: B is symmetric positive semidefinite, B·1 = 0,
/// and for any mean-free vector z, Bz = z/N (so the nonzero eigenvalue is 1/N
/// with multiplicity N − 1). x'Bx equals the population variance of x and
/// x'By the population covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CenteringMatrix {
    n: usize,
}

impl CenteringMatrix {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("centering matrix needs n >= 1"));
        }
        Ok(CenteringMatrix { n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Matrix-vector product Bx in O(N) time and memory.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch("vector length must equal the matrix dimension"));
        }
        let n = self.n as f64;
        let mean = pairwise_sum_slice(x) / n;
        Ok(x.iter().map(|&xi| (xi - mean) / n).collect())
    }

    /// Bilinear form x'By; with y = x this is the population variance.
    pub fn quad_form(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != self.n || y.len() != self.n {
            return Err(Error::DimensionMismatch("vector length must equal the matrix dimension"));
        }
        let n = self.n as f64;
        let mx = pairwise_sum_slice(x) / n;
        let my = pairwise_sum_slice(y) / n;
        let mut prods = Vec::with_capacity(self.n);
        for i in 0..self.n {
            prods.push((x[i] - mx) * (y[i] - my));
        }
        Ok(pairwise_sum_slice(&prods) / n)
    }

    /// Dense realization for small-N tests and debugging only.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n as f64;
        let mut rows = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut row = Vec::with_capacity(self.n);
            for j in 0..self.n {
                let diag = if i == j { 1.0 / n } else { 0.0 };
                row.push(diag - 1.0 / (n * n));
            }
            rows.push(row);
        }
        rows
    }
}

/// Pairwise (fixed-tree) summation: O(log N) error growth and a reduction
/// order independent of chunking, so results are bit-reproducible.
pub fn pairwise_sum_slice(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2 => v[0] + v[1],
        n => {
            let mid = n / 2;
            pairwise_sum_slice(&v[..mid]) + pairwise_sum_slice(&v[mid..])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variance_of_known_sets() {
        // Symmetric ruler 0..4: mean 2, variance 2.
        let s = variance_stats(&[0.0, 1.0, 2.0, 3.0, 4.0], None).unwrap();
        assert!((s.mean_x - 2.0).abs() < 1e-15);
        assert!((s.var_x - 2.0).abs() < 1e-15);
        assert_eq!(s.var_y, 0.0);
        assert_eq!(s.cov_xy, 0.0);

        // Two-point set {0, a}: variance a²/4.
        let s = variance_stats(&[0.0, 6.0], None).unwrap();
        assert!((s.var_x - 9.0).abs() < 1e-15);

        // Perfectly correlated rows: cov² = var_x · var_y.
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let s = variance_stats(&x, Some(&y)).unwrap();
        assert!((s.cov_xy * s.cov_xy - s.var_x * s.var_y).abs() < 1e-12);
        assert!((s.cov_xy - 2.0 * s.var_x).abs() < 1e-12);
    }

    #[test]
    fn two_pass_is_stable_under_large_offsets() {
        // Same shape, offset by 10⁹: variance must not move.
        let base = [0.0, 0.125, 0.25, 0.375, 0.5];
        let s0 = variance_stats(&base, None).unwrap();
        let shifted: Vec<f64> = base.iter().map(|&b| b + 1.0e9).collect();
        let s1 = variance_stats(&shifted, None).unwrap();
        assert!(
            (s0.var_x - s1.var_x).abs() < 1e-9 * s0.var_x,
            "var drifted: {} vs {}",
            s0.var_x,
            s1.var_x
        );
    }

    #[test]
    fn quad_form_matches_variance_and_dense_matrix() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            // SplitMix64 step; maps to [0, 1).
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            (z ^ (z >> 31)) as f64 / u64::MAX as f64
        };
        let mut worst: f64 = 0.0;
        for case in 0..120 {
            let n = 1 + case % 17;
            let b = CenteringMatrix::new(n).unwrap();
            let x: Vec<f64> = (0..n).map(|_| 20.0 * next() - 10.0).collect();
            let y: Vec<f64> = (0..n).map(|_| 20.0 * next() - 10.0).collect();

            let s = variance_stats(&x, Some(&y)).unwrap();
            let qxx = b.quad_form(&x, &x).unwrap();
            let qxy = b.quad_form(&x, &y).unwrap();
            worst = worst.max((qxx - s.var_x).abs()).max((qxy - s.cov_xy).abs());

            // Dense route: x'(Bdense)y elementwise.
            let dense = b.to_dense();
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += x[i] * dense[i][j] * y[j];
                }
            }
            worst = worst.max((acc - qxy).abs());

            // apply() against the dense product.
            let bx = b.apply(&x).unwrap();
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += dense[i][j] * x[j];
                }
                worst = worst.max((acc - bx[i]).abs());
            }
        }
        println!("quad_form consistency over 120 cases: worst abs err {worst:.3e}");
        assert!(worst < 1e-10);
    }

    #[test]
    fn centering_matrix_structure() {
        for n in [1usize, 2, 3, 7, 32] {
            let b = CenteringMatrix::new(n).unwrap();
            // B annihilates constants.
            let ones = alloc::vec![1.0; n];
            for v in b.apply(&ones).unwrap() {
                assert!(v.abs() < 1e-15);
            }
            // Mean-free vectors are eigenvectors with eigenvalue 1/N.
            if n >= 2 {
                let mut z = alloc::vec![0.0; n];
                z[0] = 1.0;
                z[1] = -1.0;
                let bz = b.apply(&z).unwrap();
                for i in 0..n {
                    assert!((bz[i] - z[i] / n as f64).abs() < 1e-15);
                }
            }
            // PSD on a haphazard vector.
            let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin() * 5.0).collect();
            assert!(b.quad_form(&x, &x).unwrap() >= -1e-15);
        }
    }

    #[test]
    fn pairwise_sum_agrees_with_exact_integer_sums() {
        // Integer-valued data sums exactly in f64 well below 2^53.
        for n in [0usize, 1, 2, 3, 10, 1000, 4097] {
            let v: Vec<f64> = (0..n).map(|i| i as f64).collect();
            let expect = (n * n.saturating_sub(1) / 2) as f64;
            assert_eq!(pairwise_sum_slice(&v), expect, "n={n}");
        }
    }
}
