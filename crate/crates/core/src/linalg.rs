//! Minimal dense linear algebra for symmetric positive definite systems.

use alloc::vec;
use alloc::vec::Vec;

/// Lower-triangular Cholesky factor stored row-major in a full `n x n` buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    /// Factors a symmetric matrix given row-major. Returns `None` when the
    /// matrix is not numerically positive definite.
    pub fn factor(n: usize, a: &[f64]) -> Option<Self> {
        debug_assert_eq!(a.len(), n * n);
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let row_j = j * n;
            let mut diag = a[row_j + j];
            for k in 0..j {
                diag -= l[row_j + k] * l[row_j + k];
            }
            // Pivots lost to cancellation count as singular.
            if !(diag > 1e-13 * a[row_j + j]) || !diag.is_finite() {
                return None;
            }
            let ljj = libm::sqrt(diag);
            l[row_j + j] = ljj;
            for i in (j + 1)..n {
                let row_i = i * n;
                let mut s = a[row_i + j];
                for k in 0..j {
                    s -= l[row_i + k] * l[row_j + k];
                }
                l[row_i + j] = s / ljj;
            }
        }
        Some(Self { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `L y = b` in place.
    pub fn solve_lower_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s: f64 = row.iter().zip(&b[..i]).map(|(a, x)| a * x).sum();
            b[i] = (b[i] - s) / self.l[i * n + i];
        }
    }

    /// Solves `L^T x = y` in place.
    pub fn solve_upper_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }

    /// Solves `A x = b` where `A = L L^T`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_lower_in_place(&mut x);
        self.solve_upper_in_place(&mut x);
        x
    }

    /// `log det A`.
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.n)
            .map(|i| libm::log(self.l[i * self.n + i]))
            .sum::<f64>()
    }
}
