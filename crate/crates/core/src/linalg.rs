//! Dense complex Hermitian linear algebra for small covariance matrices.
//!
//! The MVDR stage needs a Hermitian positive-definite solve per steering
//! vector and a cheap condition estimate. N is the subcarrier count (tens),
//! so a plain Cholesky factorization is both fast and numerically safe.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor of a Hermitian positive-definite matrix.
pub struct Cholesky {
    l: Array2<Complex64>,
}

impl Cholesky {
    /// Factor `a = L L^H`. Fails if a pivot is not strictly positive.
    pub fn new(a: &Array2<Complex64>) -> Result<Self> {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "matrix must be square");
        let mut l = Array2::<Complex64>::zeros((n, n));
        for j in 0..n {
            let mut diag = a[(j, j)].re;
            for k in 0..j {
                diag -= l[(j, k)].norm_sqr();
            }
            if !diag.is_finite() || diag <= 0.0 {
                return Err(Error::NotPositiveDefinite);
            }
            let djj = diag.sqrt();
            l[(j, j)] = Complex64::new(djj, 0.0);
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Self { l })
    }

    /// Solve `A x = b` using the stored factor.
    pub fn solve(&self, b: &Array1<Complex64>) -> Array1<Complex64> {
        let n = self.l.nrows();
        assert_eq!(b.len(), n, "rhs length must match");
        // Forward: L y = b
        let mut y = Array1::<Complex64>::zeros(n);
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        // Backward: L^H x = y
        let mut x = Array1::<Complex64>::zeros(n);
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[(k, i)].conj() * x[k];
            }
            x[i] = s / self.l[(i, i)];
        }
        x
    }
}

/// Estimate the 2-norm condition number of a Hermitian positive-definite
/// matrix via power iteration on `A` and on `A^{-1}` (through `chol`).
pub fn condition_estimate(a: &Array2<Complex64>, chol: &Cholesky) -> f64 {
    let n = a.nrows();
    let mut v = Array1::from_elem(n, Complex64::new(1.0, 0.0));
    let mut lam_max = 0.0f64;
    for _ in 0..20 {
        let w = a.dot(&v);
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return f64::INFINITY;
        }
        lam_max = norm;
        v = w.mapv(|z| z / norm);
    }
    let mut u = Array1::from_shape_fn(n, |i| Complex64::new(1.0, if i % 2 == 0 { 0.5 } else { -0.5 }));
    let mut inv_lam_min = 0.0f64;
    for _ in 0..20 {
        let w = chol.solve(&u);
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return f64::INFINITY;
        }
        inv_lam_min = norm;
        u = w.mapv(|z| z / norm);
    }
    lam_max * inv_lam_min
}

/// Largest absolute difference between `a` and its conjugate transpose.
pub fn hermitian_defect(a: &Array2<Complex64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let d = (a[(i, j)] - a[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hpd_fixture(n: usize) -> Array2<Complex64> {
        // B^H B + I with a deterministic complex B.
        let b = Array2::from_shape_fn((n, n), |(i, j)| {
            Complex64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64 - 1.0)
        });
        let mut a = Array2::<Complex64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    s += b[(k, i)].conj() * b[(k, j)];
                }
                a[(i, j)] = s;
            }
            a[(i, i)] += Complex64::new(1.0, 0.0);
        }
        a
    }

    #[test]
    fn cholesky_solve_recovers_rhs() {
        let a = hpd_fixture(12);
        let chol = Cholesky::new(&a).unwrap();
        let x_true = Array1::from_shape_fn(12, |i| Complex64::new(i as f64, -(i as f64) * 0.5));
        let b = a.dot(&x_true);
        let x = chol.solve(&b);
        for (u, v) in x.iter().zip(x_true.iter()) {
            assert!((u - v).norm() < 1e-9, "solve mismatch: {u} vs {v}");
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut a = hpd_fixture(6);
        a[(3, 3)] = Complex64::new(-100.0, 0.0);
        assert!(matches!(Cholesky::new(&a), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn identity_condition_is_one() {
        let a = Array2::from_diag(&Array1::from_elem(8, Complex64::new(1.0, 0.0)));
        let chol = Cholesky::new(&a).unwrap();
        let c = condition_estimate(&a, &chol);
        assert!((c - 1.0).abs() < 1e-9, "identity condition {c}");
    }

    #[test]
    fn condition_tracks_diagonal_spread() {
        let mut a = Array2::from_diag(&Array1::from_elem(8, Complex64::new(1.0, 0.0)));
        a[(0, 0)] = Complex64::new(1e6, 0.0);
        let chol = Cholesky::new(&a).unwrap();
        let c = condition_estimate(&a, &chol);
        assert!((c / 1e6 - 1.0).abs() < 1e-3, "condition estimate {c}");
    }
}
