//! Dense real matrices for the few-mode covariance algebra.
//!
//! Everything here is at most 2M×2M with M ≤ 5 modes, so plain row-major
//! storage with partial-pivot Gauss–Jordan is plenty.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut, Mul};
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Mat::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Mat {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `A M Aᵀ`.
    pub fn congruence(&self, a: &Mat) -> Mat {
        &(a * self) * &a.transpose()
    }

    /// Sub-block `[r0, r0+nr) × [c0, c0+nc)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Mat {
        let mut b = Mat::zeros(nr, nc);
        for i in 0..nr {
            for j in 0..nc {
                b[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        b
    }

    /// Principal submatrix on the given index set.
    pub fn select(&self, idx: &[usize]) -> Mat {
        let mut b = Mat::zeros(idx.len(), idx.len());
        for (i, &a) in idx.iter().enumerate() {
            for (j, &c) in idx.iter().enumerate() {
                b[(i, j)] = self[(a, c)];
            }
        }
        b
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.transpose()) <= tol * (1.0 + self.max_abs())
    }

    fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// LU-style determinant with partial pivoting.
    pub fn det(&self) -> f64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
                .unwrap();
            if a[p * n + k] == 0.0 {
                return 0.0;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let piv = a[k * n + k];
            det *= piv;
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        det
    }

    /// Inverse together with its 1-norm condition number.
    pub fn inverse_with_condition(&self) -> Result<(Mat, f64)> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.data.clone();
        let mut inv = Mat::identity(n).data;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
                .unwrap();
            let piv = a[p * n + k];
            if piv == 0.0 || !piv.is_finite() {
                return Err(Error::NumericalSingularity {
                    condition: f64::INFINITY,
                });
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                    inv.swap(k * n + j, p * n + j);
                }
            }
            for j in 0..n {
                a[k * n + j] /= piv;
                inv[k * n + j] /= piv;
            }
            for i in 0..n {
                if i != k {
                    let f = a[i * n + k];
                    if f != 0.0 {
                        for j in 0..n {
                            a[i * n + j] -= f * a[k * n + j];
                            inv[i * n + j] -= f * inv[k * n + j];
                        }
                    }
                }
            }
        }
        let inv = Mat {
            rows: n,
            cols: n,
            data: inv,
        };
        let cond = self.norm1() * inv.norm1();
        Ok((inv, cond))
    }

    /// Inverse, refusing matrices whose condition number exceeds `max_cond`.
    pub fn inverse_guarded(&self, max_cond: f64) -> Result<Mat> {
        let (inv, cond) = self.inverse_with_condition()?;
        if !(cond <= max_cond) {
            return Err(Error::NumericalSingularity { condition: cond });
        }
        Ok(inv)
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Symplectic form `Ω = ⊕ [[0, 1], [−1, 0]]` over `modes` modes, ordered
/// `(x₁, p₁, x₂, p₂, …)`.
pub fn symplectic_form(modes: usize) -> Mat {
    let mut om = Mat::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        om[(2 * k, 2 * k + 1)] = 1.0;
        om[(2 * k + 1, 2 * k)] = -1.0;
    }
    om
}

/// Checks `Σ + (i/2)Ω ⪰ 0` by Cholesky on the Hermitian matrix, allowing a
/// relative slack `tol`. This is equivalent to every symplectic eigenvalue of
/// `Σ` being at least 1/2.
pub fn is_physical_covariance(cov: &Mat, tol: f64) -> bool {
    if !cov.is_symmetric(1e-12) || cov.rows() % 2 != 0 {
        return false;
    }
    let n = cov.rows();
    let om = symplectic_form(n / 2);
    let shift = tol * (1.0 + cov.max_abs());
    let mut h: Vec<Complex64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let re = cov[(i, j)] + if i == j { shift } else { 0.0 };
            Complex64::new(re, 0.5 * om[(i, j)])
        })
        .collect();
    for j in 0..n {
        let mut d = h[j * n + j].re;
        for k in 0..j {
            d -= h[j * n + k].norm_sqr();
        }
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        h[j * n + j] = Complex64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = h[i * n + j];
            for k in 0..j {
                s -= h[i * n + k] * h[j * n + k].conj();
            }
            h[i * n + j] = s / d;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let m = Mat::from_rows(&[&[4.0, 1.0, 0.5], &[1.0, 3.0, 0.2], &[0.5, 0.2, 2.0]]);
        let (inv, cond) = m.inverse_with_condition().unwrap();
        assert!((&m * &inv).max_abs_diff(&Mat::identity(3)) < 1e-14);
        assert!(cond > 1.0 && cond < 10.0);
    }

    #[test]
    fn det_matches_cofactor() {
        let m = Mat::from_rows(&[&[2.0, -1.0, 0.0], &[-1.0, 2.0, -1.0], &[0.0, -1.0, 2.0]]);
        assert!((m.det() - 4.0).abs() < 1e-14);
        let swapped = Mat::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(swapped.det(), -1.0);
    }

    #[test]
    fn singular_is_rejected() {
        let m = Mat::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(
            m.inverse_guarded(1e12),
            Err(Error::NumericalSingularity { .. })
        ));
        let near = Mat::from_rows(&[&[1.0, 0.0], &[0.0, 1e-14]]);
        assert!(near.inverse_guarded(1e12).is_err());
    }

    #[test]
    fn physicality() {
        assert!(is_physical_covariance(&Mat::diag(&[0.5, 0.5]), 1e-12));
        assert!(is_physical_covariance(&Mat::diag(&[2.0, 0.125]), 1e-12));
        assert!(!is_physical_covariance(&Mat::diag(&[0.4, 0.5]), 1e-12));
        assert!(!is_physical_covariance(
            &Mat::diag(&[0.25, 0.5, 0.5, 0.5]),
            1e-12
        ));
    }
}
