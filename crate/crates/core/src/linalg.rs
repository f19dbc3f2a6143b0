//! Small dense complex solver used for the per-mode interface systems.

use crate::error::{Result, SuperlensError};
use crate::spectral::C64;

/// Row-major square complex matrix of fixed size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallMatrix<const N: usize> {
    pub rows: [[C64; N]; N],
}

impl<const N: usize> SmallMatrix<N> {
    pub fn new(rows: [[C64; N]; N]) -> Self {
        SmallMatrix { rows }
    }

    pub fn mul_vec(&self, x: &[C64; N]) -> [C64; N] {
        let mut y = [C64::new(0.0, 0.0); N];
        for (yi, row) in y.iter_mut().zip(&self.rows) {
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        y
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> C64 {
        let mut m = self.rows;
        let mut det = C64::new(1.0, 0.0);
        for k in 0..N {
            let p = (k..N)
                .max_by(|&i, &j| m[i][k].norm().total_cmp(&m[j][k].norm()))
                .unwrap();
            if m[p][k].norm() == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if p != k {
                m.swap(p, k);
                det = -det;
            }
            det *= m[k][k];
            for i in k + 1..N {
                let f = m[i][k] / m[k][k];
                for j in k..N {
                    let t = m[k][j];
                    m[i][j] -= f * t;
                }
            }
        }
        det
    }

    /// Solves `A x = rhs` after row and column equilibration, with partial pivoting.
    pub fn solve(&self, rhs: &[C64; N]) -> Result<[C64; N]> {
        let mut m = self.rows;
        let mut b = *rhs;
        let mut row_scale = [1.0; N];
        for (i, row) in m.iter().enumerate() {
            let s = row.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if s == 0.0 {
                return Err(SuperlensError::SingularSystem { size: N });
            }
            row_scale[i] = 1.0 / s;
        }
        for i in 0..N {
            for v in m[i].iter_mut() {
                *v *= row_scale[i];
            }
            b[i] *= row_scale[i];
        }
        let mut col_scale = [1.0; N];
        for (j, cs) in col_scale.iter_mut().enumerate() {
            let s = (0..N).map(|i| m[i][j].norm()).fold(0.0, f64::max);
            if s == 0.0 {
                return Err(SuperlensError::SingularSystem { size: N });
            }
            *cs = 1.0 / s;
        }
        for row in m.iter_mut() {
            for (v, cs) in row.iter_mut().zip(&col_scale) {
                *v *= *cs;
            }
        }
        for k in 0..N {
            let p = (k..N)
                .max_by(|&i, &j| m[i][k].norm().total_cmp(&m[j][k].norm()))
                .unwrap();
            if m[p][k].norm() <= f64::EPSILON * 1e-3 {
                return Err(SuperlensError::SingularSystem { size: N });
            }
            m.swap(p, k);
            b.swap(p, k);
            for i in k + 1..N {
                let f = m[i][k] / m[k][k];
                if f.norm() == 0.0 {
                    continue;
                }
                for j in k..N {
                    let t = m[k][j];
                    m[i][j] -= f * t;
                }
                let t = b[k];
                b[i] -= f * t;
            }
        }
        let mut x = [C64::new(0.0, 0.0); N];
        for k in (0..N).rev() {
            let s: C64 = (k + 1..N).map(|j| m[k][j] * x[j]).sum();
            x[k] = (b[k] - s) / m[k][k];
        }
        for (xj, cs) in x.iter_mut().zip(&col_scale) {
            *xj *= *cs;
        }
        Ok(x)
    }

    /// Norm-wise backward error `||b - A x|| / (||A|| ||x|| + ||b||)` in the infinity norm.
    pub fn backward_error(&self, x: &[C64; N], rhs: &[C64; N]) -> f64 {
        let ax = self.mul_vec(x);
        let r = ax
            .iter()
            .zip(rhs)
            .map(|(a, b)| (b - a).norm())
            .fold(0.0, f64::max);
        let xn = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let bn = rhs.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let denom = self.norm_inf() * xn + bn;
        if denom == 0.0 {
            0.0
        } else {
            r / denom
        }
    }
}
