use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::matrix::{ComplexMatrix, C64};

/// Real-linear map `C^n -> C^m` written on stacked coordinates `(Re x, Im x)`.
///
/// Every real-linear map has the form `x -> A x + B conj(x)`; complex-linear
/// maps are those with `B = 0`, which is what [`RealifiedSystem::decode`]
/// checks.
#[derive(Clone, Debug, PartialEq)]
pub struct RealifiedSystem {
    complex_rows: usize,
    complex_cols: usize,
    real_matrix: DMatrix<f64>,
}

impl RealifiedSystem {
    /// Encode `x -> linear x + conjugate conj(x)`.
    pub fn new(linear: &ComplexMatrix, conjugate: &ComplexMatrix) -> Result<Self> {
        if linear.shape() != conjugate.shape() {
            return Err(Error::Dimension(format!(
                "linear part {:?} and conjugate part {:?} differ",
                linear.shape(),
                conjugate.shape()
            )));
        }
        let (m, n) = linear.shape();
        let mut r = DMatrix::zeros(2 * m, 2 * n);
        for i in 0..m {
            for j in 0..n {
                let a = linear.get(i, j);
                let b = conjugate.get(i, j);
                r[(i, j)] = a.re + b.re;
                r[(i, n + j)] = -a.im + b.im;
                r[(m + i, j)] = a.im + b.im;
                r[(m + i, n + j)] = a.re - b.re;
            }
        }
        Ok(Self {
            complex_rows: m,
            complex_cols: n,
            real_matrix: r,
        })
    }

    pub fn from_linear(m: &ComplexMatrix) -> Self {
        Self::new(m, &ComplexMatrix::zeros(m.rows(), m.cols())).expect("shapes agree")
    }

    pub fn from_conjugate_linear(m: &ComplexMatrix) -> Self {
        Self::new(&ComplexMatrix::zeros(m.rows(), m.cols()), m).expect("shapes agree")
    }

    pub fn complex_dim(&self) -> (usize, usize) {
        (self.complex_rows, self.complex_cols)
    }

    pub fn real_matrix(&self) -> &DMatrix<f64> {
        &self.real_matrix
    }

    /// Split back into `(linear, conjugate)` parts.
    pub fn parts(&self) -> (ComplexMatrix, ComplexMatrix) {
        let (m, n) = (self.complex_rows, self.complex_cols);
        let r = &self.real_matrix;
        let lin = ComplexMatrix::from_fn(m, n, |i, j| {
            let p = r[(i, j)];
            let q = r[(m + i, n + j)];
            let s = r[(m + i, j)];
            let t = r[(i, n + j)];
            C64::new((p + q) / 2.0, (s - t) / 2.0)
        });
        let conj = ComplexMatrix::from_fn(m, n, |i, j| {
            let p = r[(i, j)];
            let q = r[(m + i, n + j)];
            let s = r[(m + i, j)];
            let t = r[(i, n + j)];
            C64::new((p - q) / 2.0, (s + t) / 2.0)
        });
        (lin, conj)
    }

    /// Decode a complex-linear map; fails when the conjugate-linear part is
    /// not negligible.
    pub fn decode(&self, tol: f64) -> Result<ComplexMatrix> {
        let (lin, conj) = self.parts();
        let defect = conj.max_abs();
        if defect > tol * lin.max_abs().max(1.0) {
            return Err(Error::Dimension(format!(
                "realified map is not complex-linear (conjugate part {defect:.3e})"
            )));
        }
        Ok(lin)
    }

    pub fn apply(&self, x: &DVector<C64>) -> DVector<C64> {
        derealify(&(&self.real_matrix * realify(x)))
    }
}

/// `(Re x, Im x)` stacked.
pub fn realify(x: &DVector<C64>) -> DVector<f64> {
    let n = x.len();
    DVector::from_fn(2 * n, |i, _| if i < n { x[i].re } else { x[i - n].im })
}

pub fn derealify(x: &DVector<f64>) -> DVector<C64> {
    let n = x.len() / 2;
    DVector::from_fn(n, |i, _| C64::new(x[i], x[n + i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(m: usize, n: usize, seed: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(m, n, |i, j| {
            let t = seed + (i * 7 + j * 3) as f64;
            C64::new(t.sin(), (1.3 * t).cos())
        })
    }

    #[test]
    fn linear_round_trip() {
        let a = sample(3, 2, 0.4);
        let r = RealifiedSystem::from_linear(&a);
        assert_eq!(r.decode(1e-14).unwrap(), a);
    }

    #[test]
    fn conjugate_map_is_not_decodable() {
        let a = sample(2, 2, 1.1);
        let r = RealifiedSystem::from_conjugate_linear(&a);
        assert!(r.decode(1e-10).is_err());
        let x = DVector::from_fn(2, |i, _| C64::new(i as f64 + 1.0, 2.0 - i as f64));
        let direct = a.as_dmatrix() * x.map(|z| z.conj());
        assert!((r.apply(&x) - direct).norm() < 1e-12);
    }

    #[test]
    fn mixed_map_applies_both_parts() {
        let a = sample(2, 3, 0.2);
        let b = sample(2, 3, 5.0);
        let r = RealifiedSystem::new(&a, &b).unwrap();
        let x = DVector::from_fn(3, |i, _| C64::new(0.3 * i as f64 - 1.0, 0.7));
        let direct = a.as_dmatrix() * &x + b.as_dmatrix() * x.map(|z| z.conj());
        assert!((r.apply(&x) - direct).norm() < 1e-12);
        let (lin, conj) = r.parts();
        assert!((&lin - &a).max_abs() < 1e-14 && (&conj - &b).max_abs() < 1e-14);
    }
}
