use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};

use super::svd::checked_svd;

use crate::error::{Error, Result};

use super::matrix::{ComplexMatrix, C64};

/// How singular values are compared against zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cutoff {
    /// `eps * max(rows, cols) * sigma_max`.
    Default,
    /// Singular values `<= t` are zero.
    Absolute(f64),
    /// Singular values `<= r * sigma_max` are zero.
    Relative(f64),
}

impl Cutoff {
    fn threshold(self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match self {
            Cutoff::Default => f64::EPSILON * rows.max(cols) as f64 * sigma_max,
            Cutoff::Absolute(t) => t,
            Cutoff::Relative(r) => r * sigma_max,
        }
    }
}

/// Orthonormal kernel basis plus the singular values that decided the rank.
#[derive(Clone, Debug)]
pub struct Kernel<T: ComplexField> {
    pub vectors: Vec<DVector<T>>,
    pub rank: usize,
    pub sigma_max: f64,
}

/// Make the first non-negligible coordinate real and positive.
pub fn normalize_phase<T: ComplexField<RealField = f64>>(v: &mut DVector<T>) {
    let scale = v.iter().map(|z| z.clone().modulus()).fold(0.0, f64::max);
    if scale == 0.0 {
        return;
    }
    if let Some(z) = v.iter().find(|z| (*z).clone().modulus() > 1e-8 * scale).cloned() {
        let phase = z.clone().conjugate().unscale(z.modulus());
        for x in v.iter_mut() {
            *x = x.clone() * phase.clone();
        }
    }
}

/// Dense SVD kernel of `m` (rows x cols). Wide inputs are zero-padded to
/// square so that the full right singular basis is available.
pub fn dense_kernel<T>(m: &DMatrix<T>, cutoff: Cutoff) -> Result<Kernel<T>>
where
    T: ComplexField<RealField = f64>,
{
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::Dimension(format!(
            "null space of an empty {rows}x{cols} matrix"
        )));
    }
    let padded = if rows < cols {
        let mut p = DMatrix::<T>::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = checked_svd(&padded)?;
    let v_t = &svd.v_t;
    let sigma = &svd.s;
    let sigma_max = svd.max();
    let tol = cutoff.threshold(rows, cols, sigma_max);
    let rank = sigma.iter().filter(|s| **s > tol).count();
    let vectors = (rank..cols)
        .map(|k| {
            let mut v = v_t.row(k).adjoint();
            normalize_phase(&mut v);
            v
        })
        .collect();
    Ok(Kernel {
        vectors,
        rank,
        sigma_max,
    })
}

/// Null space of a complex matrix as an ordered orthonormal list.
///
/// `tol > 0` is an absolute singular-value cutoff; `tol == 0` selects the
/// default `eps * max(rows, cols) * sigma_max`.
pub fn null_space(m: &ComplexMatrix, tol: f64) -> Result<Vec<DVector<C64>>> {
    Ok(dense_kernel(m.as_dmatrix(), abs_or_default(tol)?)?.vectors)
}

/// Real counterpart of [`null_space`].
pub fn null_space_real(m: &DMatrix<f64>, tol: f64) -> Result<Vec<DVector<f64>>> {
    Ok(dense_kernel(m, abs_or_default(tol)?)?.vectors)
}

fn abs_or_default(tol: f64) -> Result<Cutoff> {
    if tol < 0.0 || tol.is_nan() {
        return Err(Error::Dimension(format!("tolerance must be >= 0, got {tol}")));
    }
    Ok(if tol == 0.0 {
        Cutoff::Default
    } else {
        Cutoff::Absolute(tol)
    })
}

/// Sparse row: `(column, coefficient)` pairs.
pub type SparseRow<T> = Vec<(usize, T)>;

const DENSE_LIMIT: usize = 400_000;

/// Kernel of a tall sparse system.
///
/// Small systems go straight to a dense SVD. Tall ones are compressed with
/// the normal matrix: its eigenvectors with `lambda <= candidate * lambda_max`
/// span a candidate subspace `N`, and an SVD of the (tall, thin) product
/// `M N` makes the actual rank decision, so the cutoff acts on true singular
/// values rather than their squares.
pub fn sparse_kernel<T>(ncols: usize, rows: &[SparseRow<T>], cutoff: Cutoff) -> Result<Kernel<T>>
where
    T: ComplexField<RealField = f64>,
{
    sparse_kernel_with_limit(ncols, rows, cutoff, DENSE_LIMIT)
}

fn sparse_kernel_with_limit<T>(
    ncols: usize,
    rows: &[SparseRow<T>],
    cutoff: Cutoff,
    dense_limit: usize,
) -> Result<Kernel<T>>
where
    T: ComplexField<RealField = f64>,
{
    if ncols == 0 {
        return Ok(Kernel {
            vectors: Vec::new(),
            rank: 0,
            sigma_max: 0.0,
        });
    }
    if rows.is_empty() {
        let vectors = (0..ncols)
            .map(|k| DVector::from_fn(ncols, |i, _| if i == k { T::one() } else { T::zero() }))
            .collect();
        return Ok(Kernel {
            vectors,
            rank: 0,
            sigma_max: 0.0,
        });
    }
    let nrows = rows.len();
    if nrows <= 2 * ncols || nrows * ncols <= dense_limit {
        let mut m = DMatrix::<T>::zeros(nrows, ncols);
        for (r, row) in rows.iter().enumerate() {
            for (c, v) in row {
                m[(r, *c)] += v.clone();
            }
        }
        return dense_kernel(&m, cutoff);
    }

    let mut gram = DMatrix::<T>::zeros(ncols, ncols);
    for row in rows {
        for (a, va) in row {
            let ca = va.clone().conjugate();
            for (b, vb) in row {
                gram[(*a, *b)] += ca.clone() * vb.clone();
            }
        }
    }
    let eig = SymmetricEigen::new(gram);
    let lambda_max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    if lambda_max == 0.0 {
        return sparse_kernel(ncols, &[], cutoff);
    }
    let sigma_max = lambda_max.sqrt();
    let rel = match cutoff {
        Cutoff::Default => f64::EPSILON * nrows.max(ncols) as f64,
        Cutoff::Absolute(t) => t / sigma_max,
        Cutoff::Relative(r) => r,
    };
    let candidate = (100.0 * rel * rel).max(1e-9) * lambda_max;
    let mut order: Vec<usize> = (0..ncols).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let cand: Vec<usize> = order
        .into_iter()
        .filter(|&k| eig.eigenvalues[k] <= candidate)
        .collect();
    if cand.is_empty() {
        return Ok(Kernel {
            vectors: Vec::new(),
            rank: ncols,
            sigma_max,
        });
    }
    let basis = DMatrix::from_fn(ncols, cand.len(), |i, j| eig.eigenvectors[(i, cand[j])].clone());
    let mut reduced = DMatrix::<T>::zeros(nrows, cand.len());
    for (r, row) in rows.iter().enumerate() {
        for j in 0..cand.len() {
            let mut acc = T::zero();
            for (c, v) in row {
                acc += v.clone() * basis[(*c, j)].clone();
            }
            reduced[(r, j)] = acc;
        }
    }
    let k = cand.len();
    let inner = dense_kernel(&reduced, Cutoff::Absolute(rel * sigma_max))?;
    let vectors = inner
        .vectors
        .iter()
        .map(|w| {
            let mut v = &basis * w;
            let n = v.norm();
            v.unscale_mut(n);
            normalize_phase(&mut v);
            v
        })
        .collect::<Vec<_>>();
    Ok(Kernel {
        rank: ncols - k + inner.rank,
        vectors,
        sigma_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::ONE;

    #[test]
    fn identity_has_trivial_kernel() {
        let k = null_space(&ComplexMatrix::identity(3), 0.0).unwrap();
        assert!(k.is_empty());
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let k = null_space(&ComplexMatrix::zeros(2, 2), 0.0).unwrap();
        assert_eq!(k.len(), 2);
        for (i, a) in k.iter().enumerate() {
            for (j, b) in k.iter().enumerate() {
                let ip = a.dotc(b);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - C64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn line_kernel_is_normalized_antidiagonal() {
        let m = ComplexMatrix::from_fn(1, 2, |_, _| ONE);
        let k = null_space(&m, 0.0).unwrap();
        assert_eq!(k.len(), 1);
        let s = 1.0 / 2f64.sqrt();
        assert!((k[0][0] - C64::new(s, 0.0)).norm() < 1e-12);
        assert!((k[0][1] + C64::new(s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn empty_matrix_is_rejected() {
        assert!(matches!(
            null_space(&ComplexMatrix::zeros(0, 3), 0.0),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn sparse_and_dense_kernels_agree_on_tall_system() {
        // 3 unknowns, x0 = x1, many redundant rows, kernel spanned by (1,1,0)/sqrt2
        let mut rows = Vec::new();
        for k in 0..600 {
            let w = 1.0 + (k % 7) as f64;
            rows.push(vec![(0, w), (1, -w)]);
            rows.push(vec![(2, 0.5 * w)]);
        }
        let k = sparse_kernel_with_limit(3, &rows, Cutoff::Relative(1e-10), 0).unwrap();
        assert_eq!(k.vectors.len(), 1);
        let v = &k.vectors[0];
        let s = 1.0 / 2f64.sqrt();
        assert!((v[0] - s).abs() < 1e-12 && (v[1] - s).abs() < 1e-12 && v[2].abs() < 1e-12);
        assert_eq!(k.rank, 2);
    }
}
