use nalgebra::{DMatrix, DVector};

use super::svd::checked_svd;

use crate::error::Result;

use super::matrix::{ComplexMatrix, C64, I};
use super::nullspace::{dense_kernel, Cutoff};
use super::subspace::{Field, MatrixSubspace};

fn cutoff(tol: f64) -> Cutoff {
    if tol > 0.0 {
        Cutoff::Relative(tol)
    } else {
        Cutoff::Default
    }
}

/// `{v in space : constraint(v) = 0}` for a real-linear `constraint`.
///
/// When `complex_linear` holds and `space` is complex the result is complex;
/// otherwise it is a real subspace (coefficients over `b` and `i b` for a
/// complex input). `tol` is relative to the largest singular value.
pub fn restrict(
    space: &MatrixSubspace,
    constraint: impl Fn(&ComplexMatrix) -> Vec<C64>,
    complex_linear: bool,
    tol: f64,
) -> Result<MatrixSubspace> {
    let (rows, cols) = space.shape();
    if space.is_empty() {
        return Ok(space.clone());
    }
    let complex = complex_linear && space.field() == Field::Complex;
    let gens: Vec<ComplexMatrix> = if complex || space.field() == Field::Real {
        space.basis().to_vec()
    } else {
        space
            .basis()
            .iter()
            .flat_map(|b| [b.clone(), b.scale(I)])
            .collect()
    };
    let images: Vec<Vec<C64>> = gens.iter().map(&constraint).collect();
    let len = images[0].len();
    if len == 0 {
        return Ok(if complex { space.clone() } else { space.as_real() });
    }
    let field = if complex { Field::Complex } else { Field::Real };
    let combos: Vec<Vec<C64>> = if complex {
        let m = DMatrix::from_fn(len, gens.len(), |r, c| images[c][r]);
        dense_kernel(&m, cutoff(tol))?
            .vectors
            .into_iter()
            .map(|v| v.iter().cloned().collect())
            .collect()
    } else {
        let m = DMatrix::from_fn(2 * len, gens.len(), |r, c| {
            if r < len {
                images[c][r].re
            } else {
                images[c][r - len].im
            }
        });
        dense_kernel(&m, cutoff(tol))?
            .vectors
            .into_iter()
            .map(|v| v.iter().map(|x| C64::new(*x, 0.0)).collect())
            .collect()
    };
    let basis = combos
        .iter()
        .map(|c| {
            let mut out = ComplexMatrix::zeros(rows, cols);
            for (w, g) in c.iter().zip(&gens) {
                if w.norm() > 0.0 {
                    out += &g.scale(*w);
                }
            }
            out
        })
        .collect();
    Ok(MatrixSubspace::from_parts_unchecked(rows, cols, field, basis))
}

/// Least-norm coefficients `c` minimizing `|sum_k c_k g_k - target|_HS`,
/// real when `field` is real. Returns the coefficients and the residual.
/// Singular values below `tol * sigma_max` are discarded.
pub fn least_norm(
    gens: &[ComplexMatrix],
    target: &ComplexMatrix,
    field: Field,
    tol: f64,
) -> Result<(Vec<C64>, f64)> {
    if gens.is_empty() {
        return Ok((Vec::new(), target.hs_norm()));
    }
    let len = target.rows() * target.cols();
    let vecs: Vec<Vec<C64>> = gens.iter().map(|g| g.to_vec()).collect();
    let t = target.to_vec();
    let rel = if tol > 0.0 { tol } else { 1e-12 };
    let coeffs: Vec<C64> = match field {
        Field::Complex => {
            let m = DMatrix::from_fn(len, gens.len(), |r, c| vecs[c][r]);
            let b = DVector::from_vec(t);
            let svd = checked_svd(&m)?;
            let smax = svd.max();
            if smax == 0.0 {
                vec![C64::new(0.0, 0.0); gens.len()]
            } else {
                let x = svd.solve(&b, rel * smax);
                x.iter().cloned().collect()
            }
        }
        Field::Real => {
            let m = DMatrix::from_fn(2 * len, gens.len(), |r, c| {
                if r < len {
                    vecs[c][r].re
                } else {
                    vecs[c][r - len].im
                }
            });
            let b = DVector::from_fn(2 * len, |r, _| if r < len { t[r].re } else { t[r - len].im });
            let svd = checked_svd(&m)?;
            let smax = svd.max();
            if smax == 0.0 {
                vec![C64::new(0.0, 0.0); gens.len()]
            } else {
                let x = svd.solve(&b, rel * smax);
                x.iter().map(|v| C64::new(*v, 0.0)).collect()
            }
        }
    };
    let mut rebuilt = ComplexMatrix::zeros(target.rows(), target.cols());
    for (c, g) in coeffs.iter().zip(gens) {
        rebuilt += &g.scale(*c);
    }
    let residual = (target - &rebuilt).hs_norm();
    Ok((coeffs, residual))
}
