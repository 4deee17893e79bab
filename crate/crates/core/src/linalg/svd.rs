use nalgebra::{ComplexField, DMatrix, DVector, SVD};

use crate::error::{Error, Result};

/// Thin SVD `a = u diag(s) v_t`, singular values descending.
///
/// nalgebra's bidiagonal SVD occasionally converges to a wrong
/// factorization (seen on tall real matrices with repeated singular values),
/// so every result is checked by reconstruction and orthogonality. On failure
/// the adjoint is tried, then an SVD of the triangular factor of a QR.
pub(crate) struct Svd<T: ComplexField<RealField = f64>> {
    pub u: DMatrix<T>,
    pub s: Vec<f64>,
    pub v_t: DMatrix<T>,
}

fn raw<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Option<Svd<T>> {
    let svd = SVD::try_new(a.clone(), true, true, f64::EPSILON, 10_000)?;
    Some(Svd {
        u: svd.u?,
        s: svd.singular_values.iter().cloned().collect(),
        v_t: svd.v_t?,
    })
}

fn adjoint<T: ComplexField<RealField = f64>>(f: Svd<T>) -> Svd<T> {
    Svd {
        u: f.v_t.adjoint(),
        s: f.s,
        v_t: f.u.adjoint(),
    }
}

fn via_qr<T: ComplexField<RealField = f64>>(a: &DMatrix<T>, flip: bool) -> Option<Svd<T>> {
    if a.nrows() < a.ncols() {
        return via_qr(&a.adjoint(), flip).map(adjoint);
    }
    let qr = a.clone().qr();
    let (q, r) = (qr.q(), qr.r());
    let inner = if flip { raw(&r.adjoint()).map(adjoint)? } else { raw(&r)? };
    Some(Svd {
        u: q * inner.u,
        s: inner.s,
        v_t: inner.v_t,
    })
}

fn defect<T: ComplexField<RealField = f64>>(a: &DMatrix<T>, f: &Svd<T>) -> f64 {
    let k = f.s.len();
    if f.u.shape() != (a.nrows(), k) || f.v_t.shape() != (k, a.ncols()) {
        return f64::INFINITY;
    }
    let mut us = f.u.clone();
    for (j, s) in f.s.iter().enumerate() {
        us.column_mut(j).scale_mut(*s);
    }
    let rec = (&us * &f.v_t - a).norm();
    let eye = DMatrix::<T>::identity(k, k);
    let ou = (f.u.adjoint() * &f.u - &eye).norm();
    let ov = (&f.v_t * f.v_t.adjoint() - &eye).norm();
    rec / a.norm().max(f64::MIN_POSITIVE) + ou + ov
}

fn sorted<T: ComplexField<RealField = f64>>(f: Svd<T>) -> Svd<T> {
    let mut order: Vec<usize> = (0..f.s.len()).collect();
    order.sort_by(|&i, &j| f.s[j].total_cmp(&f.s[i]));
    Svd {
        u: DMatrix::from_fn(f.u.nrows(), order.len(), |r, c| f.u[(r, order[c])].clone()),
        s: order.iter().map(|&i| f.s[i]).collect(),
        v_t: DMatrix::from_fn(order.len(), f.v_t.ncols(), |r, c| f.v_t[(order[r], c)].clone()),
    }
}

pub(crate) fn checked_svd<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Result<Svd<T>> {
    let (r, c) = a.shape();
    if r == 0 || c == 0 {
        return Err(Error::Dimension(format!("SVD of an empty {r}x{c} matrix")));
    }
    if a.norm() == 0.0 {
        let k = r.min(c);
        return Ok(Svd {
            u: DMatrix::identity(r, k),
            s: vec![0.0; k],
            v_t: DMatrix::identity(k, c),
        });
    }
    let limit = 1e-10 * (r.max(c) as f64).sqrt();
    let mut worst: f64 = 0.0;
    let attempts: [&dyn Fn() -> Option<Svd<T>>; 4] = [
        &|| raw(a),
        &|| raw(&a.adjoint()).map(adjoint),
        &|| via_qr(a, false),
        &|| via_qr(a, true),
    ];
    for attempt in attempts {
        if let Some(f) = attempt() {
            let d = defect(a, &f);
            if d <= limit {
                return Ok(sorted(f));
            }
            worst = worst.max(d);
        }
    }
    Err(Error::Instability(format!(
        "SVD of a {r}x{c} matrix failed verification (defect {worst:.3e})"
    )))
}

impl<T: ComplexField<RealField = f64>> Svd<T> {
    pub fn max(&self) -> f64 {
        self.s.first().cloned().unwrap_or(0.0)
    }

    /// Least-norm solution, dropping singular values at or below `cut`.
    pub fn solve(&self, b: &DVector<T>, cut: f64) -> DVector<T> {
        let mut x = DVector::<T>::zeros(self.v_t.ncols());
        for (k, s) in self.s.iter().enumerate() {
            if *s <= cut {
                continue;
            }
            let coef = self.u.column(k).dotc(b).unscale(*s);
            x += self.v_t.row(k).adjoint() * coef;
        }
        x
    }
}
