use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::matrix::{hs_inner_unchecked, ComplexMatrix, C64, I, ZERO};
use super::nullspace::{normalize_phase, Cutoff};

/// Scalar field over which a span is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Real,
    Complex,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Real => "real",
            Field::Complex => "complex",
        })
    }
}

/// Subspace of `rows x cols` matrices with a Hilbert-Schmidt orthonormal basis.
///
/// For `Field::Real` the span uses real coefficients and orthonormality is
/// with respect to `Re trace(b* a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSubspace {
    rows: usize,
    cols: usize,
    field: Field,
    basis: Vec<ComplexMatrix>,
}

/// Outcome of a membership test.
#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    /// Expansion coefficients in the subspace basis (imaginary parts are zero
    /// for real subspaces).
    Member(Vec<C64>),
    Rejected { residual: f64 },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }

    pub fn coefficients(self) -> Option<Vec<C64>> {
        match self {
            Membership::Member(c) => Some(c),
            Membership::Rejected { .. } => None,
        }
    }
}

impl MatrixSubspace {
    pub fn zero(rows: usize, cols: usize, field: Field) -> Self {
        Self {
            rows,
            cols,
            field,
            basis: Vec::new(),
        }
    }

    /// Wrap a basis that is already orthonormal. Checks shapes and the Gram
    /// matrix against `tol`.
    pub fn from_orthonormal(
        rows: usize,
        cols: usize,
        field: Field,
        basis: Vec<ComplexMatrix>,
        tol: f64,
    ) -> Result<Self> {
        for b in &basis {
            if b.shape() != (rows, cols) {
                return Err(Error::Dimension(format!(
                    "basis element of shape {:?} in a {rows}x{cols} subspace",
                    b.shape()
                )));
            }
        }
        let s = Self {
            rows,
            cols,
            field,
            basis,
        };
        let defect = s.gram_defect();
        if defect > tol {
            return Err(Error::Instability(format!(
                "basis is not orthonormal (Gram defect {defect:.3e})"
            )));
        }
        Ok(s)
    }

    pub(crate) fn from_parts_unchecked(
        rows: usize,
        cols: usize,
        field: Field,
        basis: Vec<ComplexMatrix>,
    ) -> Self {
        Self {
            rows,
            cols,
            field,
            basis,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Dimension over the reals.
    pub fn real_dim(&self) -> usize {
        match self.field {
            Field::Real => self.dim(),
            Field::Complex => 2 * self.dim(),
        }
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Inner product in the subspace's field.
    pub fn inner(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
        let z = hs_inner_unchecked(a, b);
        match self.field {
            Field::Complex => z,
            Field::Real => C64::new(z.re, 0.0),
        }
    }

    /// Largest entry of `|G - I|`.
    pub fn gram_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.inner(a, b) - C64::new(expect, 0.0)).norm());
            }
        }
        worst
    }

    /// Orthogonal-projection coefficients of `v`.
    pub fn coords(&self, v: &ComplexMatrix) -> Vec<C64> {
        self.basis.iter().map(|b| self.inner(v, b)).collect()
    }

    pub fn combine(&self, coeffs: &[C64]) -> ComplexMatrix {
        assert_eq!(coeffs.len(), self.dim(), "coefficient count mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, self.cols);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if *c != ZERO {
                out += &b.scale(*c);
            }
        }
        out
    }

    pub fn project(&self, v: &ComplexMatrix) -> ComplexMatrix {
        self.combine(&self.coords(v))
    }

    /// HS norm of `v - P v`.
    pub fn residual(&self, v: &ComplexMatrix) -> f64 {
        (v - &self.project(v)).hs_norm()
    }

    pub fn contains(&self, v: &ComplexMatrix, tol: f64) -> bool {
        self.residual(v) <= tol * v.hs_norm().max(1.0)
    }

    /// Every basis element of `self` lies in `other`.
    pub fn is_within(&self, other: &MatrixSubspace, tol: f64) -> bool {
        self.shape() == other.shape() && self.basis.iter().all(|b| other.contains(b, tol))
    }

    /// Mutual membership of bases.
    pub fn same_span(&self, other: &MatrixSubspace, tol: f64) -> bool {
        let a = self.as_real();
        let b = other.as_real();
        a.dim() == b.dim() && a.is_within(&b, tol) && b.is_within(&a, tol)
    }

    /// The same set viewed as a real vector space (basis `b, i b`).
    pub fn as_real(&self) -> MatrixSubspace {
        match self.field {
            Field::Real => self.clone(),
            Field::Complex => {
                let mut basis = Vec::with_capacity(2 * self.dim());
                for b in &self.basis {
                    basis.push(b.clone());
                    basis.push(b.scale(I));
                }
                MatrixSubspace::from_parts_unchecked(self.rows, self.cols, Field::Real, basis)
            }
        }
    }

    /// Orthogonal complement projection `v - P v`.
    pub fn reject(&self, v: &ComplexMatrix) -> ComplexMatrix {
        v - &self.project(v)
    }
}

/// HS-orthonormal basis of the span of `mats` over `field`.
///
/// Uses an SVD of the stacked vectorizations; the basis follows singular
/// value order with the first non-negligible coordinate of each element made
/// real-positive. `tol` is relative to the largest singular value (`0`
/// selects the default `eps * max(dim) * sigma_max`).
pub fn orthonormalize(mats: &[ComplexMatrix], field: Field, tol: f64) -> Result<MatrixSubspace> {
    let first = mats
        .first()
        .ok_or_else(|| Error::Dimension("cannot orthonormalize an empty list".into()))?;
    let (rows, cols) = first.shape();
    orthonormalize_in(rows, cols, mats, field, tol)
}

/// [`orthonormalize`] with an explicit ambient shape, so an empty list yields
/// the zero subspace.
pub fn orthonormalize_in(
    rows: usize,
    cols: usize,
    mats: &[ComplexMatrix],
    field: Field,
    tol: f64,
) -> Result<MatrixSubspace> {
    for m in mats {
        if m.shape() != (rows, cols) {
            return Err(Error::Dimension(format!(
                "matrix of shape {:?} in a list of {rows}x{cols} matrices",
                m.shape()
            )));
        }
    }
    let cutoff = if tol > 0.0 {
        Cutoff::Relative(tol)
    } else {
        Cutoff::Default
    };
    if mats.is_empty() || mats.iter().all(|m| m.max_abs() == 0.0) {
        return Ok(MatrixSubspace::zero(rows, cols, field));
    }
    let n = rows * cols;
    let basis = match field {
        Field::Complex => {
            let a = DMatrix::from_fn(n, mats.len(), |i, j| mats[j].as_dmatrix()[(i / cols, i % cols)]);
            left_basis(&a, cutoff)?
                .into_iter()
                .map(|v| ComplexMatrix::from_fn(rows, cols, |i, j| v[i * cols + j]))
                .collect()
        }
        Field::Real => {
            let a = DMatrix::from_fn(2 * n, mats.len(), |i, j| {
                let z = mats[j].as_dmatrix()[((i % n) / cols, (i % n) % cols)];
                if i < n {
                    z.re
                } else {
                    z.im
                }
            });
            left_basis(&a, cutoff)?
                .into_iter()
                .map(|v| ComplexMatrix::from_fn(rows, cols, |i, j| C64::new(v[i * cols + j], v[n + i * cols + j])))
                .collect()
        }
    };
    Ok(MatrixSubspace::from_parts_unchecked(rows, cols, field, basis))
}

fn left_basis<T>(a: &DMatrix<T>, cutoff: Cutoff) -> Result<Vec<nalgebra::DVector<T>>>
where
    T: nalgebra::ComplexField<RealField = f64>,
{
    let (r, c) = a.shape();
    let svd = super::svd::checked_svd(a)?;
    let u = &svd.u;
    let smax = svd.max();
    let tol = match cutoff {
        Cutoff::Default => f64::EPSILON * r.max(c) as f64 * smax,
        Cutoff::Absolute(t) => t,
        Cutoff::Relative(t) => t * smax,
    };
    Ok(svd
        .s
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > tol)
        .map(|(k, _)| {
            let mut v = u.column(k).into_owned();
            normalize_phase(&mut v);
            v
        })
        .collect())
}

/// Expansion of `v` in `s`, or rejection when the projection residual
/// exceeds `tol * max(1, |v|)`.
pub fn membership(v: &ComplexMatrix, s: &MatrixSubspace, tol: f64) -> Result<Membership> {
    if v.shape() != s.shape() {
        return Err(Error::Dimension(format!(
            "matrix of shape {:?} tested against a {:?} subspace",
            v.shape(),
            s.shape()
        )));
    }
    let coeffs = s.coords(v);
    let residual = (v - &s.combine(&coeffs)).hs_norm();
    if residual <= tol * v.hs_norm().max(1.0) {
        Ok(Membership::Member(coeffs))
    } else {
        Ok(Membership::Rejected { residual })
    }
}

/// Incremental Gram-Schmidt span builder (two passes per insertion).
///
/// Used by closure loops, where the candidate list is long and mostly
/// redundant. Insertion order fixes the basis.
#[derive(Clone, Debug)]
pub struct SpanBuilder {
    space: MatrixSubspace,
    tol: f64,
}

impl SpanBuilder {
    pub fn new(rows: usize, cols: usize, field: Field, tol: f64) -> Self {
        Self {
            space: MatrixSubspace::zero(rows, cols, field),
            tol,
        }
    }

    pub fn from_space(space: MatrixSubspace, tol: f64) -> Self {
        Self { space, tol }
    }

    /// Adds the normalized residual of `m` if it is not already (numerically)
    /// in the span. Returns whether the span grew.
    pub fn push(&mut self, m: &ComplexMatrix) -> bool {
        let scale = m.hs_norm();
        if scale == 0.0 {
            return false;
        }
        let mut r = self.space.reject(m);
        r = self.space.reject(&r);
        let n = r.hs_norm();
        if n <= self.tol * scale.max(1.0) {
            return false;
        }
        let mut b = r.scale_real(1.0 / n);
        phase_normalize_matrix(&mut b, self.space.field);
        self.space.basis.push(b);
        true
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &MatrixSubspace {
        &self.space
    }

    pub fn finish(self) -> MatrixSubspace {
        self.space
    }
}

fn phase_normalize_matrix(m: &mut ComplexMatrix, field: Field) {
    let scale = m.max_abs();
    let (r, c) = m.shape();
    for i in 0..r {
        for j in 0..c {
            let z = m.get(i, j);
            if z.norm() > 1e-8 * scale {
                let phase = match field {
                    Field::Complex => z.conj() / z.norm(),
                    Field::Real => {
                        // real scalars can only flip the sign
                        let lead = if z.re.abs() > 1e-8 * scale { z.re } else { z.im };
                        C64::new(lead.signum(), 0.0)
                    }
                };
                *m = m.scale(phase);
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::ONE;

    fn e(i: usize, j: usize) -> ComplexMatrix {
        ComplexMatrix::unit(2, 2, i, j)
    }

    #[test]
    fn collinear_inputs_give_dimension_one() {
        let s = orthonormalize(&[e(0, 0), e(0, 0).scale_real(2.0)], Field::Complex, 0.0).unwrap();
        assert_eq!(s.dim(), 1);
        assert!(s.gram_defect() < 1e-12);
    }

    #[test]
    fn matrix_units_span_full_m2() {
        let s = orthonormalize(&[e(0, 0), e(0, 1), e(1, 0), e(1, 1)], Field::Complex, 0.0).unwrap();
        assert_eq!(s.dim(), 4);
        assert!(s.gram_defect() < 1e-12);
    }

    #[test]
    fn i_times_a_is_real_independent() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| C64::new((i + 2 * j) as f64, 1.0));
        let s = orthonormalize(&[a.clone(), a.scale(I)], Field::Real, 0.0).unwrap();
        assert_eq!(s.dim(), 2);
        let c = orthonormalize(&[a.clone(), a.scale(I)], Field::Complex, 0.0).unwrap();
        assert_eq!(c.dim(), 1);
    }

    #[test]
    fn membership_examples() {
        let id = orthonormalize(&[ComplexMatrix::identity(2)], Field::Complex, 0.0).unwrap();
        let sum = &e(0, 0) + &e(1, 1);
        let coeffs = membership(&sum, &id, 1e-10).unwrap().coefficients().unwrap();
        // basis element is I/sqrt2, so the coefficient of I itself is 1
        let recon = id.combine(&coeffs);
        assert!((&recon - &sum).hs_norm() < 1e-12);
        assert!((coeffs[0].norm() - 2f64.sqrt()).abs() < 1e-12);

        let s11 = orthonormalize(&[e(0, 0)], Field::Complex, 0.0).unwrap();
        match membership(&e(0, 1), &s11, 1e-10).unwrap() {
            Membership::Rejected { residual } => assert!((residual - 1.0).abs() < 1e-12),
            other => panic!("expected rejection, got {other:?}"),
        }

        let r11 = orthonormalize(&[e(0, 0)], Field::Real, 0.0).unwrap();
        assert!(!membership(&e(0, 0).scale(I), &r11, 1e-10).unwrap().is_member());
        assert!(membership(&e(0, 0).scale(I), &s11, 1e-10).unwrap().is_member());
        assert!(membership(&e(0, 0).scale_real(-3.0), &r11, 1e-10).unwrap().is_member());
    }

    #[test]
    fn membership_checks_shape() {
        let s = MatrixSubspace::zero(2, 2, Field::Complex);
        assert!(membership(&ComplexMatrix::zeros(3, 2), &s, 1e-9).is_err());
    }

    #[test]
    fn span_builder_matches_orthonormalize() {
        let mats = [e(0, 1), e(0, 1).scale(I), &e(0, 0) + &e(1, 1), e(1, 0)];
        let mut b = SpanBuilder::new(2, 2, Field::Complex, 1e-10);
        for m in &mats {
            b.push(m);
        }
        let built = b.finish();
        let direct = orthonormalize(&mats, Field::Complex, 0.0).unwrap();
        assert_eq!(built.dim(), 3);
        assert!(built.same_span(&direct, 1e-10));
        assert!(built.gram_defect() < 1e-12);
        let _ = ONE;
    }
}
