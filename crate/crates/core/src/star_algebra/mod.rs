//! Finite-dimensional *-algebras of square matrices.
//!
//! A [`StarAlgebra`] is a certified carrier subspace closed under products and
//! adjoints, together with its structure constants in the carrier basis and
//! the matrix of the (conjugate-linear) adjoint in those coordinates.

mod blocks;
mod commutator;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{
    orthonormalize_in, ComplexMatrix, ConstraintSystem, Field, MatrixSubspace, SpanBuilder, C64, I,
    ONE, ZERO,
};

pub use blocks::{BlockDecomposition, SimpleBlock};
pub use commutator::{commutator_decompose, single_commutator, zero_diagonal_similarity, CommutatorDecomposition};

#[derive(Clone, Debug)]
pub struct StarAlgebra {
    carrier: MatrixSubspace,
    /// `e_i e_j = sum_k c[(i*d + j)*d + k] e_k`
    structure: Vec<C64>,
    /// `e_i^* = sum_l adjoint[(l, i)] e_l`
    adjoint: ComplexMatrix,
    unit: Option<Vec<C64>>,
    tol: f64,
}

impl StarAlgebra {
    /// Certify that `carrier` is a *-algebra and compute its structure data.
    pub fn from_subspace(carrier: MatrixSubspace, tol: f64) -> Result<Self> {
        if carrier.rows() != carrier.cols() {
            return Err(Error::Dimension(format!(
                "*-algebra carrier must be square, got {:?}",
                carrier.shape()
            )));
        }
        if carrier.field() != Field::Complex {
            return Err(Error::Dimension("*-algebra carrier must be a complex span".into()));
        }
        let d = carrier.dim();
        let basis = carrier.basis();
        let mut structure = vec![ZERO; d * d * d];
        for i in 0..d {
            for j in 0..d {
                let prod = &basis[i] * &basis[j];
                let coords = carrier.coords(&prod);
                let res = (&prod - &carrier.combine(&coords)).hs_norm();
                if res > tol * prod.hs_norm().max(1.0) {
                    return Err(Error::Closure(format!(
                        "product of basis elements ({i}, {j}) leaves the span (residual {res:.3e})"
                    )));
                }
                structure[(i * d + j) * d..(i * d + j + 1) * d].copy_from_slice(&coords);
            }
        }
        let mut adjoint = ComplexMatrix::zeros(d, d);
        for (i, b) in basis.iter().enumerate() {
            let a = b.adjoint();
            let coords = carrier.coords(&a);
            let res = (&a - &carrier.combine(&coords)).hs_norm();
            if res > tol {
                return Err(Error::Closure(format!(
                    "adjoint of basis element {i} leaves the span (residual {res:.3e})"
                )));
            }
            for (l, c) in coords.into_iter().enumerate() {
                adjoint.set(l, i, c);
            }
        }
        let mut alg = Self {
            carrier,
            structure,
            adjoint,
            unit: None,
            tol,
        };
        alg.unit = alg.find_unit();
        Ok(alg)
    }

    pub fn n(&self) -> usize {
        self.carrier.rows()
    }

    pub fn dim(&self) -> usize {
        self.carrier.dim()
    }

    pub fn carrier(&self) -> &MatrixSubspace {
        &self.carrier
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        self.carrier.basis()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> C64 {
        let d = self.dim();
        self.structure[(i * d + j) * d + k]
    }

    /// Coordinates of `e_i e_j`.
    pub fn product_coords(&self, i: usize, j: usize) -> &[C64] {
        let d = self.dim();
        &self.structure[(i * d + j) * d..(i * d + j + 1) * d]
    }

    /// Matrix `J` with `e_i^* = sum_l J[l][i] e_l`.
    pub fn adjoint_matrix(&self) -> &ComplexMatrix {
        &self.adjoint
    }

    pub fn coords(&self, x: &ComplexMatrix) -> Vec<C64> {
        self.carrier.coords(x)
    }

    pub fn element(&self, coeffs: &[C64]) -> ComplexMatrix {
        self.carrier.combine(coeffs)
    }

    pub fn contains(&self, x: &ComplexMatrix, tol: f64) -> bool {
        x.shape() == self.carrier.shape() && self.carrier.contains(x, tol)
    }

    pub fn is_unital(&self) -> bool {
        self.unit.is_some()
    }

    /// Coordinates of the unit, when the algebra has one.
    pub fn identity_coeffs(&self) -> Option<&[C64]> {
        self.unit.as_deref()
    }

    pub fn unit(&self) -> Option<ComplexMatrix> {
        self.unit.as_ref().map(|c| self.element(c))
    }

    /// Whether the unit is the ambient identity.
    pub fn contains_ambient_identity(&self) -> bool {
        self.unit()
            .map(|u| (&u - &ComplexMatrix::identity(self.n())).hs_norm() <= self.tol * (self.n() as f64).sqrt())
            .unwrap_or(false)
    }

    fn find_unit(&self) -> Option<Vec<C64>> {
        let d = self.dim();
        if d == 0 {
            return None;
        }
        // u e_j = e_j and e_j u = e_j, solved in least squares
        let mut rows = Vec::with_capacity(2 * d * d);
        let mut rhs = Vec::with_capacity(2 * d * d);
        for j in 0..d {
            for l in 0..d {
                rows.push((0..d).map(|k| self.structure_constant(k, j, l)).collect::<Vec<_>>());
                rhs.push(if j == l { ONE } else { ZERO });
                rows.push((0..d).map(|k| self.structure_constant(j, k, l)).collect::<Vec<_>>());
                rhs.push(if j == l { ONE } else { ZERO });
            }
        }
        let a = nalgebra::DMatrix::from_fn(rows.len(), d, |r, c| rows[r][c]);
        let b = DVector::from_vec(rhs);
        let svd = crate::linalg::checked_svd(&a).ok()?;
        let u = svd.solve(&b, 1e-12 * svd.max());
        let res = (&a * &u - &b).norm();
        if res <= self.tol * (d as f64).sqrt() {
            Some(u.iter().cloned().collect())
        } else {
            None
        }
    }

    /// Largest product/adjoint closure residual and structure-constant
    /// reproduction error over basis pairs.
    pub fn certification_residual(&self) -> f64 {
        let b = self.basis();
        let mut worst: f64 = 0.0;
        for i in 0..self.dim() {
            worst = worst.max(self.carrier.residual(&b[i].adjoint()));
            for j in 0..self.dim() {
                let prod = &b[i] * &b[j];
                let rebuilt = self.element(self.product_coords(i, j));
                worst = worst.max((&prod - &rebuilt).hs_norm());
            }
        }
        worst
    }

    /// Largest associativity defect of the structure constants.
    pub fn associativity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut lhs = ZERO;
                        let mut rhs = ZERO;
                        for m in 0..d {
                            lhs += self.structure_constant(i, j, m) * self.structure_constant(m, k, l);
                            rhs += self.structure_constant(j, k, m) * self.structure_constant(i, m, l);
                        }
                        worst = worst.max((lhs - rhs).norm());
                    }
                }
            }
        }
        worst
    }

    /// Hermitian elements of the algebra as a real orthonormal basis.
    pub fn hermitian_basis(&self) -> MatrixSubspace {
        hermitian_part_of(&self.carrier, self.tol)
    }

    /// Skew-hermitian elements of the algebra as a real orthonormal basis.
    pub fn skew_basis(&self) -> MatrixSubspace {
        let h = self.hermitian_basis();
        let basis = h.basis().iter().map(|b| b.scale(I)).collect();
        MatrixSubspace::from_orthonormal(self.n(), self.n(), Field::Real, basis, 1e-8)
            .expect("i times an orthonormal real basis stays orthonormal")
    }
}

/// Real orthonormal basis of the Hermitian elements of a *-closed subspace.
pub(crate) fn hermitian_part_of(s: &MatrixSubspace, tol: f64) -> MatrixSubspace {
    let mut mats = Vec::with_capacity(2 * s.dim());
    for b in s.basis() {
        mats.push(b.hermitian_part());
        mats.push(b.skew_part().scale(-I));
    }
    orthonormalize_in(s.rows(), s.cols(), &mats, Field::Real, tol)
        .expect("shapes agree by construction")
}

/// Close `gens` under products and adjoints.
pub fn make_star_algebra(gens: &[ComplexMatrix], tol: f64) -> Result<StarAlgebra> {
    let first = gens
        .first()
        .ok_or_else(|| Error::Dimension("no generators given".into()))?;
    let n = first.rows();
    for g in gens {
        if g.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "generator of shape {:?}, expected {n}x{n}",
                g.shape()
            )));
        }
    }
    let mut span = SpanBuilder::new(n, n, Field::Complex, tol);
    for g in gens {
        span.push(g);
        span.push(&g.adjoint());
    }
    let mut done = 0;
    loop {
        let basis: Vec<ComplexMatrix> = span.space().basis().to_vec();
        let d = basis.len();
        if d > n * n {
            return Err(Error::Instability(format!(
                "span grew to {d} > {} dimensions while closing",
                n * n
            )));
        }
        if done == d {
            break;
        }
        for i in 0..d {
            for j in 0..d {
                if i < done && j < done {
                    continue;
                }
                span.push(&(&basis[i] * &basis[j]));
            }
            span.push(&basis[i].adjoint());
        }
        done = d;
    }
    StarAlgebra::from_subspace(span.finish(), tol)
}

/// Projection (or, with `self_adjoint == false`, an idempotent) inside a
/// *-algebra.
#[derive(Clone, Debug)]
pub struct Projection {
    matrix: ComplexMatrix,
    coeffs: Vec<C64>,
    self_adjoint: bool,
}

impl Projection {
    /// Certify `p^2 = p`, `p^* = p` and `p` in `a`.
    pub fn new(p: &ComplexMatrix, a: &StarAlgebra, tol: f64) -> Result<Self> {
        let pr = Self::idempotent(p, a, tol)?;
        let defect = (p - &p.adjoint()).hs_norm();
        if defect > tol * p.hs_norm().max(1.0) {
            return Err(Error::InvalidProjection(format!(
                "not self-adjoint (|p - p*| = {defect:.3e})"
            )));
        }
        Ok(Self {
            self_adjoint: true,
            ..pr
        })
    }

    /// Certify `e^2 = e` and `e` in `a`.
    pub fn idempotent(e: &ComplexMatrix, a: &StarAlgebra, tol: f64) -> Result<Self> {
        if e.shape() != (a.n(), a.n()) {
            return Err(Error::Dimension(format!(
                "idempotent of shape {:?} in an algebra on C^{}",
                e.shape(),
                a.n()
            )));
        }
        let defect = (&(e * e) - e).hs_norm();
        if defect > tol * e.hs_norm().max(1.0) {
            return Err(Error::InvalidProjection(format!(
                "not idempotent (|e^2 - e| = {defect:.3e})"
            )));
        }
        let coeffs = a.coords(e);
        let res = (e - &a.element(&coeffs)).hs_norm();
        if res > tol * e.hs_norm().max(1.0) {
            return Err(Error::InvalidProjection(format!(
                "not an element of the algebra (residual {res:.3e})"
            )));
        }
        let self_adjoint = (e - &e.adjoint()).hs_norm() <= tol * e.hs_norm().max(1.0);
        Ok(Self {
            matrix: e.clone(),
            coeffs,
            self_adjoint,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.self_adjoint
    }

    /// `1 - p` with `1` the unit of `a`.
    pub fn complement(&self, a: &StarAlgebra) -> Result<Projection> {
        let unit = a
            .unit()
            .ok_or_else(|| Error::Hypothesis("complement needs a unital algebra".into()))?;
        let q = &unit - &self.matrix;
        if self.self_adjoint {
            Projection::new(&q, a, a.tol().max(1e-12) * 10.0)
        } else {
            Projection::idempotent(&q, a, a.tol().max(1e-12) * 10.0)
        }
    }
}

/// `{z in A : z e_i = e_i z for all i}`.
pub fn center(a: &StarAlgebra) -> MatrixSubspace {
    let d = a.dim();
    let n = a.n();
    if d == 0 {
        return MatrixSubspace::zero(n, n, Field::Complex);
    }
    let mut sys = ConstraintSystem::new(d, Field::Complex);
    for i in 0..d {
        for l in 0..d {
            let row: Vec<(usize, C64)> = (0..d)
                .map(|k| (k, a.structure_constant(k, i, l) - a.structure_constant(i, k, l)))
                .collect();
            sys.push(&row);
        }
    }
    let kernel = sys.kernel(a.tol()).expect("tolerance is non-negative");
    let mats: Vec<ComplexMatrix> = kernel
        .iter()
        .map(|v| a.element(v.as_slice()))
        .collect();
    orthonormalize_in(n, n, &mats, Field::Complex, a.tol()).expect("shapes agree")
}

/// `{t in M_n : t s = s t for all s in the span}` as a certified unital algebra.
pub fn commutant(s: &MatrixSubspace, tol: f64) -> Result<StarAlgebra> {
    if s.rows() != s.cols() {
        return Err(Error::Dimension(format!(
            "commutant of a non-square subspace {:?}",
            s.shape()
        )));
    }
    let n = s.rows();
    let mut sys = ConstraintSystem::new(n * n, Field::Complex);
    // basis of the real span is a complex spanning set as well
    for b in s.as_real().basis() {
        // (t b - b t)[i][j] = sum_k t[i][k] b[k][j] - b[i][k] t[k][j]
        for i in 0..n {
            for j in 0..n {
                let mut row = Vec::with_capacity(2 * n);
                for k in 0..n {
                    row.push((i * n + k, b.get(k, j)));
                    row.push((k * n + j, -b.get(i, k)));
                }
                sys.push(&row);
            }
        }
    }
    let kernel = sys.kernel(tol)?;
    let mats: Vec<ComplexMatrix> = kernel
        .iter()
        .map(|v| ComplexMatrix::from_vec(n, n, v.as_slice()))
        .collect();
    let carrier = orthonormalize_in(n, n, &mats, Field::Complex, tol)?;
    StarAlgebra::from_subspace(carrier, tol.max(1e-10))
}

/// `S''`.
pub fn bicommutant(s: &MatrixSubspace, tol: f64) -> Result<StarAlgebra> {
    let first = commutant(s, tol)?;
    commutant(first.carrier(), tol)
}

/// `p A q`.
pub fn corner(p: &Projection, a: &StarAlgebra, q: &Projection) -> Result<MatrixSubspace> {
    for (name, e) in [("p", p), ("q", q)] {
        if !a.contains(e.matrix(), a.tol() * 10.0) {
            return Err(Error::InvalidProjection(format!("{name} is not in the algebra")));
        }
    }
    let n = a.n();
    let mats: Vec<ComplexMatrix> = a
        .basis()
        .iter()
        .map(|b| &(p.matrix() * b) * q.matrix())
        .collect();
    let mut span = SpanBuilder::new(n, n, Field::Complex, a.tol());
    for m in &mats {
        span.push(m);
    }
    Ok(span.finish())
}

/// `u = b + i c` with `b, c` self-adjoint.
pub fn split_self_adjoint(u: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !u.is_square() {
        return Err(Error::Dimension(format!("split of a non-square {:?} matrix", u.shape())));
    }
    let b = u.hermitian_part();
    let c = u.skew_part().scale(-I);
    Ok((b, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize, j: usize) -> ComplexMatrix {
        ComplexMatrix::unit(n, n, i, j)
    }

    pub(crate) fn full_matrix_algebra(n: usize) -> StarAlgebra {
        let gens: Vec<_> = (0..n).flat_map(|i| (0..n).map(move |j| e(n, i, j))).collect();
        make_star_algebra(&gens, 1e-10).unwrap()
    }

    fn block_m2_m3() -> StarAlgebra {
        let mut gens = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                gens.push(e(5, i, j));
            }
        }
        for i in 2..5 {
            for j in 2..5 {
                gens.push(e(5, i, j));
            }
        }
        make_star_algebra(&gens, 1e-10).unwrap()
    }

    #[test]
    fn single_matrix_unit_generates_m2() {
        let a = make_star_algebra(&[e(2, 0, 1)], 1e-10).unwrap();
        assert_eq!(a.dim(), 4);
        assert!(a.contains_ambient_identity());
    }

    #[test]
    fn identity_generates_scalars() {
        let a = make_star_algebra(&[ComplexMatrix::identity(2)], 1e-10).unwrap();
        assert_eq!(a.dim(), 1);
        assert!(a.is_unital());
    }

    #[test]
    fn projection_generates_itself() {
        let a = make_star_algebra(&[e(2, 0, 0)], 1e-10).unwrap();
        assert_eq!(a.dim(), 1);
        // unit of span{p} is p, not the ambient identity
        assert!(a.is_unital());
        assert!(!a.contains_ambient_identity());
        assert!((&a.unit().unwrap() - &e(2, 0, 0)).hs_norm() < 1e-10);
    }

    #[test]
    fn structure_constants_are_associative() {
        let a = block_m2_m3();
        assert_eq!(a.dim(), 13);
        assert!(a.certification_residual() < 1e-10);
        let small = full_matrix_algebra(2);
        assert!(small.associativity_defect() < 1e-12);
    }

    #[test]
    fn centers() {
        let m2 = full_matrix_algebra(2);
        let z = center(&m2);
        assert_eq!(z.dim(), 1);
        assert!(z.contains(&ComplexMatrix::identity(2), 1e-10));

        let diag = make_star_algebra(&[e(2, 0, 0), e(2, 1, 1)], 1e-10).unwrap();
        assert_eq!(center(&diag).dim(), 2);

        let blocks = block_m2_m3();
        let zb = center(&blocks);
        assert_eq!(zb.dim(), 2);
        let i2 = &e(5, 0, 0) + &e(5, 1, 1);
        let i3 = &(&e(5, 2, 2) + &e(5, 3, 3)) + &e(5, 4, 4);
        assert!(zb.contains(&i2, 1e-10) && zb.contains(&i3, 1e-10));
    }

    #[test]
    fn commutants() {
        let scalars = orthonormalize_in(2, 2, &[ComplexMatrix::identity(2)], Field::Complex, 0.0).unwrap();
        assert_eq!(commutant(&scalars, 1e-10).unwrap().dim(), 4);
        let m2 = full_matrix_algebra(2);
        assert_eq!(commutant(m2.carrier(), 1e-10).unwrap().dim(), 1);
        let s = orthonormalize_in(2, 2, &[e(2, 0, 0)], Field::Complex, 0.0).unwrap();
        let bc = bicommutant(&s, 1e-10).unwrap();
        assert_eq!(bc.dim(), 2);
        assert!(bc.contains(&e(2, 0, 0), 1e-10) && bc.contains(&e(2, 1, 1), 1e-10));
    }

    #[test]
    fn corners_of_m2_and_m5() {
        let m2 = full_matrix_algebra(2);
        let p = Projection::new(&e(2, 0, 0), &m2, 1e-10).unwrap();
        let q = p.complement(&m2).unwrap();
        let x = corner(&p, &m2, &q).unwrap();
        assert_eq!(x.dim(), 1);
        assert!(x.contains(&e(2, 0, 1), 1e-10));

        let m5 = full_matrix_algebra(5);
        let p2 = Projection::new(&(&e(5, 0, 0) + &e(5, 1, 1)), &m5, 1e-10).unwrap();
        assert_eq!(corner(&p2, &m5, &p2).unwrap().dim(), 4);

        let zero = Projection::new(&ComplexMatrix::zeros(5, 5), &m5, 1e-10).unwrap();
        assert_eq!(corner(&zero, &m5, &p2).unwrap().dim(), 0);
    }

    #[test]
    fn projection_validation() {
        let m2 = full_matrix_algebra(2);
        let not_idem = ComplexMatrix::identity(2).scale_real(2.0);
        assert!(matches!(
            Projection::new(&not_idem, &m2, 1e-10),
            Err(Error::InvalidProjection(_))
        ));
        // idempotent but not self-adjoint
        let e = &e(2, 0, 0) + &e(2, 0, 1);
        assert!(Projection::new(&e, &m2, 1e-10).is_err());
        let idem = Projection::idempotent(&e, &m2, 1e-10).unwrap();
        assert!(!idem.is_self_adjoint());
    }

    #[test]
    fn self_adjoint_split() {
        let h = ComplexMatrix::from_fn(2, 2, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.5, 0.0) });
        let (b, c) = split_self_adjoint(&h).unwrap();
        assert!((&b - &h).hs_norm() < 1e-15 && c.hs_norm() < 1e-15);

        let (b, c) = split_self_adjoint(&ComplexMatrix::identity(2).scale(I)).unwrap();
        assert!(b.hs_norm() < 1e-15 && (&c - &ComplexMatrix::identity(2)).hs_norm() < 1e-15);

        let u = e(2, 0, 1);
        let (b, c) = split_self_adjoint(&u).unwrap();
        let b_expect = (&e(2, 0, 1) + &e(2, 1, 0)).scale_real(0.5);
        let c_expect = (&e(2, 0, 1) - &e(2, 1, 0)).scale(C64::new(0.0, -0.5));
        assert!((&b - &b_expect).hs_norm() < 1e-15);
        assert!((&c - &c_expect).hs_norm() < 1e-15);
        assert!((&(&b + &c.scale(I)) - &u).hs_norm() < 1e-15);
    }
}
