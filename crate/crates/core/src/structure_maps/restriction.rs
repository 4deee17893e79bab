use nalgebra::DMatrix;

use crate::derivation::{
    apply, operator_from_fn, p_derivation_space, p_generator_realization, tro_derivation_space,
    DerivationSpace,
};
use crate::error::Result;
use crate::linalg::{dense_kernel, restrict, ComplexMatrix, Cutoff, Field, MatrixSubspace};
use crate::star_algebra::{center, corner, Projection, StarAlgebra};
use crate::tro::Tro;

/// `Delta : D*_p(A) -> D_TRO(pA(1-p))`, `delta -> delta|_X`.
#[derive(Clone, Debug)]
pub struct RestrictionReport {
    pub star_p: DerivationSpace,
    pub corner: Tro,
    pub tro: DerivationSpace,
    /// `Delta(delta_k)` in corner coordinates, one per basis element of `star_p`.
    pub restrictions: Vec<ComplexMatrix>,
    /// Real matrix of `Delta` (rows: basis of `D_TRO`, columns: basis of `D*_p`).
    pub map_matrix: DMatrix<f64>,
    pub image_dim: usize,
    pub surjective: bool,
    /// Operator-level kernel, in algebra coordinates.
    pub operator_kernel: MatrixSubspace,
    /// Generators `t` of `D*_p` with `ad t = 0` on the corner.
    pub generator_kernel: MatrixSubspace,
    pub generator_kernel_is_center: bool,
    pub center_dim: usize,
    /// Largest distance of a restriction from `D_TRO`.
    pub membership_residual: f64,
    /// Largest `|Delta[d_i, d_j] - [Delta d_i, Delta d_j]|`.
    pub homomorphism_defect: f64,
}

pub fn restriction_delta(a: &StarAlgebra, p: &Projection) -> Result<RestrictionReport> {
    let tol = a.tol();
    let star_p = p_derivation_space(a, p, true)?;
    let q = p.complement(a)?;
    let corner = Tro::from_subspace(corner(p, a, &q)?, tol)?;
    let tro = tro_derivation_space(&corner)?;
    let dom = a.carrier();
    let restrict_op = |op: &ComplexMatrix| {
        operator_from_fn(corner.carrier(), |x| apply(dom, op, x), 1e3 * tol.max(1e-12))
    };
    let restrictions = star_p
        .basis()
        .iter()
        .map(restrict_op)
        .collect::<Result<Vec<_>>>()?;
    let membership_residual = restrictions
        .iter()
        .map(|r| tro.operators().residual(r))
        .fold(0.0, f64::max);

    let (rows, cols) = (tro.dim(), star_p.dim());
    let map_matrix = DMatrix::from_fn(rows, cols, |i, j| {
        crate::linalg::hs_inner(&restrictions[j], &tro.basis()[i])
            .map(|z| z.re)
            .unwrap_or(0.0)
    });
    let (image_dim, operator_kernel) = if cols == 0 {
        (0, MatrixSubspace::zero(a.dim(), a.dim(), Field::Real))
    } else if rows == 0 {
        (0, star_p.operators().clone())
    } else {
        let k = dense_kernel(&map_matrix, Cutoff::Relative(tol))?;
        let basis = k
            .vectors
            .iter()
            .map(|v| {
                let mut op = ComplexMatrix::zeros(a.dim(), a.dim());
                for (c, b) in v.iter().zip(star_p.basis()) {
                    op += &b.scale_real(*c);
                }
                op
            })
            .collect();
        (
            k.rank,
            MatrixSubspace::from_parts_unchecked(a.dim(), a.dim(), Field::Real, basis),
        )
    };

    let mut homomorphism_defect: f64 = 0.0;
    for i in 0..cols {
        for j in i + 1..cols {
            let br = ComplexMatrix::commutator(&star_p.basis()[i], &star_p.basis()[j]);
            let lhs = restrict_op(&br)?;
            let rhs = ComplexMatrix::commutator(&restrictions[i], &restrictions[j]);
            homomorphism_defect = homomorphism_defect.max((&lhs - &rhs).hs_norm());
        }
    }

    let gens = p_generator_realization(a, p, true)?;
    let xs: Vec<ComplexMatrix> = corner.basis().to_vec();
    let generator_kernel = restrict(
        &gens.generators,
        |t| xs.iter().flat_map(|x| ComplexMatrix::commutator(t, x).to_vec()).collect(),
        false,
        tol,
    )?;
    let z = center(a);
    let generator_kernel_is_center = generator_kernel.same_span(&z, 1e3 * tol.max(1e-12));

    Ok(RestrictionReport {
        surjective: image_dim == tro.dim(),
        star_p,
        corner,
        tro,
        restrictions,
        map_matrix,
        image_dim,
        operator_kernel,
        generator_kernel,
        generator_kernel_is_center,
        center_dim: z.dim(),
        membership_residual,
        homomorphism_defect,
    })
}
