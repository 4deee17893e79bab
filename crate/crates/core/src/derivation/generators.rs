use crate::error::{Error, Result};
use crate::linalg::{orthonormalize_in, restrict, ComplexMatrix, MatrixSubspace};
use crate::star_algebra::{center, Projection, StarAlgebra};

use super::operator_from_fn;

/// Generator-level description of `D_p(A)` / `D*_p(A)`: the matrices `t`
/// with `delta = ad t`, and the kernel of `t -> ad t`.
#[derive(Clone, Debug)]
pub struct GeneratorRealization {
    /// `{t in A : [t, p] = 0}`, with `t + t^*` central in the self-adjoint
    /// case (then a real space).
    pub generators: MatrixSubspace,
    /// Generators with `ad t = 0`.
    pub kernel: MatrixSubspace,
    /// `ad t` for each generator basis element, in algebra coordinates.
    pub operators: Vec<ComplexMatrix>,
    /// Span of `operators` over the generators' field.
    pub operator_span: MatrixSubspace,
}

impl GeneratorRealization {
    /// Dimension of the operator image, `dim generators - dim kernel`.
    pub fn operator_dim(&self) -> usize {
        self.operator_span.dim()
    }
}

/// Generator realization of the `p`-derivations of `a`.
pub fn p_generator_realization(
    a: &StarAlgebra,
    p: &Projection,
    self_adjoint: bool,
) -> Result<GeneratorRealization> {
    if self_adjoint && !p.is_self_adjoint() {
        return Err(Error::InvalidProjection(
            "self-adjoint generators need a self-adjoint projection".into(),
        ));
    }
    let tol = a.tol();
    let pm = p.matrix().clone();
    let mut gens = restrict(a.carrier(), |t| ComplexMatrix::commutator(t, &pm).to_vec(), true, tol)?;
    let z = center(a);
    if self_adjoint {
        gens = restrict(&gens, |t| z.reject(&(t + &t.adjoint())).to_vec(), false, tol)?;
    }
    let basis: Vec<ComplexMatrix> = a.basis().to_vec();
    let kernel = restrict(
        &gens,
        |t| basis.iter().flat_map(|b| ComplexMatrix::commutator(t, b).to_vec()).collect(),
        true,
        tol,
    )?;
    let dom = a.carrier();
    let operators = gens
        .basis()
        .iter()
        .map(|t| operator_from_fn(dom, |x| ComplexMatrix::commutator(t, x), 1e3 * tol.max(1e-12)))
        .collect::<Result<Vec<_>>>()?;
    let d = a.dim();
    let operator_span = orthonormalize_in(d, d, &operators, gens.field(), tol)?;
    Ok(GeneratorRealization {
        generators: gens,
        kernel,
        operators,
        operator_span,
    })
}
