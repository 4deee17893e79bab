use crate::error::{Error, Result};
use crate::linalg::{restrict, ComplexMatrix, ConstraintSystem, Field, MatrixSubspace, C64, ZERO};
use crate::star_algebra::{Projection, StarAlgebra};
use crate::tro::{Tro, TripleMode};

use super::{apply, DerivationKind, DerivationSpace, Extra, Source};

fn operators_from_kernel(d: usize, field: Field, kernel: Vec<nalgebra::DVector<C64>>) -> MatrixSubspace {
    let basis = kernel
        .iter()
        .map(|v| ComplexMatrix::from_vec(d, d, v.as_slice()))
        .collect();
    MatrixSubspace::from_parts_unchecked(d, d, field, basis)
}

/// `D(A)`: solutions of `delta(e_i e_j) = delta(e_i) e_j + e_i delta(e_j)`.
pub fn derivation_space(a: &StarAlgebra) -> Result<DerivationSpace> {
    let d = a.dim();
    let source = Source::Algebra(a.clone());
    if d == 0 {
        let ops = MatrixSubspace::zero(0, 0, Field::Complex);
        return Ok(DerivationSpace::new(DerivationKind::Assoc, source, ops, Vec::new()));
    }
    // unknown D[l][m] at l*d + m; equation for the e_l component of (i, j)
    let mut sys = ConstraintSystem::new(d * d, Field::Complex);
    let mut row = Vec::with_capacity(3 * d);
    for i in 0..d {
        for j in 0..d {
            for l in 0..d {
                row.clear();
                for k in 0..d {
                    let c = a.structure_constant(i, j, k);
                    if c != ZERO {
                        row.push((l * d + k, c));
                    }
                }
                for m in 0..d {
                    let c = a.structure_constant(m, j, l);
                    if c != ZERO {
                        row.push((m * d + i, -c));
                    }
                    let c = a.structure_constant(i, m, l);
                    if c != ZERO {
                        row.push((m * d + j, -c));
                    }
                }
                sys.push(&row);
            }
        }
    }
    let ops = operators_from_kernel(d, Field::Complex, sys.kernel(a.tol())?);
    Ok(DerivationSpace::new(DerivationKind::Assoc, source, ops, Vec::new()))
}

/// Self-adjoint elements (`delta(x^*)^* = delta(x)`) of an algebra-derivation
/// space; always a real space.
pub fn star_within(space: &DerivationSpace) -> Result<DerivationSpace> {
    let Source::Algebra(a) = space.source() else {
        return Err(Error::Hypothesis("self-adjointness needs an algebra domain".into()));
    };
    let j = a.adjoint_matrix().clone();
    let jc = j.conj();
    // matrix of delta^* in coordinates is J conj(D) conj(J)
    let ops = restrict(
        space.operators(),
        |m| (m - &(&(&j * &m.conj()) * &jc)).to_vec(),
        false,
        a.tol(),
    )?;
    let mut extras = space.extras.clone();
    extras.push(Extra::Star);
    let kind = match space.kind() {
        DerivationKind::Assoc => DerivationKind::Star,
        k => k,
    };
    Ok(DerivationSpace::new(kind, space.source().clone(), ops, extras))
}

/// `D*(A)`.
pub fn star_derivation_space(a: &StarAlgebra) -> Result<DerivationSpace> {
    star_within(&derivation_space(a)?)
}

/// `D_S(A)`: derivations with `delta(S) ⊆ S`.
pub fn s_derivation_space(a: &StarAlgebra, s: &MatrixSubspace) -> Result<DerivationSpace> {
    s_derivation_space_within(&derivation_space(a)?, s)
}

/// Elements of an algebra-derivation space leaving `S` invariant. Lets
/// callers reuse one `D(A)` solve for several subspaces.
pub fn s_derivation_space_within(space: &DerivationSpace, s: &MatrixSubspace) -> Result<DerivationSpace> {
    let Source::Algebra(a) = space.source() else {
        return Err(Error::Hypothesis("invariant subspaces need an algebra domain".into()));
    };
    for b in s.basis() {
        if !a.contains(b, 10.0 * a.tol()) {
            return Err(Error::NotContained {
                what: "S".into(),
                container: "the algebra".into(),
                residual: a.carrier().residual(b),
            });
        }
    }
    let dom = a.carrier().clone();
    let s_basis: Vec<ComplexMatrix> = s.basis().to_vec();
    let ops = restrict(
        space.operators(),
        |m| {
            s_basis
                .iter()
                .flat_map(|b| s.reject(&apply(&dom, m, b)).to_vec())
                .collect()
        },
        s.field() == Field::Complex,
        a.tol(),
    )?;
    let mut extras = space.extras.clone();
    extras.push(Extra::Invariant(s.clone()));
    Ok(DerivationSpace::new(DerivationKind::SInvariant, space.source().clone(), ops, extras))
}

/// Elements of `space` with `delta(e) = 0`, optionally self-adjoint.
pub fn p_derivation_space_within(
    space: &DerivationSpace,
    e: &Projection,
    self_adjoint: bool,
) -> Result<DerivationSpace> {
    if self_adjoint && !e.is_self_adjoint() {
        return Err(Error::InvalidProjection(
            "self-adjoint p-derivations need a self-adjoint projection".into(),
        ));
    }
    let Source::Algebra(a) = space.source() else {
        return Err(Error::Hypothesis("p-derivations need an algebra domain".into()));
    };
    let coeffs = e.coeffs().to_vec();
    let d = coeffs.len();
    let ops = restrict(
        space.operators(),
        |m| {
            (0..d)
                .map(|l| (0..d).map(|k| m.get(l, k) * coeffs[k]).sum())
                .collect()
        },
        true,
        a.tol(),
    )?;
    let mut extras = space.extras.clone();
    extras.push(Extra::Vanishes(e.matrix().clone()));
    let restricted = DerivationSpace::new(DerivationKind::Idempotent, space.source().clone(), ops, extras);
    if self_adjoint && restricted.field() == Field::Complex {
        let mut s = star_within(&restricted)?;
        s.kind = DerivationKind::Idempotent;
        Ok(s)
    } else {
        Ok(restricted)
    }
}

/// `D_p(A)` (`self_adjoint = false`) or `D*_p(A)`.
pub fn p_derivation_space(a: &StarAlgebra, e: &Projection, self_adjoint: bool) -> Result<DerivationSpace> {
    if e.matrix().shape() != (a.n(), a.n()) || !a.contains(e.matrix(), 10.0 * a.tol()) {
        return Err(Error::InvalidProjection("idempotent is not in the algebra".into()));
    }
    p_derivation_space_within(&derivation_space(a)?, e, self_adjoint)
}

fn ternary_space(x: &Tro, mode: TripleMode) -> Result<DerivationSpace> {
    let d = x.dim();
    let kind = match mode {
        TripleMode::Tro => DerivationKind::Tro,
        TripleMode::Jordan => DerivationKind::Triple,
    };
    let source = Source::Tro(x.clone());
    if d == 0 {
        let ops = MatrixSubspace::zero(0, 0, Field::Real);
        return Ok(DerivationSpace::new(kind, source, ops, Vec::new()));
    }
    let t = |a, b, c, l| x.product_constant(mode, a, b, c, l);
    let mut sys = ConstraintSystem::new(d * d, Field::Real);
    let mut lin = Vec::with_capacity(3 * d);
    let mut conj = Vec::with_capacity(d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for l in 0..d {
                    lin.clear();
                    conj.clear();
                    for m in 0..d {
                        let v = t(a, b, c, m);
                        if v != ZERO {
                            lin.push((l * d + m, v));
                        }
                        let v = t(m, b, c, l);
                        if v != ZERO {
                            lin.push((m * d + a, -v));
                        }
                        let v = t(a, b, m, l);
                        if v != ZERO {
                            lin.push((m * d + c, -v));
                        }
                        let v = t(a, m, c, l);
                        if v != ZERO {
                            conj.push((m * d + b, -v));
                        }
                    }
                    if !lin.is_empty() || !conj.is_empty() {
                        sys.push_mixed(&lin, &conj);
                    }
                }
            }
        }
    }
    let ops = operators_from_kernel(d, Field::Real, sys.kernel(x.tol())?);
    Ok(DerivationSpace::new(kind, source, ops, Vec::new()))
}

/// `D_TRO(X)`: `tau(x y^* z) = tau(x) y^* z + x tau(y)^* z + x y^* tau(z)`.
pub fn tro_derivation_space(x: &Tro) -> Result<DerivationSpace> {
    ternary_space(x, TripleMode::Tro)
}

/// Derivations of the Jordan triple product `(x y^* z + z y^* x) / 2`.
pub fn triple_derivation_space(x: &Tro) -> Result<DerivationSpace> {
    ternary_space(x, TripleMode::Jordan)
}
