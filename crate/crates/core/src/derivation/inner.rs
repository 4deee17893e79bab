use crate::error::{Error, Result};
use crate::linalg::{least_norm, orthonormalize_in, ComplexMatrix, Field, I};
use crate::star_algebra::{hermitian_part_of, StarAlgebra};
use crate::tro::Tro;

use super::{operator_from_fn, DerivationKind, DerivationSpace, Source};

/// One spanning element of an inner space.
#[derive(Clone, Debug)]
pub enum Generator {
    /// `x -> a x - x a`
    Ad(ComplexMatrix),
    /// `x -> alpha x` (`left`) or `x -> x beta`
    Left(ComplexMatrix),
    Right(ComplexMatrix),
    /// `delta(a, b)`
    Pair(ComplexMatrix, ComplexMatrix),
}

/// Data that reproduces an inner operator.
#[derive(Clone, Debug)]
pub enum Payload {
    Ad(ComplexMatrix),
    Spatial { alpha: ComplexMatrix, beta: ComplexMatrix },
    Pairs(Vec<(ComplexMatrix, ComplexMatrix)>),
}

#[derive(Clone, Debug)]
pub struct InnerWitness {
    pub payload: Payload,
    /// HS distance between the payload's operator and the tested one.
    pub residual: f64,
    /// `|alpha + alpha^*| + |beta + beta^*|` for spatial payloads.
    pub skew_residual: f64,
}

#[derive(Clone, Debug)]
pub enum Innerness {
    Inner(InnerWitness),
    /// Distance from the operator to the inner space.
    Outer { distance: f64 },
}

impl Innerness {
    pub fn is_inner(&self) -> bool {
        matches!(self, Innerness::Inner(_))
    }
}

/// `delta(a, b)(x) = (a b^* x + x b^* a - b a^* x - x a^* b) / 2`.
pub fn triple_delta(a: &ComplexMatrix, b: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    let (ad, bd) = (a.adjoint(), b.adjoint());
    let s = &(&(&(a * &bd) * x) + &(&(x * &bd) * a)) - &(&(&(b * &ad) * x) + &(&(x * &ad) * b));
    s.scale_real(0.5)
}

fn generator_image(g: &Generator, x: &ComplexMatrix) -> ComplexMatrix {
    match g {
        Generator::Ad(a) => ComplexMatrix::commutator(a, x),
        Generator::Left(alpha) => alpha * x,
        Generator::Right(beta) => x * beta,
        Generator::Pair(a, b) => triple_delta(a, b, x),
    }
}

/// Operator of a payload on `source`'s domain.
pub fn payload_operator(source: &Source, payload: &Payload) -> Result<ComplexMatrix> {
    let dom = source.domain();
    let tol = 1e3 * source.tol().max(1e-12);
    match payload {
        Payload::Ad(a) => operator_from_fn(dom, |x| ComplexMatrix::commutator(a, x), tol),
        Payload::Spatial { alpha, beta } => operator_from_fn(dom, |x| &(alpha * x) + &(x * beta), tol),
        Payload::Pairs(pairs) => operator_from_fn(
            dom,
            |x| {
                let mut out = ComplexMatrix::zeros(x.rows(), x.cols());
                for (a, b) in pairs {
                    out += &triple_delta(a, b, x);
                }
                out
            },
            tol,
        ),
    }
}

fn inner_space(
    kind: DerivationKind,
    source: Source,
    gens: Vec<Generator>,
    field: Field,
) -> Result<DerivationSpace> {
    let dom = source.domain().clone();
    let d = dom.dim();
    let tol = source.tol();
    let mut ops = Vec::with_capacity(gens.len());
    for g in &gens {
        ops.push(operator_from_fn(&dom, |x| generator_image(g, x), 1e3 * tol.max(1e-12))?);
    }
    let span = orthonormalize_in(d, d, &ops, field, tol)?;
    let mut space = DerivationSpace::new(kind, source, span, Vec::new());
    space.generators = gens;
    Ok(space)
}

/// `span{ad e_i}`.
pub fn inner_assoc(a: &StarAlgebra) -> Result<DerivationSpace> {
    let gens = a.basis().iter().cloned().map(Generator::Ad).collect();
    inner_space(DerivationKind::InnerAssoc, Source::Algebra(a.clone()), gens, Field::Complex)
}

/// Real span of `x -> alpha x + x beta`, `alpha`, `beta` skew in `span XX^*`,
/// `span X^*X`.
pub fn inner_tro(x: &Tro) -> Result<DerivationSpace> {
    let tol = x.tol();
    let mut gens = Vec::new();
    for h in hermitian_part_of(&x.left_block(), tol).basis() {
        gens.push(Generator::Left(h.scale(I)));
    }
    for h in hermitian_part_of(&x.right_block(), tol).basis() {
        gens.push(Generator::Right(h.scale(I)));
    }
    inner_space(DerivationKind::InnerTro, Source::Tro(x.clone()), gens, Field::Real)
}

/// Real span of `delta(a, b)` over `a in {u_i, i u_i}`, `b in {u_j}`.
///
/// `delta` is real-bilinear but conjugate-linear in `b`, so `delta(u_i, u_j)`
/// alone does not span; `delta(a, i b) = delta(-i a, b)` covers the rest.
pub fn inner_triple(x: &Tro) -> Result<DerivationSpace> {
    let u = x.basis();
    let mut gens = Vec::with_capacity(2 * u.len() * u.len());
    for a in u {
        for b in u {
            gens.push(Generator::Pair(a.clone(), b.clone()));
            gens.push(Generator::Pair(a.scale(I), b.clone()));
        }
    }
    inner_space(DerivationKind::InnerTriple, Source::Tro(x.clone()), gens, Field::Real)
}

/// Dispatch on `kind` (`inner_assoc`, `inner_tro` or `inner_triple`).
pub fn inner_spaces(source: &Source, kind: DerivationKind) -> Result<DerivationSpace> {
    match (source, kind) {
        (Source::Algebra(a), DerivationKind::InnerAssoc) => inner_assoc(a),
        (Source::Tro(x), DerivationKind::InnerTro) => inner_tro(x),
        (Source::Tro(x), DerivationKind::InnerTriple) => inner_triple(x),
        _ => Err(Error::Hypothesis(format!("no inner space of kind {kind} for this domain"))),
    }
}

/// Membership in an inner space, with a reconstructed witness.
pub fn is_inner(op: &ComplexMatrix, inner: &DerivationSpace, tol: f64) -> Result<Innerness> {
    let d = inner.domain().dim();
    if op.shape() != (d, d) {
        return Err(Error::Dimension(format!(
            "operator of shape {:?} on a {d}-dimensional domain",
            op.shape()
        )));
    }
    if inner.generators().is_empty() && inner.dim() > 0 {
        return Err(Error::Hypothesis(format!("{} is not an inner space", inner.kind())));
    }
    let scale = op.hs_norm().max(1.0);
    let distance = inner.operators().residual(op);
    if distance > tol * scale {
        return Ok(Innerness::Outer { distance });
    }
    let gens = inner.generators();
    let dom = inner.domain();
    let ops: Vec<ComplexMatrix> = gens
        .iter()
        .map(|g| operator_from_fn(dom, |x| generator_image(g, x), f64::INFINITY))
        .collect::<Result<_>>()?;
    let (coeffs, _) = least_norm(&ops, op, inner.field(), 1e-12)?;
    let payload = match inner.kind() {
        DerivationKind::InnerAssoc => {
            let mut a = ComplexMatrix::zeros(dom.rows(), dom.cols());
            for (c, g) in coeffs.iter().zip(gens) {
                if let Generator::Ad(e) = g {
                    a += &e.scale(*c);
                }
            }
            Payload::Ad(a)
        }
        DerivationKind::InnerTro => {
            let (h, k) = dom.shape();
            let mut alpha = ComplexMatrix::zeros(h, h);
            let mut beta = ComplexMatrix::zeros(k, k);
            for (c, g) in coeffs.iter().zip(gens) {
                match g {
                    Generator::Left(m) => alpha += &m.scale_real(c.re),
                    Generator::Right(m) => beta += &m.scale_real(c.re),
                    _ => {}
                }
            }
            Payload::Spatial {
                alpha: alpha.skew_part(),
                beta: beta.skew_part(),
            }
        }
        DerivationKind::InnerTriple => {
            let pairs = coeffs
                .iter()
                .zip(gens)
                .filter(|(c, _)| c.re.abs() > 1e-14)
                .filter_map(|(c, g)| match g {
                    Generator::Pair(a, b) => Some((a.scale_real(c.re), b.clone())),
                    _ => None,
                })
                .collect();
            Payload::Pairs(pairs)
        }
        k => return Err(Error::Hypothesis(format!("{k} is not an inner space"))),
    };
    let rebuilt = payload_operator(inner.source(), &payload)?;
    let residual = (&rebuilt - op).hs_norm();
    let skew_residual = match &payload {
        Payload::Spatial { alpha, beta } => {
            (alpha + &alpha.adjoint()).hs_norm() + (beta + &beta.adjoint()).hs_norm()
        }
        _ => 0.0,
    };
    if residual > tol * scale {
        return Err(Error::stage("inner witness reconstruction", residual, tol));
    }
    Ok(Innerness::Inner(InnerWitness {
        payload,
        residual,
        skew_residual,
    }))
}
