//! Derivation spaces as null spaces of explicit linear systems.
//!
//! Every operator is a `d x d` complex matrix in the coordinates of the
//! domain's orthonormal basis: column `m` holds the coordinates of the image
//! of the `m`-th basis element. Real-field spaces are real spans of such
//! (complex-linear) operators, orthonormal for `Re tr(B^* A)`.

mod generators;
mod inner;
mod solve;

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Field, MatrixSubspace, C64};
use crate::star_algebra::StarAlgebra;
use crate::tro::{Tro, TripleMode};

pub use generators::{p_generator_realization, GeneratorRealization};
pub use inner::{
    inner_assoc, inner_spaces, inner_triple, inner_tro, is_inner, payload_operator, triple_delta,
    Generator, InnerWitness, Innerness, Payload,
};
pub use solve::{
    derivation_space, p_derivation_space, p_derivation_space_within, s_derivation_space,
    s_derivation_space_within,
    star_derivation_space, star_within, triple_derivation_space, tro_derivation_space,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DerivationKind {
    Assoc,
    Star,
    SInvariant,
    Idempotent,
    Tro,
    Triple,
    InnerAssoc,
    InnerTro,
    InnerTriple,
}

impl fmt::Display for DerivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DerivationKind::Assoc => "assoc",
            DerivationKind::Star => "star",
            DerivationKind::SInvariant => "s_invariant",
            DerivationKind::Idempotent => "idempotent",
            DerivationKind::Tro => "tro",
            DerivationKind::Triple => "triple",
            DerivationKind::InnerAssoc => "inner_assoc",
            DerivationKind::InnerTro => "inner_tro",
            DerivationKind::InnerTriple => "inner_triple",
        };
        f.write_str(s)
    }
}

/// What the operators act on.
#[derive(Clone, Debug)]
pub enum Source {
    Algebra(StarAlgebra),
    Tro(Tro),
}

impl Source {
    pub fn domain(&self) -> &MatrixSubspace {
        match self {
            Source::Algebra(a) => a.carrier(),
            Source::Tro(x) => x.carrier(),
        }
    }

    pub fn tol(&self) -> f64 {
        match self {
            Source::Algebra(a) => a.tol(),
            Source::Tro(x) => x.tol(),
        }
    }
}

/// Side conditions beyond the base identity.
#[derive(Clone, Debug)]
pub(crate) enum Extra {
    Star,
    Vanishes(ComplexMatrix),
    Invariant(MatrixSubspace),
}

#[derive(Clone, Debug)]
pub struct DerivationSpace {
    kind: DerivationKind,
    source: Source,
    operators: MatrixSubspace,
    extras: Vec<Extra>,
    generators: Vec<Generator>,
}

impl DerivationSpace {
    pub(crate) fn new(
        kind: DerivationKind,
        source: Source,
        operators: MatrixSubspace,
        extras: Vec<Extra>,
    ) -> Self {
        Self {
            kind,
            source,
            operators,
            extras,
            generators: Vec::new(),
        }
    }

    pub fn kind(&self) -> DerivationKind {
        self.kind
    }

    pub fn field(&self) -> Field {
        self.operators.field()
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn domain(&self) -> &MatrixSubspace {
        self.source.domain()
    }

    /// Operator space (`d x d` matrices in domain coordinates).
    pub fn operators(&self) -> &MatrixSubspace {
        &self.operators
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        self.operators.basis()
    }

    /// Dimension over the space's own field.
    pub fn dim(&self) -> usize {
        self.operators.dim()
    }

    pub fn real_dim(&self) -> usize {
        self.operators.real_dim()
    }

    /// Generators of an inner space, in the order used by witnesses.
    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn contains(&self, op: &ComplexMatrix, tol: f64) -> bool {
        self.operators.contains(op, tol)
    }

    /// `delta(x)` for `x` in the domain.
    pub fn apply(&self, op: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
        apply(self.domain(), op, x)
    }

    /// Largest violation of the defining identities by `op`, over all basis
    /// tuples of the domain, evaluated with matrix products.
    pub fn defect(&self, op: &ComplexMatrix) -> f64 {
        let base = match (&self.source, self.kind) {
            (Source::Algebra(a), _) => leibniz_defect(a, op),
            (Source::Tro(x), DerivationKind::Triple | DerivationKind::InnerTriple) => {
                triple_defect(x, op, TripleMode::Jordan)
            }
            (Source::Tro(x), _) => triple_defect(x, op, TripleMode::Tro),
        };
        let domain = self.domain();
        self.extras.iter().fold(base, |worst, extra| {
            let d = match extra {
                Extra::Star => star_defect(domain, op),
                Extra::Vanishes(e) => apply(domain, op, e).hs_norm(),
                Extra::Invariant(s) => s
                    .basis()
                    .iter()
                    .map(|b| s.residual(&apply(domain, op, b)))
                    .fold(0.0, f64::max),
            };
            worst.max(d)
        })
    }

    /// Largest [`defect`](Self::defect) over the basis.
    pub fn max_defect(&self) -> f64 {
        self.basis().iter().map(|b| self.defect(b)).fold(0.0, f64::max)
    }

    /// Largest distance of `[b_i, b_j]` from the space, relative to its norm.
    pub fn lie_closure_defect(&self) -> f64 {
        let b = self.basis();
        let mut worst: f64 = 0.0;
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                let br = ComplexMatrix::commutator(&b[i], &b[j]);
                worst = worst.max(self.operators.residual(&br) / br.hs_norm().max(1.0));
            }
        }
        worst
    }

    /// `{delta in the space : i delta in the space}`, the largest complex
    /// subspace of a real space.
    pub fn complex_part(&self) -> Result<MatrixSubspace> {
        let ops = &self.operators;
        if ops.field() == Field::Complex {
            return Ok(ops.clone());
        }
        let d = self.domain().dim();
        let real = crate::linalg::restrict(
            ops,
            |m| ops.reject(&m.scale(crate::linalg::I)).to_vec(),
            false,
            self.source.tol(),
        )?;
        let mut span = crate::linalg::SpanBuilder::new(d, d, Field::Complex, 1e-8);
        for b in real.basis() {
            span.push(b);
        }
        Ok(span.finish())
    }
}

/// Coordinates-to-matrix application of an operator.
pub fn apply(domain: &MatrixSubspace, op: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    let c = domain.coords(x);
    let d = c.len();
    let out: Vec<C64> = (0..d)
        .map(|l| (0..d).map(|m| op.get(l, m) * c[m]).sum())
        .collect();
    domain.combine(&out)
}

/// Matrix of `f` restricted to `domain`; fails if `f` leaves the domain.
pub fn operator_from_fn(
    domain: &MatrixSubspace,
    f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    tol: f64,
) -> Result<ComplexMatrix> {
    let d = domain.dim();
    let mut op = ComplexMatrix::zeros(d, d);
    for (m, b) in domain.basis().iter().enumerate() {
        let y = f(b);
        let c = domain.coords(&y);
        let res = (&y - &domain.combine(&c)).hs_norm();
        if res > tol * y.hs_norm().max(1.0) {
            return Err(Error::Closure(format!(
                "map sends basis element {m} outside the domain (residual {res:.3e})"
            )));
        }
        for (l, z) in c.into_iter().enumerate() {
            op.set(l, m, z);
        }
    }
    Ok(op)
}

/// `[d1, d2] = d1 d2 - d2 d1`.
pub fn lie_bracket(d1: &ComplexMatrix, d2: &ComplexMatrix) -> Result<ComplexMatrix> {
    if d1.shape() != d2.shape() || !d1.is_square() {
        return Err(Error::Dimension(format!(
            "bracket of operators of shapes {:?} and {:?}",
            d1.shape(),
            d2.shape()
        )));
    }
    Ok(ComplexMatrix::commutator(d1, d2))
}

/// `max |delta(e_i e_j) - delta(e_i) e_j - e_i delta(e_j)|`.
pub fn leibniz_defect(a: &StarAlgebra, op: &ComplexMatrix) -> f64 {
    let dom = a.carrier();
    let b = a.basis();
    let images: Vec<ComplexMatrix> = b.iter().map(|x| apply(dom, op, x)).collect();
    let mut worst: f64 = 0.0;
    for i in 0..b.len() {
        for j in 0..b.len() {
            let lhs = apply(dom, op, &(&b[i] * &b[j]));
            let rhs = &(&images[i] * &b[j]) + &(&b[i] * &images[j]);
            worst = worst.max((&lhs - &rhs).hs_norm());
        }
    }
    worst
}

/// `max |delta(x^*)^* - delta(x)|` over the basis.
pub fn star_defect(domain: &MatrixSubspace, op: &ComplexMatrix) -> f64 {
    domain
        .basis()
        .iter()
        .map(|x| (&apply(domain, op, &x.adjoint()).adjoint() - &apply(domain, op, x)).hs_norm())
        .fold(0.0, f64::max)
}

/// Largest violation of the ternary Leibniz rule (middle slot adjoint).
pub fn triple_defect(x: &Tro, op: &ComplexMatrix, mode: TripleMode) -> f64 {
    let dom = x.carrier();
    let u = x.basis();
    let tu: Vec<ComplexMatrix> = u.iter().map(|b| apply(dom, op, b)).collect();
    let prod = |a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix| {
        crate::tro::triple_product(a, b, c, mode).expect("shapes agree")
    };
    let mut worst: f64 = 0.0;
    for a in 0..u.len() {
        for b in 0..u.len() {
            for c in 0..u.len() {
                let lhs = apply(dom, op, &prod(&u[a], &u[b], &u[c]));
                let rhs = &(&prod(&tu[a], &u[b], &u[c]) + &prod(&u[a], &tu[b], &u[c]))
                    + &prod(&u[a], &u[b], &tu[c]);
                worst = worst.max((&lhs - &rhs).hs_norm());
            }
        }
    }
    worst
}
