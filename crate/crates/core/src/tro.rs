//! Ternary rings of operators: subspaces of `h x k` matrices closed under
//! `(x, y, z) -> x y^* z`, their linking algebras and finite direct sums.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Field, MatrixSubspace, SpanBuilder, C64, ZERO};
use crate::star_algebra::{Projection, StarAlgebra};

/// Which ternary product to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TripleMode {
    /// `x y^* z`
    Tro,
    /// `{x y z} = (x y^* z + z y^* x) / 2`
    Jordan,
}

/// Position of one summand inside a block-diagonal direct sum.
#[derive(Clone, Debug)]
pub struct Summand {
    pub row_offset: usize,
    pub col_offset: usize,
    pub part: Tro,
}

#[derive(Clone, Debug)]
pub struct Tro {
    carrier: MatrixSubspace,
    /// `u_a u_b^* u_c = sum_l t[((a*d + b)*d + c)*d + l] u_l`
    triple: Vec<C64>,
    nondegenerate: bool,
    growth_rounds: usize,
    summands: Vec<Summand>,
    tol: f64,
}

/// `x y^* z` or its Jordan symmetrization.
pub fn triple_product(
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    z: &ComplexMatrix,
    mode: TripleMode,
) -> Result<ComplexMatrix> {
    if x.shape() != y.shape() || y.shape() != z.shape() {
        return Err(Error::Dimension(format!(
            "triple product of shapes {:?}, {:?}, {:?}",
            x.shape(),
            y.shape(),
            z.shape()
        )));
    }
    let ys = y.adjoint();
    let xyz = &(x * &ys) * z;
    Ok(match mode {
        TripleMode::Tro => xyz,
        TripleMode::Jordan => (&xyz + &(&(z * &ys) * x)).scale_real(0.5),
    })
}

impl Tro {
    /// Certify ternary closure of `carrier` and tabulate the triple product.
    pub fn from_subspace(carrier: MatrixSubspace, tol: f64) -> Result<Self> {
        Self::certify(carrier, tol, 0, Vec::new())
    }

    /// The zero TRO of shape `h x k`.
    pub fn zero(h: usize, k: usize) -> Self {
        Self {
            carrier: MatrixSubspace::zero(h, k, Field::Complex),
            triple: Vec::new(),
            nondegenerate: true,
            growth_rounds: 0,
            summands: Vec::new(),
            tol: crate::DEFAULT_TOL,
        }
    }

    fn certify(
        carrier: MatrixSubspace,
        tol: f64,
        growth_rounds: usize,
        summands: Vec<Summand>,
    ) -> Result<Self> {
        if carrier.field() != Field::Complex {
            return Err(Error::Dimension("TRO carrier must be a complex span".into()));
        }
        let d = carrier.dim();
        let u = carrier.basis();
        let adj: Vec<ComplexMatrix> = u.iter().map(|x| x.adjoint()).collect();
        let mut triple = vec![ZERO; d * d * d * d];
        let mut products = SpanBuilder::new(carrier.rows(), carrier.cols(), Field::Complex, tol);
        for a in 0..d {
            for b in 0..d {
                let ab = &u[a] * &adj[b];
                for c in 0..d {
                    let prod = &ab * &u[c];
                    let coords = carrier.coords(&prod);
                    let res = (&prod - &carrier.combine(&coords)).hs_norm();
                    if res > tol * prod.hs_norm().max(1.0) {
                        return Err(Error::Closure(format!(
                            "triple ({a}, {b}, {c}) leaves the span (residual {res:.3e})"
                        )));
                    }
                    let at = ((a * d + b) * d + c) * d;
                    triple[at..at + d].copy_from_slice(&coords);
                    if products.dim() < d {
                        products.push(&prod);
                    }
                }
            }
        }
        Ok(Self {
            nondegenerate: products.dim() == d,
            carrier,
            triple,
            growth_rounds,
            summands,
            tol,
        })
    }

    pub fn h(&self) -> usize {
        self.carrier.rows()
    }

    pub fn k(&self) -> usize {
        self.carrier.cols()
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

    /// Coefficient of `u_l` in `u_a u_b^* u_c`.
    pub fn triple_constant(&self, a: usize, b: usize, c: usize, l: usize) -> C64 {
        let d = self.dim();
        self.triple[((a * d + b) * d + c) * d + l]
    }

    /// Coefficient of `u_l` in the chosen product of basis elements.
    pub fn product_constant(&self, mode: TripleMode, a: usize, b: usize, c: usize, l: usize) -> C64 {
        match mode {
            TripleMode::Tro => self.triple_constant(a, b, c, l),
            TripleMode::Jordan => {
                (self.triple_constant(a, b, c, l) + self.triple_constant(c, b, a, l)) * 0.5
            }
        }
    }

    /// `span{x y^* z} = X`, the finite-dimensional form of nondegeneracy.
    pub fn is_nondegenerate(&self) -> bool {
        self.nondegenerate
    }

    /// Closure rounds that enlarged the span in [`make_tro`]; zero when the
    /// generators already spanned a TRO.
    pub fn growth_rounds(&self) -> usize {
        self.growth_rounds
    }

    /// Summands when built by [`direct_sum`], empty otherwise.
    pub fn summands(&self) -> &[Summand] {
        &self.summands
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

    /// Products `u_a u_b^*` spanning the left block `X X^*`.
    pub fn left_products(&self) -> Vec<ComplexMatrix> {
        let u = self.basis();
        let mut out = Vec::with_capacity(u.len() * u.len());
        for a in u {
            for b in u {
                out.push(a * &b.adjoint());
            }
        }
        out
    }

    /// Products `u_a^* u_b` spanning the right block `X^* X`.
    pub fn right_products(&self) -> Vec<ComplexMatrix> {
        let u = self.basis();
        let mut out = Vec::with_capacity(u.len() * u.len());
        for a in u {
            for b in u {
                out.push(&a.adjoint() * b);
            }
        }
        out
    }

    /// `span X X^*` as a complex subspace of `M_h`.
    pub fn left_block(&self) -> MatrixSubspace {
        span_of(self.h(), self.h(), &self.left_products(), self.tol)
    }

    /// `span X^* X` as a complex subspace of `M_k`.
    pub fn right_block(&self) -> MatrixSubspace {
        span_of(self.k(), self.k(), &self.right_products(), self.tol)
    }
}

fn span_of(rows: usize, cols: usize, mats: &[ComplexMatrix], tol: f64) -> MatrixSubspace {
    let mut span = SpanBuilder::new(rows, cols, Field::Complex, tol);
    for m in mats {
        span.push(m);
    }
    span.finish()
}

/// Close `gens` under `x y^* z`.
pub fn make_tro(gens: &[ComplexMatrix], tol: f64) -> Result<Tro> {
    let first = gens
        .first()
        .ok_or_else(|| Error::Dimension("no generators given".into()))?;
    let (h, k) = first.shape();
    for g in gens {
        if g.shape() != (h, k) {
            return Err(Error::Dimension(format!(
                "generator of shape {:?}, expected {h}x{k}",
                g.shape()
            )));
        }
    }
    let mut span = SpanBuilder::new(h, k, Field::Complex, tol);
    for g in gens {
        span.push(g);
    }
    let mut done = 0;
    let mut rounds = 0;
    loop {
        let basis: Vec<ComplexMatrix> = span.space().basis().to_vec();
        let d = basis.len();
        if d > h * k {
            return Err(Error::Instability(format!(
                "span grew to {d} > {} dimensions while closing",
                h * k
            )));
        }
        if done == d {
            break;
        }
        if done > 0 {
            rounds += 1;
        }
        let adj: Vec<ComplexMatrix> = basis.iter().map(|x| x.adjoint()).collect();
        for a in 0..d {
            for b in 0..d {
                let ab = &basis[a] * &adj[b];
                for c in 0..d {
                    if a < done && b < done && c < done {
                        continue;
                    }
                    span.push(&(&ab * &basis[c]));
                }
            }
        }
        done = d;
    }
    Tro::certify(span.finish(), tol, rounds, Vec::new())
}

/// Block-diagonal direct sum of TROs.
pub fn direct_sum(parts: &[Tro]) -> Result<Tro> {
    if parts.is_empty() {
        return Err(Error::Dimension("direct sum of an empty list".into()));
    }
    let h: usize = parts.iter().map(Tro::h).sum();
    let k: usize = parts.iter().map(Tro::k).sum();
    let tol = parts.iter().map(Tro::tol).fold(0.0, f64::max);
    let mut basis = Vec::new();
    let mut summands = Vec::with_capacity(parts.len());
    let (mut r0, mut c0) = (0, 0);
    for p in parts {
        for b in p.basis() {
            let mut m = ComplexMatrix::zeros(h, k);
            m.set_block(r0, c0, b);
            basis.push(m);
        }
        summands.push(Summand {
            row_offset: r0,
            col_offset: c0,
            part: p.clone(),
        });
        r0 += p.h();
        c0 += p.k();
    }
    let carrier = MatrixSubspace::from_orthonormal(h, k, Field::Complex, basis, 1e-8)?;
    Tro::certify(carrier, tol, 0, summands)
}

impl Summand {
    /// Embed a summand element into the direct sum.
    pub fn embed(&self, x: &ComplexMatrix, h: usize, k: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(h, k);
        m.set_block(self.row_offset, self.col_offset, x);
        m
    }

    /// The summand block of `x`.
    pub fn extract(&self, x: &ComplexMatrix) -> ComplexMatrix {
        x.block(self.row_offset, self.col_offset, self.part.h(), self.part.k())
    }
}

/// `A_X` (or `A_0` without unitization) on `C^(h+k)`.
#[derive(Clone, Debug)]
pub struct LinkingAlgebra {
    algebra: StarAlgebra,
    left_corner: Option<Projection>,
    left_block: MatrixSubspace,
    right_block: MatrixSubspace,
    h: usize,
    k: usize,
    unitized: bool,
}

impl LinkingAlgebra {
    pub fn algebra(&self) -> &StarAlgebra {
        &self.algebra
    }

    /// `e = 1_h (+) 0`; absent only for a non-unitized `A_0` not containing it.
    pub fn left_corner(&self) -> Option<&Projection> {
        self.left_corner.as_ref()
    }

    pub fn left_block(&self) -> &MatrixSubspace {
        &self.left_block
    }

    pub fn right_block(&self) -> &MatrixSubspace {
        &self.right_block
    }

    pub fn is_unitized(&self) -> bool {
        self.unitized
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `x -> [[0, x], [0, 0]]`.
    pub fn embed(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.h + self.k, self.h + self.k);
        m.set_block(0, self.h, x);
        m
    }

    /// Upper-right `h x k` block.
    pub fn corner_part(&self, a: &ComplexMatrix) -> ComplexMatrix {
        a.block(0, self.h, self.h, self.k)
    }

    pub fn upper_left(&self, a: &ComplexMatrix) -> ComplexMatrix {
        a.block(0, 0, self.h, self.h)
    }

    pub fn lower_left(&self, a: &ComplexMatrix) -> ComplexMatrix {
        a.block(self.h, 0, self.k, self.h)
    }

    pub fn lower_right(&self, a: &ComplexMatrix) -> ComplexMatrix {
        a.block(self.h, self.h, self.k, self.k)
    }

    pub fn block_identities(&self) -> (ComplexMatrix, ComplexMatrix) {
        let n = self.h + self.k;
        let mut e = ComplexMatrix::zeros(n, n);
        e.set_block(0, 0, &ComplexMatrix::identity(self.h));
        let mut f = ComplexMatrix::zeros(n, n);
        f.set_block(self.h, self.h, &ComplexMatrix::identity(self.k));
        (e, f)
    }
}

/// Linking algebra `[XX^*, X; X^*, X^*X]`, adjoining `1_h (+) 0` and
/// `0 (+) 1_k` when `unitize` is set.
pub fn linking_algebra(x: &Tro, unitize: bool, tol: f64) -> Result<LinkingAlgebra> {
    let (h, k) = (x.h(), x.k());
    let n = h + k;
    let left_block = x.left_block();
    let right_block = x.right_block();
    let mut span = SpanBuilder::new(n, n, Field::Complex, tol);
    let place = |r0: usize, c0: usize, b: &ComplexMatrix| {
        let mut m = ComplexMatrix::zeros(n, n);
        m.set_block(r0, c0, b);
        m
    };
    for b in left_block.basis() {
        span.push(&place(0, 0, b));
    }
    for b in x.basis() {
        span.push(&place(0, h, b));
        span.push(&place(h, 0, &b.adjoint()));
    }
    for b in right_block.basis() {
        span.push(&place(h, h, b));
    }
    if unitize {
        span.push(&place(0, 0, &ComplexMatrix::identity(h)));
        span.push(&place(h, h, &ComplexMatrix::identity(k)));
    }
    let algebra = StarAlgebra::from_subspace(span.finish(), tol)?;
    let mut link = LinkingAlgebra {
        algebra,
        left_corner: None,
        left_block,
        right_block,
        h,
        k,
        unitized: unitize,
    };
    let (e, _) = link.block_identities();
    link.left_corner = match Projection::new(&e, &link.algebra, 10.0 * tol) {
        Ok(p) => Some(p),
        Err(_) if !unitize => None,
        Err(err) => return Err(err),
    };
    Ok(link)
}
