use crate::derivation::{inner_triple, operator_from_fn, payload_operator, triple_delta, Generator, Payload, Source};
use crate::error::{Error, Result};
use crate::linalg::{least_norm, ComplexMatrix, Field};
use crate::star_algebra::bicommutant;
use crate::tro::Tro;

/// `D x = alpha x + x beta` with skew `alpha`, `beta` from the bicommutants.
#[derive(Clone, Debug)]
pub struct SpatialWitness {
    pub alpha: ComplexMatrix,
    pub beta: ComplexMatrix,
    /// `|D - (x -> alpha x + x beta)|_HS` on the operator level.
    pub residual: f64,
    /// `|alpha + alpha^*| + |beta + beta^*|`.
    pub skew_residual: f64,
    /// Distance of `alpha`, `beta` from `(XX^*)''` and `(X^*X)''`.
    pub bicommutant_residual: f64,
}

fn spatial_operator(x: &Tro, alpha: &ComplexMatrix, beta: &ComplexMatrix) -> Result<ComplexMatrix> {
    operator_from_fn(x.carrier(), |y| &(alpha * y) + &(y * beta), 1e3 * x.tol().max(1e-12))
}

/// Least-norm skew `(alpha, beta)` realizing `d`.
pub fn spatial_decompose(x: &Tro, d: &ComplexMatrix, tol: f64) -> Result<SpatialWitness> {
    let (h, k) = (x.h(), x.k());
    let dm = x.dim();
    if d.shape() != (dm, dm) {
        return Err(Error::Dimension(format!(
            "operator of shape {:?} on a {dm}-dimensional TRO",
            d.shape()
        )));
    }
    if dm == 0 {
        return Ok(SpatialWitness {
            alpha: ComplexMatrix::zeros(h, h),
            beta: ComplexMatrix::zeros(k, k),
            residual: 0.0,
            skew_residual: 0.0,
            bicommutant_residual: 0.0,
        });
    }
    let btol = x.tol();
    let left = bicommutant(&x.left_block(), btol)?;
    let right = bicommutant(&x.right_block(), btol)?;
    let lskew = left.skew_basis();
    let rskew = right.skew_basis();
    let mut ops = Vec::with_capacity(lskew.dim() + rskew.dim());
    for a in lskew.basis() {
        ops.push(spatial_operator(x, a, &ComplexMatrix::zeros(k, k))?);
    }
    for b in rskew.basis() {
        ops.push(spatial_operator(x, &ComplexMatrix::zeros(h, h), b)?);
    }
    let (coeffs, _) = least_norm(&ops, d, Field::Real, 1e-12)?;
    let mut alpha = ComplexMatrix::zeros(h, h);
    let mut beta = ComplexMatrix::zeros(k, k);
    for (c, a) in coeffs.iter().zip(lskew.basis()) {
        alpha += &a.scale_real(c.re);
    }
    for (c, b) in coeffs[lskew.dim()..].iter().zip(rskew.basis()) {
        beta += &b.scale_real(c.re);
    }
    let skew_residual = (&alpha + &alpha.adjoint()).hs_norm() + (&beta + &beta.adjoint()).hs_norm();
    let residual = (&spatial_operator(x, &alpha, &beta)? - d).hs_norm();
    if residual > tol * d.hs_norm().max(1.0) {
        return Err(Error::stage("spatial decomposition", residual, tol));
    }
    let bicommutant_residual = left.carrier().residual(&alpha) + right.carrier().residual(&beta);
    Ok(SpatialWitness {
        alpha,
        beta,
        residual,
        skew_residual,
        bicommutant_residual,
    })
}

/// Pairs `(a_k, b_k)` with `sum delta(a_k, b_k) = (x -> alpha x + x beta)`.
///
/// Coefficients come from a certified least-norm real solve over the
/// generators `delta(u_i, u_j)`, `delta(i u_i, u_j)`.
pub fn inner_tro_to_triple(
    x: &Tro,
    alpha: &ComplexMatrix,
    beta: &ComplexMatrix,
    tol: f64,
) -> Result<Vec<(ComplexMatrix, ComplexMatrix)>> {
    let (h, k) = (x.h(), x.k());
    if alpha.shape() != (h, h) || beta.shape() != (k, k) {
        return Err(Error::Dimension(format!(
            "alpha {:?} and beta {:?} for a {h}x{k} TRO",
            alpha.shape(),
            beta.shape()
        )));
    }
    for (name, m, block) in [("alpha", alpha, x.left_block()), ("beta", beta, x.right_block())] {
        let res = block.residual(m);
        if res > tol * m.hs_norm().max(1.0) {
            return Err(Error::NotContained {
                what: name.into(),
                container: if name == "alpha" { "span XX*" } else { "span X*X" }.into(),
                residual: res,
            });
        }
        let skew = (m + &m.adjoint()).hs_norm();
        if skew > tol * m.hs_norm().max(1.0) {
            return Err(Error::Hypothesis(format!("{name} is not skew-hermitian ({skew:.3e})")));
        }
    }
    if alpha.hs_norm() == 0.0 && beta.hs_norm() == 0.0 {
        return Ok(Vec::new());
    }
    let target = spatial_operator(x, alpha, beta)?;
    let inner = inner_triple(x)?;
    let dom = x.carrier();
    let mut ops = Vec::with_capacity(inner.generators().len());
    for g in inner.generators() {
        if let Generator::Pair(a, b) = g {
            ops.push(operator_from_fn(dom, |y| triple_delta(a, b, y), f64::INFINITY)?);
        }
    }
    let (coeffs, _) = least_norm(&ops, &target, Field::Real, 1e-12)?;
    let pairs: Vec<(ComplexMatrix, ComplexMatrix)> = coeffs
        .iter()
        .zip(inner.generators())
        .filter(|(c, _)| c.re.abs() > 1e-14)
        .filter_map(|(c, g)| match g {
            Generator::Pair(a, b) => Some((a.scale_real(c.re), b.clone())),
            _ => None,
        })
        .collect();
    let rebuilt = payload_operator(&Source::Tro(x.clone()), &Payload::Pairs(pairs.clone()))?;
    let residual = (&rebuilt - &target).hs_norm();
    if residual > tol * target.hs_norm().max(1.0) {
        return Err(Error::stage("inner TRO to triple", residual, tol));
    }
    Ok(pairs)
}

/// `(alpha, beta)` of an inner triple derivation given by pairs.
#[derive(Clone, Debug)]
pub struct SpatialPair {
    pub alpha: ComplexMatrix,
    pub beta: ComplexMatrix,
    /// `|sum delta(a, b) - (x -> alpha x + x beta)|` on the TRO basis.
    pub residual: f64,
}

/// `alpha = sum (a b^* - b a^*) / 2`, `beta = sum (b^* a - a^* b) / 2`,
/// certified against `sum delta(a, b)` on `x`.
pub fn inner_triple_to_tro(x: &Tro, pairs: &[(ComplexMatrix, ComplexMatrix)]) -> Result<SpatialPair> {
    let (h, k) = (x.h(), x.k());
    let mut alpha = ComplexMatrix::zeros(h, h);
    let mut beta = ComplexMatrix::zeros(k, k);
    for (a, b) in pairs {
        if a.shape() != (h, k) || b.shape() != (h, k) {
            return Err(Error::Dimension(format!(
                "pair of shapes {:?}, {:?} for a {h}x{k} TRO",
                a.shape(),
                b.shape()
            )));
        }
        alpha += &(&(a * &b.adjoint()) - &(b * &a.adjoint()));
        beta += &(&(&b.adjoint() * a) - &(&a.adjoint() * b));
    }
    let alpha = alpha.scale_real(0.5);
    let beta = beta.scale_real(0.5);
    let source = Source::Tro(x.clone());
    let via_pairs = payload_operator(&source, &Payload::Pairs(pairs.to_vec()))?;
    let via_spatial = spatial_operator(x, &alpha, &beta)?;
    Ok(SpatialPair {
        residual: (&via_pairs - &via_spatial).hs_norm(),
        alpha,
        beta,
    })
}
