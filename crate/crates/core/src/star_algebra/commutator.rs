use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ONE, ZERO};

use super::{BlockDecomposition, StarAlgebra};

/// `a = central + sum_j [u_j, v_j]`.
#[derive(Clone, Debug)]
pub struct CommutatorDecomposition {
    pub central: ComplexMatrix,
    pub pairs: Vec<(ComplexMatrix, ComplexMatrix)>,
    pub residual: f64,
}

/// Write `a_in` in `Z(M) + [M, M]` with one commutator per central block.
///
/// The central part is the normalized block trace; the traceless remainder
/// of each block is made zero-diagonal by a similarity `S` and then written
/// as `[D, V]` with `D = diag(1, .., n)`.
pub fn commutator_decompose(
    a_in: &ComplexMatrix,
    m: &StarAlgebra,
    tol: f64,
) -> Result<CommutatorDecomposition> {
    if !m.contains(a_in, tol) {
        return Err(Error::NotContained {
            what: "element".into(),
            container: "the algebra".into(),
            residual: m.carrier().residual(a_in),
        });
    }
    let dec = BlockDecomposition::new(m, tol)?;
    let n = m.n();
    let mut central = ComplexMatrix::zeros(n, n);
    let mut pairs = Vec::new();
    for block in &dec.blocks {
        let ak = block.compress(a_in);
        let size = block.size;
        let tau = ak.trace() / size as f64;
        central += &block.expand(&ComplexMatrix::identity(size).scale(tau));
        let r = &ak - &ComplexMatrix::identity(size).scale(tau);
        if r.hs_norm() <= tol * ak.hs_norm().max(1.0) {
            continue;
        }
        let (u, v) = single_commutator(&r, tol)?;
        pairs.push((block.expand(&u), block.expand(&v)));
    }
    let mut rebuilt = central.clone();
    for (u, v) in &pairs {
        rebuilt += &ComplexMatrix::commutator(u, v);
    }
    let residual = (a_in - &rebuilt).hs_norm();
    if residual > tol * a_in.hs_norm().max(1.0) {
        return Err(Error::stage("commutator decomposition", residual, tol));
    }
    Ok(CommutatorDecomposition {
        central,
        pairs,
        residual,
    })
}

/// A traceless square matrix as a single commutator `[u, v]`.
pub fn single_commutator(r: &ComplexMatrix, tol: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = r.rows();
    let scale = r.hs_norm().max(1.0);
    if r.trace().norm() > tol * scale {
        return Err(Error::Hypothesis(format!(
            "matrix has trace {:.3e}, a commutator must be traceless",
            r.trace().norm()
        )));
    }
    let s = zero_diagonal_similarity(r, tol)?;
    let s_inv = s
        .as_dmatrix()
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Instability("zero-diagonal similarity is singular".into()))?;
    let s_inv = ComplexMatrix::from_dmatrix(s_inv);
    let rt = &(&s_inv * r) * &s;
    let d = ComplexMatrix::from_diagonal(&(1..=n).map(|k| C64::new(k as f64, 0.0)).collect::<Vec<_>>());
    let v = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            ZERO
        } else {
            rt.get(i, j) / (i as f64 - j as f64)
        }
    });
    let u = &(&s * &d) * &s_inv;
    let v = &(&s * &v) * &s_inv;
    let residual = (&ComplexMatrix::commutator(&u, &v) - r).hs_norm();
    if residual > tol * scale {
        return Err(Error::stage("single commutator", residual, tol));
    }
    Ok((u, v))
}

/// Invertible `S` such that `S^-1 r S` has zero diagonal (`r` traceless).
///
/// Pick a column `k` whose off-diagonal part is largest; in the basis
/// `(e_k, r e_k / |r e_k|, remaining units)` the first diagonal entry
/// vanishes. Recurse on the trailing block. A diagonal `r` is first rotated
/// in the plane of two distinct diagonal entries.
pub fn zero_diagonal_similarity(r: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let n = r.rows();
    let scale = r.hs_norm().max(1.0);
    let max_diag = (0..n).map(|i| r.get(i, i).norm()).fold(0.0, f64::max);
    if n <= 1 || max_diag <= tol * scale * 1e-3 {
        return Ok(ComplexMatrix::identity(n));
    }
    let off = |k: usize| -> f64 {
        (0..n)
            .filter(|&i| i != k)
            .map(|i| r.get(i, k).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let k = (0..n)
        .max_by(|&a, &b| off(a).total_cmp(&off(b)))
        .expect("n > 1");
    if off(k) <= 1e-8 * scale {
        // diagonal: rotate two coordinates with different diagonal entries
        let (mut bi, mut bj, mut best) = (0, 1, -1.0);
        for i in 0..n {
            for j in i + 1..n {
                let g = (r.get(i, i) - r.get(j, j)).norm();
                if g > best {
                    best = g;
                    bi = i;
                    bj = j;
                }
            }
        }
        let h = 1.0 / 2f64.sqrt();
        let mut rot = ComplexMatrix::identity(n);
        rot.set(bi, bi, C64::new(h, 0.0));
        rot.set(bi, bj, C64::new(-h, 0.0));
        rot.set(bj, bi, C64::new(h, 0.0));
        rot.set(bj, bj, C64::new(h, 0.0));
        let rotated = &(&rot.adjoint() * r) * &rot;
        let inner = zero_diagonal_similarity(&rotated, tol)?;
        return Ok(&rot * &inner);
    }
    let m = (0..n)
        .filter(|&i| i != k)
        .max_by(|&a, &b| r.get(a, k).norm().total_cmp(&r.get(b, k).norm()))
        .expect("n > 1");
    let col: Vec<C64> = (0..n).map(|i| r.get(i, k)).collect();
    let rho = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut s1 = ComplexMatrix::zeros(n, n);
    s1.set(k, 0, ONE);
    for (i, z) in col.iter().enumerate() {
        s1.set(i, 1, z / rho);
    }
    let mut c = 2;
    for j in 0..n {
        if j != k && j != m {
            s1.set(j, c, ONE);
            c += 1;
        }
    }
    let s1_inv = invert(&s1)?;
    let r1 = &(&s1_inv * r) * &s1;
    let trailing = r1.block(1, 1, n - 1, n - 1);
    let inner = zero_diagonal_similarity(&trailing, tol)?;
    let mut lift = ComplexMatrix::identity(n);
    lift.set_block(1, 1, &inner);
    Ok(&s1 * &lift)
}

fn invert(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let inv: Option<DMatrix<C64>> = m.as_dmatrix().clone().try_inverse();
    inv.map(ComplexMatrix::from_dmatrix)
        .ok_or_else(|| Error::Instability("similarity is singular".into()))
}
