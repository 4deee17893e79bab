//! Seeded random instances for tests and corpora.

use rand::Rng;

use crate::error::Result;
use crate::linalg::{ComplexMatrix, C64};
use crate::star_algebra::{make_star_algebra, Projection, StarAlgebra};
use crate::tro::{direct_sum, make_tro, Tro};

/// Entries with independent standard-ish real and imaginary parts in [-1, 1].
pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Unitary from the QR factorization of a random matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n, n).into_dmatrix();
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // fix the phases so the distribution does not depend on QR sign choices
    let phases = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j && r[(i, i)].norm() > 0.0 {
            r[(i, i)] / r[(i, i)].norm()
        } else if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    &ComplexMatrix::from_dmatrix(q) * &phases
}

/// Shape of a block algebra: `(block size, multiplicity)` pairs.
pub type BlockShape = Vec<(usize, usize)>;

/// A *-algebra `U (sum M_s (x) I_m) U^*` with a projection and an idempotent.
#[derive(Clone, Debug)]
pub struct AlgebraInstance {
    pub shape: BlockShape,
    pub algebra: StarAlgebra,
    pub projection: Projection,
    pub idempotent: Projection,
}

/// Random block shape with `sum s * m <= n_max`, at least one block.
pub fn random_block_shape<R: Rng>(rng: &mut R, n_max: usize) -> BlockShape {
    let mut left = n_max.max(1);
    let mut shape = Vec::new();
    loop {
        let s = rng.gen_range(1..=left.min(3));
        let m = if s * 2 <= left && rng.gen_bool(0.2) { 2 } else { 1 };
        shape.push((s, m));
        left -= s * m;
        if left == 0 || shape.len() == 3 || rng.gen_bool(0.4) {
            break;
        }
    }
    shape
}

fn block_generators(shape: &[(usize, usize)], u: &ComplexMatrix) -> Vec<ComplexMatrix> {
    let n: usize = shape.iter().map(|(s, m)| s * m).sum();
    let mut gens = Vec::new();
    let mut off = 0;
    for &(s, m) in shape {
        for i in 0..s {
            for j in 0..s {
                let mut g = ComplexMatrix::zeros(n, n);
                let unit = ComplexMatrix::unit(s, s, i, j);
                g.set_block(off, off, &ComplexMatrix::kron(&unit, &ComplexMatrix::identity(m)));
                gens.push(u * &(&g * &u.adjoint()));
            }
        }
        off += s * m;
    }
    gens
}

/// Random block algebra on at most `n_max` dimensions with a random
/// projection `p` and the idempotent `p + p y (1 - p)` for a random `y`.
pub fn random_algebra<R: Rng>(rng: &mut R, n_max: usize, tol: f64) -> Result<AlgebraInstance> {
    let shape = random_block_shape(rng, n_max);
    block_algebra(rng, &shape, tol)
}

/// As [`random_algebra`] with a fixed block shape.
pub fn block_algebra<R: Rng>(rng: &mut R, shape: &[(usize, usize)], tol: f64) -> Result<AlgebraInstance> {
    let n: usize = shape.iter().map(|(s, m)| s * m).sum();
    let u = random_unitary(rng, n);
    let algebra = make_star_algebra(&block_generators(shape, &u), tol)?;

    let mut p = ComplexMatrix::zeros(n, n);
    let mut off = 0;
    for &(s, m) in shape {
        let r = rng.gen_range(0..=s);
        let w = random_unitary(rng, s);
        let mut q = ComplexMatrix::zeros(s, s);
        for i in 0..r {
            q.set(i, i, C64::new(1.0, 0.0));
        }
        let q = &w * &(&q * &w.adjoint());
        p.set_block(off, off, &ComplexMatrix::kron(&q, &ComplexMatrix::identity(m)));
        off += s * m;
    }
    let p = &u * &(&p * &u.adjoint());
    let p = p.hermitian_part();
    let projection = Projection::new(&p, &algebra, 1e3 * tol)?;

    let coeffs: Vec<C64> = (0..algebra.dim())
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let y = algebra.element(&coeffs);
    let q = &ComplexMatrix::identity(n) - &p;
    let e = &p + &(&p * &(&y * &q));
    let idempotent = Projection::idempotent(&e, &algebra, 1e3 * tol)?;
    Ok(AlgebraInstance {
        shape: shape.to_vec(),
        algebra,
        projection,
        idempotent,
    })
}

/// `U (sum B(C^k_i, C^h_i)) V` with `sum h_i <= h_max`, `sum k_i <= k_max`.
pub fn random_tro<R: Rng>(rng: &mut R, h_max: usize, k_max: usize, tol: f64) -> Result<Tro> {
    let (mut hl, mut kl) = (h_max.max(1), k_max.max(1));
    let mut parts = Vec::new();
    loop {
        let h = rng.gen_range(1..=hl);
        let k = rng.gen_range(1..=kl);
        parts.push((h, k));
        hl -= h;
        kl -= k;
        if hl == 0 || kl == 0 || rng.gen_bool(0.5) {
            break;
        }
    }
    rotated_sum(rng, &parts, tol)
}

/// Full `B(C^k, C^h)` as an `h x k` TRO.
pub fn full_tro(h: usize, k: usize, tol: f64) -> Result<Tro> {
    let gens: Vec<_> = (0..h)
        .flat_map(|i| (0..k).map(move |j| ComplexMatrix::unit(h, k, i, j)))
        .collect();
    make_tro(&gens, tol)
}

/// Direct sum of full rectangular blocks, rotated on both sides.
pub fn rotated_sum<R: Rng>(rng: &mut R, parts: &[(usize, usize)], tol: f64) -> Result<Tro> {
    let h: usize = parts.iter().map(|p| p.0).sum();
    let k: usize = parts.iter().map(|p| p.1).sum();
    let blocks = parts
        .iter()
        .map(|&(a, b)| full_tro(a, b, tol))
        .collect::<Result<Vec<_>>>()?;
    let sum = direct_sum(&blocks)?;
    let u = random_unitary(rng, h);
    let v = random_unitary(rng, k);
    let gens: Vec<_> = sum.basis().iter().map(|x| &u * &(x * &v)).collect();
    make_tro(&gens, tol)
}

/// A random real combination of a real basis.
pub fn random_real_combination<R: Rng>(rng: &mut R, basis: &[ComplexMatrix], rows: usize, cols: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(rows, cols);
    for b in basis {
        out += &b.scale_real(rng.gen_range(-1.0..1.0));
    }
    out
}
