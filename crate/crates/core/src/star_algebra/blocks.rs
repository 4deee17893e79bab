use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{cluster_sorted, hermitian_eigen, ComplexMatrix, Field, SpanBuilder, C64};

use super::{center, hermitian_part_of, StarAlgebra};

const SEED: u64 = 0x7e0_1ab;

/// One simple summand `M_size (x) 1_multiplicity` of a semisimple algebra.
#[derive(Clone, Debug)]
pub struct SimpleBlock {
    pub size: usize,
    pub multiplicity: usize,
    /// Minimal central projection of the block.
    pub central_projection: ComplexMatrix,
    /// Isometry `W` (n x size*multiplicity) with `W^* x W = x_k (x) 1` for
    /// every `x` in the block, columns ordered matrix-index major.
    pub isometry: ComplexMatrix,
}

impl SimpleBlock {
    /// The `size x size` matrix representing `x` in this block.
    pub fn compress(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let r = self.multiplicity;
        let full = &(&self.isometry.adjoint() * x) * &self.isometry;
        ComplexMatrix::from_fn(self.size, self.size, |i, j| full.get(i * r, j * r))
    }

    /// Embed `y` (size x size) back into the ambient algebra.
    pub fn expand(&self, y: &ComplexMatrix) -> ComplexMatrix {
        let amp = ComplexMatrix::kron(y, &ComplexMatrix::identity(self.multiplicity));
        &(&self.isometry * &amp) * &self.isometry.adjoint()
    }
}

/// Central decomposition `A = sum_k W_k (M_{n_k} (x) 1_{r_k}) W_k^*`.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub blocks: Vec<SimpleBlock>,
}

impl BlockDecomposition {
    /// Decompose a unital *-algebra into simple blocks.
    ///
    /// Minimal central projections come from the spectral projections of a
    /// generic Hermitian central element; inside each block a generic
    /// Hermitian element yields minimal projections, and matrix units are
    /// read off from the one-dimensional corners `E_t A E_1`. Every basis
    /// element is reconstructed from its block components as certification.
    pub fn new(a: &StarAlgebra, tol: f64) -> Result<Self> {
        let unit = a
            .unit()
            .ok_or_else(|| Error::NotSemisimple("algebra has no unit".into()))?;
        let n = a.n();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);

        let (uvals, uvecs) = hermitian_eigen(&unit);
        let range: Vec<usize> = (0..n).filter(|&k| uvals[k] > 0.5).collect();
        let v = columns(&uvecs, &range);

        let z = center(a);
        let zh = hermitian_part_of(&z, tol);
        let generic = random_combination(zh.basis(), n, &mut rng);
        let (cvals, cvecs) = hermitian_eigen(&(&(&v.adjoint() * &generic) * &v));
        let scale = cvals.iter().map(|x| x.abs()).fold(1e-300, f64::max);
        let clusters = cluster_sorted(&cvals, 1e-6 * scale);
        if clusters.len() != z.dim() {
            return Err(Error::NotSemisimple(format!(
                "center has dimension {} but a generic central element has {} eigenvalues",
                z.dim(),
                clusters.len()
            )));
        }

        let mut blocks = Vec::with_capacity(clusters.len());
        for cl in clusters {
            let q = &v * &columns(&cvecs, &cl.collect::<Vec<_>>());
            let proj = &q * &q.adjoint();
            if !z.contains(&proj, 1e3 * tol) {
                return Err(Error::NotSemisimple("spectral projection is not central".into()));
            }
            blocks.push(simple_block(a, &q, proj, tol, &mut rng)?);
        }
        let dec = Self { blocks };
        let worst = a
            .basis()
            .iter()
            .map(|b| (b - &dec.reconstruct(b)).hs_norm())
            .fold(0.0, f64::max);
        if worst > 1e3 * tol {
            return Err(Error::NotSemisimple(format!(
                "block reconstruction residual {worst:.3e}"
            )));
        }
        Ok(dec)
    }

    /// `sum_k expand_k(compress_k(x))`.
    pub fn reconstruct(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(x.rows(), x.cols());
        for b in &self.blocks {
            out += &b.expand(&b.compress(x));
        }
        out
    }

    /// Traces of the block components of `x`.
    pub fn block_traces(&self, x: &ComplexMatrix) -> Vec<C64> {
        self.blocks.iter().map(|b| b.compress(x).trace()).collect()
    }
}

fn simple_block(
    a: &StarAlgebra,
    q: &ComplexMatrix,
    proj: ComplexMatrix,
    tol: f64,
    rng: &mut ChaCha8Rng,
) -> Result<SimpleBlock> {
    let n = a.n();
    let rank = q.cols();
    let mut span = SpanBuilder::new(n, n, Field::Complex, tol);
    for b in a.basis() {
        span.push(&(&proj * b));
    }
    let block_alg = span.finish();
    let dim = block_alg.dim();
    let size = (dim as f64).sqrt().round() as usize;
    if size * size != dim || size == 0 || rank % size != 0 {
        return Err(Error::NotSemisimple(format!(
            "block of dimension {dim} on a rank-{rank} central projection is not a full matrix algebra"
        )));
    }
    let mult = rank / size;

    let herm = hermitian_part_of(&block_alg, tol);
    let generic = random_combination(herm.basis(), n, rng);
    let (vals, vecs) = hermitian_eigen(&(&(&q.adjoint() * &generic) * q));
    let scale = vals.iter().map(|x| x.abs()).fold(1e-300, f64::max);
    let clusters = cluster_sorted(&vals, 1e-6 * scale);
    if clusters.len() != size || clusters.iter().any(|c| c.len() != mult) {
        return Err(Error::NotSemisimple(format!(
            "expected {size} minimal projections of rank {mult}, found spectrum clusters {:?}",
            clusters.iter().map(|c| c.len()).collect::<Vec<_>>()
        )));
    }
    let frames: Vec<ComplexMatrix> = clusters
        .iter()
        .map(|c| q * &columns(&vecs, &c.clone().collect::<Vec<_>>()))
        .collect();
    let e1 = &frames[0] * &frames[0].adjoint();

    let mut iso = ComplexMatrix::zeros(n, rank);
    iso.set_block(0, 0, &frames[0]);
    for (t, frame) in frames.iter().enumerate().skip(1) {
        let et = frame * &frame.adjoint();
        let y = block_alg
            .basis()
            .iter()
            .map(|b| &(&et * b) * &e1)
            .max_by(|x, y| x.hs_norm().total_cmp(&y.hs_norm()))
            .expect("block algebra is nonempty");
        let lambda = (&y.adjoint() * &y).trace().re / mult as f64;
        if lambda <= tol {
            return Err(Error::NotSemisimple("minimal projections are not equivalent".into()));
        }
        let unit = y.scale_real(1.0 / lambda.sqrt());
        iso.set_block(0, t * mult, &(&unit * &frames[0]));
    }
    // reorder columns (t, s) -> t * mult + s is already matrix-index major
    Ok(SimpleBlock {
        size,
        multiplicity: mult,
        central_projection: proj,
        isometry: iso,
    })
}

fn columns(m: &ComplexMatrix, idx: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.rows(), idx.len(), |i, j| m.get(i, idx[j]))
}

fn random_combination(basis: &[ComplexMatrix], n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(n, n);
    for b in basis {
        let w: f64 = rng.gen_range(-1.0..1.0);
        out += &b.scale_real(w);
    }
    out
}
