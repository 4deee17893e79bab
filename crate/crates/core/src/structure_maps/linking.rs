use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::derivation::{apply, leibniz_defect, star_defect, triple_defect};
use crate::error::{Error, Result};
use crate::linalg::{dense_kernel, least_norm, ComplexMatrix, Cutoff, Field, C64};
use crate::tro::{linking_algebra, LinkingAlgebra, Tro, TripleMode};

const SEED: u64 = 0x11_2a;

/// `delta_0` on the unitized linking algebra, with its certificates.
#[derive(Clone, Debug)]
pub struct LinkingExtension {
    pub linking: LinkingAlgebra,
    /// `delta_0` in linking-algebra coordinates.
    pub operator: ComplexMatrix,
    pub leibniz_defect: f64,
    pub star_defect: f64,
    /// `|corner(delta_0(x)) - D x|` over the basis of `X`.
    pub extension_defect: f64,
    /// Largest disagreement of the left and right blocks across alternative
    /// factorizations (including factorizations of zero).
    pub well_definedness: f64,
    pub factorizations_tried: usize,
    /// Sampled lower bound for `|D|` on `(X, operator norm)`.
    pub d_norm_lower: f64,
    /// `(|left block|, 2 |D| |sum x_i y_i^*|)` per tested element.
    pub norm_bounds: Vec<(f64, f64)>,
}

impl LinkingExtension {
    /// Every recorded norm pair satisfies the inequality.
    pub fn norm_bound_holds(&self) -> bool {
        self.norm_bounds.iter().all(|(l, r)| *l <= r * (1.0 + 1e-9) + 1e-12)
    }
}

/// Products `x_a y_b^*` (left) or `x_a^* y_b` (right), prefixed by the
/// block identity.
fn factor_generators(frame: &[ComplexMatrix], left: bool) -> Vec<ComplexMatrix> {
    let size = if left { frame[0].rows() } else { frame[0].cols() };
    let mut out = vec![ComplexMatrix::identity(size)];
    for a in frame {
        for b in frame {
            out.push(if left { a * &b.adjoint() } else { &a.adjoint() * b });
        }
    }
    out
}

/// `sum c_ab ((D x_a) x_b^* + x_a (D x_b)^*)` or the right-hand analog; the
/// identity coefficient contributes nothing.
fn block_value(frame: &[ComplexMatrix], images: &[ComplexMatrix], coeffs: &[C64], left: bool) -> ComplexMatrix {
    let n = frame.len();
    let size = if left { frame[0].rows() } else { frame[0].cols() };
    let mut out = ComplexMatrix::zeros(size, size);
    for a in 0..n {
        for b in 0..n {
            let c = coeffs[1 + a * n + b];
            if c.norm() == 0.0 {
                continue;
            }
            let term = if left {
                &(&images[a] * &frame[b].adjoint()) + &(&frame[a] * &images[b].adjoint())
            } else {
                &(&images[a].adjoint() * &frame[b]) + &(&frame[a].adjoint() * &images[b])
            };
            out += &term.scale(c);
        }
    }
    out
}

fn factor(gens: &[ComplexMatrix], target: &ComplexMatrix, tol: f64) -> Result<Vec<C64>> {
    let (c, res) = least_norm(gens, target, Field::Complex, 1e-12)?;
    if res > tol * target.hs_norm().max(1.0) {
        return Err(Error::NotContained {
            what: "diagonal block".into(),
            container: "span of products plus identity".into(),
            residual: res,
        });
    }
    Ok(c)
}

/// Extend a TRO-derivation `d` of `x` to a *-derivation of `A_X`.
pub fn extend_to_linking(x: &Tro, d: &ComplexMatrix) -> Result<LinkingExtension> {
    let tol = x.tol().max(1e-12);
    let dm = x.dim();
    if d.shape() != (dm, dm) {
        return Err(Error::Dimension(format!(
            "operator of shape {:?} on a {dm}-dimensional TRO",
            d.shape()
        )));
    }
    let defect = triple_defect(x, d, TripleMode::Tro);
    if defect > 1e3 * tol * d.hs_norm().max(1.0) {
        return Err(Error::Hypothesis(format!(
            "not a TRO-derivation (defect {defect:.3e})"
        )));
    }
    let link = linking_algebra(x, true, tol)?;
    let alg = link.algebra();
    let dom = x.carrier();
    let (h, k) = (x.h(), x.k());
    let n = h + k;
    let dx = |y: &ComplexMatrix| apply(dom, d, y);

    let frame: Vec<ComplexMatrix> = x.basis().to_vec();
    let images: Vec<ComplexMatrix> = frame.iter().map(|u| dx(u)).collect();
    let (lgens, rgens) = if dm == 0 {
        (vec![ComplexMatrix::identity(h)], vec![ComplexMatrix::identity(k)])
    } else {
        (factor_generators(&frame, true), factor_generators(&frame, false))
    };
    let block_tol = 1e3 * tol;
    let delta0 = |b: &ComplexMatrix| -> Result<ComplexMatrix> {
        let mut out = ComplexMatrix::zeros(n, n);
        if dm > 0 {
            let lc = factor(&lgens, &link.upper_left(b), block_tol)?;
            out.set_block(0, 0, &block_value(&frame, &images, &lc, true));
            let rc = factor(&rgens, &link.lower_right(b), block_tol)?;
            out.set_block(h, h, &block_value(&frame, &images, &rc, false));
            out.set_block(0, h, &dx(&link.corner_part(b)));
            out.set_block(h, 0, &dx(&link.lower_left(b).adjoint()).adjoint());
        }
        Ok(out)
    };
    let mut columns = Vec::with_capacity(alg.dim());
    for b in alg.basis() {
        columns.push(delta0(b)?);
    }
    let mut operator = ComplexMatrix::zeros(alg.dim(), alg.dim());
    for (m, col) in columns.iter().enumerate() {
        let c = alg.coords(col);
        let res = (col - &alg.element(&c)).hs_norm();
        if res > block_tol * col.hs_norm().max(1.0) {
            return Err(Error::Closure(format!(
                "delta_0 sends basis element {m} outside the linking algebra (residual {res:.3e})"
            )));
        }
        for (l, z) in c.into_iter().enumerate() {
            operator.set(l, m, z);
        }
    }

    let extension_defect = frame
        .iter()
        .zip(&images)
        .map(|(u, du)| {
            let img = apply(alg.carrier(), &operator, &link.embed(u));
            (&link.corner_part(&img) - du).hs_norm()
        })
        .fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut well: f64 = 0.0;
    let mut tried = 0;
    let d_norm_lower = if dm == 0 { 0.0 } else { norm_lower_bound(x, d, &mut rng) };
    let mut norm_bounds = Vec::new();
    if dm > 0 {
        for _ in 0..3 {
            tried += 1;
            let r = random_invertible(dm, &mut rng);
            let alt: Vec<ComplexMatrix> = (0..dm)
                .map(|a| {
                    let mut v = ComplexMatrix::zeros(h, k);
                    for (c, u) in (0..dm).map(|b| r.get(a, b)).zip(&frame) {
                        v += &u.scale(c);
                    }
                    v
                })
                .collect();
            let alt_images: Vec<ComplexMatrix> = alt.iter().map(|v| dx(v)).collect();
            for left in [true, false] {
                let gens = factor_generators(&alt, left);
                let null = product_null_space(&gens)?;
                for (b, col) in alg.basis().iter().zip(&columns) {
                    let (block, want) = if left {
                        (link.upper_left(b), col.block(0, 0, h, h))
                    } else {
                        (link.lower_right(b), col.block(h, h, k, k))
                    };
                    let mut c = factor(&gens, &block, block_tol)?;
                    // perturb by a random factorization of zero
                    for v in &null {
                        let w = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                        for (ci, vi) in c.iter_mut().zip(v.iter()) {
                            *ci += w * vi;
                        }
                    }
                    let got = block_value(&alt, &alt_images, &c, left);
                    well = well.max((&got - &want).hs_norm());
                }
                for v in &null {
                    let zero_value = block_value(&alt, &alt_images, v.as_slice(), left);
                    well = well.max(zero_value.hs_norm());
                }
            }
            // norm inequality on a random element sum x_i y_i^* of XX^*
            let mut coeffs = vec![C64::new(0.0, 0.0); 1 + dm * dm];
            for c in coeffs.iter_mut().skip(1) {
                *c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            let gens = factor_generators(&alt, true);
            let mut s = ComplexMatrix::zeros(h, h);
            for (c, g) in coeffs.iter().zip(&gens) {
                s += &g.scale(*c);
            }
            let lhs = block_value(&alt, &alt_images, &coeffs, true).op_norm();
            norm_bounds.push((lhs, 2.0 * d_norm_lower * s.op_norm()));
        }
        let products = &lgens[1..];
        for b in alg.basis() {
            let s = link.upper_left(b);
            let (c, res) = least_norm(products, &s, Field::Complex, 1e-12)?;
            if s.hs_norm() < 1e-12 || res > block_tol * s.hs_norm() {
                continue;
            }
            let mut coeffs = vec![C64::new(0.0, 0.0)];
            coeffs.extend(c);
            let lhs = block_value(&frame, &images, &coeffs, true).op_norm();
            norm_bounds.push((lhs, 2.0 * d_norm_lower * s.op_norm()));
        }
    }

    Ok(LinkingExtension {
        leibniz_defect: leibniz_defect(alg, &operator),
        star_defect: star_defect(alg.carrier(), &operator),
        extension_defect,
        well_definedness: well,
        factorizations_tried: tried,
        d_norm_lower,
        norm_bounds,
        operator,
        linking: link,
    })
}

fn random_invertible(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    loop {
        let m = ComplexMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let svd = nalgebra::SVD::new(m.as_dmatrix().clone(), false, false);
        let s = &svd.singular_values;
        if s.min() > 0.05 * s.max() {
            return m;
        }
    }
}

/// Coefficient vectors `c` with `sum c_g g = 0`.
fn product_null_space(gens: &[ComplexMatrix]) -> Result<Vec<nalgebra::DVector<C64>>> {
    let len = gens[0].rows() * gens[0].cols();
    let vecs: Vec<Vec<C64>> = gens.iter().map(|g| g.to_vec()).collect();
    let m = nalgebra::DMatrix::from_fn(len, gens.len(), |r, c| vecs[c][r]);
    Ok(dense_kernel(&m, Cutoff::Relative(1e-10))?.vectors)
}

/// `max |D x| / |x|` (operator norms) over basis elements, random samples
/// and a random local search from the best sample.
fn norm_lower_bound(x: &Tro, d: &ComplexMatrix, rng: &mut ChaCha8Rng) -> f64 {
    let dom = x.carrier();
    let dm = x.dim();
    let ratio = |c: &[C64]| -> f64 {
        let y = dom.combine(c);
        let n = y.op_norm();
        if n == 0.0 {
            0.0
        } else {
            apply(dom, d, &y).op_norm() / n
        }
    };
    let mut best_c: Vec<C64> = vec![C64::new(0.0, 0.0); dm];
    let mut best = 0.0;
    let consider = |c: Vec<C64>, best: &mut f64, best_c: &mut Vec<C64>| {
        let r = ratio(&c);
        if r > *best {
            *best = r;
            *best_c = c;
        }
    };
    for i in 0..dm {
        let mut c = vec![C64::new(0.0, 0.0); dm];
        c[i] = C64::new(1.0, 0.0);
        consider(c, &mut best, &mut best_c);
    }
    for _ in 0..64 {
        let c = (0..dm)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        consider(c, &mut best, &mut best_c);
    }
    let mut step = 0.5;
    for _ in 0..200 {
        let c: Vec<C64> = best_c
            .iter()
            .map(|z| z + C64::new(rng.gen_range(-step..step), rng.gen_range(-step..step)))
            .collect();
        let r = ratio(&c);
        if r > best {
            best = r;
            best_c = c;
        } else {
            step *= 0.98;
        }
    }
    best
}
