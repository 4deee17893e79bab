use crate::derivation::{apply, inner_tro, is_inner, operator_from_fn, triple_defect, Innerness, Payload};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::tro::{Tro, TripleMode};

/// Restriction of one derivation of a direct sum to its summands.
#[derive(Clone, Debug)]
pub struct FiberReport {
    /// Restricted operators in summand coordinates.
    pub restrictions: Vec<ComplexMatrix>,
    /// Largest part of `d(summand)` outside the summand.
    pub invariance_residual: f64,
    /// Largest TRO-derivation defect of a restriction.
    pub restriction_defect: f64,
    pub inner_on_sum: bool,
    /// Blockwise spatial witnesses `(alpha_k, beta_k)` when `d` is inner.
    pub summand_witnesses: Vec<(ComplexMatrix, ComplexMatrix)>,
    /// Largest `|restriction - (x -> alpha_k x + x beta_k)|`.
    pub witness_residual: f64,
    /// Whether each restriction is accepted by the summand's inner space.
    pub summands_inner: Vec<bool>,
    /// HS norm of the off-block-diagonal parts of the witness on the sum.
    pub off_block_norm: f64,
}

fn off_block(m: &ComplexMatrix, cuts: &[(usize, usize)]) -> f64 {
    let mut kept = ComplexMatrix::zeros(m.rows(), m.cols());
    for &(off, len) in cuts {
        kept.set_block(off, off, &m.block(off, off, len, len));
    }
    (m - &kept).hs_norm()
}

pub fn fiber_restrict(v: &Tro, d: &ComplexMatrix, tol: f64) -> Result<FiberReport> {
    let summands = v.summands();
    if summands.is_empty() {
        return Err(Error::Hypothesis("not built as a direct sum".into()));
    }
    let (h, k) = (v.h(), v.k());
    let dom = v.carrier();
    let ltol = 1e3 * tol.max(1e-12);
    let mut restrictions = Vec::with_capacity(summands.len());
    let mut invariance_residual: f64 = 0.0;
    let mut restriction_defect: f64 = 0.0;
    for s in summands {
        for y in s.part.basis() {
            let img = apply(dom, d, &s.embed(y, h, k));
            let inside = s.embed(&s.extract(&img), h, k);
            invariance_residual = invariance_residual.max((&img - &inside).hs_norm());
        }
        let op = operator_from_fn(s.part.carrier(), |y| s.extract(&apply(dom, d, &s.embed(y, h, k))), ltol);
        let op = op?;
        restriction_defect = restriction_defect.max(triple_defect(&s.part, &op, TripleMode::Tro));
        restrictions.push(op);
    }

    let mut summands_inner = Vec::with_capacity(summands.len());
    for (s, op) in summands.iter().zip(&restrictions) {
        summands_inner.push(is_inner(op, &inner_tro(&s.part)?, tol)?.is_inner());
    }

    let mut summand_witnesses = Vec::new();
    let mut witness_residual: f64 = 0.0;
    let mut off_block_norm = 0.0;
    let inner_on_sum = match is_inner(d, &inner_tro(v)?, tol)? {
        Innerness::Inner(w) => {
            let Payload::Spatial { alpha, beta } = w.payload else {
                return Err(Error::Instability("unexpected payload kind".into()));
            };
            let rows: Vec<(usize, usize)> = summands.iter().map(|s| (s.row_offset, s.part.h())).collect();
            let cols: Vec<(usize, usize)> = summands.iter().map(|s| (s.col_offset, s.part.k())).collect();
            off_block_norm = off_block(&alpha, &rows) + off_block(&beta, &cols);
            for (s, op) in summands.iter().zip(&restrictions) {
                let a = alpha.block(s.row_offset, s.row_offset, s.part.h(), s.part.h());
                let b = beta.block(s.col_offset, s.col_offset, s.part.k(), s.part.k());
                let w = operator_from_fn(s.part.carrier(), |y| &(&a * y) + &(y * &b), ltol)?;
                witness_residual = witness_residual.max((&w - op).hs_norm());
                summand_witnesses.push((a, b));
            }
            true
        }
        Innerness::Outer { .. } => false,
    };

    Ok(FiberReport {
        restrictions,
        invariance_residual,
        restriction_defect,
        inner_on_sum,
        summand_witnesses,
        witness_residual,
        summands_inner,
        off_block_norm,
    })
}
