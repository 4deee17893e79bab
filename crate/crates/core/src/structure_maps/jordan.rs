use crate::derivation::{
    apply, leibniz_defect, operator_from_fn, payload_operator, star_defect, triple_defect,
    triple_delta, Payload, Source,
};
use crate::error::{Error, Result};
use crate::linalg::{least_norm, ComplexMatrix, Field};
use crate::star_algebra::{center, commutator_decompose, split_self_adjoint, StarAlgebra};
use crate::tro::{Tro, TripleMode};

/// `delta = delta1 + delta0` with `delta1(x) = delta(1) o x`.
#[derive(Clone, Debug)]
pub struct JordanSplit {
    /// `delta(1)`, skew-hermitian.
    pub delta_one: ComplexMatrix,
    pub delta1: ComplexMatrix,
    pub delta0: ComplexMatrix,
    /// Fitted `c` in `delta1 = c delta(delta(1), 1)`; `None` when `delta(1) = 0`.
    pub scalar: Option<f64>,
    pub fit_residual: f64,
    /// `|delta0(1)|`.
    pub delta0_at_one: f64,
}

fn as_tro(m: &StarAlgebra) -> Result<Tro> {
    Tro::from_subspace(m.carrier().clone(), m.tol())
}

fn unit_of(m: &StarAlgebra) -> Result<ComplexMatrix> {
    m.unit()
        .ok_or_else(|| Error::Hypothesis("the algebra has no unit".into()))
}

/// Split a triple derivation of a unital algebra at `delta(1)`.
pub fn jordan_split(m: &StarAlgebra, delta: &ComplexMatrix) -> Result<JordanSplit> {
    let tol = m.tol().max(1e-12);
    let one = unit_of(m)?;
    let dom = m.carrier();
    let scale = delta.hs_norm().max(1.0);
    let x = as_tro(m)?;
    let defect = triple_defect(&x, delta, TripleMode::Jordan);
    if defect > 1e3 * tol * scale {
        return Err(Error::Hypothesis(format!("not a triple derivation (defect {defect:.3e})")));
    }
    let s = apply(dom, delta, &one);
    let skew = (&s + &s.adjoint()).hs_norm();
    if skew > 1e3 * tol * scale {
        return Err(Error::Hypothesis(format!("delta(1) is not skew-hermitian ({skew:.3e})")));
    }
    let ltol = 1e3 * tol;
    let delta1 = operator_from_fn(dom, |y| ComplexMatrix::jordan(&s, y), ltol)?;
    let g = operator_from_fn(dom, |y| triple_delta(&s, &one, y), ltol)?;
    let gg = g.hs_norm();
    let (scalar, fit_residual) = if gg <= 1e-12 * scale {
        (None, delta1.hs_norm())
    } else {
        let c = crate::linalg::hs_inner(&delta1, &g)?.re / (gg * gg);
        (Some(c), (&delta1 - &g.scale_real(c)).hs_norm())
    };
    if fit_residual > tol * scale {
        return Err(Error::stage("Jordan split scalar fit", fit_residual, tol));
    }
    let delta0 = delta - &delta1;
    let delta0_at_one = apply(dom, &delta0, &one).hs_norm();
    Ok(JordanSplit {
        delta_one: s,
        delta1,
        delta0,
        scalar,
        fit_residual,
        delta0_at_one,
    })
}

/// Pairs realizing a triple derivation of a finite-dimensional von Neumann
/// algebra as `sum delta(a_k, b_k)`, with per-stage residuals.
#[derive(Clone, Debug)]
pub struct VnWitness {
    pub pairs: Vec<(ComplexMatrix, ComplexMatrix)>,
    pub split: JordanSplit,
    /// Skew generator `a` with `delta0 = ad a`.
    pub generator: ComplexMatrix,
    pub commutator_pairs: usize,
    pub stages: Vec<(String, f64)>,
    pub residual: f64,
}

pub fn innerness_witness_vn(m: &StarAlgebra, delta: &ComplexMatrix) -> Result<VnWitness> {
    let tol = m.tol().max(1e-12);
    let scale = delta.hs_norm().max(1.0);
    let one = unit_of(m)?;
    let dom = m.carrier();
    let mut stages = Vec::new();
    let check = |stage: &str, res: f64, stages: &mut Vec<(String, f64)>| -> Result<()> {
        stages.push((stage.to_string(), res));
        if res > 1e3 * tol * scale {
            Err(Error::stage(stage, res, tol))
        } else {
            Ok(())
        }
    };

    let split = jordan_split(m, delta)?;
    check("jordan split", split.fit_residual.max(split.delta0_at_one), &mut stages)?;
    let d0 = &split.delta0;
    check("associative derivation", leibniz_defect(m, d0), &mut stages)?;
    check("self-adjoint", star_defect(dom, d0), &mut stages)?;

    let ltol = 1e3 * tol;
    let ads = m
        .basis()
        .iter()
        .map(|e| operator_from_fn(dom, |y| ComplexMatrix::commutator(e, y), ltol))
        .collect::<Result<Vec<_>>>()?;
    let (coeffs, res) = least_norm(&ads, d0, Field::Complex, 1e-12)?;
    check("ad generator", res, &mut stages)?;
    let mut a = m.element(&coeffs);
    let z = &a + &a.adjoint();
    check("central real part", center(m).residual(&z), &mut stages)?;
    a -= &z.scale_real(0.5);

    let cd = commutator_decompose(&a, m, tol.max(1e-10))?;
    check("commutator decomposition", cd.residual, &mut stages)?;
    let mut pairs = Vec::new();
    for (u, v) in &cd.pairs {
        let (b, c) = split_self_adjoint(u)?;
        let (b2, c2) = split_self_adjoint(v)?;
        pairs.push((b, b2.scale_real(2.0)));
        pairs.push((c.scale_real(-1.0), c2.scale_real(2.0)));
    }
    if let Some(c) = split.scalar {
        pairs.push((split.delta_one.scale_real(c), one.clone()));
    }
    pairs.retain(|(p, q)| p.hs_norm() > 1e-14 && q.hs_norm() > 1e-14);

    let source = Source::Tro(as_tro(m)?);
    let rebuilt = payload_operator(&source, &Payload::Pairs(pairs.clone()))?;
    let residual = (&rebuilt - delta).hs_norm();
    check("reconstruction", residual, &mut stages)?;
    if residual > tol * scale {
        return Err(Error::stage("reconstruction", residual, tol));
    }
    Ok(VnWitness {
        pairs,
        split,
        generator: a,
        commutator_pairs: cd.pairs.len(),
        stages,
        residual,
    })
}
