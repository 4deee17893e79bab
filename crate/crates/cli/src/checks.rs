//! Certification pipelines behind `derivations` and `check --theorem`.

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use trolab_core::derivation::{
    apply, derivation_space, inner_assoc, inner_tro, inner_triple, is_inner,
    p_derivation_space_within, p_generator_realization, s_derivation_space_within, star_within,
    triple_derivation_space, tro_derivation_space, DerivationSpace, Innerness, Payload,
};
use trolab_core::linalg::{orthonormalize_in, ComplexMatrix, Field, MatrixSubspace};
use trolab_core::star_algebra::{center, corner, Projection, StarAlgebra};
use trolab_core::structure_maps::{
    extend_to_linking, fiber_restrict, inner_triple_to_tro, inner_tro_to_triple, innerness_witness_vn,
    jordan_split, restriction_delta, spatial_decompose,
};
use trolab_core::tro::{linking_algebra, make_tro, Tro};

use crate::problem::{Input, MatrixJson, Problem};
use crate::report::{DimEntry, Verdict, Witness};

/// Reference value reported next to the fitted Jordan-part scalar.
pub const JORDAN_REFERENCE: f64 = -0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Theorem {
    #[value(name = "lemma_1_4")]
    Lemma14,
    #[value(name = "lemma_2_1")]
    Lemma21,
    #[value(name = "thm_2_2")]
    Thm22,
    #[value(name = "prop_2_4")]
    Prop24,
    #[value(name = "lemma_3_1")]
    Lemma31,
    #[value(name = "thm_3_2")]
    Thm32,
    #[value(name = "thm_3_4_iii_1")]
    Thm34iii1,
    #[value(name = "prop_3_11_finite")]
    Prop311Finite,
}

impl Theorem {
    pub const ALL: [Theorem; 8] = [
        Theorem::Lemma14,
        Theorem::Lemma21,
        Theorem::Thm22,
        Theorem::Prop24,
        Theorem::Lemma31,
        Theorem::Thm32,
        Theorem::Thm34iii1,
        Theorem::Prop311Finite,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Theorem::Lemma14 => "lemma_1_4",
            Theorem::Lemma21 => "lemma_2_1",
            Theorem::Thm22 => "thm_2_2",
            Theorem::Prop24 => "prop_2_4",
            Theorem::Lemma31 => "lemma_3_1",
            Theorem::Thm32 => "thm_3_2",
            Theorem::Thm34iii1 => "thm_3_4_iii_1",
            Theorem::Prop311Finite => "prop_3_11_finite",
        }
    }

    /// Whether the input meets the hypothesis (used by the corpus runner).
    pub fn applies_to(self, input: &Input) -> bool {
        let unital = input.algebra().is_some_and(|a| a.is_unital());
        let nonzero_tro = input.tro().is_some_and(|x| x.dim() > 0);
        match self {
            Theorem::Lemma14 => unital && input.projection().is_some(),
            Theorem::Lemma21 | Theorem::Thm22 | Theorem::Prop24 => nonzero_tro,
            Theorem::Lemma31 | Theorem::Thm32 => matches!(input, Input::Algebra { .. }) && unital,
            Theorem::Thm34iii1 => {
                matches!(input, Input::Algebra { .. }) && input.projection().is_some_and(|p| p.is_self_adjoint())
            }
            Theorem::Prop311Finite => matches!(input, Input::DirectSum(_)),
        }
    }
}

/// Dimensions, verdicts and witnesses produced by one pipeline.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub dims: Vec<DimEntry>,
    pub verdicts: Vec<Verdict>,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

impl Outcome {
    fn dim(&mut self, name: &str, s: &MatrixSubspace) {
        self.dims.push(DimEntry {
            name: name.into(),
            field: match s.field() {
                Field::Real => "real",
                Field::Complex => "complex",
            }
            .into(),
            dim: s.dim(),
            real_dim: s.real_dim(),
        });
    }

    fn count(&mut self, name: &str, field: &str, dim: usize) {
        let real_dim = if field == "complex" { 2 * dim } else { dim };
        self.dims.push(DimEntry {
            name: name.into(),
            field: field.into(),
            dim,
            real_dim,
        });
    }

    fn push(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }
}

/// Base thresholds hold at the default tolerance and scale up with looser
/// user tolerances.
fn thr(base: f64, tol: f64) -> f64 {
    base * (tol / trolab_core::DEFAULT_TOL).max(1.0)
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |m, x| if x.is_nan() { f64::INFINITY } else { m.max(x) })
}

/// Largest distance of a basis of `a` from `b` and vice versa.
fn span_distance(a: &MatrixSubspace, b: &MatrixSubspace) -> f64 {
    max_of(a.basis().iter().map(|m| b.residual(m))).max(max_of(b.basis().iter().map(|m| a.residual(m))))
}

fn complex_span_dim(s: &MatrixSubspace) -> Result<usize> {
    let (r, c) = s.shape();
    Ok(orthonormalize_in(r, c, s.basis(), Field::Complex, 1e-9)?.dim())
}

fn matrix_witness(name: String, mats: &[(&str, &ComplexMatrix)]) -> Witness {
    Witness {
        name,
        matrices: mats.iter().map(|(n, m)| (n.to_string(), MatrixJson::from_matrix(m))).collect(),
        scalars: Vec::new(),
    }
}

fn require_unital(a: &StarAlgebra) -> Result<()> {
    if !a.is_unital() {
        bail!("hypothesis not met: the algebra has no unit");
    }
    Ok(())
}

// ---------------------------------------------------------------- derivations

fn space_verdicts(out: &mut Outcome, name: &str, s: &DerivationSpace, tol: f64) {
    out.push(Verdict::bound(format!("{name}.identity"), s.max_defect(), thr(1e-8, tol)));
}

fn algebra_derivations(out: &mut Outcome, a: &StarAlgebra, p: Option<&Projection>, tol: f64) -> Result<()> {
    out.count("algebra", "complex", a.dim());
    out.dim("center", &center(a));
    let d = derivation_space(a)?;
    out.dim("d_assoc", d.operators());
    space_verdicts(out, "d_assoc", &d, tol);
    let ds = star_within(&d)?;
    out.dim("d_star", ds.operators());
    space_verdicts(out, "d_star", &ds, tol);
    let inner = inner_assoc(a)?;
    out.dim("inner_assoc", inner.operators());
    out.count("outer_assoc", "complex", d.dim().saturating_sub(inner.dim()));
    out.push(Verdict::bound(
        "inner_assoc.within_d_assoc",
        max_of(inner.basis().iter().map(|m| d.operators().residual(m))),
        thr(1e-8, tol),
    ));
    out.push(Verdict::bound("d_assoc.lie_closure", d.lie_closure_defect(), thr(1e-8, tol)));

    let Some(p) = p else { return Ok(()) };
    let dp = p_derivation_space_within(&d, p, false)?;
    out.dim("d_p", dp.operators());
    space_verdicts(out, "d_p", &dp, tol);
    let g = p_generator_realization(a, p, false)?;
    out.dim("generators_p", &g.generators);
    out.count("generator_kernel_p", "complex", complex_span_dim(&g.kernel)?);
    out.push(Verdict::bound(
        "generators_p.operator_dim",
        (g.operator_dim() as f64 - dp.dim() as f64).abs(),
        0.0,
    ));
    if p.is_self_adjoint() {
        let dsp = p_derivation_space_within(&d, p, true)?;
        out.dim("d_star_p", dsp.operators());
        space_verdicts(out, "d_star_p", &dsp, tol);
        let gs = p_generator_realization(a, p, true)?;
        out.dim("generators_star_p", &gs.generators);
        // t + t* central is the defining constraint of the self-adjoint generators
        let z = center(a);
        out.push(Verdict::bound(
            "generators_star_p.real_part_central",
            max_of(gs.generators.basis().iter().map(|t| z.residual(&(t + &t.adjoint())))),
            thr(1e-8, tol),
        ));
        if a.is_unital() {
            let r = restriction_delta(a, p)?;
            out.dim("d_tro_corner", r.tro.operators());
            out.count("delta_image", "real", r.image_dim);
            out.count("ker_delta_generator", "complex", complex_span_dim(&r.generator_kernel)?);
            out.count("ker_delta_operator", "real", r.operator_kernel.dim());
            out.push(Verdict::flag(
                "delta.ker_generator_is_center",
                r.generator_kernel_is_center,
                span_distance(&r.generator_kernel, &center(a).as_real()),
                thr(1e-8, tol),
            ));
            out.push(Verdict::flag(
                "delta.surjective",
                r.surjective,
                (r.tro.dim() - r.image_dim) as f64,
                0.0,
            ));
            out.push(Verdict::bound("delta.membership", r.membership_residual, thr(1e-8, tol)));
            out.push(Verdict::bound("delta.homomorphism", r.homomorphism_defect, thr(1e-8, tol)));
        }
    }
    Ok(())
}

fn tro_derivations(out: &mut Outcome, x: &Tro, unitize: bool, tol: f64) -> Result<()> {
    out.count("tro", "complex", x.dim());
    let link = linking_algebra(x, unitize, tol)?;
    out.count(if unitize { "linking_unitized" } else { "linking" }, "complex", link.algebra().dim());
    let dt = tro_derivation_space(x)?;
    out.dim("d_tro", dt.operators());
    space_verdicts(out, "d_tro", &dt, tol);
    let dtr = triple_derivation_space(x)?;
    out.dim("d_triple", dtr.operators());
    space_verdicts(out, "d_triple", &dtr, tol);
    let it = inner_tro(x)?;
    out.dim("inner_tro", it.operators());
    let itr = inner_triple(x)?;
    out.dim("inner_triple", itr.operators());
    out.count("outer_tro", "real", dt.dim().saturating_sub(it.dim()));
    out.push(Verdict::bound(
        "inner_tro.within_d_tro",
        max_of(it.basis().iter().map(|m| dt.operators().residual(m))),
        thr(1e-8, tol),
    ));
    out.push(Verdict::bound("d_tro.lie_closure", dt.lie_closure_defect(), thr(1e-8, tol)));
    Ok(())
}

/// All applicable spaces for the input.
pub fn derivations(problem: &Problem) -> Result<Outcome> {
    let tol = problem.settings.tol;
    let mut out = Outcome::default();
    match &problem.input {
        Input::Algebra { algebra, projection } => algebra_derivations(&mut out, algebra, projection.as_ref(), tol)?,
        Input::Corner {
            algebra,
            projection,
            tro,
        } => {
            algebra_derivations(&mut out, algebra, Some(projection), tol)?;
            tro_derivations(&mut out, tro, problem.settings.unitize, tol)?;
        }
        Input::Tro(x) | Input::DirectSum(x) => tro_derivations(&mut out, x, problem.settings.unitize, tol)?,
    }
    Ok(out)
}

// ------------------------------------------------------------------- theorems

pub fn check(problem: &Problem, theorem: Theorem) -> Result<Outcome> {
    if !theorem.applies_to(&problem.input) {
        bail!(
            "hypothesis not met: {} does not apply to a {} input{}",
            theorem.tag(),
            problem.file.kind.as_str(),
            hypothesis_hint(theorem)
        );
    }
    let tol = problem.settings.tol;
    let input = &problem.input;
    match theorem {
        Theorem::Lemma14 => lemma_1_4(input.algebra().unwrap(), input.projection().unwrap(), tol),
        Theorem::Lemma21 => lemma_2_1(input.tro().unwrap(), tol),
        Theorem::Thm22 => thm_2_2(input.tro().unwrap(), tol),
        Theorem::Prop24 => prop_2_4(input.tro().unwrap(), tol),
        Theorem::Lemma31 => lemma_3_1(input.algebra().unwrap(), tol),
        Theorem::Thm32 => thm_3_2(input.algebra().unwrap(), tol),
        Theorem::Thm34iii1 => thm_3_4_iii_1(input.algebra().unwrap(), input.projection().unwrap(), tol),
        Theorem::Prop311Finite => prop_3_11(input.tro().unwrap(), tol),
    }
}

fn hypothesis_hint(t: Theorem) -> &'static str {
    match t {
        Theorem::Lemma14 => " (needs a unital algebra with a projection or idempotent)",
        Theorem::Lemma21 | Theorem::Thm22 | Theorem::Prop24 => " (needs a nonzero TRO)",
        Theorem::Lemma31 | Theorem::Thm32 => " (needs a unital semisimple algebra)",
        Theorem::Thm34iii1 => " (needs an algebra with a self-adjoint projection)",
        Theorem::Prop311Finite => " (needs a direct_sum input)",
    }
}

/// Largest `|S-rejection of delta(y)|` over a basis of `S` and of the space.
fn invariance(space: &DerivationSpace, s: &MatrixSubspace) -> f64 {
    let dom = space.domain();
    max_of(
        space
            .basis()
            .iter()
            .flat_map(|d| s.basis().iter().map(move |y| s.residual(&apply(dom, d, y)))),
    )
}

fn at(space: &DerivationSpace, e: &ComplexMatrix) -> f64 {
    let dom = space.domain();
    max_of(space.basis().iter().map(|d| apply(dom, d, e).hs_norm()))
}

pub fn lemma_1_4(a: &StarAlgebra, e: &Projection, tol: f64) -> Result<Outcome> {
    require_unital(a)?;
    let mut out = Outcome::default();
    let f = e.complement(a)?;
    let eae = corner(e, a, e)?;
    let eaf = corner(e, a, &f)?;
    let fae = corner(&f, a, e)?;
    let faf = corner(&f, a, &f)?;
    let limit = thr(1e-8, tol);
    let full = derivation_space(a)?;
    let dp = p_derivation_space_within(&full, e, false)?;
    out.dim("d_e", dp.operators());
    out.push(Verdict::bound("d_e.vanishes_at_e", at(&dp, e.matrix()), limit));
    for (name, s) in [("eAe", &eae), ("eA(1-e)", &eaf), ("(1-e)Ae", &fae), ("(1-e)A(1-e)", &faf)] {
        out.push(Verdict::bound(format!("lemma_1_4.1.invariant.{name}"), invariance(&dp, s), limit));
    }
    for (name, s) in [("eAe", &eae), ("(1-e)A(1-e)", &faf)] {
        let ds = s_derivation_space_within(&full, s)?;
        out.dim(&format!("d_invariant.{name}"), ds.operators());
        out.push(Verdict::bound(format!("lemma_1_4.2.{name}"), at(&ds, e.matrix()), limit));
    }
    if e.is_self_adjoint() {
        for (name, s) in [("eA(1-e)", &eaf), ("(1-e)Ae", &fae)] {
            let ds = star_within(&s_derivation_space_within(&full, s)?)?;
            out.dim(&format!("d_star_invariant.{name}"), ds.operators());
            out.push(Verdict::bound(format!("lemma_1_4.3.{name}"), at(&ds, e.matrix()), limit));
        }
    } else {
        out.notes.push("the self-adjoint corner case needs e = e*; skipped".into());
    }
    // S = C e is a subalgebra with unit e
    let ce = orthonormalize_in(a.n(), a.n(), std::slice::from_ref(e.matrix()), Field::Complex, tol)?;
    if ce.dim() > 0 {
        let ds = s_derivation_space_within(&full, &ce)?;
        out.push(Verdict::bound("lemma_1_3.1.span_e", at(&ds, e.matrix()), limit));
    }
    let ds = s_derivation_space_within(&full, &eae)?;
    out.push(Verdict::bound("lemma_1_3.1.eAe", at(&ds, e.matrix()), limit));
    out.push(Verdict::bound("lemma_1_3.2.eAe", invariance(&dp, &eae), limit));
    Ok(out)
}

pub fn lemma_2_1(x: &Tro, tol: f64) -> Result<Outcome> {
    let mut out = Outcome::default();
    let dt = tro_derivation_space(x)?;
    out.dim("d_tro", dt.operators());
    let mut worst = [0.0f64; 4];
    let mut tries = usize::MAX;
    let mut norm_ok = true;
    let mut norm_margin: f64 = 0.0;
    for (k, d) in dt.basis().iter().enumerate() {
        let ext = extend_to_linking(x, d).with_context(|| format!("extension of basis element {k}"))?;
        worst[0] = worst[0].max(ext.leibniz_defect);
        worst[1] = worst[1].max(ext.star_defect);
        worst[2] = worst[2].max(ext.extension_defect);
        worst[3] = worst[3].max(ext.well_definedness);
        tries = tries.min(ext.factorizations_tried);
        norm_ok &= ext.norm_bound_holds();
        for (l, r) in &ext.norm_bounds {
            norm_margin = norm_margin.max(l - r);
        }
    }
    let limit = thr(1e-8, tol);
    out.push(Verdict::bound("delta0.leibniz", worst[0], limit));
    out.push(Verdict::bound("delta0.star", worst[1], limit));
    out.push(Verdict::bound("delta0.extends_d", worst[2], limit));
    out.push(Verdict::bound("delta0.well_defined", worst[3], thr(1e-9, tol)));
    if dt.dim() > 0 {
        out.push(
            Verdict::flag("delta0.factorizations", tries >= 3, tries as f64, 3.0)
                .with_detail("alternative factorizations per basis element"),
        );
    }
    out.push(
        Verdict::flag("delta0.norm_bound", norm_ok, norm_margin.max(0.0), 0.0)
            .with_detail("largest excess of |left block| over 2|D||sum x y*|"),
    );
    let link = linking_algebra(x, true, tol)?;
    out.count("linking_unitized", "complex", link.algebra().dim());
    let p = link
        .left_corner()
        .context("the unitized linking algebra has no left corner projection")?;
    let r = restriction_delta(link.algebra(), p)?;
    out.count("delta_image", "real", r.image_dim);
    out.push(Verdict::flag(
        "delta.surjective",
        r.surjective && r.tro.dim() == dt.dim(),
        (dt.dim() as f64 - r.image_dim as f64).abs(),
        0.0,
    ));
    Ok(out)
}

pub fn thm_2_2(x: &Tro, tol: f64) -> Result<Outcome> {
    let mut out = Outcome::default();
    let dt = tro_derivation_space(x)?;
    out.dim("d_tro", dt.operators());
    let (mut rec, mut skew, mut bic) = (0.0f64, 0.0f64, 0.0f64);
    for (k, d) in dt.basis().iter().enumerate() {
        let w = spatial_decompose(x, d, thr(1e-9, tol)).with_context(|| format!("basis element {k}"))?;
        rec = rec.max(w.residual);
        skew = skew.max(w.skew_residual);
        bic = bic.max(w.bicommutant_residual);
        out.witnesses
            .push(matrix_witness(format!("spatial[{k}]"), &[("alpha", &w.alpha), ("beta", &w.beta)]));
    }
    out.push(Verdict::bound("spatial.reconstruction", rec, thr(1e-9, tol)));
    out.push(Verdict::bound("spatial.skew", skew, thr(1e-10, tol)));
    out.push(Verdict::bound("spatial.bicommutant", bic, thr(1e-8, tol)));
    Ok(out)
}

pub fn prop_2_4(x: &Tro, tol: f64) -> Result<Outcome> {
    let mut out = Outcome::default();
    let limit = thr(1e-9, tol);
    let dt = tro_derivation_space(x)?;
    let dtr = triple_derivation_space(x)?;
    let it = inner_tro(x)?;
    let itr = inner_triple(x)?;
    out.dim("d_tro", dt.operators());
    out.dim("d_triple", dtr.operators());
    out.dim("inner_tro", it.operators());
    out.dim("inner_triple", itr.operators());
    out.push(Verdict::flag(
        "tro_equals_triple.dim",
        dt.dim() == dtr.dim(),
        (dt.dim() as f64 - dtr.dim() as f64).abs(),
        0.0,
    ));
    out.push(Verdict::bound(
        "tro_equals_triple.membership",
        span_distance(dt.operators(), dtr.operators()),
        limit,
    ));
    out.push(Verdict::flag(
        "inner_tro_equals_inner_triple.dim",
        it.dim() == itr.dim(),
        (it.dim() as f64 - itr.dim() as f64).abs(),
        0.0,
    ));
    out.push(Verdict::bound(
        "inner_tro_equals_inner_triple.membership",
        span_distance(it.operators(), itr.operators()),
        limit,
    ));
    let mut round = 0.0f64;
    let mut pairs_res = 0.0f64;
    for (k, d) in dt.basis().iter().enumerate() {
        let Innerness::Inner(w) = is_inner(d, &it, thr(1e-9, tol))? else {
            out.push(Verdict::failed(format!("round_trip[{k}]"), "basis element is not inner"));
            continue;
        };
        let Payload::Spatial { alpha, beta } = w.payload else {
            bail!("unexpected payload for an inner TRO-derivation");
        };
        let pairs = inner_tro_to_triple(x, &alpha, &beta, limit).with_context(|| format!("basis element {k}"))?;
        let back = inner_triple_to_tro(x, &pairs)?;
        pairs_res = pairs_res.max(back.residual);
        let dom = x.carrier();
        let diff = max_of(x.basis().iter().map(|y| {
            (&apply(dom, d, y) - &(&(&back.alpha * y) + &(y * &back.beta))).hs_norm()
        }));
        round = round.max(diff);
    }
    out.push(Verdict::bound("round_trip.operator", round, limit));
    out.push(Verdict::bound("round_trip.pairs_vs_spatial", pairs_res, limit));
    Ok(out)
}

fn as_tro(a: &StarAlgebra) -> Result<Tro> {
    Ok(Tro::from_subspace(a.carrier().clone(), a.tol())?)
}

pub fn lemma_3_1(a: &StarAlgebra, tol: f64) -> Result<Outcome> {
    require_unital(a)?;
    let mut out = Outcome::default();
    let x = as_tro(a)?;
    let t = triple_derivation_space(&x)?;
    out.dim("d_triple", t.operators());
    let (mut fit, mut at_one, mut skew) = (0.0f64, 0.0f64, 0.0f64);
    let mut cs = Vec::new();
    for (k, d) in t.basis().iter().enumerate() {
        let s = jordan_split(a, d).with_context(|| format!("basis element {k}"))?;
        fit = fit.max(s.fit_residual);
        at_one = at_one.max(s.delta0_at_one);
        skew = skew.max((&s.delta_one + &s.delta_one.adjoint()).hs_norm());
        if let Some(c) = s.scalar {
            cs.push(c);
        }
    }
    let limit = thr(1e-9, tol);
    out.push(Verdict::bound("jordan.delta_one_skew", skew, thr(1e-8, tol)));
    out.push(Verdict::bound("jordan.fit_residual", fit, limit));
    out.push(Verdict::bound("jordan.delta0_at_one", at_one, thr(1e-8, tol)));
    let (mean, var) = mean_var(&cs);
    out.push(Verdict::bound("jordan.scalar_variance", var, limit));
    out.witnesses.push(Witness {
        name: "jordan_scalar".into(),
        matrices: Vec::new(),
        scalars: vec![
            ("c_mean".into(), mean),
            ("c_variance".into(), var),
            ("fits".into(), cs.len() as f64),
            ("reference".into(), JORDAN_REFERENCE),
        ],
    });
    Ok(out)
}

/// Mean and population variance (`0, 0` for an empty list).
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}

pub fn thm_3_2(a: &StarAlgebra, tol: f64) -> Result<Outcome> {
    require_unital(a)?;
    let mut out = Outcome::default();
    let x = as_tro(a)?;
    let t = triple_derivation_space(&x)?;
    let it = inner_triple(&x)?;
    out.dim("d_triple", t.operators());
    out.dim("inner_triple", it.operators());
    out.push(Verdict::flag(
        "triple_equals_inner.dim",
        t.dim() == it.dim(),
        (t.dim() as f64 - it.dim() as f64).abs(),
        0.0,
    ));
    out.push(Verdict::bound(
        "triple_equals_inner.membership",
        span_distance(t.operators(), it.operators()),
        thr(1e-9, tol),
    ));
    let mut worst = 0.0f64;
    let mut commutators = 0;
    for (k, d) in t.basis().iter().enumerate() {
        let w = innerness_witness_vn(a, d).with_context(|| format!("basis element {k}"))?;
        worst = worst.max(w.residual);
        commutators += w.commutator_pairs;
    }
    out.count("commutator_pairs", "count", commutators);
    out.push(Verdict::bound("witness.reconstruction", worst, thr(1e-9, tol)));
    Ok(out)
}

pub fn thm_3_4_iii_1(a: &StarAlgebra, p: &Projection, tol: f64) -> Result<Outcome> {
    let mut out = Outcome::default();
    let gens: Vec<ComplexMatrix> = a.basis().iter().map(|b| p.matrix() * b).collect();
    let x = make_tro(&gens, tol)?;
    out.count("tro_pA", "complex", x.dim());
    if x.dim() == 0 {
        out.notes.push("p = 0 gives the zero TRO".into());
        out.count("outer_tro", "real", 0);
        return Ok(out);
    }
    let dt = tro_derivation_space(&x)?;
    let it = inner_tro(&x)?;
    out.dim("d_tro", dt.operators());
    out.dim("inner_tro", it.operators());
    let outer = dt.dim().saturating_sub(it.dim());
    out.count("outer_tro", "real", outer);
    out.push(Verdict::flag("outer_dim_zero", outer == 0, outer as f64, 0.0));
    let mut worst = 0.0f64;
    let mut all = true;
    for d in dt.basis() {
        match is_inner(d, &it, thr(1e-9, tol))? {
            Innerness::Inner(w) => worst = worst.max(w.residual),
            Innerness::Outer { distance } => {
                all = false;
                worst = worst.max(distance);
            }
        }
    }
    out.push(Verdict::flag("every_basis_element_inner", all, worst, thr(1e-9, tol)));
    Ok(out)
}

pub fn prop_3_11(v: &Tro, tol: f64) -> Result<Outcome> {
    let mut out = Outcome::default();
    let dt = tro_derivation_space(v)?;
    out.dim("d_tro", dt.operators());
    out.count("summands", "count", v.summands().len());
    let mut w = [0.0f64; 4];
    let mut inner_sum = true;
    let mut inner_parts = true;
    for (k, d) in dt.basis().iter().enumerate() {
        let r = fiber_restrict(v, d, thr(1e-9, tol)).with_context(|| format!("basis element {k}"))?;
        w[0] = w[0].max(r.invariance_residual);
        w[1] = w[1].max(r.restriction_defect);
        w[2] = w[2].max(r.witness_residual);
        w[3] = w[3].max(r.off_block_norm);
        inner_sum &= r.inner_on_sum;
        inner_parts &= r.summands_inner.iter().all(|b| *b);
    }
    let limit = thr(1e-8, tol);
    out.push(Verdict::bound("fiber.invariance", w[0], limit));
    out.push(Verdict::bound("fiber.restriction_is_derivation", w[1], limit));
    out.push(Verdict::flag("fiber.inner_on_sum", inner_sum, 0.0, 0.0));
    out.push(Verdict::flag("fiber.summands_inner", inner_parts, 0.0, 0.0));
    out.push(Verdict::bound("fiber.blockwise_witness", w[2], limit));
    out.push(Verdict::bound("fiber.witness_block_diagonal", w[3], limit));
    Ok(out)
}
