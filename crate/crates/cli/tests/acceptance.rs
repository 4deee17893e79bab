//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{ensure, Context, Result};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trolab_cli::checks::{self, mean_var, Outcome, JORDAN_REFERENCE};
use trolab_cli::commands::{self, Overrides};
use trolab_cli::problem::{Input, Problem};
use trolab_core::derivation::{p_derivation_space, p_generator_realization};
use trolab_core::linalg::{orthonormalize, ComplexMatrix, Field, C64};
use trolab_core::random::{block_algebra, full_tro, random_algebra, random_tro, rotated_sum};
use trolab_core::star_algebra::{center, make_star_algebra, Projection, StarAlgebra};
use trolab_core::structure_maps::restriction_delta;
use trolab_core::tro::{direct_sum, Tro};
use trolab_core::DEFAULT_TOL;

const TOL: f64 = DEFAULT_TOL;

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn corpus_problems() -> Result<Vec<(String, Problem)>> {
    let mut paths: Vec<_> = std::fs::read_dir(corpus_dir())?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.sort();
    paths
        .into_iter()
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let prob = commands::load(&p, Overrides::default()).with_context(|| name.clone())?;
            Ok((name, prob))
        })
        .collect()
}

fn matrix_units(n: usize) -> Vec<ComplexMatrix> {
    (0..n)
        .flat_map(|i| (0..n).map(move |j| ComplexMatrix::unit(n, n, i, j)))
        .collect()
}

fn full_matrix_algebra(n: usize) -> Result<StarAlgebra> {
    Ok(make_star_algebra(&matrix_units(n), TOL)?)
}

fn diag_projection(n: usize, r: usize, a: &StarAlgebra) -> Result<Projection> {
    let p = ComplexMatrix::from_fn(n, n, |i, j| if i == j && i < r { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    Ok(Projection::new(&p, a, 1e3 * TOL)?)
}

/// Every verdict of the outcome passes; otherwise names the first failure.
fn all_pass(label: &str, out: &Outcome) -> Result<()> {
    if let Some(v) = out.verdicts.iter().find(|v| !v.pass) {
        anyhow::bail!("{label}: {} failed (residual {:.2e}, threshold {:.2e})", v.check, v.residual, v.threshold);
    }
    Ok(())
}

fn random_tros() -> Result<Vec<Tro>> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut out = vec![full_tro(3, 3, TOL)?, full_tro(1, 3, TOL)?];
    while out.len() < 10 {
        out.push(random_tro(&mut rng, 3, 3, TOL)?);
    }
    Ok(out)
}

fn criterion_1() -> Result<String> {
    let a = full_matrix_algebra(2)?;
    let p = diag_projection(2, 1, &a)?;
    let g = p_generator_realization(&a, &p, false)?;
    let diag = orthonormalize(
        &[ComplexMatrix::unit(2, 2, 0, 0), ComplexMatrix::unit(2, 2, 1, 1)],
        Field::Complex,
        TOL,
    )?;
    ensure!(g.generators.dim() == 2, "generator dim {}", g.generators.dim());
    ensure!(g.generators.same_span(&diag, 1e-9), "generators are not the diagonal algebra");
    let dp = p_derivation_space(&a, &p, false)?;
    ensure!(dp.dim() == 1, "D_p operator dim {}", dp.dim());
    let gs = p_generator_realization(&a, &p, true)?;
    ensure!(gs.generators.real_dim() == 3, "D*_p generator real dim {}", gs.generators.real_dim());
    for t in gs.generators.basis() {
        let re = t.hermitian_part();
        ensure!((re.get(0, 0) - re.get(1, 1)).norm() < 1e-9, "Re(alpha) != Re(beta)");
    }
    let dsp = p_derivation_space(&a, &p, true)?;
    ensure!(dsp.real_dim() == 1, "D*_p operator real dim {}", dsp.real_dim());
    let r = restriction_delta(&a, &p)?;
    ensure!(r.generator_kernel_is_center && r.center_dim == 1, "ker Delta is not Z(A)");
    ensure!(
        r.generator_kernel.same_span(&center(&a).as_real(), 1e-9),
        "ker Delta span differs from the center"
    );
    ensure!(r.surjective && r.tro.real_dim() == 1, "Delta onto D_TRO(C) (dim {})", r.tro.real_dim());
    Ok("generators 2, D*_p generators 3 -> operators 1, ker Delta = Z(A), Delta onto dim 1".into())
}

fn criterion_2() -> Result<String> {
    let a = full_matrix_algebra(5)?;
    let p = diag_projection(5, 2, &a)?;
    let g = p_generator_realization(&a, &p, false)?;
    ensure!(g.generators.dim() == 13, "generator dim {}", g.generators.dim());
    // generators live in pAp + (1-p)A(1-p)
    let pm = p.matrix();
    let q = &ComplexMatrix::identity(5) - pm;
    for t in g.generators.basis() {
        ensure!((pm * &(t * &q)).hs_norm() + (&q * &(t * pm)).hs_norm() < 1e-9, "off-diagonal generator");
    }
    let dp = p_derivation_space(&a, &p, false)?;
    ensure!(dp.dim() == 12, "operator dim {}", dp.dim());
    let gs = p_generator_realization(&a, &p, true)?;
    let z = center(&a);
    for t in gs.generators.basis() {
        let s = t + &t.adjoint();
        ensure!(z.residual(&s) < 1e-9, "A + A* (+) B + B* not central");
    }
    // skew parts of M2 and M3 plus one common real scalar
    ensure!(gs.generators.real_dim() == 4 + 9 + 1, "D*_p generator real dim {}", gs.generators.real_dim());
    Ok(format!("generators 13, operators 12, star generators {}", gs.generators.real_dim()))
}

fn criterion_3() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut runs = 0;
    let mut worst = 0.0f64;
    for k in 0..20 {
        let inst = random_algebra(&mut rng, 5, TOL)?;
        for (what, e) in [("projection", &inst.projection), ("idempotent", &inst.idempotent)] {
            let out = checks::lemma_1_4(&inst.algebra, e, TOL)?;
            all_pass(&format!("instance {k} {what} {:?}", inst.shape), &out)?;
            worst = worst.max(out.verdicts.iter().map(|v| v.residual).fold(0.0, f64::max));
            runs += 1;
        }
    }
    Ok(format!("{runs} runs on 20 instances, worst residual {worst:.1e}"))
}

fn criterion_4(tros: &[Tro]) -> Result<String> {
    let mut basis = 0;
    for (k, x) in tros.iter().enumerate() {
        let out = checks::lemma_2_1(x, TOL)?;
        all_pass(&format!("TRO {k} ({}x{})", x.h(), x.k()), &out)?;
        ensure!(out.verdicts.iter().any(|v| v.check == "delta0.factorizations"), "no factorization check");
        basis += out.dims[0].dim;
    }
    Ok(format!("{} TROs, {basis} basis derivations", tros.len()))
}

fn corpus_tros(problems: &[(String, Problem)]) -> Vec<(String, &Tro)> {
    problems
        .iter()
        .filter_map(|(n, p)| p.input.tro().filter(|x| x.dim() > 0).map(|x| (n.clone(), x)))
        .collect()
}

fn criterion_5(problems: &[(String, Problem)], tros: &[Tro]) -> Result<String> {
    let mut all = corpus_tros(problems);
    all.extend(tros.iter().enumerate().map(|(k, x)| (format!("random {k}"), x)));
    for (name, x) in &all {
        all_pass(name, &checks::thm_2_2(x, TOL)?)?;
    }
    Ok(format!("{} TROs", all.len()))
}

fn criterion_6(problems: &[(String, Problem)], tros: &[Tro]) -> Result<String> {
    let mut all = corpus_tros(problems);
    all.extend(tros.iter().enumerate().map(|(k, x)| (format!("random {k}"), x)));
    for (name, x) in &all {
        all_pass(name, &checks::prop_2_4(x, TOL)?)?;
    }
    Ok(format!("{} TROs", all.len()))
}

fn criterion_7(problems: &[(String, Problem)]) -> Result<String> {
    let wanted = ["m2_corner_projection.json", "m3.json", "m2_plus_m3.json", "diagonal_c2.json", "m2_tensor_i2.json"];
    for w in wanted {
        let (_, p) = problems.iter().find(|(n, _)| n == w).with_context(|| format!("{w} missing"))?;
        let out = checks::thm_3_2(p.input.algebra().context("not an algebra")?, TOL)?;
        all_pass(w, &out)?;
    }
    Ok("M2, M3, M2+M3, C2, M2 (x) I2".into())
}

fn criterion_8() -> Result<String> {
    let mut cases = 0;
    for n in 1..=4 {
        let a = full_matrix_algebra(n)?;
        for r in 0..=n {
            let p = diag_projection(n, r, &a)?;
            let out = checks::thm_3_4_iii_1(&a, &p, TOL)?;
            all_pass(&format!("n={n} r={r}"), &out)?;
            let outer = out.dims.iter().find(|d| d.name == "outer_tro").context("no outer dim")?;
            ensure!(outer.dim == 0, "n={n} r={r}: outer dim {}", outer.dim);
            cases += 1;
        }
    }
    Ok(format!("{cases} (n, r) pairs, outer dim 0"))
}

fn criterion_9(problems: &[(String, Problem)]) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let shapes: [&[(usize, usize)]; 4] = [&[(1, 2), (2, 1)], &[(2, 3), (1, 1)], &[(1, 2), (2, 1), (1, 1)], &[(1, 3), (2, 2)]];
    let mut count = 0;
    for s in shapes {
        let parts = s
            .iter()
            .map(|&shape| rotated_sum(&mut rng, &[shape], TOL))
            .collect::<trolab_core::Result<Vec<_>>>()?;
        let v = direct_sum(&parts)?;
        all_pass(&format!("{s:?}"), &checks::prop_3_11(&v, TOL)?)?;
        count += 1;
    }
    for (n, p) in problems {
        if let Input::DirectSum(v) = &p.input {
            all_pass(n, &checks::prop_3_11(v, TOL)?)?;
            count += 1;
        }
    }
    Ok(format!("{count} direct sums"))
}

fn criterion_10() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut cs = Vec::new();
    let shapes: [&[(usize, usize)]; 4] = [&[(1, 1)], &[(2, 1)], &[(1, 1), (1, 1)], &[(2, 1), (1, 1)]];
    let mut instances = 0;
    for k in 0..12 {
        let inst = if k < shapes.len() {
            block_algebra(&mut rng, shapes[k], TOL)?
        } else {
            random_algebra(&mut rng, 4, TOL)?
        };
        let out = checks::lemma_3_1(&inst.algebra, TOL)?;
        all_pass(&format!("instance {k} {:?}", inst.shape), &out)?;
        let w = out.witnesses.iter().find(|w| w.name == "jordan_scalar").context("no scalar witness")?;
        let mean = w.scalars.iter().find(|(n, _)| n == "c_mean").context("no c_mean")?.1;
        let fits = w.scalars.iter().find(|(n, _)| n == "fits").context("no fits")?.1;
        if fits > 0.0 {
            cs.push(mean);
            instances += 1;
        }
    }
    ensure!(instances >= 10, "only {instances} instances with a fitted scalar");
    let (mean, var) = mean_var(&cs);
    ensure!(var <= 1e-9, "cross-instance variance {var:.2e}");
    Ok(format!("c = {mean:.6} on {instances} instances (variance {var:.1e}; reference {JORDAN_REFERENCE})"))
}

fn criterion_11() -> Result<String> {
    let a = commands::corpus(&corpus_dir(), Overrides::default())?;
    let b = commands::corpus(&corpus_dir(), Overrides::default())?;
    let ja = serde_json::to_string_pretty(&a.comparable)?;
    let jb = serde_json::to_string_pretty(&b.comparable)?;
    ensure!(ja == jb, "comparable sections differ");
    ensure!(a.passed(), "{} corpus files failed", a.comparable.failed);
    Ok(format!("{} files, {} bytes identical", a.comparable.files, ja.len()))
}

fn report(n: usize, start: Instant, r: Result<String>) -> bool {
    let secs = start.elapsed().as_secs_f64();
    match r {
        Ok(msg) => {
            println!("criterion {n}: PASS ({secs:.1}s) {msg}");
            true
        }
        Err(e) => {
            println!("criterion {n}: FAIL ({secs:.1}s) {e:#}");
            false
        }
    }
}

fn main() {
    let start = Instant::now();
    let problems = corpus_problems().expect("bundled corpus loads");
    let tros = random_tros().expect("random TROs");
    let mut ok = true;
    macro_rules! run {
        ($n:expr, $e:expr) => {{
            let t = Instant::now();
            ok &= report($n, t, $e);
        }};
    }
    run!(1, criterion_1());
    run!(2, criterion_2());
    run!(3, criterion_3());
    run!(4, criterion_4(&tros));
    run!(5, criterion_5(&problems, &tros));
    run!(6, criterion_6(&problems, &tros));
    run!(7, criterion_7(&problems));
    run!(8, criterion_8());
    run!(9, criterion_9(&problems));
    run!(10, criterion_10());
    run!(11, criterion_11());
    println!("acceptance: {} in {:.1}s", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
    if !ok {
        std::process::exit(1);
    }
}
