use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trolab_core::derivation::{
    apply, inner_tro, is_inner, leibniz_defect, operator_from_fn, star_defect, tro_derivation_space,
    triple_delta, triple_derivation_space,
};
use trolab_core::linalg::{ComplexMatrix, C64, I};
use trolab_core::random::{full_tro, random_matrix, random_real_combination, rotated_sum};
use trolab_core::star_algebra::{make_star_algebra, Projection, StarAlgebra};
use trolab_core::structure_maps::*;
use trolab_core::tro::{direct_sum, make_tro, Tro};

const TOL: f64 = 1e-10;

fn e(n: usize, i: usize, j: usize) -> ComplexMatrix {
    ComplexMatrix::unit(n, n, i, j)
}

fn full(n: usize) -> StarAlgebra {
    let gens: Vec<_> = (0..n).flat_map(|i| (0..n).map(move |j| e(n, i, j))).collect();
    make_star_algebra(&gens, TOL).unwrap()
}

fn scalar(z: C64) -> ComplexMatrix {
    ComplexMatrix::from_fn(1, 1, |_, _| z)
}

fn c_tro() -> Tro {
    make_tro(&[scalar(C64::new(1.0, 0.0))], TOL).unwrap()
}

fn op(x: &Tro, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> ComplexMatrix {
    operator_from_fn(x.carrier(), f, 1e-8).unwrap()
}

#[test]
fn restriction_on_m2_corner() {
    let a = full(2);
    let p = Projection::new(&e(2, 0, 0), &a, TOL).unwrap();
    let r = restriction_delta(&a, &p).unwrap();
    assert_eq!(r.tro.real_dim(), 1);
    assert!(r.surjective);
    assert_eq!(r.image_dim, 1);
    assert!(r.generator_kernel_is_center);
    // the kernel is a real space; the center {diag(a, a)} has complex dim 1
    assert_eq!(r.center_dim, 1);
    assert_eq!(r.generator_kernel.real_dim(), 2);
    assert!(r.membership_residual < 1e-9);
    assert!(r.homomorphism_defect < 1e-9);
}

#[test]
fn restriction_on_m5_rank_two() {
    let a = full(5);
    let p = &e(5, 0, 0) + &e(5, 1, 1);
    let p = Projection::new(&p, &a, TOL).unwrap();
    let r = restriction_delta(&a, &p).unwrap();
    assert!(r.surjective);
    assert!(r.generator_kernel_is_center);
    assert!(r.homomorphism_defect < 1e-8);
}

#[test]
fn restriction_with_identity_projection_is_trivial() {
    let a = full(2);
    let p = Projection::new(&ComplexMatrix::identity(2), &a, TOL).unwrap();
    let r = restriction_delta(&a, &p).unwrap();
    assert_eq!(r.corner.dim(), 0);
    assert_eq!(r.tro.dim(), 0);
    assert_eq!(r.image_dim, 0);
    assert!(r.surjective);
}

#[test]
fn extension_of_i_on_c() {
    let x = c_tro();
    let d = op(&x, |y| y.scale(I));
    let ext = extend_to_linking(&x, &d).unwrap();
    assert_eq!(ext.linking.algebra().dim(), 4);
    assert!(ext.leibniz_defect < 1e-9);
    assert!(ext.star_defect < 1e-9);
    assert!(ext.extension_defect < 1e-9);
    assert!(ext.norm_bound_holds());
    // the corner action of the extension is x -> ix
    let alg = ext.linking.algebra();
    let corner = ext.linking.embed(&scalar(C64::new(1.0, 0.0)));
    let image = apply(alg.carrier(), &ext.operator, &corner);
    assert!((ext.linking.corner_part(&image) - scalar(I)).hs_norm() < 1e-9);
}

#[test]
fn extension_of_zero_is_zero() {
    let x = full_tro(2, 1, TOL).unwrap();
    let d = ComplexMatrix::zeros(x.dim(), x.dim());
    let ext = extend_to_linking(&x, &d).unwrap();
    assert!(ext.operator.hs_norm() < 1e-12);
}

#[test]
fn extension_is_well_defined_on_column_tro() {
    let x = full_tro(2, 1, TOL).unwrap();
    let space = tro_derivation_space(&x).unwrap();
    for d in space.basis() {
        let ext = extend_to_linking(&x, d).unwrap();
        assert!(ext.factorizations_tried >= 3);
        assert!(ext.well_definedness < 1e-10, "{}", ext.well_definedness);
        assert!(ext.leibniz_defect < 1e-9);
        assert!(ext.star_defect < 1e-9);
        assert!(ext.extension_defect < 1e-9);
        assert!(ext.norm_bound_holds());
    }
}

#[test]
fn extension_rejects_non_derivations() {
    let x = c_tro();
    let d = op(&x, |y| y.clone());
    assert!(extend_to_linking(&x, &d).is_err());
}

#[test]
fn spatial_on_inner_triple_derivation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x = full_tro(3, 2, TOL).unwrap();
    let a = random_matrix(&mut rng, 3, 2);
    let b = random_matrix(&mut rng, 3, 2);
    let d = op(&x, |y| triple_delta(&a, &b, y));
    let w = spatial_decompose(&x, &d, 1e-10).unwrap();
    assert!(w.residual <= 1e-10 * d.hs_norm().max(1.0));
    assert!(w.skew_residual < 1e-10);
    // the formula pair gives the same operator
    let sp = inner_triple_to_tro(&x, &[(a, b)]).unwrap();
    let other = op(&x, |y| &(&sp.alpha * y) + &(y * &sp.beta));
    assert!((&other - &d).hs_norm() < 1e-10);
}

#[test]
fn spatial_of_zero_is_zero() {
    let x = full_tro(2, 2, TOL).unwrap();
    let w = spatial_decompose(&x, &ComplexMatrix::zeros(4, 4), 1e-10).unwrap();
    assert!(w.alpha.hs_norm() < 1e-14 && w.beta.hs_norm() < 1e-14);
}

#[test]
fn spatial_on_random_tro_derivations() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let x = full_tro(3, 2, TOL).unwrap();
    let space = tro_derivation_space(&x).unwrap();
    for _ in 0..3 {
        let d = random_real_combination(&mut rng, space.basis(), x.dim(), x.dim());
        let w = spatial_decompose(&x, &d, 1e-9).unwrap();
        assert!(w.skew_residual <= 1e-10);
        assert!(w.bicommutant_residual <= 1e-9);
        for y in x.basis() {
            let direct = apply(x.carrier(), &d, y);
            let spatial = &(&w.alpha * y) + &(y * &w.beta);
            assert!((&direct - &spatial).hs_norm() < 1e-9);
        }
    }
}

#[test]
fn conversion_on_c_by_hand() {
    // alpha = (1 * (-i) - i * 1) / 2 = -i and beta = ((-i) * 1 - 1 * i) / 2 = -i
    let x = c_tro();
    let one = scalar(C64::new(1.0, 0.0));
    let sp = inner_triple_to_tro(&x, &[(one.clone(), scalar(I))]).unwrap();
    assert!((sp.alpha.get(0, 0) - C64::new(0.0, -1.0)).norm() < 1e-14);
    assert!((sp.beta.get(0, 0) - C64::new(0.0, -1.0)).norm() < 1e-14);
    assert!(sp.residual < 1e-12);
    // delta(1, i)(x) = (x(-i) + x(-i) - ix - ix) / 2 = -2ix
    let d = triple_delta(&one, &scalar(I), &one);
    assert!((d.get(0, 0) - C64::new(0.0, -2.0)).norm() < 1e-14);
}

#[test]
fn conversion_of_equal_pair_is_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x = full_tro(2, 3, TOL).unwrap();
    let a = random_matrix(&mut rng, 2, 3);
    let sp = inner_triple_to_tro(&x, &[(a.clone(), a)]).unwrap();
    assert!(sp.alpha.hs_norm() < 1e-14 && sp.beta.hs_norm() < 1e-14);
}

#[test]
fn tro_to_triple_on_c_gives_one_pair() {
    let x = c_tro();
    let pairs = inner_tro_to_triple(&x, &scalar(I), &scalar(C64::new(0.0, 0.0)), 1e-10).unwrap();
    assert_eq!(pairs.len(), 1);
    let (a, b) = &pairs[0];
    let one = scalar(C64::new(1.0, 0.0));
    assert!((triple_delta(a, b, &one) - scalar(I)).hs_norm() < 1e-10);
    assert!(inner_tro_to_triple(&x, &scalar(C64::new(0.0, 0.0)), &scalar(C64::new(0.0, 0.0)), 1e-10)
        .unwrap()
        .is_empty());
}

#[test]
fn conversion_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let x = rotated_sum(&mut rng, &[(1, 2), (2, 1)], TOL).unwrap();
    let ls = random_real_combination(&mut rng, x.left_block().basis(), x.h(), x.h());
    let rs = random_real_combination(&mut rng, x.right_block().basis(), x.k(), x.k());
    let alpha = ls.skew_part();
    let beta = rs.skew_part();
    let pairs = inner_tro_to_triple(&x, &alpha, &beta, 1e-9).unwrap();
    let back = inner_triple_to_tro(&x, &pairs).unwrap();
    assert!(back.residual < 1e-9);
    let want = op(&x, |y| &(&alpha * y) + &(y * &beta));
    let got = op(&x, |y| &(&back.alpha * y) + &(y * &back.beta));
    assert!((&want - &got).hs_norm() < 1e-9);
}

#[test]
fn jordan_split_scalar() {
    let m = full(2);
    let x = Tro::from_subspace(m.carrier().clone(), TOL).unwrap();
    let d = op(&x, |y| y.scale(I));
    let s = jordan_split(&m, &d).unwrap();
    let c = s.scalar.unwrap();
    assert!((c - 0.5).abs() < 1e-10, "{c}");
    assert!(s.delta0.hs_norm() < 1e-10);

    // ad of a skew element kills 1
    let t = (&e(2, 0, 0) - &e(2, 1, 1)).scale(I);
    let d = op(&x, |y| ComplexMatrix::commutator(&t, y));
    let s = jordan_split(&m, &d).unwrap();
    assert!(s.scalar.is_none());
    assert!(s.delta1.hs_norm() < 1e-12);
}

#[test]
fn vn_witness_on_m2() {
    let m = full(2);
    let x = Tro::from_subspace(m.carrier().clone(), TOL).unwrap();
    let t = (&e(2, 0, 0) - &e(2, 1, 1)).scale(I);
    let d = op(&x, |y| ComplexMatrix::commutator(&t, y));
    let w = innerness_witness_vn(&m, &d).unwrap();
    assert!(w.residual <= 1e-9);
    assert!(w.pairs.len() <= 2);
    let zero = innerness_witness_vn(&m, &ComplexMatrix::zeros(4, 4)).unwrap();
    assert!(zero.pairs.is_empty());
}

#[test]
fn vn_witness_on_m2_plus_m3() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut gens = Vec::new();
    for (off, s) in [(0, 2), (2, 3)] {
        for i in 0..s {
            for j in 0..s {
                gens.push(e(5, off + i, off + j));
            }
        }
    }
    let m = make_star_algebra(&gens, TOL).unwrap();
    assert_eq!(m.dim(), 13);
    let x = Tro::from_subspace(m.carrier().clone(), TOL).unwrap();
    let space = triple_derivation_space(&x).unwrap();
    let d = random_real_combination(&mut rng, space.basis(), 13, 13);
    let w = innerness_witness_vn(&m, &d).unwrap();
    assert!(w.residual <= 1e-9, "{}", w.residual);
    assert!(leibniz_defect(&m, &w.split.delta0) < 1e-8);
    assert!(star_defect(m.carrier(), &w.split.delta0) < 1e-8);
}

#[test]
fn fiber_of_c_plus_c() {
    let x = direct_sum(&[c_tro(), c_tro()]).unwrap();
    let first = x.summands()[0].clone();
    let d = op(&x, |y| first.embed(&first.extract(y).scale(I), 2, 2));
    let r = fiber_restrict(&x, &d, 1e-9).unwrap();
    assert!(r.invariance_residual < 1e-12);
    assert_eq!(r.restrictions.len(), 2);
    assert!((r.restrictions[0].get(0, 0) - I).norm() < 1e-12);
    assert!(r.restrictions[1].hs_norm() < 1e-12);
    assert!(r.inner_on_sum);
    assert!(r.summands_inner.iter().all(|b| *b));
    assert!(r.witness_residual < 1e-9);
    assert!(r.off_block_norm < 1e-9);
}

#[test]
fn fiber_of_rectangular_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let parts = [full_tro(1, 2, TOL).unwrap(), full_tro(2, 2, TOL).unwrap()];
    let x = direct_sum(&parts).unwrap();
    let space = tro_derivation_space(&x).unwrap();
    let d = random_real_combination(&mut rng, space.basis(), x.dim(), x.dim());
    let r = fiber_restrict(&x, &d, 1e-9).unwrap();
    assert!(r.invariance_residual < 1e-9);
    assert!(r.restriction_defect < 1e-9);
    assert!(r.inner_on_sum);
    assert!(r.summands_inner.iter().all(|b| *b));
    assert!(r.witness_residual < 1e-8);
    for (s, op) in x.summands().iter().zip(&r.restrictions) {
        assert!(is_inner(op, &inner_tro(&s.part).unwrap(), 1e-9).unwrap().is_inner());
    }
}

