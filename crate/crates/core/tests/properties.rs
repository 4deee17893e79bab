use approx::assert_abs_diff_eq;
use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trolab_core::linalg::{
    derealify, null_space, orthonormalize, realify, ComplexMatrix, Field, MatrixSubspace, RealifiedSystem, C64,
};
use trolab_core::random::{random_algebra, random_matrix};
use trolab_core::star_algebra::{center, commutant, commutator_decompose, BlockDecomposition};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 24,
        ..ProptestConfig::default()
    }
}

/// Random matrix of prescribed rank `r` (product of `rows x r` and `r x cols`).
fn low_rank(rng: &mut ChaCha8Rng, rows: usize, cols: usize, r: usize) -> ComplexMatrix {
    if r == 0 {
        return ComplexMatrix::zeros(rows, cols);
    }
    &random_matrix(rng, rows, r) * &random_matrix(rng, r, cols)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn null_space_vectors_are_annihilated(seed in any::<u64>(), rows in 1usize..7, cols in 1usize..7, r in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = r.min(rows).min(cols);
        let m = low_rank(&mut rng, rows, cols, r);
        let ns = null_space(&m, 1e-9).unwrap();
        prop_assert_eq!(ns.len(), cols - r, "rank-nullity");
        for v in &ns {
            prop_assert!((m.as_dmatrix() * v).norm() <= 1e-9 * m.hs_norm().max(1.0));
            assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-12);
        }
        for (i, a) in ns.iter().enumerate() {
            for b in &ns[i + 1..] {
                prop_assert!(a.dotc(b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn orthonormalize_is_idempotent(seed in any::<u64>(), count in 1usize..6, real in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = if real { Field::Real } else { Field::Complex };
        let mut mats: Vec<ComplexMatrix> = (0..count).map(|_| random_matrix(&mut rng, 2, 3)).collect();
        // a dependent element
        mats.push(&mats[0] + &mats[count - 1]);
        let s = orthonormalize(&mats, field, 1e-10).unwrap();
        prop_assert_eq!(s.dim(), count);
        prop_assert!(s.gram_defect() < 1e-10);
        let again = orthonormalize(s.basis(), field, 1e-10).unwrap();
        prop_assert!(again.same_span(&s, 1e-9));
        for m in &mats {
            prop_assert!(s.residual(m) < 1e-9 * m.hs_norm().max(1.0));
        }
    }

    #[test]
    fn realify_round_trip(seed in any::<u64>(), rows in 1usize..6, cols in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lin = random_matrix(&mut rng, rows, cols);
        let x = DVector::from_fn(cols, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let back = derealify(&realify(&x));
        prop_assert!((back - &x).norm() == 0.0);
        let sys = RealifiedSystem::from_linear(&lin);
        prop_assert!((sys.decode(1e-12).unwrap() - lin.clone()).hs_norm() < 1e-14);
        prop_assert!((sys.apply(&x) - lin.as_dmatrix() * &x).norm() < 1e-12);
        let conj = RealifiedSystem::from_conjugate_linear(&lin);
        prop_assert!((conj.apply(&x) - lin.as_dmatrix() * x.conjugate()).norm() < 1e-12);
        prop_assert!(conj.decode(1e-12).is_err());
    }

    #[test]
    fn commutant_reverses_inclusion(seed in any::<u64>(), extra in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 3;
        let small_gens: Vec<ComplexMatrix> = vec![random_matrix(&mut rng, n, n).hermitian_part()];
        let mut big_gens = small_gens.clone();
        for _ in 0..extra {
            big_gens.push(random_matrix(&mut rng, n, n));
        }
        let small = orthonormalize(&small_gens, Field::Complex, 1e-10).unwrap();
        let big = orthonormalize(&big_gens, Field::Complex, 1e-10).unwrap();
        let c_small = commutant(&small, 1e-10).unwrap();
        let c_big = commutant(&big, 1e-10).unwrap();
        prop_assert!(c_big.carrier().is_within(c_small.carrier(), 1e-8));
        let c3 = commutant(commutant(c_small.carrier(), 1e-10).unwrap().carrier(), 1e-10).unwrap();
        prop_assert!(c3.carrier().same_span(c_small.carrier(), 1e-8));
    }

    #[test]
    fn structure_constants_are_associative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_algebra(&mut rng, 5, 1e-10).unwrap();
        prop_assert!(inst.algebra.associativity_defect() < 1e-9);
        prop_assert!(inst.algebra.certification_residual() < 1e-9);
    }

    #[test]
    fn commutator_decomposition_reconstructs(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_algebra(&mut rng, 5, 1e-10).unwrap();
        let a = &inst.algebra;
        let coeffs: Vec<C64> = (0..a.dim()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let x = a.element(&coeffs);
        let cd = commutator_decompose(&x, a, 1e-10).unwrap();
        let mut rebuilt = cd.central.clone();
        let mut comm = ComplexMatrix::zeros(x.rows(), x.cols());
        for (u, v) in &cd.pairs {
            prop_assert!(a.contains(u, 1e-8) && a.contains(v, 1e-8));
            comm += &ComplexMatrix::commutator(u, v);
        }
        rebuilt += &comm;
        prop_assert!((&rebuilt - &x).hs_norm() < 1e-8 * x.hs_norm().max(1.0));
        prop_assert!(center(a).residual(&cd.central) < 1e-8);
        let blocks = BlockDecomposition::new(a, 1e-10).unwrap();
        for t in blocks.block_traces(&comm) {
            prop_assert!(t.norm() < 1e-8);
        }
        // block traces of x are carried entirely by the central part
        for (s, t) in blocks.block_traces(&x).iter().zip(blocks.block_traces(&cd.central)) {
            prop_assert!((s - t).norm() < 1e-8);
        }
    }
}

#[test]
fn zero_subspace_has_no_basis() {
    let z = MatrixSubspace::zero(2, 2, Field::Real);
    assert_eq!(z.dim(), 0);
    assert_eq!(z.residual(&ComplexMatrix::identity(2)), 2f64.sqrt());
}
