use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rkbs::kgraph::{Degree, Path};
use rkbs::periodicity::{random_path, relation_lattice};
use rkbs::selfsim::{make_gbs, make_odometer, make_product_of_odometers};
use rkbs::staralg::coefficient::{Coefficient, GaussianRational};
use rkbs::staralg::{FormalCombination, Monomial, StarAlgebra};

fn algebras() -> Vec<StarAlgebra> {
    vec![
        StarAlgebra::new(make_product_of_odometers(&[2, 3]).unwrap()).unwrap(),
        StarAlgebra::new(make_product_of_odometers(&[2, 4]).unwrap()).unwrap(),
        StarAlgebra::new(make_odometer(2, -3).unwrap()).unwrap(),
        StarAlgebra::new(make_gbs(&[(2, vec![1, 2]), (1, vec![-2])]).unwrap()).unwrap(),
    ]
}

fn rand_path(alg: &StarAlgebra, rng: &mut ChaCha8Rng, max: u32) -> Path {
    let k = alg.rank();
    let d = Degree::new((0..k).map(|_| rng.gen_range(0..=max)).collect());
    random_path(alg.ss().graph(), &d, rng)
}

fn rand_coefficient(rng: &mut ChaCha8Rng) -> Coefficient {
    let q = |rng: &mut ChaCha8Rng| BigRational::new(rng.gen_range(-4..=4).into(), rng.gen_range(1..=3).into());
    let g = GaussianRational::new(q(rng), q(rng));
    &Coefficient::from_rational(g.re) + &(&Coefficient::i() * &Coefficient::from_rational(g.im))
}

fn rand_combination(alg: &StarAlgebra, rng: &mut ChaCha8Rng, terms: usize, gauge_zero: bool) -> FormalCombination {
    let mut out = FormalCombination::zero();
    for _ in 0..terms {
        let mu = rand_path(alg, rng, 2);
        let nu = if gauge_zero {
            random_path(alg.ss().graph(), &mu.degree(), rng)
        } else {
            rand_path(alg, rng, 2)
        };
        let m = Monomial::new(mu, rng.gen_range(-4..=4), nu);
        out.accumulate(m, rand_coefficient(rng));
    }
    out
}

// A representative that is equal in the algebra but written at a finer degree.
fn perturb(alg: &StarAlgebra, rng: &mut ChaCha8Rng, a: &FormalCombination) -> FormalCombination {
    let mut out = FormalCombination::zero();
    for (m, c) in a.terms() {
        let r = Degree::new((0..alg.rank()).map(|_| rng.gen_range(0..=1)).collect());
        for (refined, e) in alg.refine(m, &r).unwrap().terms() {
            out.accumulate(refined.clone(), e * c);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn associative_on_combinations(i in 0..4usize, seed in any::<u64>()) {
        let alg = &algebras()[i];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = rand_combination(alg, &mut rng, 2, false);
        let b = rand_combination(alg, &mut rng, 2, false);
        let c = rand_combination(alg, &mut rng, 2, false);
        let left = alg.product(&alg.product(&a, &b).unwrap(), &c).unwrap();
        let right = alg.product(&a, &alg.product(&b, &c).unwrap()).unwrap();
        prop_assert!(alg.canonical_eq(&left, &right).unwrap());
    }

    #[test]
    fn adjoint_is_an_anti_involution(i in 0..4usize, seed in any::<u64>()) {
        let alg = &algebras()[i];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = rand_combination(alg, &mut rng, 3, false);
        let b = rand_combination(alg, &mut rng, 3, false);
        prop_assert_eq!(a.adjoint().adjoint(), a.clone());
        let ab = alg.product(&a, &b).unwrap();
        let ba = alg.product(&b.adjoint(), &a.adjoint()).unwrap();
        prop_assert!(alg.canonical_eq(&ab.adjoint(), &ba).unwrap());
    }

    #[test]
    fn canonical_eq_is_a_congruence(i in 0..4usize, seed in any::<u64>()) {
        let alg = &algebras()[i];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = rand_combination(alg, &mut rng, 2, false);
        let b = rand_combination(alg, &mut rng, 2, false);
        let a2 = perturb(alg, &mut rng, &a);
        let b2 = perturb(alg, &mut rng, &b);
        prop_assert!(alg.canonical_eq(&a, &a2).unwrap());
        let lhs = alg.product(&a, &b).unwrap();
        let rhs = alg.product(&a2, &b2).unwrap();
        prop_assert!(alg.canonical_eq(&lhs, &rhs).unwrap());
        prop_assert!(alg.canonical_eq(&a.adjoint(), &a2.adjoint()).unwrap());
    }

    #[test]
    fn gauge_grading(i in 0..4usize, seed in any::<u64>()) {
        let alg = &algebras()[i];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Monomial::new(rand_path(alg, &mut rng, 2), rng.gen_range(-6..=6), rand_path(alg, &mut rng, 2));
        let y = Monomial::new(rand_path(alg, &mut rng, 2), rng.gen_range(-6..=6), rand_path(alg, &mut rng, 2));
        let want: Vec<i64> = x.gdeg().iter().zip(y.gdeg()).map(|(a, b)| a + b).collect();
        let xy = alg.product(&x.into(), &y.into()).unwrap();
        prop_assert!(xy.monomials().all(|m| m.gdeg() == want));
    }

    #[test]
    fn state_is_positive_on_gauge_invariant_squares(i in 0..2usize, seed in any::<u64>()) {
        let alg = &algebras()[i];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = rand_combination(alg, &mut rng, 3, true);
        let value = alg.omega(&alg.product(&a.adjoint(), &a).unwrap()).unwrap();
        let q = value.as_rational();
        prop_assert!(q.as_ref().is_some_and(|q| !q.is_negative()), "ω(A*A) = {}", value);
    }

    #[test]
    fn state_ignores_refinement_and_is_tracial(i in 0..2usize, seed in any::<u64>()) {
        let alg = &algebras()[i];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = rand_combination(alg, &mut rng, 3, false);
        prop_assert_eq!(alg.omega(&a).unwrap(), alg.omega(&perturb(alg, &mut rng, &a)).unwrap());
        let x = rand_combination(alg, &mut rng, 2, true);
        let y = rand_combination(alg, &mut rng, 2, true);
        let xy = alg.tau(&alg.product(&x, &y).unwrap()).unwrap();
        let yx = alg.tau(&alg.product(&y, &x).unwrap()).unwrap();
        prop_assert_eq!(xy, yx);
        prop_assert!(alg.kms_check(&x, &a).unwrap());
    }

    #[test]
    fn modular_factorizations(i in 0..2usize, seed in any::<u64>()) {
        let alg = &algebras()[i];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = rand_combination(alg, &mut rng, 3, false);
        let j_half = alg.j_map(&alg.delta_pow(&a, 1).unwrap()).unwrap();
        let j_minus = alg.j_map(&alg.delta_pow(&a, -1).unwrap()).unwrap();
        prop_assert_eq!(alg.s_map(&a).unwrap(), j_half);
        prop_assert_eq!(alg.f_map(&a).unwrap(), j_minus);
        prop_assert_eq!(alg.j_map(&alg.j_map(&a).unwrap()).unwrap(), a);
    }
}

#[test]
fn center_elements_for_every_small_relation() {
    let alg = StarAlgebra::new(make_product_of_odometers(&[2, 4]).unwrap()).unwrap();
    let lattice = relation_lattice(&[2, 4]).unwrap();
    let degrees = Degree::splat(2, 3).below();
    let mut checked = 0;
    for p in &degrees {
        for q in &degrees {
            let diff: Vec<i64> = p.entries().iter().zip(q.entries()).map(|(&a, &b)| a as i64 - b as i64).collect();
            if p == q || !lattice.contains(&diff) {
                continue;
            }
            let v = alg.build_v(p, q).unwrap();
            assert!(alg.is_unitary(&v).unwrap(), "V({p:?}, {q:?}) not unitary");
            assert!(alg.commutes_with_generators(&v).unwrap(), "V({p:?}, {q:?}) not central");
            checked += 1;
        }
    }
    assert_eq!(checked, 12);
}

#[test]
fn zero_combination_has_zero_state() {
    let alg = &algebras()[0];
    assert_eq!(alg.omega(&FormalCombination::zero()).unwrap(), Coefficient::zero());
    let m = Monomial::new(alg.ss().graph().empty_path(), BigInt::from(1), alg.ss().graph().empty_path());
    assert!(alg.omega(&m.into()).unwrap().is_zero());
}
