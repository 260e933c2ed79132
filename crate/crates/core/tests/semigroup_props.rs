use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rkbs::kgraph::{Edge, Path};
use rkbs::selfsim::{make_gbs, make_odometer, make_product_of_odometers, SelfSimilarKGraph};
use rkbs::semigroup::{
    bfs_layers, left_quotient, membership_oracle, multiply, normalize_generator_word, right_lcm, GeneratorLetter,
    Membership, MembershipAnswer, Mode, SemigroupElement,
};

fn zoo() -> Vec<SelfSimilarKGraph> {
    vec![
        make_odometer(2, 3).unwrap(),
        make_odometer(2, -3).unwrap(),
        make_odometer(3, -2).unwrap(),
        make_gbs(&[(2, vec![1, 2]), (3, vec![0, -1, 6])]).unwrap(),
        make_gbs(&[(2, vec![0, -3]), (1, vec![2])]).unwrap(),
        make_product_of_odometers(&[2, 3]).unwrap(),
    ]
}

fn letters(ss: &SelfSimilarKGraph, raw: &[(u8, usize, u32)], mode: Mode) -> Vec<GeneratorLetter> {
    let g = ss.graph();
    raw.iter()
        .map(|&(kind, c, l)| match kind % 3 {
            0 => GeneratorLetter::A,
            1 if mode == Mode::Z => GeneratorLetter::AInv,
            _ => {
                let c = c % g.rank();
                GeneratorLetter::Edge(Edge::new(c, l % g.size(c) as u32))
            }
        })
        .collect()
}

fn raw_word() -> impl Strategy<Value = Vec<(u8, usize, u32)>> {
    prop::collection::vec((0..3u8, 0..2usize, 0..6u32), 0..=7)
}

// least exponent over each path among products of at most `radius` generators
fn ball_floor(ss: &SelfSimilarKGraph, radius: usize) -> BTreeMap<Path, BigInt> {
    let mut floor: BTreeMap<Path, BigInt> = BTreeMap::new();
    for e in bfs_layers(ss, radius, 3_000_000).unwrap().iter().flatten() {
        let m = floor.entry(e.path.clone()).or_insert_with(|| e.exp.clone());
        if e.exp < *m {
            *m = e.exp.clone();
        }
    }
    floor
}

proptest! {
    #[test]
    fn word_concatenation_is_multiplication(i in 0..6usize, w1 in raw_word(), w2 in raw_word()) {
        let ss = &zoo()[i];
        let a = letters(ss, &w1, Mode::Z);
        let b = letters(ss, &w2, Mode::Z);
        let ab: Vec<GeneratorLetter> = a.iter().chain(&b).copied().collect();
        let x = normalize_generator_word(ss, &a, Mode::Z).unwrap();
        let y = normalize_generator_word(ss, &b, Mode::Z).unwrap();
        prop_assert_eq!(normalize_generator_word(ss, &ab, Mode::Z).unwrap(), multiply(ss, &x, &y));
    }

    #[test]
    fn left_cancellation(i in 0..6usize, wz in raw_word(), wx in raw_word(), wy in raw_word()) {
        let ss = &zoo()[i];
        let z = normalize_generator_word(ss, &letters(ss, &wz, Mode::Z), Mode::Z).unwrap();
        let x = normalize_generator_word(ss, &letters(ss, &wx, Mode::Z), Mode::Z).unwrap();
        let y = normalize_generator_word(ss, &letters(ss, &wy, Mode::Z), Mode::Z).unwrap();
        if x != y {
            prop_assert_ne!(multiply(ss, &z, &x), multiply(ss, &z, &y));
        }
        let zx = multiply(ss, &z, &x);
        prop_assert_eq!(left_quotient(ss, &z, &zx), Some(x));
    }

    #[test]
    fn words_in_s_n_are_members(i in 0..6usize, w in raw_word()) {
        let ss = &zoo()[i];
        let x = normalize_generator_word(ss, &letters(ss, &w, Mode::N), Mode::N).unwrap();
        prop_assert!(Membership::new(ss).contains(&x));
    }

    #[test]
    fn lcm_is_a_common_multiple(i in 0..6usize, wx in raw_word(), wy in raw_word()) {
        let ss = &zoo()[i];
        let x = normalize_generator_word(ss, &letters(ss, &wx, Mode::N), Mode::N).unwrap();
        let y = normalize_generator_word(ss, &letters(ss, &wy, Mode::N), Mode::N).unwrap();
        let mut membership = Membership::new(ss);
        let mut common = |c: &SemigroupElement| {
            [&x, &y].iter().all(|d| left_quotient(ss, d, c).is_some_and(|q| membership.contains(&q)))
        };
        if let Ok(Some(l)) = right_lcm(ss, &x, &y) {
            prop_assert!(common(&l));
            let below = SemigroupElement::new(l.path.clone(), &l.exp - 1);
            prop_assert!(!common(&below), "{} is a smaller common multiple", below);
        }
    }
}

#[test]
fn min_exponent_matches_bounded_search() {
    for (ss, radius) in [
        (make_odometer(2, 3).unwrap(), 10),
        (make_odometer(2, -3).unwrap(), 12),
        (make_odometer(3, -2).unwrap(), 10),
        (make_gbs(&[(2, vec![1, 2]), (3, vec![0, -1, 6])]).unwrap(), 7),
        (make_gbs(&[(2, vec![0, -3]), (1, vec![2])]).unwrap(), 8),
    ] {
        let far = ball_floor(&ss, radius);
        let near = ball_floor(&ss, radius - 3);
        let mut membership = Membership::new(&ss);
        for (p, m) in far.iter().filter(|(p, _)| p.len() <= 3) {
            match membership.min_exponent(p) {
                Some(lo) => assert_eq!(&lo, m, "{}: {p}", ss.label()),
                // unbounded below: the minimum keeps dropping as the ball grows
                None => assert!(near.get(p).is_some_and(|n| m < n), "{}: {p}", ss.label()),
            }
        }
    }
}

#[test]
fn nonnegative_restrictions_give_nonnegative_exponents() {
    for ss in [make_odometer(3, 2).unwrap(), make_product_of_odometers(&[2, 3]).unwrap()] {
        for x in bfs_layers(&ss, 6, 1_000_000).unwrap().iter().flatten() {
            assert!(!x.exp.is_negative(), "{x}");
        }
        let mut membership = Membership::new(&ss);
        for p in ss.graph().enumerate_paths(&rkbs::kgraph::Degree::splat(ss.rank(), 2)).unwrap() {
            assert_eq!(membership.min_exponent(&p), Some(BigInt::zero()));
        }
    }
}

#[test]
fn inverse_generator_is_not_found() {
    let ss = make_odometer(2, 3).unwrap();
    let a_inv = SemigroupElement::new(ss.graph().empty_path(), -1);
    for bound in [2, 5, 8] {
        assert_eq!(membership_oracle(&ss, &a_inv, bound), MembershipAnswer::Unknown);
    }
    assert!(!Membership::new(&ss).contains(&a_inv));
    assert!(normalize_generator_word(&ss, &[GeneratorLetter::AInv], Mode::N).is_err());
}
