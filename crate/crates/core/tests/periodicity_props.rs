use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Pow};
use proptest::prelude::*;
use rkbs::kgraph::Degree;
use rkbs::periodicity::{
    addr, cycline_structure, is_cycline_to_depth, path_at_addr, phi_pq, relation_lattice, simplicity_report, weight,
    CyclineStructure,
};
use rkbs::selfsim::{make_odometer, make_product_of_odometers};

// Reduces q by an echelon basis; zero remainder means q is in the span.
fn in_span(basis: &[Vec<i64>], q: &[i64]) -> bool {
    let mut q: Vec<i128> = q.iter().map(|&x| x as i128).collect();
    for row in basis {
        let Some(c) = row.iter().position(|&x| x != 0) else { continue };
        let pivot = row[c] as i128;
        if q[c] % pivot != 0 {
            return false;
        }
        let f = q[c] / pivot;
        for (x, &r) in q.iter_mut().zip(row) {
            *x -= f * r as i128;
        }
    }
    q.iter().all(|&x| x == 0)
}

// ∏ p_i^{q_i} = 1 by cross-multiplying positive and negative parts.
fn product_one(p: &[i64], q: &[i64]) -> bool {
    let (mut num, mut den) = (BigInt::one(), BigInt::one());
    for (&v, &e) in p.iter().zip(q) {
        let base = BigInt::from(v);
        if e >= 0 {
            num *= base.pow(e as u32);
        } else {
            den *= base.pow((-e) as u32);
        }
    }
    num == den
}

fn box_vectors(k: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-r..=r).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn value() -> impl Strategy<Value = i64> {
    prop_oneof![2i64..=12, -12i64..=-1, Just(1)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lattice_matches_exhaustive_search(p in prop::collection::vec(value(), 2..=3)) {
        let lattice = relation_lattice(&p).unwrap();
        for v in &lattice.basis {
            prop_assert!(product_one(&p, v), "{:?} not a relation of {:?}", v, p);
        }
        for q in box_vectors(p.len(), 6) {
            prop_assert_eq!(product_one(&p, &q), in_span(&lattice.basis, &q), "q = {:?}", q);
        }
    }

    #[test]
    fn addresses_round_trip(a in 0u32..=3, b in 0u32..=2, seed in 0u64..1000) {
        let ss = make_product_of_odometers(&[2, 3]).unwrap();
        let d = Degree::new(vec![a, b]);
        let w = weight(&ss, &d);
        let address = BigInt::from(seed) % &w;
        let mu = path_at_addr(&ss, &d, &address).unwrap();
        prop_assert_eq!(addr(&ss, &mu).unwrap(), address);
    }
}

#[test]
fn verdicts_swap_with_divisibility() {
    for n in 2..=6usize {
        for m in (2..=4).map(|t| (n * t) as i64) {
            let divides = simplicity_report(&make_odometer(n, m).unwrap()).unwrap();
            let swapped = simplicity_report(&make_odometer(m as usize, n as i64).unwrap()).unwrap();
            assert!(divides.periodic && !divides.simple, "E({n},{m})");
            assert!(!swapped.periodic && swapped.simple, "E({m},{n})");
        }
    }
}

#[test]
fn phi_tables_are_address_bijections() {
    let ss = make_product_of_odometers(&[2, 4]).unwrap();
    for (p, q) in [((2, 0), (0, 1)), ((2, 1), (0, 2)), ((4, 0), (2, 1))] {
        let (p, q) = (Degree::new(vec![p.0, p.1]), Degree::new(vec![q.0, q.1]));
        let table = phi_pq(&ss, &p, &q).unwrap();
        let images: BTreeSet<_> = table.forward.values().collect();
        assert_eq!(images.len(), table.forward.len());
        for (mu, nu) in &table.forward {
            assert_eq!(addr(&ss, mu).unwrap(), addr(&ss, nu).unwrap());
            assert_eq!(table.apply_inverse(nu), Some(mu));
        }
    }
    assert!(phi_pq(&ss, &Degree::new(vec![1, 0]), &Degree::new(vec![0, 1])).is_err());
}

#[test]
fn structure_agrees_with_depth_search_for_product_odometers() {
    let ss = make_product_of_odometers(&[2, 4]).unwrap();
    let structure = cycline_structure(&ss).unwrap();
    assert!(matches!(structure, CyclineStructure::Addressed { .. }));
    let g = ss.graph();
    let paths: Vec<_> = Degree::splat(2, 2)
        .below()
        .iter()
        .flat_map(|d| g.enumerate_paths(d).unwrap())
        .collect();
    let bound = 2 * i64::try_from(ss.orbit_length_product()).unwrap();
    for mu in &paths {
        for nu in &paths {
            for e in -bound..=bound {
                let e = BigInt::from(e);
                let predicted = structure.contains(&ss, mu, &e, nu);
                let checked = is_cycline_to_depth(&ss, mu, &e, nu, 5, 0, 0).holds();
                assert_eq!(predicted, checked, "({mu}, {e}, {nu})");
            }
        }
    }
}
