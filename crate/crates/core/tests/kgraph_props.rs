use std::collections::BTreeSet;

use proptest::prelude::*;
use rkbs::kgraph::{make_theta, Degree, Edge, KGraph, Path, ThetaKind};

fn graphs() -> Vec<KGraph> {
    vec![
        KGraph::from_kind(ThetaKind::Division, &[2, 3]).unwrap(),
        KGraph::from_kind(ThetaKind::Flip, &[3, 3]).unwrap(),
        KGraph::from_kind(ThetaKind::Division, &[2, 3, 2]).unwrap(),
        KGraph::from_kind(ThetaKind::Flip, &[2, 2, 2]).unwrap(),
        KGraph::from_kind(ThetaKind::Trivial, &[2, 3, 4]).unwrap(),
    ]
}

fn word_strategy() -> impl Strategy<Value = (usize, Vec<(usize, u32)>)> {
    (0..5usize, prop::collection::vec((0..3usize, 0..4u32), 0..=8))
}

fn realize(g: &KGraph, raw: &[(usize, u32)]) -> Vec<Edge> {
    raw.iter()
        .map(|&(c, l)| {
            let c = c % g.rank();
            Edge::new(c, l % g.size(c) as u32)
        })
        .collect()
}

fn random_path(g: &KGraph, raw: &[(usize, u32)]) -> Path {
    g.normalize_word(&realize(g, raw)).unwrap()
}

// Every result of sorting the colours by legal swaps, in any order.
fn all_sortings(g: &KGraph, word: Vec<Edge>, out: &mut BTreeSet<Vec<Edge>>) {
    let mut sorted = true;
    for p in 0..word.len().saturating_sub(1) {
        if word[p].color > word[p + 1].color {
            sorted = false;
            let mut next = word.clone();
            let (a, b) = g.swap(word[p], word[p + 1]);
            next[p] = a;
            next[p + 1] = b;
            all_sortings(g, next, out);
        }
    }
    if sorted {
        out.insert(word);
    }
}

proptest! {
    #[test]
    fn normalize_idempotent_and_swap_invariant((gi, raw) in word_strategy(), pos in 0..8usize) {
        let g = &graphs()[gi];
        let word = realize(g, &raw);
        let p = g.normalize_word(&word).unwrap();
        prop_assert_eq!(g.normalize_word(&p.to_word()).unwrap(), p.clone());
        if pos + 1 < word.len() && word[pos].color != word[pos + 1].color {
            let mut swapped = word.clone();
            let (a, b) = g.swap(word[pos], word[pos + 1]);
            swapped[pos] = a;
            swapped[pos + 1] = b;
            prop_assert_eq!(g.normalize_word(&swapped).unwrap(), p);
        }
    }

    #[test]
    fn compose_associative_with_identity(
        (gi, a) in word_strategy(),
        b in prop::collection::vec((0..3usize, 0..4u32), 0..=5),
        c in prop::collection::vec((0..3usize, 0..4u32), 0..=5),
    ) {
        let g = &graphs()[gi];
        let (p, q, r) = (random_path(g, &a), random_path(g, &b), random_path(g, &c));
        prop_assert_eq!(g.compose(&g.compose(&p, &q), &r), g.compose(&p, &g.compose(&q, &r)));
        prop_assert_eq!(g.compose(&g.empty_path(), &p), p.clone());
        prop_assert_eq!(g.compose(&p, &g.empty_path()), p);
    }

    #[test]
    fn swap_round_trips((gi, raw) in word_strategy()) {
        let g = &graphs()[gi];
        let word = realize(g, &raw);
        for w in word.windows(2) {
            if w[0].color != w[1].color {
                let (a, b) = g.swap(w[0], w[1]);
                prop_assert_eq!(g.swap(a, b), (w[0], w[1]));
            }
        }
    }
}

#[test]
fn factorize_inverts_compose_exhaustively() {
    for g in graphs().into_iter().filter(|g| g.rank() == 3) {
        let top = Degree::splat(3, 2);
        let degrees = top.below();
        for dp in &degrees {
            for dq in &degrees {
                if !dp.add(dq).is_le(&top) {
                    continue;
                }
                for p in g.enumerate_paths(dp).unwrap() {
                    for q in g.enumerate_paths(dq).unwrap() {
                        let pq = g.compose(&p, &q);
                        assert_eq!(g.factorize(&pq, dp).unwrap(), (p.clone(), q.clone()));
                    }
                }
            }
        }
    }
}

#[test]
fn path_counts_are_products() {
    for g in graphs().into_iter().filter(|g| g.rank() == 2) {
        for n in Degree::splat(2, 3).below() {
            let expected: usize = (0..2).map(|c| g.size(c).pow(n.get(c))).product();
            let paths = g.enumerate_paths(&n).unwrap();
            assert_eq!(paths.len(), expected, "{n:?}");
            assert_eq!(paths.iter().collect::<BTreeSet<_>>().len(), expected);
        }
    }
}

#[test]
fn rewrite_strategies_agree_on_three_colour_words() {
    for g in graphs().into_iter().filter(|g| g.rank() == 3) {
        let edges = g.edges();
        for &x in &edges {
            for &y in &edges {
                for &z in &edges {
                    let colours: BTreeSet<usize> = [x.color, y.color, z.color].into();
                    if colours.len() < 2 {
                        continue;
                    }
                    let mut out = BTreeSet::new();
                    all_sortings(&g, vec![x, y, z], &mut out);
                    assert_eq!(out.len(), 1, "{x} {y} {z}: {out:?}");
                }
            }
        }
    }
}

#[test]
fn sizes_mismatch_for_flip() {
    assert!(make_theta(ThetaKind::Flip, &[2, 3]).is_err());
}
