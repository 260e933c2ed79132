//! Relation checks for maps defined on generators.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{FormalCombination, Monomial, Result, StarAlgError, StarAlgebra};
use crate::kgraph::{Edge, KGraph, ThetaFamily, ThetaKind};
use crate::selfsim::{make_odometer, make_plain};

/// Images of `u_a` (if the source carries it) and of every edge generator.
#[derive(Debug, Clone, Default)]
pub struct GeneratorImages {
    pub unitary: Option<FormalCombination>,
    pub edges: BTreeMap<Edge, FormalCombination>,
}

impl GeneratorImages {
    fn edge(&self, e: Edge) -> Result<&FormalCombination> {
        self.edges.get(&e).ok_or_else(|| StarAlgError::RelationFailed {
            relation: "image defined".into(),
            witness: format!("no image for s_{e}"),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomReport {
    pub relations_checked: usize,
}

fn failed(relation: impl Into<String>, witness: impl Into<String>) -> StarAlgError {
    StarAlgError::RelationFailed {
        relation: relation.into(),
        witness: witness.into(),
    }
}

/// Substitutes generator images into `x`.
pub fn apply_hom(dst: &StarAlgebra, images: &GeneratorImages, x: &FormalCombination) -> Result<FormalCombination> {
    let mut out = FormalCombination::zero();
    for (m, c) in x.terms() {
        let image = apply_monomial(dst, images, m)?;
        out = out.add(&image.scale(c));
    }
    Ok(out)
}

fn apply_monomial(dst: &StarAlgebra, images: &GeneratorImages, m: &Monomial) -> Result<FormalCombination> {
    let path_image = |p: &crate::kgraph::Path| -> Result<FormalCombination> {
        let mut acc = dst.identity();
        for e in p.edges() {
            acc = dst.product(&acc, images.edge(e)?)?;
        }
        Ok(acc)
    };
    let u_part = if num_traits::Zero::is_zero(&m.g) {
        dst.identity()
    } else {
        let u = images
            .unitary
            .as_ref()
            .ok_or_else(|| failed("image defined", "no image for u_a"))?;
        let g = i64::try_from(&m.g).map_err(|_| failed("image defined", format!("exponent {} too large", m.g)))?;
        dst.power(u, g)?
    };
    dst.product_all([&path_image(&m.mu)?, &u_part, &path_image(&m.nu)?.adjoint()])
}

/// Verifies the defining relations of `src` on the images in `dst`:
/// isometries, the Cuntz–Krieger sum per colour, the θ-commutations and,
/// when a unitary image is given, unitarity and `u s_e = s_{a·e} u^{a|_e}`.
pub fn hom_check(src: &StarAlgebra, dst: &StarAlgebra, images: &GeneratorImages) -> Result<HomReport> {
    let g = src.ss().graph();
    let one = dst.identity();
    let mut checked = 0;
    let mut require = |ok: bool, relation: String, witness: String| -> Result<()> {
        checked += 1;
        if ok {
            Ok(())
        } else {
            Err(failed(relation, witness))
        }
    };
    for e in g.edges() {
        let s = images.edge(e)?;
        let lhs = dst.product(&s.adjoint(), s)?;
        require(dst.canonical_eq(&lhs, &one)?, format!("s_{e}* s_{e} = 1"), format!("got {lhs}"))?;
    }
    for c in 0..g.rank() {
        let mut sum = FormalCombination::zero();
        for l in 0..g.size(c) as u32 {
            let s = images.edge(Edge::new(c, l))?;
            sum = sum.add(&dst.product(s, &s.adjoint())?);
        }
        require(
            dst.canonical_eq(&sum, &one)?,
            format!("Σ s s* = 1 on colour x{}", c + 1),
            format!("got {sum}"),
        )?;
    }
    for i in 0..g.rank() {
        for j in i + 1..g.rank() {
            for s in 0..g.size(i) as u32 {
                for t in 0..g.size(j) as u32 {
                    let (s2, t2) = g.theta().apply(i, j, s, t);
                    let (a, b) = (Edge::new(i, s), Edge::new(j, t));
                    let (c, d) = (Edge::new(j, t2), Edge::new(i, s2));
                    let lhs = dst.product(images.edge(a)?, images.edge(b)?)?;
                    let rhs = dst.product(images.edge(c)?, images.edge(d)?)?;
                    require(
                        dst.canonical_eq(&lhs, &rhs)?,
                        format!("s_{a} s_{b} = s_{c} s_{d}"),
                        format!("{lhs} vs {rhs}"),
                    )?;
                }
            }
        }
    }
    if let Some(u) = &images.unitary {
        require(dst.is_unitary(u)?, "u unitary".into(), u.to_string())?;
        for e in g.edges() {
            let (ae, res) = src.ss().act_edge(&1.into(), e);
            let lhs = dst.product(u, images.edge(e)?)?;
            let exp = i64::try_from(&res).map_err(|_| failed("image defined", format!("exponent {res} too large")))?;
            let rhs = dst.product(images.edge(ae)?, &dst.power(u, exp)?)?;
            require(
                dst.canonical_eq(&lhs, &rhs)?,
                format!("u s_{e} = s_{ae} u^{res}"),
                format!("{lhs} vs {rhs}"),
            )?;
        }
    }
    Ok(HomReport { relations_checked: checked })
}

/// `back ∘ forth` fixes every generator of `a` (the unitary only if `forth` maps it).
pub fn round_trip_check(
    a: &StarAlgebra,
    b: &StarAlgebra,
    forth: &GeneratorImages,
    back: &GeneratorImages,
) -> Result<usize> {
    let mut gens = Vec::new();
    if forth.unitary.is_some() {
        gens.push(a.u(1));
    }
    for e in a.ss().graph().edges() {
        gens.push(a.s_edge(e)?);
    }
    for x in &gens {
        let there = apply_hom(b, forth, x)?;
        let again = apply_hom(a, back, &there)?;
        if !a.canonical_eq(&again, x)? {
            return Err(failed("round trip", format!("{x} ↦ {there} ↦ {again}")));
        }
    }
    Ok(gens.len())
}

/// The flip 2-graph `e_i f_j = f_i e_j` with the trivial action.
pub fn lambda_flip(n: usize) -> Result<StarAlgebra> {
    let graph = KGraph::from_kind(ThetaKind::Flip, &[n, n])?;
    plain(graph, format!("Λ_flip({n})"))
}

/// The square 2-graph `x_i y_j = y_{i+1} x_j`, `i, j ∈ {0, 1}`, with the trivial action.
pub fn lambda_square() -> Result<StarAlgebra> {
    let mut table = Vec::new();
    for s in 0..2u32 {
        for t in 0..2u32 {
            table.push((t, (s + 1) % 2));
        }
    }
    let graph = KGraph::new(ThetaFamily::from_tables(vec![2, 2], vec![table])?)?;
    plain(graph, "Λ_square".into())
}

fn plain(graph: KGraph, label: String) -> Result<StarAlgebra> {
    let ss = make_plain(graph).map_err(|e| failed("construction", e.to_string()))?;
    StarAlgebra::new(ss.with_label(label))
}

/// The algebra of `E(n, n)`.
pub fn bs_nn(n: usize) -> Result<StarAlgebra> {
    let ss = make_odometer(n, n as i64).map_err(|e| failed("construction", e.to_string()))?;
    StarAlgebra::new(ss)
}

fn sv(alg: &StarAlgebra, c: usize, l: u32) -> FormalCombination {
    alg.s_edge(Edge::new(c, l)).expect("edge in range")
}

fn rank_one(alg: &StarAlgebra, a: (usize, u32), b: (usize, u32)) -> FormalCombination {
    let x = sv(alg, a.0, a.1);
    let y = sv(alg, b.0, b.1);
    alg.product(&x, &y.adjoint()).expect("edge products")
}

/// `π: s_{e_i} ↦ s_{e_i}`, `s_{f_j} ↦ u_{aⁿ} s_{e_j}` from the flip graph into `E(n, n)`.
pub fn flip_to_bs(n: usize, dst: &StarAlgebra) -> Result<GeneratorImages> {
    let un = dst.u(n as i64);
    let mut edges = BTreeMap::new();
    for i in 0..n as u32 {
        edges.insert(Edge::new(0, i), sv(dst, 0, i));
        edges.insert(Edge::new(1, i), dst.product(&un, &sv(dst, 0, i))?);
    }
    Ok(GeneratorImages { unitary: None, edges })
}

/// `ρ: v_{e_i} ↦ s_{e_i}`, `v_a ↦ Σ_{i<n−1} s_{e_{i+1}} s_{e_i}* + s_{f_0} s_{e_{n−1}}*`.
pub fn bs_to_flip(n: usize, dst: &StarAlgebra) -> Result<GeneratorImages> {
    let mut u = FormalCombination::zero();
    for i in 0..n as u32 - 1 {
        u = u.add(&rank_one(dst, (0, i + 1), (0, i)));
    }
    u = u.add(&rank_one(dst, (1, 0), (0, n as u32 - 1)));
    let edges = (0..n as u32).map(|i| (Edge::new(0, i), sv(dst, 0, i))).collect();
    Ok(GeneratorImages { unitary: Some(u), edges })
}

/// `W = s_{e_1} s_{e_0}* + s_{f_0} s_{e_1}*` in the flip graph with `n = 2`.
pub fn flip_w(flip: &StarAlgebra) -> FormalCombination {
    rank_one(flip, (0, 1), (0, 0)).add(&rank_one(flip, (1, 0), (0, 1)))
}

/// `F = s_{y_1} s_{x_1}* + s_{y_0} s_{x_0}*` in the square graph.
pub fn square_f(square: &StarAlgebra) -> FormalCombination {
    rank_one(square, (1, 1), (0, 1)).add(&rank_one(square, (1, 0), (0, 0)))
}

/// `π: x_0 ↦ e_0, x_1 ↦ e_1 W*, y_0 ↦ W e_0, y_1 ↦ W e_1 W*`.
pub fn square_to_flip(flip: &StarAlgebra) -> Result<GeneratorImages> {
    let w = flip_w(flip);
    let ws = w.adjoint();
    let (e0, e1) = (sv(flip, 0, 0), sv(flip, 0, 1));
    let mut edges = BTreeMap::new();
    edges.insert(Edge::new(0, 0), e0.clone());
    edges.insert(Edge::new(0, 1), flip.product(&e1, &ws)?);
    edges.insert(Edge::new(1, 0), flip.product(&w, &e0)?);
    edges.insert(Edge::new(1, 1), flip.product_all([&w, &e1, &ws])?);
    Ok(GeneratorImages { unitary: None, edges })
}

/// `ρ: e_0 ↦ x_0, e_1 ↦ x_1 F, f_0 ↦ F² x_0, f_1 ↦ F² x_1 F`.
pub fn flip_to_square(square: &StarAlgebra) -> Result<GeneratorImages> {
    let f = square_f(square);
    let f2 = square.product(&f, &f)?;
    let (x0, x1) = (sv(square, 0, 0), sv(square, 0, 1));
    let mut edges = BTreeMap::new();
    edges.insert(Edge::new(0, 0), x0.clone());
    edges.insert(Edge::new(0, 1), square.product(&x1, &f)?);
    edges.insert(Edge::new(1, 0), square.product(&f2, &x0)?);
    edges.insert(Edge::new(1, 1), square.product_all([&f2, &x1, &f])?);
    Ok(GeneratorImages { unitary: None, edges })
}
