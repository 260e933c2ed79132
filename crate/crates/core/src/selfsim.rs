//! Self-similar ℤ-actions on single-vertex k-graphs.
//!
//! The action of the generator `a` is stored edge by edge: `sigma[i][s]` is
//! the letter of `a·x^i_s` and `rho[i][s]` the exponent of `a|_{x^i_s}`.
//! Everything else (powers, inverses, paths) is derived from that data.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kgraph::{Degree, Edge, KGraph, KGraphError, Path, ThetaKind};

/// The exponent `g` of `a^g ∈ ℤ`.
pub type GroupExponent = BigInt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelfSimError {
    #[error(transparent)]
    Graph(#[from] KGraphError),
    #[error("action spec has {found} colours, graph has {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("colour x{} has {found} table entries, expected {expected}", .color + 1)]
    ShapeMismatch {
        color: usize,
        expected: usize,
        found: usize,
    },
    #[error("sigma for colour x{} is not a permutation", .color + 1)]
    NonBijectiveSigma { color: usize },
    #[error(
        "action incompatible with theta at colours ({}, {}), (s,t) = ({s}, {t}): {lhs} vs {rhs}",
        .i + 1, .j + 1
    )]
    ActCompatibilityViolated {
        i: usize,
        j: usize,
        s: u32,
        t: u32,
        lhs: String,
        rhs: String,
    },
    #[error("self-similarity axiom fails: {witness}")]
    AxiomViolated { witness: String },
    #[error("orbit {orbit} has zero restriction sum")]
    ZeroRestrictionSum { orbit: usize },
    #[error("{0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, SelfSimError>;

/// Edge data for the generator `a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeActionSpec {
    pub sigma: Vec<Vec<u32>>,
    pub rho: Vec<Vec<i64>>,
}

/// Depth of the axiom property check run during validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationOptions {
    /// Paths of degree at most `depth·𝟙` are checked.
    pub depth: u32,
    /// Exponents with `|g| ≤ g_bound` are checked.
    pub g_bound: i64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            depth: 2,
            g_bound: 8,
        }
    }
}

/// One orbit of `a` on the edges of a single colour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub color: usize,
    /// Letters in the order `e, a·e, a²·e, …`, starting from the smallest.
    pub edges: Vec<u32>,
    /// Restriction sum `m` over the orbit.
    pub sum: BigInt,
    // prefix sums of rho along the orbit traversed twice
    prefix: Vec<BigInt>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Outcome of the pseudo-freeness test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PseudoFreeness {
    PseudoFree,
    /// `g·μ = μ` and `g|_μ = 0` with `g ≠ 0`.
    Falsified { g: BigInt, mu: Path },
}

impl PseudoFreeness {
    pub fn holds(&self) -> bool {
        matches!(self, PseudoFreeness::PseudoFree)
    }
}

/// A validated self-similar action of ℤ on a single-vertex k-graph.
#[derive(Debug, Clone)]
pub struct SelfSimilarKGraph {
    graph: KGraph,
    spec: EdgeActionSpec,
    orbits: Vec<Orbit>,
    // (color, letter) -> (orbit index, position in orbit)
    position: Vec<Vec<(usize, usize)>>,
    label: String,
}

impl SelfSimilarKGraph {
    /// Validates `spec` against `graph` with the default check depth.
    pub fn new(graph: KGraph, spec: EdgeActionSpec) -> Result<Self> {
        validate_selfsim(graph, spec, ValidationOptions::default())
    }

    pub fn graph(&self) -> &KGraph {
        &self.graph
    }

    pub fn spec(&self) -> &EdgeActionSpec {
        &self.spec
    }

    pub fn rank(&self) -> usize {
        self.graph.rank()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Replaces the enumeration cap of the underlying graph.
    pub fn with_cap(mut self, cap: u64) -> Self {
        self.graph = self.graph.with_cap(cap);
        self
    }

    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    pub fn orbits_of_color(&self, color: usize) -> impl Iterator<Item = &Orbit> {
        self.orbits.iter().filter(move |o| o.color == color)
    }

    /// `𝔫`, the vector of edge counts.
    pub fn size_vector(&self) -> Vec<usize> {
        self.graph.sizes().to_vec()
    }

    /// `𝔑`, the product of all orbit lengths.
    pub fn orbit_length_product(&self) -> BigInt {
        self.orbits.iter().map(|o| BigInt::from(o.len())).product()
    }

    /// The least `L > 0` with `a^L` fixing every edge.
    pub fn stabilizer_period(&self) -> BigInt {
        self.orbits
            .iter()
            .fold(BigInt::one(), |acc, o| acc.lcm(&BigInt::from(o.len())))
    }

    /// `𝔐`, the product of all orbit restriction sums.
    pub fn connecting_exponent(&self) -> BigInt {
        self.orbits.iter().map(|o| o.sum.clone()).product()
    }

    /// `𝔪` when every colour has a single edge.
    pub fn restriction_vector(&self) -> Option<Vec<BigInt>> {
        if self.graph.sizes().iter().all(|&n| n == 1) {
            Some(self.spec.rho.iter().map(|r| BigInt::from(r[0])).collect())
        } else {
            None
        }
    }

    /// `(n, m)` when this is a rank-1 odometer.
    pub fn odometer_parameters(&self) -> Option<(usize, i64)> {
        if self.rank() != 1 {
            return None;
        }
        let n = self.graph.size(0);
        let m = self.spec.rho[0][n - 1];
        (self.spec == odometer_spec(n, m)).then_some((n, m))
    }

    /// `𝔫` when this is the standard product of odometers on the division graph.
    pub fn product_odometer_sizes(&self) -> Option<Vec<usize>> {
        if !self.graph.is_division() {
            return None;
        }
        let sizes = self.graph.sizes();
        let expected = EdgeActionSpec {
            sigma: sizes.iter().map(|&n| cyclic_shift(n)).collect(),
            rho: sizes.iter().map(|&n| last_only(n, 1)).collect(),
        };
        (self.spec == expected).then(|| sizes.to_vec())
    }

    /// `a^g · e` and the exponent of `a^g|_e`.
    pub fn act_edge(&self, g: &BigInt, e: Edge) -> (Edge, BigInt) {
        let (oi, pos) = self.position[e.color][e.letter as usize];
        let orbit = &self.orbits[oi];
        let len = orbit.len();
        let (q, r) = g.div_mod_floor(&BigInt::from(len));
        let r = r.to_usize().expect("remainder below orbit length");
        let letter = orbit.edges[(pos + r) % len];
        let restriction = q * &orbit.sum + (&orbit.prefix[pos + r] - &orbit.prefix[pos]);
        (Edge::new(e.color, letter), restriction)
    }

    /// `a^g · p`.
    pub fn act(&self, g: &BigInt, p: &Path) -> Path {
        self.act_restrict(g, p).0
    }

    /// The exponent of `a^g|_p`.
    pub fn restrict(&self, g: &BigInt, p: &Path) -> BigInt {
        self.act_restrict(g, p).1
    }

    /// `(a^g · p, a^g|_p)` in one pass along the normal form.
    pub fn act_restrict(&self, g: &BigInt, p: &Path) -> (Path, BigInt) {
        let mut cur = g.clone();
        let mut words = Vec::with_capacity(p.rank());
        for (c, w) in p.words().iter().enumerate() {
            let mut out = Vec::with_capacity(w.len());
            for &l in w {
                let (e, h) = self.act_edge(&cur, Edge::new(c, l));
                out.push(e.letter);
                cur = h;
            }
            words.push(out);
        }
        (Path::from_words_unchecked(words), cur)
    }

    pub fn act_i64(&self, g: i64, p: &Path) -> Path {
        self.act(&BigInt::from(g), p)
    }

    pub fn restrict_i64(&self, g: i64, p: &Path) -> BigInt {
        self.restrict(&BigInt::from(g), p)
    }

    /// `a^{±1}` applied to a single edge straight from the stored tables.
    fn step_edge(&self, forward: bool, e: Edge) -> (Edge, i64) {
        let c = e.color;
        if forward {
            let s = e.letter as usize;
            (Edge::new(c, self.spec.sigma[c][s]), self.spec.rho[c][s])
        } else {
            let s = self.spec.sigma[c]
                .iter()
                .position(|&x| x == e.letter)
                .expect("sigma is a permutation") as u32;
            (Edge::new(c, s), -self.spec.rho[c][s as usize])
        }
    }

    /// `a^g · e` by applying the generator rule `|g|` times. Slow; used as a
    /// cross-check for [`SelfSimilarKGraph::act_edge`].
    pub fn act_edge_by_iteration(&self, g: i64, mut e: Edge) -> (Edge, BigInt) {
        let mut total = 0i64;
        for _ in 0..g.unsigned_abs() {
            let (next, r) = self.step_edge(g > 0, e);
            e = next;
            total += r;
        }
        (e, BigInt::from(total))
    }

    /// Path version of [`SelfSimilarKGraph::act_edge_by_iteration`].
    pub fn act_by_iteration(&self, g: i64, p: &Path) -> (Path, BigInt) {
        let mut cur = BigInt::from(g);
        let mut words = Vec::with_capacity(p.rank());
        for (c, w) in p.words().iter().enumerate() {
            let mut out = Vec::with_capacity(w.len());
            for &l in w {
                let h = cur.to_i64().expect("iteration only for small exponents");
                let (e, r) = self.act_edge_by_iteration(h, Edge::new(c, l));
                out.push(e.letter);
                cur = r;
            }
            words.push(out);
        }
        (Path::from_words_unchecked(words), cur)
    }

    /// Exact pseudo-freeness verdict.
    ///
    /// If `g·μ = μ` and `g|_μ = 0`, peel off the last letter `e` of `μ`: with
    /// `h = g|_{μ'}`, `h` fixes `e` and restricts to 0 there, so `h` is a
    /// multiple of the orbit length `L` and `h|_e = (h/L)·m`. A nonzero orbit
    /// sum forces `h = 0` and the induction continues. A zero orbit sum gives
    /// the witness `(L, e)`.
    pub fn is_pseudo_free(&self) -> PseudoFreeness {
        match self.orbits.iter().find(|o| o.sum.is_zero()) {
            None => PseudoFreeness::PseudoFree,
            Some(o) => {
                let mu = self
                    .graph
                    .edge_path(Edge::new(o.color, o.edges[0]))
                    .expect("edge in range");
                PseudoFreeness::Falsified {
                    g: BigInt::from(o.len()),
                    mu,
                }
            }
        }
    }

    /// Bounded search for `(g, μ)` with `0 < |g| ≤ g_bound`, `d(μ) ≤ depth·𝟙`,
    /// `g·μ = μ` and `g|_μ = 0`. `None` means no violation in range.
    pub fn search_pseudo_free_violation(&self, depth: u32, g_bound: i64) -> Option<(i64, Path)> {
        let top = Degree::splat(self.rank(), depth);
        for n in top.below() {
            if n.is_zero() {
                continue;
            }
            let Ok(paths) = self.graph.enumerate_paths(&n) else {
                continue;
            };
            for g in (1..=g_bound).flat_map(|g| [g, -g]) {
                let gb = BigInt::from(g);
                for p in &paths {
                    let (q, h) = self.act_restrict(&gb, p);
                    if q == *p && h.is_zero() {
                        return Some((g, p.clone()));
                    }
                }
            }
        }
        None
    }
}

impl fmt::Display for SelfSimilarKGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}

/// Closed-form action of `a^g` on `e_s` for the `(n, m)`-odometer, read
/// directly off the product formula for the restriction.
pub fn odometer_formula_oracle(n: usize, m: i64, g: i64, s: u32) -> (u32, i64) {
    let n_i = n as i64;
    let ell = g.div_euclid(n_i);
    let p = g.rem_euclid(n_i);
    let edge = ((s as i64 + p) % n_i) as u32;
    let rho = |t: i64| if t == n_i - 1 { m } else { 0 };
    let exponent = if p == 0 {
        ell * m
    } else {
        ell * m + (0..p).map(|q| rho((s as i64 + q) % n_i)).sum::<i64>()
    };
    (edge, exponent)
}

fn cyclic_shift(n: usize) -> Vec<u32> {
    (0..n as u32).map(|s| (s + 1) % n as u32).collect()
}

fn last_only(n: usize, m: i64) -> Vec<i64> {
    let mut r = vec![0; n];
    r[n - 1] = m;
    r
}

fn odometer_spec(n: usize, m: i64) -> EdgeActionSpec {
    EdgeActionSpec {
        sigma: vec![cyclic_shift(n)],
        rho: vec![last_only(n, m)],
    }
}

fn build_orbits(graph: &KGraph, spec: &EdgeActionSpec) -> (Vec<Orbit>, Vec<Vec<(usize, usize)>>) {
    let mut orbits = Vec::new();
    let mut position = Vec::with_capacity(graph.rank());
    for c in 0..graph.rank() {
        let n = graph.size(c);
        let mut pos = vec![(usize::MAX, 0); n];
        for start in 0..n {
            if pos[start].0 != usize::MAX {
                continue;
            }
            let oi = orbits.len();
            let mut edges = Vec::new();
            let mut s = start;
            loop {
                pos[s] = (oi, edges.len());
                edges.push(s as u32);
                s = spec.sigma[c][s] as usize;
                if s == start {
                    break;
                }
            }
            let mut prefix = Vec::with_capacity(2 * edges.len() + 1);
            prefix.push(BigInt::zero());
            for t in 0..2 * edges.len() {
                let r = spec.rho[c][edges[t % edges.len()] as usize];
                let next = prefix[t].clone() + r;
                prefix.push(next);
            }
            let sum = prefix[edges.len()].clone();
            orbits.push(Orbit {
                color: c,
                edges,
                sum,
                prefix,
            });
        }
        position.push(pos);
    }
    (orbits, position)
}

/// Checks edge data against the graph and builds the action.
///
/// Checks, in order: every `sigma_i` is a permutation; the two sides of the
/// θ-compatibility relation agree as paths for every commuting square; and
/// for every path `p` with `d(p) ≤ depth·𝟙`, every `|g| ≤ g_bound` and every
/// colour `i` with `d(p)_i > 0`, splitting `p = x·r` with `d(x) = ε_i` gives
/// the same action and restriction as the normal-form computation. Splits at
/// single edges imply consistency for every factorisation by induction.
pub fn validate_selfsim(
    graph: KGraph,
    spec: EdgeActionSpec,
    options: ValidationOptions,
) -> Result<SelfSimilarKGraph> {
    let k = graph.rank();
    if spec.sigma.len() != k || spec.rho.len() != k {
        return Err(SelfSimError::RankMismatch {
            expected: k,
            found: spec.sigma.len().max(spec.rho.len()),
        });
    }
    for c in 0..k {
        let n = graph.size(c);
        for table_len in [spec.sigma[c].len(), spec.rho[c].len()] {
            if table_len != n {
                return Err(SelfSimError::ShapeMismatch {
                    color: c,
                    expected: n,
                    found: table_len,
                });
            }
        }
        let mut seen = vec![false; n];
        for &x in &spec.sigma[c] {
            if x as usize >= n || std::mem::replace(&mut seen[x as usize], true) {
                return Err(SelfSimError::NonBijectiveSigma { color: c });
            }
        }
    }
    let (orbits, position) = build_orbits(&graph, &spec);
    let ss = SelfSimilarKGraph {
        graph,
        spec,
        orbits,
        position,
        label: String::new(),
    };
    check_theta_compatibility(&ss)?;
    check_axioms(&ss, options)?;
    Ok(ss)
}

fn check_theta_compatibility(ss: &SelfSimilarKGraph) -> Result<()> {
    let g = &ss.graph;
    let one = BigInt::one();
    for i in 0..g.rank() {
        for j in i + 1..g.rank() {
            for s in 0..g.size(i) as u32 {
                for t in 0..g.size(j) as u32 {
                    let (s2, t2) = g.theta().apply(i, j, s, t);
                    let side = |first: Edge, second: Edge| -> Path {
                        let (e1, h) = ss.act_edge(&one, first);
                        let (e2, _) = ss.act_edge(&h, second);
                        g.normalize_word(&[e1, e2]).expect("edges in range")
                    };
                    let lhs = side(Edge::new(i, s), Edge::new(j, t));
                    let rhs = side(Edge::new(j, t2), Edge::new(i, s2));
                    if lhs != rhs {
                        return Err(SelfSimError::ActCompatibilityViolated {
                            i,
                            j,
                            s,
                            t,
                            lhs: lhs.to_string(),
                            rhs: rhs.to_string(),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_axioms(ss: &SelfSimilarKGraph, options: ValidationOptions) -> Result<()> {
    let g = &ss.graph;
    let k = g.rank();
    let top = Degree::splat(k, options.depth);
    for n in top.below() {
        if n.is_zero() {
            continue;
        }
        let paths = g.enumerate_paths(&n)?;
        for p in &paths {
            for h in -options.g_bound..=options.g_bound {
                let h = BigInt::from(h);
                let (whole, whole_r) = ss.act_restrict(&h, p);
                for i in 0..k {
                    if n.get(i) == 0 {
                        continue;
                    }
                    let (x, rest) = g.factorize(p, &Degree::unit(k, i))?;
                    let (x2, hx) = ss.act_restrict(&h, &x);
                    let (rest2, r2) = ss.act_restrict(&hx, &rest);
                    let split = g.compose(&x2, &rest2);
                    if split != whole || r2 != whole_r {
                        return Err(SelfSimError::AxiomViolated {
                            witness: format!(
                                "g = {h}, p = {p} split after {x}: ({whole}, {whole_r}) vs ({split}, {r2})"
                            ),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

fn require_nonzero_sums(ss: &SelfSimilarKGraph) -> Result<()> {
    match ss.orbits.iter().position(|o| o.sum.is_zero()) {
        Some(orbit) => Err(SelfSimError::ZeroRestrictionSum { orbit }),
        None => Ok(()),
    }
}

/// The `(n, m)`-odometer `E(n, m)`.
pub fn make_odometer(n: usize, m: i64) -> Result<SelfSimilarKGraph> {
    if n == 0 {
        return Err(SelfSimError::InvalidParameter("odometer needs n ≥ 1".into()));
    }
    if m == 0 {
        return Err(SelfSimError::ZeroRestrictionSum { orbit: 0 });
    }
    let graph = KGraph::from_kind(ThetaKind::Trivial, &[n])?;
    Ok(SelfSimilarKGraph::new(graph, odometer_spec(n, m))?.with_label(format!("E({n},{m})")))
}

/// A rank-1 action with the given orbits. Orbit `i` occupies consecutive
/// letters, `a` shifts cyclically inside it, and `rho` lists the restriction
/// exponents along the orbit.
pub fn make_gbs(orbits: &[(usize, Vec<i64>)]) -> Result<SelfSimilarKGraph> {
    let mut sigma = Vec::new();
    let mut rho = Vec::new();
    for (idx, (n, r)) in orbits.iter().enumerate() {
        if *n == 0 || r.len() != *n {
            return Err(SelfSimError::InvalidParameter(format!(
                "orbit {idx} needs {n} ≥ 1 restriction entries, got {}",
                r.len()
            )));
        }
        let base = sigma.len() as u32;
        for s in 0..*n as u32 {
            sigma.push(base + (s + 1) % *n as u32);
        }
        rho.extend_from_slice(r);
    }
    if sigma.is_empty() {
        return Err(SelfSimError::InvalidParameter("no orbits".into()));
    }
    let graph = KGraph::from_kind(ThetaKind::Trivial, &[sigma.len()])?;
    let ss = SelfSimilarKGraph::new(
        graph,
        EdgeActionSpec {
            sigma: vec![sigma],
            rho: vec![rho],
        },
    )?;
    require_nonzero_sums(&ss)?;
    let params: Vec<String> = ss
        .orbits
        .iter()
        .map(|o| format!("({},{})", o.len(), o.sum))
        .collect();
    Ok(ss.with_label(format!("GBS[{}]", params.join(","))))
}

/// `Λ_d(𝔫, 𝟙)`: the division graph with an `(n_i, 1)`-odometer on each colour.
pub fn make_product_of_odometers(sizes: &[usize]) -> Result<SelfSimilarKGraph> {
    let graph = KGraph::from_kind(ThetaKind::Division, sizes)?;
    let spec = EdgeActionSpec {
        sigma: sizes.iter().map(|&n| cyclic_shift(n)).collect(),
        rho: sizes.iter().map(|&n| last_only(n, 1)).collect(),
    };
    let label = format!("Λ_d({})", join(sizes));
    Ok(SelfSimilarKGraph::new(graph, spec)?.with_label(label))
}

/// `Λ(𝟙, 𝔪)`: one edge per colour with `a|_{x_i} = a^{m_i}`.
pub fn make_lambda_one(m: &[i64]) -> Result<SelfSimilarKGraph> {
    if let Some(orbit) = m.iter().position(|&x| x == 0) {
        return Err(SelfSimError::ZeroRestrictionSum { orbit });
    }
    let graph = KGraph::from_kind(ThetaKind::Trivial, &vec![1; m.len()])?;
    let spec = EdgeActionSpec {
        sigma: vec![vec![0]; m.len()],
        rho: m.iter().map(|&x| vec![x]).collect(),
    };
    let label = format!("Λ(𝟙,{})", join(m));
    Ok(SelfSimilarKGraph::new(graph, spec)?.with_label(label))
}

/// The trivial action `a·e = e`, `a|_e = a` on any graph. Its algebra is the
/// tensor product of the graph algebra with `C(𝕋)`.
pub fn make_plain(graph: KGraph) -> Result<SelfSimilarKGraph> {
    let spec = EdgeActionSpec {
        sigma: graph.sizes().iter().map(|&n| (0..n as u32).collect()).collect(),
        rho: graph.sizes().iter().map(|&n| vec![1; n]).collect(),
    };
    Ok(SelfSimilarKGraph::new(graph, spec)?.with_label("plain"))
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn e1(ss: &SelfSimilarKGraph, s: u32) -> Path {
        ss.graph().edge_path(Edge::new(0, s)).unwrap()
    }

    #[test]
    fn odometer_small_examples() {
        let e = make_odometer(3, 5).unwrap();
        assert_eq!(e.act_i64(7, &e1(&e, 1)), e1(&e, 2));
        assert_eq!(e.restrict_i64(7, &e1(&e, 1)), b(10));
        let e23 = make_odometer(2, 3).unwrap();
        assert_eq!(e23.act_i64(1, &e1(&e23, 1)), e1(&e23, 0));
        assert_eq!(e23.restrict_i64(1, &e1(&e23, 1)), b(3));
        let e1m = make_odometer(1, -4).unwrap();
        assert_eq!(e1m.restrict_i64(1, &e1(&e1m, 0)), b(-4));
        assert_eq!(make_odometer(4, 0).unwrap_err(), SelfSimError::ZeroRestrictionSum { orbit: 0 });
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(odometer_formula_oracle(3, 5, 7, 1), (2, 10));
        assert_eq!(odometer_formula_oracle(3, 5, 0, 2), (2, 0));
        assert_eq!(odometer_formula_oracle(4, -3, 4, 1), (1, -3));
        let e = make_odometer(3, 5).unwrap();
        assert_eq!(e.act_edge_by_iteration(7, Edge::new(0, 1)), (Edge::new(0, 2), b(10)));
    }

    #[test]
    fn identity_and_empty_path() {
        let ss = make_product_of_odometers(&[2, 3]).unwrap();
        let p = ss.graph().path(vec![vec![1, 0], vec![2]]).unwrap();
        assert_eq!(ss.act_i64(0, &p), p);
        assert_eq!(ss.restrict_i64(0, &p), b(0));
        assert_eq!(ss.restrict_i64(-17, &ss.graph().empty_path()), b(-17));
    }

    #[test]
    fn gbs_orbits() {
        let ss = make_gbs(&[(2, vec![0, 3]), (3, vec![0, 0, 5])]).unwrap();
        let params: Vec<_> = ss.orbits().iter().map(|o| (o.len(), o.sum.clone())).collect();
        assert_eq!(params, vec![(2, b(3)), (3, b(5))]);
        assert_eq!(ss.orbit_length_product(), b(6));
        assert_eq!(ss.connecting_exponent(), b(15));
        assert_eq!(
            make_gbs(&[(2, vec![1, -1])]).unwrap_err(),
            SelfSimError::ZeroRestrictionSum { orbit: 0 }
        );
    }

    #[test]
    fn gbs_of_odometer_shapes_matches_odometers() {
        let g = make_gbs(&[(3, vec![0, 0, 4])]).unwrap();
        let o = make_odometer(3, 4).unwrap();
        assert_eq!(g.spec(), o.spec());
    }

    #[test]
    fn trivial_theta_rejects_nontrivial_odometers() {
        let graph = KGraph::from_kind(ThetaKind::Trivial, &[2, 2]).unwrap();
        let spec = EdgeActionSpec {
            sigma: vec![vec![1, 0], vec![1, 0]],
            rho: vec![vec![0, 1], vec![0, 1]],
        };
        assert!(matches!(
            SelfSimilarKGraph::new(graph, spec),
            Err(SelfSimError::ActCompatibilityViolated { .. })
        ));
    }

    #[test]
    fn flip_with_equal_odometers_is_valid() {
        for n in 1..4 {
            for m in [-2i64, 1, 3] {
                let graph = KGraph::from_kind(ThetaKind::Flip, &[n, n]).unwrap();
                let spec = EdgeActionSpec {
                    sigma: vec![cyclic_shift(n); 2],
                    rho: vec![last_only(n, m); 2],
                };
                SelfSimilarKGraph::new(graph, spec).unwrap();
            }
        }
    }

    #[test]
    fn flip_with_unequal_odd_restrictions_fails_axioms() {
        // paths agree edge by edge (1 ≡ 3 mod 2) but restrictions do not
        let graph = KGraph::from_kind(ThetaKind::Flip, &[2, 2]).unwrap();
        let spec = EdgeActionSpec {
            sigma: vec![cyclic_shift(2); 2],
            rho: vec![last_only(2, 1), last_only(2, 3)],
        };
        assert!(matches!(
            SelfSimilarKGraph::new(graph, spec),
            Err(SelfSimError::AxiomViolated { .. })
        ));
    }

    #[test]
    fn non_bijective_sigma() {
        let graph = KGraph::from_kind(ThetaKind::Trivial, &[3]).unwrap();
        let spec = EdgeActionSpec {
            sigma: vec![vec![0, 0, 1]],
            rho: vec![vec![1, 1, 1]],
        };
        assert_eq!(
            SelfSimilarKGraph::new(graph, spec).unwrap_err(),
            SelfSimError::NonBijectiveSigma { color: 0 }
        );
    }

    #[test]
    fn lambda_one_restriction_is_multiplicative() {
        let ss = make_lambda_one(&[2, 3]).unwrap();
        for p in 0..3 {
            for q in 0..3 {
                let path = ss.graph().path(vec![vec![0; p], vec![0; q]]).unwrap();
                for n in -5i64..=5 {
                    assert_eq!(ss.act_i64(n, &path), path);
                    assert_eq!(ss.restrict_i64(n, &path), b(n * 2i64.pow(p as u32) * 3i64.pow(q as u32)));
                }
            }
        }
        let triv = make_lambda_one(&[1]).unwrap();
        assert_eq!(triv.restrict_i64(9, &triv.graph().path(vec![vec![0, 0, 0]]).unwrap()), b(9));
    }

    #[test]
    fn pseudo_freeness() {
        assert!(make_odometer(2, 3).unwrap().is_pseudo_free().holds());
        assert!(make_lambda_one(&[2, 3]).unwrap().is_pseudo_free().holds());
        let graph = KGraph::from_kind(ThetaKind::Trivial, &[2]).unwrap();
        let ss = SelfSimilarKGraph::new(
            graph,
            EdgeActionSpec {
                sigma: vec![vec![1, 0]],
                rho: vec![vec![1, -1]],
            },
        )
        .unwrap();
        match ss.is_pseudo_free() {
            PseudoFreeness::Falsified { g, mu } => {
                assert_eq!(g, b(2));
                assert_eq!(ss.act(&g, &mu), mu);
                assert_eq!(ss.restrict(&g, &mu), b(0));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(ss.search_pseudo_free_violation(1, 4).map(|w| w.0.abs()), Some(2));
        assert_eq!(make_odometer(2, 3).unwrap().search_pseudo_free_violation(3, 12), None);
    }

    #[test]
    fn family_detection() {
        let po = make_product_of_odometers(&[2, 3]).unwrap();
        assert_eq!(po.product_odometer_sizes(), Some(vec![2, 3]));
        assert_eq!(po.restriction_vector(), None);
        assert_eq!(make_odometer(3, -2).unwrap().odometer_parameters(), Some((3, -2)));
        assert_eq!(
            make_lambda_one(&[2, 4]).unwrap().restriction_vector(),
            Some(vec![b(2), b(4)])
        );
        assert_eq!(make_gbs(&[(2, vec![0, 3]), (3, vec![0, 0, 5])]).unwrap().odometer_parameters(), None);
    }

    #[test]
    fn stabilizer_period_is_lcm() {
        let ss = make_gbs(&[(2, vec![0, 4]), (2, vec![0, 4])]).unwrap();
        assert_eq!(ss.stabilizer_period(), b(2));
        assert_eq!(ss.orbit_length_product(), b(4));
    }

    #[test]
    fn huge_exponents() {
        let e = make_odometer(3, 5).unwrap();
        let g: BigInt = BigInt::from(10).pow(40) + 1;
        let p = e1(&e, 2);
        // 10^40 ≡ 1 mod 3, so g ≡ 2 mod 3
        assert_eq!(e.act(&g, &p), e1(&e, 1));
        let (_, r) = e.act_restrict(&g, &p);
        assert_eq!(r, (&g - 2) / 3 * 5 + 5);
    }
}
