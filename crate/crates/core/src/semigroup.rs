//! The semigroups `S_{ℕ,Λ}` and `S_{ℤ,Λ}` of a self-similar k-graph.
//!
//! Every element has a unique canonical form `e_μ a^ℓ`, stored as a
//! [`SemigroupElement`]. Multiplication follows
//! `(e_μ a^k)(e_ν a^ℓ) = e_{μ(a^k·ν)} a^{a^k|_ν + ℓ}`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::kgraph::{Degree, Edge, KGraphError, Path};
use crate::selfsim::SelfSimilarKGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemigroupError {
    #[error("letter {0} is not allowed in this mode")]
    InvalidLetter(String),
    #[error("principal ideals of {x} and {y} meet in a non-principal ideal")]
    NotPrincipal { x: String, y: String },
    #[error(transparent)]
    Graph(#[from] KGraphError),
    #[error("search exceeded {0} elements")]
    BoundExceeded(usize),
}

pub type Result<T> = std::result::Result<T, SemigroupError>;

/// Which semigroup the words live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// `S_{ℕ,Λ}`: generated by `a` and the edges.
    N,
    /// `S_{ℤ,Λ}`: `a^{-1}` is also available.
    Z,
}

/// The canonical form `e_μ a^ℓ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SemigroupElement {
    pub path: Path,
    pub exp: BigInt,
}

impl SemigroupElement {
    pub fn new(path: Path, exp: impl Into<BigInt>) -> Self {
        SemigroupElement {
            path,
            exp: exp.into(),
        }
    }

    pub fn identity(k: usize) -> Self {
        SemigroupElement::new(Path::empty(k), 0)
    }
}

impl fmt::Display for SemigroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let has_path = !self.path.is_empty();
        if has_path {
            write!(f, "{}", self.path)?;
        }
        if !self.exp.is_zero() {
            if has_path {
                write!(f, " ")?;
            }
            write!(f, "a^{}", self.exp)?;
        } else if !has_path {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// A letter of a generator word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorLetter {
    A,
    AInv,
    Edge(Edge),
}

impl fmt::Display for GeneratorLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorLetter::A => write!(f, "a"),
            GeneratorLetter::AInv => write!(f, "a^-1"),
            GeneratorLetter::Edge(e) => write!(f, "{e}"),
        }
    }
}

/// `x · y` in canonical form.
pub fn multiply(ss: &SelfSimilarKGraph, x: &SemigroupElement, y: &SemigroupElement) -> SemigroupElement {
    let (moved, r) = ss.act_restrict(&x.exp, &y.path);
    SemigroupElement {
        path: ss.graph().compose(&x.path, &moved),
        exp: r + &y.exp,
    }
}

/// The element represented by a single generator.
pub fn generator(ss: &SelfSimilarKGraph, letter: GeneratorLetter) -> Result<SemigroupElement> {
    let k = ss.rank();
    Ok(match letter {
        GeneratorLetter::A => SemigroupElement::new(Path::empty(k), 1),
        GeneratorLetter::AInv => SemigroupElement::new(Path::empty(k), -1),
        GeneratorLetter::Edge(e) => SemigroupElement::new(ss.graph().edge_path(e)?, 0),
    })
}

/// All generators of `S_{ℕ,Λ}`: `a` followed by the edges.
pub fn generators(ss: &SelfSimilarKGraph) -> Vec<SemigroupElement> {
    std::iter::once(GeneratorLetter::A)
        .chain(ss.graph().edges().into_iter().map(GeneratorLetter::Edge))
        .map(|l| generator(ss, l).expect("edges come from the graph"))
        .collect()
}

/// Folds a generator word into canonical form.
pub fn normalize_generator_word(
    ss: &SelfSimilarKGraph,
    word: &[GeneratorLetter],
    mode: Mode,
) -> Result<SemigroupElement> {
    let mut acc = SemigroupElement::identity(ss.rank());
    for &letter in word {
        if mode == Mode::N && letter == GeneratorLetter::AInv {
            return Err(SemigroupError::InvalidLetter(letter.to_string()));
        }
        acc = multiply(ss, &acc, &generator(ss, letter)?);
    }
    Ok(acc)
}

/// `x^{-1} z` computed in the enveloping `S_{ℤ,Λ}`, when `x`'s path is a
/// prefix of `z`'s.
pub fn left_quotient(
    ss: &SelfSimilarKGraph,
    x: &SemigroupElement,
    z: &SemigroupElement,
) -> Option<SemigroupElement> {
    let rest = ss.graph().is_prefix(&x.path, &z.path)?;
    let neg = -&x.exp;
    let (path, r) = ss.act_restrict(&neg, &rest);
    // x · (path, e) = (x.path · rest, x.exp|_path + e)
    let back = ss.restrict(&x.exp, &path);
    debug_assert_eq!(back, -r);
    Some(SemigroupElement {
        path,
        exp: &z.exp - back,
    })
}

/// Exact membership in `S_{ℕ,Λ}`.
///
/// For each path `μ` the set `{ℓ : e_μ a^ℓ ∈ S_ℕ}` is closed upwards; this
/// computes its least element (`None` when it is all of ℤ).
pub struct Membership<'a> {
    ss: &'a SelfSimilarKGraph,
    memo: HashMap<Path, Option<BigInt>>,
}

impl<'a> Membership<'a> {
    pub fn new(ss: &'a SelfSimilarKGraph) -> Self {
        Membership {
            ss,
            memo: HashMap::new(),
        }
    }

    pub fn contains(&mut self, x: &SemigroupElement) -> bool {
        match self.min_exponent(&x.path) {
            None => true,
            Some(lo) => x.exp >= lo,
        }
    }

    /// Least `ℓ` with `e_μ a^ℓ ∈ S_ℕ`, or `None` when every `ℓ` works.
    ///
    /// A word for `e_μ a^ℓ` starts `a^j x w` with `x` an edge and `w ∈ S_ℕ`.
    /// Peeling `a^j x` off gives
    /// `min(μ) = min_{i, j ≥ 0} [min(h·ν) - h|_ν]` with `x ν = μ`,
    /// `d(x) = ε_i` and `h = a^{-j}|_x`. Along `j = qL + r` the value `h`
    /// moves in steps of `-m` (orbit length `L`, orbit sum `m`) and is
    /// periodic on `ν` modulo its `a`-orbit length `N`, so each residue
    /// class is linear in `q` with slope of sign `m · a^N|_ν`.
    pub fn min_exponent(&mut self, mu: &Path) -> Option<BigInt> {
        if mu.is_empty() {
            return Some(BigInt::zero());
        }
        if let Some(v) = self.memo.get(mu) {
            return v.clone();
        }
        let ss = self.ss;
        let g = ss.graph();
        let k = g.rank();
        let deg = mu.degree();
        let mut best: Option<BigInt> = None;
        let mut unbounded = false;
        'colors: for i in 0..k {
            if deg.get(i) == 0 {
                continue;
            }
            let (x, nu) = g.factorize(mu, &Degree::unit(k, i)).expect("degree fits");
            let edge = x.edges().next().expect("one edge");
            let orbit = ss
                .orbits_of_color(i)
                .find(|o| o.edges.contains(&edge.letter))
                .expect("edge lies in an orbit");
            let len = orbit.len();
            let m = orbit.sum.clone();
            let (n_len, big_r) = orbit_of_path(ss, &nu);
            let period = if m.is_zero() {
                1
            } else {
                let gcd = BigInt::from(n_len).gcd(&m);
                (BigInt::from(n_len) / gcd).to_usize().expect("small orbit")
            };
            if (&m * &big_r).is_negative() {
                unbounded = true;
                break 'colors;
            }
            for r in 0..len {
                let c_r = ss.restrict_i64(-(r as i64), &x);
                for q0 in 0..period {
                    let h = &c_r - &m * BigInt::from(q0);
                    let (moved, rh) = ss.act_restrict(&h, &nu);
                    match self.min_exponent(&moved) {
                        None => {
                            unbounded = true;
                            break 'colors;
                        }
                        Some(f) => {
                            let cand = f - rh;
                            if best.as_ref().is_none_or(|b| cand < *b) {
                                best = Some(cand);
                            }
                        }
                    }
                }
            }
        }
        let result = if unbounded { None } else { best };
        self.memo.insert(mu.clone(), result.clone());
        result
    }
}

/// Length `N` of the `a`-orbit of `nu` and the exponent of `a^N|_ν`.
fn orbit_of_path(ss: &SelfSimilarKGraph, nu: &Path) -> (usize, BigInt) {
    if nu.is_empty() {
        return (1, BigInt::from(1));
    }
    let one = BigInt::from(1);
    let mut cur = ss.act(&one, nu);
    let mut n = 1usize;
    while cur != *nu {
        cur = ss.act(&one, &cur);
        n += 1;
    }
    (n, ss.restrict(&BigInt::from(n), nu))
}

/// The least common right multiple of `x` and `y` in `S_{ℕ,Λ}`.
///
/// `Ok(None)` means `xS ∩ yS = ∅`. A common multiple has path `ρ` extending
/// both paths; for the unique minimal such `ρ = μγ = νδ`, `x` divides
/// `e_ρ a^c` iff `c ≥ x.exp|_{γ'} + min(γ')` with `γ' = a^{-x.exp}·γ`, and the
/// same for `y`. With non-negative restriction data every `min(·)` is 0.
pub fn right_lcm(
    ss: &SelfSimilarKGraph,
    x: &SemigroupElement,
    y: &SemigroupElement,
) -> Result<Option<SemigroupElement>> {
    let mut membership = Membership::new(ss);
    right_lcm_with(ss, &mut membership, x, y)
}

pub fn right_lcm_with(
    ss: &SelfSimilarKGraph,
    membership: &mut Membership<'_>,
    x: &SemigroupElement,
    y: &SemigroupElement,
) -> Result<Option<SemigroupElement>> {
    let not_principal = || SemigroupError::NotPrincipal {
        x: x.to_string(),
        y: y.to_string(),
    };
    let exts = ss.graph().minimal_common_extensions(&x.path, &y.path)?;
    let (gamma, delta) = match exts.as_slice() {
        [] => return Ok(None),
        [one] => one.clone(),
        _ => return Err(not_principal()),
    };
    let rho = ss.graph().compose(&x.path, &gamma);
    let lower = |el: &SemigroupElement, ext: &Path, membership: &mut Membership<'_>| {
        let moved = ss.act(&-&el.exp, ext);
        let r = ss.restrict(&el.exp, &moved);
        membership.min_exponent(&moved).map(|f| r + f)
    };
    let bx = lower(x, &gamma, membership);
    let by = lower(y, &delta, membership);
    let exp = match (bx, by) {
        (Some(a), Some(b)) => a.max(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => return Err(not_principal()),
    };
    Ok(Some(SemigroupElement { path: rho, exp }))
}

/// The generator of `xS ∩ yS`, if the intersection is non-empty.
pub fn ideal_intersection(
    ss: &SelfSimilarKGraph,
    x: &SemigroupElement,
    y: &SemigroupElement,
) -> Result<Option<SemigroupElement>> {
    right_lcm(ss, x, y)
}

/// Every element of `S_{ℕ,Λ}` that is a product of at most `bound`
/// generators, grouped by the least word length reaching it.
pub fn bfs_layers(ss: &SelfSimilarKGraph, bound: usize, cap: usize) -> Result<Vec<Vec<SemigroupElement>>> {
    let gens = generators(ss);
    let mut seen: BTreeSet<SemigroupElement> = BTreeSet::new();
    let id = SemigroupElement::identity(ss.rank());
    seen.insert(id.clone());
    let mut layers = vec![vec![id]];
    for _ in 0..bound {
        let mut next = Vec::new();
        for x in layers.last().expect("non-empty") {
            for g in &gens {
                let y = multiply(ss, x, g);
                if seen.insert(y.clone()) {
                    next.push(y);
                    if seen.len() > cap {
                        return Err(SemigroupError::BoundExceeded(cap));
                    }
                }
            }
        }
        layers.push(next);
    }
    Ok(layers)
}

/// Answer of the bounded membership search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipAnswer {
    Yes,
    Unknown,
}

/// Breadth-first search over products of at most `bound` generators.
pub fn membership_oracle(ss: &SelfSimilarKGraph, candidate: &SemigroupElement, bound: usize) -> MembershipAnswer {
    match bfs_layers(ss, bound, 2_000_000) {
        Ok(layers) if layers.iter().flatten().any(|x| x == candidate) => MembershipAnswer::Yes,
        _ => MembershipAnswer::Unknown,
    }
}
