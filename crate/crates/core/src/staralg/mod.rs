//! Exact computation in the span of `s_μ u_g s_ν*`.
//!
//! A [`FormalCombination`] is a finite sum of monomials `(μ, g, ν)` with
//! [`Coefficient`]s. Two combinations may denote the same operator; use
//! [`StarAlgebra::canonical_eq`] to compare them. It refines every monomial
//! to a common bidegree inside each gauge class and compares coefficients,
//! which is sound because monomials of equal bidegree are linearly
//! independent for pseudo-free actions.

pub mod coefficient;
pub mod hom;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::kgraph::{Degree, Edge, KGraphError, Path};
use crate::periodicity::{cycline_structure, phi_pq, CyclineStructure, PeriodicityError};
use crate::selfsim::{PseudoFreeness, SelfSimilarKGraph};

pub use coefficient::{Coefficient, GaussianRational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StarAlgError {
    #[error("action is not pseudo-free: a^{g} fixes {mu} with trivial restriction")]
    NotPseudoFree { g: BigInt, mu: String },
    #[error(transparent)]
    Graph(#[from] KGraphError),
    #[error("monomial {0} is not gauge invariant")]
    NotGaugeInvariant(String),
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("degrees {p} and {q} have different 𝔫-weights")]
    DegreesNotEquivalent { p: Degree, q: Degree },
    #[error("relation {relation} fails: {witness}")]
    RelationFailed { relation: String, witness: String },
    #[error(transparent)]
    Periodicity(PeriodicityError),
}

impl From<PeriodicityError> for StarAlgError {
    fn from(e: PeriodicityError) -> Self {
        match e {
            PeriodicityError::DegreesNotEquivalent { p, q } => StarAlgError::DegreesNotEquivalent { p, q },
            PeriodicityError::UnsupportedFamily(s) => StarAlgError::UnsupportedFamily(s),
            PeriodicityError::Graph(g) => StarAlgError::Graph(g),
            other => StarAlgError::Periodicity(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, StarAlgError>;

/// `s_μ u_{a^g} s_ν*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub mu: Path,
    pub g: BigInt,
    pub nu: Path,
}

impl Monomial {
    pub fn new(mu: Path, g: impl Into<BigInt>, nu: Path) -> Self {
        Monomial { mu, g: g.into(), nu }
    }

    pub fn identity(k: usize) -> Self {
        Self::new(Path::empty(k), 0, Path::empty(k))
    }

    /// `d(μ) − d(ν)`.
    pub fn gdeg(&self) -> Vec<i64> {
        self.mu.degree().diff(&self.nu.degree())
    }

    pub fn adjoint(&self) -> Monomial {
        Monomial {
            mu: self.nu.clone(),
            g: -self.g.clone(),
            nu: self.mu.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.mu.is_empty() && self.nu.is_empty() && self.g.is_zero()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.mu.is_empty() {
            parts.push(format!("s[{}]", self.mu));
        }
        if !self.g.is_zero() {
            parts.push(format!("u[a^{}]", self.g));
        }
        if !self.nu.is_empty() {
            parts.push(format!("s[{}]^*", self.nu));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" * "))
        }
    }
}

/// A finite linear combination of monomials. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FormalCombination {
    terms: BTreeMap<Monomial, Coefficient>,
}

impl FormalCombination {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(m: Monomial) -> Self {
        Self::term(m, Coefficient::one())
    }

    pub fn term(m: Monomial, c: Coefficient) -> Self {
        let mut out = Self::zero();
        out.accumulate(m, c);
        out
    }

    pub fn identity(k: usize) -> Self {
        Self::monomial(Monomial::identity(k))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Coefficient)>) -> Self {
        let mut out = Self::zero();
        for (m, c) in terms {
            out.accumulate(m, c);
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn coefficient(&self, m: &Monomial) -> Coefficient {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn accumulate(&mut self, m: Monomial, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(slot) => {
                *slot = &*slot + &c;
                if slot.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Coefficient::from_int(-1)))
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, x)| (m.clone(), x * c)))
    }

    /// `(μ, g, ν) ↦ (ν, −g, μ)` with conjugated coefficients.
    pub fn adjoint(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (m.adjoint(), c.conj())))
    }

    /// Keeps the monomials of gauge degree `n`.
    pub fn gauge_project(&self, n: &[i64]) -> Self {
        self.filter(|m| m.gdeg() == n)
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    /// The common gauge degree, if every monomial has the same one.
    pub fn homogeneous_degree(&self) -> Option<Vec<i64>> {
        let mut it = self.terms.keys().map(Monomial::gdeg);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }
}

impl From<Monomial> for FormalCombination {
    fn from(m: Monomial) -> Self {
        Self::monomial(m)
    }
}

impl fmt::Display for FormalCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if c.is_one() {
                    m.to_string()
                } else if m.is_identity() {
                    c.to_string()
                } else if c.terms().count() > 1 {
                    format!("({c})·{m}")
                } else {
                    format!("{c}·{m}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize)]
struct TermRepr<'a> {
    mu: &'a Path,
    g: String,
    nu: &'a Path,
    coefficient: String,
}

impl Serialize for FormalCombination {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (m, c) in &self.terms {
            seq.serialize_element(&TermRepr {
                mu: &m.mu,
                g: m.g.to_string(),
                nu: &m.nu,
                coefficient: c.to_string(),
            })?;
        }
        seq.end()
    }
}

/// The symbolic algebra attached to a pseudo-free self-similar k-graph.
#[derive(Debug, Clone)]
pub struct StarAlgebra {
    ss: SelfSimilarKGraph,
}

impl StarAlgebra {
    pub fn new(ss: SelfSimilarKGraph) -> Result<Self> {
        if let PseudoFreeness::Falsified { g, mu } = ss.is_pseudo_free() {
            return Err(StarAlgError::NotPseudoFree { g, mu: mu.to_string() });
        }
        Ok(StarAlgebra { ss })
    }

    pub fn ss(&self) -> &SelfSimilarKGraph {
        &self.ss
    }

    pub fn rank(&self) -> usize {
        self.ss.rank()
    }

    pub fn identity(&self) -> FormalCombination {
        FormalCombination::identity(self.rank())
    }

    /// `u_{a^g}`.
    pub fn u(&self, g: impl Into<BigInt>) -> FormalCombination {
        let k = self.rank();
        Monomial::new(Path::empty(k), g, Path::empty(k)).into()
    }

    /// `s_μ`.
    pub fn s(&self, mu: &Path) -> FormalCombination {
        Monomial::new(mu.clone(), 0, Path::empty(self.rank())).into()
    }

    pub fn s_edge(&self, e: Edge) -> Result<FormalCombination> {
        Ok(self.s(&self.ss.graph().edge_path(e)?))
    }

    pub fn mono_product(&self, x: &Monomial, y: &Monomial) -> Result<FormalCombination> {
        let g = self.ss.graph();
        let mut out = FormalCombination::zero();
        let minus_h = -y.g.clone();
        for (gamma, delta) in g.minimal_common_extensions(&x.nu, &y.mu)? {
            let (g_gamma, g_res) = self.ss.act_restrict(&x.g, &gamma);
            let (delta_pre, back) = self.ss.act_restrict(&minus_h, &delta);
            let m = Monomial {
                mu: g.compose(&x.mu, &g_gamma),
                g: g_res - back,
                nu: g.compose(&y.nu, &delta_pre),
            };
            out.accumulate(m, Coefficient::one());
        }
        Ok(out)
    }

    pub fn product(&self, a: &FormalCombination, b: &FormalCombination) -> Result<FormalCombination> {
        let mut out = FormalCombination::zero();
        for (x, c) in a.terms() {
            for (y, d) in b.terms() {
                let cd = if c.is_one() { d.clone() } else { c * d };
                // mono_product coefficients are all 1
                for m in self.mono_product(x, y)?.terms.into_keys() {
                    out.accumulate(m, cd.clone());
                }
            }
        }
        Ok(out)
    }

    /// Left-to-right product of a list of factors.
    pub fn product_all<'a>(&self, factors: impl IntoIterator<Item = &'a FormalCombination>) -> Result<FormalCombination> {
        let mut acc = self.identity();
        for f in factors {
            acc = self.product(&acc, f)?;
        }
        Ok(acc)
    }

    /// `x^n`; negative powers use `x*`, which is the inverse only for unitaries.
    pub fn power(&self, x: &FormalCombination, n: i64) -> Result<FormalCombination> {
        let base = if n < 0 { x.adjoint() } else { x.clone() };
        let mut acc = self.identity();
        for _ in 0..n.unsigned_abs() {
            acc = self.product(&acc, &base)?;
        }
        Ok(acc)
    }

    /// `Σ_{α∈Λ^r} (μ·(g·α), g|_α, να)`.
    pub fn refine(&self, m: &Monomial, r: &Degree) -> Result<FormalCombination> {
        let g = self.ss.graph();
        let mut out = FormalCombination::zero();
        for alpha in g.enumerate_paths(r)? {
            let (ga, res) = self.ss.act_restrict(&m.g, &alpha);
            let refined = Monomial {
                mu: g.compose(&m.mu, &ga),
                g: res,
                nu: g.compose(&m.nu, &alpha),
            };
            out.accumulate(refined, Coefficient::one());
        }
        Ok(out)
    }

    /// Refines every gauge class of `a` to the join of its right degrees.
    pub fn canonical_form(&self, a: &FormalCombination) -> Result<FormalCombination> {
        let mut classes: BTreeMap<Vec<i64>, Vec<(&Monomial, &Coefficient)>> = BTreeMap::new();
        for (m, c) in a.terms() {
            classes.entry(m.gdeg()).or_default().push((m, c));
        }
        let mut out = FormalCombination::zero();
        for members in classes.values() {
            let k = self.rank();
            let target = members
                .iter()
                .fold(Degree::zero(k), |acc, (m, _)| acc.join(&m.nu.degree()));
            for (m, c) in members {
                let r = target.checked_sub(&m.nu.degree()).expect("join dominates");
                for (refined, e) in self.refine(m, &r)?.terms {
                    out.accumulate(refined, &e * c);
                }
            }
        }
        Ok(out)
    }

    pub fn canonical_eq(&self, a: &FormalCombination, b: &FormalCombination) -> Result<bool> {
        Ok(self.canonical_form(&a.sub(b))?.is_empty())
    }

    pub fn commutes(&self, x: &FormalCombination, y: &FormalCombination) -> Result<bool> {
        self.canonical_eq(&self.product(x, y)?, &self.product(y, x)?)
    }

    pub fn is_unitary(&self, x: &FormalCombination) -> Result<bool> {
        let one = self.identity();
        let xs = x.adjoint();
        Ok(self.canonical_eq(&self.product(x, &xs)?, &one)? && self.canonical_eq(&self.product(&xs, x)?, &one)?)
    }

    /// `u_a` followed by `s_e` for every edge.
    pub fn generators(&self) -> Vec<FormalCombination> {
        let g = self.ss.graph();
        let mut out = vec![self.u(1)];
        for e in g.edges() {
            out.push(self.s(&g.edge_path(e).expect("edge from graph")));
        }
        out
    }

    /// `x` commutes with every generator and every generator's adjoint.
    pub fn commutes_with_generators(&self, x: &FormalCombination) -> Result<bool> {
        for gen in self.generators() {
            if !self.commutes(x, &gen)? || !self.commutes(x, &gen.adjoint())? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every monomial with `d(μ), d(ν) ≤ max` and `|g| ≤ g_bound`.
    pub fn enumerate_monomials(&self, max: &Degree, g_bound: i64) -> Result<Vec<Monomial>> {
        let g = self.ss.graph();
        let mut paths = Vec::new();
        for d in max.below() {
            paths.extend(g.enumerate_paths(&d)?);
        }
        let mut out = Vec::new();
        for mu in &paths {
            for nu in &paths {
                for e in -g_bound..=g_bound {
                    out.push(Monomial::new(mu.clone(), e, nu.clone()));
                }
            }
        }
        Ok(out)
    }

    fn odometer_sizes(&self) -> Result<Vec<usize>> {
        self.ss
            .product_odometer_sizes()
            .ok_or_else(|| StarAlgError::UnsupportedFamily(format!("{} is not a product of odometers", self.ss.label())))
    }

    /// `𝔫^v` for an integer vector `v`.
    fn n_power(sizes: &[usize], v: &[i64]) -> BigRational {
        sizes.iter().zip(v).fold(BigRational::one(), |acc, (&n, &e)| {
            let p = num_traits::pow(BigRational::from_integer(BigInt::from(n)), e.unsigned_abs() as usize);
            if e < 0 {
                acc / p
            } else {
                acc * p
            }
        })
    }

    /// `𝔫^{v/2}` in the radical field.
    fn n_half_power(sizes: &[usize], twice_v: &[i64]) -> Coefficient {
        sizes.iter().zip(twice_v).fold(Coefficient::one(), |acc, (&n, &h)| {
            &acc * &Coefficient::half_power(n as u64, h)
        })
    }

    /// `ω(s_μ u_g s_ν*) = δ_{μν} δ_{g0} 𝔫^{−d(μ)}`, extended linearly.
    pub fn omega(&self, a: &FormalCombination) -> Result<Coefficient> {
        let sizes = self.odometer_sizes()?;
        let mut out = Coefficient::zero();
        for (m, c) in a.terms() {
            if m.mu == m.nu && m.g.is_zero() {
                let d: Vec<i64> = m.mu.degree().entries().iter().map(|&x| -(x as i64)).collect();
                out = &out + &c.scale(&Self::n_power(&sizes, &d));
            }
        }
        Ok(out)
    }

    /// `ω` restricted to the gauge-invariant span.
    pub fn tau(&self, a: &FormalCombination) -> Result<Coefficient> {
        if let Some(m) = a.monomials().find(|m| m.gdeg().iter().any(|&x| x != 0)) {
            return Err(StarAlgError::NotGaugeInvariant(m.to_string()));
        }
        self.omega(a)
    }

    /// The modular scaling `s_μ u_g s_ν* ↦ 𝔫^{−(d(μ)−d(ν))} s_μ u_g s_ν*`.
    pub fn sigma(&self, a: &FormalCombination) -> Result<FormalCombination> {
        let sizes = self.odometer_sizes()?;
        Ok(FormalCombination::from_terms(a.terms().map(|(m, c)| {
            let d: Vec<i64> = m.gdeg().iter().map(|x| -x).collect();
            (m.clone(), c.scale(&Self::n_power(&sizes, &d)))
        })))
    }

    /// `ω(xy) = ω(y σ(x))`.
    pub fn kms_check(&self, x: &FormalCombination, y: &FormalCombination) -> Result<bool> {
        let lhs = self.omega(&self.product(x, y)?)?;
        let rhs = self.omega(&self.product(y, &self.sigma(x)?)?)?;
        Ok(lhs == rhs)
    }

    /// The Tomita operator on the monomial span: the adjoint.
    pub fn s_map(&self, a: &FormalCombination) -> Result<FormalCombination> {
        self.odometer_sizes()?;
        Ok(a.adjoint())
    }

    /// `(μ, g, ν) ↦ 𝔫^{d(μ)−d(ν)}·(ν, −g, μ)`, conjugate-linear.
    pub fn f_map(&self, a: &FormalCombination) -> Result<FormalCombination> {
        self.flip_scaled(a, 2)
    }

    /// `(μ, g, ν) ↦ 𝔫^{(d(μ)−d(ν))/2}·(ν, −g, μ)`, conjugate-linear.
    pub fn j_map(&self, a: &FormalCombination) -> Result<FormalCombination> {
        self.flip_scaled(a, 1)
    }

    fn flip_scaled(&self, a: &FormalCombination, twice: i64) -> Result<FormalCombination> {
        let sizes = self.odometer_sizes()?;
        Ok(FormalCombination::from_terms(a.terms().map(|(m, c)| {
            let v: Vec<i64> = m.gdeg().iter().map(|x| twice * x).collect();
            (m.adjoint(), &c.conj() * &Self::n_half_power(&sizes, &v))
        })))
    }

    /// `Δ^h` for `h = twice_h / 2`: scales by `𝔫^{h·(d(ν)−d(μ))}`.
    pub fn delta_pow(&self, a: &FormalCombination, twice_h: i64) -> Result<FormalCombination> {
        let sizes = self.odometer_sizes()?;
        Ok(FormalCombination::from_terms(a.terms().map(|(m, c)| {
            let v: Vec<i64> = m.gdeg().iter().map(|x| -twice_h * x).collect();
            (m.clone(), c * &Self::n_half_power(&sizes, &v))
        })))
    }

    /// `V_{p,q} = Σ_{μ∈Λ^p} s_μ s_{φ_{p,q}(μ)}*`.
    pub fn build_v(&self, p: &Degree, q: &Degree) -> Result<FormalCombination> {
        let table = phi_pq(&self.ss, p, q)?;
        Ok(FormalCombination::from_terms(
            table
                .forward
                .iter()
                .map(|(mu, phi)| (Monomial::new(mu.clone(), 0, phi.clone()), Coefficient::one())),
        ))
    }

    fn fprime_data(&self) -> Result<Vec<BigInt>> {
        self.ss
            .restriction_vector()
            .ok_or_else(|| StarAlgError::UnsupportedFamily(format!("{} is not of the form Λ(𝟙,𝔪)", self.ss.label())))
    }

    fn m_power(m: &[BigInt], d: &Degree) -> BigInt {
        m.iter().zip(d.entries()).map(|(x, &e)| num_traits::pow(x.clone(), e as usize)).product()
    }

    /// Keeps the monomials with `𝔪^{d(μ)} = 𝔪^{d(ν)}`.
    pub fn fprime_filter(&self, a: &FormalCombination) -> Result<FormalCombination> {
        let m = self.fprime_data()?;
        Ok(a.filter(|x| Self::m_power(&m, &x.mu.degree()) == Self::m_power(&m, &x.nu.degree())))
    }

    pub fn in_fprime(&self, a: &FormalCombination) -> Result<bool> {
        Ok(self.fprime_filter(a)? == *a)
    }

    /// `ab = ba` for `a, b` in the F′ span.
    pub fn fprime_commute_check(&self, a: &FormalCombination, b: &FormalCombination) -> Result<bool> {
        for (x, name) in [(a, "first"), (b, "second")] {
            if !self.in_fprime(x)? {
                return Err(StarAlgError::RelationFailed {
                    relation: "membership in F′".into(),
                    witness: format!("{name} argument {x}"),
                });
            }
        }
        self.commutes(a, b)
    }

    /// `b* a b` lies in the F′ span whenever `a` does.
    pub fn normalizer_check(&self, b: &FormalCombination, a: &FormalCombination) -> Result<bool> {
        if !self.in_fprime(a)? {
            return Err(StarAlgError::RelationFailed {
                relation: "membership in F′".into(),
                witness: a.to_string(),
            });
        }
        let conj = self.product_all([&b.adjoint(), a, b])?;
        self.in_fprime(&conj)
    }

    /// `s_{𝔢ⁿ} u_p s_{𝔢ⁿ}* = s_{𝔢ⁿ⁺¹} u_{p𝔐} s_{𝔢ⁿ⁺¹}*` in `Λ(𝟙, 𝔪)`, where `𝔢`
    /// is the unique path of degree `𝟙`.
    pub fn connecting_map_check(&self, n: u32, p: i64) -> Result<bool> {
        self.fprime_data()?;
        let g = self.ss.graph();
        let k = self.rank();
        let path = |d: u32| -> Result<Path> {
            Ok(g.enumerate_paths(&Degree::splat(k, d))?.remove(0))
        };
        let (en, en1) = (path(n)?, path(n + 1)?);
        let lhs = FormalCombination::monomial(Monomial::new(en.clone(), p, en));
        let big_m = self.ss.connecting_exponent() * p;
        let rhs = FormalCombination::monomial(Monomial::new(en1.clone(), big_m, en1));
        self.canonical_eq(&lhs, &rhs)
    }

    /// Generators `s_μ u_g s_μ*` of the cycline subalgebra of a rank-1 action:
    /// `g` ranges over multiples of the stabiliser period with `|g / period| ≤ ell_bound`.
    pub fn cycline_generators(&self, depth: u32, ell_bound: i64) -> Result<Vec<Monomial>> {
        if self.rank() != 1 {
            return Err(StarAlgError::UnsupportedFamily("cycline generators need rank 1".into()));
        }
        let step = match cycline_structure(&self.ss)? {
            CyclineStructure::Diagonal { period } => period,
            CyclineStructure::TrivialOnly => BigInt::zero(),
            other => {
                return Err(StarAlgError::UnsupportedFamily(format!(
                    "cycline structure {other:?} has no diagonal generator family"
                )))
            }
        };
        let g = self.ss.graph();
        let mut out = Vec::new();
        for d in 0..=depth {
            for mu in g.enumerate_paths(&Degree::new(vec![d]))? {
                for l in -ell_bound..=ell_bound {
                    let m = Monomial::new(mu.clone(), &step * l, mu.clone());
                    if !out.contains(&m) {
                        out.push(m);
                    }
                }
            }
        }
        Ok(out)
    }

    /// The first non-commuting pair in a family, if any.
    pub fn abelian_witness(&self, family: &[Monomial]) -> Result<Option<(Monomial, Monomial)>> {
        for (i, x) in family.iter().enumerate() {
            for y in &family[i + 1..] {
                if !self.commutes(&x.clone().into(), &y.clone().into())? {
                    return Ok(Some((x.clone(), y.clone())));
                }
            }
        }
        Ok(None)
    }
}
