//! Periodicity, cycline triples and simplicity verdicts.
//!
//! The structural answers cover three families: rank-1 actions (via the
//! orbit data `n_i`, `m_i`), products of odometers `Λ_d(𝔫, 𝟙)` (via the
//! relation lattice of `𝔫` and the address map), and `Λ(𝟙, 𝔪)`. Anything else
//! falls back to depth-bounded checking.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::kgraph::{Degree, KGraph, KGraphError, Path, ThetaKind};
use crate::selfsim::{PseudoFreeness, SelfSimilarKGraph};
use crate::semigroup::{multiply, SemigroupElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PeriodicityError {
    #[error("relation lattice needs nonzero entries")]
    ZeroInput,
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("degrees {p} and {q} have different 𝔫-weights")]
    DegreesNotEquivalent { p: Degree, q: Degree },
    #[error("relation failed: {0}")]
    RelationFailed(String),
    #[error(transparent)]
    Graph(#[from] KGraphError),
}

pub type Result<T> = std::result::Result<T, PeriodicityError>;

/// `{q ∈ ℤ^k : ∏ p_i^{q_i} = 1}` in row Hermite normal form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationLattice {
    pub values: Vec<i64>,
    pub basis: Vec<Vec<i64>>,
}

impl RelationLattice {
    pub fn rank(&self) -> usize {
        self.values.len()
    }

    /// Multiplicative independence.
    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    /// Whether `q` lies in the lattice, decided by the product identity.
    pub fn contains(&self, q: &[i64]) -> bool {
        product_is_one(&self.values, q)
    }
}

impl fmt::Display for RelationLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self
            .basis
            .iter()
            .map(|v| format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "{{{}}}", vs.join(", "))
    }
}

/// `∏ p_i^{q_i} = 1`, checked with exact integers.
pub fn product_is_one(values: &[i64], q: &[i64]) -> bool {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (&p, &e) in values.iter().zip(q) {
        let pow = BigInt::from(p).pow(e.unsigned_abs() as u32);
        if e >= 0 {
            num *= pow;
        } else {
            den *= pow;
        }
    }
    num == den
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Integer kernel of `rows` (each of length `cols`) by column reduction of
/// `[A; I]`.
fn integer_kernel(rows: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    // columns as (A-part, I-part)
    let mut columns: Vec<(Vec<BigInt>, Vec<BigInt>)> = (0..cols)
        .map(|j| {
            let a = rows.iter().map(|r| r[j].clone()).collect();
            let mut id = vec![BigInt::zero(); cols];
            id[j] = BigInt::one();
            (a, id)
        })
        .collect();
    let mut pivot = 0;
    for i in 0..rows.len() {
        loop {
            let nonzero: Vec<usize> = (pivot..cols).filter(|&j| !columns[j].0[i].is_zero()).collect();
            if nonzero.len() <= 1 {
                if let Some(&j) = nonzero.first() {
                    columns.swap(pivot, j);
                    pivot += 1;
                }
                break;
            }
            let &best = nonzero
                .iter()
                .min_by_key(|&&j| columns[j].0[i].abs())
                .expect("non-empty");
            for &j in &nonzero {
                if j == best {
                    continue;
                }
                let q = columns[j].0[i].div_floor(&columns[best].0[i]);
                let (src_a, src_i) = columns[best].clone();
                let col = &mut columns[j];
                for (x, y) in col.0.iter_mut().zip(&src_a) {
                    *x -= &q * y;
                }
                for (x, y) in col.1.iter_mut().zip(&src_i) {
                    *x -= &q * y;
                }
            }
        }
    }
    columns.into_iter().skip(pivot).map(|(_, id)| id).collect()
}

/// Row Hermite normal form: positive pivots, entries above a pivot reduced
/// into `[0, pivot)`, zero rows dropped.
pub fn hermite_rows(mut rows: Vec<Vec<BigInt>>, cols: usize) -> Vec<Vec<BigInt>> {
    let mut r0 = 0;
    for c in 0..cols {
        loop {
            let nonzero: Vec<usize> = (r0..rows.len()).filter(|&r| !rows[r][c].is_zero()).collect();
            if nonzero.len() <= 1 {
                if let Some(&r) = nonzero.first() {
                    rows.swap(r0, r);
                    if rows[r0][c].is_negative() {
                        for x in rows[r0].iter_mut() {
                            *x = -x.clone();
                        }
                    }
                    for above in 0..r0 {
                        let q = rows[above][c].div_floor(&rows[r0][c]);
                        let pivot_row = rows[r0].clone();
                        for (x, y) in rows[above].iter_mut().zip(&pivot_row) {
                            *x -= &q * y;
                        }
                    }
                    r0 += 1;
                }
                break;
            }
            let &best = nonzero
                .iter()
                .min_by_key(|&&r| rows[r][c].abs())
                .expect("non-empty");
            let src = rows[best].clone();
            for &r in &nonzero {
                if r == best {
                    continue;
                }
                let q = rows[r][c].div_floor(&src[c]);
                for (x, y) in rows[r].iter_mut().zip(&src) {
                    *x -= &q * y;
                }
            }
        }
    }
    rows.truncate(r0);
    rows
}

/// The relation lattice of nonzero integers `p`.
///
/// Relations are solved on prime exponents of `|p_i|`; the sign condition
/// `Σ_{p_i < 0} q_i ≡ 0 (mod 2)` enters as an extra row with an auxiliary
/// column of weight 2, which is projected away afterwards.
pub fn relation_lattice(p: &[i64]) -> Result<RelationLattice> {
    if p.contains(&0) {
        return Err(PeriodicityError::ZeroInput);
    }
    let k = p.len();
    let mut primes: BTreeMap<u64, Vec<BigInt>> = BTreeMap::new();
    for (i, &x) in p.iter().enumerate() {
        for (prime, e) in factorize(x.unsigned_abs()) {
            primes.entry(prime).or_insert_with(|| vec![BigInt::zero(); k + 1])[i] = BigInt::from(e);
        }
    }
    let mut rows: Vec<Vec<BigInt>> = primes.into_values().collect();
    let mut sign_row: Vec<BigInt> = p.iter().map(|&x| BigInt::from(u8::from(x < 0))).collect();
    sign_row.push(BigInt::from(2));
    rows.push(sign_row);
    let kernel = integer_kernel(&rows, k + 1);
    let projected: Vec<Vec<BigInt>> = kernel.into_iter().map(|mut v| {
        v.truncate(k);
        v
    }).collect();
    let basis: Vec<Vec<i64>> = hermite_rows(projected, k)
        .into_iter()
        .map(|v| v.iter().map(|x| x.to_i64().expect("small relation")).collect())
        .collect();
    for v in &basis {
        if !product_is_one(p, v) {
            return Err(PeriodicityError::RelationFailed(format!("{v:?} is not a relation of {p:?}")));
        }
    }
    Ok(RelationLattice {
        values: p.to_vec(),
        basis,
    })
}

/// Per-orbit divisibility data of a rank-1 action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rank1Periodicity {
    pub periodic: bool,
    /// `(n_i, m_i, n_i | m_i)` per orbit.
    pub table: Vec<(usize, String, bool)>,
}

/// Periodic iff `n_i | m_i` for every orbit.
pub fn rank1_periodicity(ss: &SelfSimilarKGraph) -> Result<Rank1Periodicity> {
    if ss.rank() != 1 {
        return Err(PeriodicityError::UnsupportedFamily("rank-1 verdict needs rank 1".into()));
    }
    let table: Vec<(usize, String, bool)> = ss
        .orbits()
        .iter()
        .map(|o| (o.len(), o.sum.to_string(), o.sum.is_multiple_of(&BigInt::from(o.len()))))
        .collect();
    Ok(Rank1Periodicity {
        periodic: table.iter().all(|t| t.2),
        table,
    })
}

/// The set of cycline triples of a structurally solved family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CyclineStructure {
    /// Every `(μ, g, ν)` is cycline.
    All,
    /// Only `(μ, 0, μ)`.
    TrivialOnly,
    /// `μ = ν` and `period | g`.
    Diagonal { period: BigInt },
    /// `g = 0`, `𝔫^{d(μ)} = 𝔫^{d(ν)}` and equal addresses.
    Addressed { lattice: RelationLattice },
}

impl CyclineStructure {
    pub fn contains(&self, ss: &SelfSimilarKGraph, mu: &Path, g: &BigInt, nu: &Path) -> bool {
        match self {
            CyclineStructure::All => true,
            CyclineStructure::TrivialOnly => g.is_zero() && mu == nu,
            CyclineStructure::Diagonal { period } => mu == nu && g.is_multiple_of(period),
            CyclineStructure::Addressed { .. } => {
                g.is_zero()
                    && weight(ss, &mu.degree()) == weight(ss, &nu.degree())
                    && addr(ss, mu).ok() == addr(ss, nu).ok()
            }
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, CyclineStructure::TrivialOnly)
    }
}

impl fmt::Display for CyclineStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CyclineStructure::All => write!(f, "every triple (μ, g, ν) is cycline"),
            CyclineStructure::TrivialOnly => write!(f, "only trivial triples (μ, 0, μ)"),
            CyclineStructure::Diagonal { period } => write!(f, "(μ, ℓ·{period}, μ) for ℓ ∈ ℤ"),
            CyclineStructure::Addressed { lattice } => write!(
                f,
                "(μ, 0, ν) with 𝔫^d(μ) = 𝔫^d(ν) and addr(μ) = addr(ν); relation lattice {lattice}"
            ),
        }
    }
}

/// Structural cycline description.
pub fn cycline_structure(ss: &SelfSimilarKGraph) -> Result<CyclineStructure> {
    if ss.rank() == 1 {
        if ss.graph().size(0) == 1 {
            return Ok(CyclineStructure::All);
        }
        require_pseudo_free(ss)?;
        let verdict = rank1_periodicity(ss)?;
        return Ok(if verdict.periodic {
            CyclineStructure::Diagonal {
                period: ss.stabilizer_period(),
            }
        } else {
            CyclineStructure::TrivialOnly
        });
    }
    if ss.restriction_vector().is_some() {
        return Ok(CyclineStructure::All);
    }
    if let Some(sizes) = ss.product_odometer_sizes() {
        let values: Vec<i64> = sizes.iter().map(|&n| n as i64).collect();
        return Ok(CyclineStructure::Addressed {
            lattice: relation_lattice(&values)?,
        });
    }
    Err(PeriodicityError::UnsupportedFamily(format!(
        "no structural cycline description for {}",
        ss.label()
    )))
}

fn require_pseudo_free(ss: &SelfSimilarKGraph) -> Result<()> {
    match ss.is_pseudo_free() {
        PseudoFreeness::PseudoFree => Ok(()),
        PseudoFreeness::Falsified { g, mu } => Err(PeriodicityError::UnsupportedFamily(format!(
            "not pseudo-free: a^{g} fixes {mu} with trivial restriction"
        ))),
    }
}

/// Result of a depth-bounded cycline check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CyclineCheck {
    HoldsToDepth {
        depth: u32,
        /// `None` when every word was checked, else the number of samples.
        samples: Option<usize>,
    },
    Falsified {
        word: Path,
    },
}

impl CyclineCheck {
    pub fn holds(&self) -> bool {
        matches!(self, CyclineCheck::HoldsToDepth { .. })
    }
}

/// Compares `μ(g·w)` and `νw` on their common prefix for every
/// `w ∈ Λ^{D𝟙}`. When `Λ^{D𝟙}` exceeds the graph's enumeration cap, `samples`
/// words are drawn uniformly with the given seed instead.
pub fn is_cycline_to_depth(
    ss: &SelfSimilarKGraph,
    mu: &Path,
    g: &BigInt,
    nu: &Path,
    depth: u32,
    samples: usize,
    seed: u64,
) -> CyclineCheck {
    let graph = ss.graph();
    let k = graph.rank();
    let dw = Degree::splat(k, depth);
    let cut = mu.degree().add(&dw).meet(&nu.degree().add(&dw));
    let check = |w: &Path| -> bool {
        let left = graph.compose(mu, &ss.act(g, w));
        let right = graph.compose(nu, w);
        let l = graph.factorize(&left, &cut).expect("cut below both degrees").0;
        let r = graph.factorize(&right, &cut).expect("cut below both degrees").0;
        l == r
    };
    match graph.paths(&dw) {
        Ok(mut words) => match words.find(|w| !check(w)) {
            Some(word) => CyclineCheck::Falsified { word },
            None => CyclineCheck::HoldsToDepth { depth, samples: None },
        },
        Err(_) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let w = random_path(graph, &dw, &mut rng);
                if !check(&w) {
                    return CyclineCheck::Falsified { word: w };
                }
            }
            CyclineCheck::HoldsToDepth {
                depth,
                samples: Some(samples),
            }
        }
    }
}

/// A uniformly random path of degree `n`.
pub fn random_path<R: Rng>(graph: &KGraph, n: &Degree, rng: &mut R) -> Path {
    let words = n
        .entries()
        .iter()
        .enumerate()
        .map(|(c, &x)| (0..x).map(|_| rng.gen_range(0..graph.size(c) as u32)).collect())
        .collect();
    graph.path(words).expect("letters in range")
}

/// Simplicity and periodicity verdicts with their reasons.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub family: String,
    pub label: String,
    pub pseudo_free: bool,
    pub periodic: bool,
    pub simple: bool,
    /// `None` where no decision procedure is available.
    pub kirchberg: Option<bool>,
    pub justification: Vec<String>,
    pub lattice: Option<RelationLattice>,
    pub cycline: String,
}

impl fmt::Display for StructureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "yes" } else { "no" };
        writeln!(f, "{:<12} {}", "action", self.label)?;
        writeln!(f, "{:<12} {}", "family", self.family)?;
        writeln!(f, "{:<12} {}", "pseudo-free", yn(self.pseudo_free))?;
        writeln!(f, "{:<12} {}", "periodic", yn(self.periodic))?;
        writeln!(f, "{:<12} {}", "simple", yn(self.simple))?;
        writeln!(
            f,
            "{:<12} {}",
            "kirchberg",
            self.kirchberg.map_or("undecided", yn)
        )?;
        if let Some(l) = &self.lattice {
            writeln!(f, "{:<12} {}", "lattice", l)?;
        }
        writeln!(f, "{:<12} {}", "cycline", self.cycline)?;
        for j in &self.justification {
            writeln!(f, "  - {j}")?;
        }
        Ok(())
    }
}

/// Decision content for the solved families.
pub fn simplicity_report(ss: &SelfSimilarKGraph) -> Result<StructureReport> {
    let pseudo_free = ss.is_pseudo_free().holds();
    let cycline = cycline_structure(ss)?;
    let mut justification = Vec::new();
    let label = ss.label().to_string();
    if ss.rank() == 1 {
        let verdict = rank1_periodicity(ss)?;
        for (n, m, d) in &verdict.table {
            justification.push(format!("orbit (n, m) = ({n}, {m}): n {} m", if *d { "|" } else { "∤" }));
        }
        let simple = !verdict.periodic;
        justification.push(if simple {
            "some n_i ∤ m_i, so aperiodic, simple and Kirchberg".to_string()
        } else {
            "every n_i | m_i, so periodic and not simple".to_string()
        });
        return Ok(StructureReport {
            family: "rank 1".into(),
            label,
            pseudo_free,
            periodic: verdict.periodic,
            simple,
            kirchberg: Some(simple),
            justification,
            lattice: None,
            cycline: cycline.to_string(),
        });
    }
    if let Some(m) = ss.restriction_vector() {
        let values: Vec<i64> = m.iter().map(|x| x.to_i64().expect("small")).collect();
        let abs: Vec<i64> = values.iter().map(|x| x.abs()).collect();
        justification.push("one infinite path, every triple is cycline".into());
        return Ok(StructureReport {
            family: "Λ(𝟙,𝔪)".into(),
            label,
            pseudo_free,
            periodic: true,
            simple: false,
            kirchberg: Some(false),
            justification,
            lattice: relation_lattice(&abs).ok(),
            cycline: cycline.to_string(),
        });
    }
    if let CyclineStructure::Addressed { lattice } = &cycline {
        let periodic = !lattice.is_trivial();
        justification.push(if periodic {
            format!("𝔫 has relations {lattice}, so periodic and not simple")
        } else {
            "𝔫 is multiplicatively independent, so aperiodic and simple".to_string()
        });
        return Ok(StructureReport {
            family: "Λ_d(𝔫,𝟙)".into(),
            label,
            pseudo_free,
            periodic,
            simple: !periodic,
            kirchberg: if ss.rank() == 1 { Some(!periodic) } else { None },
            justification,
            lattice: Some(lattice.clone()),
            cycline: cycline.to_string(),
        });
    }
    Err(PeriodicityError::UnsupportedFamily(label))
}

fn product_sizes(ss: &SelfSimilarKGraph) -> Result<Vec<usize>> {
    ss.product_odometer_sizes()
        .ok_or_else(|| PeriodicityError::UnsupportedFamily(format!("{} is not a product of odometers", ss.label())))
}

/// `𝔫^p`.
pub fn weight(ss: &SelfSimilarKGraph, p: &Degree) -> BigInt {
    ss.graph()
        .sizes()
        .iter()
        .zip(p.entries())
        .map(|(&n, &e)| BigInt::from(n).pow(e))
        .product()
}

/// The address of `μ` in `Λ_d(𝔫, 𝟙)`: the unique `r ∈ [𝔫^{d(μ)}]` with
/// `a^r · (zero path) = μ`. Digits are read least significant first along the
/// normal form.
pub fn addr(ss: &SelfSimilarKGraph, mu: &Path) -> Result<BigInt> {
    let sizes = product_sizes(ss)?;
    let mut value = BigInt::zero();
    let mut place = BigInt::one();
    for e in mu.edges() {
        value += &place * e.letter;
        place *= sizes[e.color];
    }
    Ok(value)
}

/// Inverse of [`addr`] at degree `p`.
pub fn path_at_addr(ss: &SelfSimilarKGraph, p: &Degree, address: &BigInt) -> Result<Path> {
    let sizes = product_sizes(ss)?;
    let mut rest = address.clone();
    let mut words = Vec::with_capacity(sizes.len());
    for (c, &x) in p.entries().iter().enumerate() {
        let n = BigInt::from(sizes[c]);
        let mut w = Vec::with_capacity(x as usize);
        for _ in 0..x {
            let (q, r) = rest.div_mod_floor(&n);
            w.push(r.to_u32().expect("digit"));
            rest = q;
        }
        words.push(w);
    }
    Ok(ss.graph().path(words)?)
}

/// The bijection `φ_{p,q}: Λ^p → Λ^q` preserving addresses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiTable {
    pub p: Degree,
    pub q: Degree,
    pub forward: BTreeMap<Path, Path>,
    pub inverse: BTreeMap<Path, Path>,
}

impl PhiTable {
    pub fn apply(&self, mu: &Path) -> Option<&Path> {
        self.forward.get(mu)
    }

    pub fn apply_inverse(&self, nu: &Path) -> Option<&Path> {
        self.inverse.get(nu)
    }
}

/// Builds `φ_{p,q}` and checks `μν = φ(μ)φ^{-1}(ν)` and
/// `φ^{-1}(ν)φ(μ) = νμ` on every pair.
pub fn phi_pq(ss: &SelfSimilarKGraph, p: &Degree, q: &Degree) -> Result<PhiTable> {
    product_sizes(ss)?;
    if weight(ss, p) != weight(ss, q) {
        return Err(PeriodicityError::DegreesNotEquivalent {
            p: p.clone(),
            q: q.clone(),
        });
    }
    let g = ss.graph();
    let mut forward = BTreeMap::new();
    let mut inverse = BTreeMap::new();
    for mu in g.enumerate_paths(p)? {
        let image = path_at_addr(ss, q, &addr(ss, &mu)?)?;
        inverse.insert(image.clone(), mu.clone());
        forward.insert(mu, image);
    }
    for (mu, phi_mu) in &forward {
        for (nu, phi_inv_nu) in &inverse {
            if g.compose(mu, nu) != g.compose(phi_mu, phi_inv_nu) || g.compose(phi_inv_nu, phi_mu) != g.compose(nu, mu) {
                return Err(PeriodicityError::RelationFailed(format!(
                    "φ identities fail at μ = {mu}, ν = {nu}"
                )));
            }
        }
    }
    Ok(PhiTable {
        p: p.clone(),
        q: q.clone(),
        forward,
        inverse,
    })
}

/// The `ℓ` with `ν a^m = a^ℓ μ` for `d(μ) = d(ν)` in `Λ_d(𝔫, 𝟙)`.
pub fn solve_commuting_exponent(ss: &SelfSimilarKGraph, mu: &Path, nu: &Path, m: &BigInt) -> Result<BigInt> {
    if mu.degree() != nu.degree() {
        return Err(PeriodicityError::DegreesNotEquivalent {
            p: mu.degree(),
            q: nu.degree(),
        });
    }
    let ell = m * weight(ss, &mu.degree()) + addr(ss, nu)? - addr(ss, mu)?;
    let k = ss.rank();
    let lhs = multiply(ss, &SemigroupElement::new(Path::empty(k), ell.clone()), &SemigroupElement::new(mu.clone(), 0));
    let rhs = multiply(ss, &SemigroupElement::new(nu.clone(), 0), &SemigroupElement::new(Path::empty(k), m.clone()));
    if lhs != rhs {
        return Err(PeriodicityError::RelationFailed(format!("a^{ell}·{mu} = {lhs} but {nu}·a^{m} = {rhs}")));
    }
    Ok(ell)
}

/// `x ↦ scale·x + shift` over ℚ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineElement {
    pub scale: BigRational,
    pub shift: BigRational,
}

impl AffineElement {
    pub fn new(scale: i64, shift: i64) -> Self {
        AffineElement {
            scale: BigRational::from_integer(scale.into()),
            shift: BigRational::from_integer(shift.into()),
        }
    }

    pub fn identity() -> Self {
        AffineElement::new(1, 0)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &AffineElement) -> AffineElement {
        AffineElement {
            scale: &self.scale * &other.scale,
            shift: &self.scale * &other.shift + &self.shift,
        }
    }

    pub fn pow(&self, n: u32) -> AffineElement {
        (0..n).fold(AffineElement::identity(), |acc, _| acc.compose(self))
    }

    pub fn apply(&self, x: &BigRational) -> BigRational {
        &self.scale * x + &self.shift
    }
}

impl fmt::Display for AffineElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x ↦ {}·x + {}", self.scale, self.shift)
    }
}

/// Outcome of [`affine_presentation_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AffineReport {
    pub p: usize,
    pub q: usize,
    pub relations_checked: usize,
    /// `((k, ℓ), (k', ℓ'))` with `e_k f_ℓ = f_{ℓ'} e_{k'}`.
    pub pairs: Vec<((u32, u32), (u32, u32))>,
}

/// Realizes `z, s, t` as affine maps, checks the defining relations, and
/// matches every mixed relation `e_k f_ℓ = f_{ℓ'} e_{k'}` against the
/// division θ for sizes `(p, q)`.
pub fn affine_presentation_check(p: usize, q: usize) -> Result<AffineReport> {
    if p < 2 || q < 2 {
        return Err(PeriodicityError::RelationFailed(format!("need p, q ≥ 2, got ({p}, {q})")));
    }
    let z = AffineElement::new(1, 1);
    let s = AffineElement::new(p as i64, 0);
    let t = AffineElement::new(q as i64, 0);
    let fail = |what: &str| Err(PeriodicityError::RelationFailed(what.to_string()));
    if s.compose(&t) != t.compose(&s) {
        return fail("st ≠ ts");
    }
    if s.compose(&z) != z.pow(p as u32).compose(&s) {
        return fail("sz ≠ z^p s");
    }
    if t.compose(&z) != z.pow(q as u32).compose(&t) {
        return fail("tz ≠ z^q t");
    }
    let e: Vec<AffineElement> = (0..p as u32).map(|i| z.pow(i).compose(&s)).collect();
    let f: Vec<AffineElement> = (0..q as u32).map(|j| z.pow(j).compose(&t)).collect();
    let theta = crate::kgraph::make_theta(ThetaKind::Division, &[p, q])?;
    let mut pairs = Vec::new();
    for k in 0..p as u32 {
        for l in 0..q as u32 {
            let lhs = e[k as usize].compose(&f[l as usize]);
            let hits: Vec<(u32, u32)> = (0..p as u32)
                .flat_map(|k2| (0..q as u32).map(move |l2| (k2, l2)))
                .filter(|&(k2, l2)| f[l2 as usize].compose(&e[k2 as usize]) == lhs)
                .collect();
            let [(k2, l2)] = hits[..] else {
                return fail(&format!("e_{k} f_{l} = {lhs} has {} matches", hits.len()));
            };
            if theta.apply(0, 1, k, l) != (k2, l2) {
                return fail(&format!(
                    "e_{k} f_{l} = f_{l2} e_{k2} but division θ gives {:?}",
                    theta.apply(0, 1, k, l)
                ));
            }
            pairs.push(((k, l), (k2, l2)));
        }
    }
    Ok(AffineReport {
        p,
        q,
        relations_checked: 3 + pairs.len(),
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selfsim::{make_gbs, make_lambda_one, make_odometer, make_product_of_odometers};

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn lattice_examples() {
        assert!(relation_lattice(&[2, 3]).unwrap().is_trivial());
        assert_eq!(relation_lattice(&[2, 4]).unwrap().basis, vec![vec![2, -1]]);
        assert_eq!(relation_lattice(&[-2, 2]).unwrap().basis, vec![vec![2, -2]]);
        assert_eq!(relation_lattice(&[-1, 3]).unwrap().basis, vec![vec![2, 0]]);
        assert_eq!(relation_lattice(&[1]).unwrap().basis, vec![vec![1]]);
        assert_eq!(relation_lattice(&[2, 0]).unwrap_err(), PeriodicityError::ZeroInput);
    }

    #[test]
    fn lattice_is_order_independent_up_to_permutation() {
        let a = relation_lattice(&[4, 2, 8]).unwrap();
        assert_eq!(a.basis.len(), 2);
        for v in &a.basis {
            assert!(a.contains(v));
        }
    }

    #[test]
    fn rank1_examples() {
        assert!(rank1_periodicity(&make_odometer(2, 6).unwrap()).unwrap().periodic);
        assert!(!rank1_periodicity(&make_odometer(2, 3).unwrap()).unwrap().periodic);
        let gbs = make_gbs(&[(2, vec![0, 4]), (3, vec![0, 0, 5])]).unwrap();
        let v = rank1_periodicity(&gbs).unwrap();
        assert!(!v.periodic);
        assert_eq!(v.table.iter().map(|t| t.2).collect::<Vec<_>>(), vec![true, false]);
    }

    #[test]
    fn cycline_examples() {
        let e26 = make_odometer(2, 6).unwrap();
        let s = cycline_structure(&e26).unwrap();
        let e0 = e26.graph().path(vec![vec![0]]).unwrap();
        assert!(s.contains(&e26, &e0, &b(2), &e0));
        assert!(!s.contains(&e26, &e0, &b(1), &e0));
        assert!(is_cycline_to_depth(&e26, &e26.graph().empty_path(), &b(2), &e26.graph().empty_path(), 6, 0, 0).holds());
        let e23 = make_odometer(2, 3).unwrap();
        assert!(cycline_structure(&e23).unwrap().is_trivial());
        let empty = e23.graph().empty_path();
        assert_eq!(
            is_cycline_to_depth(&e23, &empty, &b(1), &empty, 1, 0, 0),
            CyclineCheck::Falsified {
                word: e23.graph().path(vec![vec![0]]).unwrap()
            }
        );
        assert_eq!(cycline_structure(&make_odometer(1, 5).unwrap()).unwrap(), CyclineStructure::All);
        assert_eq!(cycline_structure(&make_lambda_one(&[2, 3]).unwrap()).unwrap(), CyclineStructure::All);
    }

    #[test]
    fn sampling_kicks_in_above_cap() {
        let ss = make_product_of_odometers(&[2, 4]).unwrap();
        let small = ss.with_cap(10);
        let e = small.graph().empty_path();
        let check = is_cycline_to_depth(&small, &e, &b(0), &e, 3, 50, 7);
        assert_eq!(check, CyclineCheck::HoldsToDepth { depth: 3, samples: Some(50) });
    }

    #[test]
    fn reports() {
        let r = simplicity_report(&make_odometer(2, 4).unwrap()).unwrap();
        assert!(!r.simple && r.periodic);
        let r = simplicity_report(&make_odometer(4, 2).unwrap()).unwrap();
        assert!(r.simple && r.kirchberg == Some(true));
        assert!(simplicity_report(&make_product_of_odometers(&[2, 3]).unwrap()).unwrap().simple);
        let r = simplicity_report(&make_product_of_odometers(&[2, 4]).unwrap()).unwrap();
        assert!(!r.simple);
        assert_eq!(r.lattice.unwrap().basis, vec![vec![2, -1]]);
    }

    #[test]
    fn addr_examples() {
        let ss = make_product_of_odometers(&[2]).unwrap();
        for s1 in 0..2 {
            for s2 in 0..2 {
                let p = ss.graph().path(vec![vec![s1, s2]]).unwrap();
                assert_eq!(addr(&ss, &p).unwrap(), b((s1 + 2 * s2) as i64));
            }
        }
        assert_eq!(addr(&ss, &ss.graph().empty_path()).unwrap(), b(0));
        assert!(matches!(addr(&make_odometer(2, 3).unwrap(), &Path::empty(1)), Err(PeriodicityError::UnsupportedFamily(_))));
    }

    #[test]
    fn addr_matches_orbit_of_zero_path() {
        let ss = make_product_of_odometers(&[2, 3]).unwrap();
        for p in Degree::splat(2, 2).below() {
            let zero = ss.graph().path(p.entries().iter().map(|&x| vec![0; x as usize]).collect()).unwrap();
            let total = weight(&ss, &p).to_i64().unwrap();
            for r in 0..total {
                let mu = ss.act_i64(r, &zero);
                assert_eq!(addr(&ss, &mu).unwrap(), b(r));
            }
        }
    }

    #[test]
    fn phi_examples() {
        let ss = make_product_of_odometers(&[2, 4]).unwrap();
        let p = Degree::new(vec![2, 0]);
        let q = Degree::new(vec![0, 1]);
        let phi = phi_pq(&ss, &p, &q).unwrap();
        let mu = ss.graph().path(vec![vec![1, 0], vec![]]).unwrap();
        assert_eq!(phi.apply(&mu).unwrap(), &ss.graph().path(vec![vec![], vec![1]]).unwrap());
        let id = phi_pq(&ss, &p, &p).unwrap();
        assert!(id.forward.iter().all(|(a, b)| a == b));
        assert!(matches!(
            phi_pq(&ss, &Degree::new(vec![1, 0]), &q),
            Err(PeriodicityError::DegreesNotEquivalent { .. })
        ));
    }

    #[test]
    fn commuting_exponent_examples() {
        let ss = make_product_of_odometers(&[2]).unwrap();
        let g = ss.graph();
        let e0 = g.path(vec![vec![0]]).unwrap();
        let e1 = g.path(vec![vec![1]]).unwrap();
        assert_eq!(solve_commuting_exponent(&ss, &e0, &e0, &b(0)).unwrap(), b(0));
        assert_eq!(solve_commuting_exponent(&ss, &e0, &e1, &b(0)).unwrap(), b(1));
    }

    #[test]
    fn affine_examples() {
        let r = affine_presentation_check(2, 3).unwrap();
        assert!(r.pairs.contains(&((1, 2), (1, 2))));
        let z = AffineElement::new(1, 1);
        let e1 = z.compose(&AffineElement::new(2, 0));
        let f2 = z.pow(2).compose(&AffineElement::new(3, 0));
        assert_eq!(e1.compose(&f2), AffineElement::new(6, 5));
        for (p, q) in [(3, 5), (2, 5), (4, 4)] {
            assert_eq!(affine_presentation_check(p, q).unwrap().pairs.len(), p * q);
        }
    }
}
