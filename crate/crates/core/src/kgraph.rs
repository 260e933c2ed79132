//! Single-vertex rank-k graphs.
//!
//! A single-vertex k-graph is the monoid generated by `k` colours of edges
//! `x^i_s` (`s < n_i`) subject to the θ-commutation relations
//! `x^i_s x^j_t = x^j_{t'} x^i_{s'}` whenever `θ_ij(s, t) = (s', t')`.
//! Every element has a unique normal form `x^1_{u_1} ··· x^k_{u_k}`, which is
//! what [`Path`] stores.
//!
//! Colours are 0-based in the API and printed 1-based (`x1[0]` is the first
//! edge of the first colour). Letters are 0-based.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on the number of paths any exhaustive operation may produce.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KGraphError {
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("colour x{} has no edges", .color + 1)]
    ZeroSize { color: usize },
    #[error("theta table for colours ({}, {}) has {found} entries, expected {expected}", .i + 1, .j + 1)]
    ShapeMismatch {
        i: usize,
        j: usize,
        expected: usize,
        found: usize,
    },
    #[error("expected {expected} theta tables, found {found}")]
    TableCountMismatch { expected: usize, found: usize },
    #[error("theta table for colours ({}, {}) has an entry out of range", .i + 1, .j + 1)]
    EntryOutOfRange { i: usize, j: usize },
    #[error("theta table for colours ({}, {}) is not a bijection", .i + 1, .j + 1)]
    NonBijectiveTheta { i: usize, j: usize },
    #[error(
        "cubic condition fails for colours ({}, {}, {}) at (s,t,u) = ({s}, {t}, {u}): {first} vs {second}",
        .i + 1, .j + 1, .l + 1
    )]
    CubicConditionViolated {
        i: usize,
        j: usize,
        l: usize,
        s: u32,
        t: u32,
        u: u32,
        first: String,
        second: String,
    },
    #[error("flip permutation needs all sizes equal, got {sizes:?}")]
    FlipSizeMismatch { sizes: Vec<usize> },
    #[error("letter {letter} is out of range for colour x{}", .color + 1)]
    LetterOutOfRange { color: usize, letter: u32 },
    #[error("colour index {color} out of range for a rank-{rank} graph")]
    ColorOutOfRange { color: usize, rank: usize },
    #[error("degree {requested} does not fit inside {available}")]
    DegreeTooLarge {
        requested: Degree,
        available: Degree,
    },
    #[error("degree has {found} components, graph has rank {rank}")]
    RankMismatch { rank: usize, found: usize },
    #[error("enumeration of degree {degree} needs {count} paths, cap is {cap}")]
    SizeOverflow {
        degree: Degree,
        count: String,
        cap: u64,
    },
}

pub type Result<T> = std::result::Result<T, KGraphError>;

/// An element of `ℕ^k`, the value of the degree functor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Degree(Vec<u32>);

impl Degree {
    pub fn new(entries: Vec<u32>) -> Self {
        Degree(entries)
    }

    pub fn zero(k: usize) -> Self {
        Degree(vec![0; k])
    }

    /// `𝟙_k`.
    pub fn ones(k: usize) -> Self {
        Degree(vec![1; k])
    }

    /// Standard basis vector `ε_i`.
    pub fn unit(k: usize, i: usize) -> Self {
        let mut v = vec![0; k];
        v[i] = 1;
        Degree(v)
    }

    pub fn splat(k: usize, value: u32) -> Self {
        Degree(vec![value; k])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&x| x as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Componentwise `self ≤ other`.
    pub fn is_le(&self, other: &Degree) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn join(&self, other: &Degree) -> Degree {
        Degree(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn meet(&self, other: &Degree) -> Degree {
        Degree(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn add(&self, other: &Degree) -> Degree {
        Degree(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other`, if `other ≤ self`.
    pub fn checked_sub(&self, other: &Degree) -> Option<Degree> {
        if !other.is_le(self) {
            return None;
        }
        Some(Degree(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    /// `self - other` as a vector in `ℤ^k`.
    pub fn diff(&self, other: &Degree) -> Vec<i64> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| *a as i64 - *b as i64)
            .collect()
    }

    /// All degrees `d` with `d ≤ self`, in lexicographic order.
    pub fn below(&self) -> Vec<Degree> {
        let mut out = vec![Vec::with_capacity(self.0.len())];
        for &bound in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=bound).map(move |x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(Degree).collect()
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// A coloured edge `x^{color}_{letter}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub color: usize,
    pub letter: u32,
}

impl Edge {
    pub fn new(color: usize, letter: u32) -> Self {
        Edge { color, letter }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}[{}]", self.color + 1, self.letter)
    }
}

/// A morphism of the k-graph, stored in colour-ordered normal form.
///
/// `words[i]` is the sequence of colour-`i` letters. Two paths are equal iff
/// their words are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    words: Vec<Vec<u32>>,
}

impl Path {
    pub fn empty(k: usize) -> Self {
        Path {
            words: vec![Vec::new(); k],
        }
    }

    /// Builds a path from per-colour words without range checks. Use
    /// [`KGraph::path`] for checked construction.
    pub(crate) fn from_words_unchecked(words: Vec<Vec<u32>>) -> Self {
        Path { words }
    }

    pub fn rank(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[Vec<u32>] {
        &self.words
    }

    pub fn degree(&self) -> Degree {
        Degree(self.words.iter().map(|w| w.len() as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(Vec::is_empty)
    }

    /// Letters of the normal form, colour 1 first.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.words
            .iter()
            .enumerate()
            .flat_map(|(c, w)| w.iter().map(move |&l| Edge::new(c, l)))
    }

    pub fn to_word(&self) -> Vec<Edge> {
        self.edges().collect()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        let rank_one = self.rank() == 1;
        for (i, e) in self.edges().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if rank_one {
                write!(f, "e[{}]", e.letter)?;
            } else {
                write!(f, "{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WordRepr {
    Digits(String),
    Letters(Vec<u32>),
}

#[derive(Serialize, Deserialize)]
struct PathRepr {
    words: Vec<WordRepr>,
}

impl Serialize for Path {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let words = self
            .words
            .iter()
            .map(|w| {
                if w.iter().all(|&l| l < 10) {
                    WordRepr::Digits(w.iter().map(|l| char::from(b'0' + *l as u8)).collect())
                } else {
                    WordRepr::Letters(w.clone())
                }
            })
            .collect();
        PathRepr { words }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Path {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PathRepr::deserialize(deserializer)?;
        let mut words = Vec::with_capacity(repr.words.len());
        for w in repr.words {
            words.push(match w {
                WordRepr::Letters(v) => v,
                WordRepr::Digits(s) => s
                    .chars()
                    .map(|c| c.to_digit(10).ok_or_else(|| serde::de::Error::custom(format!("bad digit {c:?}"))))
                    .collect::<std::result::Result<Vec<_>, _>>()?,
            });
        }
        Ok(Path { words })
    }
}

/// Named θ families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaKind {
    Trivial,
    Division,
    Flip,
}

/// The commutation data `{θ_ij : i < j}` together with the edge counts.
///
/// `table(i, j)[s * n_j + t] = (s', t')` encodes `x^i_s x^j_t = x^j_{t'} x^i_{s'}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaFamily {
    sizes: Vec<usize>,
    tables: BTreeMap<(usize, usize), Vec<(u32, u32)>>,
}

impl ThetaFamily {
    /// Builds a family from explicit tables, listed for `(i, j)` with `i < j`
    /// in lexicographic order, each in row-major `(s, t)` order.
    pub fn from_tables(sizes: Vec<usize>, tables: Vec<Vec<(u32, u32)>>) -> Result<Self> {
        check_sizes(&sizes)?;
        let k = sizes.len();
        let expected = k * (k - 1) / 2;
        if tables.len() != expected {
            return Err(KGraphError::TableCountMismatch {
                expected,
                found: tables.len(),
            });
        }
        let mut map = BTreeMap::new();
        let mut it = tables.into_iter();
        for i in 0..k {
            for j in i + 1..k {
                let table = it.next().expect("counted above");
                let want = sizes[i] * sizes[j];
                if table.len() != want {
                    return Err(KGraphError::ShapeMismatch {
                        i,
                        j,
                        expected: want,
                        found: table.len(),
                    });
                }
                if table
                    .iter()
                    .any(|&(s, t)| s as usize >= sizes[i] || t as usize >= sizes[j])
                {
                    return Err(KGraphError::EntryOutOfRange { i, j });
                }
                map.insert((i, j), table);
            }
        }
        Ok(ThetaFamily { sizes, tables: map })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn rank(&self) -> usize {
        self.sizes.len()
    }

    pub fn table(&self, i: usize, j: usize) -> &[(u32, u32)] {
        &self.tables[&(i, j)]
    }

    /// `θ_ij(s, t)`.
    pub fn apply(&self, i: usize, j: usize, s: u32, t: u32) -> (u32, u32) {
        self.tables[&(i, j)][s as usize * self.sizes[j] + t as usize]
    }

    /// Tables in the order accepted by [`ThetaFamily::from_tables`].
    pub fn to_tables(&self) -> Vec<Vec<(u32, u32)>> {
        self.tables.values().cloned().collect()
    }
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(KGraphError::ZeroRank);
    }
    if let Some(color) = sizes.iter().position(|&n| n == 0) {
        return Err(KGraphError::ZeroSize { color });
    }
    Ok(())
}

/// Builds one of the named permutation families.
pub fn make_theta(kind: ThetaKind, sizes: &[usize]) -> Result<ThetaFamily> {
    check_sizes(sizes)?;
    if kind == ThetaKind::Flip && sizes.windows(2).any(|w| w[0] != w[1]) {
        return Err(KGraphError::FlipSizeMismatch {
            sizes: sizes.to_vec(),
        });
    }
    let k = sizes.len();
    let mut tables = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let (ni, nj) = (sizes[i], sizes[j]);
            let mut table = Vec::with_capacity(ni * nj);
            for s in 0..ni {
                for t in 0..nj {
                    table.push(match kind {
                        ThetaKind::Trivial => (s as u32, t as u32),
                        ThetaKind::Flip => (t as u32, s as u32),
                        ThetaKind::Division => {
                            // s + t·n_i = t' + s'·n_j
                            let v = s + t * ni;
                            ((v / nj) as u32, (v % nj) as u32)
                        }
                    });
                }
            }
            tables.push(table);
        }
    }
    ThetaFamily::from_tables(sizes.to_vec(), tables)
}

/// Iterator over `Λ^n`, last position fastest.
#[derive(Debug, Clone)]
pub struct PathIter {
    shape: Vec<u32>,
    radices: Vec<u32>,
    digits: Vec<u32>,
    done: bool,
}

impl Iterator for PathIter {
    type Item = Path;

    fn next(&mut self) -> Option<Path> {
        if self.done {
            return None;
        }
        let mut words = Vec::with_capacity(self.shape.len());
        let mut pos = 0;
        for &x in &self.shape {
            words.push(self.digits[pos..pos + x as usize].to_vec());
            pos += x as usize;
        }
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.radices[i] {
                break;
            }
            self.digits[i] = 0;
        }
        Some(Path { words })
    }
}

/// A validated single-vertex k-graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KGraph {
    theta: ThetaFamily,
    // (s', t') -> (s, t), derived at validation
    inverse: BTreeMap<(usize, usize), Vec<(u32, u32)>>,
    cap: u64,
}

impl KGraph {
    /// Validates a θ family: every table must be a bijection and, for
    /// `k ≥ 3`, every three-colour word must reverse to the same result under
    /// both reduced swap sequences.
    pub fn new(theta: ThetaFamily) -> Result<Self> {
        let sizes = theta.sizes.clone();
        let k = sizes.len();
        let mut inverse = BTreeMap::new();
        for i in 0..k {
            for (j, &nj) in sizes.iter().enumerate().skip(i + 1) {
                let table = theta.table(i, j);
                let mut inv = vec![None; table.len()];
                for (idx, &(s2, t2)) in table.iter().enumerate() {
                    let slot = &mut inv[s2 as usize * nj + t2 as usize];
                    if slot.is_some() {
                        return Err(KGraphError::NonBijectiveTheta { i, j });
                    }
                    *slot = Some(((idx / nj) as u32, (idx % nj) as u32));
                }
                inverse.insert(
                    (i, j),
                    inv.into_iter().map(|x| x.expect("bijection")).collect(),
                );
            }
        }
        let graph = KGraph {
            theta,
            inverse,
            cap: DEFAULT_ENUMERATION_CAP,
        };
        graph.check_cubic()?;
        Ok(graph)
    }

    pub fn from_kind(kind: ThetaKind, sizes: &[usize]) -> Result<Self> {
        KGraph::new(make_theta(kind, sizes)?)
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn theta(&self) -> &ThetaFamily {
        &self.theta
    }

    pub fn rank(&self) -> usize {
        self.theta.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.theta.sizes
    }

    pub fn size(&self, color: usize) -> usize {
        self.theta.sizes[color]
    }

    /// Whether the stored tables coincide with the division family.
    pub fn is_division(&self) -> bool {
        make_theta(ThetaKind::Division, self.sizes())
            .map(|d| d == self.theta)
            .unwrap_or(false)
    }

    fn check_cubic(&self) -> Result<()> {
        let k = self.rank();
        for i in 0..k {
            for j in i + 1..k {
                for l in j + 1..k {
                    for s in 0..self.size(i) as u32 {
                        for t in 0..self.size(j) as u32 {
                            for u in 0..self.size(l) as u32 {
                                let word = [Edge::new(i, s), Edge::new(j, t), Edge::new(l, u)];
                                let first = self.swap_sequence(word, &[0, 1, 0]);
                                let second = self.swap_sequence(word, &[1, 0, 1]);
                                if first != second {
                                    return Err(KGraphError::CubicConditionViolated {
                                        i,
                                        j,
                                        l,
                                        s,
                                        t,
                                        u,
                                        first: format_word(&first),
                                        second: format_word(&second),
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn swap_sequence(&self, mut word: [Edge; 3], positions: &[usize]) -> [Edge; 3] {
        for &p in positions {
            let (a, b) = self.swap(word[p], word[p + 1]);
            word[p] = a;
            word[p + 1] = b;
        }
        word
    }

    /// Rewrites two adjacent edges of different colours into the opposite
    /// colour order.
    pub fn swap(&self, left: Edge, right: Edge) -> (Edge, Edge) {
        debug_assert_ne!(left.color, right.color);
        if left.color < right.color {
            let (s2, t2) = self.theta.apply(left.color, right.color, left.letter, right.letter);
            (Edge::new(right.color, t2), Edge::new(left.color, s2))
        } else {
            // left = x^j_{t'}, right = x^i_{s'}
            let (i, j) = (right.color, left.color);
            let nj = self.size(j);
            let (s, t) = self.inverse[&(i, j)][right.letter as usize * nj + left.letter as usize];
            (Edge::new(i, s), Edge::new(j, t))
        }
    }

    fn check_edge(&self, e: Edge) -> Result<()> {
        if e.color >= self.rank() {
            return Err(KGraphError::ColorOutOfRange {
                color: e.color,
                rank: self.rank(),
            });
        }
        if e.letter as usize >= self.size(e.color) {
            return Err(KGraphError::LetterOutOfRange {
                color: e.color,
                letter: e.letter,
            });
        }
        Ok(())
    }

    fn check_degree(&self, n: &Degree) -> Result<()> {
        if n.rank() != self.rank() {
            return Err(KGraphError::RankMismatch {
                rank: self.rank(),
                found: n.rank(),
            });
        }
        Ok(())
    }

    /// Checked construction of a path from words that are already in normal
    /// form (one word per colour).
    pub fn path(&self, words: Vec<Vec<u32>>) -> Result<Path> {
        if words.len() != self.rank() {
            return Err(KGraphError::RankMismatch {
                rank: self.rank(),
                found: words.len(),
            });
        }
        for (c, w) in words.iter().enumerate() {
            for &l in w {
                self.check_edge(Edge::new(c, l))?;
            }
        }
        Ok(Path { words })
    }

    pub fn empty_path(&self) -> Path {
        Path::empty(self.rank())
    }

    pub fn edge_path(&self, e: Edge) -> Result<Path> {
        self.check_edge(e)?;
        let mut p = self.empty_path();
        p.words[e.color].push(e.letter);
        Ok(p)
    }

    /// All edges, colour by colour.
    pub fn edges(&self) -> Vec<Edge> {
        (0..self.rank())
            .flat_map(|c| (0..self.size(c) as u32).map(move |l| Edge::new(c, l)))
            .collect()
    }

    /// Reorders `word` by adjacent swaps so that its colour sequence becomes
    /// `target`. Letters of one colour keep their relative order.
    fn rearrange(&self, word: &[Edge], target: &[usize]) -> Vec<Edge> {
        let mut slots: Vec<VecDeque<usize>> = vec![VecDeque::new(); self.rank()];
        for (pos, &c) in target.iter().enumerate() {
            slots[c].push_back(pos);
        }
        let mut keyed: Vec<(usize, Edge)> = word
            .iter()
            .map(|e| (slots[e.color].pop_front().expect("colour multisets agree"), *e))
            .collect();
        // insertion sort by target slot
        for start in 1..keyed.len() {
            let mut p = start;
            while p > 0 && keyed[p - 1].0 > keyed[p].0 {
                let (kl, el) = keyed[p - 1];
                let (kr, er) = keyed[p];
                let (a, b) = self.swap(el, er);
                keyed[p - 1] = (kr, a);
                keyed[p] = (kl, b);
                p -= 1;
            }
        }
        keyed.into_iter().map(|(_, e)| e).collect()
    }

    fn path_from_sorted(&self, word: &[Edge]) -> Path {
        let mut p = self.empty_path();
        for e in word {
            p.words[e.color].push(e.letter);
        }
        p
    }

    /// The normal form of an arbitrary coloured word.
    pub fn normalize_word(&self, word: &[Edge]) -> Result<Path> {
        for &e in word {
            self.check_edge(e)?;
        }
        let mut colors: Vec<usize> = word.iter().map(|e| e.color).collect();
        colors.sort_unstable();
        Ok(self.path_from_sorted(&self.rearrange(word, &colors)))
    }

    /// Composition `pq` in the category.
    pub fn compose(&self, p: &Path, q: &Path) -> Path {
        if q.is_empty() {
            return p.clone();
        }
        if p.is_empty() {
            return q.clone();
        }
        let mut word = p.to_word();
        word.extend(q.edges());
        let mut colors: Vec<usize> = word.iter().map(|e| e.color).collect();
        colors.sort_unstable();
        self.path_from_sorted(&self.rearrange(&word, &colors))
    }

    /// The unique factorisation `p = βα` with `d(β) = n`.
    pub fn factorize(&self, p: &Path, n: &Degree) -> Result<(Path, Path)> {
        self.check_degree(n)?;
        let total = p.degree();
        let rest = total
            .checked_sub(n)
            .ok_or_else(|| KGraphError::DegreeTooLarge {
                requested: n.clone(),
                available: total.clone(),
            })?;
        if n.is_zero() {
            return Ok((self.empty_path(), p.clone()));
        }
        if rest.is_zero() {
            return Ok((p.clone(), self.empty_path()));
        }
        let mut target = Vec::with_capacity(p.len());
        for (c, &x) in n.entries().iter().enumerate() {
            target.extend(std::iter::repeat_n(c, x as usize));
        }
        let split = target.len();
        for (c, &x) in rest.entries().iter().enumerate() {
            target.extend(std::iter::repeat_n(c, x as usize));
        }
        let word = self.rearrange(&p.to_word(), &target);
        Ok((
            self.path_from_sorted(&word[..split]),
            self.path_from_sorted(&word[split..]),
        ))
    }

    /// `|Λ^n|`, or `None` if it does not fit in a `u128`.
    pub fn count_paths(&self, n: &Degree) -> Option<u128> {
        let mut count: u128 = 1;
        for (c, &x) in n.entries().iter().enumerate() {
            for _ in 0..x {
                count = count.checked_mul(self.size(c) as u128)?;
            }
        }
        Some(count)
    }

    /// Every path of degree `n`, in lexicographic order of the normal-form word.
    pub fn enumerate_paths(&self, n: &Degree) -> Result<Vec<Path>> {
        Ok(self.paths(n)?.collect())
    }

    /// Lazy version of [`KGraph::enumerate_paths`]; the cap is still enforced
    /// up front.
    pub fn paths(&self, n: &Degree) -> Result<PathIter> {
        self.check_degree(n)?;
        let count = self.count_paths(n);
        match count {
            Some(c) if c <= self.cap as u128 => {}
            _ => {
                return Err(KGraphError::SizeOverflow {
                    degree: n.clone(),
                    count: count.map_or_else(|| "> 2^128".to_string(), |c| c.to_string()),
                    cap: self.cap,
                })
            }
        }
        let radices: Vec<u32> = n
            .entries()
            .iter()
            .enumerate()
            .flat_map(|(c, &x)| std::iter::repeat_n(self.size(c) as u32, x as usize))
            .collect();
        Ok(PathIter {
            shape: n.entries().to_vec(),
            digits: vec![0; radices.len()],
            radices,
            done: false,
        })
    }

    /// If `mu` is a prefix of `tau`, the remainder `tau = mu · rest`.
    pub fn is_prefix(&self, mu: &Path, tau: &Path) -> Option<Path> {
        let n = mu.degree();
        if !n.is_le(&tau.degree()) {
            return None;
        }
        let (prefix, rest) = self.factorize(tau, &n).ok()?;
        (prefix == *mu).then_some(rest)
    }

    /// All `(γ, δ)` with `νγ = αδ` and `d(νγ) = d(ν) ∨ d(α)`.
    pub fn minimal_common_extensions(&self, nu: &Path, alpha: &Path) -> Result<Vec<(Path, Path)>> {
        let dn = nu.degree();
        let da = alpha.degree();
        if da.is_le(&dn) {
            return Ok(self
                .is_prefix(alpha, nu)
                .map(|rest| vec![(self.empty_path(), rest)])
                .unwrap_or_default());
        }
        if dn.is_le(&da) {
            return Ok(self
                .is_prefix(nu, alpha)
                .map(|rest| vec![(rest, self.empty_path())])
                .unwrap_or_default());
        }
        let join = dn.join(&da);
        let gamma_degree = join.checked_sub(&dn).expect("join dominates");
        let mut out = Vec::new();
        for gamma in self.enumerate_paths(&gamma_degree)? {
            let lambda = self.compose(nu, &gamma);
            if let Some(delta) = self.is_prefix(alpha, &lambda) {
                out.push((gamma, delta));
            }
        }
        Ok(out)
    }
}

fn format_word(word: &[Edge]) -> String {
    word.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(c: usize, l: u32) -> Edge {
        Edge::new(c, l)
    }

    fn div23() -> KGraph {
        KGraph::from_kind(ThetaKind::Division, &[2, 3]).unwrap()
    }

    #[test]
    fn division_entry_solves_digit_identity() {
        let th = make_theta(ThetaKind::Division, &[2, 3]).unwrap();
        // brute force: the unique (s', t') in [2]x[3] with 1 + 2*2 = t' + 3 s'
        let hits: Vec<_> = (0..2u32)
            .flat_map(|s2| (0..3u32).map(move |t2| (s2, t2)))
            .filter(|&(s2, t2)| 1 + 2 * 2 == t2 + 3 * s2)
            .collect();
        assert_eq!(hits, vec![(1, 2)]);
        assert_eq!(th.apply(0, 1, 1, 2), (1, 2));
    }

    #[test]
    fn division_with_equal_sizes_is_flip() {
        for n in 1..5 {
            let d = make_theta(ThetaKind::Division, &[n, n, n]).unwrap();
            let f = make_theta(ThetaKind::Flip, &[n, n, n]).unwrap();
            assert_eq!(d, f);
        }
    }

    #[test]
    fn trivial_theta_fixes_origin() {
        let th = make_theta(ThetaKind::Trivial, &[4, 7]).unwrap();
        assert_eq!(th.apply(0, 1, 0, 0), (0, 0));
    }

    #[test]
    fn flip_requires_equal_sizes() {
        assert!(matches!(
            make_theta(ThetaKind::Flip, &[2, 3]),
            Err(KGraphError::FlipSizeMismatch { .. })
        ));
    }

    #[test]
    fn known_families_validate() {
        KGraph::from_kind(ThetaKind::Trivial, &[2, 3, 4, 2]).unwrap();
        KGraph::from_kind(ThetaKind::Division, &[2, 3, 5]).unwrap();
        KGraph::from_kind(ThetaKind::Flip, &[3, 3, 3]).unwrap();
    }

    #[test]
    fn non_bijective_table_rejected() {
        let tables = vec![vec![(0, 0); 4]];
        let th = ThetaFamily::from_tables(vec![2, 2], tables).unwrap();
        assert_eq!(
            KGraph::new(th).unwrap_err(),
            KGraphError::NonBijectiveTheta { i: 0, j: 1 }
        );
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            ThetaFamily::from_tables(vec![2, 2], vec![vec![(0, 0); 3]]),
            Err(KGraphError::ShapeMismatch { .. })
        ));
        assert!(matches!(
            ThetaFamily::from_tables(vec![2, 2], vec![vec![(0, 5); 4]]),
            Err(KGraphError::EntryOutOfRange { .. })
        ));
        assert!(matches!(make_theta(ThetaKind::Trivial, &[2, 0]), Err(KGraphError::ZeroSize { color: 1 })));
    }

    #[test]
    fn mixed_flip_breaks_cubic_condition() {
        let trivial: Vec<(u32, u32)> = (0..2).flat_map(|s| (0..2).map(move |t| (s, t))).collect();
        let flip: Vec<(u32, u32)> = trivial.iter().map(|&(s, t)| (t, s)).collect();
        // x1_s x2_t x3_u reverses to x3_s x2_u x1_t one way and x3_t x2_s x1_u the other
        let th = ThetaFamily::from_tables(vec![2, 2, 2], vec![flip.clone(), trivial, flip]).unwrap();
        let err = KGraph::new(th).unwrap_err();
        match err {
            KGraphError::CubicConditionViolated { i, j, l, first, second, .. } => {
                assert_eq!((i, j, l), (0, 1, 2));
                assert_ne!(first, second);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn normalize_uses_inverse_theta() {
        let g = div23();
        // x^2_0 x^1_1 = x^1_1 x^2_1 since 1 + 2*1 = 0 + 3*1
        let p = g.normalize_word(&[e(1, 0), e(0, 1)]).unwrap();
        assert_eq!(p.words(), &[vec![1], vec![1]]);
        assert_eq!(g.normalize_word(&[]).unwrap(), g.empty_path());
        let sorted = [e(0, 1), e(0, 0), e(1, 2)];
        assert_eq!(g.normalize_word(&sorted).unwrap().words(), &[vec![1, 0], vec![2]]);
        assert!(matches!(
            g.normalize_word(&[e(0, 2)]),
            Err(KGraphError::LetterOutOfRange { color: 0, letter: 2 })
        ));
    }

    #[test]
    fn compose_examples() {
        let g = div23();
        let x22 = g.edge_path(e(1, 2)).unwrap();
        let x11 = g.edge_path(e(0, 1)).unwrap();
        assert_eq!(g.compose(&x22, &g.empty_path()), x22);
        // theta(1,2) = (1,2): x^1_1 x^2_2 = x^2_2 x^1_1
        assert_eq!(g.compose(&x22, &x11).words(), &[vec![1], vec![2]]);
    }

    #[test]
    fn enumerate_counts_and_order() {
        let g = div23();
        assert_eq!(g.enumerate_paths(&Degree::zero(2)).unwrap(), vec![g.empty_path()]);
        let d10 = g.enumerate_paths(&Degree::new(vec![1, 0])).unwrap();
        assert_eq!(d10.iter().map(|p| p.words()[0][0]).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(g.enumerate_paths(&Degree::ones(2)).unwrap().len(), 6);
        let capped = div23().with_cap(5);
        assert!(matches!(
            capped.enumerate_paths(&Degree::ones(2)),
            Err(KGraphError::SizeOverflow { .. })
        ));
    }

    #[test]
    fn factorize_extremes_and_errors() {
        let g = div23();
        let p = g.normalize_word(&[e(1, 2), e(0, 1), e(1, 0)]).unwrap();
        assert_eq!(g.factorize(&p, &p.degree()).unwrap(), (p.clone(), g.empty_path()));
        assert_eq!(g.factorize(&p, &Degree::zero(2)).unwrap(), (g.empty_path(), p.clone()));
        assert!(matches!(
            g.factorize(&p, &Degree::new(vec![2, 0])),
            Err(KGraphError::DegreeTooLarge { .. })
        ));
    }

    #[test]
    fn prefix_examples() {
        let g = div23();
        let tau = g.normalize_word(&[e(0, 1), e(1, 0)]).unwrap();
        assert_eq!(g.is_prefix(&g.empty_path(), &tau), Some(tau.clone()));
        assert_eq!(g.is_prefix(&tau, &tau), Some(g.empty_path()));
        let x10 = g.edge_path(e(0, 0)).unwrap();
        assert_eq!(g.is_prefix(&x10, &tau), None);
    }

    #[test]
    fn common_extensions() {
        let g = div23();
        let x10 = g.edge_path(e(0, 0)).unwrap();
        let x11 = g.edge_path(e(0, 1)).unwrap();
        let x21 = g.edge_path(e(1, 1)).unwrap();
        assert_eq!(
            g.minimal_common_extensions(&x10, &x10).unwrap(),
            vec![(g.empty_path(), g.empty_path())]
        );
        assert!(g.minimal_common_extensions(&x10, &x11).unwrap().is_empty());
        // brute force over gamma in Λ^(0,1), delta in Λ^(1,0)
        let mut brute = Vec::new();
        for gamma in g.enumerate_paths(&Degree::new(vec![0, 1])).unwrap() {
            for delta in g.enumerate_paths(&Degree::new(vec![1, 0])).unwrap() {
                if g.compose(&x10, &gamma) == g.compose(&x21, &delta) {
                    brute.push((gamma.clone(), delta));
                }
            }
        }
        assert_eq!(brute.len(), 1);
        assert_eq!(g.minimal_common_extensions(&x10, &x21).unwrap(), brute);
    }

    #[test]
    fn degree_lattice_ops() {
        let a = Degree::new(vec![1, 3]);
        let b = Degree::new(vec![2, 0]);
        assert_eq!(a.join(&b), Degree::new(vec![2, 3]));
        assert_eq!(a.meet(&b), Degree::new(vec![1, 0]));
        assert_eq!(a.join(&a), a);
        assert_eq!(a.add(&Degree::zero(2)), a);
        assert!(!a.is_le(&b) && !b.is_le(&a));
        assert_eq!(Degree::new(vec![1, 1]).below().len(), 4);
    }

    #[test]
    fn path_json_shapes() {
        let g = KGraph::from_kind(ThetaKind::Trivial, &[2, 12]).unwrap();
        let p = g.path(vec![vec![0, 1, 1], vec![11, 3]]).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"words":["011",[11,3]]}"#);
        let back: Path = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }
}
