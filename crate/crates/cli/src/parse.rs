//! Text grammars for words, paths, degrees and star-algebra expressions.
//!
//! Words: `e[0] e[1] a^3`, `x1[0] x2[2] a^-1`, `a`, `1`. `e[s]` is shorthand
//! for `x1[s]`. Letters may be juxtaposed without spaces.
//!
//! Expressions:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (['*' | '·'] unary)*
//! unary   := '-' unary | postfix
//! postfix := atom ('^*' | '^' int)*
//! atom    := int ['/' int] | 'i' | '√' int | 'sqrt(' int ')'
//!          | 's[' word ']' | 'u[' ('a' | 'a^' int | int) ']' | '(' sum ')'
//! ```

use std::iter::Peekable;
use std::str::Chars;

use num_bigint::BigInt;
use rkbs::kgraph::{Degree, Edge, KGraph, Path};
use rkbs::selfsim::SelfSimilarKGraph;
use rkbs::semigroup::{multiply, SemigroupElement};
use rkbs::staralg::{Coefficient, FormalCombination, StarAlgebra};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected {found} at offset {offset} in {input:?}, expected {expected}")]
    Unexpected {
        input: String,
        offset: usize,
        found: String,
        expected: String,
    },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, ParseError>;

/// One letter of a word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Letter {
    Edge(Edge),
    Power(BigInt),
}

struct Cursor<'a> {
    input: &'a str,
    chars: Peekable<Chars<'a>>,
    offset: usize,
}

impl<'a> Cursor<'a> {
    fn new(input: &'a str) -> Self {
        Cursor {
            input,
            chars: input.chars().peekable(),
            offset: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.peek().is_some_and(|c| c.is_whitespace()) {
            self.bump();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        self.offset += c.len_utf8();
        Some(c)
    }

    fn rest(&self) -> &str {
        &self.input[self.offset..]
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            for _ in s.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    fn error(&mut self, expected: &str) -> ParseError {
        let found = match self.peek() {
            Some(c) => format!("{c:?}"),
            None => "end of input".into(),
        };
        ParseError::Unexpected {
            input: self.input.to_string(),
            offset: self.offset,
            found,
            expected: expected.into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("{c:?}")))
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn int(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let mut s = String::new();
        if matches!(self.chars.peek(), Some('-') | Some('+')) {
            s.push(self.bump().expect("peeked"));
        }
        while let Some(&c) = self.chars.peek() {
            if c.is_ascii_digit() {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s.parse().map_err(|_| self.error("an integer"))
    }

    fn small(&mut self) -> Result<u64> {
        let n = self.int()?;
        u64::try_from(n).map_err(|_| self.error("a non-negative integer"))
    }
}

fn letter(cur: &mut Cursor<'_>) -> Result<Option<Letter>> {
    match cur.peek() {
        None => Ok(None),
        Some('e') => {
            cur.bump();
            cur.expect('[')?;
            let s = cur.small()?;
            cur.expect(']')?;
            Ok(Some(Letter::Edge(Edge::new(0, s as u32))))
        }
        Some('x') => {
            cur.bump();
            let c = cur.small()?;
            if c == 0 {
                return Err(ParseError::Invalid("colours are numbered from 1".into()));
            }
            cur.expect('[')?;
            let s = cur.small()?;
            cur.expect(']')?;
            Ok(Some(Letter::Edge(Edge::new(c as usize - 1, s as u32))))
        }
        Some('a') => {
            cur.bump();
            let exp = if cur.eat('^') { cur.int()? } else { BigInt::from(1) };
            Ok(Some(Letter::Power(exp)))
        }
        Some('1') => {
            cur.bump();
            Ok(Some(Letter::Power(BigInt::from(0))))
        }
        Some('∅') => {
            cur.bump();
            Ok(Some(Letter::Power(BigInt::from(0))))
        }
        Some(_) => Err(cur.error("e[s], xc[s], a^n or 1")),
    }
}

fn letters_until(cur: &mut Cursor<'_>, stop: Option<char>) -> Result<Vec<Letter>> {
    let mut out = Vec::new();
    while cur.peek() != stop {
        match letter(cur)? {
            Some(l) => out.push(l),
            None => return Err(cur.error(&format!("{stop:?}"))),
        }
    }
    Ok(out)
}

/// Letters of a word, in order.
pub fn word(input: &str) -> Result<Vec<Letter>> {
    let mut cur = Cursor::new(input);
    letters_until(&mut cur, None)
}

fn edges_to_path(graph: &KGraph, letters: &[Letter]) -> Result<Path> {
    let mut edges = Vec::new();
    for l in letters {
        match l {
            Letter::Edge(e) => edges.push(*e),
            Letter::Power(p) if p == &BigInt::from(0) => {}
            Letter::Power(_) => return Err(ParseError::Invalid("a path cannot contain a".into())),
        }
    }
    graph
        .normalize_word(&edges)
        .map_err(|e| ParseError::Invalid(e.to_string()))
}

/// A path given as any coloured word; the result is in normal form.
pub fn path(graph: &KGraph, input: &str) -> Result<Path> {
    edges_to_path(graph, &word(input)?)
}

/// The canonical form of a word in `S_{ℤ,Λ}`.
pub fn element(ss: &SelfSimilarKGraph, input: &str) -> Result<SemigroupElement> {
    let graph = ss.graph();
    let k = ss.rank();
    let mut acc = SemigroupElement::identity(k);
    for l in word(input)? {
        let factor = match l {
            Letter::Edge(e) => SemigroupElement::new(
                graph
                    .edge_path(e)
                    .map_err(|err| ParseError::Invalid(err.to_string()))?,
                0,
            ),
            Letter::Power(p) => SemigroupElement::new(Path::empty(k), p),
        };
        acc = multiply(ss, &acc, &factor);
    }
    Ok(acc)
}

/// `(2,0)`, `[2,0]`, `2,0` or `2 0`.
pub fn degree(k: usize, input: &str) -> Result<Degree> {
    let trimmed = input.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
    let parts: std::result::Result<Vec<u32>, _> = trimmed
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect();
    let parts = parts.map_err(|_| ParseError::Invalid(format!("bad degree {input:?}")))?;
    if parts.len() != k {
        return Err(ParseError::Invalid(format!(
            "degree {input:?} has {} entries, rank is {k}",
            parts.len()
        )));
    }
    Ok(Degree::new(parts))
}

/// An integer exponent.
pub fn exponent(input: &str) -> Result<BigInt> {
    input
        .trim()
        .parse()
        .map_err(|_| ParseError::Invalid(format!("bad exponent {input:?}")))
}

struct ExprParser<'a, 'b> {
    cur: Cursor<'a>,
    alg: &'b StarAlgebra,
}

type Eval<T> = std::result::Result<T, ExprError>;

/// Failure while parsing or evaluating an expression.
#[derive(Debug, Error)]
pub enum ExprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Algebra(#[from] rkbs::staralg::StarAlgError),
}

impl ExprParser<'_, '_> {
    fn scalar(&self, c: Coefficient) -> FormalCombination {
        self.alg.identity().scale(&c)
    }

    fn sum(&mut self) -> Eval<FormalCombination> {
        let mut acc = self.product()?;
        loop {
            if self.cur.eat('+') {
                acc = acc.add(&self.product()?);
            } else if self.cur.eat('-') {
                acc = acc.sub(&self.product()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Eval<FormalCombination> {
        let mut acc = self.unary()?;
        loop {
            // juxtaposition also multiplies: `(2/3)i`, `2 s[x1[0]]`
            let explicit = self.cur.eat('*') || self.cur.eat('·');
            let implicit = !explicit
                && self
                    .cur
                    .peek()
                    .is_some_and(|c| matches!(c, '(' | 's' | 'u' | 'i' | '√') || c.is_ascii_digit());
            if !explicit && !implicit {
                return Ok(acc);
            }
            let rhs = self.unary()?;
            acc = self.alg.product(&acc, &rhs)?;
        }
    }

    fn unary(&mut self) -> Eval<FormalCombination> {
        if self.cur.eat('-') {
            return Ok(self.unary()?.scale(&Coefficient::from_int(-1)));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Eval<FormalCombination> {
        let mut x = self.atom()?;
        while self.cur.peek() == Some('^') {
            self.cur.bump();
            if self.cur.eat('*') {
                x = x.adjoint();
            } else {
                let n = self.cur.int()?;
                let n = i64::try_from(n).map_err(|_| ParseError::Invalid("power too large".into()))?;
                x = self.alg.power(&x, n)?;
            }
        }
        Ok(x)
    }

    fn atom(&mut self) -> Eval<FormalCombination> {
        match self.cur.peek() {
            Some('(') => {
                self.cur.bump();
                let x = self.sum()?;
                self.cur.expect(')')?;
                Ok(x)
            }
            Some('s') if self.cur.eat_str("sqrt(") => {
                let n = self.cur.small()?;
                self.cur.expect(')')?;
                self.radical(n)
            }
            Some('s') => {
                self.cur.bump();
                self.cur.expect('[')?;
                let letters = letters_until(&mut self.cur, Some(']'))?;
                self.cur.expect(']')?;
                let p = edges_to_path(self.alg.ss().graph(), &letters)?;
                Ok(self.alg.s(&p))
            }
            Some('u') => {
                self.cur.bump();
                self.cur.expect('[')?;
                let g = if self.cur.eat('a') {
                    if self.cur.eat('^') {
                        self.cur.int()?
                    } else {
                        BigInt::from(1)
                    }
                } else {
                    self.cur.int()?
                };
                self.cur.expect(']')?;
                Ok(self.alg.u(g))
            }
            Some('i') => {
                self.cur.bump();
                Ok(self.scalar(Coefficient::i()))
            }
            Some('√') => {
                self.cur.bump();
                let n = self.cur.small()?;
                self.radical(n)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.cur.int()?;
                let q = if self.cur.eat('/') {
                    let den = self.cur.int()?;
                    if den == BigInt::from(0) {
                        return Err(ParseError::Invalid("division by zero".into()).into());
                    }
                    num_rational::BigRational::new(num, den)
                } else {
                    num_rational::BigRational::from_integer(num)
                };
                Ok(self.scalar(Coefficient::from_rational(q)))
            }
            _ => Err(self.cur.error("an expression").into()),
        }
    }

    fn radical(&self, n: u64) -> Eval<FormalCombination> {
        if n == 0 {
            return Ok(FormalCombination::zero());
        }
        Ok(self.scalar(Coefficient::sqrt(n)))
    }
}

/// Parses and evaluates an expression in `alg`.
pub fn expression(alg: &StarAlgebra, input: &str) -> Eval<FormalCombination> {
    let mut p = ExprParser {
        cur: Cursor::new(input),
        alg,
    };
    let x = p.sum()?;
    if !p.cur.at_end() {
        return Err(p.cur.error("end of expression").into());
    }
    Ok(x)
}
