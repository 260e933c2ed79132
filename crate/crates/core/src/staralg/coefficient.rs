//! Exact scalars in `ℚ(i, √p₁, …, √p_r)`.
//!
//! A coefficient is a finite sum `Σ_r c_r·√r` with `r` squarefree and
//! `c_r` a Gaussian rational. Since the `√r` for distinct squarefree `r`
//! are linearly independent over `ℚ(i)`, this representation is unique once
//! zero terms are dropped.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `re + im·i` with rational parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussianRational {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::real(BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    fn add(&self, o: &Self) -> Self {
        GaussianRational {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    fn mul(&self, o: &Self) -> Self {
        GaussianRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn scale(&self, q: &BigRational) -> Self {
        GaussianRational {
            re: &self.re * q,
            im: &self.im * q,
        }
    }
}

/// Splits `n ≥ 1` as `s²·r` with `r` squarefree; returns `(s, r)`.
pub fn square_split(n: u64) -> (u64, u64) {
    assert!(n > 0, "square_split of zero");
    let mut s = 1u64;
    let mut r = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            r *= p;
        }
        p += 1;
    }
    (s, r * rest)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Coefficient {
    terms: BTreeMap<u64, GaussianRational>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::default()
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(BigRational::from_integer(n))
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::from_gaussian(1, GaussianRational::real(q))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::from_gaussian(1, GaussianRational::new(BigRational::zero(), BigRational::one()))
    }

    /// `√n` for `n ≥ 1`, simplified.
    pub fn sqrt(n: u64) -> Self {
        let (s, r) = square_split(n);
        Self::from_gaussian(r, GaussianRational::real(BigRational::from_integer(s.into())))
    }

    /// `n^(h/2)` for `n ≥ 1` and any integer `h`.
    pub fn half_power(n: u64, h: i64) -> Self {
        let whole = Integer::div_floor(&h, &2);
        let base = BigRational::from_integer(BigInt::from(n));
        let mut c = Self::from_rational(pow_rational(&base, whole));
        if h.is_odd() {
            c = &c * &Self::sqrt(n);
        }
        c
    }

    fn from_gaussian(radicand: u64, g: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !g.is_zero() {
            terms.insert(radicand, g);
        }
        Coefficient { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        match self.terms.iter().next() {
            Some((1, g)) => self.terms.len() == 1 && g.re.is_one() && g.im.is_zero(),
            _ => false,
        }
    }

    /// `(radicand, gaussian part)` pairs in increasing radicand order.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &GaussianRational)> {
        self.terms.iter().map(|(r, g)| (*r, g))
    }

    /// The rational value, when the coefficient lies in `ℚ`.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (r, g) = self.terms.iter().next()?;
                (*r == 1 && g.im.is_zero()).then(|| g.re.clone())
            }
            _ => None,
        }
    }

    pub fn conj(&self) -> Self {
        Coefficient {
            terms: self.terms.iter().map(|(r, g)| (*r, g.conj())).collect(),
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Coefficient {
            terms: self.terms.iter().map(|(r, g)| (*r, g.scale(q))).collect(),
        }
    }

    fn accumulate(&mut self, radicand: u64, g: GaussianRational) {
        if g.is_zero() {
            return;
        }
        let slot = self.terms.entry(radicand).or_insert_with(GaussianRational::zero);
        *slot = slot.add(&g);
        if slot.is_zero() {
            self.terms.remove(&radicand);
        }
    }
}

fn pow_rational(base: &BigRational, e: i64) -> BigRational {
    let p = num_traits::pow(base.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, o: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        for (r, g) in &o.terms {
            out.accumulate(*r, g.clone());
        }
        out
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, o: &Coefficient) -> Coefficient {
        self + &(-o)
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, o: &Coefficient) -> Coefficient {
        let mut out = Coefficient::zero();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let g = a.gcd(b);
                let radicand = (a / g) * (b / g);
                let factor = BigRational::from_integer(BigInt::from(g));
                out.accumulate(radicand, x.mul(y).scale(&factor));
            }
        }
        out
    }
}

fn fmt_rational(q: &BigRational, wrap: bool) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else if wrap {
        format!("({})", q)
    } else {
        q.to_string()
    }
}

fn fmt_gaussian(g: &GaussianRational, wrap: bool) -> String {
    let unit_im = |q: &BigRational| {
        if q.is_one() {
            "i".to_string()
        } else if *q == -BigRational::one() {
            "-i".to_string()
        } else {
            format!("{}i", fmt_rational(q, true))
        }
    };
    match (g.re.is_zero(), g.im.is_zero()) {
        (_, true) => fmt_rational(&g.re, wrap),
        (true, false) => unit_im(&g.im),
        (false, false) => {
            let sign = if g.im.is_negative() { "-" } else { "+" };
            let im = unit_im(&g.im.abs());
            format!("({}{sign}{im})", g.re)
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(r, g)| {
                if *r == 1 {
                    fmt_gaussian(g, false)
                } else if g.im.is_zero() && g.re.is_one() {
                    format!("√{r}")
                } else if g.im.is_zero() && g.re == -BigRational::one() {
                    format!("-√{r}")
                } else {
                    format!("{}·√{r}", fmt_gaussian(g, true))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
