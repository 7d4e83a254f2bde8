//! Graded-commutative polynomials with exact rational coefficients.
//!
//! Generators are structural values; their parity is carried in the payload,
//! so no registry lookup is needed to multiply or differentiate.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::jet::JetCoord;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    #[default]
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(bit: u32) -> Parity {
        if bit % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> u32 {
        self as u32
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn flip(self) -> Parity {
        self + Parity::Odd
    }

    /// True when transposing objects of these parities costs a minus sign.
    pub fn koszul(self, other: Parity) -> bool {
        self.is_odd() && other.is_odd()
    }

    /// The sign (−1)^{self} as a rational.
    pub fn sign(self) -> Q {
        if self.is_odd() {
            q(-1)
        } else {
            q(1)
        }
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bit(self.bit() + rhs.bit())
    }
}

impl Mul for Parity {
    type Output = Parity;
    fn mul(self, rhs: Parity) -> Parity {
        Parity::from_bit(self.bit() * rhs.bit())
    }
}

impl std::iter::Sum for Parity {
    fn sum<I: Iterator<Item = Parity>>(iter: I) -> Parity {
        iter.fold(Parity::Even, |a, b| a + b)
    }
}

/// (−1)^{neg} as a rational.
pub fn sign_of(neg: bool) -> Q {
    if neg {
        q(-1)
    } else {
        q(1)
    }
}

/// A base parameter index together with its parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Param {
    pub index: u16,
    pub parity: Parity,
}

/// Generators, ordered first by kind: t < x < dt < Γ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Param(Param),
    Jet(JetCoord),
    Dt(Param),
    Gamma(JetCoord),
}

impl Generator {
    pub fn parity(&self) -> Parity {
        match self {
            Generator::Param(p) => p.parity,
            Generator::Jet(c) => c.parity(),
            Generator::Dt(p) => p.parity.flip(),
            Generator::Gamma(c) => c.parity().flip(),
        }
    }

    pub fn is_gamma(&self) -> bool {
        matches!(self, Generator::Gamma(_))
    }

    pub fn is_dt(&self) -> bool {
        matches!(self, Generator::Dt(_))
    }

    pub fn jet_order(&self) -> usize {
        match self {
            Generator::Jet(c) | Generator::Gamma(c) => c.order(),
            _ => 0,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Param(p) => write!(f, "t[{}]", p.index),
            Generator::Dt(p) => write!(f, "dt[{}]", p.index),
            Generator::Jet(c) => write!(f, "x{}", c.bracket()),
            Generator::Gamma(c) => write!(f, "G{}", c.bracket()),
        }
    }
}

/// Sorted product of generators. Odd generators appear with exponent 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial {
    factors: SmallVec<[(Generator, u32); 4]>,
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.factors.cmp(&other.factors))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn factors(&self) -> &[(Generator, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(_, e)| e).sum()
    }

    pub fn parity(&self) -> Parity {
        self.factors
            .iter()
            .map(|(g, e)| Parity::from_bit(g.parity().bit() * e))
            .sum()
    }

    pub fn count(&self, pred: impl Fn(&Generator) -> bool) -> u32 {
        self.factors
            .iter()
            .filter(|(g, _)| pred(g))
            .map(|(_, e)| e)
            .sum()
    }

    pub fn exponent(&self, g: &Generator) -> u32 {
        self.factors
            .binary_search_by(|(h, _)| h.cmp(g))
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    /// Sort an arbitrary factor list. Returns `None` when an odd factor repeats,
    /// otherwise the canonical monomial and whether the sort cost a sign.
    pub fn canonicalize(factors: &[(Generator, u32)]) -> Option<(Monomial, bool)> {
        let mut odd: Vec<&Generator> = Vec::new();
        for (g, e) in factors {
            if *e == 0 {
                continue;
            }
            if g.parity().is_odd() {
                if *e > 1 {
                    return None;
                }
                odd.push(g);
            }
        }
        let mut neg = false;
        for i in 0..odd.len() {
            for j in i + 1..odd.len() {
                match odd[i].cmp(odd[j]) {
                    std::cmp::Ordering::Greater => neg = !neg,
                    std::cmp::Ordering::Equal => return None,
                    std::cmp::Ordering::Less => {}
                }
            }
        }
        let mut sorted: Vec<(Generator, u32)> =
            factors.iter().filter(|(_, e)| *e > 0).cloned().collect();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: SmallVec<[(Generator, u32); 4]> = SmallVec::new();
        for (g, e) in sorted {
            match out.last_mut() {
                Some((h, f)) if *h == g => *f += e,
                _ => out.push((g, e)),
            }
        }
        Some((Monomial { factors: out }, neg))
    }

    /// Product in the order `self · other`.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        let a = &self.factors;
        let b = &other.factors;
        let mut odd_left: u32 = a.iter().filter(|(g, _)| g.parity().is_odd()).count() as u32;
        let mut out: SmallVec<[(Generator, u32); 4]> = SmallVec::with_capacity(a.len() + b.len());
        let mut neg = false;
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    if a[i].0.parity().is_odd() {
                        odd_left -= 1;
                    }
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    if b[j].0.parity().is_odd() && odd_left % 2 == 1 {
                        neg = !neg;
                    }
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    if a[i].0.parity().is_odd() {
                        return None;
                    }
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().cloned());
        Some((Monomial { factors: out }, neg))
    }

    /// Left derivative: returns the multiplicity, the sign and the remaining monomial.
    pub fn partial(&self, g: &Generator) -> Option<(u32, bool, Monomial)> {
        let pos = self.factors.binary_search_by(|(h, _)| h.cmp(g)).ok()?;
        let e = self.factors[pos].1;
        let neg = if g.parity().is_odd() {
            let before: u32 = self.factors[..pos]
                .iter()
                .filter(|(h, _)| h.parity().is_odd())
                .count() as u32;
            before % 2 == 1
        } else {
            false
        };
        let mut rest = self.factors.clone();
        if e == 1 {
            rest.remove(pos);
        } else {
            rest[pos].1 -= 1;
        }
        Some((e, neg, Monomial { factors: rest }))
    }
}

/// Finite sum of monomials with nonzero rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GradedPoly {
    terms: BTreeMap<Monomial, Q>,
}

impl GradedPoly {
    pub fn zero() -> GradedPoly {
        GradedPoly::default()
    }

    pub fn one() -> GradedPoly {
        GradedPoly::constant(q(1))
    }

    pub fn constant(c: Q) -> GradedPoly {
        GradedPoly::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: Q) -> GradedPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        GradedPoly { terms }
    }

    pub fn generator(g: Generator) -> GradedPoly {
        GradedPoly::term(
            Monomial {
                factors: SmallVec::from_elem((g, 1), 1),
            },
            q(1),
        )
    }

    /// `coeff · f₁ f₂ ⋯` in the given (not necessarily sorted) order.
    pub fn product(factors: &[(Generator, u32)], coeff: Q) -> GradedPoly {
        match Monomial::canonicalize(factors) {
            Some((m, neg)) => GradedPoly::term(m, if neg { -coeff } else { coeff }),
            None => GradedPoly::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coefficient(&Monomial::one())
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> GradedPoly {
        if c.is_zero() {
            return GradedPoly::zero();
        }
        GradedPoly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Parity if homogeneous; zero counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(Monomial::parity);
        let first = it.next().unwrap_or(Parity::Even);
        it.all(|p| p == first).then_some(first)
    }

    pub fn split_parity(&self) -> (GradedPoly, GradedPoly) {
        let (even, odd) = self.filter(|m| !m.parity().is_odd());
        (even, odd)
    }

    /// Split into (matching, rest).
    pub fn filter(&self, pred: impl Fn(&Monomial) -> bool) -> (GradedPoly, GradedPoly) {
        let mut yes = GradedPoly::zero();
        let mut no = GradedPoly::zero();
        for (m, c) in &self.terms {
            if pred(m) {
                yes.terms.insert(m.clone(), c.clone());
            } else {
                no.terms.insert(m.clone(), c.clone());
            }
        }
        (yes, no)
    }

    pub fn generators(&self) -> Vec<Generator> {
        let mut all: Vec<Generator> = self
            .terms
            .keys()
            .flat_map(|m| m.factors.iter().map(|(g, _)| g.clone()))
            .collect();
        all.sort();
        all.dedup();
        all
    }

    pub fn max_jet_order(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|m| m.factors.iter().map(|(g, _)| g.jet_order()))
            .max()
            .unwrap_or(0)
    }

    /// Left partial derivative ∂/∂g.
    pub fn partial(&self, g: &Generator) -> GradedPoly {
        let mut out = GradedPoly::zero();
        for (m, c) in &self.terms {
            if let Some((e, neg, rest)) = m.partial(g) {
                let mut v = c * q(e as i64);
                if neg {
                    v = -v;
                }
                out.add_term(rest, v);
            }
        }
        out
    }

    /// The derivation X with X(g) = image(g), written X(p) = Σ X(g)·∂p/∂g.
    ///
    /// Valid as a graded derivation when every image has parity g̃ + X̃.
    pub fn derivation(&self, mut image: impl FnMut(&Generator) -> Option<GradedPoly>) -> GradedPoly {
        let mut cache: HashMap<Generator, Option<GradedPoly>> = HashMap::new();
        let mut out = GradedPoly::zero();
        for (m, c) in &self.terms {
            for (g, _) in m.factors.iter() {
                let img = cache.entry(g.clone()).or_insert_with(|| image(g));
                let Some(img) = img else { continue };
                if img.is_zero() {
                    continue;
                }
                let (e, neg, rest) = m.partial(g).expect("factor present");
                let mut v = c * q(e as i64);
                if neg {
                    v = -v;
                }
                out += &(&*img * &GradedPoly::term(rest, v));
            }
        }
        out
    }

    /// Algebra homomorphism fixing generators the map declines.
    pub fn substitute(&self, mut map: impl FnMut(&Generator) -> Option<GradedPoly>) -> Result<GradedPoly> {
        let mut cache: HashMap<Generator, Option<GradedPoly>> = HashMap::new();
        let mut out = GradedPoly::zero();
        for (m, c) in &self.terms {
            let mut acc = GradedPoly::constant(c.clone());
            for (g, e) in m.factors.iter() {
                if !cache.contains_key(g) {
                    let img = map(g);
                    if let Some(p) = &img {
                        if !p.is_zero() && p.parity() != Some(g.parity()) {
                            return Err(Error::Parity(format!(
                                "image of {g} is not homogeneous of parity {:?}",
                                g.parity()
                            )));
                        }
                    }
                    cache.insert(g.clone(), img);
                }
                let img = match &cache[g] {
                    Some(p) => p.clone(),
                    None => GradedPoly::generator(g.clone()),
                };
                for _ in 0..*e {
                    acc = &acc * &img;
                }
                if acc.is_zero() {
                    break;
                }
            }
            out += &acc;
        }
        Ok(out)
    }

    /// Rename generators factorwise, re-sorting with Koszul signs.
    pub fn rename(&self, f: impl Fn(&Generator) -> Generator) -> GradedPoly {
        let mut out = GradedPoly::zero();
        for (m, c) in &self.terms {
            let factors: Vec<(Generator, u32)> =
                m.factors.iter().map(|(g, e)| (f(g), *e)).collect();
            if let Some((mm, neg)) = Monomial::canonicalize(&factors) {
                out.add_term(mm, if neg { -c.clone() } else { c.clone() });
            }
        }
        out
    }

    pub fn map_coefficients(&self, f: impl Fn(&Q) -> Q) -> GradedPoly {
        let mut out = GradedPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn max_abs_coefficient(&self) -> Q {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Q::zero)
    }

    pub fn pow(&self, n: u32) -> GradedPoly {
        let mut acc = GradedPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }
}

impl From<Generator> for GradedPoly {
    fn from(g: Generator) -> Self {
        GradedPoly::generator(g)
    }
}

impl AddAssign<&GradedPoly> for GradedPoly {
    fn add_assign(&mut self, rhs: &GradedPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&GradedPoly> for GradedPoly {
    fn sub_assign(&mut self, rhs: &GradedPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add for &GradedPoly {
    type Output = GradedPoly;
    fn add(self, rhs: &GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &GradedPoly {
    type Output = GradedPoly;
    fn sub(self, rhs: &GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Add for GradedPoly {
    type Output = GradedPoly;
    fn add(mut self, rhs: GradedPoly) -> GradedPoly {
        self += &rhs;
        self
    }
}

impl Sub for GradedPoly {
    type Output = GradedPoly;
    fn sub(mut self, rhs: GradedPoly) -> GradedPoly {
        self -= &rhs;
        self
    }
}

impl Neg for &GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        self.scale(&q(-1))
    }
}

impl Neg for GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        self.scale(&q(-1))
    }
}

impl Mul for &GradedPoly {
    type Output = GradedPoly;
    fn mul(self, rhs: &GradedPoly) -> GradedPoly {
        let mut out = GradedPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                if let Some((m, neg)) = ma.mul(mb) {
                    let v = ca * cb;
                    out.add_term(m, if neg { -v } else { v });
                }
            }
        }
        out
    }
}

impl Mul for GradedPoly {
    type Output = GradedPoly;
    fn mul(self, rhs: GradedPoly) -> GradedPoly {
        &self * &rhs
    }
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut parts: Vec<String> = Vec::new();
            if m.is_one() || !abs.is_one() {
                parts.push(abs.to_string());
            }
            for (g, e) in m.factors() {
                if *e == 1 {
                    parts.push(g.to_string());
                } else {
                    parts.push(format!("{g}^{e}"));
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}
