//! Signatures, graded-symmetric multi-indices and jet coordinates.

use std::fmt;

use smallvec::SmallVec;

use crate::algebra::{Generator, Param, Parity};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiberCoord {
    pub name: String,
    pub parity: Parity,
}

/// Parameters 1..=r are even, r+1..=r+s are odd.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub r: u16,
    pub s: u16,
    pub fiber: Vec<FiberCoord>,
}

/// Names the parser gives a fixed meaning.
pub const RESERVED: [&str; 4] = ["t", "dt", "G", "Vol"];

impl Signature {
    pub fn new(r: u16, s: u16, fiber: Vec<FiberCoord>) -> Result<Signature> {
        if fiber.is_empty() {
            return Err(Error::Signature("fiber must be nonempty".into()));
        }
        for (k, a) in fiber.iter().enumerate() {
            let starts_alpha = a.name.chars().next().is_some_and(|c| c.is_ascii_alphabetic());
            if !starts_alpha || !a.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::Signature(format!("bad fiber name `{}`", a.name)));
            }
            // `x` doubles as the generic coordinate prefix, so only the first fiber may use it.
            if RESERVED.contains(&a.name.as_str()) || (a.name == "x" && k != 0) {
                return Err(Error::Signature(format!("fiber name `{}` is reserved", a.name)));
            }
            if fiber[..k].iter().any(|b| b.name == a.name) {
                return Err(Error::Signature(format!("duplicate fiber name `{}`", a.name)));
            }
        }
        Ok(Signature { r, s, fiber })
    }

    /// Fiber named x1, x2, ... with the given parities.
    pub fn with_parities(r: u16, s: u16, parities: &[Parity]) -> Signature {
        let fiber = parities
            .iter()
            .enumerate()
            .map(|(k, p)| FiberCoord {
                name: format!("x{}", k + 1),
                parity: *p,
            })
            .collect();
        Signature { r, s, fiber }
    }

    pub fn even(r: u16, fiber_dim: usize) -> Signature {
        Signature::with_parities(r, 0, &vec![Parity::Even; fiber_dim])
    }

    pub fn n_params(&self) -> u16 {
        self.r + self.s
    }

    pub fn fiber_dim(&self) -> u16 {
        self.fiber.len() as u16
    }

    pub fn params(&self) -> impl Iterator<Item = u16> {
        1..=self.n_params()
    }

    pub fn check_param(&self, i: u16) -> Result<()> {
        if i == 0 || i > self.n_params() {
            return Err(Error::InvalidIndex {
                index: i,
                r: self.r,
                s: self.s,
            });
        }
        Ok(())
    }

    pub fn check_fiber(&self, a: u16) -> Result<()> {
        if a == 0 || a > self.fiber_dim() {
            return Err(Error::Undeclared(format!("fiber index {a}")));
        }
        Ok(())
    }

    pub fn param_parity(&self, i: u16) -> Parity {
        if i > self.r {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn fiber_parity(&self, a: u16) -> Parity {
        self.fiber[a as usize - 1].parity
    }

    pub fn fiber_index(&self, name: &str) -> Option<u16> {
        self.fiber.iter().position(|f| f.name == name).map(|k| k as u16 + 1)
    }

    pub fn param(&self, i: u16) -> Param {
        Param {
            index: i,
            parity: self.param_parity(i),
        }
    }

    pub fn t(&self, i: u16) -> Generator {
        Generator::Param(self.param(i))
    }

    pub fn dt(&self, i: u16) -> Generator {
        Generator::Dt(self.param(i))
    }

    /// Canonical coordinate x^a_σ for an arbitrary index order, with the sorting sign.
    pub fn coord(&self, a: u16, indices: &[u16]) -> Result<Option<(JetCoord, bool)>> {
        self.check_fiber(a)?;
        for &i in indices {
            self.check_param(i)?;
        }
        Ok(MultiIndex::from_indices(self, indices).map(|(multi, neg)| {
            (
                JetCoord {
                    fiber: a,
                    fiber_parity: self.fiber_parity(a),
                    multi,
                },
                neg,
            )
        }))
    }

    /// x^a with no derivatives.
    pub fn x(&self, a: u16) -> JetCoord {
        JetCoord {
            fiber: a,
            fiber_parity: self.fiber_parity(a),
            multi: MultiIndex::empty(),
        }
    }

    /// Coordinate for an index list known to be sorted and free of repeated odd indices.
    pub fn coord_sorted(&self, a: u16, indices: &[u16]) -> JetCoord {
        let (c, neg) = self
            .coord(a, indices)
            .expect("valid indices")
            .expect("nonzero coordinate");
        debug_assert!(!neg);
        c
    }

    /// Signature with one fresh even parameter appended after the even block.
    pub fn extended(&self) -> Signature {
        Signature {
            r: self.r + 1,
            s: self.s,
            fiber: self.fiber.clone(),
        }
    }

    /// Index map into [`Signature::extended`]: odd indices shift up by one.
    pub fn extend_index(&self, i: u16) -> u16 {
        if i > self.r {
            i + 1
        } else {
            i
        }
    }

    /// Rename a generator into the extended signature.
    pub fn extend_generator(&self, g: &Generator) -> Generator {
        let shift_param = |p: &Param| Param {
            index: self.extend_index(p.index),
            parity: p.parity,
        };
        let shift_coord = |c: &JetCoord| JetCoord {
            fiber: c.fiber,
            fiber_parity: c.fiber_parity,
            multi: MultiIndex {
                indices: c.multi.indices.iter().map(|&i| self.extend_index(i)).collect(),
                parity: c.multi.parity,
            },
        };
        match g {
            Generator::Param(p) => Generator::Param(shift_param(p)),
            Generator::Dt(p) => Generator::Dt(shift_param(p)),
            Generator::Jet(c) => Generator::Jet(shift_coord(c)),
            Generator::Gamma(c) => Generator::Gamma(shift_coord(c)),
        }
    }

    /// All canonical multi-indices of exactly the given order, lexicographically.
    pub fn multi_indices(&self, order: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur: Vec<u16> = Vec::new();
        self.multi_rec(order, 1, &mut cur, &mut out);
        out
    }

    fn multi_rec(&self, left: usize, start: u16, cur: &mut Vec<u16>, out: &mut Vec<MultiIndex>) {
        if left == 0 {
            out.push(MultiIndex::from_sorted(self, cur));
            return;
        }
        for i in start..=self.n_params() {
            let next = if self.param_parity(i).is_odd() { i + 1 } else { i };
            cur.push(i);
            self.multi_rec(left - 1, next, cur, out);
            cur.pop();
        }
    }
}

/// Sorted parameter indices; odd indices appear at most once.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    indices: SmallVec<[u16; 4]>,
    parity: Parity,
}

impl MultiIndex {
    pub fn empty() -> MultiIndex {
        MultiIndex::default()
    }

    fn from_sorted(sig: &Signature, indices: &[u16]) -> MultiIndex {
        MultiIndex {
            indices: indices.iter().copied().collect(),
            parity: indices.iter().map(|&i| sig.param_parity(i)).sum(),
        }
    }

    /// Sort with Koszul sign; `None` if an odd index repeats.
    pub fn from_indices(sig: &Signature, indices: &[u16]) -> Option<(MultiIndex, bool)> {
        let mut neg = false;
        for x in 0..indices.len() {
            for y in x + 1..indices.len() {
                let (i, j) = (indices[x], indices[y]);
                let odd = sig.param_parity(i).is_odd() && sig.param_parity(j).is_odd();
                if odd && i == j {
                    return None;
                }
                if odd && i > j {
                    neg = !neg;
                }
            }
        }
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        Some((MultiIndex::from_sorted(sig, &sorted), neg))
    }

    pub fn indices(&self) -> &[u16] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// The index iσ in canonical form, with the sign of moving i into place.
    pub fn prepend(&self, sig: &Signature, i: u16) -> Option<(MultiIndex, bool)> {
        let pi = sig.param_parity(i);
        if pi.is_odd() && self.indices.contains(&i) {
            return None;
        }
        let pos = self.indices.partition_point(|&j| j < i);
        let neg = pi.is_odd()
            && self.indices[..pos]
                .iter()
                .filter(|&&j| sig.param_parity(j).is_odd())
                .count()
                % 2
                == 1;
        let mut indices = self.indices.clone();
        indices.insert(pos, i);
        Some((
            MultiIndex {
                indices,
                parity: self.parity + pi,
            },
            neg,
        ))
    }

    /// Remove the first index, returning it and the (already canonical) rest.
    pub fn split_first(&self, sig: &Signature) -> Option<(u16, MultiIndex)> {
        let (&i, rest) = self.indices.split_first()?;
        Some((i, MultiIndex::from_sorted(sig, rest)))
    }

    /// σ! for the multiset of indices.
    pub fn factorial(&self) -> u64 {
        let mut out = 1u64;
        let mut run = 1u64;
        for k in 1..self.indices.len() {
            if self.indices[k] == self.indices[k - 1] {
                run += 1;
                out *= run;
            } else {
                run = 1;
            }
        }
        out
    }

    pub fn count(&self, i: u16) -> usize {
        self.indices.iter().filter(|&&j| j == i).count()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// The jet coordinate x^a_σ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JetCoord {
    pub fiber: u16,
    pub fiber_parity: Parity,
    pub multi: MultiIndex,
}

impl Ord for JetCoord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.multi
            .len()
            .cmp(&other.multi.len())
            .then(self.fiber.cmp(&other.fiber))
            .then_with(|| self.multi.cmp(&other.multi))
    }
}

impl PartialOrd for JetCoord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl JetCoord {
    pub fn parity(&self) -> Parity {
        self.fiber_parity + self.multi.parity
    }

    pub fn order(&self) -> usize {
        self.multi.len()
    }

    pub fn with_multi(&self, multi: MultiIndex) -> JetCoord {
        JetCoord {
            fiber: self.fiber,
            fiber_parity: self.fiber_parity,
            multi,
        }
    }

    /// x^a_{iσ} with sign, or `None` when i is odd and already in σ.
    pub fn prepend(&self, sig: &Signature, i: u16) -> Option<(JetCoord, bool)> {
        self.multi
            .prepend(sig, i)
            .map(|(multi, neg)| (self.with_multi(multi), neg))
    }

    pub fn bracket(&self) -> String {
        if self.multi.is_empty() {
            format!("[{};]", self.fiber)
        } else {
            format!("[{}; {}]", self.fiber, self.multi)
        }
    }
}

/// All canonical coordinates of order ≤ k, ordered by (order, fiber, σ).
pub fn enumerate_coords(sig: &Signature, k: usize) -> Vec<JetCoord> {
    let mut out = Vec::new();
    for order in 0..=k {
        let multis = sig.multi_indices(order);
        for a in 1..=sig.fiber_dim() {
            for m in &multis {
                out.push(sig.x(a).with_multi(m.clone()));
            }
        }
    }
    out
}
