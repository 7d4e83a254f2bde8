//! Total derivatives, the Euler operator and the variational differential d̄.

use crate::algebra::{sign_of, GradedPoly, Generator, Parity, Q};
use crate::jet::{JetCoord, MultiIndex, Signature};

#[derive(Clone, Debug, PartialEq)]
pub struct Lagrangian {
    pub sig: Signature,
    pub body: GradedPoly,
    /// Claimed covariance weight, if any.
    pub weight: Option<Q>,
}

impl Lagrangian {
    pub fn new(sig: Signature, body: GradedPoly) -> Lagrangian {
        Lagrangian {
            sig,
            body,
            weight: None,
        }
    }

    pub fn order(&self) -> usize {
        order_of(&self.body)
    }

    pub fn euler(&self) -> Vec<GradedPoly> {
        euler(&self.sig, &self.body)
    }

    pub fn dbar(&self) -> Lagrangian {
        Lagrangian::new(self.sig.extended(), dbar(&self.sig, &self.body))
    }
}

/// The total derivative D_i as a derivation of parity ĩ.
///
/// On Cartan forms it acts by Γ_σ ↦ (−1)^ĩ Γ_{iσ}; dt is killed.
pub fn total_derivative(sig: &Signature, p: &GradedPoly, i: u16) -> GradedPoly {
    let pi = sig.param_parity(i);
    p.derivation(|g| match g {
        Generator::Param(t) => (t.index == i).then(GradedPoly::one),
        Generator::Jet(c) => Some(prepended(sig, c, i, false)),
        Generator::Gamma(c) => Some(prepended(sig, c, i, true).scale(&pi.sign())),
        Generator::Dt(_) => None,
    })
}

fn prepended(sig: &Signature, c: &JetCoord, i: u16, gamma: bool) -> GradedPoly {
    match c.prepend(sig, i) {
        None => GradedPoly::zero(),
        Some((c2, neg)) => {
            let g = if gamma {
                Generator::Gamma(c2)
            } else {
                Generator::Jet(c2)
            };
            GradedPoly::generator(g).scale(&sign_of(neg))
        }
    }
}

/// D_{i₁}(D_{i₂}(⋯ D_{i_k}(p))) with i₁ outermost.
pub fn total_derivative_multi(sig: &Signature, p: &GradedPoly, indices: &[u16]) -> GradedPoly {
    let mut out = p.clone();
    for &i in indices.iter().rev() {
        out = total_derivative(sig, &out, i);
    }
    out
}

/// Σ_i D_i B^i.
pub fn divergence(sig: &Signature, b: &[GradedPoly]) -> GradedPoly {
    let mut out = GradedPoly::zero();
    for (k, bi) in b.iter().enumerate() {
        out += &total_derivative(sig, bi, k as u16 + 1);
    }
    out
}

pub fn order_of(p: &GradedPoly) -> usize {
    p.max_jet_order()
}

/// Euler components F_a = Σ_σ (−1)^{|σ|+ãσ̃} D_σ(∂L/∂x^a_σ).
pub fn euler(sig: &Signature, l: &GradedPoly) -> Vec<GradedPoly> {
    (1..=sig.fiber_dim()).map(|a| euler_component(sig, l, a)).collect()
}

pub fn euler_component(sig: &Signature, l: &GradedPoly, a: u16) -> GradedPoly {
    let support: Vec<MultiIndex> = l
        .generators()
        .into_iter()
        .filter_map(|g| match g {
            Generator::Jet(c) if c.fiber == a => Some(c.multi),
            _ => None,
        })
        .collect();
    let base = sig.x(a);
    horner(sig, l, &base, &support, &[])
}

// H(π) = ∂L/∂x_π + Σ_i (−1)^{1+ãĩ} D_i H(πi), over prefixes of the support.
fn horner(sig: &Signature, l: &GradedPoly, base: &JetCoord, support: &[MultiIndex], prefix: &[u16]) -> GradedPoly {
    let here = base.with_multi(MultiIndex::from_indices(sig, prefix).expect("canonical prefix").0);
    let mut out = l.partial(&Generator::Jet(here));
    let mut next: Vec<u16> = support
        .iter()
        .filter(|m| m.len() > prefix.len() && m.indices()[..prefix.len()] == *prefix)
        .map(|m| m.indices()[prefix.len()])
        .collect();
    next.sort_unstable();
    next.dedup();
    for i in next {
        let mut longer = prefix.to_vec();
        longer.push(i);
        let inner = horner(sig, l, base, support, &longer);
        if inner.is_zero() {
            continue;
        }
        let neg = (Parity::Odd + base.fiber_parity * sig.param_parity(i)).is_odd();
        out += &total_derivative(sig, &inner, i).scale(&sign_of(neg));
    }
    out
}

/// d̄L = Σ_a x^a_{r+1} F_a(L), over the signature with one more even parameter.
pub fn dbar(sig: &Signature, l: &GradedPoly) -> GradedPoly {
    let ext = sig.extended();
    let fresh = sig.r + 1;
    let mut out = GradedPoly::zero();
    for (k, fa) in euler(sig, l).into_iter().enumerate() {
        if fa.is_zero() {
            continue;
        }
        let a = k as u16 + 1;
        let xa = GradedPoly::generator(Generator::Jet(ext.coord_sorted(a, &[fresh])));
        let fa = fa.rename(|g| sig.extend_generator(g));
        out += &(&xa * &fa);
    }
    out
}

/// True when every term is linear in the coordinates whose multi-index contains the last even parameter.
pub fn weight_linear_in_last(sig: &Signature, l: &GradedPoly) -> bool {
    if sig.r == 0 {
        return false;
    }
    let last = sig.r;
    l.terms().all(|(m, _)| {
        m.count(|g| matches!(g, Generator::Jet(c) if c.multi.indices().contains(&last))) == 1
    })
}
