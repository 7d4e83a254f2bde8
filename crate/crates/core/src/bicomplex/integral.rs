//! Integral forms: coefficients times the symbols 𝒟x_{a₁⋯a_k} = ∂/∂dx^{a₁} ⋯ ∂/∂dx^{a_k} δ(dx).

use std::collections::BTreeMap;

use smallvec::SmallVec;

use super::{check_degree, peel, Witness};
use crate::algebra::{sign_of, GradedPoly, Generator, Parity, Q};
use crate::error::{Error, Result};
use crate::jet::Signature;
use crate::variational::total_derivative;

/// Sorted symbol indices. Even parameters occur at most once, odd ones may repeat.
pub type SymbolIndex = SmallVec<[u16; 4]>;

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralForm {
    pub sig: Signature,
    terms: BTreeMap<SymbolIndex, GradedPoly>,
}

impl IntegralForm {
    pub fn zero(sig: &Signature) -> IntegralForm {
        IntegralForm {
            sig: sig.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// c · 𝒟x.
    pub fn volume(sig: &Signature, c: GradedPoly) -> IntegralForm {
        IntegralForm::symbol(sig, &[], c).expect("empty symbol")
    }

    /// c · 𝒟x_{a₁⋯a_k} for indices in any order.
    pub fn symbol(sig: &Signature, indices: &[u16], c: GradedPoly) -> Result<IntegralForm> {
        for &i in indices {
            sig.check_param(i)?;
        }
        let mut out = IntegralForm::volume_raw(sig, c);
        for &i in indices.iter().rev() {
            out = out.creation_on_symbols(i);
        }
        Ok(out)
    }

    fn volume_raw(sig: &Signature, c: GradedPoly) -> IntegralForm {
        let mut out = IntegralForm::zero(sig);
        out.add_term(SymbolIndex::new(), c);
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SymbolIndex, &GradedPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, idx: &[u16]) -> GradedPoly {
        self.terms.get(idx).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, idx: SymbolIndex, c: GradedPoly) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(idx.clone()).or_default();
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&idx);
        }
    }

    pub fn add(&self, other: &IntegralForm) -> IntegralForm {
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_term(i.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> IntegralForm {
        let mut out = IntegralForm::zero(&self.sig);
        for (i, p) in &self.terms {
            out.add_term(i.clone(), p.scale(c));
        }
        out
    }

    pub fn sub(&self, other: &IntegralForm) -> IntegralForm {
        self.add(&other.scale(&crate::algebra::q(-1)))
    }

    /// Parity of 𝒟x_I: r + Σ (ĩ + 1).
    pub fn symbol_parity(&self, idx: &[u16]) -> Parity {
        Parity::from_bit(self.sig.r as u32)
            + idx.iter().map(|&i| self.sig.param_parity(i).flip()).sum::<Parity>()
    }

    /// (p, q) with q = r − k, if homogeneous.
    pub fn bidegree(&self) -> Option<(u32, i64)> {
        let mut seen: Option<(u32, i64)> = None;
        for (idx, c) in &self.terms {
            for (m, _) in c.terms() {
                let d = (super::gamma_degree(m), self.sig.r as i64 - idx.len() as i64);
                match seen {
                    None => seen = Some(d),
                    Some(s) if s != d => return None,
                    _ => {}
                }
            }
        }
        seen
    }

    /// Left multiplication by dt^a, contracting against the symbols.
    pub fn dx_action(&self, a: u16) -> IntegralForm {
        let mut out = IntegralForm::zero(&self.sig);
        let pa = self.sig.param_parity(a);
        for (idx, c) in &self.terms {
            for (m, v) in c.terms() {
                let pass = pa.flip().koszul(m.parity());
                let coeff = GradedPoly::term(m.clone(), v * sign_of(pass));
                for (rest, neg) in contract(&self.sig, a, idx) {
                    out.add_term(rest, coeff.scale(&sign_of(neg)));
                }
            }
        }
        out
    }

    /// ∂/∂dx^b applied to the symbols; coefficients are passed with the Koszul sign.
    pub fn creation(&self, b: u16) -> IntegralForm {
        let pb = self.sig.param_parity(b).flip();
        let mut out = IntegralForm::zero(&self.sig);
        for (idx, c) in &self.terms {
            let Some((new_idx, neg)) = insert(&self.sig, b, idx) else { continue };
            for (m, v) in c.terms() {
                let pass = pb.koszul(m.parity());
                out.add_term(new_idx.clone(), GradedPoly::term(m.clone(), v * sign_of(neg ^ pass)));
            }
        }
        out
    }

    fn creation_on_symbols(&self, b: u16) -> IntegralForm {
        let mut out = IntegralForm::zero(&self.sig);
        for (idx, c) in &self.terms {
            if let Some((new_idx, neg)) = insert(&self.sig, b, idx) {
                out.add_term(new_idx, c.scale(&sign_of(neg)));
            }
        }
        out
    }

    /// D(c 𝒟x_I) = Σ_i dt^i (𝒟_i c) 𝒟x_I.
    pub fn integral_d(&self) -> IntegralForm {
        let mut out = IntegralForm::zero(&self.sig);
        for i in self.sig.params() {
            let mut inner = IntegralForm::zero(&self.sig);
            for (idx, c) in &self.terms {
                inner.add_term(idx.clone(), total_derivative(&self.sig, c, i));
            }
            out = out.add(&inner.dx_action(i));
        }
        out
    }

    pub fn vertical_delta(&self) -> IntegralForm {
        let mut out = IntegralForm::zero(&self.sig);
        for (idx, c) in &self.terms {
            out.add_term(idx.clone(), super::vertical_delta(c));
        }
        out
    }

    pub fn map_coefficients(&self, f: impl Fn(&GradedPoly) -> GradedPoly) -> IntegralForm {
        let mut out = IntegralForm::zero(&self.sig);
        for (idx, c) in &self.terms {
            out.add_term(idx.clone(), f(c));
        }
        out
    }
}

fn insert(sig: &Signature, b: u16, idx: &[u16]) -> Option<(SymbolIndex, bool)> {
    let pb = sig.param_parity(b).flip();
    if pb.is_odd() && idx.contains(&b) {
        return None;
    }
    let pos = idx.partition_point(|&j| j < b);
    let odd_before = idx[..pos]
        .iter()
        .filter(|&&j| sig.param_parity(j).flip().is_odd())
        .count();
    let neg = pb.is_odd() && odd_before % 2 == 1;
    let mut out: SymbolIndex = idx.iter().copied().collect();
    out.insert(pos, b);
    Some((out, neg))
}

// dx^a 𝒟x_{a₁⋯a_k} = Σ_i (−1)^{ã + (ã+1)Σ_{j<i}(ã_j+1)} δ^a_{a_i} 𝒟x_{⋯â_i⋯}
fn contract(sig: &Signature, a: u16, idx: &[u16]) -> Vec<(SymbolIndex, bool)> {
    let pa = sig.param_parity(a);
    let mut out = Vec::new();
    let mut acc = Parity::Even;
    for (k, &j) in idx.iter().enumerate() {
        if j == a {
            let neg = (pa + pa.flip() * acc).is_odd();
            let mut rest: SymbolIndex = idx.iter().copied().collect();
            rest.remove(k);
            out.push((rest, neg));
        }
        acc = acc + sig.param_parity(j).flip();
    }
    out
}

/// Canonical representative of ω = c 𝒟x with c linear in Γ.
pub fn rho_integral(w: &IntegralForm) -> Result<(IntegralForm, Witness<IntegralForm>)> {
    let sig = &w.sig;
    if w.terms.keys().any(|k| !k.is_empty()) {
        return Err(Error::Degree("expected a multiple of 𝒟x".into()));
    }
    let c = w.coefficient(&[]);
    check_degree(&c, 1, Some(0))?;
    let (canonical, pieces) = peel::peel(
        sig,
        &c,
        |lower, i, b| {
            let f = &GradedPoly::generator(Generator::Gamma(lower.clone())) * b;
            IntegralForm::symbol(sig, &[i], f).expect("valid index")
        },
        |tau| {
            let d = tau.integral_d();
            if d.terms.keys().any(|k| !k.is_empty()) {
                return Err(Error::Property("divergence left a non-top symbol".into()));
            }
            Ok(d.coefficient(&[]))
        },
    )?;
    let mut tau = IntegralForm::zero(sig);
    for (t, c) in pieces {
        tau = tau.add(&t.scale(&c));
    }
    Ok((IntegralForm::volume(sig, canonical), Witness { tau }))
}

/// Σ_a Γ^a F_a 𝒟x.
pub fn euler_integral_form(sig: &Signature, l: &GradedPoly) -> IntegralForm {
    let mut out = GradedPoly::zero();
    for (k, fa) in crate::variational::euler(sig, l).iter().enumerate() {
        let g = GradedPoly::generator(Generator::Gamma(sig.x(k as u16 + 1)));
        out += &(&g * fa);
    }
    IntegralForm::volume(sig, out)
}
