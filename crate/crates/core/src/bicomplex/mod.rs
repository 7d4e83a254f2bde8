//! The (D, δ) bicomplex on the jet space of ℝ^{r|s} × M.

mod integral;
mod peel;

pub use integral::{euler_integral_form, rho_integral, IntegralForm, SymbolIndex};

use crate::algebra::{sign_of, GradedPoly, Generator, Monomial};
use crate::error::{Error, Result};
use crate::jet::Signature;
use crate::variational::total_derivative;

/// An element of Ω^{*,*}: a polynomial in t, x_σ, dt, Γ_σ.
#[derive(Clone, Debug, PartialEq)]
pub struct JetForm {
    pub sig: Signature,
    pub body: GradedPoly,
}

/// τ with canonical(ω) − ω = Dτ.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness<T> {
    pub tau: T,
}

pub fn gamma_degree(m: &Monomial) -> u32 {
    m.count(Generator::is_gamma)
}

pub fn dt_degree(m: &Monomial) -> u32 {
    m.count(Generator::is_dt)
}

impl JetForm {
    pub fn new(sig: Signature, body: GradedPoly) -> JetForm {
        JetForm { sig, body }
    }

    pub fn zero(sig: &Signature) -> JetForm {
        JetForm::new(sig.clone(), GradedPoly::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero()
    }

    /// (p, q) = (#Γ, #dt) if every term agrees.
    pub fn bidegree(&self) -> Option<(u32, u32)> {
        let mut it = self.body.terms().map(|(m, _)| (gamma_degree(m), dt_degree(m)));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn horizontal_d(&self) -> JetForm {
        JetForm::new(self.sig.clone(), horizontal_d(&self.sig, &self.body))
    }

    pub fn vertical_delta(&self) -> JetForm {
        JetForm::new(self.sig.clone(), vertical_delta(&self.body))
    }
}

/// Dω = Σ_i dt^i 𝒟_i ω.
pub fn horizontal_d(sig: &Signature, w: &GradedPoly) -> GradedPoly {
    let mut out = GradedPoly::zero();
    for i in sig.params() {
        let di = total_derivative(sig, w, i);
        if !di.is_zero() {
            out += &(&GradedPoly::generator(sig.dt(i)) * &di);
        }
    }
    out
}

/// δ = Γ_σ ∂/∂x_σ.
pub fn vertical_delta(w: &GradedPoly) -> GradedPoly {
    w.derivation(|g| match g {
        Generator::Jet(c) => Some(GradedPoly::generator(Generator::Gamma(c.clone()))),
        _ => None,
    })
}

/// dt¹ ⋯ dt^r.
pub fn top_form(sig: &Signature) -> GradedPoly {
    let factors: Vec<(Generator, u32)> = (1..=sig.r).map(|i| (sig.dt(i), 1)).collect();
    GradedPoly::product(&factors, crate::algebra::q(1))
}

/// (−1)^{i−1} dt¹ ⋯ dt̂^i ⋯ dt^r, so that dt^i · 𝒟t_i = dt¹ ⋯ dt^r.
pub fn top_form_without(sig: &Signature, i: u16) -> GradedPoly {
    let factors: Vec<(Generator, u32)> = (1..=sig.r).filter(|&j| j != i).map(|j| (sig.dt(j), 1)).collect();
    GradedPoly::product(&factors, sign_of((i - 1) % 2 == 1))
}

/// dt^{r+1} · dt¹ ⋯ dt^r over the extended signature.
pub fn extended_top_form(sig: &Signature) -> GradedPoly {
    let ext = sig.extended();
    &GradedPoly::generator(ext.dt(sig.r + 1)) * &top_form(sig)
}

fn strip_dt(p: &GradedPoly) -> GradedPoly {
    let mut out = GradedPoly::zero();
    for (m, c) in p.terms() {
        let kept: Vec<(Generator, u32)> = m.factors().iter().filter(|(g, _)| !g.is_dt()).cloned().collect();
        // Without Γ factors the dt block sits at the end in order, so no sign.
        out += &GradedPoly::product(&kept, c.clone());
    }
    out
}

/// Canonical representative of a (1, r)-form over an even base.
pub fn rho(w: &JetForm) -> Result<(JetForm, Witness<JetForm>)> {
    let sig = &w.sig;
    if sig.s != 0 {
        return Err(Error::Degree(
            "top-degree jet forms need an even base; use the integral sector".into(),
        ));
    }
    check_degree(&w.body, 1, Some(sig.r as u32))?;
    let (canonical, pieces) = peel::peel(
        sig,
        &w.body,
        |lower, i, b| {
            let b = strip_dt(b);
            let f = &GradedPoly::generator(Generator::Gamma(lower.clone())) * &b;
            &f * &top_form_without(sig, i)
        },
        |tau| Ok(horizontal_d(sig, tau)),
    )?;
    let mut tau = GradedPoly::zero();
    for (t, c) in pieces {
        tau += &t.scale(&c);
    }
    Ok((JetForm::new(sig.clone(), canonical), Witness { tau: JetForm::new(sig.clone(), tau) }))
}

pub(crate) fn check_degree(body: &GradedPoly, p: u32, q: Option<u32>) -> Result<()> {
    for (m, _) in body.terms() {
        if gamma_degree(m) != p {
            return Err(Error::Degree(format!("expected Γ-degree {p}, found {}", gamma_degree(m))));
        }
        if let Some(q) = q {
            if dt_degree(m) != q {
                return Err(Error::Degree(format!("expected dt-degree {q}, found {}", dt_degree(m))));
            }
        }
    }
    Ok(())
}

/// κ: substitute Γ_σ ↦ Γ_σ + dt^{r+1} x_{(r+1)σ} in the extended signature and keep Γ-degree p − 1.
pub fn kappa(w: &JetForm) -> Result<JetForm> {
    let sig = &w.sig;
    let ext = sig.extended();
    let fresh = sig.r + 1;
    let mut out = GradedPoly::zero();
    for p in distinct_gamma_degrees(&w.body) {
        if p == 0 {
            continue;
        }
        let (part, _) = w.body.filter(|m| gamma_degree(m) == p);
        let renamed = part.rename(|g| sig.extend_generator(g));
        let dt = GradedPoly::generator(ext.dt(fresh));
        let sub = renamed.substitute(|g| match g {
            Generator::Gamma(c) => {
                let (xc, neg) = c.prepend(&ext, fresh).expect("even index");
                let shifted = &dt * &GradedPoly::generator(Generator::Jet(xc));
                Some(&GradedPoly::generator(g.clone()) + &shifted.scale(&sign_of(neg)))
            }
            _ => None,
        })?;
        let (proj, _) = sub.filter(|m| gamma_degree(m) == p - 1);
        out += &proj;
    }
    Ok(JetForm::new(ext, out))
}

fn distinct_gamma_degrees(p: &GradedPoly) -> Vec<u32> {
    let mut d: Vec<u32> = p.terms().map(|(m, _)| gamma_degree(m)).collect();
    d.sort_unstable();
    d.dedup();
    d
}

/// χ = κ ∘ ρ.
pub fn chi(w: &JetForm) -> Result<JetForm> {
    let (canonical, _) = rho(w)?;
    kappa(&canonical)
}

/// Σ_a Γ^a F_a · dt¹ ⋯ dt^r, the expected canonical form of δ(L dt¹ ⋯ dt^r).
pub fn euler_form(sig: &Signature, l: &GradedPoly) -> GradedPoly {
    let mut out = GradedPoly::zero();
    for (k, fa) in crate::variational::euler(sig, l).iter().enumerate() {
        let g = GradedPoly::generator(Generator::Gamma(sig.x(k as u16 + 1)));
        out += &(&g * fa);
    }
    &out * &top_form(sig)
}
