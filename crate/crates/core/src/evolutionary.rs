//! Evolutionary vector fields and their prolongations.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::algebra::{sign_of, GradedPoly, Generator, Parity};
use crate::bicomplex::vertical_delta;
use crate::error::{Error, Result};
use crate::jet::{enumerate_coords, JetCoord, Signature};
use crate::variational::total_derivative;

/// Y = Y^a ∂/∂x^a with Y^a of parity ã + Ỹ.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionaryField {
    pub sig: Signature,
    pub components: Vec<GradedPoly>,
    pub parity: Parity,
}

impl EvolutionaryField {
    pub fn new(sig: &Signature, components: Vec<GradedPoly>, parity: Parity) -> Result<EvolutionaryField> {
        if components.len() != sig.fiber_dim() as usize {
            return Err(Error::Degree("one component per fiber coordinate".into()));
        }
        for (k, c) in components.iter().enumerate() {
            let want = sig.fiber_parity(k as u16 + 1) + parity;
            if !c.is_zero() && c.parity() != Some(want) {
                return Err(Error::Parity(format!("component {} must have parity {want:?}", k + 1)));
            }
        }
        Ok(EvolutionaryField {
            sig: sig.clone(),
            components,
            parity,
        })
    }

    pub fn prolong(&self) -> ProlongedField {
        ProlongedField {
            field: self.clone(),
            cache: Mutex::new(HashMap::new()),
        }
    }
}

/// P_Y = Σ Y^a_σ ∂/∂x^a_σ with Y^a_σ = (−1)^{Ỹσ̃} D_σ Y^a, computed lazily.
#[derive(Debug)]
pub struct ProlongedField {
    field: EvolutionaryField,
    cache: Mutex<HashMap<JetCoord, GradedPoly>>,
}

impl ProlongedField {
    pub fn field(&self) -> &EvolutionaryField {
        &self.field
    }

    pub fn parity(&self) -> Parity {
        self.field.parity
    }

    fn d_sigma(&self, c: &JetCoord) -> GradedPoly {
        if let Some(v) = self.cache.lock().expect("cache poisoned").get(c) {
            return v.clone();
        }
        let sig = &self.field.sig;
        let v = match c.multi.split_first(sig) {
            None => self.field.components[c.fiber as usize - 1].clone(),
            Some((i, rest)) => total_derivative(sig, &self.d_sigma(&c.with_multi(rest)), i),
        };
        self.cache.lock().expect("cache poisoned").insert(c.clone(), v.clone());
        v
    }

    /// Y^a_σ.
    pub fn coefficient(&self, c: &JetCoord) -> GradedPoly {
        let neg = self.field.parity.koszul(c.multi.parity());
        self.d_sigma(c).scale(&sign_of(neg))
    }

    /// All coefficients up to order k.
    pub fn coefficients(&self, k: usize) -> Vec<(JetCoord, GradedPoly)> {
        enumerate_coords(&self.field.sig, k)
            .into_iter()
            .map(|c| {
                let v = self.coefficient(&c);
                (c, v)
            })
            .collect()
    }

    /// P_Y acting on functions.
    pub fn apply(&self, p: &GradedPoly) -> GradedPoly {
        p.derivation(|g| match g {
            Generator::Jet(c) => Some(self.coefficient(c)),
            _ => None,
        })
    }

    /// ι: Γ_σ ↦ Y_σ, a derivation of parity Ỹ + 1.
    pub fn interior(&self, w: &GradedPoly) -> GradedPoly {
        w.derivation(|g| match g {
            Generator::Gamma(c) => Some(self.coefficient(c)),
            _ => None,
        })
    }

    /// L_{P_Y}: x_σ ↦ Y_σ, Γ_σ ↦ (−1)^Ỹ δY_σ.
    pub fn lie_on_forms(&self, w: &GradedPoly) -> GradedPoly {
        let s = self.field.parity.sign();
        w.derivation(|g| match g {
            Generator::Jet(c) => Some(self.coefficient(c)),
            Generator::Gamma(c) => Some(vertical_delta(&self.coefficient(c)).scale(&s)),
            _ => None,
        })
    }
}

/// [Y, Z]^a = P_Y Z^a − (−1)^{ỸZ̃} P_Z Y^a.
pub fn jacobi(y: &EvolutionaryField, z: &EvolutionaryField) -> EvolutionaryField {
    let py = y.prolong();
    let pz = z.prolong();
    let s = sign_of(y.parity.koszul(z.parity));
    let components = y
        .components
        .iter()
        .zip(&z.components)
        .map(|(ya, za)| &py.apply(za) - &pz.apply(ya).scale(&s))
        .collect();
    EvolutionaryField {
        sig: y.sig.clone(),
        components,
        parity: y.parity + z.parity,
    }
}
