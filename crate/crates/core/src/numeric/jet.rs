use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use crate::algebra::{GradedPoly, Generator};
use crate::error::{Error, Result};

/// Values x^a_σ at one point, σ sorted. Parameters are all even.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct NumericJet {
    pub r: usize,
    pub m: usize,
    pub order: usize,
    /// Values of the parameters t^i, if the Lagrangian depends on them.
    pub t: Vec<f64>,
    values: BTreeMap<(u16, Vec<u16>), f64>,
}

impl NumericJet {
    pub fn new(r: usize, m: usize, order: usize) -> NumericJet {
        NumericJet {
            r,
            m,
            order,
            t: vec![0.0; r],
            values: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, a: u16, sigma: &[u16], v: f64) {
        let mut s = sigma.to_vec();
        s.sort_unstable();
        self.values.insert((a, s), v);
    }

    pub fn get(&self, a: u16, sigma: &[u16]) -> Result<f64> {
        let mut s = sigma.to_vec();
        s.sort_unstable();
        self.values
            .get(&(a, s.clone()))
            .copied()
            .ok_or_else(|| Error::MissingJet(format!("x[{a}; {s:?}]")))
    }

    /// Ambient vector x_σ = (x^1_σ, …, x^m_σ); indices are 1-based.
    pub fn vector(&self, sigma: &[u16]) -> Result<Vec<f64>> {
        (1..=self.m as u16).map(|a| self.get(a, sigma)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.values.values().all(|v| v.is_finite())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(u16, Vec<u16>), &f64)> {
        self.values.iter()
    }
}

/// Evaluate a differential polynomial at a jet.
pub fn eval_poly(p: &GradedPoly, j: &NumericJet) -> Result<f64> {
    let mut total = 0.0;
    for (m, c) in p.terms() {
        let mut v = c.to_f64().unwrap_or(f64::NAN);
        for (g, e) in m.factors() {
            let x = match g {
                Generator::Jet(c) => {
                    if c.fiber_parity.is_odd() || c.multi.parity().is_odd() {
                        return Err(Error::Parity("numeric jets carry no odd coordinates".into()));
                    }
                    j.get(c.fiber, c.multi.indices())?
                }
                Generator::Param(t) => *j
                    .t
                    .get(t.index as usize - 1)
                    .ok_or_else(|| Error::MissingJet(format!("t[{}]", t.index)))?,
                _ => return Err(Error::Degree("forms cannot be evaluated pointwise".into())),
            };
            v *= x.powi(*e as i32);
        }
        total += v;
    }
    Ok(total)
}
