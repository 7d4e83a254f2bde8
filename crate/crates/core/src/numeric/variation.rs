use gauss_quad::GaussLegendre;

use super::jet::{eval_poly, NumericJet};
use crate::error::{Error, Result};
use crate::variational::Lagrangian;

/// Polynomial path t ↦ x^a(t), coefficients in ascending powers.
#[derive(Clone, Debug, PartialEq)]
pub struct PathPoly {
    pub components: Vec<Vec<f64>>,
}

impl PathPoly {
    pub fn zero(m: usize) -> PathPoly {
        PathPoly {
            components: vec![vec![]; m],
        }
    }

    /// amplitude_a · t³(1 − t)³ in each component.
    pub fn bump(amplitudes: &[f64]) -> PathPoly {
        let base = [0.0, 0.0, 0.0, 1.0, -3.0, 3.0, -1.0];
        PathPoly {
            components: amplitudes.iter().map(|a| base.iter().map(|c| a * c).collect()).collect(),
        }
    }

    /// d^k x^a / dt^k at t.
    pub fn derivative(&self, a: usize, k: usize, t: f64) -> f64 {
        let mut total = 0.0;
        for (p, c) in self.components[a].iter().enumerate().skip(k) {
            let fall: f64 = (0..k).map(|j| (p - j) as f64).product();
            total += c * fall * t.powi((p - k) as i32);
        }
        total
    }

    pub fn add_scaled(&self, other: &PathPoly, eps: f64) -> PathPoly {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(x, y)| {
                let n = x.len().max(y.len());
                (0..n)
                    .map(|p| x.get(p).copied().unwrap_or(0.0) + eps * y.get(p).copied().unwrap_or(0.0))
                    .collect()
            })
            .collect();
        PathPoly { components }
    }

    pub fn jet(&self, t: f64, order: usize) -> NumericJet {
        let m = self.components.len();
        let mut j = NumericJet::new(1, m, order);
        j.t = vec![t];
        for a in 0..m {
            for k in 0..=order {
                j.set(a as u16 + 1, &vec![1u16; k], self.derivative(a, k, t));
            }
        }
        j
    }
}

/// ∫₀¹ f dt by composite Gauss–Legendre (8 panels × 12 nodes).
pub fn gauss_legendre(f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let rule = GaussLegendre::new(12).expect("degree ≥ 2");
    let panels = 8;
    let mut total = 0.0;
    let mut failure = None;
    for p in 0..panels {
        let (a, b) = (p as f64 / panels as f64, (p + 1) as f64 / panels as f64);
        total += rule.integrate(a, b, |t| match f(t) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        });
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariationReport {
    pub eps: f64,
    pub finite_difference: f64,
    pub predicted: f64,
    pub deviation: f64,
}

/// Compare (S[x + εY] − S[x])/ε with ∫ Y^a F_a(L) dt over [0, 1].
pub fn discrete_variation_check(l: &Lagrangian, path: &PathPoly, y: &PathPoly, eps: f64) -> Result<VariationReport> {
    if l.sig.r != 1 || l.sig.s != 0 {
        return Err(Error::Signature("variation check runs on (1|0) Lagrangians".into()));
    }
    let order = l.order();
    let action = |p: &PathPoly| gauss_legendre(|t| eval_poly(&l.body, &p.jet(t, order)));
    let moved = path.add_scaled(y, eps);
    let finite_difference = (action(&moved)? - action(path)?) / eps;
    let f = l.euler();
    let predicted = gauss_legendre(|t| {
        let j = path.jet(t, 2 * order);
        let mut v = 0.0;
        for (a, fa) in f.iter().enumerate() {
            v += y.derivative(a, 0, t) * eval_poly(fa, &j)?;
        }
        Ok(v)
    })?;
    Ok(VariationReport {
        eps,
        finite_difference,
        predicted,
        deviation: (finite_difference - predicted).abs(),
    })
}
