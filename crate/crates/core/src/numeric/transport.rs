use super::charts::Chart;
use super::densities::BuiltinLagrangian;
use super::jet::NumericJet;
use super::quadrature::SurfacePatch;
use crate::error::{Error, Result};

/// A map ℝ^r → ℝ^r with analytic first and second derivatives.
pub trait Diffeo: Sync {
    fn dim(&self) -> usize;
    /// (f(s), ∂_i f^k as [k][i], ∂_ij f^k as [k][i][j]).
    fn eval(&self, s: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<Vec<f64>>>);

    fn jacobian_det(&self, s: &[f64]) -> f64 {
        let (_, df, _) = self.eval(s);
        nalgebra::DMatrix::from_fn(self.dim(), self.dim(), |k, i| df[k][i]).determinant()
    }
}

/// f^k(s) = b^k + A^k_i s^i + ½ C^k_{ij} s^i s^j with C symmetric in (i, j).
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticDiffeo {
    pub b: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub c: Vec<Vec<Vec<f64>>>,
}

impl QuadraticDiffeo {
    pub fn identity(r: usize) -> QuadraticDiffeo {
        QuadraticDiffeo {
            b: vec![0.0; r],
            a: (0..r).map(|k| (0..r).map(|i| if i == k { 1.0 } else { 0.0 }).collect()).collect(),
            c: vec![vec![vec![0.0; r]; r]; r],
        }
    }
}

impl Diffeo for QuadraticDiffeo {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn eval(&self, s: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<Vec<f64>>>) {
        let r = self.dim();
        let mut f = self.b.clone();
        let mut df = self.a.clone();
        for k in 0..r {
            for i in 0..r {
                f[k] += self.a[k][i] * s[i];
                for j in 0..r {
                    f[k] += 0.5 * self.c[k][i][j] * s[i] * s[j];
                    df[k][i] += self.c[k][i][j] * s[j];
                }
            }
        }
        (f, df, self.c.clone())
    }
}

/// Jet of y(s) = x(f(s)) at s from the order-2 jet of x at f(s).
pub fn transport(x: &NumericJet, df: &[Vec<f64>], d2f: &[Vec<Vec<f64>>]) -> Result<NumericJet> {
    let r = x.r;
    let mut y = NumericJet::new(r, x.m, x.order.min(2));
    for a in 1..=x.m as u16 {
        y.set(a, &[], x.get(a, &[])?);
        if x.order < 1 {
            continue;
        }
        let first: Vec<f64> = (1..=r as u16).map(|k| x.get(a, &[k])).collect::<Result<_>>()?;
        for i in 0..r {
            let v: f64 = (0..r).map(|k| first[k] * df[k][i]).sum();
            y.set(a, &[i as u16 + 1], v);
        }
        if x.order < 2 {
            continue;
        }
        for i in 0..r {
            for j in i..r {
                let mut v = 0.0;
                for k in 0..r {
                    v += first[k] * d2f[k][i][j];
                    for l in 0..r {
                        v += x.get(a, &[k as u16 + 1, l as u16 + 1])? * df[k][i] * df[l][j];
                    }
                }
                y.set(a, &[i as u16 + 1, j as u16 + 1], v);
            }
        }
    }
    Ok(y)
}

/// max over the grid of |L(y)(s) − det(Df(s))^ρ · L(x)(f(s))| for y = x ∘ f.
pub fn reparametrization_check(l: &BuiltinLagrangian, patch: &SurfacePatch, f: &dyn Diffeo) -> Result<f64> {
    let chart: &dyn Chart = patch.chart;
    let n = patch.resolution.max(1);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for k in 0..n {
            let s = [
                patch.lower[0] + (i as f64 + 0.5) * (patch.upper[0] - patch.lower[0]) / n as f64,
                patch.lower[1] + (k as f64 + 0.5) * (patch.upper[1] - patch.lower[1]) / n as f64,
            ];
            let (t, df, d2f) = f.eval(&s);
            let det = f.jacobian_det(&s);
            if det <= 0.0 {
                return Err(Error::Orientation(det));
            }
            let x = chart.jet(&t, 2);
            let y = transport(&x, &df, &d2f)?;
            let lhs = l.evaluate(&y)?;
            let rhs = det.powf(l.weight) * l.evaluate(&x)?;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(worst)
}
