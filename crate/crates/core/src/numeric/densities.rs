use nalgebra::{DMatrix, DVector, Matrix2};

use super::jet::NumericJet;
use crate::error::{Error, Result};

/// Metrics with det g at or below this are rejected.
pub const DET_G_EPS: f64 = 1e-12;

/// A named non-polynomial Lagrangian evaluated on numeric jets.
#[derive(Clone, Copy)]
pub struct BuiltinLagrangian {
    pub name: &'static str,
    pub r: usize,
    pub m: usize,
    pub weight: f64,
    pub order: usize,
    pub eval: fn(&NumericJet) -> Result<f64>,
}

impl BuiltinLagrangian {
    pub fn gauss_bonnet(m: usize) -> BuiltinLagrangian {
        BuiltinLagrangian {
            name: "gauss-bonnet",
            r: 2,
            m,
            weight: 1.0,
            order: 2,
            eval: gauss_bonnet_density,
        }
    }

    pub fn gauss_map(m: usize) -> BuiltinLagrangian {
        BuiltinLagrangian {
            name: "gauss-map",
            r: m - 1,
            m,
            weight: 1.0,
            order: 2,
            eval: gauss_map_density,
        }
    }

    pub fn evaluate(&self, j: &NumericJet) -> Result<f64> {
        (self.eval)(j)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Frame {
    u1: Vec<f64>,
    u2: Vec<f64>,
    ginv: Matrix2<f64>,
    sqrt_g: f64,
}

impl Frame {
    fn new(u1: &[f64], u2: &[f64]) -> Result<Frame> {
        let g = Matrix2::new(dot(u1, u1), dot(u1, u2), dot(u2, u1), dot(u2, u2));
        let det = g.determinant();
        if det <= DET_G_EPS {
            return Err(Error::Degenerate(det));
        }
        Ok(Frame {
            u1: u1.to_vec(),
            u2: u2.to_vec(),
            ginv: g.try_inverse().ok_or(Error::Degenerate(det))?,
            sqrt_g: det.sqrt(),
        })
    }

    /// v^T P w with P = 1 − Σ u_i g^{ij} u_j^T.
    fn project(&self, v: &[f64], w: &[f64]) -> f64 {
        let vu = [dot(v, &self.u1), dot(v, &self.u2)];
        let wu = [dot(w, &self.u1), dot(w, &self.u2)];
        let mut tangential = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                tangential += vu[i] * self.ginv[(i, j)] * wu[j];
            }
        }
        dot(v, w) - tangential
    }
}

/// Σ_{ab} (x₁₁^a x₂₂^b − x₁₂^a x₁₂^b) P^{ab} / √det g. Equals K √det g.
pub fn gauss_bonnet_sum(j: &NumericJet) -> Result<f64> {
    if j.r != 2 || j.order < 2 {
        return Err(Error::Degree("needs a 2-parameter jet of order 2".into()));
    }
    let f = Frame::new(&j.vector(&[1])?, &j.vector(&[2])?)?;
    let (x11, x12, x22) = (j.vector(&[1, 1])?, j.vector(&[1, 2])?, j.vector(&[2, 2])?);
    Ok((f.project(&x11, &x22) - f.project(&x12, &x12)) / f.sqrt_g)
}

/// Scalar curvature density R √det g = 2 K √det g.
pub fn gauss_bonnet_density(j: &NumericJet) -> Result<f64> {
    Ok(2.0 * gauss_bonnet_sum(j)?)
}

/// ω(V, W) = Σ P^{ab}(V₁^a W₂^b − W₁^a V₂^b)/√det g at the frame (u₁, u₂).
pub fn grassmann_form_pair(u1: &[f64], u2: &[f64], v: (&[f64], &[f64]), w: (&[f64], &[f64])) -> Result<f64> {
    let f = Frame::new(u1, u2)?;
    Ok((f.project(v.0, w.1) - f.project(w.0, v.1)) / f.sqrt_g)
}

/// ω on the variation v of u₁ and the variation w of u₂.
pub fn grassmann_form_value(u1: &[f64], u2: &[f64], v: &[f64], w: &[f64]) -> Result<f64> {
    let zero = vec![0.0; v.len()];
    grassmann_form_pair(u1, u2, (v, &zero), (&zero, w))
}

/// L_ω ∘ F₂: the frame map F₂ = (x₁, x₂) followed by the form Lagrangian of ω.
pub fn grassmann_lagrangian(j: &NumericJet) -> Result<f64> {
    let (u1, u2) = (j.vector(&[1])?, j.vector(&[2])?);
    let (x11, x12, x22) = (j.vector(&[1, 1])?, j.vector(&[1, 2])?, j.vector(&[2, 2])?);
    grassmann_form_pair(&u1, &u2, (&x11, &x12), (&x12, &x22))
}

// N_a = det[e_a, v_1, …, v_{m−1}] (columns).
fn cross(vs: &[DVector<f64>], m: usize) -> DVector<f64> {
    DVector::from_fn(m, |a, _| {
        let mut mat = DMatrix::zeros(m, m);
        mat[(a, 0)] = 1.0;
        for (k, v) in vs.iter().enumerate() {
            mat.set_column(k + 1, v);
        }
        mat.determinant()
    })
}

/// Pullback of the sphere's volume form along the Gauss map: det[n, ∂₁n, …, ∂_{m−1}n].
pub fn gauss_map_density(j: &NumericJet) -> Result<f64> {
    let m = j.m;
    if m < 2 || j.r != m - 1 || j.order < 2 {
        return Err(Error::Degree("needs a hypersurface jet of order 2".into()));
    }
    let tangent: Vec<DVector<f64>> = (1..=j.r as u16)
        .map(|i| j.vector(&[i]).map(DVector::from_vec))
        .collect::<Result<_>>()?;
    let normal = cross(&tangent, m);
    let len2 = normal.norm_squared();
    if len2 <= DET_G_EPS {
        return Err(Error::Degenerate(len2));
    }
    let len = len2.sqrt();
    let n = &normal / len;
    let mut mat = DMatrix::zeros(m, m);
    mat.set_column(0, &n);
    for i in 1..=j.r as u16 {
        let mut dn = DVector::zeros(m);
        for k in 0..j.r {
            let mut vs = tangent.clone();
            vs[k] = DVector::from_vec(j.vector(&[i, k as u16 + 1])?);
            dn += cross(&vs, m);
        }
        let radial = n.dot(&dn);
        let dunit = (dn - &n * radial) / len;
        mat.set_column(i as usize, &dunit);
    }
    Ok(mat.determinant())
}
