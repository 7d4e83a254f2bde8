use rayon::prelude::*;

use super::charts::{Chart, SphereChart};
use super::jet::NumericJet;
use crate::error::{Error, Result};

/// A rectangle in parameter space with a grid resolution per side.
pub struct SurfacePatch<'a> {
    pub chart: &'a dyn Chart,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub resolution: usize,
}

/// The unit sphere over [δ, π − δ] × [0, 2π].
pub fn sphere_patch(delta: f64, resolution: usize) -> SurfacePatch<'static> {
    static SPHERE: SphereChart = SphereChart;
    SurfacePatch {
        chart: &SPHERE,
        lower: vec![delta, 0.0],
        upper: vec![std::f64::consts::PI - delta, 2.0 * std::f64::consts::PI],
        resolution,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    /// Midpoint rule at the requested resolution.
    pub value: f64,
    /// Midpoint rule at half the resolution.
    pub coarse: f64,
    /// (4·value − coarse)/3.
    pub richardson: f64,
    /// |value − coarse|/3.
    pub error_estimate: f64,
}

fn midpoint(density: &(dyn Fn(&NumericJet) -> Result<f64> + Sync), patch: &SurfacePatch, n: usize) -> Result<f64> {
    if patch.lower.len() != 2 {
        return Err(Error::Degree("quadrature is implemented for 2-parameter patches".into()));
    }
    let h = [
        (patch.upper[0] - patch.lower[0]) / n as f64,
        (patch.upper[1] - patch.lower[1]) / n as f64,
    ];
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let s0 = patch.lower[0] + (i as f64 + 0.5) * h[0];
            let mut row = 0.0;
            for k in 0..n {
                let s1 = patch.lower[1] + (k as f64 + 0.5) * h[1];
                let j = patch.chart.jet(&[s0, s1], 2);
                let v = density(&j)?;
                if !v.is_finite() {
                    return Err(Error::NonFinite(s0, s1));
                }
                row += v;
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(rows.iter().sum::<f64>() * h[0] * h[1])
}

/// Tensor midpoint rule with a Richardson estimate from the half-resolution grid.
pub fn integrate(density: &(dyn Fn(&NumericJet) -> Result<f64> + Sync), patch: &SurfacePatch) -> Result<Integral> {
    let n = patch.resolution.max(2);
    let value = midpoint(density, patch, n)?;
    let coarse = midpoint(density, patch, n / 2)?;
    Ok(Integral {
        value,
        coarse,
        richardson: (4.0 * value - coarse) / 3.0,
        error_estimate: (value - coarse).abs() / 3.0,
    })
}
