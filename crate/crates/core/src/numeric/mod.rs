//! Floating-point jets, curvature densities, quadrature and numerical covariance checks.

mod charts;
mod densities;
mod jet;
mod quadrature;
mod transport;
mod variation;

pub use charts::{Chart, PolyChart, SphereChart};
pub use densities::{
    gauss_bonnet_density, gauss_bonnet_sum, gauss_map_density, grassmann_form_pair, grassmann_form_value,
    grassmann_lagrangian, BuiltinLagrangian, DET_G_EPS,
};
pub use jet::{eval_poly, NumericJet};
pub use quadrature::{integrate, sphere_patch, Integral, SurfacePatch};
pub use transport::{reparametrization_check, transport, Diffeo, QuadraticDiffeo};
pub use variation::{discrete_variation_check, gauss_legendre, PathPoly, VariationReport};
