//! Geometry of the two factors: the flat square torus X = ℂ/(ℤ+iℤ) with
//! ∫_X ω = 1, and the projective line P¹ covered by the charts z and w = 1/z.

mod field;
mod p1;
mod torus;

pub use field::{Field, FormType, OneForm};
pub use p1::{
    fs_density, gauss_legendre, p1_quadrature, ChartId, P1Chart, P1Quadrature, P1_DEFAULT_ANGULAR, P1_DEFAULT_RADIAL,
};
pub use torus::TorusGrid;
