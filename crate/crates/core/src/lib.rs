//! Numerical and exact-arithmetic toolkit for the doubly-coupled τ-vortex
//! equations on the flat square torus.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: spectral calculus on the torus and two-chart quadrature on P¹.
//! - [`higgs`]: quadruplet data (Higgs fields, morphisms, metrics), curvature and adjoints.
//! - [`vortex`]: the coupled residual, the τ/τ′/σ constants and the metric flow solver.
//! - [`stability`]: exact-rational slopes, Θ_τ and stability verdicts.
//! - [`reduction`]: the SU(2)-invariant block bundle on X×P¹ and its Hermitian–Einstein check.
//! - [`hyperkahler`]: the configuration-space metric, I/J/K and the moment map μ_I.
//! - [`cli`]: config loading, report generation and the command drivers.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod higgs;
pub mod hyperkahler;
pub mod linalg;
pub mod reduction;
pub mod rng;
pub mod stability;
pub mod vortex;

pub use error::{Error, Result};
pub use num::complex::Complex64 as C64;

/// Dense complex matrix used for every pointwise value.
pub type CMat = nalgebra::DMatrix<C64>;
