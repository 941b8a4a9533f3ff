//! The doubly-coupled τ-vortex equations on the torus.
//!
//! For a quadruplet (E₁, E₂, θ₁, θ₂, φ, ψ) and metrics (h₁, h₂) the residuals are
//!
//! ```text
//! R₁ = Λ(F_{h₁} + [θ₁, θ₁†]) + √−1 φ*φ − √−1 ψψ* + 2π√−1 τ  Id
//! R₂ = Λ(F_{h₂} + [θ₂, θ₂†]) − √−1 φφ* + √−1 ψ*ψ + 2π√−1 τ′ Id
//! ```
//!
//! with τ′ = −(r₁τ − d₁ − d₂)/r₂. Integrating the traces gives
//! 2π(d₁ + d₂) − 2π(r₁τ + r₂τ′) = 0, which is what fixes τ′.
//!
//! The φ-terms carry the signs produced by dimensional reduction from the
//! Hermitian–Einstein equation on X×P¹; with these signs a quadruplet whose
//! sub-object (0, E₂) destabilises it admits no solution.

mod constants;
mod residual;
mod solver;

pub use constants::{constants_from_sigma, constants_from_tau, VortexConstants};
pub use residual::{
    is_solution, residual, skew_defect, trace_identity_check, unitary_sup_norm, SolutionCheck, VortexResidual,
};
pub use solver::{initial_metrics, solve, solve_from, HistoryRow, SolveOptions, SolveReport, SolveStatus};
