//! Dimensional reduction: the SU(2)-invariant Higgs bundle
//! F = p*E₁ ⊕ p*E₂⊗q*O(2) on X×P¹ built from a quadruplet, its
//! Hermitian–Einstein residual, integrability of (∂̄_F + θ_F) and the
//! correspondence ι between invariant connections and torus data.

mod assemble;
mod iota;
mod p1line;

pub use assemble::{
    assemble_f, assemble_f_unchecked, calibrate_alpha_beta, calibration_defect, evaluate_point, he_residual_product,
    product_samples, Calibration, ContractionWeights, HeResidual, Normalization, ProductField, ProductPointData,
    ProductSample, TorusJets,
};
pub use iota::{
    assemble_invariant_connection, decompose_invariant_connection, iota_roundtrip, iota_roundtrip_error,
    random_invariant_components, InvariantComponents, InvariantConnectionPoint,
};
pub use p1line::{
    deg_p1, deg_p1_with, fs_contraction, fs_contraction_constant, fs_power_jet, InvariantForms, P1LineData, ScalarJet,
};

use crate::stability::QuadInvariants;
use num::{BigInt, BigRational};

/// deg F under Ω_σ = (σ/2)ω_X + ω_{P¹}: pulled-back bundles contribute
/// their degree times ∫ω_{P¹} = 1, and q*O(2) contributes 2·∫(σ/2)ω_X = σ
/// per rank of E₂.
pub fn deg_sigma_f(inv: &QuadInvariants, sigma: &BigRational) -> BigRational {
    let half_sigma = sigma / BigRational::from_integer(BigInt::from(2));
    let twist = BigRational::from_integer(BigInt::from(2)) * half_sigma;
    BigRational::from_integer(BigInt::from(inv.d1 + inv.d2)) + twist * BigRational::from_integer(BigInt::from(inv.r2))
}

/// deg F / rank F, or None for a zero-rank bundle.
pub fn slope_f(inv: &QuadInvariants, sigma: &BigRational) -> Option<BigRational> {
    let rank = inv.r1 + inv.r2;
    if rank == 0 {
        return None;
    }
    Some(deg_sigma_f(inv, sigma) / BigRational::from_integer(BigInt::from(rank)))
}
