use crate::{Error, Result, C64};
use num::{BigInt, BigRational, ToPrimitive, Zero};
use std::f64::consts::PI;

/// τ, τ′, σ (exact) and the Hermitian–Einstein constant λ on X×P¹.
#[derive(Clone, Debug, PartialEq)]
pub struct VortexConstants {
    pub tau: BigRational,
    pub tau_prime: BigRational,
    pub sigma: BigRational,
    /// λ = −(2π√−1/Vol)·deg_σF/rank F with Vol = σ/2; `None` when σ ≤ 0.
    pub lambda_he: Option<C64>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn check_ranks(r1: u32, r2: u32) -> Result<()> {
    if r1 == 0 || r2 == 0 {
        return Err(Error::Invalid("ranks must be positive".into()));
    }
    Ok(())
}

fn finish(tau: BigRational, tau_prime: BigRational, sigma: BigRational, r1: u32, r2: u32, d: i64) -> VortexConstants {
    let lambda_he = if sigma > BigRational::zero() {
        let deg_f = rat(d) + &sigma * rat(r2 as i64);
        let slope = deg_f / rat((r1 + r2) as i64);
        let vol = sigma.to_f64().unwrap() / 2.0;
        Some(C64::new(0.0, -2.0 * PI / vol) * slope.to_f64().unwrap())
    } else {
        None
    };
    VortexConstants { tau, tau_prime, sigma, lambda_he }
}

/// τ′ = −(r₁τ − d₁ − d₂)/r₂ and σ = ((r₁ + r₂)τ − d₁ − d₂)/r₂.
pub fn constants_from_tau(tau: &BigRational, r1: u32, r2: u32, d1: i64, d2: i64) -> Result<VortexConstants> {
    check_ranks(r1, r2)?;
    let d = d1 + d2;
    let tau_prime = -(tau * rat(r1 as i64) - rat(d)) / rat(r2 as i64);
    let sigma = (tau * rat((r1 + r2) as i64) - rat(d)) / rat(r2 as i64);
    Ok(finish(tau.clone(), tau_prime, sigma, r1, r2, d))
}

/// τ = (d₁ + d₂ + σr₂)/(r₁ + r₂), then as [`constants_from_tau`].
pub fn constants_from_sigma(sigma: &BigRational, r1: u32, r2: u32, d1: i64, d2: i64) -> Result<VortexConstants> {
    check_ranks(r1, r2)?;
    let tau = (rat(d1 + d2) + sigma * rat(r2 as i64)) / rat((r1 + r2) as i64);
    constants_from_tau(&tau, r1, r2, d1, d2)
}

impl VortexConstants {
    pub fn tau_f64(&self) -> f64 {
        self.tau.to_f64().unwrap()
    }

    pub fn tau_prime_f64(&self) -> f64 {
        self.tau_prime.to_f64().unwrap()
    }

    pub fn sigma_f64(&self) -> f64 {
        self.sigma.to_f64().unwrap()
    }

    /// Reduction to X×P¹ needs σ > 0.
    pub fn reduction_enabled(&self) -> bool {
        self.sigma > BigRational::zero()
    }

    /// Same constants with τ′ shifted by `eps` (breaks the τ′ constraint;
    /// used to probe the trace identity).
    pub fn with_tau_prime_shift(&self, eps: &BigRational) -> VortexConstants {
        VortexConstants { tau_prime: &self.tau_prime + eps, ..self.clone() }
    }
}
