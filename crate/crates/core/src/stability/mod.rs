//! Exact slope arithmetic and stability verdicts for Higgs quadruplets.
//!
//! For invariants (r₁, r₂, d₁, d₂):
//!
//! ```text
//! deg_σ = d₁ + d₂ + r₂σ,   μ_σ = deg_σ / (r₁ + r₂)
//! Θ_τ(Q′) = (μ(E′₁⊕E′₂) − τ) − (r′₂/r₂)·((r₁+r₂)/(r′₁+r′₂))·(μ(E₁⊕E₂) − τ)
//! ```
//!
//! Q is τ-stable if Θ_τ(Q′) < 0 for every nontrivial sub-quadruplet Q′ and
//! τ-semistable if Θ_τ(Q′) ≤ 0 (the non-strict inequality is the intended
//! reading of semistability). All verdicts are relative to the catalog of
//! sub-objects they are given; no floating point is used in this module.

mod catalog;

pub use catalog::{
    coordinate_subquadruplets, BlockSupport, CatalogEntry, SubobjectCatalog, PROVENANCE_COORDINATE,
    PROVENANCE_DEGREE_LOWERED, PROVENANCE_USER,
};

use crate::{Error, Result};
use num::{BigInt, BigRational, Zero};
use serde::{Deserialize, Serialize};

/// Rank/degree invariants of a quadruplet or sub-quadruplet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadInvariants {
    pub r1: u32,
    pub r2: u32,
    pub d1: i64,
    pub d2: i64,
}

impl QuadInvariants {
    pub fn new(r1: u32, r2: u32, d1: i64, d2: i64) -> QuadInvariants {
        QuadInvariants { r1, r2, d1, d2 }
    }

    pub fn rank(&self) -> u32 {
        self.r1 + self.r2
    }

    pub fn is_zero(&self) -> bool {
        self.r1 == 0 && self.r2 == 0
    }

    /// Ordinary slope μ(E₁⊕E₂).
    pub fn slope(&self) -> Result<BigRational> {
        mu_sigma(self, &BigRational::zero())
    }
}

impl std::fmt::Display for QuadInvariants {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{},{})", self.r1, self.r2, self.d1, self.d2)
    }
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn deg_sigma(q: &QuadInvariants, sigma: &BigRational) -> BigRational {
    int(q.d1 + q.d2) + sigma * int(q.r2 as i64)
}

pub fn mu_sigma(q: &QuadInvariants, sigma: &BigRational) -> Result<BigRational> {
    if q.rank() == 0 {
        return Err(Error::Invalid("slope of a rank-zero object".into()));
    }
    Ok(deg_sigma(q, sigma) / int(q.rank() as i64))
}

/// Θ_τ(sub) relative to `ambient`.
pub fn theta_tau(sub: &QuadInvariants, ambient: &QuadInvariants, tau: &BigRational) -> Result<BigRational> {
    if sub.is_zero() || sub == ambient {
        return Err(Error::Invalid(format!("trivial sub-quadruplet {sub}")));
    }
    if ambient.r2 == 0 {
        return Err(Error::Invalid("ambient quadruplet needs r2 > 0".into()));
    }
    let mu_sub = sub.slope()?;
    let mu_amb = ambient.slope()?;
    let ratio = BigRational::new(
        BigInt::from(sub.r2 as i64) * BigInt::from(ambient.rank() as i64),
        BigInt::from(ambient.r2 as i64) * BigInt::from(sub.rank() as i64),
    );
    Ok((mu_sub - tau) - ratio * (mu_amb - tau))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityKind {
    Stable,
    Semistable,
    Unstable,
}

/// A verdict relative to a catalog. `witnesses` are the entries attaining
/// the largest value of the criterion (Θ_τ, or μ_σ(Q′) − μ_σ(Q)).
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub kind: StabilityKind,
    pub witnesses: Vec<CatalogEntry>,
    pub max_value: Option<BigRational>,
    /// The catalog was empty, so stability holds vacuously.
    pub vacuous: bool,
}

fn verdict_from_values(entries: &[CatalogEntry], values: Vec<BigRational>) -> Verdict {
    let Some(max) = values.iter().max().cloned() else {
        return Verdict { kind: StabilityKind::Stable, witnesses: vec![], max_value: None, vacuous: true };
    };
    let witnesses = entries.iter().zip(&values).filter(|(_, v)| **v == max).map(|(e, _)| e.clone()).collect();
    let kind = if max < BigRational::zero() {
        StabilityKind::Stable
    } else if max.is_zero() {
        StabilityKind::Semistable
    } else {
        StabilityKind::Unstable
    };
    Verdict { kind, witnesses, max_value: Some(max), vacuous: false }
}

pub fn verdict_tau(catalog: &SubobjectCatalog, tau: &BigRational) -> Result<Verdict> {
    let values: Result<Vec<_>> =
        catalog.entries.iter().map(|e| theta_tau(&e.invariants, &catalog.ambient, tau)).collect();
    Ok(verdict_from_values(&catalog.entries, values?))
}

pub fn verdict_sigma(catalog: &SubobjectCatalog, sigma: &BigRational) -> Result<Verdict> {
    let mu = mu_sigma(&catalog.ambient, sigma)?;
    let values: Result<Vec<_>> = catalog.entries.iter().map(|e| Ok(mu_sigma(&e.invariants, sigma)? - &mu)).collect();
    Ok(verdict_from_values(&catalog.entries, values?))
}

/// With τ = μ_σ(Q), checks Θ_τ(Q′) = μ_σ(Q′) − μ_σ(Q) for every entry.
pub fn equivalence_check(catalog: &SubobjectCatalog, sigma: &BigRational) -> Result<bool> {
    let mu = mu_sigma(&catalog.ambient, sigma)?;
    for e in &catalog.entries {
        let lhs = theta_tau(&e.invariants, &catalog.ambient, &mu)?;
        let rhs = mu_sigma(&e.invariants, sigma)? - &mu;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn direct_sum(a: &QuadInvariants, b: &QuadInvariants) -> QuadInvariants {
    QuadInvariants { r1: a.r1 + b.r1, r2: a.r2 + b.r2, d1: a.d1 + b.d1, d2: a.d2 + b.d2 }
}

/// Polystable iff every part is σ-stable relative to its own catalog and all
/// parts share the σ-slope of their direct sum.
pub fn polystable_check(parts: &[SubobjectCatalog], sigma: &BigRational) -> Result<bool> {
    let first = parts.first().ok_or_else(|| Error::Invalid("empty list of parts".into()))?;
    let total = parts[1..].iter().fold(first.ambient, |acc, p| direct_sum(&acc, &p.ambient));
    let mu = mu_sigma(&total, sigma)?;
    for p in parts {
        if mu_sigma(&p.ambient, sigma)? != mu {
            return Ok(false);
        }
        if verdict_sigma(p, sigma)?.kind != StabilityKind::Stable {
            return Ok(false);
        }
    }
    Ok(true)
}
