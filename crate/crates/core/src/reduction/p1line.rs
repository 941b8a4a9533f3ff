//! Line bundles O(n) on P¹ with the metrics h⁽ⁿ⁾ and the SU(2)-invariant
//! forms α ∈ A^{0,1}(O(−2)), β ∈ A^{1,0}(O(2)).
//!
//! In either chart coordinate ζ, h⁽ⁿ⁾(e_{n,ζ}, e_{n,ζ}) = (1+|ζ|²)^{-n} and
//! the frames glue by e_{n,w} = z^n e_{n,z}. The chart formulas are
//! α = ±(1+|ζ|²)^{-2} dζ̄⊗e_{−2,ζ} and β = ±dζ⊗e_{2,ζ}, with + in the z-chart.

use crate::geometry::{ChartId, P1Quadrature};
use crate::{Error, Result, C64};
use std::f64::consts::PI;

/// Value and first/mixed derivatives of a real function of ζ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarJet {
    pub v: f64,
    /// ∂_ζ
    pub d: C64,
    /// ∂_ζ̄
    pub db: C64,
    /// ∂_ζ∂_ζ̄
    pub ddb: f64,
}

/// Jet of (1+|ζ|²)^{-n}.
pub fn fs_power_jet(n: i32, zeta: C64) -> ScalarJet {
    let q = 1.0 + zeta.norm_sqr();
    let nf = n as f64;
    let v = q.powi(-n);
    let d = zeta.conj() * (-nf * q.powi(-n - 1));
    let db = zeta * (-nf * q.powi(-n - 1));
    let ddb = -nf * q.powi(-n - 1) + nf * (nf + 1.0) * zeta.norm_sqr() * q.powi(-n - 2);
    ScalarJet { v, d, db, ddb }
}

/// The Hermitian line bundle (O(n), h⁽ⁿ⁾).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct P1LineData {
    pub n: i32,
}

impl P1LineData {
    pub fn new(n: i32) -> P1LineData {
        P1LineData { n }
    }

    /// h⁽ⁿ⁾ of the chart frame at chart coordinate ζ (same formula in both charts).
    pub fn metric(&self, zeta: C64) -> f64 {
        (1.0 + zeta.norm_sqr()).powi(-self.n)
    }

    /// |h_w(e_{n,w}) − |z|^{2n} h_z(e_{n,z})| at a z-chart point.
    pub fn transition_defect(&self, z: C64) -> f64 {
        let w = ChartId::Z.transition(z);
        (self.metric(w) - z.norm_sqr().powi(self.n) * self.metric(z)).abs()
    }

    /// dζ∧dζ̄-coefficient of F = −∂̄∂ log h, from the derivative jet of h.
    pub fn curvature(&self, zeta: C64) -> C64 {
        let j = fs_power_jet(self.n, zeta);
        -(C64::new(j.ddb, 0.0) / j.v - j.d * j.db / (j.v * j.v))
    }

    /// Λ_{P¹}F: ω_{P¹} = (i/2π)(1+|ζ|²)^{-2}dζ∧dζ̄, so Λ(dζ∧dζ̄) = −2πi(1+|ζ|²)².
    pub fn contracted_curvature(&self, zeta: C64) -> C64 {
        let q = 1.0 + zeta.norm_sqr();
        self.curvature(zeta) * C64::new(0.0, -2.0 * PI * q * q)
    }
}

/// (√−1/2π)∫_{P¹} Λ F_{h⁽ⁿ⁾} ω_{P¹} by two-chart quadrature.
pub fn deg_p1_with(n: i32, quad: &P1Quadrature) -> Result<f64> {
    if n.abs() > 8 {
        return Err(Error::Invalid(format!("deg_p1 is validated for |n| <= 8, got {n}")));
    }
    let min_radial = quad.z.points.len() / quad_angular(quad);
    if min_radial < 8 {
        return Err(Error::Resolution("P1 quadrature resolution too low".into()));
    }
    let line = P1LineData::new(n);
    let v = quad.integrate(|_, zeta| line.contracted_curvature(zeta)) * C64::new(0.0, 1.0 / (2.0 * PI));
    Ok(v.re)
}

fn quad_angular(quad: &P1Quadrature) -> usize {
    let r0 = quad.z.points[0].norm();
    quad.z.points.iter().take_while(|p| (p.norm() - r0).abs() < 1e-14).count()
}

/// Degree of (O(n), h⁽ⁿ⁾) at the default quadrature.
pub fn deg_p1(n: i32) -> Result<f64> {
    deg_p1_with(n, &P1Quadrature::default_resolution())
}

/// Mean of Λ_{P¹}F_{h⁽ⁿ⁾} over the quadrature nodes and its largest deviation.
pub fn fs_contraction(n: i32) -> (C64, f64) {
    let quad = P1Quadrature::default_resolution();
    let line = P1LineData::new(n);
    let vals: Vec<C64> = quad.nodes().map(|(_, z, _)| line.contracted_curvature(z)).collect();
    let mean = vals.iter().sum::<C64>() / vals.len() as f64;
    let spread = vals.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
    (mean, spread)
}

/// Λ_{P¹}F_{h⁽²⁾}, which is the constant −4π√−1.
pub fn fs_contraction_constant() -> C64 {
    fs_contraction(2).0
}

/// The invariant forms α, β in chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantForms;

impl InvariantForms {
    /// Coefficient of dζ̄⊗e_{−2,ζ} in α.
    pub fn alpha(chart: ChartId, zeta: C64) -> C64 {
        let q = 1.0 + zeta.norm_sqr();
        C64::new(chart.sign() / (q * q), 0.0)
    }

    /// Coefficient of dζ⊗e_{2,ζ} in β.
    pub fn beta(chart: ChartId, _zeta: C64) -> C64 {
        C64::new(chart.sign(), 0.0)
    }

    /// Transport the z-chart formulas to the w-chart at z and compare with the
    /// w-chart formulas. dz̄ = −z̄²dw̄, e_{−2,z} = z²e_{−2,w}, dz = −z²dw,
    /// e_{2,z} = z^{-2}e_{2,w}.
    pub fn chart_defect(z: C64) -> f64 {
        let w = ChartId::Z.transition(z);
        let alpha_w = Self::alpha(ChartId::Z, z) * (-(z.conj() * z.conj())) * (z * z);
        let beta_w = Self::beta(ChartId::Z, z) * (-(z * z)) / (z * z);
        (alpha_w - Self::alpha(ChartId::W, w)).norm().max((beta_w - Self::beta(ChartId::W, w)).norm())
    }

    /// |α|² using h⁽⁻²⁾ on the fibre and the round cotangent metric
    /// |dζ|² = (1+|ζ|²)².
    pub fn alpha_norm_sqr(chart: ChartId, zeta: C64) -> f64 {
        let q = 1.0 + zeta.norm_sqr();
        Self::alpha(chart, zeta).norm_sqr() * P1LineData::new(-2).metric(zeta) * q * q
    }

    pub fn beta_norm_sqr(chart: ChartId, zeta: C64) -> f64 {
        let q = 1.0 + zeta.norm_sqr();
        Self::beta(chart, zeta).norm_sqr() * P1LineData::new(2).metric(zeta) * q * q
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::p1_quadrature;

    fn ring(k: usize) -> impl Iterator<Item = C64> {
        (0..k).map(move |j| C64::from_polar(1.0, 2.0 * PI * j as f64 / k as f64 + 0.1))
    }

    #[test]
    fn jet_matches_finite_differences() {
        let z = C64::new(0.3, -0.7);
        let h = 1e-5;
        for n in [-2, 1, 2, 3] {
            let j = fs_power_jet(n, z);
            let f = |z: C64| (1.0 + z.norm_sqr()).powi(-n);
            let fx = (f(z + h) - f(z - h)) / (2.0 * h);
            let fy = (f(z + C64::new(0.0, h)) - f(z - C64::new(0.0, h))) / (2.0 * h);
            assert!((j.d - C64::new(fx, -fy) * 0.5).norm() < 1e-8);
            assert!((j.db - C64::new(fx, fy) * 0.5).norm() < 1e-8);
            let lap = (f(z + h) + f(z - h) + f(z + C64::new(0.0, h)) + f(z - C64::new(0.0, h)) - 4.0 * f(z)) / (h * h);
            assert!((j.ddb - lap / 4.0).abs() < 1e-4);
        }
    }

    #[test]
    fn degrees_by_quadrature() {
        for n in -4..=4 {
            assert!((deg_p1(n).unwrap() - n as f64).abs() < 1e-6, "n = {n}");
        }
        assert!(deg_p1(0).unwrap().abs() < 1e-15);
        assert!(deg_p1(9).is_err());
    }

    #[test]
    fn contraction_constants() {
        let (c, spread) = fs_contraction(2);
        assert!((c - C64::new(0.0, -4.0 * PI)).norm() < 1e-8);
        assert!(spread < 1e-8);
        assert!(fs_contraction(0).0.norm() < 1e-12);
        assert!((fs_contraction(-2).0 - C64::new(0.0, 4.0 * PI)).norm() < 1e-8);
    }

    #[test]
    fn metric_glues_across_charts() {
        for n in -3..=3 {
            let line = P1LineData::new(n);
            for z in ring(64) {
                assert!(line.transition_defect(z) < 1e-12);
            }
            assert!(line.transition_defect(C64::new(0.4, 1.7)) < 1e-12);
        }
    }

    #[test]
    fn invariant_forms() {
        for z in ring(64) {
            assert!(InvariantForms::chart_defect(z) < 1e-10);
        }
        assert!(InvariantForms::chart_defect(C64::new(0.2, -0.5)) < 1e-10);
        assert!((InvariantForms::alpha_norm_sqr(ChartId::Z, C64::new(0.0, 0.0)) - 1.0).abs() < 1e-15);
        let q = p1_quadrature(12, 12).unwrap();
        for (c, z, _) in q.nodes() {
            assert!((InvariantForms::alpha_norm_sqr(c, z) - 1.0).abs() < 1e-10);
            assert!((InvariantForms::beta_norm_sqr(c, z) - 1.0).abs() < 1e-10);
        }
    }
}
