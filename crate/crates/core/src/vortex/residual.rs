use super::VortexConstants;
use crate::geometry::{Field, FormType};
use crate::higgs::{bracket_theta, chern_curvature, higgs_adjoint, morphism_adjoint, MetricPair, QuadrupletSpec};
use crate::linalg::{self, frob};
use crate::{CMat, Result, C64};
use rayon::prelude::*;
use std::f64::consts::PI;

/// The two left-hand sides, as endomorphism-valued functions.
#[derive(Clone, Debug)]
pub struct VortexResidual {
    pub r1: Field,
    pub r2: Field,
}

/// Sup norm of R measured in the unitary frame of h (Frobenius norm of
/// h^{1/2} R h^{-1/2}); equals |R| in rank one.
pub fn unitary_sup_norm(r: &Field, h: &Field) -> Result<f64> {
    let norms: Result<Vec<f64>> = r
        .values
        .par_iter()
        .zip(h.values.par_iter())
        .map(|(rm, hm)| {
            let g = linalg::herm_sqrt(hm)?;
            let gi = linalg::herm_inv_sqrt(hm)?;
            Ok(frob(&(g * rm * gi)))
        })
        .collect();
    Ok(norms?.into_iter().fold(0.0, f64::max))
}

impl VortexResidual {
    pub fn sup_norms(&self, h: &MetricPair) -> Result<(f64, f64)> {
        Ok((unitary_sup_norm(&self.r1, &h.h1)?, unitary_sup_norm(&self.r2, &h.h2)?))
    }
}

fn contracted_higgs_curvature(q: &QuadrupletSpec, h: &Field, theta: &Field, degrees: &[i64]) -> Result<Field> {
    let f = chern_curvature(&q.grid, h, degrees)?;
    let b = bracket_theta(theta, &higgs_adjoint(theta, h)?)?;
    q.grid.lambda_contract(&f.add(&b))
}

pub fn residual(q: &QuadrupletSpec, h: &MetricPair, c: &VortexConstants) -> Result<VortexResidual> {
    h.validate(q)?;
    let i = C64::new(0.0, 1.0);
    let phi_star = morphism_adjoint(&q.phi, &h.h1, &h.h2)?;
    let psi_star = morphism_adjoint(&q.psi, &h.h2, &h.h1)?;

    let lf1 = contracted_higgs_curvature(q, &h.h1, &q.theta1, &q.e1_degrees)?;
    let lf2 = contracted_higgs_curvature(q, &h.h2, &q.theta2, &q.e2_degrees)?;

    let pp1 = phi_star.mul(&q.phi, FormType::Function); // φ*φ on E₁
    let ss1 = q.psi.mul(&psi_star, FormType::Function); // ψψ* on E₁
    let pp2 = q.phi.mul(&phi_star, FormType::Function); // φφ* on E₂
    let ss2 = psi_star.mul(&q.psi, FormType::Function); // ψ*ψ on E₂

    let t1 = linalg::scalar(i * (2.0 * PI * c.tau_f64()), q.r1());
    let t2 = linalg::scalar(i * (2.0 * PI * c.tau_prime_f64()), q.r2());

    let r1 = lf1.add(&pp1.sub(&ss1).scale(i)).map(FormType::Function, move |m| m + &t1);
    let r2 = lf2.add(&ss2.sub(&pp2).scale(i)).map(FormType::Function, move |m| m + &t2);
    Ok(VortexResidual { r1, r2 })
}

/// |∫tr(√−1R₁) + ∫tr(√−1R₂)|. Vanishes for every admissible input when τ′
/// satisfies its constraint.
pub fn trace_identity_check(q: &QuadrupletSpec, h: &MetricPair, c: &VortexConstants) -> Result<f64> {
    let r = residual(q, h, c)?;
    let g = &q.grid;
    let i = C64::new(0.0, 1.0);
    let t1 = g.integrate(&r.r1.trace())?[(0, 0)] * i;
    let t2 = g.integrate(&r.r2.trace())?[(0, 0)] * i;
    Ok((t1 + t2).norm())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolutionCheck {
    pub is_solution: bool,
    pub sup_r1: f64,
    pub sup_r2: f64,
}

pub fn is_solution(q: &QuadrupletSpec, h: &MetricPair, c: &VortexConstants, tol: f64) -> Result<SolutionCheck> {
    let (sup_r1, sup_r2) = residual(q, h, c)?.sup_norms(h)?;
    Ok(SolutionCheck { is_solution: sup_r1 <= tol && sup_r2 <= tol, sup_r1, sup_r2 })
}

/// Pointwise h-skewness defect of R (√−1·h·R should be Hermitian);
/// exposed for tests.
pub fn skew_defect(r: &Field, h: &Field) -> f64 {
    r.values
        .iter()
        .zip(&h.values)
        .map(|(rm, hm)| {
            let m: CMat = hm * rm * C64::new(0.0, 1.0);
            linalg::hermitian_defect(&m)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TorusGrid;
    use crate::vortex::constants_from_tau;
    use num::BigRational;

    fn scalar(z: C64) -> CMat {
        CMat::from_element(1, 1, z)
    }

    fn rank_one(g: &TorusGrid, phi: f64, psi: f64) -> QuadrupletSpec {
        let z = scalar(C64::new(0.0, 0.0));
        QuadrupletSpec::constant(g, vec![0], vec![0], &z, &z, &scalar(C64::new(phi, 0.0)), &scalar(C64::new(psi, 0.0)))
            .unwrap()
    }

    fn tau(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn trivial_cases() {
        let g = TorusGrid::new(8).unwrap();
        let q = rank_one(&g, 0.0, 0.0);
        let h = MetricPair::identity(&g, 1, 1);
        let c0 = constants_from_tau(&tau(0), 1, 1, 0, 0).unwrap();
        let r = residual(&q, &h, &c0).unwrap();
        assert!(r.r1.sup_norm() < 1e-14 && r.r2.sup_norm() < 1e-14);

        let c1 = constants_from_tau(&tau(1), 1, 1, 0, 0).unwrap();
        let r = residual(&q, &h, &c1).unwrap();
        for (a, b) in r.r1.values.iter().zip(&r.r2.values) {
            assert!((a[(0, 0)] - C64::new(0.0, 2.0 * PI)).norm() < 1e-13);
            assert!((b[(0, 0)] - C64::new(0.0, -2.0 * PI)).norm() < 1e-13);
        }
    }

    #[test]
    fn psi_example_by_hand() {
        let g = TorusGrid::new(8).unwrap();
        let q = rank_one(&g, 0.0, 1.0);
        let h = MetricPair::identity(&g, 1, 1);
        let c = constants_from_tau(&tau(1), 1, 1, 0, 0).unwrap();
        let r = residual(&q, &h, &c).unwrap();
        for v in &r.r1.values {
            assert!((v[(0, 0)] - C64::new(0.0, -1.0 + 2.0 * PI)).norm() < 1e-13);
        }
        assert!(trace_identity_check(&q, &h, &c).unwrap() < 1e-12);
    }

    #[test]
    fn phi_term_sign() {
        // rank one, h = Id: R₁ = +√−1|φ|² + 2π√−1τ
        let g = TorusGrid::new(8).unwrap();
        let q = rank_one(&g, 1.0, 0.0);
        let h = MetricPair::identity(&g, 1, 1);
        let c = constants_from_tau(&tau(1), 1, 1, 0, 0).unwrap();
        let r = residual(&q, &h, &c).unwrap();
        assert!((r.r1.values[0][(0, 0)] - C64::new(0.0, 1.0 + 2.0 * PI)).norm() < 1e-13);
        assert!((r.r2.values[0][(0, 0)] - C64::new(0.0, -1.0 - 2.0 * PI)).norm() < 1e-13);
    }

    #[test]
    fn tau_prime_shift_is_linear() {
        let g = TorusGrid::new(8).unwrap();
        let q = rank_one(&g, 0.0, 1.0);
        let h = MetricPair::identity(&g, 1, 1);
        let c = constants_from_tau(&tau(1), 1, 1, 0, 0).unwrap();
        let eps = BigRational::new(1.into(), 1000.into());
        let v = trace_identity_check(&q, &h, &c.with_tau_prime_shift(&eps)).unwrap();
        assert!((v - 2.0 * PI * 1e-3).abs() < 1e-12);
    }

    #[test]
    fn joint_scaling_leaves_residual_unchanged() {
        let g = TorusGrid::new(8).unwrap();
        let q = rank_one(&g, 0.0, 1.0);
        let h = MetricPair::identity(&g, 1, 1);
        let c = constants_from_tau(&tau(1), 1, 1, 0, 0).unwrap();
        let a = residual(&q, &h, &c).unwrap();
        let b = residual(&q, &h.scaled(3.7), &c).unwrap();
        assert!(a.r1.sub(&b.r1).sup_norm() < 1e-13);
        assert!(a.r2.sub(&b.r2).sup_norm() < 1e-13);
    }
}
