use super::{omega_i, tr_prod, TangentData, SKEW_TOL};
use crate::geometry::{Field, FormType, OneForm, TorusGrid};
use crate::higgs::{MetricPair, QuadrupletSpec};
use crate::linalg::{self, frob};
use crate::vortex::VortexConstants;
use crate::{CMat, Error, Result, C64};
use std::f64::consts::PI;

/// A point (∇₁, Φ₁, ∇₂, Φ₂, φ, ψ) of the configuration space.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    pub conn1: OneForm,
    pub higgs1: OneForm,
    pub conn2: OneForm,
    pub higgs2: OneForm,
    pub phi: Field,
    pub psi: Field,
    pub e1_degrees: Vec<i64>,
    pub e2_degrees: Vec<i64>,
}

/// A direction (u, v) in the Lie algebra of the unitary gauge group.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeDirection {
    pub u: Field,
    pub v: Field,
}

impl GaugeDirection {
    pub fn zeros(grid: &TorusGrid, r1: usize, r2: usize) -> GaugeDirection {
        GaugeDirection {
            u: Field::zeros(grid, r1, r1, FormType::Function),
            v: Field::zeros(grid, r2, r2, FormType::Function),
        }
    }
}

/// dx∧dy-coefficients of μ_I.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentMap {
    pub mu1: Field,
    pub mu2: Field,
}

impl MomentMap {
    /// sup of |μ₁ + 2π√−1τ| and |μ₂ + 2π√−1τ′| (Frobenius).
    pub fn level_defect(&self, c: &VortexConstants) -> (f64, f64) {
        let shift = |f: &Field, t: f64| {
            let s = C64::new(0.0, 2.0 * PI * t);
            f.values.iter().map(|m| frob(&(m + linalg::scalar(s, m.nrows())))).fold(0.0, f64::max)
        };
        (shift(&self.mu1, c.tau_f64()), shift(&self.mu2, c.tau_prime_f64()))
    }
}

fn unitary_frame(h: &Field) -> Result<(Field, Field)> {
    let g = h.try_map(FormType::Function, linalg::herm_sqrt)?;
    let gi = h.try_map(FormType::Function, linalg::herm_inv_sqrt)?;
    Ok((g, gi))
}

fn conjugate(g: &Field, m: &Field, gi: &Field) -> Field {
    let values = g.values.iter().zip(&m.values).zip(&gi.values).map(|((a, b), c)| a * b * c).collect();
    Field { values, ..m.clone() }
}

impl Configuration {
    pub fn ranks(&self) -> (usize, usize) {
        (self.conn1.rank(), self.conn2.rank())
    }

    /// The unitary-frame data of a quadruplet with metrics: g = H^{1/2},
    /// a = g⁻¹∂g − ∂̄g·g⁻¹, θ′ = gΘg⁻¹, Φ = −√−1(θ′ + θ′†), φ′ = g₂φg₁⁻¹, ψ′ = g₁ψg₂⁻¹.
    pub fn from_quadruplet(q: &QuadrupletSpec, h: &MetricPair) -> Result<Configuration> {
        h.validate(q)?;
        let grid = &q.grid;
        let i = C64::new(0.0, 1.0);
        let (g1, g1i) = unitary_frame(&h.h1)?;
        let (g2, g2i) = unitary_frame(&h.h2)?;
        let conn = |g: &Field, gi: &Field| {
            let dg = grid.del_coeff(g);
            let dbg = grid.dbar_coeff(g);
            let az = gi.zip(&dg, FormType::Function, |a, b| a * b);
            let azb = dbg.zip(gi, FormType::Function, |a, b| -(a * b));
            OneForm { x: az.add(&azb), y: az.sub(&azb).scale(i) }
        };
        let higgs = |g: &Field, t: &Field, gi: &Field| {
            let tp = conjugate(g, &t.clone().with_form(FormType::Function), gi);
            let td = tp.adjoint(FormType::Function);
            OneForm { x: tp.add(&td).scale(-i), y: tp.sub(&td) }
        };
        let cfg = Configuration {
            conn1: conn(&g1, &g1i),
            higgs1: higgs(&g1, &q.theta1, &g1i),
            conn2: conn(&g2, &g2i),
            higgs2: higgs(&g2, &q.theta2, &g2i),
            phi: conjugate(&g2, &q.phi, &g1i),
            psi: conjugate(&g1, &q.psi, &g2i),
            e1_degrees: q.e1_degrees.clone(),
            e2_degrees: q.e2_degrees.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let (r1, r2) = self.ranks();
        if self.e1_degrees.len() != r1 || self.e2_degrees.len() != r2 {
            return Err(Error::Shape("degree lists do not match ranks".into()));
        }
        self.higgs1.x.require_shape(r1, r1, "higgs1")?;
        self.higgs2.x.require_shape(r2, r2, "higgs2")?;
        self.phi.require_shape(r2, r1, "phi")?;
        self.psi.require_shape(r1, r2, "psi")?;
        for (name, s) in
            [("conn1", &self.conn1), ("higgs1", &self.higgs1), ("conn2", &self.conn2), ("higgs2", &self.higgs2)]
        {
            let d = s.skew_defect();
            if d > 1e3 * SKEW_TOL * s.sup_norm().max(1.0) {
                return Err(Error::Constraint(format!("{name} is not skew-Hermitian (defect {d:e})")));
            }
        }
        Ok(())
    }

    /// x + t·a.
    pub fn shifted(&self, a: &TangentData, t: f64) -> Configuration {
        let c = C64::new(t, 0.0);
        Configuration {
            conn1: self.conn1.add(&a.a1.scale(c)),
            higgs1: self.higgs1.add(&a.p1.scale(c)),
            conn2: self.conn2.add(&a.a2.scale(c)),
            higgs2: self.higgs2.add(&a.p2.scale(c)),
            phi: self.phi.add(&a.f.scale(c)),
            psi: self.psi.add(&a.g.scale(c)),
            e1_degrees: self.e1_degrees.clone(),
            e2_degrees: self.e2_degrees.clone(),
        }
    }

    /// Act by unitary gauge fields (g₁, g₂). They must preserve the
    /// summand degrees, so that they commute with the background connections.
    pub fn gauge_transform(&self, grid: &TorusGrid, g1: &Field, g2: &Field) -> Result<Configuration> {
        let (r1, r2) = self.ranks();
        g1.require_shape(r1, r1, "g1")?;
        g2.require_shape(r2, r2, "g2")?;
        let g1i = g1.adjoint(FormType::Function);
        let g2i = g2.adjoint(FormType::Function);
        let conn = |a: &OneForm, g: &Field, gi: &Field| {
            let dx = grid.dx(g).zip(gi, FormType::Function, |a, b| a * b);
            let dy = grid.dy(g).zip(gi, FormType::Function, |a, b| a * b);
            OneForm { x: conjugate(g, &a.x, gi).sub(&dx), y: conjugate(g, &a.y, gi).sub(&dy) }
        };
        let adj = |p: &OneForm, g: &Field, gi: &Field| OneForm { x: conjugate(g, &p.x, gi), y: conjugate(g, &p.y, gi) };
        Ok(Configuration {
            conn1: conn(&self.conn1, g1, &g1i),
            higgs1: adj(&self.higgs1, g1, &g1i),
            conn2: conn(&self.conn2, g2, &g2i),
            higgs2: adj(&self.higgs2, g2, &g2i),
            phi: conjugate(g2, &self.phi, &g1i),
            psi: conjugate(g1, &self.psi, &g2i),
            e1_degrees: self.e1_degrees.clone(),
            e2_degrees: self.e2_degrees.clone(),
        })
    }
}

fn curvature_xy(grid: &TorusGrid, a: &OneForm, degrees: &[i64]) -> Field {
    let bg = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        degrees.len(),
        degrees.iter().map(|d| C64::new(0.0, -2.0 * PI * *d as f64)),
    ));
    let da = grid.dx(&a.y).sub(&grid.dy(&a.x));
    let br = a.x.zip(&a.y, FormType::Function, linalg::commutator);
    da.add(&br).map(FormType::Function, move |m| m + &bg)
}

/// μ_I = (F₁ − Φ₁∧Φ₁ + √−1φ*φ − √−1ψψ*, F₂ − Φ₂∧Φ₂ − √−1φφ* + √−1ψ*ψ).
pub fn moment_mu_i(grid: &TorusGrid, x: &Configuration) -> Result<MomentMap> {
    x.validate()?;
    let i = C64::new(0.0, 1.0);
    let phi_d = x.phi.adjoint(FormType::Function);
    let psi_d = x.psi.adjoint(FormType::Function);
    let pp1 = phi_d.mul(&x.phi, FormType::Function);
    let ss1 = x.psi.mul(&psi_d, FormType::Function);
    let pp2 = x.phi.mul(&phi_d, FormType::Function);
    let ss2 = psi_d.mul(&x.psi, FormType::Function);
    let hh1 = x.higgs1.x.zip(&x.higgs1.y, FormType::Function, linalg::commutator);
    let hh2 = x.higgs2.x.zip(&x.higgs2.y, FormType::Function, linalg::commutator);
    let mu1 = curvature_xy(grid, &x.conn1, &x.e1_degrees).sub(&hh1).add(&pp1.sub(&ss1).scale(i));
    let mu2 = curvature_xy(grid, &x.conn2, &x.e2_degrees).sub(&hh2).add(&ss2.sub(&pp2).scale(i));
    Ok(MomentMap { mu1, mu2 })
}

/// ⟨μ, ξ⟩ = ∫Tr(uμ₁ + vμ₂).
pub fn pair(grid: &TorusGrid, mu: &MomentMap, xi: &GaugeDirection) -> f64 {
    let s: C64 = mu
        .mu1
        .values
        .iter()
        .zip(&xi.u.values)
        .map(|(m, u)| tr_prod(u, m))
        .chain(mu.mu2.values.iter().zip(&xi.v.values).map(|(m, v)| tr_prod(v, m)))
        .sum();
    s.re * grid.cell_weight()
}

/// The infinitesimal gauge action X_ξ(x).
pub fn infinitesimal_action(grid: &TorusGrid, x: &Configuration, xi: &GaugeDirection) -> TangentData {
    let conn = |a: &OneForm, u: &Field| {
        let ux = grid.dx(u).add(&a.x.zip(u, FormType::Function, linalg::commutator));
        let uy = grid.dy(u).add(&a.y.zip(u, FormType::Function, linalg::commutator));
        OneForm { x: ux.scale(C64::new(-1.0, 0.0)), y: uy.scale(C64::new(-1.0, 0.0)) }
    };
    let adj = |p: &OneForm, u: &Field| OneForm {
        x: u.zip(&p.x, FormType::Function, linalg::commutator),
        y: u.zip(&p.y, FormType::Function, linalg::commutator),
    };
    let (u, v) = (&xi.u, &xi.v);
    TangentData {
        a1: conn(&x.conn1, u),
        p1: adj(&x.higgs1, u),
        a2: conn(&x.conn2, v),
        p2: adj(&x.higgs2, v),
        f: v.mul(&x.phi, FormType::Function).sub(&x.phi.mul(u, FormType::Function)),
        g: u.mul(&x.psi, FormType::Function).sub(&x.psi.mul(v, FormType::Function)),
    }
}

/// |d⟨μ_I, ξ⟩(x)[a] − ω_I(a, X_ξ(x))| with a central difference of step `step`.
pub fn moment_map_property_check(
    grid: &TorusGrid,
    x: &Configuration,
    a: &TangentData,
    xi: &GaugeDirection,
    step: f64,
) -> Result<f64> {
    a.validate()?;
    let plus = pair(grid, &moment_mu_i(grid, &x.shifted(a, step))?, xi);
    let minus = pair(grid, &moment_mu_i(grid, &x.shifted(a, -step))?, xi);
    let fd = (plus - minus) / (2.0 * step);
    let w = omega_i(grid, a, &infinitesimal_action(grid, x, xi))?;
    Ok((fd - w).abs())
}

/// sup |μ(g·x) − g μ(x) g⁻¹| over both components.
pub fn equivariance_defect(grid: &TorusGrid, x: &Configuration, g1: &Field, g2: &Field) -> Result<f64> {
    let mu = moment_mu_i(grid, x)?;
    let mg = moment_mu_i(grid, &x.gauge_transform(grid, g1, g2)?)?;
    let d1 = mg.mu1.sub(&conjugate(g1, &mu.mu1, &g1.adjoint(FormType::Function))).sup_norm();
    let d2 = mg.mu2.sub(&conjugate(g2, &mu.mu2, &g2.adjoint(FormType::Function))).sup_norm();
    Ok(d1.max(d2))
}

#[cfg(test)]
mod tests {
    use super::super::{random_configuration, random_gauge_direction, random_tangent, random_unitary_gauge};
    use super::*;
    use crate::vortex::{constants_from_tau, residual, solve, unitary_sup_norm, SolveOptions};
    use num::BigRational;

    #[test]
    fn flat_decoupled_moment_vanishes() {
        let g = TorusGrid::new(8).unwrap();
        let q = QuadrupletSpec::constant(
            &g,
            vec![0, 0],
            vec![0],
            &CMat::zeros(2, 2),
            &CMat::zeros(1, 1),
            &CMat::zeros(1, 2),
            &CMat::zeros(2, 1),
        )
        .unwrap();
        let x = Configuration::from_quadruplet(&q, &MetricPair::identity(&g, 2, 1)).unwrap();
        let mu = moment_mu_i(&g, &x).unwrap();
        assert_eq!(mu.mu1.sup_norm().max(mu.mu2.sup_norm()), 0.0);
    }

    #[test]
    fn moment_map_identity() {
        let g = TorusGrid::new(32).unwrap();
        for seed in 0..3 {
            let x = random_configuration(&g, 2, 1, seed);
            let a = random_tangent(&g, 2, 1, seed + 10);
            let xi = random_gauge_direction(&g, 2, 1, seed + 20);
            assert!(moment_map_property_check(&g, &x, &a, &xi, 1e-4).unwrap() < 1e-6);
            let zero = GaugeDirection::zeros(&g, 2, 1);
            assert_eq!(moment_map_property_check(&g, &x, &a, &zero, 1e-4).unwrap(), 0.0);
        }
    }

    #[test]
    fn gauge_directions_pair_with_the_bracket() {
        // a = X_η: d⟨μ,ξ⟩(X_η) = ⟨[η, μ], ξ⟩ by equivariance, and ω_I(X_η, X_ξ) must match.
        let g = TorusGrid::new(32).unwrap();
        let x = random_configuration(&g, 2, 2, 4);
        let eta = random_gauge_direction(&g, 2, 2, 5);
        let xi = random_gauge_direction(&g, 2, 2, 6);
        let a = infinitesimal_action(&g, &x, &eta);
        assert!(moment_map_property_check(&g, &x, &a, &xi, 1e-4).unwrap() < 1e-6);
        let mu = moment_mu_i(&g, &x).unwrap();
        let br = MomentMap {
            mu1: eta.u.zip(&mu.mu1, FormType::Function, linalg::commutator),
            mu2: eta.v.zip(&mu.mu2, FormType::Function, linalg::commutator),
        };
        let w = omega_i(&g, &a, &infinitesimal_action(&g, &x, &xi)).unwrap();
        assert!((pair(&g, &br, &xi) - w).abs() < 1e-6);
    }

    #[test]
    fn moment_map_is_equivariant() {
        let g = TorusGrid::new(32).unwrap();
        let x = random_configuration(&g, 2, 2, 1);
        let g1 = random_unitary_gauge(&g, 2, 7);
        let g2 = random_unitary_gauge(&g, 2, 8);
        assert!(equivariance_defect(&g, &x, &g1, &g2).unwrap() < 1e-10);
    }

    #[test]
    fn moment_level_matches_vortex_residual() {
        let g = TorusGrid::new(32).unwrap();
        let one = CMat::from_element(1, 1, C64::new(1.0, 0.0));
        let z = CMat::zeros(1, 1);
        let q = QuadrupletSpec::constant(&g, vec![0], vec![0], &z, &z, &z, &one).unwrap();
        let c = constants_from_tau(&BigRational::from_integer(1.into()), 1, 1, 0, 0).unwrap();
        // away from a solution the defect equals |R| in the unitary frame
        let h0 = crate::vortex::initial_metrics(
            &q,
            &SolveOptions { init_perturbation: 0.01, seed: 2, ..Default::default() },
        );
        let x0 = Configuration::from_quadruplet(&q, &h0).unwrap();
        let (d1, d2) = moment_mu_i(&g, &x0).unwrap().level_defect(&c);
        let r = residual(&q, &h0, &c).unwrap();
        let (n1, n2) = (unitary_sup_norm(&r.r1, &h0.h1).unwrap(), unitary_sup_norm(&r.r2, &h0.h2).unwrap());
        assert!(n1 > 1.0);
        assert!((d1 - n1).abs() < 1e-8 * n1, "{d1} vs {n1}");
        assert!((d2 - n2).abs() < 1e-8 * n2, "{d2} vs {n2}");
        // at a solution it vanishes
        let (h, rep) = solve(&q, &c, &SolveOptions::default()).unwrap();
        assert!(rep.converged);
        let (d1, d2) = moment_mu_i(&g, &Configuration::from_quadruplet(&q, &h).unwrap()).unwrap().level_defect(&c);
        assert!(d1.max(d2) < 1e-7);
    }
}
