//! Higgs quadruplets on the torus: two Higgs bundles (E₁, θ₁), (E₂, θ₂)
//! built from line-bundle summands, morphisms φ: E₁→E₂ and ψ: E₂→E₁, and
//! Hermitian metrics.
//!
//! Each summand of degree d carries a fixed background connection of
//! constant curvature −2π√−1·d·ω. Dynamical fields are periodic matrix
//! fields; entries linking summands of different degree are forbidden, so
//! on every allowed block the covariant derivatives reduce to plain ones.
//!
//! Metric convention: h(s, t) = s†Ht. The Chern connection is H⁻¹∂H and
//! F_h = F_bg + ∂̄(H⁻¹∂H), whose dz∧dz̄ coefficient is πD − ∂_z̄(H⁻¹∂_zH).

use crate::geometry::{Field, FormType, TorusGrid};
use crate::linalg::{self, frob};
use crate::{CMat, Error, Result, C64};

/// Default sup-norm tolerance for the quadruplet constraints.
pub const CONSTRAINT_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct QuadrupletSpec {
    pub grid: TorusGrid,
    /// Degrees of the line summands of E₁ (length r₁).
    pub e1_degrees: Vec<i64>,
    /// Degrees of the line summands of E₂ (length r₂).
    pub e2_degrees: Vec<i64>,
    /// dz-coefficient of θ₁, r₁×r₁.
    pub theta1: Field,
    /// dz-coefficient of θ₂, r₂×r₂.
    pub theta2: Field,
    /// φ: E₁ → E₂, r₂×r₁.
    pub phi: Field,
    /// ψ: E₂ → E₁, r₁×r₂.
    pub psi: Field,
}

/// Sup norms of the defining constraints of a Higgs quadruplet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstraintReport {
    /// ∂̄θ₁, ∂̄θ₂, φ-morphism, ψ-morphism residuals.
    pub holomorphy: [f64; 4],
    pub phi_psi: f64,
    pub psi_phi: f64,
}

impl ConstraintReport {
    pub fn max(&self) -> f64 {
        self.holomorphy.iter().cloned().fold(self.phi_psi.max(self.psi_phi), f64::max)
    }
}

fn block_mismatch(f: &Field, row_deg: &[i64], col_deg: &[i64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (a, da) in row_deg.iter().enumerate() {
        for (b, db) in col_deg.iter().enumerate() {
            if da != db {
                worst = worst.max(f.sup_entry(a, b));
            }
        }
    }
    worst
}

impl QuadrupletSpec {
    /// Assemble and check shapes, form types and the equal-degree block
    /// structure. The holomorphy and composition constraints are not
    /// enforced here; see [`QuadrupletSpec::validate`].
    pub fn new(
        grid: TorusGrid,
        e1_degrees: Vec<i64>,
        e2_degrees: Vec<i64>,
        theta1: Field,
        theta2: Field,
        phi: Field,
        psi: Field,
    ) -> Result<QuadrupletSpec> {
        let (r1, r2) = (e1_degrees.len(), e2_degrees.len());
        if r1 == 0 || r2 == 0 {
            return Err(Error::Shape("quadruplet ranks must be positive".into()));
        }
        theta1.require_form(FormType::OneZero)?;
        theta2.require_form(FormType::OneZero)?;
        phi.require_form(FormType::Function)?;
        psi.require_form(FormType::Function)?;
        theta1.require_shape(r1, r1, "theta1")?;
        theta2.require_shape(r2, r2, "theta2")?;
        phi.require_shape(r2, r1, "phi")?;
        psi.require_shape(r1, r2, "psi")?;
        for f in [&theta1, &theta2, &phi, &psi] {
            if f.n != grid.n() {
                return Err(Error::Shape("field grid differs from quadruplet grid".into()));
            }
        }
        let q = QuadrupletSpec { grid, e1_degrees, e2_degrees, theta1, theta2, phi, psi };
        q.check_blocks(CONSTRAINT_TOL)?;
        Ok(q)
    }

    /// Quadruplet with constant Higgs fields and morphisms.
    pub fn constant(
        grid: &TorusGrid,
        e1_degrees: Vec<i64>,
        e2_degrees: Vec<i64>,
        theta1: &CMat,
        theta2: &CMat,
        phi: &CMat,
        psi: &CMat,
    ) -> Result<QuadrupletSpec> {
        QuadrupletSpec::new(
            grid.clone(),
            e1_degrees,
            e2_degrees,
            Field::constant(grid, theta1, FormType::OneZero),
            Field::constant(grid, theta2, FormType::OneZero),
            Field::constant(grid, phi, FormType::Function),
            Field::constant(grid, psi, FormType::Function),
        )
    }

    pub fn r1(&self) -> usize {
        self.e1_degrees.len()
    }

    pub fn r2(&self) -> usize {
        self.e2_degrees.len()
    }

    pub fn d1(&self) -> i64 {
        self.e1_degrees.iter().sum()
    }

    pub fn d2(&self) -> i64 {
        self.e2_degrees.iter().sum()
    }

    fn check_blocks(&self, tol: f64) -> Result<()> {
        let (e1, e2) = (&self.e1_degrees, &self.e2_degrees);
        let worst = [
            ("theta1", block_mismatch(&self.theta1, e1, e1)),
            ("theta2", block_mismatch(&self.theta2, e2, e2)),
            ("phi", block_mismatch(&self.phi, e2, e1)),
            ("psi", block_mismatch(&self.psi, e1, e2)),
        ];
        for (name, w) in worst {
            if w > tol {
                return Err(Error::Constraint(format!("{name} links summands of different degree (sup {w:e})")));
            }
        }
        Ok(())
    }

    pub fn constraint_report(&self) -> Result<ConstraintReport> {
        let holomorphy = holomorphy_residuals(self)?;
        let pp = self.phi.zip(&self.psi, FormType::Function, |a, b| a * b).sup_norm();
        let qq = self.psi.zip(&self.phi, FormType::Function, |a, b| a * b).sup_norm();
        Ok(ConstraintReport { holomorphy, phi_psi: pp, psi_phi: qq })
    }

    /// Check all defining conditions of a Higgs quadruplet.
    pub fn validate(&self, tol: f64) -> Result<ConstraintReport> {
        let rep = self.constraint_report()?;
        if rep.max() > tol {
            return Err(Error::Constraint(format!("quadruplet constraints exceed {tol:e}: {rep:?}")));
        }
        Ok(rep)
    }
}

/// Hermitian metrics h₁, h₂ relative to the background metrics.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricPair {
    pub h1: Field,
    pub h2: Field,
}

impl MetricPair {
    pub fn identity(grid: &TorusGrid, r1: usize, r2: usize) -> MetricPair {
        MetricPair {
            h1: Field::constant(grid, &linalg::identity(r1), FormType::Function),
            h2: Field::constant(grid, &linalg::identity(r2), FormType::Function),
        }
    }

    /// Multiply both metrics by the same positive constant.
    pub fn scaled(&self, lambda: f64) -> MetricPair {
        let c = C64::new(lambda, 0.0);
        MetricPair { h1: self.h1.scale(c), h2: self.h2.scale(c) }
    }

    pub fn validate(&self, q: &QuadrupletSpec) -> Result<()> {
        self.h1.require_shape(q.r1(), q.r1(), "h1")?;
        self.h2.require_shape(q.r2(), q.r2(), "h2")?;
        for (name, h, deg) in [("h1", &self.h1, &q.e1_degrees), ("h2", &self.h2, &q.e2_degrees)] {
            check_metric(h, name)?;
            let w = block_mismatch(h, deg, deg);
            if w > CONSTRAINT_TOL {
                return Err(Error::Constraint(format!("{name} links summands of different degree (sup {w:e})")));
            }
        }
        Ok(())
    }
}

/// Hermitian symmetry to 1e-13 (relative) and positive definiteness.
pub fn check_metric(h: &Field, name: &str) -> Result<()> {
    for m in &h.values {
        let scale = frob(m).max(1.0);
        if linalg::hermitian_defect(m) > 1e-13 * scale {
            return Err(Error::Domain(format!("{name} is not Hermitian")));
        }
        linalg::check_pd(m).map_err(|e| Error::Domain(format!("{name}: {e}")))?;
    }
    Ok(())
}

/// F_h as a (1,1)-form (dz∧dz̄ coefficient) for a metric over background
/// summand degrees.
pub fn chern_curvature(grid: &TorusGrid, h: &Field, degrees: &[i64]) -> Result<Field> {
    h.require_form(FormType::Function)?;
    h.require_shape(degrees.len(), degrees.len(), "metric")?;
    check_metric(h, "metric")?;
    let dh = grid.del(h)?;
    let hinv = h.try_map(FormType::Function, linalg::inverse)?;
    let conn = hinv.mul(&dh, FormType::Function);
    let dconn = grid.dbar_coeff(&conn);
    let bg = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        degrees.len(),
        degrees.iter().map(|d| C64::new(std::f64::consts::PI * *d as f64, 0.0)),
    ));
    Ok(dconn.map(FormType::OneOne, move |m| &bg - m))
}

/// (√−1/2π)∫ tr ΛF.
pub fn degree_from_curvature(grid: &TorusGrid, curvature: &Field) -> Result<f64> {
    let lf = grid.lambda_contract(curvature)?;
    let tr = grid.integrate(&lf.trace())?;
    Ok((C64::new(0.0, 1.0) / (2.0 * std::f64::consts::PI) * tr[(0, 0)]).re)
}

/// θ†_h: the dz̄-coefficient H⁻¹Θ†H.
pub fn higgs_adjoint(theta: &Field, h: &Field) -> Result<Field> {
    theta.require_form(FormType::OneZero)?;
    if theta.shape() != h.shape() || theta.rows != theta.cols {
        return Err(Error::Shape(format!("higgs field {:?} vs metric {:?}", theta.shape(), h.shape())));
    }
    let hinv = h.try_map(FormType::Function, linalg::inverse)?;
    let t_dag_h = theta.zip(h, FormType::ZeroOne, |t, hm| t.adjoint() * hm);
    Ok(hinv.zip(&t_dag_h, FormType::ZeroOne, |a, b| a * b))
}

/// [θ, θ†] = θ∧θ† + θ†∧θ as the dz∧dz̄ coefficient ΘΘ^h − Θ^hΘ.
pub fn bracket_theta(theta: &Field, theta_dag: &Field) -> Result<Field> {
    theta.require_form(FormType::OneZero)?;
    theta_dag.require_form(FormType::ZeroOne)?;
    if theta.shape() != theta_dag.shape() {
        return Err(Error::Shape("bracket of mismatched ranks".into()));
    }
    Ok(theta.zip(theta_dag, FormType::OneOne, |t, d| t * d - d * t))
}

/// f* = h_from⁻¹ f† h_to, the adjoint of f: (E_from, h_from) → (E_to, h_to).
pub fn morphism_adjoint(f: &Field, h_from: &Field, h_to: &Field) -> Result<Field> {
    if f.cols != h_from.rows || f.rows != h_to.rows {
        return Err(Error::Shape(format!(
            "morphism {:?} with metrics {:?} -> {:?}",
            f.shape(),
            h_from.shape(),
            h_to.shape()
        )));
    }
    let hinv = h_from.try_map(FormType::Function, linalg::inverse)?;
    let fd_h = f.zip(h_to, f.form, |a, h| a.adjoint() * h);
    Ok(hinv.zip(&fd_h, f.form, |a, b| a * b))
}

/// Sup norms of ∂̄θ₁, ∂̄θ₂, the φ-morphism condition and the ψ-morphism
/// condition. For the morphisms the (0,1)-part ∂̄φ and the (1,0)-part
/// θ₂φ − φθ₁ are measured separately and the larger is reported.
pub fn holomorphy_residuals(q: &QuadrupletSpec) -> Result<[f64; 4]> {
    let g = &q.grid;
    let t1 = g.dbar_coeff(&q.theta1).sup_norm();
    let t2 = g.dbar_coeff(&q.theta2).sup_norm();
    let phi_01 = g.dbar(&q.phi)?.sup_norm();
    let phi_10 =
        q.theta2.mul(&q.phi, FormType::OneZero).sub(&q.phi.zip(&q.theta1, FormType::OneZero, |a, b| a * b)).sup_norm();
    let psi_01 = g.dbar(&q.psi)?.sup_norm();
    let psi_10 =
        q.theta1.mul(&q.psi, FormType::OneZero).sub(&q.psi.zip(&q.theta2, FormType::OneZero, |a, b| a * b)).sup_norm();
    Ok([t1, t2, phi_01.max(phi_10), psi_01.max(psi_10)])
}
