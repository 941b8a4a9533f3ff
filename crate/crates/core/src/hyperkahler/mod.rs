//! The flat quaternionic structure on the configuration space of
//! (∇₁, Φ₁, ∇₂, Φ₂, φ, ψ) and the moment map μ_I of the unitary gauge action.
//!
//! Configurations and tangent vectors are written in unitary frames with real
//! coordinates (x, y): connections by skew-Hermitian potentials a = a_x dx + a_y dy
//! relative to the background connections, Higgs fields by skew-Hermitian
//! 1-forms Φ = −√−1(θ + θ†).
//!
//! The metric is
//!
//! ```text
//! g(a, b) = −∫Tr(Ȧ₁∧*Ḃ₁ + Φ̇₁∧*Ψ̇₁ + …) + 2Re∫Tr(f_a†f_b) + 2Re∫Tr(g_a†g_b)
//! ```
//!
//! and ω_I(a, b) = g(Ia, b). With these normalisations
//! d⟨μ_I, ξ⟩(a) = ω_I(a, X_ξ).

mod moment;
mod sample;

pub use moment::{
    equivariance_defect, infinitesimal_action, moment_map_property_check, moment_mu_i, pair, Configuration,
    GaugeDirection, MomentMap,
};
pub use sample::{random_configuration, random_gauge_direction, random_tangent, random_unitary_gauge};

use crate::geometry::{Field, FormType, OneForm, TorusGrid};
use crate::{CMat, Error, Result, C64};

/// Skew-Hermitian defect tolerance for tangent slots.
pub const SKEW_TOL: f64 = 1e-12;

/// A tangent vector (Ȧ₁, Φ̇₁, Ȧ₂, Φ̇₂, f, g) with f ∈ Hom(E₁,E₂), g ∈ Hom(E₂,E₁).
#[derive(Clone, Debug, PartialEq)]
pub struct TangentData {
    pub a1: OneForm,
    pub p1: OneForm,
    pub a2: OneForm,
    pub p2: OneForm,
    pub f: Field,
    pub g: Field,
}

impl TangentData {
    pub fn zeros(grid: &TorusGrid, r1: usize, r2: usize) -> TangentData {
        TangentData {
            a1: OneForm::zeros(grid, r1),
            p1: OneForm::zeros(grid, r1),
            a2: OneForm::zeros(grid, r2),
            p2: OneForm::zeros(grid, r2),
            f: Field::zeros(grid, r2, r1, FormType::Function),
            g: Field::zeros(grid, r1, r2, FormType::Function),
        }
    }

    pub fn ranks(&self) -> (usize, usize) {
        (self.a1.rank(), self.a2.rank())
    }

    pub fn validate(&self) -> Result<()> {
        let (r1, r2) = self.ranks();
        self.p1.x.require_shape(r1, r1, "p1")?;
        self.p2.x.require_shape(r2, r2, "p2")?;
        self.f.require_shape(r2, r1, "f")?;
        self.g.require_shape(r1, r2, "g")?;
        for (name, s) in [("a1", &self.a1), ("p1", &self.p1), ("a2", &self.a2), ("p2", &self.p2)] {
            let d = s.skew_defect();
            if d > SKEW_TOL * s.sup_norm().max(1.0) {
                return Err(Error::Constraint(format!("{name} is not skew-Hermitian (defect {d:e})")));
            }
        }
        Ok(())
    }

    pub fn add(&self, o: &TangentData) -> TangentData {
        TangentData {
            a1: self.a1.add(&o.a1),
            p1: self.p1.add(&o.p1),
            a2: self.a2.add(&o.a2),
            p2: self.p2.add(&o.p2),
            f: self.f.add(&o.f),
            g: self.g.add(&o.g),
        }
    }

    pub fn scale(&self, c: f64) -> TangentData {
        let c = C64::new(c, 0.0);
        TangentData {
            a1: self.a1.scale(c),
            p1: self.p1.scale(c),
            a2: self.a2.scale(c),
            p2: self.p2.scale(c),
            f: self.f.scale(c),
            g: self.g.scale(c),
        }
    }

    /// Largest slotwise sup-norm difference.
    pub fn distance(&self, o: &TangentData) -> f64 {
        [
            self.a1.sub(&o.a1).sup_norm(),
            self.p1.sub(&o.p1).sup_norm(),
            self.a2.sub(&o.a2).sup_norm(),
            self.p2.sub(&o.p2).sup_norm(),
            self.f.sub(&o.f).sup_norm(),
            self.g.sub(&o.g).sup_norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub(crate) fn tr_prod(a: &CMat, b: &CMat) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

fn check_same(a: &TangentData, b: &TangentData) -> Result<()> {
    if a.ranks() != b.ranks() || a.f.n != b.f.n {
        return Err(Error::Shape(format!("tangent data {:?} vs {:?}", a.ranks(), b.ranks())));
    }
    Ok(())
}

fn form_pairing(a: &OneForm, b: &OneForm) -> f64 {
    let mut s = 0.0;
    for (fa, fb) in [(&a.x, &b.x), (&a.y, &b.y)] {
        for (ma, mb) in fa.values.iter().zip(&fb.values) {
            s -= tr_prod(ma, mb).re;
        }
    }
    s
}

fn hom_pairing(a: &Field, b: &Field) -> f64 {
    a.values.iter().zip(&b.values).map(|(ma, mb)| 2.0 * tr_prod(&ma.adjoint(), mb).re).sum()
}

/// g(a, b) by grid quadrature.
pub fn metric_g(grid: &TorusGrid, a: &TangentData, b: &TangentData) -> Result<f64> {
    check_same(a, b)?;
    let s = form_pairing(&a.a1, &b.a1)
        + form_pairing(&a.p1, &b.p1)
        + form_pairing(&a.a2, &b.a2)
        + form_pairing(&a.p2, &b.p2)
        + hom_pairing(&a.f, &b.f)
        + hom_pairing(&a.g, &b.g);
    Ok(s * grid.cell_weight())
}

/// ω_I(a, b) = g(Ia, b).
pub fn omega_i(grid: &TorusGrid, a: &TangentData, b: &TangentData) -> Result<f64> {
    metric_g(grid, &apply_i(a), b)
}

/// I = (*, −*, *, −*, √−1, √−1).
pub fn apply_i(a: &TangentData) -> TangentData {
    let i = C64::new(0.0, 1.0);
    let m = C64::new(-1.0, 0.0);
    TangentData {
        a1: a.a1.hodge(),
        p1: a.p1.hodge().scale(m),
        a2: a.a2.hodge(),
        p2: a.p2.hodge().scale(m),
        f: a.f.scale(i),
        g: a.g.scale(i),
    }
}

/// J = (−Φ̇₁, Ȧ₁, −Φ̇₂, Ȧ₂, −g†, f†).
pub fn apply_j(a: &TangentData) -> TangentData {
    let m = C64::new(-1.0, 0.0);
    TangentData {
        a1: a.p1.scale(m),
        p1: a.a1.clone(),
        a2: a.p2.scale(m),
        p2: a.a2.clone(),
        f: a.g.adjoint(FormType::Function).scale(m),
        g: a.f.adjoint(FormType::Function),
    }
}

/// K = I∘J.
pub fn apply_k(a: &TangentData) -> TangentData {
    apply_i(&apply_j(a))
}

/// The largest slotwise defect among I² = J² = K² = −1, K = IJ and IJ = −JI.
pub fn quaternion_defect(a: &TangentData) -> f64 {
    let minus = a.scale(-1.0);
    let ij = apply_i(&apply_j(a));
    let ji = apply_j(&apply_i(a));
    [
        apply_i(&apply_i(a)).distance(&minus),
        apply_j(&apply_j(a)).distance(&minus),
        apply_k(&apply_k(a)).distance(&minus),
        apply_k(a).distance(&ij),
        ij.distance(&ji.scale(-1.0)),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quaternion_relations() {
        let g = TorusGrid::new(8).unwrap();
        for seed in 0..10 {
            let a = random_tangent(&g, 2, 3, seed);
            assert!(quaternion_defect(&a) < 1e-12);
        }
    }

    #[test]
    fn metric_is_positive_and_compatible() {
        let g = TorusGrid::new(8).unwrap();
        for seed in 0..5 {
            let a = random_tangent(&g, 2, 1, seed);
            let b = random_tangent(&g, 2, 1, seed + 100);
            assert!(metric_g(&g, &a, &a).unwrap() > 0.0);
            let gab = metric_g(&g, &a, &b).unwrap();
            assert!((gab - metric_g(&g, &b, &a).unwrap()).abs() < 1e-12);
            for op in [apply_i, apply_j, apply_k] {
                assert!((metric_g(&g, &op(&a), &op(&b)).unwrap() - gab).abs() < 1e-12);
            }
            assert!(omega_i(&g, &a, &a).unwrap().abs() < 1e-12);
            assert!((omega_i(&g, &a, &b).unwrap() + omega_i(&g, &b, &a).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn j_moves_f_into_g() {
        let g = TorusGrid::new(4).unwrap();
        let mut a = TangentData::zeros(&g, 1, 2);
        a.f = random_tangent(&g, 1, 2, 3).f;
        let j = apply_j(&a);
        assert_eq!(j.f.sup_norm(), 0.0);
        assert_eq!(j.a1.sup_norm().max(j.p1.sup_norm()).max(j.a2.sup_norm()).max(j.p2.sup_norm()), 0.0);
        assert_eq!(j.g, a.f.adjoint(FormType::Function));
    }

    #[test]
    fn rejects_non_skew_slots() {
        let g = TorusGrid::new(4).unwrap();
        let mut a = TangentData::zeros(&g, 1, 1);
        a.p2.y.values[0] = CMat::from_element(1, 1, C64::new(1.0, 0.0));
        assert!(a.validate().is_err());
        assert!(random_tangent(&g, 2, 2, 0).validate().is_ok());
    }
}
