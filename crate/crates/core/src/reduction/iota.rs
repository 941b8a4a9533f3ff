//! SU(2)-invariant connections on F and the bijection ι with the data
//! (∇₁, Ψ₁, ∇₂, Ψ₂, φ, ψ) on X.
//!
//! Everything is written in unitary frames of h₁, h₂ and of h⁽²⁾ and in real
//! coordinates (x, y) on X and ζ = ξ + iη on P¹. A torus connection enters
//! through its skew-Hermitian potential a, a Higgs field through its
//! skew-Hermitian 1-form Ψ. The assembled operator is C = C_u + √−1·Φ where
//! C_u is the unitary connection potential
//!
//!   [[a₁, ψα], [−(ψα)*, a₂ + A_{h⁽²⁾}]]
//!
//! and Φ = [[Ψ₁, −(φβ)*], [φβ, Ψ₂]]. C_u is skew-Hermitian and √−1Φ is
//! Hermitian, so the decomposition back is C_u = (C − C†)/2.

use super::assemble::{Calibration, ProductSample};
use crate::geometry::{Field, FormType, OneForm, TorusGrid};
use crate::linalg::frob;
use crate::{rng, CMat, Error, Result, C64};

/// The six torus components.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantComponents {
    pub conn1: OneForm,
    pub higgs1: OneForm,
    pub conn2: OneForm,
    pub higgs2: OneForm,
    /// φ: E₁ → E₂.
    pub phi: Field,
    /// ψ: E₂ → E₁.
    pub psi: Field,
}

impl InvariantComponents {
    pub fn zeros(grid: &TorusGrid, r1: usize, r2: usize) -> InvariantComponents {
        InvariantComponents {
            conn1: OneForm::zeros(grid, r1),
            higgs1: OneForm::zeros(grid, r1),
            conn2: OneForm::zeros(grid, r2),
            higgs2: OneForm::zeros(grid, r2),
            phi: Field::zeros(grid, r2, r1, FormType::Function),
            psi: Field::zeros(grid, r1, r2, FormType::Function),
        }
    }

    /// Largest componentwise difference.
    pub fn distance(&self, o: &InvariantComponents) -> f64 {
        [
            self.conn1.sub(&o.conn1).sup_norm(),
            self.higgs1.sub(&o.higgs1).sup_norm(),
            self.conn2.sub(&o.conn2).sup_norm(),
            self.higgs2.sub(&o.higgs2).sup_norm(),
            self.phi.sub(&o.phi).sup_norm(),
            self.psi.sub(&o.psi).sup_norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    fn check(&self) -> Result<()> {
        for (name, f) in
            [("conn1", &self.conn1), ("higgs1", &self.higgs1), ("conn2", &self.conn2), ("higgs2", &self.higgs2)]
        {
            let d = f.skew_defect();
            if d > 1e-12 * f.sup_norm().max(1.0) {
                return Err(Error::Constraint(format!("{name} is not skew-Hermitian (defect {d:e})")));
            }
        }
        Ok(())
    }
}

/// The operator C at one sample, as its dx, dy, dξ, dη coefficients.
#[derive(Clone, Debug)]
pub struct InvariantConnectionPoint {
    pub sample: ProductSample,
    pub coeffs: [CMat; 4],
}

/// dξ, dη coefficients of the Chern connection of h⁽²⁾ in the unitary frame.
fn fs_connection(zeta: C64) -> (C64, C64) {
    let l = -zeta.conj() * (2.0 / (1.0 + zeta.norm_sqr()));
    (C64::new(0.0, l.im), C64::new(0.0, l.re))
}

fn fiber_factors(cal: &Calibration, s: &ProductSample) -> (C64, C64) {
    let q = 1.0 + s.zeta.norm_sqr();
    let sign = s.chart.sign();
    (C64::from(sign * cal.c_alpha / q), C64::from(sign * cal.c_beta / q))
}

/// Build C at the samples.
pub fn assemble_invariant_connection(
    d: &InvariantComponents,
    cal: &Calibration,
    samples: &[ProductSample],
) -> Result<Vec<InvariantConnectionPoint>> {
    d.check()?;
    let (r1, r2) = (d.conn1.rank(), d.conn2.rank());
    d.phi.require_shape(r2, r1, "phi")?;
    d.psi.require_shape(r1, r2, "psi")?;
    let i = C64::new(0.0, 1.0);
    samples
        .iter()
        .map(|s| {
            let k = s.torus_index;
            if k >= d.phi.len() {
                return Err(Error::Shape(format!("sample torus index {k} out of range")));
            }
            let (fa, fb) = fiber_factors(cal, s);
            let m = &d.psi.values[k] * fa;
            let p = &d.phi.values[k] * fb;
            let (cx, ce) = fs_connection(s.zeta);
            let id2 = CMat::identity(r2, r2);
            let mut coeffs: [CMat; 4] = std::array::from_fn(|_| CMat::zeros(r1 + r2, r1 + r2));
            let torus = [
                (&d.conn1.x, &d.higgs1.x, &d.conn2.x, &d.higgs2.x),
                (&d.conn1.y, &d.higgs1.y, &d.conn2.y, &d.higgs2.y),
            ];
            for (c, (a1, p1, a2, p2)) in coeffs.iter_mut().zip(torus) {
                c.view_mut((0, 0), (r1, r1)).copy_from(&(&a1.values[k] + &p1.values[k] * i));
                c.view_mut((r1, r1), (r2, r2)).copy_from(&(&a2.values[k] + &p2.values[k] * i));
            }
            // ψα = M dζ̄ = M(dξ − i dη), φβ = P dζ = P(dξ + i dη).
            let blocks = [
                (&m - p.adjoint() * i, -(m.adjoint()) + &p * i, &id2 * cx),
                (&m * (-i) - p.adjoint(), m.adjoint() * (-i) - &p, &id2 * ce),
            ];
            for (c, (b12, b21, b22)) in coeffs[2..].iter_mut().zip(blocks) {
                c.view_mut((0, r1), (r1, r2)).copy_from(&b12);
                c.view_mut((r1, 0), (r2, r1)).copy_from(&b21);
                c.view_mut((r1, r1), (r2, r2)).copy_from(&b22);
            }
            Ok(InvariantConnectionPoint { sample: *s, coeffs })
        })
        .collect()
}

/// Recover the six components. Every torus grid point must be sampled; the
/// fibre parts must have the invariant form, otherwise the input is not in
/// the image of ι.
pub fn decompose_invariant_connection(
    grid: &TorusGrid,
    r1: usize,
    r2: usize,
    cal: &Calibration,
    points: &[InvariantConnectionPoint],
) -> Result<InvariantComponents> {
    let mut out = InvariantComponents::zeros(grid, r1, r2);
    let mut seen = vec![false; grid.len()];
    let i = C64::new(0.0, 1.0);
    let half = C64::new(0.5, 0.0);
    for pt in points {
        let k = pt.sample.torus_index;
        if k >= grid.len() {
            return Err(Error::Shape(format!("sample torus index {k} out of range")));
        }
        let unitary: Vec<CMat> = pt.coeffs.iter().map(|c| (c - c.adjoint()) * half).collect();
        let higgs: Vec<CMat> = pt.coeffs.iter().map(|c| (c + c.adjoint()) * (-i * half)).collect();
        let (fa, fb) = fiber_factors(cal, &pt.sample);
        let m = unitary[2].view((0, r1), (r1, r2)).into_owned() / fa;
        let p = higgs[2].view((r1, 0), (r2, r1)).into_owned() / fb;

        let (cx, ce) = fs_connection(pt.sample.zeta);
        let id2 = CMat::identity(r2, r2);
        let defects = [
            frob(&(unitary[3].view((0, r1), (r1, r2)).into_owned() - &m * fa * (-i))),
            frob(&(higgs[3].view((r1, 0), (r2, r1)).into_owned() - &p * fb * i)),
            frob(&(unitary[2].view((r1, r1), (r2, r2)).into_owned() - &id2 * cx)),
            frob(&(unitary[3].view((r1, r1), (r2, r2)).into_owned() - &id2 * ce)),
            frob(&higgs[2].view((r1, r1), (r2, r2)).into_owned()),
            frob(&higgs[3].view((r1, r1), (r2, r2)).into_owned()),
            frob(&pt.coeffs[2].view((0, 0), (r1, r1)).into_owned()),
            frob(&pt.coeffs[3].view((0, 0), (r1, r1)).into_owned()),
        ];
        let scale = pt.coeffs.iter().map(frob).fold(1.0, f64::max);
        if let Some(dv) = defects.iter().find(|v| **v > 1e-10 * scale) {
            return Err(Error::Constraint(format!("connection is not SU(2)-invariant (defect {dv:e})")));
        }

        let torus = [(unitary[0].clone(), higgs[0].clone()), (unitary[1].clone(), higgs[1].clone())];
        let values = [
            torus.each_ref().map(|(u, _)| u.view((0, 0), (r1, r1)).into_owned()),
            torus.each_ref().map(|(_, h)| h.view((0, 0), (r1, r1)).into_owned()),
            torus.each_ref().map(|(u, _)| u.view((r1, r1), (r2, r2)).into_owned()),
            torus.each_ref().map(|(_, h)| h.view((r1, r1), (r2, r2)).into_owned()),
        ];
        let slots = [&mut out.conn1, &mut out.higgs1, &mut out.conn2, &mut out.higgs2];
        if seen[k] {
            let prev = [&out.conn1, &out.higgs1, &out.conn2, &out.higgs2];
            let mut worst = frob(&(&out.psi.values[k] - &m)).max(frob(&(&out.phi.values[k] - &p)));
            for (f, [vx, vy]) in prev.iter().zip(&values) {
                worst = worst.max(frob(&(&f.x.values[k] - vx))).max(frob(&(&f.y.values[k] - vy)));
            }
            if worst > 1e-10 * scale {
                return Err(Error::Constraint(format!("samples over one torus point disagree ({worst:e})")));
            }
            continue;
        }
        for (f, [vx, vy]) in slots.into_iter().zip(values) {
            f.x.values[k] = vx;
            f.y.values[k] = vy;
        }
        out.psi.values[k] = m;
        out.phi.values[k] = p;
        seen[k] = true;
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(Error::Invalid(format!("torus point {k} was not sampled")));
    }
    Ok(out)
}

/// Random components: skew-Hermitian entries for the 1-forms, general
/// entries for φ and ψ, independently at every grid point.
pub fn random_invariant_components(grid: &TorusGrid, r1: usize, r2: usize, seed: u64) -> InvariantComponents {
    let mut r = rng::seeded(seed);
    let mut d = InvariantComponents::zeros(grid, r1, r2);
    for f in [&mut d.conn1, &mut d.higgs1, &mut d.conn2, &mut d.higgs2] {
        let k = f.rank();
        for v in f.x.values.iter_mut().chain(f.y.values.iter_mut()) {
            *v = rng::skew_hermitian(&mut r, k);
        }
    }
    for v in d.phi.values.iter_mut() {
        *v = rng::matrix(&mut r, r2, r1);
    }
    for v in d.psi.values.iter_mut() {
        *v = rng::matrix(&mut r, r1, r2);
    }
    d
}

/// Assemble at one random fibre point over every torus point plus `extra`
/// random samples, decompose, and return the recovery error.
pub fn iota_roundtrip_error(
    grid: &TorusGrid,
    d: &InvariantComponents,
    cal: &Calibration,
    extra: usize,
    seed: u64,
) -> Result<f64> {
    let mut samples = super::assemble::product_samples(grid, grid.len() + extra, seed);
    for (k, s) in samples.iter_mut().take(grid.len()).enumerate() {
        s.torus_index = k;
    }
    let pts = assemble_invariant_connection(d, cal, &samples)?;
    let back = decompose_invariant_connection(grid, d.conn1.rank(), d.conn2.rank(), cal, &pts)?;
    Ok(back.distance(d))
}

/// True when ι followed by its inverse reproduces the input to round-off.
pub fn iota_roundtrip(grid: &TorusGrid, d: &InvariantComponents, cal: &Calibration, seed: u64) -> Result<bool> {
    let scale = [
        d.conn1.sup_norm(),
        d.higgs1.sup_norm(),
        d.conn2.sup_norm(),
        d.higgs2.sup_norm(),
        d.phi.sup_norm(),
        d.psi.sup_norm(),
    ]
    .into_iter()
    .fold(1.0, f64::max);
    Ok(iota_roundtrip_error(grid, d, cal, 16, seed)? <= 1e-12 * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::{calibrate_alpha_beta, product_samples, Normalization};

    #[test]
    fn zero_components_roundtrip_exactly() {
        let g = TorusGrid::new(4).unwrap();
        let cal = calibrate_alpha_beta(2.0, Normalization::Split).unwrap();
        let z = InvariantComponents::zeros(&g, 2, 1);
        assert_eq!(iota_roundtrip_error(&g, &z, &cal, 5, 0).unwrap(), 0.0);
    }

    #[test]
    fn random_components_roundtrip() {
        let g = TorusGrid::new(8).unwrap();
        let cal = calibrate_alpha_beta(0.75, Normalization::Split).unwrap();
        for seed in 0..4 {
            let d = random_invariant_components(&g, 2, 3, seed);
            assert!(iota_roundtrip(&g, &d, &cal, seed).unwrap());
        }
    }

    #[test]
    fn assembled_unitary_part_is_skew() {
        let g = TorusGrid::new(4).unwrap();
        let cal = calibrate_alpha_beta(1.0, Normalization::Split).unwrap();
        let mut d = random_invariant_components(&g, 1, 2, 7);
        d.higgs1 = OneForm::zeros(&g, 1);
        d.higgs2 = OneForm::zeros(&g, 2);
        d.phi = Field::zeros(&g, 2, 1, FormType::Function);
        for p in assemble_invariant_connection(&d, &cal, &product_samples(&g, 20, 1)).unwrap() {
            for c in &p.coeffs {
                assert!(frob(&(c + c.adjoint())) < 1e-13);
            }
        }
    }

    #[test]
    fn non_skew_input_is_rejected() {
        let g = TorusGrid::new(4).unwrap();
        let cal = calibrate_alpha_beta(1.0, Normalization::Split).unwrap();
        let mut d = InvariantComponents::zeros(&g, 1, 1);
        d.higgs1.x.values[3] = CMat::from_element(1, 1, C64::new(1.0, 0.0));
        assert!(matches!(iota_roundtrip(&g, &d, &cal, 0), Err(Error::Constraint(_))));
    }

    #[test]
    fn non_invariant_connection_is_rejected() {
        let g = TorusGrid::new(4).unwrap();
        let cal = calibrate_alpha_beta(1.0, Normalization::Split).unwrap();
        let d = InvariantComponents::zeros(&g, 1, 1);
        let mut samples = product_samples(&g, g.len(), 2);
        for (k, s) in samples.iter_mut().enumerate() {
            s.torus_index = k;
        }
        let mut pts = assemble_invariant_connection(&d, &cal, &samples).unwrap();
        pts[0].coeffs[3][(1, 1)] += C64::new(0.0, 0.5);
        assert!(decompose_invariant_connection(&g, 1, 1, &cal, &pts).is_err());
    }
}
