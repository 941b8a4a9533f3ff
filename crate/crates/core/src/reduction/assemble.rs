//! Pointwise assembly of the block Higgs bundle F = p*E₁ ⊕ p*E₂⊗q*O(2) on
//! X×P¹ and its Hermitian–Einstein residual.
//!
//! Coordinates are z₁ = z on the torus and z₂ = ζ, a chart coordinate on P¹.
//! With the holomorphic frame of F the metric is H = diag(H₁, ρH₂),
//! ρ = (1+|ζ|²)^{-2}. The (0,1)-operator is ∂̄ + N dζ̄ with
//! N = [[0, c_α·s·ψ·ρ], [0, 0]] and θ_F = diag(Θ₁, Θ₂)dz + [[0,0],[c_β·s·φ,0]]dζ,
//! s the chart sign. The Chern connection of (∂̄ + N dζ̄, H) is
//! A_j = H⁻¹∂_jH − H⁻¹N_j̄†H, A_j̄ = N_j̄, and F_{jj̄} = ∂_jA_j̄ − ∂_j̄A_j + [A_j, A_j̄].
//!
//! Kähler form: Ω = (σ/2)ω_X + w·ω_{P¹} with w = 1 (split) or w = σ (scaled
//! fibre), so Λ(dz_j∧dz̄_j) = −2√−1/g_j with g₁ = σ/2, g₂ = wρ/π.
//!
//! Background summand metrics enter through local jets with value 1, zero
//! first derivatives and ∂∂̄ = −πd.

use super::p1line::{deg_p1, fs_power_jet};
use crate::geometry::{ChartId, P1Quadrature, TorusGrid};
use crate::higgs::{MetricPair, QuadrupletSpec, CONSTRAINT_TOL};
use crate::linalg::{self, frob};
use crate::vortex::{residual, VortexConstants};
use crate::{rng, CMat, Error, Result, C64};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which Kähler form on X×P¹ the contraction uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// (σ/2)ω_X + ω_{P¹}
    #[default]
    Split,
    /// (σ/2)ω_X + σω_{P¹}
    ScaledFiber,
}

impl Normalization {
    pub fn fiber_scale(self, sigma: f64) -> f64 {
        match self {
            Normalization::Split => 1.0,
            Normalization::ScaledFiber => sigma,
        }
    }
}

/// Contraction weights of Λ_σ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionWeights {
    pub sigma: f64,
    pub fiber_scale: f64,
}

impl ContractionWeights {
    pub fn new(sigma: f64, normalization: Normalization) -> Result<ContractionWeights> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
        }
        Ok(ContractionWeights { sigma, fiber_scale: normalization.fiber_scale(sigma) })
    }

    /// Λ(dz∧dz̄) on the torus factor.
    pub fn torus(&self) -> C64 {
        C64::new(0.0, -2.0 / (self.sigma / 2.0))
    }

    /// Λ(dζ∧dζ̄) on the P¹ factor at ζ.
    pub fn fiber(&self, zeta: C64) -> C64 {
        let rho = fs_power_jet(2, zeta).v;
        C64::new(0.0, -2.0 * PI / (self.fiber_scale * rho))
    }

    /// Λ_σ(p*ω).
    pub fn of_torus_form(&self) -> f64 {
        (C64::new(0.0, 0.5) * self.torus()).re
    }

    /// Λ_σ(q*ω_{P¹}) at ζ.
    pub fn of_fiber_form(&self, zeta: C64) -> f64 {
        let rho = fs_power_jet(2, zeta).v;
        (C64::new(0.0, rho / (2.0 * PI)) * self.fiber(zeta)).re
    }
}

/// Normalising constants for α and β.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub normalization: Normalization,
    /// Coupling produced by α with unit constant: Λ_σ gives −√−1·raw·ψψ*.
    pub raw_alpha: f64,
    /// Coupling produced by β with unit constant: Λ_σ gives √−1·raw·φ*φ.
    pub raw_beta: f64,
    /// Target coefficient 2/σ.
    pub target: f64,
    pub c_alpha: f64,
    pub c_beta: f64,
}

/// A sample point of X×P¹.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductSample {
    pub torus_index: usize,
    pub chart: ChartId,
    pub zeta: C64,
}

/// `count` uniformly random samples: a torus grid point and a point of the
/// unit disk of a random chart.
pub fn product_samples(grid: &TorusGrid, count: usize, seed: u64) -> Vec<ProductSample> {
    let mut r = rng::seeded(seed);
    (0..count)
        .map(|_| {
            let torus_index = r.random_range(0..grid.len());
            let chart = if r.random_bool(0.5) { ChartId::Z } else { ChartId::W };
            let rad = r.random::<f64>().sqrt();
            let zeta = C64::from_polar(rad, 2.0 * PI * r.random::<f64>());
            ProductSample { torus_index, chart, zeta }
        })
        .collect()
}

/// Torus-side jets at a single grid point.
#[derive(Clone, Debug)]
pub struct TorusJets {
    pub h: [CMat; 2],
    pub dh: [CMat; 2],
    pub dbh: [CMat; 2],
    /// ∂∂̄H.
    pub ddbh: [CMat; 2],
    pub degrees: [Vec<i64>; 2],
    pub theta: [CMat; 2],
    pub dbtheta: [CMat; 2],
    pub phi: CMat,
    pub dbphi: CMat,
    pub psi: CMat,
    pub dbpsi: CMat,
}

impl TorusJets {
    /// Constant data with identity metrics on degree-zero summands.
    pub fn constant(theta: [CMat; 2], phi: CMat, psi: CMat) -> TorusJets {
        let (r1, r2) = (theta[0].nrows(), theta[1].nrows());
        let z = |a: usize, b: usize| CMat::zeros(a, b);
        TorusJets {
            h: [linalg::identity(r1), linalg::identity(r2)],
            dh: [z(r1, r1), z(r2, r2)],
            dbh: [z(r1, r1), z(r2, r2)],
            ddbh: [z(r1, r1), z(r2, r2)],
            degrees: [vec![0; r1], vec![0; r2]],
            dbtheta: [z(r1, r1), z(r2, r2)],
            theta,
            dbphi: z(r2, r1),
            dbpsi: z(r1, r2),
            phi,
            psi,
        }
    }
}

/// Everything known about F at one sample point.
#[derive(Clone, Debug)]
pub struct ProductPointData {
    pub sample: ProductSample,
    pub metric: CMat,
    /// dζ̄-coefficient of the off-diagonal part of ∂̄_F.
    pub dbar_zeta: CMat,
    /// dz- and dζ-coefficients of θ_F.
    pub theta: [CMat; 2],
    /// F_{11̄}, F_{22̄} of the Chern connection.
    pub curvature: [CMat; 2],
    /// jj̄-components of [θ_F, θ_F†].
    pub bracket: [CMat; 2],
    /// Λ_σ(F + [θ_F, θ_F†]).
    pub contracted: CMat,
    /// Components of (∂̄_F + θ_F)² (Frobenius norms).
    pub integrability: [f64; 6],
    /// (2/σ)·diag(R₁, R₂) at the torus point, when available.
    pub vortex_scaled: Option<CMat>,
}

fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let (r1, r2) = (a.nrows(), b.nrows());
    let mut m = CMat::zeros(r1 + r2, r1 + r2);
    m.view_mut((0, 0), (r1, r1)).copy_from(a);
    m.view_mut((r1, r1), (r2, r2)).copy_from(b);
    m
}

fn upper(r1: usize, r2: usize, b: &CMat) -> CMat {
    let mut m = CMat::zeros(r1 + r2, r1 + r2);
    m.view_mut((0, r1), (r1, r2)).copy_from(b);
    m
}

fn lower(r1: usize, r2: usize, b: &CMat) -> CMat {
    let mut m = CMat::zeros(r1 + r2, r1 + r2);
    m.view_mut((r1, 0), (r2, r1)).copy_from(b);
    m
}

fn background(degrees: &[i64]) -> CMat {
    CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        degrees.len(),
        degrees.iter().map(|d| C64::new(PI * *d as f64, 0.0)),
    ))
}

/// Evaluate the block data at one point from torus jets, with α and β
/// multiplied by `c_alpha`, `c_beta`.
pub fn evaluate_point(
    jets: &TorusJets,
    sample: ProductSample,
    weights: &ContractionWeights,
    c_alpha: f64,
    c_beta: f64,
) -> Result<ProductPointData> {
    let (r1, r2) = (jets.h[0].nrows(), jets.h[1].nrows());
    let s = sample.chart.sign();
    let rj = fs_power_jet(2, sample.zeta);
    let ca = C64::new(s * c_alpha, 0.0);
    let cb = C64::new(s * c_beta, 0.0);

    let h = block_diag(&jets.h[0], &(&jets.h[1] * C64::from(rj.v)));
    let hinv = linalg::inverse(&h)?;
    let d1h = block_diag(&jets.dh[0], &(&jets.dh[1] * C64::from(rj.v)));
    let db1h = block_diag(&jets.dbh[0], &(&jets.dbh[1] * C64::from(rj.v)));
    let dd1h = block_diag(&jets.ddbh[0], &(&jets.ddbh[1] * C64::from(rj.v)));
    let zero1 = CMat::zeros(r1, r1);
    let d2h = block_diag(&zero1, &(&jets.h[1] * rj.d));
    let db2h = block_diag(&zero1, &(&jets.h[1] * rj.db));
    let dd2h = block_diag(&zero1, &(&jets.h[1] * C64::from(rj.ddb)));
    let bg = block_diag(&background(&jets.degrees[0]), &background(&jets.degrees[1]));

    // ∂̄_F off-diagonal coefficient and its derivatives.
    let n = upper(r1, r2, &(&jets.psi * (ca * rj.v)));
    let dbar1_n = upper(r1, r2, &(&jets.dbpsi * (ca * rj.v)));
    let d2_n = upper(r1, r2, &(&jets.psi * (ca * rj.d)));

    // F_{11̄}: N has no dz̄ part, so this is −∂̄(H⁻¹∂H) plus the background.
    let f11 = &hinv * &db1h * &hinv * &d1h - &hinv * &dd1h + &bg;

    // F_{22̄} = ∂_2N − ∂_2̄A_2 + [A_2, N].
    let nd = n.adjoint();
    let a2 = &hinv * &d2h - &hinv * &nd * &h;
    let db2_a2 = -(&hinv * &db2h * &hinv * &d2h) + &hinv * &dd2h
        - (-(&hinv * &db2h * &hinv * &nd * &h) + &hinv * d2_n.adjoint() * &h + &hinv * &nd * &db2h);
    let f22 = &d2_n - db2_a2 + linalg::commutator(&a2, &n);

    let th1 = block_diag(&jets.theta[0], &jets.theta[1]);
    let th2 = lower(r1, r2, &(&jets.phi * cb));
    let bracket = |t: &CMat| {
        let th = &hinv * t.adjoint() * &h;
        t * &th - &th * t
    };
    let b11 = bracket(&th1);
    let b22 = bracket(&th2);

    let contracted = (&f11 + &b11) * weights.torus() + (&f22 + &b22) * weights.fiber(sample.zeta);

    // (∂̄_F + θ_F)²: ∂̄θ_F, θ_F∧N, θ_F∧θ_F and ∂̄N along z₁.
    let dbar_th1 = block_diag(&jets.dbtheta[0], &jets.dbtheta[1]);
    let dbar_th2 = lower(r1, r2, &(&jets.dbphi * cb));
    let integrability = [
        frob(&dbar_th1),
        frob(&dbar_th2),
        frob(&linalg::commutator(&th1, &n)),
        frob(&linalg::commutator(&th2, &n)),
        frob(&dbar1_n),
        frob(&linalg::commutator(&th1, &th2)),
    ];

    Ok(ProductPointData {
        sample,
        metric: h,
        dbar_zeta: n,
        theta: [th1, th2],
        curvature: [f11, f22],
        bracket: [b11, b22],
        contracted,
        integrability,
        vortex_scaled: None,
    })
}

/// Calibrate α and β by evaluating the unit couplings on a rank (1,1)
/// configuration with flat data.
pub fn calibrate_alpha_beta(sigma: f64, normalization: Normalization) -> Result<Calibration> {
    let w = ContractionWeights::new(sigma, normalization)?;
    let one = CMat::from_element(1, 1, C64::new(1.0, 0.0));
    let zero = CMat::zeros(1, 1);
    let sample = ProductSample { torus_index: 0, chart: ChartId::Z, zeta: C64::new(0.3, -0.2) };

    let jets_a = TorusJets::constant([zero.clone(), zero.clone()], zero.clone(), one.clone());
    let pa = evaluate_point(&jets_a, sample, &w, 1.0, 1.0)?;
    let raw_alpha = (C64::new(0.0, 1.0) * pa.contracted[(0, 0)]).re;

    let jets_b = TorusJets::constant([zero.clone(), zero.clone()], one, zero);
    let pb = evaluate_point(&jets_b, sample, &w, 1.0, 1.0)?;
    let raw_beta = (C64::new(0.0, -1.0) * pb.contracted[(0, 0)]).re;

    if !(raw_alpha > 0.0 && raw_beta > 0.0) {
        return Err(Error::Invalid(format!("non-positive raw couplings {raw_alpha}, {raw_beta}")));
    }
    let target = 2.0 / sigma;
    Ok(Calibration {
        normalization,
        raw_alpha,
        raw_beta,
        target,
        c_alpha: (target / raw_alpha).sqrt(),
        c_beta: (target / raw_beta).sqrt(),
    })
}

fn random_jets(seed: u64, r1: usize, r2: usize) -> TorusJets {
    let mut r = rng::seeded(seed);
    let pd = |r: &mut rng::Rng64, k: usize| {
        let m = rng::matrix(r, k, k);
        &m * m.adjoint() + linalg::identity(k)
    };
    let h = [pd(&mut r, r1), pd(&mut r, r2)];
    let mut j = TorusJets::constant(
        [rng::matrix(&mut r, r1, r1), rng::matrix(&mut r, r2, r2)],
        rng::matrix(&mut r, r2, r1),
        rng::matrix(&mut r, r1, r2),
    );
    j.dh = [rng::matrix(&mut r, r1, r1), rng::matrix(&mut r, r2, r2)];
    j.dbh = [j.dh[0].adjoint(), j.dh[1].adjoint()];
    j.ddbh = [rng::hermitian(&mut r, r1), rng::hermitian(&mut r, r2)];
    j.h = h;
    j
}

/// At `count` random points with random jets of rank (2, 2), compare the
/// coupling part of Λ_σ(F + [θ,θ†]) with (2/σ)·√−1(φ*φ − ψψ*) on E₁ and
/// (2/σ)·√−1(ψ*ψ − φφ*) on E₂. Returns the largest discrepancy.
pub fn calibration_defect(sigma: f64, normalization: Normalization, count: usize, seed: u64) -> Result<f64> {
    let w = ContractionWeights::new(sigma, normalization)?;
    let cal = calibrate_alpha_beta(sigma, normalization)?;
    let grid = TorusGrid::new(4)?;
    let i = C64::new(0.0, 1.0);
    let mut worst: f64 = 0.0;
    for (k, s) in product_samples(&grid, count, seed).into_iter().enumerate() {
        let jets = random_jets(seed.wrapping_mul(1000).wrapping_add(k as u64), 2, 2);
        let mut bare = jets.clone();
        bare.psi = CMat::zeros(2, 2);
        bare.phi = CMat::zeros(2, 2);
        let full = evaluate_point(&jets, s, &w, cal.c_alpha, cal.c_beta)?.contracted;
        let base = evaluate_point(&bare, s, &w, cal.c_alpha, cal.c_beta)?.contracted;
        let diff = full - base;
        let psi_star = linalg::inverse(&jets.h[1])? * jets.psi.adjoint() * &jets.h[0];
        let phi_star = linalg::inverse(&jets.h[0])? * jets.phi.adjoint() * &jets.h[1];
        let t = C64::from(2.0 / sigma) * i;
        let want11 = (&phi_star * &jets.phi - &jets.psi * &psi_star) * t;
        let want22 = (&psi_star * &jets.psi - &jets.phi * &phi_star) * t;
        worst = worst
            .max(frob(&(diff.view((0, 0), (2, 2)).into_owned() - want11)))
            .max(frob(&(diff.view((2, 2), (2, 2)).into_owned() - want22)));
    }
    Ok(worst)
}

/// Assembled F at a set of sample points.
#[derive(Clone, Debug)]
pub struct ProductField {
    pub r1: usize,
    pub r2: usize,
    pub weights: ContractionWeights,
    pub calibration: Calibration,
    /// Vol(X×P¹) under Ω, by quadrature.
    pub volume: f64,
    /// deg_Ω F, with the P¹ degree and masses by quadrature.
    pub degree: f64,
    /// Hermitian–Einstein constant −(2π√−1/Vol)·deg F/rank F.
    pub lambda: C64,
    pub points: Vec<ProductPointData>,
}

impl ProductField {
    /// The rescaling between product and vortex residuals.
    pub fn vortex_scale(&self) -> f64 {
        2.0 / self.weights.sigma
    }

    pub fn max_integrability(&self) -> f64 {
        self.points.iter().flat_map(|p| p.integrability).fold(0.0, f64::max)
    }

    /// Largest off-diagonal block of ∂̄_F, θ_F and the metric; zero when ψ = φ = 0.
    pub fn off_block_size(&self) -> f64 {
        let (r1, r2) = (self.r1, self.r2);
        let off =
            |m: &CMat| frob(&m.view((0, r1), (r1, r2)).into_owned()).max(frob(&m.view((r1, 0), (r2, r1)).into_owned()));
        self.points
            .iter()
            .map(|p| off(&p.metric).max(off(&p.dbar_zeta)).max(off(&p.theta[0])).max(off(&p.theta[1])))
            .fold(0.0, f64::max)
    }
}

fn torus_jets(q: &QuadrupletSpec, h: &MetricPair) -> Vec<TorusJets> {
    let g = &q.grid;
    let hs = [&h.h1, &h.h2];
    let dh = hs.map(|f| g.del_coeff(f));
    let dbh = hs.map(|f| g.dbar_coeff(f));
    let ddbh = dbh.clone().map(|f| g.del_coeff(&f));
    let thetas = [&q.theta1, &q.theta2];
    let dbt = thetas.map(|f| g.dbar_coeff(f));
    let dbphi = g.dbar_coeff(&q.phi);
    let dbpsi = g.dbar_coeff(&q.psi);
    (0..g.len())
        .map(|i| TorusJets {
            h: [hs[0].values[i].clone(), hs[1].values[i].clone()],
            dh: [dh[0].values[i].clone(), dh[1].values[i].clone()],
            dbh: [dbh[0].values[i].clone(), dbh[1].values[i].clone()],
            ddbh: [ddbh[0].values[i].clone(), ddbh[1].values[i].clone()],
            degrees: [q.e1_degrees.clone(), q.e2_degrees.clone()],
            theta: [q.theta1.values[i].clone(), q.theta2.values[i].clone()],
            dbtheta: [dbt[0].values[i].clone(), dbt[1].values[i].clone()],
            phi: q.phi.values[i].clone(),
            dbphi: dbphi.values[i].clone(),
            psi: q.psi.values[i].clone(),
            dbpsi: dbpsi.values[i].clone(),
        })
        .collect()
}

/// Assemble F at the given samples after checking the quadruplet constraints.
pub fn assemble_f(
    q: &QuadrupletSpec,
    h: &MetricPair,
    c: &VortexConstants,
    normalization: Normalization,
    samples: &[ProductSample],
) -> Result<ProductField> {
    q.validate(CONSTRAINT_TOL)?;
    assemble_f_unchecked(q, h, c, normalization, samples)
}

/// As [`assemble_f`] without the constraint check, for probing how
/// integrability fails on non-quadruplets.
pub fn assemble_f_unchecked(
    q: &QuadrupletSpec,
    h: &MetricPair,
    c: &VortexConstants,
    normalization: Normalization,
    samples: &[ProductSample],
) -> Result<ProductField> {
    h.validate(q)?;
    let sigma = c.sigma_f64();
    let weights = ContractionWeights::new(sigma, normalization)?;
    let calibration = calibrate_alpha_beta(sigma, normalization)?;
    let (r1, r2) = (q.r1(), q.r2());
    if let Some(s) = samples.iter().find(|s| s.torus_index >= q.grid.len()) {
        return Err(Error::Shape(format!("sample torus index {} out of range", s.torus_index)));
    }

    let quad = P1Quadrature::default_resolution();
    let mass_x: f64 = q.grid.cell_weight() * q.grid.len() as f64;
    let mass_p1 = quad.integrate(|_, _| C64::new(1.0, 0.0)).re;
    let (g1, w) = (sigma / 2.0, weights.fiber_scale);
    let volume = g1 * mass_x * w * mass_p1;
    let degree = (q.d1() + q.d2()) as f64 * w * mass_p1 + r2 as f64 * deg_p1(2)? * g1 * mass_x;
    let lambda = C64::new(0.0, -2.0 * PI) * (degree / (volume * (r1 + r2) as f64));

    let vort = residual(q, h, c).ok();
    let scale = C64::from(2.0 / sigma);
    let jets = torus_jets(q, h);
    let points: Result<Vec<ProductPointData>> = samples
        .par_iter()
        .map(|s| {
            let mut p = evaluate_point(&jets[s.torus_index], *s, &weights, calibration.c_alpha, calibration.c_beta)?;
            if let Some(v) = &vort {
                p.vortex_scaled = Some(block_diag(&v.r1.values[s.torus_index], &v.r2.values[s.torus_index]) * scale);
            }
            Ok(p)
        })
        .collect();
    Ok(ProductField { r1, r2, weights, calibration, volume, degree, lambda, points: points? })
}

/// Sup norms of the Hermitian–Einstein residual over the samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeResidual {
    /// sup ‖Λ_σ(F + [θ,θ†]) − λ·Id‖ (operator norm, unitary frame).
    pub sup: f64,
    /// sup of the off-diagonal blocks of the same matrix (Frobenius).
    pub sup_off_diagonal: f64,
    /// sup ‖residual − (2/σ)·diag(R₁, R₂)‖; NaN when the vortex residual was unavailable.
    pub sup_vortex_gap: f64,
    /// sup of (2/σ)·‖diag(R₁, R₂)‖.
    pub sup_vortex_scaled: f64,
}

fn op_norm(m: &CMat) -> f64 {
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Evaluate the product residual against the constant `lambda`.
pub fn he_residual_product(f: &ProductField, lambda: C64) -> Result<HeResidual> {
    let (r1, r2) = (f.r1, f.r2);
    let per: Result<Vec<[f64; 4]>> = f
        .points
        .par_iter()
        .map(|p| {
            let g = linalg::herm_sqrt(&p.metric)?;
            let gi = linalg::herm_inv_sqrt(&p.metric)?;
            let res = &p.contracted - linalg::scalar(lambda, r1 + r2);
            let u = &g * &res * &gi;
            let off = frob(&u.view((0, r1), (r1, r2)).into_owned()).max(frob(&u.view((r1, 0), (r2, r1)).into_owned()));
            let (gap, vs) = match &p.vortex_scaled {
                Some(v) => {
                    let vu = &g * v * &gi;
                    (op_norm(&(&u - &vu)), op_norm(&vu))
                }
                None => (f64::NAN, f64::NAN),
            };
            Ok([op_norm(&u), off, gap, vs])
        })
        .collect();
    let per = per?;
    let sup = |k: usize| {
        per.iter().map(|v| v[k]).fold(0.0, |a: f64, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
    };
    Ok(HeResidual { sup: sup(0), sup_off_diagonal: sup(1), sup_vortex_gap: sup(2), sup_vortex_scaled: sup(3) })
}
