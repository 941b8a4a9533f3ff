//! Two-chart quadrature on P¹ = ℂ_z ∪ ℂ_w, w = 1/z.
//!
//! Each chart samples its closed unit disk with Gauss–Legendre nodes in the
//! radius and uniform nodes in the angle. The Fubini–Study form is
//! ω_{P¹} = (i/2π)(1+|ζ|²)^{-2} dζ∧dζ̄ in either chart coordinate ζ, so its
//! density against the Lebesgue measure is (1/π)(1+|ζ|²)^{-2} and the total
//! mass is 1.

use crate::{Error, Result, C64};
use std::f64::consts::PI;

pub const P1_DEFAULT_RADIAL: usize = 24;
pub const P1_DEFAULT_ANGULAR: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChartId {
    Z,
    W,
}

impl ChartId {
    /// Sign picked up by the O(±2)-valued invariant forms in this chart.
    pub fn sign(self) -> f64 {
        match self {
            ChartId::Z => 1.0,
            ChartId::W => -1.0,
        }
    }

    /// Coordinate of the same point in the other chart.
    pub fn transition(self, zeta: C64) -> C64 {
        C64::new(1.0, 0.0) / zeta
    }

    pub fn other(self) -> ChartId {
        match self {
            ChartId::Z => ChartId::W,
            ChartId::W => ChartId::Z,
        }
    }
}

/// Sample points of one chart. `weights` already include the Fubini–Study
/// density, so `Σ weights` over both charts is ∫ω_{P¹} = 1.
#[derive(Clone, Debug)]
pub struct P1Chart {
    pub chart_id: ChartId,
    pub points: Vec<C64>,
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct P1Quadrature {
    pub z: P1Chart,
    pub w: P1Chart,
}

/// Fubini–Study density against dA in a chart coordinate.
pub fn fs_density(zeta: C64) -> f64 {
    let q = 1.0 + zeta.norm_sqr();
    1.0 / (PI * q * q)
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_m.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; m];
    let mut ws = vec![0.0; m];
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if m == 0 { 1.0 } else { p1 };
            dp = m as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = x;
        ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (xs, ws)
}

fn disk(chart_id: ChartId, n_radial: usize, n_angular: usize) -> P1Chart {
    let (xs, ws) = gauss_legendre(n_radial);
    let mut points = Vec::with_capacity(n_radial * n_angular);
    let mut weights = Vec::with_capacity(n_radial * n_angular);
    let dtheta = 2.0 * PI / n_angular as f64;
    for (x, w) in xs.iter().zip(&ws) {
        let r = 0.5 * (x + 1.0);
        let wr = 0.5 * w * r;
        for k in 0..n_angular {
            // offset the angular grid in the w-chart so the two charts do not
            // share directions on the overlap circle
            let shift = if chart_id == ChartId::W { 0.5 } else { 0.0 };
            let t = (k as f64 + shift) * dtheta;
            let zeta = C64::from_polar(r, t);
            points.push(zeta);
            weights.push(wr * dtheta * fs_density(zeta));
        }
    }
    P1Chart { chart_id, points, weights }
}

/// Build the two-chart quadrature. Both resolutions must be at least 8.
pub fn p1_quadrature(n_radial: usize, n_angular: usize) -> Result<P1Quadrature> {
    if n_radial < 8 || n_angular < 8 {
        return Err(Error::Resolution(format!("P1 quadrature needs resolutions >= 8, got ({n_radial}, {n_angular})")));
    }
    Ok(P1Quadrature { z: disk(ChartId::Z, n_radial, n_angular), w: disk(ChartId::W, n_radial, n_angular) })
}

impl P1Quadrature {
    pub fn new(n_radial: usize, n_angular: usize) -> Result<P1Quadrature> {
        p1_quadrature(n_radial, n_angular)
    }

    pub fn default_resolution() -> P1Quadrature {
        p1_quadrature(P1_DEFAULT_RADIAL, P1_DEFAULT_ANGULAR).expect("default resolution is valid")
    }

    pub fn charts(&self) -> [&P1Chart; 2] {
        [&self.z, &self.w]
    }

    /// All nodes as (chart, coordinate, weight).
    pub fn nodes(&self) -> impl Iterator<Item = (ChartId, C64, f64)> + '_ {
        self.charts().into_iter().flat_map(|c| c.points.iter().zip(&c.weights).map(move |(p, w)| (c.chart_id, *p, *w)))
    }

    /// ∫_{P¹} f ω_{P¹} for f given in chart coordinates.
    pub fn integrate<F: Fn(ChartId, C64) -> C64>(&self, f: F) -> C64 {
        self.nodes().map(|(c, p, w)| f(c, p) * w).sum()
    }

    /// ∫ f ω_{P¹} for a function written in the z coordinate.
    pub fn integrate_z<F: Fn(C64) -> C64>(&self, f: F) -> C64 {
        self.integrate(|c, p| match c {
            ChartId::Z => f(p),
            ChartId::W => f(c.transition(p)),
        })
    }
}
