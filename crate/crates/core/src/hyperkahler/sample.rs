//! Seeded smooth test data for the configuration space.

use super::{Configuration, GaugeDirection, TangentData};
use crate::geometry::{Field, FormType, OneForm, TorusGrid};
use crate::{rng, CMat, C64};
use rand::Rng;
use std::f64::consts::PI;

const MODES: i32 = 2;
const AMPLITUDE: f64 = 0.2;

fn skew_field(r: &mut rng::Rng64, grid: &TorusGrid, k: usize) -> Field {
    rng::band_limited(r, grid, k, k, MODES, AMPLITUDE, |r| rng::skew_hermitian(r, k))
}

fn skew_form(r: &mut rng::Rng64, grid: &TorusGrid, k: usize) -> OneForm {
    OneForm { x: skew_field(r, grid, k), y: skew_field(r, grid, k) }
}

fn hom(r: &mut rng::Rng64, grid: &TorusGrid, rows: usize, cols: usize) -> Field {
    rng::band_limited(r, grid, rows, cols, MODES, AMPLITUDE, |r| rng::matrix(r, rows, cols))
}

/// A band-limited configuration over degree-zero summands.
pub fn random_configuration(grid: &TorusGrid, r1: usize, r2: usize, seed: u64) -> Configuration {
    let mut r = rng::seeded(seed);
    Configuration {
        conn1: skew_form(&mut r, grid, r1),
        higgs1: skew_form(&mut r, grid, r1),
        conn2: skew_form(&mut r, grid, r2),
        higgs2: skew_form(&mut r, grid, r2),
        phi: hom(&mut r, grid, r2, r1),
        psi: hom(&mut r, grid, r1, r2),
        e1_degrees: vec![0; r1],
        e2_degrees: vec![0; r2],
    }
}

pub fn random_tangent(grid: &TorusGrid, r1: usize, r2: usize, seed: u64) -> TangentData {
    let mut r = rng::seeded(seed);
    TangentData {
        a1: skew_form(&mut r, grid, r1),
        p1: skew_form(&mut r, grid, r1),
        a2: skew_form(&mut r, grid, r2),
        p2: skew_form(&mut r, grid, r2),
        f: hom(&mut r, grid, r2, r1),
        g: hom(&mut r, grid, r1, r2),
    }
}

pub fn random_gauge_direction(grid: &TorusGrid, r1: usize, r2: usize, seed: u64) -> GaugeDirection {
    let mut r = rng::seeded(seed);
    GaugeDirection { u: skew_field(&mut r, grid, r1), v: skew_field(&mut r, grid, r2) }
}

fn random_unitary(r: &mut rng::Rng64, k: usize) -> CMat {
    rng::matrix(r, k, k).qr().q()
}

/// g = V·diag(exp(2π√−1(k_j x + l_j y)))·W with constant unitary V, W and
/// |k_j|, |l_j| ≤ 1. Band-limited, so its spectral derivatives are exact.
pub fn random_unitary_gauge(grid: &TorusGrid, k: usize, seed: u64) -> Field {
    let mut r = rng::seeded(seed);
    let v = random_unitary(&mut r, k);
    let w = random_unitary(&mut r, k);
    let modes: Vec<(f64, f64)> =
        (0..k).map(|_| (r.random_range(-1..=1) as f64, r.random_range(-1..=1) as f64)).collect();
    Field::from_fn(grid, k, k, FormType::Function, |x, y| {
        let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            k,
            modes.iter().map(|(a, b)| C64::from_polar(1.0, 2.0 * PI * (a * x + b * y))),
        ));
        &v * d * &w
    })
}
