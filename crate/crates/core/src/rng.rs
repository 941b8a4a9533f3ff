//! Seeded random generation of smooth test data.

use crate::geometry::{Field, FormType, TorusGrid};
use crate::{CMat, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub type Rng64 = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(rng: &mut Rng64) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn matrix(rng: &mut Rng64, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| complex(rng))
}

pub fn hermitian(rng: &mut Rng64, r: usize) -> CMat {
    let m = matrix(rng, r, r);
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub fn skew_hermitian(rng: &mut Rng64, r: usize) -> CMat {
    hermitian(rng, r) * C64::new(0.0, 1.0)
}

/// Random band-limited field: a sum of Fourier modes with |k| ≤ `max_mode`
/// per axis and coefficients drawn from `coeff`. The result is exactly
/// representable on any grid with n/2 > max_mode.
pub fn band_limited<F>(
    rng: &mut Rng64,
    grid: &TorusGrid,
    rows: usize,
    cols: usize,
    max_mode: i32,
    amplitude: f64,
    mut coeff: F,
) -> Field
where
    F: FnMut(&mut Rng64) -> CMat,
{
    let mut out = Field::zeros(grid, rows, cols, FormType::Function);
    for kx in -max_mode..=max_mode {
        for ky in -max_mode..=max_mode {
            let c = coeff(rng) * C64::new(amplitude, 0.0);
            // pair (k, -k) so Hermitian/skew coefficient patterns stay
            // Hermitian/skew after multiplying by the real mode
            let phase = rng.random_range(0.0..2.0 * PI);
            for (idx, (x, y)) in grid.points().enumerate() {
                let arg = 2.0 * PI * (kx as f64 * x + ky as f64 * y) + phase;
                out.values[idx] += &c * C64::new(arg.cos(), 0.0);
            }
        }
    }
    out
}
